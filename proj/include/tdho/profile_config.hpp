#pragma once

// JSON description of oscillator profiles.
//
//   {
//     "domain":    [0, 10],
//     "mass":      {"kind": "caldirola-kanai", "m0": 1, "gamma": 0.5},
//     "frequency": {"kind": "constant", "omega": 1}
//   }
//
// mass kinds:      constant {value} | caldirola-kanai {m0, gamma}
//                  | solvable-mass-family {m0, mu, nu, alpha}
//                  | polynomial {coeffs} | sinusoidal-modulated {m0, amplitude, rate, phase}
//                  | tabulated {csv}
// frequency kinds: constant {omega | omega_sq} | polynomial {coeffs (of w^2)}
//                  | sinusoidal-modulated {omega_sq0, amplitude, rate, phase}
//                  | tabulated {csv (of w^2)} | solvable {omega0}
//
// CSV paths are resolved relative to `base_dir`. "domain" may be omitted when
// a tabulated law supplies the sample range.

#include "tdho/profiles.hpp"

#include <filesystem>

#include <json.hpp>

namespace tdho {

OscillatorProfile profile_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir = {});
OscillatorProfile load_profile(const std::filesystem::path& path);

} // namespace tdho
