#pragma once

// Shared helpers for the unit and acceptance tests.

#include "tdho/profiles.hpp"

#include <cmath>
#include <filesystem>
#include <random>
#include <string>

namespace tdho::testing {

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

/// Smooth profile on [0, t_end]: mass roughly in [0.5, 2.5], w^2 bounded
/// below by about 0.25 unless `allow_inverted` lets a constant w^2 < 0
/// through.
inline OscillatorProfile random_profile(std::mt19937_64& rng, double t_end = 5.0, bool allow_inverted = false) {
    MassLaw mass = mass_law::Constant{1.0};
    switch (std::uniform_int_distribution<int>(0, 3)(rng)) {
    case 0:
        mass = mass_law::Sinusoidal{uniform(rng, 0.7, 1.5), uniform(rng, -0.3, 0.3), uniform(rng, 0.3, 2.0),
                                    uniform(rng, 0.0, 6.283)};
        break;
    case 1:
        mass = mass_law::Exponential{uniform(rng, 0.7, 1.5), uniform(rng, -0.2, 0.2)};
        break;
    case 2:
        mass = mass_law::Polynomial{{uniform(rng, 0.8, 1.5), uniform(rng, -0.05, 0.1), uniform(rng, 0.0, 0.02)}};
        break;
    default:
        mass = mass_law::Constant{uniform(rng, 0.5, 2.0)};
    }
    FrequencyLaw freq = freq_law::Constant{1.0};
    switch (std::uniform_int_distribution<int>(0, 2)(rng)) {
    case 0:
        freq = freq_law::Sinusoidal{uniform(rng, 0.5, 2.0), uniform(rng, -0.4, 0.4), uniform(rng, 0.3, 2.0),
                                    uniform(rng, 0.0, 6.283)};
        break;
    case 1:
        freq = freq_law::Polynomial{
            {uniform(rng, 0.8, 2.0), uniform(rng, -0.08, 0.08), uniform(rng, -0.005, 0.005)}};
        break;
    default:
        freq = freq_law::Constant{uniform(rng, 0.5, 2.0)};
    }
    if (allow_inverted && uniform(rng, 0.0, 1.0) < 0.25) freq = freq_law::Constant{-uniform(rng, 0.1, 0.5)};
    return OscillatorProfile(std::move(mass), std::move(freq), {0.0, t_end});
}

/// Fresh scratch directory under the system temp path.
inline std::filesystem::path scratch_dir(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / ("tdho_test_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

} // namespace tdho::testing
