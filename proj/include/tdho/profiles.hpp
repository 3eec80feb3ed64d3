#pragma once

// Mass and frequency time-profiles of a harmonic oscillator
//     H(t) = p^2 / (2 m(t)) + m(t) w^2(t) x^2 / 2      (hbar = 1).
//
// The squared frequency w^2 is the stored quantity so inverted oscillators
// (w^2 < 0) are representable. Every profile carries an explicit finite time
// domain; evaluation outside it is a DomainError.

#include "tdho/spline.hpp"

#include <array>
#include <filesystem>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace tdho {

struct TimeDomain {
    double begin = 0.0;
    double end = 0.0;

    bool contains(double t) const;
    double length() const { return end - begin; }
};

enum class ProfileKind {
    constant,
    caldirola_kanai,
    solvable_mass_family,
    polynomial,
    sinusoidal_modulated,
    tabulated,
};

const char* kind_name(ProfileKind k) noexcept;

/// Derivative bundle returned by OscillatorProfile::eval.
struct ProfileSample {
    double mass = 0.0;
    double mass_rate = 0.0;
    double mass_accel = 0.0;
    double freq_sq = 0.0;
    double freq_sq_rate = 0.0;
};

namespace mass_law {
struct Constant {
    double mass;
};
/// m0 * exp(gamma t)
struct Exponential {
    double m0, gamma;
};
/// m0 * (mu e^{alpha t} + nu e^{-alpha t})^2
struct SolvableFamily {
    double m0, mu, nu, alpha;
};
/// sum_i coeffs[i] t^i
struct Polynomial {
    std::vector<double> coeffs;
};
/// m0 * (1 + amplitude sin(rate t + phase)), |amplitude| < 1
struct Sinusoidal {
    double m0, amplitude, rate, phase;
};
struct Tabulated {
    CubicSpline spline;
};
} // namespace mass_law

using MassLaw = std::variant<mass_law::Constant, mass_law::Exponential, mass_law::SolvableFamily,
                             mass_law::Polynomial, mass_law::Sinusoidal, mass_law::Tabulated>;

namespace freq_law {
struct Constant {
    double freq_sq;
};
/// w^2(t) = sum_i coeffs[i] t^i
struct Polynomial {
    std::vector<double> coeffs;
};
/// w^2(t) = freq_sq0 * (1 + amplitude cos(rate t + phase))
struct Sinusoidal {
    double freq_sq0, amplitude, rate, phase;
};
struct Tabulated {
    CubicSpline spline;
};
/// w^2 = Omega0^2 + m''/(2m) - (m'/(2m))^2, the member of the exactly
/// solvable class that is canonically equivalent to a constant oscillator
/// of frequency Omega0.
struct Solvable {
    double omega0;
};
} // namespace freq_law

using FrequencyLaw = std::variant<freq_law::Constant, freq_law::Polynomial, freq_law::Sinusoidal,
                                  freq_law::Tabulated, freq_law::Solvable>;

/// Immutable mass/frequency profile. Safe to evaluate concurrently.
class OscillatorProfile {
public:
    /// Validates mass positivity over the whole domain (throws PositivityError
    /// with the first offending time).
    OscillatorProfile(MassLaw mass, FrequencyLaw freq, TimeDomain domain);

    ProfileSample eval(double t) const;

    /// m, m', m'', m''' at t.
    std::array<double, 4> mass_derivatives(double t) const;

    double mass(double t) const { return mass_derivatives(t)[0]; }
    double freq_sq(double t) const { return eval(t).freq_sq; }

    ProfileKind kind() const;
    const TimeDomain& domain() const { return domain_; }
    const MassLaw& mass_law() const { return mass_; }
    const FrequencyLaw& frequency_law() const { return freq_; }

    /// Same mass law and domain, new frequency law.
    OscillatorProfile with_frequency(FrequencyLaw freq) const;
    OscillatorProfile with_domain(TimeDomain domain) const;

private:
    void check_time(double t) const;

    MassLaw mass_;
    FrequencyLaw freq_;
    TimeDomain domain_;
};

OscillatorProfile constant_profile(double mass, double omega, TimeDomain domain);
OscillatorProfile inverted_profile(double mass, double freq_sq, TimeDomain domain);

/// Exponentially growing mass m0 e^{gamma t}; the frequency is left at
/// w^2 = 0 and is attached separately with with_frequency() or
/// solvable_frequency().
OscillatorProfile caldirola_kanai(double m0, double gamma, TimeDomain domain);

/// m(t) = m0 (mu e^{alpha t} + nu e^{-alpha t})^2. Throws PositivityError
/// carrying the first zero of the bracket inside the domain.
OscillatorProfile solvable_mass_family(double m0, double mu, double nu, double alpha,
                                       TimeDomain domain);

/// Attaches w(t) = sqrt(Omega0^2 + m''/2m - (m'/2m)^2). Throws
/// ImaginaryFrequencyError with the first interval where the radicand is
/// negative.
OscillatorProfile solvable_frequency(const OscillatorProfile& mass_profile, double omega0);

/// Cubic-spline profile from sampled (t, m) and (t, w^2) columns. The domain
/// is the intersection of the two sample ranges.
OscillatorProfile tabulated_profile(std::vector<double> mass_t, std::vector<double> mass_v,
                                    std::vector<double> freq_t, std::vector<double> freq_v);

// ---------------------------------------------------------------------------
// CSV tabulations: header row, then "time,value" rows in decimal notation.

struct Tabulation {
    std::vector<double> time;
    std::vector<double> value;
};

Tabulation read_tabulation_csv(const std::filesystem::path& path);
void write_tabulation_csv(const std::filesystem::path& path, const Tabulation& tab,
                          const std::string& value_name = "value");

/// Samples mass and w^2 of `p` on a uniform grid of the given step.
std::pair<Tabulation, Tabulation> sample_profile(const OscillatorProfile& p, double step);

} // namespace tdho
