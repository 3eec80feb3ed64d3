#pragma once

// Coefficient-level algebra of the time-dependent dilatation transforms.
//
// Every Hamiltonian in the reduction chain is quadratic,
//     H = A p^2/2 + B x^2/2 + C {x,p}/2,
// so a transform is a map on (A, B, C). Operators are never materialized.

#include "tdho/auxode.hpp"
#include "tdho/profiles.hpp"

#include <cstddef>

namespace tdho {

struct QuadraticHamiltonian {
    double inv_mass = 0.0;  // A, coefficient of p^2/2
    double stiffness = 0.0; // B, coefficient of x^2/2
    double cross = 0.0;     // C, coefficient of {x,p}/2
    double time = 0.0;

    bool is_standard_form() const { return cross == 0.0; }
};

/// p^2/(2m) + m w^2 x^2/2 at time t.
QuadraticHamiltonian oscillator_hamiltonian(const OscillatorProfile& profile, double t);

/// epsilon(t) of the dilatation x -> e^eps x, with its first two rates.
struct DilatationParameter {
    double epsilon = 0.0;
    double epsilon_dot = 0.0;
    double epsilon_ddot = 0.0;
    double time = 0.0;

    double chi() const;

    /// eps = ln chi for an auxiliary solution; eps'' uses the interpolant's
    /// second derivative.
    static DilatationParameter from_auxiliary(const AuxiliarySolution& sol, double t);

    /// eps = ln(m0/m(t))/2, which makes m e^{2 eps} = m0.
    static DilatationParameter constant_mass(const OscillatorProfile& profile, double m0, double t);
};

/// H' = U H U^dag - i U dU^dag/dt for U = exp(i eps {x,p}/2):
/// A' = A e^{-2eps}, B' = B e^{2eps}, C' = C - eps'.
QuadraticHamiltonian dilatation_transform(const QuadraticHamiltonian& h, const DilatationParameter& d);

/// Removes the {x,p} term of a dilatated oscillator with the quadratic
/// phase exp(-i s x^2/2), s = eps' m e^{2eps}. The result has C = 0 and
///     B = d/dt(m e^{2eps} eps') + m e^{2eps}(w^2 - eps'^2).
QuadraticHamiltonian standardize(const QuadraticHamiltonian& h_prime, const DilatationParameter& d,
                                 const OscillatorProfile& profile);

/// Omega^2 = eps'' - eps'^2 + w^2; the squared frequency of the constant-mass
/// oscillator obtained with eps = ln(m0/m)/2.
double effective_frequency_sq(const OscillatorProfile& profile, const DilatationParameter& d);

/// w^2(t) - [Omega0^2 + m''/2m - (m'/2m)^2]. Vanishes on the whole domain
/// iff the oscillator is canonically equivalent to a constant one of
/// frequency Omega0.
double solvability_residual(const OscillatorProfile& profile, double omega0, double t);

struct ClassificationReport {
    bool in_class = false;
    double omega0_best = 0.0;
    double max_residual = 0.0;
    double tolerance = 0.0;
    std::size_t samples = 0;
};

/// Scans the domain on `samples` uniform times. The residual is g(t) - Omega0^2
/// for a profile-determined g, so the minimax Omega0^2 over the scan is the
/// midrange of g. A negative midrange (no real Omega0) reports Omega0 = 0.
ClassificationReport classify(const OscillatorProfile& profile, std::size_t samples = 2001,
                              double tolerance = 1e-9);

// ---------------------------------------------------------------------------
// Closed-form diffeomorphisms x -> x' = exp(eps f(x) d/dx) x and the momentum
// factor F2 with p' = sqrt(F2) p sqrt(F2).

enum class DiffeoFamily {
    linear,      // f(x) = x
    quadratic,   // f(x) = x^2
    exponential, // f(x) = e^{-lambda x}
};

struct DiffeoKind {
    DiffeoFamily family = DiffeoFamily::linear;
    double lambda = 0.0;

    static DiffeoKind linear() { return {DiffeoFamily::linear, 0.0}; }
    static DiffeoKind quadratic() { return {DiffeoFamily::quadratic, 0.0}; }
    static DiffeoKind exponential(double lambda);
};

const char* family_name(DiffeoFamily f) noexcept;

struct DiffeoImage {
    double x_prime = 0.0;
    double f2_factor = 1.0;
    /// False when the exponential kind is used with |eps lambda| >= 1: the map
    /// is still defined pointwise but not uniformly on the half line.
    bool uniform_condition = true;
};

DiffeoImage diffeo_map(const DiffeoKind& kind, double eps, double x);

/// dx'/dx, analytic. Equals 1/F2.
double diffeo_jacobian(const DiffeoKind& kind, double eps, double x);

/// Two-step image diffeo_map(eps2, diffeo_map(eps1, x).x'); by the flow
/// property it equals the one-step image with eps1 + eps2.
double flow_compose(const DiffeoKind& kind, double eps1, double eps2, double x);

/// g = F2^{-2}: metric of the free particle obtained by pushing the flat line
/// through the map.
double induced_metric(const DiffeoKind& kind, double eps, double x);

} // namespace tdho
