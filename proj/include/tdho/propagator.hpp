#pragma once

// Closed-form evolution of the time-dependent oscillator from a positive
// auxiliary amplitude chi(t):
//
//   U(t) = D(t)^dag S(t)^dag V(t) S(0) D(0)
//
// with D = exp(i ln(chi) {x,p}/2) (dilatation), S = exp(-i m chi chi' x^2/2)
// (quadratic shear) and V = exp(-i alpha (p^2 + k^2 x^2)/2), where
// alpha(t) = int_0^t dt'/(m chi^2). Any positive chi with any k^2 gives the
// same U; the factorization is a gauge choice.

#include "tdho/auxode.hpp"
#include "tdho/profiles.hpp"

#include <complex>
#include <vector>

namespace tdho {

/// Heisenberg-picture map x(t) = a x + b p, p(t) = c x + d p.
struct SymplecticMap {
    double a = 1.0, b = 0.0, c = 0.0, d = 1.0;
    double time = 0.0;

    double det() const { return a * d - b * c; }
    /// Entrywise max |difference|.
    double distance(const SymplecticMap& o) const;

    static SymplecticMap identity(double t = 0.0) { return {1.0, 0.0, 0.0, 1.0, t}; }
};

/// Matrix product; the result carries lhs.time.
SymplecticMap operator*(const SymplecticMap& lhs, const SymplecticMap& rhs);

/// cos(k alpha), sin(k alpha)/k and k sin(k alpha) for coupling K = k^2,
/// continued to K <= 0 (K = 0: 1, alpha, 0; K < 0: cosh, sinh/|k|, -|k| sinh).
struct KernelTrig {
    double cos_term;
    double sin_over_k;
    double k_sin;
};
KernelTrig kernel_trig(double coupling, double alpha);

/// Values of the auxiliary amplitude and mass at the initial and final time.
struct AuxEndpoints {
    double chi0, chidot0, mass0;
    double chi, chidot, mass;
};

/// Closed-form (a, b, c, d) for the given kernel trigonometry.
SymplecticMap heisenberg_coefficients(const KernelTrig& trig, const AuxEndpoints& e, double t);

/// Parameters of the five factors of U(t).
struct PropagatorFactorization {
    double coupling = 0.0;
    double log_dilatation = 0.0;  // ln chi(t)
    double shear = 0.0;           // m(t) chi(t) chi'(t)
    double log_dilatation0 = 0.0; // ln chi0
    double shear0 = 0.0;          // m0 chi0 chi0'
    double phase_integral = 0.0;  // alpha(t)
    double time = 0.0;

    static PropagatorFactorization identity(double t = 0.0);

    /// Product of the Heisenberg actions of the five factors.
    SymplecticMap induced_map() const;
};

/// Caches the cumulative phase integral on the solution's nodes so repeated
/// queries cost one partial-segment quadrature each.
class Propagator {
public:
    Propagator(OscillatorProfile profile, AuxiliarySolution sol);

    double phase_integral(double t) const;
    SymplecticMap heisenberg_map(double t) const;
    PropagatorFactorization factorize(double t) const;

    const OscillatorProfile& profile() const { return profile_; }
    const AuxiliarySolution& solution() const { return sol_; }

private:
    double segment_integral(double a, double b) const;
    AuxEndpoints endpoints(double t) const;

    OscillatorProfile profile_;
    AuxiliarySolution sol_;
    std::vector<double> cumulative_;
};

double phase_integral(const OscillatorProfile& profile, const AuxiliarySolution& sol, double t);
SymplecticMap heisenberg_map(const OscillatorProfile& profile, const AuxiliarySolution& sol, double t);
PropagatorFactorization factorize(const OscillatorProfile& profile, const AuxiliarySolution& sol, double t);

// ---------------------------------------------------------------------------
// Gaussian states

/// First and second moments of a Gaussian state plus, for pure states, the
/// amplitude normalization and global phase of
///   psi(x) = e^{log_norm + i phase} (2 pi Sxx)^{-1/4}
///            exp(-(1 - 2i Sxp)(x - q)^2/(4 Sxx) + i p (x - q)).
struct GaussianState {
    double mean_x = 0.0;
    double mean_p = 0.0;
    double cov_xx = 0.5;
    double cov_xp = 0.0;
    double cov_pp = 0.5;
    double log_norm = 0.0;
    double phase = 0.0;

    double cov_det() const { return cov_xx * cov_pp - cov_xp * cov_xp; }
    bool is_pure(double tol = 1e-9) const { return std::abs(cov_det() - 0.25) <= tol; }

    /// Pure state with given means and covariance entries xx, xp; pp follows
    /// from det = 1/4.
    static GaussianState pure(double mean_x, double mean_p, double cov_xx, double cov_xp = 0.0);

    std::complex<double> amplitude(double x) const;
};

/// Exact action of U(t) on a Gaussian: means by the induced map S,
/// covariance by S Sigma S^T, and (pure states) the global phase from the
/// factor-by-factor action on exp(A x^2 + B x + C).
GaussianState evolve_gaussian(const PropagatorFactorization& fact, const GaussianState& state);

/// The factor-by-factor wavefunction action alone, including moments read
/// back from the evolved exponent. Pure states only.
GaussianState evolve_gaussian_wavefunction(const PropagatorFactorization& fact, const GaussianState& state);

} // namespace tdho
