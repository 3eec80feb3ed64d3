#pragma once

// Brute-force reference computations that share no code path with the
// auxiliary-amplitude propagator:
//   - the classical fundamental matrix of Hamilton's equations,
//   - a split-step Fourier Schrodinger propagator on a uniform grid,
//   - discretized-operator checks of the diffeomorphism generator algebra.

#include "tdho/profiles.hpp"
#include "tdho/propagator.hpp"

#include <complex>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace tdho {

struct FundamentalOptions {
    double rtol = 1e-12;
    double atol = 1e-14;
    double t_start = 0.0;
};

/// Integrates a' = c/m, b' = d/m, c' = -m w^2 a, d' = -m w^2 b from the
/// identity at t_start.
SymplecticMap fundamental_matrix(const OscillatorProfile& profile, double t, const FundamentalOptions& opts = {});

/// Same, sampled at every entry of `times` (ascending) in one sweep.
std::vector<SymplecticMap> fundamental_matrices(const OscillatorProfile& profile, std::span<const double> times,
                                                const FundamentalOptions& opts = {});

// ---------------------------------------------------------------------------
// Grid wavefunctions

/// Cell-centred periodic grid: x_i = x_min + (i + 1/2) dx, dx = (x_max - x_min)/n.
struct GridGeometry {
    double x_min = -20.0;
    double x_max = 20.0;
    std::size_t n = 2048;

    double dx() const { return (x_max - x_min) / static_cast<double>(n); }
    double x(std::size_t i) const { return x_min + (static_cast<double>(i) + 0.5) * dx(); }
    bool operator==(const GridGeometry&) const = default;
};

/// Box +-(|mean| + 10 sigma), n a power of two with dx <= sigma/16.
GridGeometry auto_box(const GaussianState& state);

struct GridMoments {
    double mean_x, mean_p, cov_xx, cov_xp, cov_pp;
};

class GridState {
public:
    GridState(GridGeometry geom, std::vector<std::complex<double>> amplitudes);

    /// Samples and normalizes a Gaussian; throws BoxOverflowError if the
    /// state is not contained in the box.
    static GridState from_gaussian(const GaussianState& g, const GridGeometry& geom);

    const GridGeometry& geometry() const { return geom_; }
    std::span<const std::complex<double>> amplitudes() const { return psi_; }
    std::span<std::complex<double>> amplitudes() { return psi_; }

    double norm() const;
    /// max |psi|^2 over the four outermost samples on each side.
    double edge_density() const;
    GridMoments moments() const;

private:
    GridGeometry geom_;
    std::vector<std::complex<double>> psi_;
};

struct SplitStepOptions {
    double t_start = 0.0;
    /// Edge density above which propagation aborts with BoxOverflowError.
    double containment = 1e-12;
};

/// Strang splitting: half potential, full kinetic (spectral), half potential,
/// all coefficients sampled at the step midpoint.
GridState grid_propagate(const OscillatorProfile& profile, const GridState& psi0, double t, std::size_t steps,
                         const SplitStepOptions& opts = {});

/// <psi1|psi2> with the grid quadrature weight.
std::complex<double> overlap(const GridState& psi1, const GridState& psi2);

/// |<psi1|psi2>|, insensitive to global phase.
double fidelity(const GridState& psi1, const GridState& psi2);

/// Harmonic-oscillator eigenfunction (m = w = 1) of the given order sampled
/// on the grid, normalized.
GridState oscillator_eigenstate(unsigned order, const GridGeometry& geom);

// ---------------------------------------------------------------------------
// Generator algebra

struct SmoothFunction {
    std::function<double(double)> value;
    std::function<double(double)> derivative;
};

struct CommutatorResiduals {
    double diff1; // || [G(f1), f2] phi - f1 f2' phi ||
    double diff2; // || [G(f1), G(f2)] phi - G(f1 f2' - f2 f1') phi ||
    double dx;
};

/// G(f) = (i/2){f, p} discretized as (f D + D f)/2 with central differences.
/// Residuals are the largest L2 norms over a fixed set of normalized
/// Gaussian test vectors; the grid must contain them (BoxOverflowError
/// otherwise).
CommutatorResiduals generator_commutator_check(const SmoothFunction& f1, const SmoothFunction& f2,
                                               const GridGeometry& geom);

} // namespace tdho
