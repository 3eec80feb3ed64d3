#pragma once

// Auxiliary amplitude equations of the dilatation method:
//
//     [ d/dt(m chi') + m w^2 chi ] m chi^3 = K          (K = k^2)
//
// K = 0 is the classical equation of motion of the oscillator; K = +1 is the
// Ermakov-Pinney equation; K = -1 belongs to an imaginary-frequency
// transformed oscillator. Solutions are positive by contract: the solver
// stops at the positivity horizon instead of continuing through chi = 0.

#include "tdho/dopri5.hpp"
#include "tdho/error.hpp"
#include "tdho/profiles.hpp"

#include <iosfwd>
#include <memory>
#include <span>
#include <vector>

#include <json.hpp>

namespace tdho {

struct AuxOptions {
    StepControl step{};
    /// The solver halts once chi drops to this floor.
    double chi_min = 1e-12;
    /// Initial time; chi(t_start) = chi0. Defaults to 0.
    double t_start = 0.0;
    /// Bound on |residual| sampled inside each step of the dense output
    /// (relative to the rounding floor). 0 turns the check off.
    double residual_tol = 1e-10;
};

struct AuxPoint {
    double chi;
    double chi_dot;
    double chi_ddot;
};

/// Dense positive solution chi(t) on [t_start, t_end].
///
/// Between accepted integrator steps the solution is a quintic Hermite
/// interpolant in (chi, chi', chi''), so second derivatives are continuous
/// and the defining equation can be checked away from the nodes.
class AuxiliarySolution {
public:
    AuxiliarySolution(double coupling, std::vector<double> times, std::vector<double> chi,
                      std::vector<double> chi_dot, std::vector<double> chi_ddot);

    /// k^2 of the equation this solution satisfies.
    double coupling() const { return coupling_; }

    double t_start() const { return times_.front(); }
    double t_end() const { return times_.back(); }
    double chi0() const { return chi_.front(); }
    double chidot0() const { return chi_dot_.front(); }

    AuxPoint at(double t) const;

    std::span<const double> times() const { return times_; }
    std::span<const double> chi() const { return chi_; }
    std::span<const double> chi_dot() const { return chi_dot_; }
    std::span<const double> chi_ddot() const { return chi_ddot_; }
    std::size_t segment_count() const { return times_.size() - 1; }

private:
    double coupling_;
    std::vector<double> times_, chi_, chi_dot_, chi_ddot_;
};

/// Thrown when chi reaches chi_min before the requested end time. Carries
/// the horizon and the solution truncated there.
class PositivityHorizonError : public Error {
public:
    PositivityHorizonError(const std::string& what, double horizon,
                           std::shared_ptr<const AuxiliarySolution> partial)
        : Error(ErrorCategory::positivity_horizon, what), horizon_(horizon), partial_(std::move(partial)) {}

    double horizon() const noexcept { return horizon_; }
    const AuxiliarySolution& partial() const { return *partial_; }

private:
    double horizon_;
    std::shared_ptr<const AuxiliarySolution> partial_;
};

/// d/dt(m chi') + m w^2 chi = 0.
AuxiliarySolution solve_classical(const OscillatorProfile& profile, double chi0, double chidot0,
                                  double t_max, const AuxOptions& opts = {});

/// Ermakov form with k^2 in {-1, 0, +1}; k^2 = 0 delegates to solve_classical.
AuxiliarySolution solve_ermakov(const OscillatorProfile& profile, int k_squared, double chi0,
                                double chidot0, double t_max, const AuxOptions& opts = {});

/// Same equation with an arbitrary real coupling K (the unnormalized form
/// before rescaling).
AuxiliarySolution solve_auxiliary(const OscillatorProfile& profile, double coupling, double chi0,
                                  double chidot0, double t_max, const AuxOptions& opts = {});

/// [d/dt(m chi') + m w^2 chi] m chi^3 - K, using the profile's analytic
/// derivatives and the interpolant's second derivative.
double residual(const OscillatorProfile& profile, const AuxiliarySolution& sol, double t);

/// m(t) [chi1 chi2' - chi2 chi1']; constant for exact solutions of the
/// classical equation. Both solutions must have coupling 0.
double wronskian(const OscillatorProfile& profile, const AuxiliarySolution& sol1,
                 const AuxiliarySolution& sol2, double t);

/// chi -> chi / sqrt(k). A solution with coupling K becomes one with
/// coupling K / k^2.
AuxiliarySolution rescale(const AuxiliarySolution& sol, double k);

void write_solution_csv(std::ostream& os, const AuxiliarySolution& sol);
nlohmann::json solution_to_json(const AuxiliarySolution& sol);

} // namespace tdho
