#include "tdho/canon.hpp"

#include "tdho/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace tdho {

namespace {

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

} // namespace

QuadraticHamiltonian oscillator_hamiltonian(const OscillatorProfile& profile, double t) {
    const ProfileSample s = profile.eval(t);
    return {1.0 / s.mass, s.mass * s.freq_sq, 0.0, t};
}

double DilatationParameter::chi() const { return std::exp(epsilon); }

DilatationParameter DilatationParameter::from_auxiliary(const AuxiliarySolution& sol, double t) {
    const AuxPoint p = sol.at(t);
    if (!(p.chi > 0.0)) throw PositivityError("dilatation needs chi > 0, got " + fmt(p.chi), t);
    const double r1 = p.chi_dot / p.chi;
    return {std::log(p.chi), r1, p.chi_ddot / p.chi - r1 * r1, t};
}

DilatationParameter DilatationParameter::constant_mass(const OscillatorProfile& profile, double m0, double t) {
    if (!(m0 > 0.0)) throw PositivityError("reference mass must be positive", t);
    const auto m = profile.mass_derivatives(t);
    const double r1 = m[1] / m[0];
    const double r2 = m[2] / m[0];
    return {0.5 * std::log(m0 / m[0]), -0.5 * r1, -0.5 * (r2 - r1 * r1), t};
}

QuadraticHamiltonian dilatation_transform(const QuadraticHamiltonian& h, const DilatationParameter& d) {
    const double e2 = std::exp(2.0 * d.epsilon);
    return {h.inv_mass / e2, h.stiffness * e2, h.cross - d.epsilon_dot, h.time};
}

QuadraticHamiltonian standardize(const QuadraticHamiltonian& h_prime, const DilatationParameter& d,
                                 const OscillatorProfile& profile) {
    if (!(h_prime.inv_mass > 0.0)) throw UsageError("standardize needs a positive inverse-mass coefficient");
    const ProfileSample s = profile.eval(d.time);
    const double e2 = std::exp(2.0 * d.epsilon);
    // shear s = -C'/A' = eps' m e^{2eps}; its rate expanded analytically
    const double shear_rate =
        e2 * (s.mass_rate * d.epsilon_dot + 2.0 * s.mass * d.epsilon_dot * d.epsilon_dot + s.mass * d.epsilon_ddot);
    const double c = h_prime.cross;
    // H'(x, p + s x) + s' x^2/2 with s = -C'/A'
    const double stiffness = h_prime.stiffness - c * c / h_prime.inv_mass + shear_rate;
    return {h_prime.inv_mass, stiffness, 0.0, h_prime.time};
}

double effective_frequency_sq(const OscillatorProfile& profile, const DilatationParameter& d) {
    return d.epsilon_ddot - d.epsilon_dot * d.epsilon_dot + profile.eval(d.time).freq_sq;
}

double solvability_residual(const OscillatorProfile& profile, double omega0, double t) {
    const ProfileSample s = profile.eval(t);
    const double r1 = s.mass_rate / s.mass;
    return s.freq_sq - (omega0 * omega0 + 0.5 * s.mass_accel / s.mass - 0.25 * r1 * r1);
}

ClassificationReport classify(const OscillatorProfile& profile, std::size_t samples, double tolerance) {
    if (samples < 2) throw UsageError("classify needs at least two samples");
    const TimeDomain& dom = profile.domain();
    std::vector<double> times(samples);
    for (std::size_t i = 0; i < samples; ++i)
        times[i] = (i + 1 == samples) ? dom.end
                                      : dom.begin + dom.length() * static_cast<double>(i) / (samples - 1);

    // residual(Omega0) = g(t) - Omega0^2 with g = solvability_residual(0, t)
    double g_min = std::numeric_limits<double>::infinity(), g_max = -g_min;
    for (double t : times) {
        const double g = solvability_residual(profile, 0.0, t);
        g_min = std::min(g_min, g);
        g_max = std::max(g_max, g);
    }
    const double omega0_sq = std::max(0.0, 0.5 * (g_min + g_max));

    ClassificationReport rep;
    rep.omega0_best = std::sqrt(omega0_sq);
    rep.samples = samples;
    rep.tolerance = tolerance;
    for (double t : times)
        rep.max_residual = std::max(rep.max_residual, std::abs(solvability_residual(profile, rep.omega0_best, t)));
    rep.in_class = rep.max_residual <= tolerance;
    return rep;
}

DiffeoKind DiffeoKind::exponential(double lambda) {
    if (!(lambda > 0.0)) throw DomainError("exponential diffeomorphism needs lambda > 0, got " + fmt(lambda));
    return {DiffeoFamily::exponential, lambda};
}

const char* family_name(DiffeoFamily f) noexcept {
    switch (f) {
    case DiffeoFamily::linear: return "linear";
    case DiffeoFamily::quadratic: return "quadratic";
    case DiffeoFamily::exponential: return "exponential";
    }
    return "unknown";
}

DiffeoImage diffeo_map(const DiffeoKind& kind, double eps, double x) {
    switch (kind.family) {
    case DiffeoFamily::linear:
        return {std::exp(eps) * x, std::exp(-eps), true};
    case DiffeoFamily::quadratic: {
        if (!(std::abs(eps * x) < 1.0))
            throw DomainError("quadratic diffeomorphism needs |eps x| < 1 (singular at x = 1/eps = " +
                              fmt(1.0 / eps) + "), got eps = " + fmt(eps) + ", x = " + fmt(x));
        const double u = 1.0 - eps * x;
        return {x / u, u * u, true};
    }
    case DiffeoFamily::exponential: {
        const double lam = kind.lambda;
        if (!(lam > 0.0)) throw DomainError("exponential diffeomorphism needs lambda > 0");
        const double ex = std::exp(lam * x);
        const double arg = ex + eps * lam;
        if (!(arg > 0.0))
            throw DomainError("exponential diffeomorphism needs e^{lambda x} + eps lambda > 0 (singular at x = " +
                              fmt(std::log(-eps * lam) / lam) + ")");
        // F2 = f(x)/f(x') = e^{lambda (x' - x)}
        return {std::log(arg) / lam, arg / ex, std::abs(eps * lam) < 1.0};
    }
    }
    throw UsageError("unknown diffeomorphism family");
}

double diffeo_jacobian(const DiffeoKind& kind, double eps, double x) {
    switch (kind.family) {
    case DiffeoFamily::linear: return std::exp(eps);
    case DiffeoFamily::quadratic: {
        const double u = 1.0 - eps * x;
        if (!(std::abs(eps * x) < 1.0)) throw DomainError("quadratic diffeomorphism singular at x = " + fmt(x));
        return 1.0 / (u * u);
    }
    case DiffeoFamily::exponential: {
        const double ex = std::exp(kind.lambda * x);
        const double arg = ex + eps * kind.lambda;
        if (!(arg > 0.0)) throw DomainError("exponential diffeomorphism singular at x = " + fmt(x));
        return ex / arg;
    }
    }
    throw UsageError("unknown diffeomorphism family");
}

double flow_compose(const DiffeoKind& kind, double eps1, double eps2, double x) {
    return diffeo_map(kind, eps2, diffeo_map(kind, eps1, x).x_prime).x_prime;
}

double induced_metric(const DiffeoKind& kind, double eps, double x) {
    const double f2 = diffeo_map(kind, eps, x).f2_factor;
    return 1.0 / (f2 * f2);
}

} // namespace tdho
