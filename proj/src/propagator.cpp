#include "tdho/propagator.hpp"

#include "tdho/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include <boost/math/quadrature/gauss.hpp>

namespace tdho {

namespace {

using cplx = std::complex<double>;

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

// Bisects until a 10-point Gauss rule agrees with its two halves. Smooth
// segments stop after one split; a segment ending at a zero of chi keeps
// splitting toward that end.
template <class F>
double adaptive_gauss(const F& f, double a, double b, double whole, double rel, int& budget) {
    using rule = boost::math::quadrature::gauss<double, 10>;
    const double m = 0.5 * (a + b);
    const double left = rule::integrate(f, a, m), right = rule::integrate(f, m, b);
    const double both = left + right;
    if (--budget <= 0 || !(m > a && m < b) || std::abs(both - whole) <= rel * std::abs(both)) return both;
    const double l = adaptive_gauss(f, a, m, left, rel, budget);
    return l + adaptive_gauss(f, m, b, right, rel, budget);
}

// psi(x) = exp(A x^2 + B x + C)
struct GaussExponent {
    cplx A, B, C;
};

GaussExponent to_exponent(const GaussianState& g) {
    const cplx i(0.0, 1.0);
    const cplx A = -(1.0 - 2.0 * i * g.cov_xp) / (4.0 * g.cov_xx);
    const double q = g.mean_x, p = g.mean_p;
    const cplx B = -2.0 * A * q + i * p;
    const cplx C = A * q * q - i * p * q + i * g.phase + g.log_norm - 0.25 * std::log(2.0 * std::numbers::pi * g.cov_xx);
    return {A, B, C};
}

GaussianState from_exponent(const GaussExponent& e) {
    GaussianState g;
    if (!(e.A.real() < 0.0)) throw UsageError("Gaussian exponent is not normalizable");
    g.cov_xx = -0.25 / e.A.real();
    g.cov_xp = 2.0 * g.cov_xx * e.A.imag();
    g.cov_pp = (0.25 + g.cov_xp * g.cov_xp) / g.cov_xx;
    g.mean_x = -e.B.real() / (2.0 * e.A.real());
    g.mean_p = e.B.imag() + 2.0 * e.A.imag() * g.mean_x;
    const cplx i(0.0, 1.0);
    const cplx rest = e.C - e.A * g.mean_x * g.mean_x + i * g.mean_p * g.mean_x;
    g.log_norm = rest.real() + 0.25 * std::log(2.0 * std::numbers::pi * g.cov_xx);
    g.phase = rest.imag();
    return g;
}

// (D psi)(x) = e^{eps/2} psi(e^eps x) for D = exp(i eps {x,p}/2)
void apply_dilatation(GaussExponent& e, double eps) {
    const double s = std::exp(eps);
    e.A *= s * s;
    e.B *= s;
    e.C += 0.5 * eps;
}

// multiplication by exp(-i s x^2/2)
void apply_shear(GaussExponent& e, double s) { e.A -= cplx(0.0, 0.5 * s); }

// exp(-i alpha (p^2 + K x^2)/2) through the linear (Q, P) flow
// Q'' = -K Q with Q(0) = 1, P(0) = -2i A0; A = iP/(2Q), B = B0/Q,
// C = C0 + i B0^2 Sk/(2Q) - Log(Q)/2 with the branch of Log continuous in alpha.
void apply_kernel(GaussExponent& e, double coupling, double alpha) {
    const cplx i(0.0, 1.0);
    const KernelTrig tr = kernel_trig(coupling, alpha);
    const cplx beta = -2.0 * i * e.A;
    const cplx Q = tr.cos_term + beta * tr.sin_over_k;
    const cplx P = beta * tr.cos_term - tr.k_sin;

    double arg;
    if (coupling > 0.0) {
        // Im Q has the sign of sin(k alpha); unwrap by half periods.
        const double k = std::sqrt(coupling);
        const double theta = k * alpha;
        const double turns = std::floor(theta / std::numbers::pi);
        const double rest = theta - turns * std::numbers::pi;
        const cplx q_red = std::cos(rest) + beta / k * std::sin(rest);
        arg = turns * std::numbers::pi + std::atan2(q_red.imag(), q_red.real());
    } else {
        arg = std::atan2(Q.imag(), Q.real());
    }
    const cplx logQ(std::log(std::abs(Q)), arg);

    const cplx B0 = e.B;
    e.A = i * P / (2.0 * Q);
    e.B = B0 / Q;
    e.C += i * B0 * B0 * tr.sin_over_k / (2.0 * Q) - 0.5 * logQ;
}

} // namespace

double SymplecticMap::distance(const SymplecticMap& o) const {
    return std::max({std::abs(a - o.a), std::abs(b - o.b), std::abs(c - o.c), std::abs(d - o.d)});
}

SymplecticMap operator*(const SymplecticMap& l, const SymplecticMap& r) {
    return {l.a * r.a + l.b * r.c, l.a * r.b + l.b * r.d, l.c * r.a + l.d * r.c, l.c * r.b + l.d * r.d, l.time};
}

KernelTrig kernel_trig(double coupling, double alpha) {
    if (coupling > 0.0) {
        const double k = std::sqrt(coupling);
        return {std::cos(k * alpha), std::sin(k * alpha) / k, k * std::sin(k * alpha)};
    }
    if (coupling < 0.0) {
        const double k = std::sqrt(-coupling);
        return {std::cosh(k * alpha), std::sinh(k * alpha) / k, -k * std::sinh(k * alpha)};
    }
    return {1.0, alpha, 0.0};
}

SymplecticMap heisenberg_coefficients(const KernelTrig& tr, const AuxEndpoints& e, double t) {
    const double C = tr.cos_term, Sk = tr.sin_over_k, kS = tr.k_sin;
    const double s0 = e.mass0 * e.chi0 * e.chidot0; // m0 chi0 chi0'
    const double mv = e.mass * e.chidot;             // m chi'
    const double m0v0 = e.mass0 * e.chidot0;         // m0 chi0'

    SymplecticMap s;
    s.time = t;
    s.a = (e.chi / e.chi0) * (C - s0 * Sk);
    s.b = e.chi0 * e.chi * Sk;
    s.c = (mv / e.chi0 - m0v0 / e.chi) * C - kS / (e.chi0 * e.chi) - m0v0 * mv * Sk;
    s.d = (e.chi0 / e.chi) * C + e.chi0 * mv * Sk;
    return s;
}

PropagatorFactorization PropagatorFactorization::identity(double t) {
    PropagatorFactorization f;
    f.time = t;
    return f;
}

SymplecticMap PropagatorFactorization::induced_map() const {
    const double chi = std::exp(log_dilatation), chi0 = std::exp(log_dilatation0);
    const KernelTrig tr = kernel_trig(coupling, phase_integral);
    const SymplecticMap dil_t{chi, 0.0, 0.0, 1.0 / chi, time};
    const SymplecticMap shear_t{1.0, 0.0, shear, 1.0, time};
    const SymplecticMap kernel{tr.cos_term, tr.sin_over_k, -tr.k_sin, tr.cos_term, time};
    const SymplecticMap shear_0{1.0, 0.0, -shear0, 1.0, time};
    const SymplecticMap dil_0{1.0 / chi0, 0.0, 0.0, chi0, time};
    return dil_t * shear_t * kernel * shear_0 * dil_0;
}

Propagator::Propagator(OscillatorProfile profile, AuxiliarySolution sol)
    : profile_(std::move(profile)), sol_(std::move(sol)) {
    const auto times = sol_.times();
    for (double c : sol_.chi())
        if (!(c > 0.0)) throw PositivityError("propagator needs a positive auxiliary amplitude", sol_.t_start());
    cumulative_.assign(times.size(), 0.0);
    for (std::size_t i = 1; i < times.size(); ++i)
        cumulative_[i] = cumulative_[i - 1] + segment_integral(times[i - 1], times[i]);
}

double Propagator::segment_integral(double a, double b) const {
    if (b <= a) return 0.0;
    auto integrand = [this](double t) {
        const double chi = sol_.at(t).chi;
        return 1.0 / (profile_.mass(t) * chi * chi);
    };
    // rounding t alone moves the integrand by about eps |t| |chi'/chi|
    double rel = 1e-13;
    for (double t : {a, b}) {
        const AuxPoint p = sol_.at(t);
        rel = std::max(rel, 8.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(t)) *
                                std::abs(p.chi_dot / p.chi));
    }
    int budget = 200;
    return adaptive_gauss(integrand, a, b, boost::math::quadrature::gauss<double, 10>::integrate(integrand, a, b), rel,
                          budget);
}

double Propagator::phase_integral(double t) const {
    const auto times = sol_.times();
    const double slack = 1e-12 * std::max(1.0, std::abs(sol_.t_end()));
    if (!(t >= sol_.t_start() - slack && t <= sol_.t_end() + slack))
        throw DomainError("t = " + fmt(t) + " outside auxiliary solution range [" + fmt(sol_.t_start()) + ", " +
                          fmt(sol_.t_end()) + "]");
    t = std::clamp(t, sol_.t_start(), sol_.t_end());
    auto it = std::upper_bound(times.begin(), times.end(), t);
    const std::size_t i = static_cast<std::size_t>(std::max<std::ptrdiff_t>(0, (it - times.begin()) - 1));
    if (i + 1 >= times.size()) return cumulative_.back();
    return cumulative_[i] + segment_integral(times[i], t);
}

AuxEndpoints Propagator::endpoints(double t) const {
    const AuxPoint p = sol_.at(t);
    if (!(p.chi > 0.0)) throw PositivityError("auxiliary amplitude not positive at t = " + fmt(t), t);
    return {sol_.chi0(), sol_.chidot0(), profile_.mass(sol_.t_start()), p.chi, p.chi_dot, profile_.mass(t)};
}

SymplecticMap Propagator::heisenberg_map(double t) const {
    if (t == sol_.t_start()) return SymplecticMap::identity(t);
    const AuxEndpoints e = endpoints(t);
    return heisenberg_coefficients(kernel_trig(sol_.coupling(), phase_integral(t)), e, t);
}

PropagatorFactorization Propagator::factorize(double t) const {
    const AuxEndpoints e = endpoints(t);
    PropagatorFactorization f;
    f.coupling = sol_.coupling();
    f.log_dilatation = std::log(e.chi);
    f.shear = e.mass * e.chi * e.chidot;
    f.log_dilatation0 = std::log(e.chi0);
    f.shear0 = e.mass0 * e.chi0 * e.chidot0;
    f.phase_integral = phase_integral(t);
    f.time = t;
    return f;
}

double phase_integral(const OscillatorProfile& profile, const AuxiliarySolution& sol, double t) {
    return Propagator(profile, sol).phase_integral(t);
}

SymplecticMap heisenberg_map(const OscillatorProfile& profile, const AuxiliarySolution& sol, double t) {
    return Propagator(profile, sol).heisenberg_map(t);
}

PropagatorFactorization factorize(const OscillatorProfile& profile, const AuxiliarySolution& sol, double t) {
    return Propagator(profile, sol).factorize(t);
}

GaussianState GaussianState::pure(double mean_x, double mean_p, double cov_xx, double cov_xp) {
    if (!(cov_xx > 0.0)) throw UsageError("Gaussian position variance must be positive");
    GaussianState g;
    g.mean_x = mean_x;
    g.mean_p = mean_p;
    g.cov_xx = cov_xx;
    g.cov_xp = cov_xp;
    g.cov_pp = (0.25 + cov_xp * cov_xp) / cov_xx;
    return g;
}

std::complex<double> GaussianState::amplitude(double x) const {
    const GaussExponent e = to_exponent(*this);
    return std::exp(e.A * x * x + e.B * x + e.C);
}

GaussianState evolve_gaussian_wavefunction(const PropagatorFactorization& f, const GaussianState& state) {
    if (!state.is_pure()) throw UsageError("wavefunction evolution needs a pure Gaussian (det Sigma = 1/4)");
    GaussExponent e = to_exponent(state);
    apply_dilatation(e, f.log_dilatation0);
    apply_shear(e, f.shear0);
    apply_kernel(e, f.coupling, f.phase_integral);
    apply_shear(e, -f.shear);
    apply_dilatation(e, -f.log_dilatation);
    return from_exponent(e);
}

GaussianState evolve_gaussian(const PropagatorFactorization& f, const GaussianState& state) {
    const SymplecticMap s = f.induced_map();
    GaussianState out = state;
    out.mean_x = s.a * state.mean_x + s.b * state.mean_p;
    out.mean_p = s.c * state.mean_x + s.d * state.mean_p;
    // S Sigma S^T
    const double xx = state.cov_xx, xp = state.cov_xp, pp = state.cov_pp;
    out.cov_xx = s.a * s.a * xx + 2.0 * s.a * s.b * xp + s.b * s.b * pp;
    out.cov_xp = s.a * s.c * xx + (s.a * s.d + s.b * s.c) * xp + s.b * s.d * pp;
    out.cov_pp = s.c * s.c * xx + 2.0 * s.c * s.d * xp + s.d * s.d * pp;
    if (state.is_pure()) {
        const GaussianState w = evolve_gaussian_wavefunction(f, state);
        out.phase = w.phase;
        out.log_norm = w.log_norm;
    }
    return out;
}

} // namespace tdho
