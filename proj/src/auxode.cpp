#include "tdho/auxode.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <sstream>

namespace tdho {

namespace {

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

// Quintic Hermite segment in s = (t - t0)/h.
struct QuinticSegment {
    double c[6];
    double h;

    QuinticSegment(double h_, double y0, double d0, double dd0, double y1, double d1, double dd1) : h(h_) {
        c[0] = y0;
        c[1] = h * d0;
        c[2] = 0.5 * h * h * dd0;
        const double A = y1 - c[0] - c[1] - c[2];
        const double B = h * d1 - c[1] - 2.0 * c[2];
        const double C = h * h * dd1 - 2.0 * c[2];
        c[3] = 10.0 * A - 4.0 * B + 0.5 * C;
        c[4] = -15.0 * A + 7.0 * B - C;
        c[5] = 6.0 * A - 3.0 * B + 0.5 * C;
    }

    AuxPoint eval(double s) const {
        const double p = c[0] + s * (c[1] + s * (c[2] + s * (c[3] + s * (c[4] + s * c[5]))));
        const double dp = c[1] + s * (2.0 * c[2] + s * (3.0 * c[3] + s * (4.0 * c[4] + s * 5.0 * c[5])));
        const double ddp = 2.0 * c[2] + s * (6.0 * c[3] + s * (12.0 * c[4] + s * 20.0 * c[5]));
        return {p, dp / h, ddp / (h * h)};
    }
};

struct Nodes {
    std::vector<double> t, chi, dchi, ddchi;
    void push(double tt, double y, double dy, double ddy) {
        t.push_back(tt);
        chi.push_back(y);
        dchi.push_back(dy);
        ddchi.push_back(ddy);
    }
    void pop() {
        t.pop_back();
        chi.pop_back();
        dchi.pop_back();
        ddchi.pop_back();
    }
};

} // namespace

AuxiliarySolution::AuxiliarySolution(double coupling, std::vector<double> times, std::vector<double> chi,
                                     std::vector<double> chi_dot, std::vector<double> chi_ddot)
    : coupling_(coupling), times_(std::move(times)), chi_(std::move(chi)), chi_dot_(std::move(chi_dot)),
      chi_ddot_(std::move(chi_ddot)) {
    const std::size_t n = times_.size();
    if (n < 2 || chi_.size() != n || chi_dot_.size() != n || chi_ddot_.size() != n)
        throw UsageError("auxiliary solution needs at least two nodes with matching columns");
    for (std::size_t i = 1; i < n; ++i)
        if (!(times_[i] > times_[i - 1])) throw UsageError("auxiliary solution nodes must increase");
}

AuxPoint AuxiliarySolution::at(double t) const {
    const double slack = 1e-12 * std::max(1.0, std::abs(t_end()));
    if (!(t >= t_start() - slack && t <= t_end() + slack))
        throw DomainError("t = " + fmt(t) + " outside auxiliary solution range [" + fmt(t_start()) + ", " +
                          fmt(t_end()) + "]");
    t = std::clamp(t, t_start(), t_end());
    auto it = std::upper_bound(times_.begin(), times_.end(), t);
    std::size_t i = static_cast<std::size_t>(std::max<std::ptrdiff_t>(0, (it - times_.begin()) - 1));
    i = std::min(i, times_.size() - 2);
    const double h = times_[i + 1] - times_[i];
    QuinticSegment seg(h, chi_[i], chi_dot_[i], chi_ddot_[i], chi_[i + 1], chi_dot_[i + 1], chi_ddot_[i + 1]);
    return seg.eval((t - times_[i]) / h);
}

AuxiliarySolution solve_auxiliary(const OscillatorProfile& profile, double coupling, double chi0,
                                  double chidot0, double t_max, const AuxOptions& opts) {
    if (!(chi0 > 0.0)) throw UsageError("auxiliary solve needs chi0 > 0, got " + fmt(chi0));
    if (!std::isfinite(chidot0)) throw UsageError("auxiliary solve needs a finite chidot0");
    const double t0 = opts.t_start;
    if (!(t_max > t0)) throw UsageError("auxiliary solve needs t_max > t_start");
    if (!profile.domain().contains(t0) || !profile.domain().contains(t_max))
        throw DomainError("auxiliary solve interval [" + fmt(t0) + ", " + fmt(t_max) +
                          "] leaves the profile domain [" + fmt(profile.domain().begin) + ", " +
                          fmt(profile.domain().end) + "]");

    // chi'' = -(m'/m) chi' - w^2 chi + K / (m^2 chi^3)
    auto rhs = [&](double t, const OdeState<2>& y) -> OdeState<2> {
        const ProfileSample s = profile.eval(t);
        double acc = -(s.mass_rate / s.mass) * y[1] - s.freq_sq * y[0];
        if (coupling != 0.0) acc += coupling / (s.mass * s.mass * y[0] * y[0] * y[0]);
        return {y[1], acc};
    };
    auto admissible = [&](const OdeState<2>& y) { return coupling == 0.0 || y[0] > 0.0; };

    Nodes nodes;
    double chi_peak = chi0;
    bool crossed = false;
    auto observe = [&](double t, const OdeState<2>& y, const OdeState<2>& dy) {
        nodes.push(t, y[0], y[1], dy[1]);
        chi_peak = std::max(chi_peak, y[0]);
        if (y[0] <= opts.chi_min && nodes.t.size() > 1) {
            crossed = true;
            return false;
        }
        return true;
    };

    // Samples the interpolant inside the step; the node data alone can be
    // accurate while the curvature in between is not.
    auto defect = [&](double ta, const OdeState<2>& ya, const OdeState<2>& fa, double tb, const OdeState<2>& yb,
                      const OdeState<2>& fb) {
        if (!(opts.residual_tol > 0.0)) return 0.0;
        const double h = tb - ta;
        // Near a horizon the curvature is unbounded; leave that to the error test.
        if (h < 1e-7 * std::max(1.0, std::abs(ta))) return 0.0;
        if (ya[0] < 0.1 * chi_peak && h * std::abs(ya[1]) < 1e-2 * ya[0]) return 0.0;
        const QuinticSegment seg(h, ya[0], ya[1], fa[1], yb[0], yb[1], fb[1]);
        constexpr double eps = std::numeric_limits<double>::epsilon();
        double worst = 0.0;
        for (double s : {0.2, 0.5, 0.8}) {
            const AuxPoint p = seg.eval(s);
            if (coupling != 0.0 && !(p.chi > 0.0)) return 0.0;
            const double tm = ta + s * h;
            const double m = profile.mass(tm);
            const double acc = rhs(tm, {p.chi, p.chi_dot})[1];
            const double w = m * m * std::abs(p.chi * p.chi * p.chi);
            const double noise = 64.0 * eps * w *
                                 (std::abs(p.chi) / (h * h) + std::abs(p.chi_dot) / h + std::abs(p.chi_ddot) +
                                  std::abs(acc));
            worst = std::max(worst, w * std::abs(p.chi_ddot - acc) / std::max(opts.residual_tol, noise));
        }
        return worst;
    };

    const IntegrationResult res = integrate_dopri5<2>(rhs, t0, OdeState<2>{chi0, chidot0}, t_max, opts.step,
                                                      observe, admissible, defect);

    auto horizon_error = [&](double t_star, Nodes&& kept) {
        auto partial = std::make_shared<const AuxiliarySolution>(coupling, std::move(kept.t), std::move(kept.chi),
                                                                 std::move(kept.dchi), std::move(kept.ddchi));
        return PositivityHorizonError("auxiliary amplitude reaches the positivity floor at t = " + fmt(t_star) +
                                          " (k^2 = " + fmt(coupling) + ")",
                                      t_star, std::move(partial));
    };

    if (crossed) {
        // Locate chi = chi_min on the last segment and truncate there.
        const std::size_t n = nodes.t.size();
        const double ta = nodes.t[n - 2], tb = nodes.t[n - 1];
        const QuinticSegment seg(tb - ta, nodes.chi[n - 2], nodes.dchi[n - 2], nodes.ddchi[n - 2],
                                 nodes.chi[n - 1], nodes.dchi[n - 1], nodes.ddchi[n - 1]);
        double lo = 0.0, hi = 1.0;
        for (int it = 0; it < 200 && hi - lo > 1e-16; ++it) {
            const double mid = 0.5 * (lo + hi);
            (seg.eval(mid).chi > opts.chi_min ? lo : hi) = mid;
        }
        const double t_star = ta + hi * (tb - ta);
        const AuxPoint p = seg.eval(hi);
        const AuxPoint end{nodes.chi.back(), nodes.dchi.back(), nodes.ddchi.back()};
        nodes.pop();
        if (t_star > nodes.t.back())
            nodes.push(t_star, p.chi, p.chi_dot, p.chi_ddot);
        else if (nodes.t.size() < 2)
            nodes.push(tb, end.chi, end.chi_dot, end.chi_ddot);
        throw horizon_error(t_star, std::move(nodes));
    }

    switch (res.status) {
    case IntegrationStatus::reached_end:
        break;
    case IntegrationStatus::step_collapse:
        // An attractive 1/chi^3 term drives chi to zero in finite time with
        // unbounded curvature; the step size collapses before chi_min is hit.
        if (nodes.chi.back() <= 1e-4 * chi_peak && nodes.t.size() >= 2)
            throw horizon_error(nodes.t.back(), std::move(nodes));
        throw StiffnessError("auxiliary integrator step size collapsed at t = " + fmt(res.t), res.t);
    case IntegrationStatus::step_limit:
        throw StiffnessError("auxiliary integrator exceeded its step budget at t = " + fmt(res.t), res.t);
    case IntegrationStatus::stopped_by_observer:
        break;
    }
    return AuxiliarySolution(coupling, std::move(nodes.t), std::move(nodes.chi), std::move(nodes.dchi),
                             std::move(nodes.ddchi));
}

AuxiliarySolution solve_classical(const OscillatorProfile& profile, double chi0, double chidot0, double t_max,
                                  const AuxOptions& opts) {
    return solve_auxiliary(profile, 0.0, chi0, chidot0, t_max, opts);
}

AuxiliarySolution solve_ermakov(const OscillatorProfile& profile, int k_squared, double chi0, double chidot0,
                                double t_max, const AuxOptions& opts) {
    if (k_squared < -1 || k_squared > 1)
        throw UsageError("k^2 must be -1, 0 or +1, got " + std::to_string(k_squared));
    if (k_squared == 0) return solve_classical(profile, chi0, chidot0, t_max, opts);
    return solve_auxiliary(profile, static_cast<double>(k_squared), chi0, chidot0, t_max, opts);
}

double residual(const OscillatorProfile& profile, const AuxiliarySolution& sol, double t) {
    const AuxPoint p = sol.at(t);
    const ProfileSample s = profile.eval(t);
    const double bracket = s.mass_rate * p.chi_dot + s.mass * p.chi_ddot + s.mass * s.freq_sq * p.chi;
    return bracket * s.mass * p.chi * p.chi * p.chi - sol.coupling();
}

double wronskian(const OscillatorProfile& profile, const AuxiliarySolution& sol1, const AuxiliarySolution& sol2,
                 double t) {
    if (sol1.coupling() != 0.0 || sol2.coupling() != 0.0)
        throw UsageError("wronskian is defined for solutions of the classical equation (k^2 = 0) only");
    const AuxPoint a = sol1.at(t), b = sol2.at(t);
    return profile.mass(t) * (a.chi * b.chi_dot - b.chi * a.chi_dot);
}

AuxiliarySolution rescale(const AuxiliarySolution& sol, double k) {
    if (!(k > 0.0)) throw UsageError("rescale factor must be positive, got " + fmt(k));
    const double f = 1.0 / std::sqrt(k);
    auto scaled = [f](std::span<const double> v) {
        std::vector<double> out(v.begin(), v.end());
        for (double& x : out) x *= f;
        return out;
    };
    return AuxiliarySolution(sol.coupling() / (k * k), std::vector<double>(sol.times().begin(), sol.times().end()),
                             scaled(sol.chi()), scaled(sol.chi_dot()), scaled(sol.chi_ddot()));
}

void write_solution_csv(std::ostream& os, const AuxiliarySolution& sol) {
    const auto old = os.precision(17);
    os << "t,chi,chi_dot\n";
    for (std::size_t i = 0; i < sol.times().size(); ++i)
        os << sol.times()[i] << "," << sol.chi()[i] << "," << sol.chi_dot()[i] << "\n";
    os.precision(old);
}

nlohmann::json solution_to_json(const AuxiliarySolution& sol) {
    nlohmann::json j;
    j["k_squared"] = sol.coupling();
    j["chi0"] = sol.chi0();
    j["chidot0"] = sol.chidot0();
    j["t_start"] = sol.t_start();
    j["t_end"] = sol.t_end();
    j["t"] = std::vector<double>(sol.times().begin(), sol.times().end());
    j["chi"] = std::vector<double>(sol.chi().begin(), sol.chi().end());
    j["chi_dot"] = std::vector<double>(sol.chi_dot().begin(), sol.chi_dot().end());
    return j;
}

} // namespace tdho
