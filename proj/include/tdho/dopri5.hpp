#pragma once

// Adaptive Dormand-Prince 5(4) integrator for small fixed-size systems.
// Header-only; the right-hand side and the step observer are templates so
// the hot loop inlines.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>

namespace tdho {

struct StepControl {
    double rtol = 1e-10;
    double atol = 1e-12;
    double h_max = 0.01;
    double h_init = 0.0; // 0 selects a starting step automatically
    long max_steps = 50'000'000;
};

enum class IntegrationStatus {
    reached_end,
    stopped_by_observer,
    step_collapse,
    step_limit,
};

struct IntegrationResult {
    IntegrationStatus status;
    double t; // time of the last accepted state
};

template <std::size_t N>
using OdeState = std::array<double, N>;

/// Integrates y' = rhs(t, y) from t0 to t_end (t_end > t0).
///
/// `observe(t, y, dydt)` is called for the initial point and after every
/// accepted step; returning false stops the integration.
/// `admissible(y)` may veto a stage state (e.g. outside the equation's
/// domain); a vetoed step is retried with a smaller step size.
/// `defect(t, y, dydt, t_new, y_new, dydt_new)` rates a step that passed the
/// error test; a value above 1 rejects it as well. The ratio is assumed to
/// scale like h^4; once shrinking the step stops reducing it the step is taken.
template <std::size_t N, class Rhs, class Observe, class Admissible, class Defect>
IntegrationResult integrate_dopri5(Rhs&& rhs, double t0, OdeState<N> y, double t_end,
                                   const StepControl& ctl, Observe&& observe, Admissible&& admissible,
                                   Defect&& defect) {
    using S = OdeState<N>;
    constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    constexpr double a21 = 1.0 / 5;
    constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                     a54 = -212.0 / 729;
    constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                     a65 = -5103.0 / 18656;
    constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                     b6 = 11.0 / 84;
    // b - b_hat (embedded 4th order)
    constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                     e6 = 22.0 / 525, e7 = -1.0 / 40;

    auto axpy = [](const S& base, double h, std::initializer_list<std::pair<double, const S*>> terms) {
        S out = base;
        for (const auto& [w, k] : terms)
            for (std::size_t i = 0; i < N; ++i) out[i] += h * w * (*k)[i];
        return out;
    };

    double t = t0;
    S k1 = rhs(t, y);
    if (!observe(t, y, k1)) return {IntegrationStatus::stopped_by_observer, t};

    const double span = t_end - t0;
    double h = ctl.h_init;
    if (h <= 0.0) {
        double ny = 0.0, nf = 0.0;
        for (std::size_t i = 0; i < N; ++i) {
            const double sc = ctl.atol + ctl.rtol * std::abs(y[i]);
            ny += (y[i] / sc) * (y[i] / sc);
            nf += (k1[i] / sc) * (k1[i] / sc);
        }
        h = (ny < 1e-10 || nf < 1e-10) ? 1e-6 : 0.01 * std::sqrt(ny / nf);
        h = std::min(h, 0.1 * span);
    }
    h = std::min({h, ctl.h_max, span});

    const double eps = std::numeric_limits<double>::epsilon();
    double err_prev = 1e-4;
    bool last_rejected = false;
    double d_rejected = std::numeric_limits<double>::infinity();
    long steps = 0;

    while (t < t_end) {
        if (++steps > ctl.max_steps) return {IntegrationStatus::step_limit, t};
        if (h < 16.0 * eps * std::max(1.0, std::abs(t))) return {IntegrationStatus::step_collapse, t};
        // No sliver steps near the end: the dense output divides by h^2.
        const double rest = t_end - t;
        const bool final_step = rest <= 1.01 * h;
        if (final_step) {
            h = rest;
        } else if (rest < 2.0 * h) {
            h = 0.5 * rest;
        }

        S y2 = axpy(y, h, {{a21, &k1}});
        bool ok = admissible(y2);
        S k2, k3, k4, k5, k6, k7, y3, y4, y5, y6, ynew;
        if (ok) {
            k2 = rhs(t + c2 * h, y2);
            y3 = axpy(y, h, {{a31, &k1}, {a32, &k2}});
            ok = admissible(y3);
        }
        if (ok) {
            k3 = rhs(t + c3 * h, y3);
            y4 = axpy(y, h, {{a41, &k1}, {a42, &k2}, {a43, &k3}});
            ok = admissible(y4);
        }
        if (ok) {
            k4 = rhs(t + c4 * h, y4);
            y5 = axpy(y, h, {{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}});
            ok = admissible(y5);
        }
        if (ok) {
            k5 = rhs(t + c5 * h, y5);
            y6 = axpy(y, h, {{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}});
            ok = admissible(y6);
        }
        if (ok) {
            k6 = rhs(t + h, y6);
            ynew = axpy(y, h, {{b1, &k1}, {b3, &k3}, {b4, &k4}, {b5, &k5}, {b6, &k6}});
            ok = admissible(ynew);
        }
        if (!ok) {
            h *= 0.25;
            last_rejected = true;
            continue;
        }
        k7 = rhs(t + h, ynew);

        double err = 0.0;
        for (std::size_t i = 0; i < N; ++i) {
            const double ei =
                h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
            const double sc = ctl.atol + ctl.rtol * std::max(std::abs(y[i]), std::abs(ynew[i]));
            err += (ei / sc) * (ei / sc);
        }
        err = std::sqrt(err / static_cast<double>(N));
        if (!std::isfinite(err)) {
            h *= 0.25;
            last_rejected = true;
            continue;
        }

        double d = err <= 1.0 ? defect(t, y, k1, t + h, ynew, k7) : 0.0;
        if (d > 1.0) {
            if (d < 0.8 * d_rejected) {
                d_rejected = d;
                h *= std::clamp(0.9 * std::pow(d, -0.25), 0.2, 0.9);
                last_rejected = true;
                continue;
            }
            // the defect is at the level of the data; a smaller step only makes it worse
            d = 0.0;
        }

        if (err <= 1.0) {
            // PI step-size controller (Hairer & Wanner, beta = 0.04)
            double fac = 0.9 * std::pow(err, -0.17) * std::pow(err_prev, 0.04);
            if (d > 0.0) fac = std::min(fac, std::max(1.0, 0.9 * std::pow(d, -0.25)));
            fac = std::clamp(fac, 0.2, last_rejected ? 1.0 : 5.0);
            err_prev = std::max(err, 1e-4);
            t = final_step ? t_end : t + h;
            y = ynew;
            k1 = k7;
            last_rejected = false;
            d_rejected = std::numeric_limits<double>::infinity();
            if (!observe(t, y, k1)) return {IntegrationStatus::stopped_by_observer, t};
            h = std::min(h * fac, ctl.h_max);
        } else {
            h *= std::max(0.2, 0.9 * std::pow(err, -0.2));
            last_rejected = true;
        }
    }
    return {IntegrationStatus::reached_end, t};
}

template <std::size_t N, class Rhs, class Observe, class Admissible>
IntegrationResult integrate_dopri5(Rhs&& rhs, double t0, OdeState<N> y, double t_end,
                                   const StepControl& ctl, Observe&& observe, Admissible&& admissible) {
    auto no_defect = [](double, const OdeState<N>&, const OdeState<N>&, double, const OdeState<N>&,
                        const OdeState<N>&) { return 0.0; };
    return integrate_dopri5<N>(rhs, t0, y, t_end, ctl, observe, admissible, no_defect);
}

} // namespace tdho
