#include "tdho/oracle.hpp"

#include "tdho/error.hpp"

#include <algorithm>
#include <cmath>

namespace tdho {

namespace {

using Vec = std::vector<double>;

// central differences, zero outside the grid
Vec derivative(const Vec& v, double dx) {
    const std::size_t n = v.size();
    Vec out(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double right = i + 1 < n ? v[i + 1] : 0.0;
        const double left = i > 0 ? v[i - 1] : 0.0;
        out[i] = (right - left) / (2.0 * dx);
    }
    return out;
}

Vec times(const Vec& f, const Vec& v) {
    Vec out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = f[i] * v[i];
    return out;
}

// (f D + D f) v / 2
Vec generator(const Vec& f, const Vec& v, double dx) {
    const Vec a = times(f, derivative(v, dx));
    const Vec b = derivative(times(f, v), dx);
    Vec out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = 0.5 * (a[i] + b[i]);
    return out;
}

double l2(const Vec& v, double dx) {
    double acc = 0.0;
    for (double x : v) acc += x * x;
    return std::sqrt(acc * dx);
}

} // namespace

CommutatorResiduals generator_commutator_check(const SmoothFunction& f1, const SmoothFunction& f2,
                                               const GridGeometry& geom) {
    const std::size_t n = geom.n;
    const double dx = geom.dx();
    Vec v1(n), d1(n), v2(n), d2(n), v3(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double x = geom.x(i);
        v1[i] = f1.value(x);
        d1[i] = f1.derivative(x);
        v2[i] = f2.value(x);
        d2[i] = f2.derivative(x);
        v3[i] = v1[i] * d2[i] - v2[i] * d1[i];
    }

    // Real Gaussian test vectors; the operators are real so complex vectors
    // add nothing.
    const double centres[] = {-1.0, 0.0, 1.5};
    CommutatorResiduals out{0.0, 0.0, dx};
    for (double c : centres) {
        Vec phi(n);
        for (std::size_t i = 0; i < n; ++i) {
            const double u = geom.x(i) - c;
            phi[i] = std::exp(-0.5 * u * u);
        }
        const double nrm = l2(phi, dx);
        for (double& p : phi) p /= nrm;
        if (std::max(std::abs(phi.front()), std::abs(phi.back())) > 1e-12)
            throw BoxOverflowError("generator test vector not supported inside the grid", 0.0);

        const Vec g1_f2 = generator(v1, times(v2, phi), dx);
        const Vec f2_g1 = times(v2, generator(v1, phi, dx));
        Vec r1(n);
        for (std::size_t i = 0; i < n; ++i) r1[i] = g1_f2[i] - f2_g1[i] - v1[i] * d2[i] * phi[i];

        const Vec g1g2 = generator(v1, generator(v2, phi, dx), dx);
        const Vec g2g1 = generator(v2, generator(v1, phi, dx), dx);
        const Vec g3 = generator(v3, phi, dx);
        Vec r2(n);
        for (std::size_t i = 0; i < n; ++i) r2[i] = g1g2[i] - g2g1[i] - g3[i];

        out.diff1 = std::max(out.diff1, l2(r1, dx));
        out.diff2 = std::max(out.diff2, l2(r2, dx));
    }
    return out;
}

} // namespace tdho
