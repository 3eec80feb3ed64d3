#include "tdho/spline.hpp"

#include "tdho/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace tdho {

namespace {

// Thomas sweep, no pivoting.
std::vector<double> solve_tridiagonal(std::vector<double> lower, std::vector<double> diag,
                                      std::vector<double> upper, std::vector<double> rhs) {
    const std::size_t n = diag.size();
    for (std::size_t i = 1; i < n; ++i) {
        const double w = lower[i] / diag[i - 1];
        diag[i] -= w * upper[i - 1];
        rhs[i] -= w * rhs[i - 1];
    }
    std::vector<double> out(n);
    out[n - 1] = rhs[n - 1] / diag[n - 1];
    for (std::size_t i = n - 1; i-- > 0;)
        out[i] = (rhs[i] - upper[i] * out[i + 1]) / diag[i];
    return out;
}

} // namespace

CubicSpline::CubicSpline(std::vector<double> x, std::vector<double> y)
    : x_(std::move(x)), y_(std::move(y)) {
    const std::size_t n = x_.size();
    if (n != y_.size())
        throw UsageError("spline: knot and value counts differ");
    if (n < 4)
        throw UsageError("spline: at least 4 samples are required");
    for (std::size_t i = 1; i < n; ++i)
        if (!(x_[i] > x_[i - 1]))
            throw UsageError("spline: sample times must be strictly increasing (index " +
                             std::to_string(i) + ")");

    std::vector<double> h(n - 1), s(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        h[i] = x_[i + 1] - x_[i];
        s[i] = (y_[i + 1] - y_[i]) / h[i];
    }

    // Unknowns m_1..m_{n-2}; m_0 and m_{n-1} eliminated through the
    // not-a-knot conditions (third derivative continuous at x_1 and x_{n-2}).
    const std::size_t k = n - 2;
    std::vector<double> lower(k, 0.0), diag(k, 0.0), upper(k, 0.0), rhs(k, 0.0);
    for (std::size_t j = 0; j < k; ++j) {
        const std::size_t i = j + 1;
        lower[j] = h[i - 1];
        diag[j] = 2.0 * (h[i - 1] + h[i]);
        upper[j] = h[i];
        rhs[j] = 6.0 * (s[i] - s[i - 1]);
    }
    // m_0 = ((h0+h1) m_1 - h0 m_2) / h1
    {
        const double h0 = h[0], h1 = h[1];
        diag[0] += h0 * (h0 + h1) / h1;
        if (k > 1) upper[0] -= h0 * h0 / h1;
    }
    // m_{n-1} = ((ha+hb) m_{n-2} - hb m_{n-3}) / ha with hb = h[n-2], ha = h[n-3]
    {
        const double hb = h[n - 2], ha = h[n - 3];
        diag[k - 1] += hb * (ha + hb) / ha;
        if (k > 1) lower[k - 1] -= hb * hb / ha;
    }
    std::vector<double> inner = solve_tridiagonal(lower, diag, upper, rhs);

    m_.assign(n, 0.0);
    std::copy(inner.begin(), inner.end(), m_.begin() + 1);
    m_[0] = ((h[0] + h[1]) * m_[1] - h[0] * m_[2]) / h[1];
    m_[n - 1] = ((h[n - 3] + h[n - 2]) * m_[n - 2] - h[n - 2] * m_[n - 3]) / h[n - 3];
}

std::array<double, 4> CubicSpline::eval(double t) const {
    if (!(t >= x_.front() && t <= x_.back()))
        throw DomainError("spline: t = " + std::to_string(t) + " outside [" +
                          std::to_string(x_.front()) + ", " + std::to_string(x_.back()) + "]");
    auto it = std::upper_bound(x_.begin(), x_.end(), t);
    std::size_t i = static_cast<std::size_t>(std::max<std::ptrdiff_t>(0, (it - x_.begin()) - 1));
    i = std::min(i, x_.size() - 2);

    const double h = x_[i + 1] - x_[i];
    const double a = (x_[i + 1] - t) / h;
    const double b = (t - x_[i]) / h;
    const double m0 = m_[i], m1 = m_[i + 1];
    const double y0 = y_[i], y1 = y_[i + 1];

    const double value = a * y0 + b * y1 + ((a * a * a - a) * m0 + (b * b * b - b) * m1) * h * h / 6.0;
    const double d1 = (y1 - y0) / h + (-(3.0 * a * a - 1.0) * m0 + (3.0 * b * b - 1.0) * m1) * h / 6.0;
    const double d2 = a * m0 + b * m1;
    const double d3 = (m1 - m0) / h;
    return {value, d1, d2, d3};
}

} // namespace tdho
