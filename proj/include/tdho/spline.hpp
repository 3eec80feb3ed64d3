#pragma once

#include <array>
#include <span>
#include <vector>

namespace tdho {

/// Cubic interpolating spline with not-a-knot end conditions.
///
/// Not-a-knot reproduces cubic data exactly, so second derivatives carry no
/// artificial boundary curvature (a natural spline would force y''=0 at
/// both ends). Queries outside [front, back] throw DomainError.
class CubicSpline {
public:
    CubicSpline() = default;
    CubicSpline(std::vector<double> x, std::vector<double> y);

    /// Value and first three derivatives at t.
    std::array<double, 4> eval(double t) const;

    double front() const { return x_.front(); }
    double back() const { return x_.back(); }
    std::span<const double> knots() const { return x_; }
    std::span<const double> values() const { return y_; }

private:
    std::vector<double> x_, y_;
    std::vector<double> m_; // second derivatives at the knots
};

} // namespace tdho
