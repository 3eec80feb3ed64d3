#include "tdho/oracle.hpp"

#include "tdho/error.hpp"

#include <array>
#include <sstream>

#include <boost/numeric/odeint.hpp>

namespace tdho {

namespace {

using State = std::array<double, 4>; // a, b, c, d

} // namespace

std::vector<SymplecticMap> fundamental_matrices(const OscillatorProfile& profile, std::span<const double> times,
                                                const FundamentalOptions& opts) {
    namespace odeint = boost::numeric::odeint;
    auto system = [&profile](const State& y, State& dy, double t) {
        const ProfileSample s = profile.eval(t);
        const double k = s.mass * s.freq_sq;
        dy[0] = y[2] / s.mass;
        dy[1] = y[3] / s.mass;
        dy[2] = -k * y[0];
        dy[3] = -k * y[1];
    };

    auto stepper = odeint::make_controlled(opts.atol, opts.rtol, odeint::runge_kutta_fehlberg78<State>());
    State y{1.0, 0.0, 0.0, 1.0};
    double t = opts.t_start;
    std::vector<SymplecticMap> out;
    out.reserve(times.size());
    for (double target : times) {
        if (target < t) throw UsageError("fundamental_matrices needs ascending times not before t_start");
        if (!profile.domain().contains(target)) {
            std::ostringstream os;
            os << "fundamental matrix time " << target << " outside the profile domain";
            throw DomainError(os.str());
        }
        if (target > t) {
            try {
                odeint::integrate_adaptive(stepper, system, y, t, target, std::min(1e-3, target - t));
            } catch (const odeint::step_adjustment_error& e) {
                throw StiffnessError(std::string("fundamental matrix integration failed: ") + e.what(), t);
            }
            t = target;
        }
        out.push_back({y[0], y[1], y[2], y[3], target});
    }
    return out;
}

SymplecticMap fundamental_matrix(const OscillatorProfile& profile, double t, const FundamentalOptions& opts) {
    const double ts[1] = {t};
    return fundamental_matrices(profile, ts, opts).front();
}

} // namespace tdho
