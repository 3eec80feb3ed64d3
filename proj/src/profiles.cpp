#include "tdho/profiles.hpp"

#include "tdho/error.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace tdho {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

// value and first three derivatives of a polynomial
std::array<double, 4> poly_eval(const std::vector<double>& c, double t) {
    // Horner on p, p', p''/2, p'''/6
    double d0 = 0, d1 = 0, d2 = 0, d3 = 0;
    for (std::size_t i = c.size(); i-- > 0;) {
        d3 = d3 * t + d2;
        d2 = d2 * t + d1;
        d1 = d1 * t + d0;
        d0 = d0 * t + c[i];
    }
    return {d0, d1, 2.0 * d2, 6.0 * d3};
}

std::array<double, 4> mass_terms(const MassLaw& law, double t) {
    return std::visit(
        overloaded{
            [](const mass_law::Constant& c) -> std::array<double, 4> { return {c.mass, 0, 0, 0}; },
            [t](const mass_law::Exponential& e) -> std::array<double, 4> {
                const double m = e.m0 * std::exp(e.gamma * t);
                return {m, e.gamma * m, e.gamma * e.gamma * m, e.gamma * e.gamma * e.gamma * m};
            },
            [t](const mass_law::SolvableFamily& f) -> std::array<double, 4> {
                const double ep = f.mu * std::exp(f.alpha * t);
                const double em = f.nu * std::exp(-f.alpha * t);
                const double a = f.alpha;
                // s = ep + em, s' = a(ep - em), s'' = a^2 s, s''' = a^2 s'
                const double s = ep + em;
                const double s1 = a * (ep - em);
                const double s2 = a * a * s;
                const double s3 = a * a * s1;
                const double m = f.m0 * s * s;
                const double m1 = f.m0 * 2.0 * s * s1;
                const double m2 = f.m0 * 2.0 * (s1 * s1 + s * s2);
                const double m3 = f.m0 * 2.0 * (3.0 * s1 * s2 + s * s3);
                return {m, m1, m2, m3};
            },
            [t](const mass_law::Polynomial& p) { return poly_eval(p.coeffs, t); },
            [t](const mass_law::Sinusoidal& s) -> std::array<double, 4> {
                const double arg = s.rate * t + s.phase;
                const double sn = std::sin(arg), cs = std::cos(arg);
                const double k = s.m0 * s.amplitude;
                const double r = s.rate;
                return {s.m0 + k * sn, k * r * cs, -k * r * r * sn, -k * r * r * r * cs};
            },
            [t](const mass_law::Tabulated& tab) { return tab.spline.eval(t); },
        },
        law);
}

} // namespace

bool TimeDomain::contains(double t) const {
    const double slack = 64.0 * std::numeric_limits<double>::epsilon() *
                         std::max({1.0, std::abs(begin), std::abs(end)});
    return t >= begin - slack && t <= end + slack;
}

const char* kind_name(ProfileKind k) noexcept {
    switch (k) {
    case ProfileKind::constant: return "constant";
    case ProfileKind::caldirola_kanai: return "caldirola-kanai";
    case ProfileKind::solvable_mass_family: return "solvable-mass-family";
    case ProfileKind::polynomial: return "polynomial";
    case ProfileKind::sinusoidal_modulated: return "sinusoidal-modulated";
    case ProfileKind::tabulated: return "tabulated";
    }
    return "unknown";
}

OscillatorProfile::OscillatorProfile(MassLaw mass, FrequencyLaw freq, TimeDomain domain)
    : mass_(std::move(mass)), freq_(std::move(freq)), domain_(domain) {
    if (!(domain_.end > domain_.begin) || !std::isfinite(domain_.begin) || !std::isfinite(domain_.end))
        throw DomainError("profile domain must be a finite interval with end > begin, got [" +
                          fmt(domain_.begin) + ", " + fmt(domain_.end) + "]");

    if (auto* s = std::get_if<mass_law::Sinusoidal>(&mass_); s && !(std::abs(s->amplitude) < 1.0))
        throw PositivityError("sinusoidal mass needs |amplitude| < 1", domain_.begin);

    if (auto* f = std::get_if<mass_law::SolvableFamily>(&mass_)) {
        if (!(f->m0 > 0.0))
            throw PositivityError("solvable mass family needs m0 > 0, got " + fmt(f->m0), domain_.begin);
        // mu e^{at} + nu e^{-at} = 0  <=>  e^{2at} = -nu/mu
        double zero = std::numeric_limits<double>::quiet_NaN();
        if (f->mu == 0.0 && f->nu == 0.0) {
            zero = domain_.begin;
        } else if (f->alpha == 0.0 || f->mu == 0.0 || f->nu == 0.0) {
            if (f->alpha == 0.0 && f->mu + f->nu == 0.0) zero = domain_.begin;
        } else if (-f->nu / f->mu > 0.0) {
            zero = std::log(-f->nu / f->mu) / (2.0 * f->alpha);
        }
        if (!std::isnan(zero) && domain_.contains(zero))
            throw PositivityError("solvable mass family vanishes at t = " + fmt(zero), zero);
    }

    // Sampled densely: splines and polynomials can dip between knots.
    constexpr int samples = 4096;
    for (int i = 0; i <= samples; ++i) {
        const double t = domain_.begin + domain_.length() * i / samples;
        const double m = mass_terms(mass_, t)[0];
        if (!(m > 0.0))
            throw PositivityError("mass not positive at t = " + fmt(t) + " (m = " + fmt(m) + ")", t);
    }
}

void OscillatorProfile::check_time(double t) const {
    if (!domain_.contains(t))
        throw DomainError("t = " + fmt(t) + " outside profile domain [" + fmt(domain_.begin) + ", " +
                          fmt(domain_.end) + "]");
}

std::array<double, 4> OscillatorProfile::mass_derivatives(double t) const {
    check_time(t);
    t = std::clamp(t, domain_.begin, domain_.end);
    auto m = mass_terms(mass_, t);
    if (!(m[0] > 0.0))
        throw PositivityError("interpolated mass not positive at t = " + fmt(t), t);
    return m;
}

ProfileSample OscillatorProfile::eval(double t) const {
    const auto m = mass_derivatives(t);
    t = std::clamp(t, domain_.begin, domain_.end);
    ProfileSample out;
    out.mass = m[0];
    out.mass_rate = m[1];
    out.mass_accel = m[2];
    std::visit(overloaded{
                   [&](const freq_law::Constant& c) {
                       out.freq_sq = c.freq_sq;
                       out.freq_sq_rate = 0.0;
                   },
                   [&](const freq_law::Polynomial& p) {
                       auto v = poly_eval(p.coeffs, t);
                       out.freq_sq = v[0];
                       out.freq_sq_rate = v[1];
                   },
                   [&](const freq_law::Sinusoidal& s) {
                       const double arg = s.rate * t + s.phase;
                       out.freq_sq = s.freq_sq0 * (1.0 + s.amplitude * std::cos(arg));
                       out.freq_sq_rate = -s.freq_sq0 * s.amplitude * s.rate * std::sin(arg);
                   },
                   [&](const freq_law::Tabulated& tab) {
                       auto v = tab.spline.eval(t);
                       out.freq_sq = v[0];
                       out.freq_sq_rate = v[1];
                   },
                   [&](const freq_law::Solvable& s) {
                       const double r1 = m[1] / m[0];
                       const double r2 = m[2] / m[0];
                       const double r3 = m[3] / m[0];
                       out.freq_sq = s.omega0 * s.omega0 + 0.5 * r2 - 0.25 * r1 * r1;
                       out.freq_sq_rate = 0.5 * r3 - r1 * r2 + 0.5 * r1 * r1 * r1;
                   },
               },
               freq_);
    return out;
}

ProfileKind OscillatorProfile::kind() const {
    if (std::holds_alternative<mass_law::Tabulated>(mass_) ||
        std::holds_alternative<freq_law::Tabulated>(freq_))
        return ProfileKind::tabulated;
    return std::visit(
        overloaded{
            [this](const mass_law::Constant&) {
                if (std::holds_alternative<freq_law::Polynomial>(freq_)) return ProfileKind::polynomial;
                if (std::holds_alternative<freq_law::Sinusoidal>(freq_))
                    return ProfileKind::sinusoidal_modulated;
                return ProfileKind::constant;
            },
            [](const mass_law::Exponential&) { return ProfileKind::caldirola_kanai; },
            [](const mass_law::SolvableFamily&) { return ProfileKind::solvable_mass_family; },
            [](const mass_law::Polynomial&) { return ProfileKind::polynomial; },
            [](const mass_law::Sinusoidal&) { return ProfileKind::sinusoidal_modulated; },
            [](const mass_law::Tabulated&) { return ProfileKind::tabulated; },
        },
        mass_);
}

OscillatorProfile OscillatorProfile::with_frequency(FrequencyLaw freq) const {
    return OscillatorProfile(mass_, std::move(freq), domain_);
}

OscillatorProfile OscillatorProfile::with_domain(TimeDomain domain) const {
    return OscillatorProfile(mass_, freq_, domain);
}

OscillatorProfile constant_profile(double mass, double omega, TimeDomain domain) {
    if (!(mass > 0.0)) throw PositivityError("mass must be positive, got " + fmt(mass), domain.begin);
    return OscillatorProfile(mass_law::Constant{mass}, freq_law::Constant{omega * omega}, domain);
}

OscillatorProfile inverted_profile(double mass, double freq_sq, TimeDomain domain) {
    if (!(mass > 0.0)) throw PositivityError("mass must be positive, got " + fmt(mass), domain.begin);
    return OscillatorProfile(mass_law::Constant{mass}, freq_law::Constant{freq_sq}, domain);
}

OscillatorProfile caldirola_kanai(double m0, double gamma, TimeDomain domain) {
    if (!(m0 > 0.0)) throw PositivityError("Caldirola-Kanai needs m0 > 0, got " + fmt(m0), domain.begin);
    return OscillatorProfile(mass_law::Exponential{m0, gamma}, freq_law::Constant{0.0}, domain);
}

OscillatorProfile solvable_mass_family(double m0, double mu, double nu, double alpha, TimeDomain domain) {
    return OscillatorProfile(mass_law::SolvableFamily{m0, mu, nu, alpha}, freq_law::Constant{0.0}, domain);
}

OscillatorProfile solvable_frequency(const OscillatorProfile& mass_profile, double omega0) {
    const TimeDomain& d = mass_profile.domain();
    constexpr int samples = 4000;
    double bad_begin = std::numeric_limits<double>::quiet_NaN(), bad_end = bad_begin;
    for (int i = 0; i <= samples; ++i) {
        const double t = d.begin + d.length() * i / samples;
        const auto m = mass_profile.mass_derivatives(t);
        const double r1 = m[1] / m[0];
        const double radicand = omega0 * omega0 + 0.5 * m[2] / m[0] - 0.25 * r1 * r1;
        if (radicand < 0.0) {
            if (std::isnan(bad_begin)) bad_begin = t;
            bad_end = t;
        } else if (!std::isnan(bad_begin)) {
            break;
        }
    }
    if (!std::isnan(bad_begin))
        throw ImaginaryFrequencyError("solvable frequency is imaginary on [" + fmt(bad_begin) + ", " +
                                          fmt(bad_end) + "] for Omega0 = " + fmt(omega0),
                                      bad_begin, bad_end);
    return mass_profile.with_frequency(freq_law::Solvable{omega0});
}

OscillatorProfile tabulated_profile(std::vector<double> mass_t, std::vector<double> mass_v,
                                    std::vector<double> freq_t, std::vector<double> freq_v) {
    for (std::size_t i = 0; i < mass_v.size(); ++i)
        if (!(mass_v[i] > 0.0))
            throw PositivityError("tabulated mass not positive at t = " + fmt(mass_t.at(i)), mass_t.at(i));
    CubicSpline ms(std::move(mass_t), std::move(mass_v));
    CubicSpline fs(std::move(freq_t), std::move(freq_v));
    TimeDomain d{std::max(ms.front(), fs.front()), std::min(ms.back(), fs.back())};
    return OscillatorProfile(mass_law::Tabulated{std::move(ms)}, freq_law::Tabulated{std::move(fs)}, d);
}

Tabulation read_tabulation_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open tabulation CSV '" + path.string() + "'");
    Tabulation tab;
    std::string line;
    if (!std::getline(in, line)) throw ConfigError("tabulation CSV '" + path.string() + "' is empty");
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos)
            throw ConfigError(path.string() + ":" + std::to_string(lineno) + ": expected 'time,value'");
        try {
            std::size_t used = 0;
            const std::string a = line.substr(0, comma), b = line.substr(comma + 1);
            const double t = std::stod(a, &used);
            const double v = std::stod(b, &used);
            tab.time.push_back(t);
            tab.value.push_back(v);
        } catch (const std::exception&) {
            throw ConfigError(path.string() + ":" + std::to_string(lineno) + ": not a number");
        }
    }
    if (tab.time.size() < 4)
        throw ConfigError("tabulation CSV '" + path.string() + "' needs at least 4 rows");
    return tab;
}

void write_tabulation_csv(const std::filesystem::path& path, const Tabulation& tab,
                          const std::string& value_name) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorCategory::io, "cannot write '" + path.string() + "'");
    out << "time," << value_name << "\n";
    out.precision(17);
    for (std::size_t i = 0; i < tab.time.size(); ++i) out << tab.time[i] << "," << tab.value[i] << "\n";
}

std::pair<Tabulation, Tabulation> sample_profile(const OscillatorProfile& p, double step) {
    const TimeDomain& d = p.domain();
    const auto n = static_cast<std::size_t>(std::llround(d.length() / step));
    Tabulation mass, freq;
    for (std::size_t i = 0; i <= n; ++i) {
        const double t = (i == n) ? d.end : d.begin + static_cast<double>(i) * step;
        const auto s = p.eval(t);
        mass.time.push_back(t);
        mass.value.push_back(s.mass);
        freq.time.push_back(t);
        freq.value.push_back(s.freq_sq);
    }
    return {std::move(mass), std::move(freq)};
}

} // namespace tdho
