#include "tdho/profile_config.hpp"

#include "tdho/error.hpp"

#include <cmath>
#include <fstream>
#include <optional>

namespace tdho {

namespace {

using nlohmann::json;

double number(const json& j, const char* key, const char* where) {
    if (!j.contains(key)) throw ConfigError(std::string(where) + ": missing numeric field '" + key + "'");
    const json& v = j.at(key);
    if (!v.is_number()) throw ConfigError(std::string(where) + ": field '" + key + "' must be a number");
    return v.get<double>();
}

double number_or(const json& j, const char* key, double fallback, const char* where) {
    return j.contains(key) ? number(j, key, where) : fallback;
}

std::vector<double> coefficients(const json& j, const char* where) {
    if (!j.contains("coeffs") || !j.at("coeffs").is_array() || j.at("coeffs").empty())
        throw ConfigError(std::string(where) + ": 'coeffs' must be a non-empty array");
    std::vector<double> out;
    for (const auto& c : j.at("coeffs")) {
        if (!c.is_number()) throw ConfigError(std::string(where) + ": 'coeffs' entries must be numbers");
        out.push_back(c.get<double>());
    }
    return out;
}

std::string kind_of(const json& j, const char* where) {
    if (!j.is_object()) throw ConfigError(std::string(where) + " must be an object");
    if (!j.contains("kind") || !j.at("kind").is_string())
        throw ConfigError(std::string(where) + ": missing string field 'kind'");
    return j.at("kind").get<std::string>();
}

Tabulation tabulation(const json& j, const std::filesystem::path& base, const char* where) {
    if (!j.contains("csv") || !j.at("csv").is_string())
        throw ConfigError(std::string(where) + ": tabulated kind needs a 'csv' path");
    std::filesystem::path p = j.at("csv").get<std::string>();
    if (p.is_relative()) p = base / p;
    return read_tabulation_csv(p);
}

CubicSpline spline_of(Tabulation tab, const char* where) {
    try {
        return CubicSpline(std::move(tab.time), std::move(tab.value));
    } catch (const UsageError& e) {
        throw ConfigError(std::string(where) + ": " + e.what());
    }
}

} // namespace

OscillatorProfile profile_from_json(const json& j, const std::filesystem::path& base) {
    if (!j.is_object()) throw ConfigError("profile must be an object");
    if (!j.contains("mass")) throw ConfigError("profile: missing 'mass'");

    std::optional<TimeDomain> domain;
    if (j.contains("domain")) {
        const json& d = j.at("domain");
        if (!d.is_array() || d.size() != 2 || !d[0].is_number() || !d[1].is_number())
            throw ConfigError("profile: 'domain' must be [begin, end]");
        domain = TimeDomain{d[0].get<double>(), d[1].get<double>()};
    }
    std::optional<TimeDomain> sampled;
    auto intersect = [&](const CubicSpline& s) {
        TimeDomain r{s.front(), s.back()};
        if (sampled) r = {std::max(r.begin, sampled->begin), std::min(r.end, sampled->end)};
        sampled = r;
    };

    const json& mj = j.at("mass");
    const std::string mk = kind_of(mj, "mass");
    MassLaw mass = mass_law::Constant{1.0};
    if (mk == "constant") {
        mass = mass_law::Constant{number(mj, "value", "mass")};
    } else if (mk == "caldirola-kanai") {
        mass = mass_law::Exponential{number(mj, "m0", "mass"), number(mj, "gamma", "mass")};
    } else if (mk == "solvable-mass-family") {
        mass = mass_law::SolvableFamily{number(mj, "m0", "mass"), number(mj, "mu", "mass"), number(mj, "nu", "mass"),
                                        number(mj, "alpha", "mass")};
    } else if (mk == "polynomial") {
        mass = mass_law::Polynomial{coefficients(mj, "mass")};
    } else if (mk == "sinusoidal-modulated") {
        mass = mass_law::Sinusoidal{number(mj, "m0", "mass"), number(mj, "amplitude", "mass"),
                                    number(mj, "rate", "mass"), number_or(mj, "phase", 0.0, "mass")};
    } else if (mk == "tabulated") {
        CubicSpline s = spline_of(tabulation(mj, base, "mass"), "mass");
        intersect(s);
        mass = mass_law::Tabulated{std::move(s)};
    } else {
        throw ConfigError("mass: unknown kind '" + mk + "'");
    }

    FrequencyLaw freq = freq_law::Constant{0.0};
    if (j.contains("frequency")) {
        const json& fj = j.at("frequency");
        const std::string fk = kind_of(fj, "frequency");
        if (fk == "constant") {
            if (fj.contains("omega_sq")) {
                freq = freq_law::Constant{number(fj, "omega_sq", "frequency")};
            } else {
                const double w = number(fj, "omega", "frequency");
                freq = freq_law::Constant{w * w};
            }
        } else if (fk == "polynomial") {
            freq = freq_law::Polynomial{coefficients(fj, "frequency")};
        } else if (fk == "sinusoidal-modulated") {
            freq = freq_law::Sinusoidal{number(fj, "omega_sq0", "frequency"), number(fj, "amplitude", "frequency"),
                                        number(fj, "rate", "frequency"), number_or(fj, "phase", 0.0, "frequency")};
        } else if (fk == "tabulated") {
            CubicSpline s = spline_of(tabulation(fj, base, "frequency"), "frequency");
            intersect(s);
            freq = freq_law::Tabulated{std::move(s)};
        } else if (fk == "solvable") {
            freq = freq_law::Solvable{number(fj, "omega0", "frequency")};
        } else {
            throw ConfigError("frequency: unknown kind '" + fk + "'");
        }
    }

    if (!domain && !sampled) throw ConfigError("profile: 'domain' is required for closed-form laws");
    TimeDomain d = domain ? *domain : *sampled;
    if (sampled && (d.begin < sampled->begin || d.end > sampled->end))
        throw ConfigError("profile: 'domain' extends beyond the tabulated samples");

    OscillatorProfile profile(std::move(mass), freq_law::Constant{0.0}, d);
    if (std::holds_alternative<freq_law::Solvable>(freq))
        return solvable_frequency(profile, std::get<freq_law::Solvable>(freq).omega0);
    return profile.with_frequency(std::move(freq));
}

OscillatorProfile load_profile(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open profile file '" + path.string() + "'");
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ConfigError("profile file '" + path.string() + "': " + e.what());
    }
    return profile_from_json(j, path.parent_path());
}

} // namespace tdho
