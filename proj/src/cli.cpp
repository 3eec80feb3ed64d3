#include "tdho/cli.hpp"

#include "tdho/auxode.hpp"
#include "tdho/canon.hpp"
#include "tdho/error.hpp"
#include "tdho/oracle.hpp"
#include "tdho/profile_config.hpp"
#include "tdho/propagator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <future>
#include <locale>
#include <random>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

namespace tdho {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

enum class Format { csv, json };

struct Run {
    std::string subcommand;
    json config;
    fs::path base_dir;
    std::map<std::string, double> tol;
    std::uint64_t seed = 1;
    Format format = Format::csv;
    fs::path out_path; // empty: the caller's stream
};

std::string fmt(double v) {
    std::ostringstream os;
    os.imbue(std::locale::classic());
    os.precision(17);
    os << v;
    return os.str();
}

// ---------------------------------------------------------------------------
// config access

const json& section(const json& cfg, const char* name) {
    static const json empty = json::object();
    if (!cfg.contains(name)) return empty;
    const json& s = cfg.at(name);
    if (!s.is_object()) throw ConfigError(std::string("config: '") + name + "' must be an object");
    return s;
}

double num(const json& s, const char* where, const char* key, double fallback) {
    if (!s.contains(key)) return fallback;
    const json& v = s.at(key);
    if (!v.is_number()) throw ConfigError(std::string("config: ") + where + "." + key + " must be a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) throw ConfigError(std::string("config: ") + where + "." + key + " must be finite");
    return x;
}

std::size_t count(const json& s, const char* where, const char* key, std::size_t fallback, std::size_t min) {
    if (!s.contains(key)) return fallback;
    const json& v = s.at(key);
    if (!v.is_number_integer() || v.get<long long>() < static_cast<long long>(min))
        throw ConfigError(std::string("config: ") + where + "." + key + " must be an integer >= " +
                          std::to_string(min));
    return v.get<std::size_t>();
}

bool flag(const json& s, const char* where, const char* key, bool fallback) {
    if (!s.contains(key)) return fallback;
    if (!s.at(key).is_boolean()) throw ConfigError(std::string("config: ") + where + "." + key + " must be a boolean");
    return s.at(key).get<bool>();
}

OscillatorProfile run_profile(const Run& r) {
    if (!r.config.contains("profile")) throw ConfigError("config: missing 'profile'");
    const json& p = r.config.at("profile");
    if (p.is_string()) {
        fs::path path = p.get<std::string>();
        if (path.is_relative()) path = r.base_dir / path;
        if (!fs::exists(path)) throw ConfigError("config: profile file '" + path.string() + "' does not exist");
        return load_profile(path);
    }
    return profile_from_json(p, r.base_dir);
}

struct AuxSpec {
    double coupling = 1.0;
    double chi0 = 1.0;
    double chidot0 = 0.0;
};

AuxSpec aux_spec(const Run& r) {
    const json& s = section(r.config, "auxiliary");
    AuxSpec a;
    a.coupling = num(s, "auxiliary", "k_squared", 1.0);
    a.chi0 = num(s, "auxiliary", "chi0", 1.0);
    a.chidot0 = num(s, "auxiliary", "chidot0", 0.0);
    if (!(a.chi0 > 0.0)) throw ConfigError("config: auxiliary.chi0 must be > 0");
    return a;
}

std::vector<double> time_grid(const Run& r, const OscillatorProfile& profile) {
    const json& s = section(r.config, "time");
    const TimeDomain& d = profile.domain();
    const double t0 = num(s, "time", "t_start", d.begin);
    const double t1 = num(s, "time", "t_max", d.end);
    const std::size_t n = count(s, "time", "samples", 101, 2);
    if (!d.contains(t0) || !d.contains(t1))
        throw DomainError("time grid [" + fmt(t0) + ", " + fmt(t1) + "] leaves the profile domain [" +
                          fmt(d.begin) + ", " + fmt(d.end) + "]");
    if (!(t1 > t0)) throw ConfigError("config: time.t_max must exceed time.t_start");
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = t0 + (t1 - t0) * static_cast<double>(i) / static_cast<double>(n - 1);
    out.back() = t1;
    return out;
}

AuxOptions aux_options(const Run& r, double t_start) {
    AuxOptions o;
    o.step.rtol = r.tol.at("rtol");
    o.step.atol = r.tol.at("atol");
    o.step.h_max = r.tol.at("h_max");
    o.chi_min = r.tol.at("chi_min");
    o.residual_tol = r.tol.at("dense_residual");
    o.t_start = t_start;
    return o;
}

GaussianState state_spec(const Run& r) {
    const json& s = section(r.config, "state");
    const double q = num(s, "state", "mean_x", 0.0);
    const double p = num(s, "state", "mean_p", 0.0);
    const double sxx = num(s, "state", "cov_xx", 0.5);
    const double sxp = num(s, "state", "cov_xp", 0.0);
    if (!(sxx > 0.0)) throw ConfigError("config: state.cov_xx must be > 0");
    GaussianState g = GaussianState::pure(q, p, sxx, sxp);
    if (s.contains("cov_pp")) {
        g.cov_pp = num(s, "state", "cov_pp", 0.0);
        if (g.cov_det() < 0.25 * (1.0 - 1e-12))
            throw ConfigError("config: state covariance violates the uncertainty bound det >= 1/4");
    }
    return g;
}

// ---------------------------------------------------------------------------
// output

json meta(const Run& r) {
    json m;
    m["subcommand"] = r.subcommand;
    m["seed"] = r.seed;
    m["tolerances"] = json::object();
    for (const auto& [k, v] : r.tol) m["tolerances"][k] = v;
    return m;
}

void csv_meta(std::ostream& os, const Run& r) {
    os << "# tdho " << r.subcommand << "\n# seed=" << r.seed << "\n";
    for (const auto& [k, v] : r.tol) os << "# tolerance." << k << "=" << fmt(v) << "\n";
}

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
};

std::string render_table(const Run& r, const Table& t) {
    std::ostringstream os;
    if (r.format == Format::csv) {
        csv_meta(os, r);
        for (std::size_t i = 0; i < t.columns.size(); ++i) os << (i ? "," : "") << t.columns[i];
        os << "\n";
        for (const auto& row : t.rows) {
            for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << fmt(row[i]);
            os << "\n";
        }
        return os.str();
    }
    json j;
    j["meta"] = meta(r);
    j["columns"] = t.columns;
    j["rows"] = t.rows;
    return j.dump(2) + "\n";
}

void emit(const Run& r, const std::string& text, std::ostream& out) {
    if (r.out_path.empty()) {
        out << text;
        return;
    }
    std::ofstream f(r.out_path, std::ios::binary);
    if (!f) throw Error(ErrorCategory::io, "cannot open output file '" + r.out_path.string() + "'");
    f << text;
    if (!f) throw Error(ErrorCategory::io, "failed writing '" + r.out_path.string() + "'");
}

// ---------------------------------------------------------------------------
// subcommands

int cmd_solve_aux(const Run& r, std::ostream& out) {
    const OscillatorProfile profile = run_profile(r);
    const AuxSpec a = aux_spec(r);
    const auto times = time_grid(r, profile);
    const AuxiliarySolution sol =
        solve_auxiliary(profile, a.coupling, a.chi0, a.chidot0, times.back(), aux_options(r, times.front()));
    Table t{{"t", "chi", "chi_dot"}, {}};
    for (double tt : times) {
        const AuxPoint p = sol.at(tt);
        t.rows.push_back({tt, p.chi, p.chi_dot});
    }
    emit(r, render_table(r, t), out);
    return 0;
}

int cmd_heisenberg(const Run& r, std::ostream& out) {
    const OscillatorProfile profile = run_profile(r);
    const AuxSpec a = aux_spec(r);
    const auto times = time_grid(r, profile);
    Propagator prop(profile, solve_auxiliary(profile, a.coupling, a.chi0, a.chidot0, times.back(),
                                             aux_options(r, times.front())));
    Table t{{"t", "a", "b", "c", "d"}, {}};
    for (double tt : times) {
        const SymplecticMap m = prop.heisenberg_map(tt);
        t.rows.push_back({tt, m.a, m.b, m.c, m.d});
    }
    emit(r, render_table(r, t), out);
    return 0;
}

int cmd_evolve(const Run& r, std::ostream& out) {
    const OscillatorProfile profile = run_profile(r);
    const AuxSpec a = aux_spec(r);
    const GaussianState state = state_spec(r);
    const auto times = time_grid(r, profile);
    Propagator prop(profile, solve_auxiliary(profile, a.coupling, a.chi0, a.chidot0, times.back(),
                                             aux_options(r, times.front())));
    Table t{{"t", "a", "b", "c", "d", "mean_x", "mean_p", "cov_xx", "cov_xp", "cov_pp"}, {}};
    for (double tt : times) {
        const PropagatorFactorization f = prop.factorize(tt);
        const SymplecticMap m = prop.heisenberg_map(tt);
        const GaussianState g = evolve_gaussian(f, state);
        t.rows.push_back({tt, m.a, m.b, m.c, m.d, g.mean_x, g.mean_p, g.cov_xx, g.cov_xp, g.cov_pp});
    }
    emit(r, render_table(r, t), out);
    return 0;
}

int cmd_classify(const Run& r, std::ostream& out) {
    const OscillatorProfile profile = run_profile(r);
    const std::size_t samples = count(section(r.config, "classify"), "classify", "samples", 2001, 3);
    const ClassificationReport rep = classify(profile, samples, r.tol.at("classify"));
    if (r.format == Format::csv) {
        std::ostringstream os;
        csv_meta(os, r);
        os << "in_class,omega0_best,max_residual\n"
           << (rep.in_class ? "true" : "false") << "," << fmt(rep.omega0_best) << "," << fmt(rep.max_residual)
           << "\n";
        emit(r, os.str(), out);
    } else {
        json j;
        j["meta"] = meta(r);
        j["meta"]["samples"] = rep.samples;
        j["in_class"] = rep.in_class;
        j["omega0_best"] = rep.omega0_best;
        j["max_residual"] = rep.max_residual;
        emit(r, j.dump(2) + "\n", out);
    }
    return 0;
}

int cmd_metric(const Run& r, std::ostream& out) {
    const json& s = section(r.config, "metric");
    if (!s.contains("family") || !s.at("family").is_string()) throw ConfigError("config: metric.family is required");
    const std::string fam = s.at("family").get<std::string>();
    DiffeoKind kind;
    if (fam == "linear") {
        kind = DiffeoKind::linear();
    } else if (fam == "quadratic") {
        kind = DiffeoKind::quadratic();
    } else if (fam == "exponential") {
        if (!s.contains("lambda")) throw ConfigError("config: metric.lambda is required for the exponential family");
        kind = DiffeoKind::exponential(num(s, "metric", "lambda", 1.0));
    } else {
        throw ConfigError("config: unknown metric.family '" + fam + "'");
    }
    const double eps = num(s, "metric", "epsilon", 0.0);
    const double x0 = num(s, "metric", "x_min", -1.0);
    const double x1 = num(s, "metric", "x_max", 1.0);
    const std::size_t n = count(s, "metric", "samples", 101, 2);
    if (!(x1 > x0)) throw ConfigError("config: metric.x_max must exceed metric.x_min");

    Table t{{"x", "x_prime", "F2", "g"}, {}};
    for (std::size_t i = 0; i < n; ++i) {
        const double x = i + 1 == n ? x1 : x0 + (x1 - x0) * static_cast<double>(i) / static_cast<double>(n - 1);
        const DiffeoImage img = diffeo_map(kind, eps, x);
        t.rows.push_back({x, img.x_prime, img.f2_factor, induced_metric(kind, eps, x)});
    }
    emit(r, render_table(r, t), out);
    return 0;
}

// ---------------------------------------------------------------------------
// verify

struct CheckResult {
    std::string name;
    double max_error = 0.0;
    double threshold = 0.0;
    std::string note;
    bool pass() const { return max_error <= threshold; }
};

AuxiliarySolution solve_positive(const OscillatorProfile& profile, double coupling, double chi0, double chidot0,
                                 double t_max, const AuxOptions& opts) {
    try {
        return solve_auxiliary(profile, coupling, chi0, chidot0, t_max, opts);
    } catch (const PositivityHorizonError& e) {
        return e.partial();
    }
}

std::vector<double> clip(const std::vector<double>& times, double t_end) {
    std::vector<double> out;
    for (double t : times)
        if (t <= t_end) out.push_back(t);
    return out;
}

std::string range_note(double t_end, double t_max) {
    return t_end < t_max ? "positive range ends at t = " + fmt(t_end) : std::string();
}

struct Draw {
    double coupling, chi0, chidot0;
};

struct VerifyContext {
    OscillatorProfile profile;
    AuxSpec aux;
    std::vector<double> times;
    AuxOptions opts;
    std::map<std::string, double> tol;
};

std::vector<CheckResult> check_det(const VerifyContext& c, const std::vector<Draw>& draws) {
    double worst = 0.0;
    for (const Draw& d : draws) {
        Propagator prop(c.profile, solve_positive(c.profile, d.coupling, d.chi0, d.chidot0, c.times.back(), c.opts));
        for (double t : clip(c.times, prop.solution().t_end()))
            worst = std::max(worst, std::abs(prop.heisenberg_map(t).det() - 1.0));
    }
    return {{"det", worst, c.tol.at("det"), std::to_string(draws.size()) + " random auxiliary seeds"}};
}

std::vector<CheckResult> check_maps(const VerifyContext& c) {
    Propagator prop(c.profile, solve_positive(c.profile, c.aux.coupling, c.aux.chi0, c.aux.chidot0, c.times.back(),
                                              c.opts));
    const auto ts = clip(c.times, prop.solution().t_end());
    const std::string note = range_note(prop.solution().t_end(), c.times.back());

    FundamentalOptions fo;
    fo.rtol = c.tol.at("oracle_rtol");
    fo.atol = c.tol.at("oracle_atol");
    fo.t_start = c.opts.t_start;
    const auto ref = fundamental_matrices(c.profile, ts, fo);

    double oracle = 0.0, fact = 0.0, res = 0.0;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        const SymplecticMap m = prop.heisenberg_map(ts[i]);
        oracle = std::max(oracle, m.distance(ref[i]));
        fact = std::max(fact, m.distance(prop.factorize(ts[i]).induced_map()));
    }
    // residual on a finer grid so points between samples are exercised
    const double t0 = prop.solution().t_start(), t1 = prop.solution().t_end();
    const std::size_t nres = 10 * c.times.size();
    for (std::size_t i = 0; i <= nres; ++i) {
        const double t = t0 + (t1 - t0) * static_cast<double>(i) / static_cast<double>(nres);
        res = std::max(res, std::abs(residual(c.profile, prop.solution(), std::min(t, t1))));
    }
    return {{"oracle_map", oracle, c.tol.at("oracle_map"), note},
            {"factorization", fact, c.tol.at("factorization"), note},
            {"residual", res, c.tol.at("residual"), note}};
}

std::vector<CheckResult> check_gauge(const VerifyContext& c) {
    const double tmax = c.times.back();
    Propagator p1(c.profile, solve_positive(c.profile, 1.0, 1.0, 0.0, tmax, c.opts));
    Propagator p0(c.profile, solve_positive(c.profile, 0.0, 1.0, 0.5, tmax, c.opts));
    Propagator pm(c.profile, solve_positive(c.profile, -1.0, 1.0, 0.5, tmax, c.opts));
    const double t_end =
        std::min({p1.solution().t_end(), p0.solution().t_end(), pm.solution().t_end()});
    double worst = 0.0;
    for (double t : clip(c.times, t_end)) {
        const SymplecticMap m1 = p1.heisenberg_map(t);
        worst = std::max({worst, m1.distance(p0.heisenberg_map(t)), m1.distance(pm.heisenberg_map(t))});
    }
    return {{"gauge", worst, c.tol.at("gauge"), range_note(t_end, tmax)}};
}

std::vector<CheckResult> check_wronskian(const VerifyContext& c) {
    const double tmax = c.times.back();
    const AuxiliarySolution s1 = solve_positive(c.profile, 0.0, 1.0, 0.0, tmax, c.opts);
    const AuxiliarySolution s2 = solve_positive(c.profile, 0.0, 1.0, 1.0, tmax, c.opts);
    const double t_end = std::min(s1.t_end(), s2.t_end());
    const double w0 = wronskian(c.profile, s1, s2, c.opts.t_start);
    double worst = 0.0;
    for (double t : clip(c.times, t_end)) worst = std::max(worst, std::abs(wronskian(c.profile, s1, s2, t) - w0));
    return {{"wronskian", worst, c.tol.at("wronskian"), range_note(t_end, tmax)}};
}

std::vector<CheckResult> check_grid(const VerifyContext& c, const GaussianState& state, const GridGeometry& geom,
                                    double t, std::size_t steps_per_unit) {
    Propagator prop(c.profile, solve_positive(c.profile, c.aux.coupling, c.aux.chi0, c.aux.chidot0, t, c.opts));
    if (prop.solution().t_end() < t) {
        const std::string note = "skipped: positive range ends at t = " + fmt(prop.solution().t_end());
        return {{"grid_fidelity", 0.0, c.tol.at("fidelity"), note}, {"grid_moments", 0.0, c.tol.at("moments"), note}};
    }
    const GaussianState exact = evolve_gaussian(prop.factorize(t), state);
    const GridState analytic = GridState::from_gaussian(exact, geom);
    const GridState psi0 = GridState::from_gaussian(state, geom);
    SplitStepOptions so;
    so.t_start = c.opts.t_start;
    const std::size_t steps =
        std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil((t - so.t_start) * steps_per_unit)));
    const GridState numeric = grid_propagate(c.profile, psi0, t, steps, so);
    const GridMoments m = numeric.moments();
    const double dm = std::max({std::abs(m.mean_x - exact.mean_x), std::abs(m.mean_p - exact.mean_p),
                                std::abs(m.cov_xx - exact.cov_xx), std::abs(m.cov_xp - exact.cov_xp),
                                std::abs(m.cov_pp - exact.cov_pp)});
    const std::string note = "t = " + fmt(t) + ", " + std::to_string(steps) + " steps";
    return {{"grid_fidelity", 1.0 - fidelity(analytic, numeric), c.tol.at("fidelity"), note},
            {"grid_moments", dm, c.tol.at("moments"), note}};
}

int cmd_verify(const Run& r, std::ostream& out) {
    const json& s = section(r.config, "verify");
    VerifyContext ctx{run_profile(r), aux_spec(r), {}, {}, r.tol};
    ctx.times = time_grid(r, ctx.profile);
    ctx.opts = aux_options(r, ctx.times.front());

    // Randomized draws are generated up front so results do not depend on
    // scheduling.
    const std::size_t ndraws = count(s, "verify", "draws", 8, 0);
    std::mt19937_64 rng(r.seed);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    std::vector<Draw> draws;
    for (std::size_t i = 0; i < ndraws; ++i) {
        const double k2 = static_cast<double>(static_cast<int>(i % 3) - 1);
        const double chi0 = 0.5 + 1.5 * u01(rng);
        const double chidot0 = -0.5 + u01(rng);
        draws.push_back({k2, chi0, chidot0});
    }

    std::vector<std::function<std::vector<CheckResult>()>> tasks;
    tasks.emplace_back([&] { return check_det(ctx, draws); });
    tasks.emplace_back([&] { return check_maps(ctx); });
    tasks.emplace_back([&] { return check_gauge(ctx); });
    tasks.emplace_back([&] { return check_wronskian(ctx); });
    if (flag(s, "verify", "grid", true)) {
        const GaussianState state = state_spec(r);
        GridGeometry geom;
        const double half = num(s, "verify", "grid_box", 20.0);
        if (!(half > 0.0)) throw ConfigError("config: verify.grid_box must be > 0");
        geom.x_min = -half;
        geom.x_max = half;
        geom.n = count(s, "verify", "grid_n", 2048, 4);
        const double tg = num(s, "verify", "grid_time", ctx.times.back());
        if (!ctx.profile.domain().contains(tg) || tg <= ctx.opts.t_start)
            throw DomainError("verify.grid_time " + fmt(tg) + " is outside the run interval");
        const std::size_t spu = count(s, "verify", "grid_steps_per_unit", 4000, 1);
        tasks.emplace_back([&, state, geom, tg, spu] { return check_grid(ctx, state, geom, tg, spu); });
    }

    std::vector<std::future<std::vector<CheckResult>>> futures;
    for (auto& t : tasks) futures.push_back(std::async(std::launch::async, t));
    std::vector<CheckResult> results;
    for (auto& f : futures)
        for (auto& c : f.get()) results.push_back(std::move(c));

    const bool ok = std::all_of(results.begin(), results.end(), [](const CheckResult& c) { return c.pass(); });
    if (r.format == Format::csv) {
        std::ostringstream os;
        csv_meta(os, r);
        os << "check,max_error,threshold,pass,note\n";
        for (const auto& c : results)
            os << c.name << "," << fmt(c.max_error) << "," << fmt(c.threshold) << "," << (c.pass() ? "true" : "false")
               << "," << c.note << "\n";
        emit(r, os.str(), out);
    } else {
        json j;
        j["meta"] = meta(r);
        j["checks"] = json::array();
        for (const auto& c : results) {
            json e;
            e["name"] = c.name;
            e["max_error"] = c.max_error;
            e["threshold"] = c.threshold;
            e["pass"] = c.pass();
            if (!c.note.empty()) e["note"] = c.note;
            j["checks"].push_back(e);
        }
        j["pass"] = ok;
        emit(r, j.dump(2) + "\n", out);
    }
    return ok ? 0 : 4;
}

// ---------------------------------------------------------------------------

int status_for(ErrorCategory c) {
    switch (c) {
    case ErrorCategory::config:
    case ErrorCategory::usage:
        return 2;
    case ErrorCategory::domain:
    case ErrorCategory::positivity:
    case ErrorCategory::positivity_horizon:
    case ErrorCategory::imaginary_frequency:
        return 3;
    case ErrorCategory::tolerance:
        return 4;
    default:
        return 1;
    }
}

void apply_tolerance(std::map<std::string, double>& tol, const std::string& name, double value) {
    auto it = tol.find(name);
    if (it == tol.end()) throw ConfigError("unknown tolerance '" + name + "'");
    if (!(value > 0.0) || !std::isfinite(value))
        throw ConfigError("tolerance '" + name + "' must be a positive finite number");
    it->second = value;
}

double parse_double(const std::string& s, const std::string& what) {
    std::size_t pos = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &pos);
    } catch (const std::logic_error&) {
        pos = 0;
    }
    if (pos == 0 || pos != s.size()) throw ConfigError("cannot parse " + what + " '" + s + "'");
    return v;
}

} // namespace

std::map<std::string, double> default_tolerances() {
    return {
        // auxiliary integrator
        {"rtol", 1e-10},
        {"atol", 1e-12},
        {"h_max", 1e-2},
        {"chi_min", 1e-12},
        {"dense_residual", 1e-10},
        // fundamental-matrix oracle
        {"oracle_rtol", 1e-12},
        {"oracle_atol", 1e-14},
        // classify
        {"classify", 1e-9},
        // verify thresholds
        {"det", 1e-8},
        {"oracle_map", 1e-6},
        {"factorization", 1e-9},
        {"residual", 1e-8},
        {"gauge", 1e-6},
        {"wronskian", 1e-8},
        {"fidelity", 1e-6},
        {"moments", 1e-6},
    };
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Time-dependent harmonic oscillator engine", "tdho"};
    std::string config_path, out_path, format;
    std::vector<std::string> tol_args;
    std::uint64_t seed = 1;
    app.add_option("--config", config_path, "Run configuration (JSON)")->required();
    app.add_option("--out", out_path, "Output file (default: stdout)");
    app.add_option("--format", format, "Output format")->check(CLI::IsMember({"csv", "json"}));
    app.add_option("--tolerance", tol_args, "Override a named tolerance, NAME=VALUE (repeatable)")
        ->allow_extra_args(false);
    auto* seed_opt = app.add_option("--seed", seed, "Seed for randomized verify draws");
    const std::pair<const char*, const char*> commands[] = {
        {"solve-aux", "Solve the auxiliary equation; writes t, chi, chi_dot"},
        {"heisenberg", "Heisenberg map; writes t, a, b, c, d"},
        {"evolve", "Gaussian state trajectory"},
        {"classify", "Exactly-solvable class scan"},
        {"metric", "Diffeomorphism and induced metric table"},
        {"verify", "Oracle suite report"},
    };
    for (const auto& [name, desc] : commands) app.add_subcommand(name, desc)->fallthrough();
    app.require_subcommand(1);

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 2;
    }

    try {
        Run r;
        r.subcommand = app.get_subcommands().front()->get_name();

        std::ifstream in(config_path);
        if (!in) throw ConfigError("cannot open config file '" + config_path + "'");
        try {
            in >> r.config;
        } catch (const json::exception& e) {
            throw ConfigError("config file '" + config_path + "': " + e.what());
        }
        if (!r.config.is_object()) throw ConfigError("config: top level must be an object");
        r.base_dir = fs::path(config_path).parent_path();

        r.tol = default_tolerances();
        const json& tj = section(r.config, "tolerances");
        for (auto it = tj.begin(); it != tj.end(); ++it) {
            if (!it.value().is_number()) throw ConfigError("config: tolerance '" + it.key() + "' must be a number");
            apply_tolerance(r.tol, it.key(), it.value().get<double>());
        }
        for (const std::string& a : tol_args) {
            const auto eq = a.find('=');
            if (eq == std::string::npos || eq == 0) throw ConfigError("--tolerance expects NAME=VALUE, got '" + a + "'");
            const std::string name = a.substr(0, eq);
            apply_tolerance(r.tol, name, parse_double(a.substr(eq + 1), "tolerance " + name));
        }

        if (seed_opt->count() > 0) {
            r.seed = seed;
        } else if (r.config.contains("seed")) {
            if (!r.config.at("seed").is_number_unsigned()) throw ConfigError("config: seed must be a non-negative integer");
            r.seed = r.config.at("seed").get<std::uint64_t>();
        }

        const json& oj = section(r.config, "output");
        std::string fmt_name = (r.subcommand == "classify" || r.subcommand == "verify") ? "json" : "csv";
        if (oj.contains("format")) {
            if (!oj.at("format").is_string()) throw ConfigError("config: output.format must be a string");
            fmt_name = oj.at("format").get<std::string>();
        }
        if (!format.empty()) fmt_name = format;
        if (fmt_name != "csv" && fmt_name != "json") throw ConfigError("unknown output format '" + fmt_name + "'");
        r.format = fmt_name == "csv" ? Format::csv : Format::json;

        if (!out_path.empty()) {
            r.out_path = out_path;
        } else if (oj.contains("path")) {
            if (!oj.at("path").is_string()) throw ConfigError("config: output.path must be a string");
            r.out_path = oj.at("path").get<std::string>();
            if (r.out_path.is_relative()) r.out_path = r.base_dir / r.out_path;
        }

        if (r.subcommand == "solve-aux") return cmd_solve_aux(r, out);
        if (r.subcommand == "heisenberg") return cmd_heisenberg(r, out);
        if (r.subcommand == "evolve") return cmd_evolve(r, out);
        if (r.subcommand == "classify") return cmd_classify(r, out);
        if (r.subcommand == "metric") return cmd_metric(r, out);
        return cmd_verify(r, out);
    } catch (const Error& e) {
        err << "tdho: " << category_name(e.category()) << " error: " << e.what() << "\n";
        return status_for(e.category());
    } catch (const json::exception& e) {
        err << "tdho: config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        err << "tdho: error: " << e.what() << "\n";
        return 1;
    }
}

} // namespace tdho
