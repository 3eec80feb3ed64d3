#include "support.hpp"

#include "tdho/cli.hpp"

#include <fstream>
#include <sstream>

#include <doctest.h>
#include <nlohmann/json.hpp>

using namespace tdho;
using nlohmann::json;

namespace {

struct Outcome {
    int status;
    std::string out, err;
};

Outcome run(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int status = run_cli(args, out, err);
    return {status, out.str(), err.str()};
}

std::string write_config(const std::filesystem::path& dir, const std::string& name, const json& cfg) {
    const auto path = dir / name;
    std::ofstream(path) << cfg.dump(2);
    return path.string();
}

json oscillator_config() {
    return json::parse(R"({
        "profile": {"mass": {"kind": "constant", "value": 1.0},
                    "frequency": {"kind": "constant", "omega": 1.0},
                    "domain": [0.0, 3.0]},
        "auxiliary": {"k_squared": 1, "chi0": 1.0, "chidot0": 0.0},
        "time": {"t_max": 3.0, "samples": 31},
        "state": {"mean_x": 1.0, "mean_p": 0.0, "cov_xx": 0.5}
    })");
}

std::vector<std::vector<double>> csv_rows(const std::string& text) {
    std::vector<std::vector<double>> rows;
    std::istringstream is(text);
    std::string line;
    bool header = false;
    while (std::getline(is, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (!header) {
            header = true;
            continue;
        }
        std::vector<double> row;
        std::istringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) row.push_back(std::stod(cell));
        rows.push_back(row);
    }
    return rows;
}

} // namespace

TEST_SUITE("cli") {

TEST_CASE("solve-aux equilibrium") {
    const auto dir = testing::scratch_dir("cli_solve");
    const auto cfg = write_config(dir, "osc.json", oscillator_config());
    const auto r = run({"solve-aux", "--config", cfg});
    REQUIRE(r.status == 0);
    CHECK(r.out.rfind("# tdho solve-aux\n", 0) == 0);
    CHECK(r.out.find("\nt,chi,chi_dot\n") != std::string::npos);
    const auto rows = csv_rows(r.out);
    REQUIRE(rows.size() == 31);
    for (const auto& row : rows) {
        CHECK(row[1] == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(std::abs(row[2]) < 1e-12);
    }
    CHECK(rows.back()[0] == 3.0);
}

TEST_CASE("heisenberg and evolve tables") {
    const auto dir = testing::scratch_dir("cli_heis");
    const auto cfg = write_config(dir, "osc.json", oscillator_config());

    const auto h = run({"heisenberg", "--config", cfg});
    REQUIRE(h.status == 0);
    for (const auto& row : csv_rows(h.out)) {
        CHECK(row[1] == doctest::Approx(std::cos(row[0])).epsilon(1e-10));
        CHECK(row[2] == doctest::Approx(std::sin(row[0])).epsilon(1e-10));
    }

    const auto e = run({"evolve", "--config", cfg, "--format", "json"});
    REQUIRE(e.status == 0);
    const auto j = json::parse(e.out);
    CHECK(j.at("columns").size() == 10);
    CHECK(j.at("columns")[5] == "mean_x");
    CHECK(j.at("meta").at("subcommand") == "evolve");
    const auto last = j.at("rows").back();
    CHECK(last[5].get<double>() == doctest::Approx(std::cos(3.0)).epsilon(1e-10));
    CHECK(last[7].get<double>() == doctest::Approx(0.5).epsilon(1e-10));
}

TEST_CASE("classify damped oscillator") {
    const auto dir = testing::scratch_dir("cli_classify");
    const auto cfg = write_config(dir, "ck.json", json::parse(R"({
        "profile": {"mass": {"kind": "caldirola-kanai", "m0": 1.0, "gamma": 1.0},
                    "frequency": {"kind": "constant", "omega_sq": 1.25},
                    "domain": [0.0, 5.0]}
    })"));
    const auto r = run({"classify", "--config", cfg});
    REQUIRE(r.status == 0);
    const auto j = json::parse(r.out);
    CHECK(j.at("in_class") == true);
    CHECK(j.at("omega0_best").get<double>() == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(j.at("max_residual").get<double>() < 1e-12);
}

TEST_CASE("metric table") {
    const auto dir = testing::scratch_dir("cli_metric");
    const auto cfg = write_config(dir, "m.json", json::parse(R"({
        "metric": {"family": "quadratic", "epsilon": 0.5, "x_min": 0.0, "x_max": 1.0, "samples": 3}
    })"));
    const auto r = run({"metric", "--config", cfg});
    REQUIRE(r.status == 0);
    const auto rows = csv_rows(r.out);
    REQUIRE(rows.size() == 3);
    CHECK(rows[2][1] == doctest::Approx(2.0));
    CHECK(rows[2][2] == doctest::Approx(0.25));
    CHECK(rows[2][3] == doctest::Approx(16.0));
}

TEST_CASE("verify report") {
    const auto dir = testing::scratch_dir("cli_verify");
    auto c = json::parse(R"({
        "profile": {"mass": {"kind": "sinusoidal-modulated", "m0": 1.0, "amplitude": 0.2, "rate": 0.8},
                    "frequency": {"kind": "polynomial", "coeffs": [1.0, 0.1]},
                    "domain": [0.0, 3.0]},
        "auxiliary": {"k_squared": 1, "chi0": 1.0, "chidot0": 0.0},
        "time": {"t_max": 3.0, "samples": 31},
        "state": {"mean_x": 0.5, "mean_p": 0.2, "cov_xx": 0.5},
        "verify": {"draws": 6, "grid_n": 1024, "grid_box": 16, "grid_time": 1.0, "grid_steps_per_unit": 2000},
        "seed": 5
    })");
    const auto cfg = write_config(dir, "v.json", c);
    const auto r = run({"verify", "--config", cfg});
    CHECK(r.status == 0);
    const auto j = json::parse(r.out);
    CHECK(j.at("pass") == true);
    std::vector<std::string> names;
    for (const auto& e : j.at("checks")) {
        names.push_back(e.at("name").get<std::string>());
        CHECK(e.at("max_error").get<double>() <= e.at("threshold").get<double>());
    }
    CHECK(names == std::vector<std::string>{"det", "oracle_map", "factorization", "residual", "gauge", "wronskian",
                                            "grid_fidelity", "grid_moments"});
    CHECK(j.at("meta").at("seed") == 5);

    SUBCASE("a failing threshold gives status 4") {
        const auto f = run({"verify", "--config", cfg, "--tolerance", "factorization=1e-30"});
        CHECK(f.status == 4);
        CHECK(json::parse(f.out).at("pass") == false);
    }
}

TEST_CASE("determinism") {
    const auto dir = testing::scratch_dir("cli_det");
    auto c = oscillator_config();
    c["verify"] = {{"draws", 4}, {"grid", false}};
    const auto cfg = write_config(dir, "osc.json", c);
    for (const char* sub : {"solve-aux", "evolve", "verify"}) {
        const auto a = run({sub, "--config", cfg, "--seed", "9"});
        const auto b = run({sub, "--config", cfg, "--seed", "9"});
        CAPTURE(sub);
        CHECK(a.status == 0);
        CHECK(a.out == b.out);
    }
    // file output is the same bytes as stdout
    const auto path = (dir / "out.csv").string();
    REQUIRE(run({"solve-aux", "--config", cfg, "--out", path}).status == 0);
    std::ifstream in(path);
    std::stringstream buf;
    buf << in.rdbuf();
    CHECK(buf.str() == run({"solve-aux", "--config", cfg}).out);
}

TEST_CASE("tolerance overrides are recorded") {
    const auto dir = testing::scratch_dir("cli_tol");
    auto c = oscillator_config();
    c["tolerances"] = {{"h_max", 0.005}};
    const auto cfg = write_config(dir, "osc.json", c);
    const auto r = run({"solve-aux", "--config", cfg, "--tolerance", "rtol=1e-9", "--tolerance", "det=1e-7"});
    REQUIRE(r.status == 0);
    CHECK(r.out.find("# tolerance.rtol=1.0000000000000001e-09\n") != std::string::npos);
    CHECK(r.out.find("# tolerance.h_max=0.0050000000000000001\n") != std::string::npos);
    CHECK(r.out.find("# tolerance.det=9.9999999999999995e-08\n") != std::string::npos);

    const auto j = json::parse(run({"heisenberg", "--config", cfg, "--format", "json", "--tolerance", "rtol=1e-9"}).out);
    CHECK(j.at("meta").at("tolerances").at("rtol").get<double>() == 1e-9);
    CHECK(j.at("meta").at("tolerances").at("h_max").get<double>() == 0.005);
    CHECK(j.at("meta").at("tolerances").size() == default_tolerances().size());
}

TEST_CASE("error statuses") {
    const auto dir = testing::scratch_dir("cli_err");
    const auto good = write_config(dir, "osc.json", oscillator_config());

    CHECK(run({"solve-aux"}).status == 2);
    CHECK(run({"--config", good}).status == 2);
    CHECK(run({"solve-aux", "--config", (dir / "missing.json").string()}).status == 2);
    CHECK(run({"solve-aux", "--config", good, "--tolerance", "bogus=1"}).status == 2);
    CHECK(run({"solve-aux", "--config", good, "--tolerance", "rtol=abc"}).status == 2);
    CHECK(run({"solve-aux", "--config", good, "--format", "xml"}).status == 2);

    std::ofstream(dir / "broken.json") << "{ not json";
    const auto broken = run({"solve-aux", "--config", (dir / "broken.json").string()});
    CHECK(broken.status == 2);
    CHECK(broken.err.find("config") != std::string::npos);

    auto c = oscillator_config();
    c["auxiliary"]["chi0"] = -1.0;
    CHECK(run({"solve-aux", "--config", write_config(dir, "neg.json", c)}).status == 2);

    c = oscillator_config();
    c["time"]["t_max"] = 10.0;
    const auto outside = run({"solve-aux", "--config", write_config(dir, "outside.json", c)});
    CHECK(outside.status == 3);
    CHECK(outside.err.find("domain") != std::string::npos);

    // attractive coupling from rest: chi = sqrt(1 - t^2) on a free particle
    c = oscillator_config();
    c["profile"]["frequency"]["omega"] = 0.0;
    c["auxiliary"]["k_squared"] = -1;
    const auto horizon = run({"solve-aux", "--config", write_config(dir, "horizon.json", c)});
    CHECK(horizon.status == 3);

    c = oscillator_config();
    c["profile"]["mass"] = {{"kind", "polynomial"}, {"coeffs", {1.0, -1.0}}};
    CHECK(run({"solve-aux", "--config", write_config(dir, "mass.json", c)}).status == 3);
}

TEST_CASE("profile from a file and tabulated laws") {
    const auto dir = testing::scratch_dir("cli_tab");
    {
        std::ofstream m(dir / "mass.csv");
        m << "t,m\n";
        for (int i = 0; i <= 40; ++i) m << 0.1 * i << "," << 1.0 + 0.01 * i << "\n";
    }
    std::ofstream(dir / "profile.json") << R"({"mass": {"kind": "tabulated", "csv": "mass.csv"},
        "frequency": {"kind": "constant", "omega": 1.0}})";
    auto c = oscillator_config();
    c["profile"] = "profile.json";
    const auto r = run({"solve-aux", "--config", write_config(dir, "run.json", c)});
    CHECK(r.status == 0);
    CHECK(csv_rows(r.out).size() == 31);
}

TEST_CASE("help") {
    const auto r = run({"--help"});
    CHECK(r.status == 0);
    CHECK(r.out.find("verify") != std::string::npos);
}

} // TEST_SUITE
