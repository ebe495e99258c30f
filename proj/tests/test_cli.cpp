#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "thermorel/cli.hpp"
#include "thermorel/config.hpp"

using namespace thermorel;
namespace fs = std::filesystem;

namespace {

std::string write_temp(const std::string& name, const std::string& text) {
    const std::string path = "/tmp/thermorel_cli_" + name;
    std::ofstream out(path);
    out << text;
    return path;
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

const char* kBaseConfig = R"json({
  "geometry": {
    "outer_radius": 1.0,
    "hole_center": [0.0, 0.0],
    "hole_radius": 0.3,
    "ext_radius": 1.6,
    "resolution": 0.15,
    "basis_modes": 4,
    "bound_K": 200000.0,
    "det_floor": 0.1,
    "vol_tol": 0.001
  },
  "material": {
    "lambda": 1.1538461538461538e11,
    "mu": 7.692307692307692e10,
    "E": 2.0e11,
    "rho_cte": 1.2e-5,
    "k_cond": 45.0,
    "K_hard": 1.5e9,
    "n_hard": 0.12,
    "sigma_f": 1.2e9,
    "eps_f": 0.5,
    "b_exp": -0.08,
    "c_exp": -0.6,
    "Q_act": 0.005,
    "T0": 300.0
  },
  "reliability": { "m": 2.5 },
  "loads": {
    "T_e": "300+250*exp(-((x-1)^2+y^2)/0.3)",
    "eta": "50"
  },
  "sample": { "replications": 200, "seed": 42 },
  "output": { "directory": "/tmp/thermorel_cli_out" }
})json";

const char* kNoLoadConfig = R"json({
  "geometry": {
    "outer_radius": 1.0, "hole_radius": 0.3, "ext_radius": 1.6, "resolution": 0.2
  },
  "material": {
    "lambda": 1.1538461538461538e11, "mu": 7.692307692307692e10, "E": 2.0e11,
    "rho_cte": 1.2e-5, "k_cond": 45.0, "K_hard": 1.5e9, "n_hard": 0.12,
    "sigma_f": 1.2e9, "eps_f": 0.5, "b_exp": -0.08, "c_exp": -0.6,
    "Q_act": 0.005, "T0": 300.0, "m_weib": 2.5
  },
  "loads": { "T_e": "300", "eta": "50" },
  "output": { "directory": "/tmp/thermorel_cli_noload" }
})json";

}  // namespace

TEST_CASE("config parsing: valid file") {
    const ProblemConfig cfg = parse_config_text(kBaseConfig);
    CHECK(cfg.geometry.design.outer_radius == 1.0);
    CHECK(cfg.geometry.basis_modes == 4);
    CHECK(cfg.material.m_weib == 2.5);
    CHECK(cfg.material.E == 2.0e11);
    CHECK(cfg.sample.replications == 200);
    CHECK(cfg.reliability.include_dirichlet_boundary);
    CHECK(cfg.output.directory == "/tmp/thermorel_cli_out");
}

TEST_CASE("config parsing: errors name the offending key") {
    // missing required material key
    std::string text = kBaseConfig;
    text.replace(text.find("\"E\": 2.0e11,"), 13, "");
    try {
        parse_config_text(text);
        FAIL("expected a ValidationError");
    } catch (const ValidationError& e) {
        CHECK(std::string(e.what()).find("'E'") != std::string::npos);
    }

    // unknown key
    std::string unknown = kBaseConfig;
    unknown.replace(unknown.find("\"resolution\""), 12, "\"resolutionn\"");
    try {
        parse_config_text(unknown);
        FAIL("expected a ValidationError");
    } catch (const ValidationError& e) {
        CHECK(std::string(e.what()).find("resolutionn") != std::string::npos);
        CHECK(std::string(e.what()).find("unknown key") != std::string::npos);
    }

    // malformed JSON
    CHECK_THROWS_AS(parse_config_text("{ not json"), ValidationError);

    // conflicting Weibull shapes
    std::string conflict = kBaseConfig;
    conflict.replace(conflict.find("\"T0\": 300.0"), 11, "\"T0\": 300.0, \"m_weib\": 3.0");
    CHECK_THROWS_AS(parse_config_text(conflict), ValidationError);

    // missing shape entirely
    std::string no_m = kBaseConfig;
    no_m.replace(no_m.find("\"reliability\": { \"m\": 2.5 },"), 28, "");
    try {
        parse_config_text(no_m);
        FAIL("expected a ValidationError");
    } catch (const ValidationError& e) {
        CHECK(std::string(e.what()).find("Weibull shape") != std::string::npos);
    }
}

TEST_CASE("config parsing: MPa units scale stress quantities") {
    std::string text = R"json({
      "geometry": { "outer_radius": 1.0, "hole_radius": 0.3, "ext_radius": 1.6,
                    "resolution": 0.2 },
      "material": {
        "stress_unit": "MPa",
        "lambda": 115384.61538461538, "mu": 76923.07692307692, "E": 200000.0,
        "rho_cte": 1.2e-5, "k_cond": 45.0, "K_hard": 1500.0, "n_hard": 0.12,
        "sigma_f": 1200.0, "eps_f": 0.5, "b_exp": -0.08, "c_exp": -0.6,
        "Q_act": 0.005, "T0": 300.0, "m_weib": 2.5
      },
      "loads": { "T_e": "300", "eta": "50" }
    })json";
    const ProblemConfig cfg = parse_config_text(text);
    CHECK(cfg.material.E == doctest::Approx(2.0e11));
    CHECK(cfg.material.K_hard == doctest::Approx(1.5e9));
    CHECK(cfg.material.sigma_f == doctest::Approx(1.2e9));
    CHECK(cfg.material.rho_cte == 1.2e-5);  // not a stress, not scaled
}

TEST_CASE("cmd_solve: no-load problem reports an infinite scale") {
    const std::string path = write_temp("noload.json", kNoLoadConfig);
    CliOptions opts;
    opts.config_path = path;
    CHECK(cmd_solve(opts) == 0);

    const std::string report = slurp("/tmp/thermorel_cli_noload/report.json");
    CHECK(report.find("\"N_scale\": \"inf\"") != std::string::npos);
    CHECK(report.find("\"J\": 0.0") != std::string::npos);
}

TEST_CASE("cmd_solve: reruns are byte-identical") {
    const std::string path = write_temp("solve.json", kBaseConfig);
    CliOptions opts;
    opts.config_path = path;
    opts.out_dir = "/tmp/thermorel_cli_runA";
    REQUIRE(cmd_solve(opts) == 0);
    opts.out_dir = "/tmp/thermorel_cli_runB";
    REQUIRE(cmd_solve(opts) == 0);

    for (const char* name : {"report.json", "mesh.txt", "temperature.csv", "displacement.csv",
                             "stress.csv", "mesh.json"}) {
        CAPTURE(name);
        CHECK(slurp(fs::path("/tmp/thermorel_cli_runA") / name) ==
              slurp(fs::path("/tmp/thermorel_cli_runB") / name));
    }
}

TEST_CASE("cmd_solve: exit code 2 on config errors") {
    CliOptions opts;
    opts.config_path = "/tmp/thermorel_does_not_exist.json";
    CHECK(cmd_solve(opts) == 2);

    const std::string bad = write_temp("bad.json", "{ \"geometry\": {} }");
    opts.config_path = bad;
    CHECK(cmd_solve(opts) == 2);
}

TEST_CASE("cmd_sample: header-only file for zero replications, deterministic otherwise") {
    const std::string path = write_temp("sample.json", kBaseConfig);
    CliOptions opts;
    opts.config_path = path;
    opts.out_dir = "/tmp/thermorel_cli_sample0";
    opts.replications = 0;
    REQUIRE(cmd_sample(opts) == 0);
    CHECK(slurp("/tmp/thermorel_cli_sample0/tau_samples.csv") == "replication,tau,censored\n");

    opts.replications = 150;
    opts.seed = 7;
    opts.out_dir = "/tmp/thermorel_cli_sampleA";
    REQUIRE(cmd_sample(opts) == 0);
    opts.out_dir = "/tmp/thermorel_cli_sampleB";
    opts.threads = 3;  // thread count must not change the sample
    REQUIRE(cmd_sample(opts) == 0);
    const std::string a = slurp("/tmp/thermorel_cli_sampleA/tau_samples.csv");
    CHECK(a == slurp("/tmp/thermorel_cli_sampleB/tau_samples.csv"));
    CHECK(a.find("replication,tau,censored") == 0);
}

TEST_CASE("cmd_optimize: zero budget returns the baseline design") {
    std::string text = kBaseConfig;
    text.replace(text.find("\"sample\""), 8, "\"optimizer\": { \"max_evals\": 0 }, \"sample\"");
    const std::string path = write_temp("opt0.json", text);
    CliOptions opts;
    opts.config_path = path;
    opts.out_dir = "/tmp/thermorel_cli_opt0";
    REQUIRE(cmd_optimize(opts) == 0);
    const std::string trace = slurp("/tmp/thermorel_cli_opt0/trace.json");
    CHECK(trace.find("\"best_theta\": [") != std::string::npos);
    CHECK(trace.find("\"entries\": []") != std::string::npos);
}

TEST_CASE("cmd_diagnose and cmd_mesh_export run clean") {
    const std::string path = write_temp("diag.json", kBaseConfig);
    CliOptions opts;
    opts.config_path = path;
    opts.out_dir = "/tmp/thermorel_cli_diag";
    opts.n_shapes = 4;
    CHECK(cmd_diagnose(opts) == 0);
    CHECK(fs::exists("/tmp/thermorel_cli_diag/diagnostics.csv"));

    opts.out_dir = "/tmp/thermorel_cli_mesh";
    CHECK(cmd_mesh_export(opts) == 0);
    CHECK(fs::exists("/tmp/thermorel_cli_mesh/mesh.txt"));
    CHECK(fs::exists("/tmp/thermorel_cli_mesh/mesh.json"));
}

TEST_CASE("binary end-to-end exit codes") {
    if (!fs::exists("./thermorel")) return;  // only meaningful from the build tree
    const std::string path = write_temp("e2e.json", kNoLoadConfig);
    const int ok = std::system(("./thermorel solve --config " + path +
                                " --out /tmp/thermorel_cli_e2e > /dev/null 2>&1")
                                   .c_str());
    CHECK(WEXITSTATUS(ok) == 0);
    const int bad = std::system("./thermorel solve --config /tmp/nonexistent_cfg.json "
                                "> /dev/null 2>&1");
    CHECK(WEXITSTATUS(bad) == 2);
}
