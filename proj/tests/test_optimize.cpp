#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>

#include "support.hpp"
#include "thermorel/optimize.hpp"

using namespace thermorel;
using test_support::steel;
using test_support::unit_annulus;

namespace {

/// Small, fast demo problem: coarse annulus under a one-sided hot ambient.
Problem demo_problem(double resolution = 0.16) {
    const BaselineDesign d = unit_annulus();
    auto mesh = std::make_shared<const Mesh>(build_baseline(d, resolution));
    const MaterialParams p = steel();

    RobinData robin;
    robin.k_cond = p.k_cond;
    robin.eta = [](const Vec3&, const Vec3&) { return 50.0; };
    robin.T_ambient = [&](const Vec3& x, const Vec3&) {
        return 300.0 + 250.0 * std::exp(-((x.x - 1.0) * (x.x - 1.0) + x.y * x.y) / 0.3);
    };

    DeformationMap map = make_map(d, {}, 2e5);
    return make_problem(d, map, mesh, p, std::move(robin), {}, {}, 0.1, 1e-3);
}

}  // namespace

TEST_CASE("nelder-mead recovers a quadratic minimum") {
    // f(x) = (x0-1)^2 + 2(x1+0.5)^2 + 0.5(x0-1)(x1+0.5) + 3
    auto f = [](std::span<const double> x) {
        const double a = x[0] - 1.0, b = x[1] + 0.5;
        return a * a + 2.0 * b * b + 0.5 * a * b + 3.0;
    };
    const std::vector<double> x0{0.0, 0.0};
    const NelderMeadResult res = nelder_mead_minimize(f, x0, 0.5, 500, 1e-14);
    CHECK(std::fabs(res.x[0] - 1.0) <= 1e-4);
    CHECK(std::fabs(res.x[1] + 0.5) <= 1e-4);
    CHECK(res.f == doctest::Approx(3.0).epsilon(1e-6));
    CHECK(res.evals <= 500);
}

TEST_CASE("evaluate_design is deterministic and flags feasibility") {
    const Problem prob = demo_problem();
    const std::vector<double> theta(prob.map_template.basis.size(), 0.0);

    const EvalResult a = evaluate_design(prob, theta);
    const EvalResult b = evaluate_design(prob, theta);
    CHECK(a.diag.solver_ok);
    CHECK(a.diag.feasible);
    CHECK(a.J == b.J);  // bit-exact reproducibility
    CHECK(a.diag.volume == b.diag.volume);
    CHECK(a.J > 0.0);
    CHECK(a.diag.volume_rel_dev == 0.0);
    CHECK(a.diag.min_det == doctest::Approx(1.0));

    // wildly folding theta: large finite penalty, no exception
    std::vector<double> bad(theta.size(), 25.0);
    const EvalResult r = evaluate_design(prob, bad);
    CHECK_FALSE(r.diag.feasible);
    CHECK(r.J >= 1e29);
    CHECK(std::isfinite(r.J));
}

TEST_CASE("objective is continuous in theta") {
    const Problem prob = demo_problem();
    const std::vector<double> theta0(prob.map_template.basis.size(), 0.0);
    const double J0 = evaluate_design(prob, theta0).J;

    for (int dir : {0, 3, 5}) {
        double prev_gap = std::numeric_limits<double>::infinity();
        for (double delta : {1e-2, 1e-3, 1e-4}) {
            std::vector<double> theta = theta0;
            theta[dir] += delta;
            const double J = evaluate_design(prob, theta).J;
            const double gap = std::fabs(J - J0);
            CHECK(gap < prev_gap + 1e-30);
            prev_gap = gap;
        }
        CHECK(prev_gap <= 0.05 * (J0 + 1e-30));
    }
}

TEST_CASE("zero evaluation budget returns the baseline incumbent") {
    const Problem prob = demo_problem();
    OptimizationConfig cfg;
    cfg.max_evals = 0;
    const OptimizationTrace trace = optimize_shape(prob, cfg);
    CHECK(trace.entries.empty());
    CHECK(trace.has_feasible);
    for (double t : trace.best_theta) CHECK(t == 0.0);
    CHECK(trace.best_J == evaluate_design(prob, trace.best_theta).J);
}

TEST_CASE("optimization run: incumbent monotone, feasible, deterministic") {
    const Problem prob = demo_problem();
    OptimizationConfig cfg;
    cfg.step = 0.03;
    cfg.max_evals = 40;
    cfg.seed = 17;
    cfg.restarts = 1;
    cfg.w_volume = 1e4 * evaluate_design(prob, std::vector<double>(8, 0.0)).J;

    const OptimizationTrace t1 = optimize_shape(prob, cfg);
    REQUIRE_FALSE(t1.entries.empty());

    double incumbent = std::numeric_limits<double>::infinity();
    for (const auto& e : t1.entries) {
        if (e.feasible) incumbent = std::min(incumbent, e.J);
        if (std::isfinite(e.incumbent_J)) CHECK(e.incumbent_J <= incumbent + 1e-30);
    }
    CHECK(t1.has_feasible);
    CHECK(t1.best_J <= evaluate_design(prob, std::vector<double>(8, 0.0)).J);

    // volume feasibility of the incumbent
    const EvalResult best = evaluate_design(prob, t1.best_theta);
    CHECK(best.diag.volume_rel_dev <= prob.vol_tol);

    // determinism: identical config and seed give an identical trace
    const OptimizationTrace t2 = optimize_shape(prob, cfg);
    REQUIRE(t1.entries.size() == t2.entries.size());
    for (size_t i = 0; i < t1.entries.size(); ++i) {
        CHECK(t1.entries[i].J == t2.entries[i].J);
        CHECK(t1.entries[i].theta == t2.entries[i].theta);
    }
    CHECK(t1.best_J == t2.best_J);
}

TEST_CASE("infeasible initial design is rejected") {
    const Problem prob = demo_problem();
    OptimizationConfig cfg;
    cfg.initial_theta.assign(prob.map_template.basis.size(), 30.0);
    CHECK_THROWS_AS(optimize_shape(prob, cfg), ValidationError);
}

TEST_CASE("checkpoint resume reproduces the uninterrupted incumbent") {
    const Problem prob = demo_problem(0.2);
    const std::string ckpt = "/tmp/thermorel_test_checkpoint.json";
    std::remove(ckpt.c_str());

    OptimizationConfig full;
    full.step = 0.03;
    full.max_evals = 36;
    full.seed = 5;
    full.restarts = 0;  // resume with a changed budget needs a single run
    full.checkpoint_path = ckpt;

    const OptimizationTrace uninterrupted = optimize_shape(prob, full);
    std::remove(ckpt.c_str());

    // interrupted: stop after 15 evaluations, then resume to the full budget
    OptimizationConfig part = full;
    part.max_evals = 15;
    const OptimizationTrace partial = optimize_shape(prob, part);
    CHECK(partial.evals <= 15 + 8);  // may finish the iteration in flight

    OptimizationConfig rest = full;
    rest.resume = true;
    const OptimizationTrace resumed = optimize_shape(prob, rest);
    std::remove(ckpt.c_str());

    CHECK(resumed.best_J == uninterrupted.best_J);
    CHECK(resumed.best_theta == uninterrupted.best_theta);
    REQUIRE(resumed.entries.size() == uninterrupted.entries.size());
    for (size_t i = 0; i < resumed.entries.size(); ++i)
        CHECK(resumed.entries[i].J == uninterrupted.entries[i].J);
}
