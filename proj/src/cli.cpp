#include "thermorel/cli.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <thread>
#include <vector>

#include "thermorel/config.hpp"
#include "thermorel/io.hpp"
#include "thermorel/rng.hpp"

namespace thermorel {

namespace fs = std::filesystem;

namespace {

int guarded(const std::function<void()>& body) {
    try {
        body();
        return 0;
    } catch (const ValidationError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    }
}

struct Session {
    ProblemConfig cfg;
    Problem problem;
    fs::path out;
};

Session open_session(const CliOptions& opts) {
    Session s{load_config(opts.config_path), {}, {}};
    s.problem = build_problem(s.cfg);
    s.out = opts.out_dir.empty() ? fs::path(s.cfg.output.directory) : fs::path(opts.out_dir);
    fs::create_directories(s.out);
    return s;
}

std::vector<double> default_time_grid(const ReliabilityReport& rep,
                                      const std::vector<double>& configured) {
    if (!configured.empty()) return configured;
    std::vector<double> grid;
    const double scale = rep.N_scale.is_infinite() ? 1.0 : rep.N_scale.cycles();
    for (int i = 0; i <= 20; ++i) grid.push_back(2.0 * scale * i / 20.0);
    return grid;
}

void print_report_summary(const ReliabilityReport& rep, const std::vector<double>& grid) {
    std::printf("J        = %.12g\n", rep.J);
    if (rep.N_scale.is_infinite()) {
        std::printf("N_scale  = inf\n");
        std::printf("mean     = inf\n");
    } else {
        std::printf("N_scale  = %.12g\n", rep.N_scale.cycles());
        std::printf("mean     = %.12g\n", mean_life(rep));
    }
    std::printf("m        = %.12g\n", rep.m);
    std::printf("%14s %14s\n", "t", "F(t)");
    for (double t : grid) std::printf("%14.6g %14.6g\n", t, failure_cdf(t, rep));
}

}  // namespace

int resolve_thread_count(int requested) {
    if (const char* env = std::getenv("THERMOREL_THREADS")) {
        const int n = std::atoi(env);
        if (n > 0) return n;
    }
    if (requested > 0) return requested;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

int cmd_solve(const CliOptions& opts) {
    return guarded([&] {
        Session s = open_session(opts);
        const std::vector<double> theta = s.cfg.optimizer.initial_theta.empty()
                                              ? std::vector<double>(s.problem.map_template.basis.size(), 0.0)
                                              : s.cfg.optimizer.initial_theta;

        DeformationMap map = s.problem.map_template;
        map.theta = theta;
        const Shape shape = make_shape(s.problem.design, map, s.problem.baseline_mesh);
        const ScalarField T = solve_heat(shape, s.problem.robin);
        const VectorField u = solve_elasticity(shape, s.problem.loads, T, s.problem.material);
        const StressField sig = stress(shape, u, T, s.problem.material);
        const ReliabilityReport rep = objective_J(shape, u, T, s.problem.material, s.problem.rel_opts);

        const auto grid = default_time_grid(rep, s.cfg.reliability.time_grid);
        write_mesh_text(*shape.mesh, (s.out / "mesh.txt").string());
        write_mesh_json(*shape.mesh, (s.out / "mesh.json").string());
        if (s.cfg.output.csv) {
            write_scalar_field_csv(T, (s.out / "temperature.csv").string());
            write_vector_field_csv(u, (s.out / "displacement.csv").string());
            write_stress_csv(sig, (s.out / "stress.csv").string());
        }
        if (s.cfg.output.json) {
            write_scalar_field_json(T, (s.out / "temperature.json").string());
            write_vector_field_json(u, (s.out / "displacement.json").string());
            write_stress_json(sig, (s.out / "stress.json").string());
            write_report_json(rep, grid, (s.out / "report.json").string());
        }
        {
            std::ofstream cdf(s.out / "cdf.csv");
            cdf << "t,F\n";
            for (double t : grid)
                cdf << fmt_full(t) << "," << fmt_full(failure_cdf(t, rep)) << "\n";
        }
        if (s.cfg.output.gnuplot)
            write_gnuplot_script("cdf.csv", "failure probability", (s.out / "cdf.gp").string());
        print_report_summary(rep, grid);
        std::printf("artifacts written to %s\n", s.out.string().c_str());
    });
}

int cmd_sample(const CliOptions& opts) {
    return guarded([&] {
        Session s = open_session(opts);
        DeformationMap map = s.problem.map_template;
        map.theta.assign(map.basis.size(), 0.0);
        if (!s.cfg.optimizer.initial_theta.empty()) map.theta = s.cfg.optimizer.initial_theta;
        const Shape shape = make_shape(s.problem.design, map, s.problem.baseline_mesh);
        const ScalarField T = solve_heat(shape, s.problem.robin);
        const VectorField u = solve_elasticity(shape, s.problem.loads, T, s.problem.material);
        const ReliabilityReport rep = objective_J(shape, u, T, s.problem.material, s.problem.rel_opts);

        double t_max = opts.t_max.value_or(s.cfg.sample.t_max);
        if (t_max <= 0.0) t_max = rep.N_scale.is_infinite() ? 1.0 : rep.N_scale.cycles();
        const int reps = opts.replications.value_or(s.cfg.sample.replications);
        const uint64_t seed = opts.seed.value_or(s.cfg.sample.seed);

        std::vector<std::optional<double>> taus(reps);
        const int n_threads = std::min(resolve_thread_count(opts.threads), std::max(1, reps));
        std::vector<std::thread> pool;
        std::atomic<int> next{0};
        for (int w = 0; w < n_threads; ++w)
            pool.emplace_back([&] {
                for (;;) {
                    const int i = next.fetch_add(1);
                    if (i >= reps) return;
                    const CrackEventSet ev =
                        sample_crack_process(rep, t_max, SeededRng::stream_seed(seed, i));
                    taus[i] = ev.tau;
                }
            });
        for (auto& t : pool) t.join();

        std::ofstream csv(s.out / "tau_samples.csv");
        csv << "replication,tau,censored\n";
        for (int i = 0; i < reps; ++i) {
            csv << i << ",";
            if (taus[i])
                csv << fmt_full(*taus[i]) << ",0\n";
            else
                csv << ",1\n";
        }

        // empirical vs analytic CDF and Kolmogorov-Smirnov distance on [0, t_max]
        std::vector<double> uncensored;
        for (const auto& t : taus)
            if (t) uncensored.push_back(*t);
        std::sort(uncensored.begin(), uncensored.end());
        double ks = 0.0;
        if (reps > 0) {
            const double n = static_cast<double>(reps);
            for (size_t i = 0; i < uncensored.size(); ++i) {
                const double F = failure_cdf(uncensored[i], rep);
                ks = std::max(ks, std::fabs((i + 1) / n - F));
                ks = std::max(ks, std::fabs(static_cast<double>(i) / n - F));
            }
            ks = std::max(ks, std::fabs(uncensored.size() / n - failure_cdf(t_max, rep)));
        }

        std::printf("t_max        = %.12g\n", t_max);
        std::printf("replications = %d\n", reps);
        std::printf("uncensored   = %zu\n", uncensored.size());
        std::printf("%14s %14s %14s\n", "t", "empirical", "analytic");
        const double n = std::max(1, reps);
        for (int k = 1; k <= 10; ++k) {
            const double t = t_max * k / 10.0;
            const double emp =
                std::upper_bound(uncensored.begin(), uncensored.end(), t) - uncensored.begin();
            std::printf("%14.6g %14.6g %14.6g\n", t, emp / n, failure_cdf(t, rep));
        }
        std::printf("KS distance  = %.6g\n", ks);
    });
}

int cmd_optimize(const CliOptions& opts) {
    return guarded([&] {
        Session s = open_session(opts);
        OptimizationConfig ocfg = s.cfg.optimizer;
        if (opts.seed) ocfg.seed = *opts.seed;
        if (ocfg.checkpoint_path.empty())
            ocfg.checkpoint_path = (s.out / "checkpoint.json").string();
        ocfg.resume = opts.resume;

        const EvalResult baseline = evaluate_design(
            s.problem, std::vector<double>(s.problem.map_template.basis.size(), 0.0));

        const OptimizationTrace trace = optimize_shape(s.problem, ocfg);
        write_trace_csv(trace, (s.out / "trace.csv").string());
        write_trace_json(trace, (s.out / "trace.json").string());

        DeformationMap best = s.problem.map_template;
        best.theta = trace.best_theta;
        const Shape shape = make_shape(s.problem.design, best, s.problem.baseline_mesh);
        const ScalarField T = solve_heat(shape, s.problem.robin);
        const VectorField u = solve_elasticity(shape, s.problem.loads, T, s.problem.material);
        const ReliabilityReport rep = objective_J(shape, u, T, s.problem.material, s.problem.rel_opts);
        const auto grid = default_time_grid(rep, s.cfg.reliability.time_grid);
        write_mesh_text(*shape.mesh, (s.out / "incumbent_mesh.txt").string());
        write_mesh_json(*shape.mesh, (s.out / "incumbent_mesh.json").string());
        if (s.cfg.output.csv) {
            write_scalar_field_csv(T, (s.out / "incumbent_temperature.csv").string());
            write_vector_field_csv(u, (s.out / "incumbent_displacement.csv").string());
        }
        if (s.cfg.output.json) write_report_json(rep, grid, (s.out / "incumbent_report.json").string());
        if (s.cfg.output.gnuplot)
            write_gnuplot_script("trace.csv", "penalized objective", (s.out / "trace.gp").string());

        std::printf("J(baseline)  = %.12g\n", baseline.J);
        std::printf("J(incumbent) = %.12g\n", trace.best_J);
        if (baseline.J > 0.0)
            std::printf("reduction    = %.4g%%\n", 100.0 * (1.0 - trace.best_J / baseline.J));
        std::printf("evaluations  = %d\n", trace.evals);
        std::printf("artifacts written to %s\n", s.out.string().c_str());
    });
}

int cmd_diagnose(const CliOptions& opts) {
    return guarded([&] {
        Session s = open_session(opts);
        const uint64_t seed = opts.seed.value_or(1234);
        const int n_shapes = std::max(1, opts.n_shapes);
        SeededRng rng(seed);

        std::ofstream csv(s.out / "diagnostics.csv");
        csv << "shape,mp_pass,slack,min_T,max_T,min_Te,max_Te,max_abs_T,max_abs_Te,c0_pass,"
               "max_u,holder_T_k0,holder_T_k1,coeff_budget,min_det\n";

        std::printf("%5s %7s %10s %10s %8s %10s %10s %10s %8s\n", "shape", "mp", "slack", "max|T|",
                    "c0", "max|u|", "hold_T0", "hold_T1", "mindet");

        // ambient extrema over the container ball, sampled densely
        double max_abs_te = 0.0;
        {
            const double R = s.problem.design.ext_radius;
            for (int ir = 0; ir <= 40; ++ir)
                for (int it = 0; it < 64; ++it) {
                    const double rho = R * ir / 40.0;
                    const double phi = 2.0 * M_PI * it / 64.0;
                    const Vec3 p{rho * std::cos(phi), rho * std::sin(phi), 0.0};
                    max_abs_te = std::max(max_abs_te,
                                          std::fabs(s.problem.robin.T_ambient(p, Vec3{})));
                }
        }

        bool all_pass = true;
        double envelope_u = 0.0;
        for (int i = 0; i < n_shapes; ++i) {
            DeformationMap map = s.problem.map_template;
            map.theta.assign(map.basis.size(), 0.0);
            if (i > 0) {
                for (double& t : map.theta) t = rng.uniform(-0.3, 0.3);
                AdmissibilityOptions fast;
                fast.det_floor = s.problem.det_floor;
                fast.vol_tol = 1.0;  // volume not constrained for the diagnostic suite
                fast.estimate_norms = false;
                while (!check_admissible(map, *s.problem.baseline_mesh, fast).pass())
                    for (double& t : map.theta) t *= 0.5;
            }

            const Shape shape = make_shape(s.problem.design, map, s.problem.baseline_mesh);
            const ScalarField T = solve_heat(shape, s.problem.robin);
            const TemperatureBoundsReport mp = temperature_bounds_check(T, s.problem.robin);
            const VectorField u = solve_elasticity(shape, s.problem.loads, T, s.problem.material);

            const double max_abs_t = std::max(std::fabs(T.min()), std::fabs(T.max()));
            const bool c0_pass = max_abs_t <= max_abs_te;
            const double h0 = holder_seminorm_estimate(T, 0, 0.5, 2000, seed + i);
            const double h1 = holder_seminorm_estimate(T, 1, 0.5, 2000, seed + i);
            const double max_u = u.max_norm();
            envelope_u = std::max(envelope_u, max_u);

            AdmissibilityOptions fast;
            fast.estimate_norms = false;
            const AdmissibilityReport adm = check_admissible(map, *s.problem.baseline_mesh, fast);

            all_pass = all_pass && mp.pass && c0_pass && std::isfinite(h0) && std::isfinite(h1);

            csv << i << "," << (mp.pass ? 1 : 0) << "," << fmt_full(mp.slack_used) << ","
                << fmt_full(mp.min_T) << "," << fmt_full(mp.max_T) << "," << fmt_full(mp.min_Te)
                << "," << fmt_full(mp.max_Te) << "," << fmt_full(max_abs_t) << ","
                << fmt_full(max_abs_te) << "," << (c0_pass ? 1 : 0) << "," << fmt_full(max_u)
                << "," << fmt_full(h0) << "," << fmt_full(h1) << ","
                << fmt_full(adm.coeff_budget) << "," << fmt_full(adm.min_det) << "\n";

            std::printf("%5d %7s %10.3g %10.6g %8s %10.4g %10.4g %10.4g %8.4f\n", i,
                        mp.pass ? "pass" : "FAIL", mp.slack_used, max_abs_t,
                        c0_pass ? "pass" : "FAIL", max_u, h0, h1, adm.min_det);
        }
        std::printf("displacement envelope: %.6g\n", envelope_u);
        std::printf("%s\n", all_pass ? "all diagnostics passed" : "DIAGNOSTIC FAILURES PRESENT");
        if (!all_pass) throw NumericalError("diagnostic suite reported failures");
    });
}

int cmd_mesh_export(const CliOptions& opts) {
    return guarded([&] {
        Session s = open_session(opts);
        DeformationMap map = s.problem.map_template;
        map.theta.assign(map.basis.size(), 0.0);
        if (!s.cfg.optimizer.initial_theta.empty()) map.theta = s.cfg.optimizer.initial_theta;
        const Shape shape = make_shape(s.problem.design, map, s.problem.baseline_mesh);
        write_mesh_text(*shape.mesh, (s.out / "mesh.txt").string());
        write_mesh_json(*shape.mesh, (s.out / "mesh.json").string());
        std::printf("mesh: %d nodes, %d cells, %zu boundary facets\n", shape.mesh->n_nodes(),
                    shape.mesh->n_cells(), shape.mesh->boundary_facets.size());
        std::printf("artifacts written to %s\n", s.out.string().c_str());
    });
}

}  // namespace thermorel
