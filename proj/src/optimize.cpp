#include "thermorel/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include <json.hpp>

#include "thermorel/rng.hpp"

namespace thermorel {

namespace {
constexpr double kFailurePenalty = 1e30;
}

Problem make_problem(const BaselineDesign& design, const DeformationMap& map_template,
                     std::shared_ptr<const Mesh> baseline_mesh, const MaterialParams& material,
                     RobinData robin, LoadData loads, ReliabilityOptions rel_opts,
                     double det_floor, double vol_tol) {
    Problem p;
    p.design = design;
    p.map_template = map_template;
    p.baseline_mesh = std::move(baseline_mesh);
    p.material = material;
    p.robin = std::move(robin);
    p.loads = std::move(loads);
    p.rel_opts = rel_opts;
    p.det_floor = det_floor;
    p.vol_tol = vol_tol;
    double v = 0.0;
    for (int c = 0; c < p.baseline_mesh->n_cells(); ++c)
        v += std::fabs(p.baseline_mesh->cell_volume(c));
    p.baseline_volume = v;
    return p;
}

EvalResult evaluate_design(const Problem& problem, std::span<const double> theta) {
    EvalResult res;
    DeformationMap map = problem.map_template;
    if (theta.size() != map.basis.size()) {
        res.J = kFailurePenalty;
        res.diag.note = "theta size mismatch";
        return res;
    }
    map.theta.assign(theta.begin(), theta.end());

    AdmissibilityOptions fast;
    fast.det_floor = problem.det_floor;
    fast.vol_tol = problem.vol_tol;
    fast.estimate_norms = false;
    const AdmissibilityReport adm = check_admissible(map, *problem.baseline_mesh, fast);
    res.diag.min_det = adm.min_det;
    res.diag.volume_rel_dev = adm.volume_rel_dev;
    res.diag.coeff_budget = adm.coeff_budget;
    res.diag.volume = problem.baseline_volume * (1.0 + adm.volume_rel_dev);
    res.diag.feasible = adm.pass();

    if (!(adm.min_det > 0.0)) {
        res.J = kFailurePenalty;
        res.diag.note = "map not locally invertible";
        return res;
    }

    try {
        const Shape shape = make_shape(problem.design, map, problem.baseline_mesh);
        res.diag.volume = shape_volume(shape);
        res.diag.volume_rel_dev =
            std::fabs(res.diag.volume - problem.baseline_volume) / problem.baseline_volume;
        const ScalarField T = solve_heat(shape, problem.robin);
        const VectorField u = solve_elasticity(shape, problem.loads, T, problem.material);
        res.report = objective_J(shape, u, T, problem.material, problem.rel_opts);
        res.J = res.report.J;
        res.diag.solver_ok = true;
    } catch (const std::exception& e) {
        res.J = kFailurePenalty;
        res.diag.feasible = false;
        res.diag.note = e.what();
    }
    return res;
}

void OptimizationConfig::validate() const {
    if (!(step > 0.0)) throw ValidationError("OptimizationConfig: step must be > 0");
    if (max_evals < 0) throw ValidationError("OptimizationConfig: max_evals must be >= 0");
    if (!(w_volume >= 0.0 && w_det >= 0.0 && w_norm >= 0.0))
        throw ValidationError("OptimizationConfig: penalty weights must be >= 0");
    if (!(tol_J >= 0.0)) throw ValidationError("OptimizationConfig: tol_J must be >= 0");
    if (restarts < 0) throw ValidationError("OptimizationConfig: restarts must be >= 0");
}

namespace {

struct NmState {
    std::vector<std::vector<double>> simplex;
    std::vector<double> fvals;
    bool initialized = false;
};

struct DriverState {
    int run_index = 0;
    int evals = 0;
    NmState nm;
    std::string rng_state;
    OptimizationTrace trace;
};

using json = nlohmann::json;

json state_to_json(const DriverState& s) {
    json j;
    j["version"] = 1;
    j["run_index"] = s.run_index;
    j["evals"] = s.evals;
    j["rng_state"] = s.rng_state;
    j["nm"] = {{"initialized", s.nm.initialized},
               {"simplex", s.nm.simplex},
               {"fvals", s.nm.fvals}};
    json entries = json::array();
    for (const auto& e : s.trace.entries) {
        entries.push_back({{"eval", e.eval},
                           {"theta", e.theta},
                           {"J", e.J},
                           {"penalized", e.penalized},
                           {"volume_rel_dev", e.volume_rel_dev},
                           {"min_det", e.min_det},
                           {"coeff_budget", e.coeff_budget},
                           {"feasible", e.feasible},
                           {"incumbent_J", e.incumbent_J}});
    }
    j["trace"] = {{"entries", entries},
                  {"best_theta", s.trace.best_theta},
                  {"best_J", s.trace.best_J},
                  {"has_feasible", s.trace.has_feasible},
                  {"evals", s.trace.evals}};
    return j;
}

DriverState state_from_json(const json& j) {
    DriverState s;
    s.run_index = j.at("run_index").get<int>();
    s.evals = j.at("evals").get<int>();
    s.rng_state = j.at("rng_state").get<std::string>();
    s.nm.initialized = j.at("nm").at("initialized").get<bool>();
    s.nm.simplex = j.at("nm").at("simplex").get<std::vector<std::vector<double>>>();
    s.nm.fvals = j.at("nm").at("fvals").get<std::vector<double>>();
    const json& t = j.at("trace");
    for (const auto& e : t.at("entries")) {
        TraceEntry te;
        te.eval = e.at("eval").get<int>();
        te.theta = e.at("theta").get<std::vector<double>>();
        te.J = e.at("J").get<double>();
        te.penalized = e.at("penalized").get<double>();
        te.volume_rel_dev = e.at("volume_rel_dev").get<double>();
        te.min_det = e.at("min_det").get<double>();
        te.coeff_budget = e.at("coeff_budget").get<double>();
        te.feasible = e.at("feasible").get<bool>();
        te.incumbent_J = e.at("incumbent_J").get<double>();
        s.trace.entries.push_back(std::move(te));
    }
    s.trace.best_theta = t.at("best_theta").get<std::vector<double>>();
    s.trace.best_J = t.at("best_J").get<double>();
    s.trace.has_feasible = t.at("has_feasible").get<bool>();
    s.trace.evals = t.at("evals").get<int>();
    return s;
}

double simplex_spread(const NmState& s) {
    const auto [lo, hi] = std::minmax_element(s.fvals.begin(), s.fvals.end());
    return *hi - *lo;
}

/// One reflection/expansion/contraction/shrink step on the simplex.
void nm_iteration(NmState& s, const std::function<double(const std::vector<double>&)>& eval) {
    const int n = static_cast<int>(s.simplex.size()) - 1;

    // order ascending
    std::vector<int> idx(n + 1);
    for (int i = 0; i <= n; ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(), [&](int a, int b) { return s.fvals[a] < s.fvals[b]; });
    std::vector<std::vector<double>> sx(n + 1);
    std::vector<double> sf(n + 1);
    for (int i = 0; i <= n; ++i) {
        sx[i] = s.simplex[idx[i]];
        sf[i] = s.fvals[idx[i]];
    }
    s.simplex = std::move(sx);
    s.fvals = std::move(sf);

    std::vector<double> centroid(n, 0.0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) centroid[j] += s.simplex[i][j] / n;

    auto affine = [&](double t) {
        std::vector<double> p(n);
        for (int j = 0; j < n; ++j) p[j] = centroid[j] + t * (s.simplex[n][j] - centroid[j]);
        return p;
    };

    const std::vector<double> xr = affine(-1.0);
    const double fr = eval(xr);
    if (fr < s.fvals[0]) {
        const std::vector<double> xe = affine(-2.0);
        const double fe = eval(xe);
        if (fe < fr) {
            s.simplex[n] = xe;
            s.fvals[n] = fe;
        } else {
            s.simplex[n] = xr;
            s.fvals[n] = fr;
        }
    } else if (fr < s.fvals[n - 1]) {
        s.simplex[n] = xr;
        s.fvals[n] = fr;
    } else {
        const bool outside = fr < s.fvals[n];
        const std::vector<double> xc = affine(outside ? -0.5 : 0.5);
        const double fc = eval(xc);
        if (fc < std::min(fr, s.fvals[n])) {
            s.simplex[n] = xc;
            s.fvals[n] = fc;
        } else {
            for (int i = 1; i <= n; ++i) {
                for (int j = 0; j < n; ++j)
                    s.simplex[i][j] = s.simplex[0][j] + 0.5 * (s.simplex[i][j] - s.simplex[0][j]);
                s.fvals[i] = eval(s.simplex[i]);
            }
        }
    }
}

}  // namespace

NelderMeadResult nelder_mead_minimize(const std::function<double(std::span<const double>)>& fn,
                                      std::span<const double> x0, double step, int max_evals,
                                      double f_tol) {
    const int n = static_cast<int>(x0.size());
    NmState s;
    int evals = 0;
    auto eval = [&](const std::vector<double>& x) {
        ++evals;
        return fn(x);
    };

    s.simplex.assign(n + 1, std::vector<double>(x0.begin(), x0.end()));
    for (int i = 0; i < n; ++i) s.simplex[i + 1][i] += step;
    s.fvals.resize(n + 1);
    for (int i = 0; i <= n; ++i) s.fvals[i] = eval(s.simplex[i]);

    while (evals < max_evals && simplex_spread(s) > f_tol) nm_iteration(s, eval);

    int best = 0;
    for (int i = 1; i <= n; ++i)
        if (s.fvals[i] < s.fvals[best]) best = i;
    return {s.simplex[best], s.fvals[best], evals};
}

OptimizationTrace optimize_shape(const Problem& problem, const OptimizationConfig& cfg) {
    cfg.validate();
    const int n = static_cast<int>(problem.map_template.basis.size());
    std::vector<double> theta0 = cfg.initial_theta;
    if (theta0.empty()) theta0.assign(n, 0.0);
    if (static_cast<int>(theta0.size()) != n)
        throw ValidationError("optimize_shape: initial theta size does not match the basis");

    // the initial design must be evaluable and feasible
    {
        const EvalResult probe = evaluate_design(problem, theta0);
        if (!probe.diag.solver_ok || !probe.diag.feasible)
            throw ValidationError("optimize_shape: infeasible initial design");
    }

    DriverState st;
    {
        SeededRng rng(cfg.seed);
        st.rng_state = rng.state();
    }

    if (cfg.resume && !cfg.checkpoint_path.empty()) {
        std::ifstream in(cfg.checkpoint_path);
        if (in) {
            json j;
            in >> j;
            st = state_from_json(j);
        }
    }

    auto save_checkpoint = [&]() {
        if (cfg.checkpoint_path.empty()) return;
        std::ofstream out(cfg.checkpoint_path);
        out << state_to_json(st).dump(2) << "\n";
    };

    auto penalized = [&](const EvalResult& r) {
        double p = r.J;
        p += cfg.w_volume * r.diag.volume_rel_dev * r.diag.volume_rel_dev;
        const double det_gap = std::max(0.0, problem.det_floor - r.diag.min_det);
        p += cfg.w_det * det_gap * det_gap;
        const double norm_gap =
            std::max(0.0, r.diag.coeff_budget - problem.map_template.bound_K);
        p += cfg.w_norm * norm_gap * norm_gap;
        return p;
    };

    auto objective = [&](std::span<const double> theta) {
        const EvalResult r = evaluate_design(problem, theta);
        const double p = penalized(r);
        TraceEntry e;
        e.eval = ++st.evals;
        e.theta.assign(theta.begin(), theta.end());
        e.J = r.J;
        e.penalized = p;
        e.volume_rel_dev = r.diag.volume_rel_dev;
        e.min_det = r.diag.min_det;
        e.coeff_budget = r.diag.coeff_budget;
        e.feasible = r.diag.feasible && r.diag.solver_ok;
        if (e.feasible && (!st.trace.has_feasible || r.J < st.trace.best_J)) {
            st.trace.has_feasible = true;
            st.trace.best_J = r.J;
            st.trace.best_theta = e.theta;
        }
        e.incumbent_J = st.trace.has_feasible ? st.trace.best_J
                                              : std::numeric_limits<double>::infinity();
        st.trace.entries.push_back(e);
        st.trace.evals = st.evals;
        return p;
    };

    const int runs = cfg.restarts + 1;
    const int evals_per_run = cfg.max_evals / std::max(1, runs);

    SeededRng rng(cfg.seed);
    rng.restore(st.rng_state);

    while (st.run_index < runs && st.evals < cfg.max_evals) {
        const int run_budget_end = std::min(cfg.max_evals, (st.run_index + 1) * evals_per_run);

        if (!st.nm.initialized) {
            std::vector<double> start = theta0;
            if (st.run_index > 0)
                for (double& t : start) t += rng.uniform(-cfg.step, cfg.step);
            st.rng_state = rng.state();

            st.nm.simplex.assign(n + 1, start);
            for (int i = 0; i < n; ++i) st.nm.simplex[i + 1][i] += cfg.step;
            st.nm.fvals.assign(n + 1, 0.0);
            for (int i = 0; i <= n; ++i) st.nm.fvals[i] = objective(st.nm.simplex[i]);
            st.nm.initialized = true;
            save_checkpoint();
        }

        bool converged = false;
        while (st.evals < run_budget_end && st.evals < cfg.max_evals) {
            if (simplex_spread(st.nm) <= cfg.tol_J) {
                converged = true;
                break;
            }
            nm_iteration(st.nm, objective);
            save_checkpoint();
        }

        if (converged) {
            ++st.run_index;
            if (st.run_index < runs && st.evals < cfg.max_evals) st.nm = NmState{};
            save_checkpoint();
        } else if (st.evals >= cfg.max_evals) {
            // out of global budget: keep the warm simplex so a resume continues it
            save_checkpoint();
            break;
        } else if (st.evals >= run_budget_end) {
            ++st.run_index;
            if (st.run_index < runs) st.nm = NmState{};
            save_checkpoint();
        }
    }

    if (!st.trace.has_feasible) {
        // budget 0: fall back to the (feasible) initial design as incumbent
        const EvalResult base = evaluate_design(problem, theta0);
        st.trace.best_theta = theta0;
        st.trace.best_J = base.J;
        st.trace.has_feasible = base.diag.feasible && base.diag.solver_ok;
    }
    return st.trace;
}

}  // namespace thermorel
