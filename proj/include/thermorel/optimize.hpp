#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "thermorel/elasticity.hpp"
#include "thermorel/geometry.hpp"
#include "thermorel/reliability.hpp"
#include "thermorel/thermal.hpp"

namespace thermorel {

/// Everything needed to evaluate one design: fixed baseline mesh, deformation
/// basis, material and load models. Immutable during an optimization run.
struct Problem {
    BaselineDesign design;
    DeformationMap map_template;  ///< basis + bound; theta supplied per evaluation
    std::shared_ptr<const Mesh> baseline_mesh;
    MaterialParams material;
    RobinData robin;
    LoadData loads;
    ReliabilityOptions rel_opts;
    double det_floor = 0.1;
    double vol_tol = 1e-3;
    double baseline_volume = 0.0;
};

Problem make_problem(const BaselineDesign& design, const DeformationMap& map_template,
                     std::shared_ptr<const Mesh> baseline_mesh, const MaterialParams& material,
                     RobinData robin, LoadData loads, ReliabilityOptions rel_opts = {},
                     double det_floor = 0.1, double vol_tol = 1e-3);

struct EvalDiagnostics {
    double volume = 0.0;
    double volume_rel_dev = 0.0;
    double min_det = 0.0;
    double coeff_budget = 0.0;
    bool feasible = false;   ///< det floor, norm budget and volume tolerance all met
    bool solver_ok = false;  ///< pipeline ran to completion
    std::string note;
};

struct EvalResult {
    double J = 0.0;  ///< large finite sentinel when the pipeline fails
    ReliabilityReport report;
    EvalDiagnostics diag;
};

/// Full pipeline deform -> heat -> elasticity -> objective. Deterministic; an
/// inadmissible theta yields a large finite J with the infeasible flag set and
/// never an exception.
EvalResult evaluate_design(const Problem& problem, std::span<const double> theta);

struct OptimizationConfig {
    std::vector<double> initial_theta;
    double step = 0.05;       ///< initial simplex scale
    int max_evals = 300;      ///< total budget across restarts
    double w_volume = 1e4;
    double w_det = 1e3;
    double w_norm = 1e3;
    double tol_J = 1e-10;     ///< simplex function-value spread tolerance
    uint64_t seed = 1;
    int restarts = 3;         ///< random restarts from perturbed baselines
    std::string checkpoint_path;  ///< written per iteration when non-empty
    bool resume = false;          ///< continue from checkpoint_path if present

    void validate() const;
};

struct TraceEntry {
    int eval = 0;
    std::vector<double> theta;
    double J = 0.0;
    double penalized = 0.0;
    double volume_rel_dev = 0.0;
    double min_det = 0.0;
    double coeff_budget = 0.0;
    bool feasible = false;
    double incumbent_J = 0.0;  ///< best feasible J so far (sentinel before first)
};

struct OptimizationTrace {
    std::vector<TraceEntry> entries;
    std::vector<double> best_theta;
    double best_J = 0.0;
    bool has_feasible = false;
    int evals = 0;
};

/// Nelder-Mead on the penalized objective
/// J + w_V (dV/V)^2 + w_det max(0, floor - min det)^2 + w_K max(0, budget - K)^2
/// with deterministic restarts; the best feasible design is the incumbent.
OptimizationTrace optimize_shape(const Problem& problem, const OptimizationConfig& cfg);

struct NelderMeadResult {
    std::vector<double> x;
    double f = 0.0;
    int evals = 0;
};

/// Plain Nelder-Mead minimizer (used standalone and by the shape driver).
NelderMeadResult nelder_mead_minimize(const std::function<double(std::span<const double>)>& fn,
                                      std::span<const double> x0, double step, int max_evals,
                                      double f_tol);

}  // namespace thermorel
