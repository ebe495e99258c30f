#pragma once

#include <limits>
#include <string>
#include <vector>

#include "thermorel/expression.hpp"
#include "thermorel/geometry.hpp"
#include "thermorel/material.hpp"
#include "thermorel/optimize.hpp"

namespace thermorel {

struct GeometryConfig {
    BaselineDesign design;
    double resolution = 0.1;
    int dim = 2;
    double thickness = 0.0;  // 3D slab thickness
    int layers = 0;          // 0: derived from resolution
    int basis_modes = 4;
    double bound_K = 10.0;
    double det_floor = 0.1;
    double vol_tol = 1e-3;
};

struct LoadsConfig {
    std::vector<std::string> f_expr;  // per component; empty = zero load
    std::vector<std::string> g_expr;
    std::string Te_expr;
    std::string eta_expr;
    double traction_bound = std::numeric_limits<double>::infinity();
};

struct ReliabilityConfig {
    std::vector<double> time_grid;  // empty: derived from the solved scale
    bool include_dirichlet_boundary = true;
};

struct SampleConfig {
    double t_max = 0.0;  // 0: derived from the solved scale
    int replications = 10000;
    uint64_t seed = 42;
};

struct OutputConfig {
    std::string directory = "out";
    bool csv = true;
    bool json = true;
    bool gnuplot = false;
};

struct ProblemConfig {
    GeometryConfig geometry;
    MaterialParams material;
    double consistency_rtol = 1e-6;
    LoadsConfig loads;
    ReliabilityConfig reliability;
    OptimizationConfig optimizer;
    SampleConfig sample;
    OutputConfig output;
};

/// Parses and schema-validates a JSON problem file. Unknown keys are rejected
/// and messages carry the offending JSON path. Throws ValidationError.
ProblemConfig load_config(const std::string& path);
ProblemConfig parse_config_text(const std::string& text, const std::string& origin = "<string>");

/// Assembles the immutable evaluation context: baseline mesh, deformation
/// basis, parsed load/ambient expressions.
Problem build_problem(const ProblemConfig& cfg);

}  // namespace thermorel
