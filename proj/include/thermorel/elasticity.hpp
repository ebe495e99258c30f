#pragma once

#include <functional>
#include <limits>

#include "thermorel/fields.hpp"
#include "thermorel/geometry.hpp"
#include "thermorel/linalg.hpp"
#include "thermorel/material.hpp"

namespace thermorel {

using VolumeVecFn = std::function<Vec3(const Vec3& x)>;
using BoundaryVecFn = std::function<Vec3(const Vec3& x, const Vec3& normal)>;

/// Volume force f, surface traction g on the Robin/Neumann part, and optional
/// prescribed Dirichlet values (test mode; zero clamping when absent).
/// Tractions beyond `traction_bound` at any quadrature point are rejected.
struct LoadData {
    VolumeVecFn f;
    BoundaryVecFn g;
    std::function<Vec3(const Vec3&)> dirichlet_values;
    double traction_bound = std::numeric_limits<double>::infinity();
};

/// Constrained linear system after symmetric Dirichlet elimination.
struct ElasticitySystem {
    CsrMatrix A;
    std::vector<double> rhs;
    std::vector<double> bc_values;
    std::vector<char> fixed_dof;
};

ElasticitySystem assemble_elasticity_system(const Shape& shape, const LoadData& loads,
                                            const ScalarField& T, const MaterialParams& p);

/// Thermomechanical linear elasticity: div sigma(u) + f - rho(3l+2m) grad T = 0,
/// u = 0 on the Dirichlet part, sigma(u) n = g + rho(3l+2m)(T - T0) n on the
/// traction part. The two thermal terms are assembled as the single domain
/// integral rho(3l+2m) (T - T0) div(v), which is their integrated-by-parts form.
VectorField solve_elasticity(const Shape& shape, const LoadData& loads, const ScalarField& T,
                             const MaterialParams& p);

/// Per-cell thermoelastic stress lambda div(u) I + mu (grad u + grad u^T)
/// - rho(3l+2m)(T - T0) I with cell-averaged temperature, as full 3x3 tensors
/// (plane-strain out-of-plane entry for 2D meshes).
struct StressField {
    std::shared_ptr<const Mesh> mesh;
    std::vector<Mat3> cell_stress;
};

StressField stress(const Shape& shape, const VectorField& u, const ScalarField& T,
                   const MaterialParams& p);

}  // namespace thermorel
