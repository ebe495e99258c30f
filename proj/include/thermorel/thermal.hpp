#pragma once

#include <functional>

#include "thermorel/fields.hpp"
#include "thermorel/geometry.hpp"
#include "thermorel/linalg.hpp"
#include "thermorel/material.hpp"

namespace thermorel {

struct AssembledSystem {
    CsrMatrix A;
    std::vector<double> rhs;
};

/// Scalar boundary data evaluated at a quadrature point with its outward
/// normal. Config-driven expressions ignore the normal; manufactured-solution
/// fixtures use it.
using BoundaryFn = std::function<double(const Vec3& x, const Vec3& normal)>;

/// Convective (Robin) data k dT/dn = eta (T_e - T) on the whole boundary.
struct RobinData {
    BoundaryFn eta;        ///< heat transfer coefficient, > 0 on the boundary
    BoundaryFn T_ambient;  ///< ambient temperature field T_e
    double k_cond = 1.0;
};

/// Stiffness + Robin boundary mass matrix and ambient right-hand side.
AssembledSystem assemble_heat_system(const Mesh& mesh, const RobinData& data);

/// P1 solve of Laplace(T) = 0 with the Robin condition on both boundary parts
/// (the Dirichlet tag only affects elasticity). The assembled system is SPD;
/// solved by Jacobi-preconditioned CG to 1e-12, residual verified <= 1e-10.
ScalarField solve_heat(const Shape& shape, const RobinData& data);
ScalarField solve_heat(std::shared_ptr<const Mesh> mesh, const RobinData& data);

struct TemperatureBoundsReport {
    double min_T = 0.0, max_T = 0.0;
    double min_Te = 0.0, max_Te = 0.0;
    double tol = 0.0;
    bool pass = false;
    double slack_used = 0.0;  // worst overshoot beyond the ambient extrema
};

/// Discrete maximum-principle check: min T_e - tol <= T <= max T_e + tol with
/// tol = 1e-3 (max T_e - min T_e) + 1e-12, extrema taken over the boundary
/// quadrature points the solver saw.
TemperatureBoundsReport temperature_bounds_check(const ScalarField& T, const RobinData& data);

}  // namespace thermorel
