#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "thermorel/common.hpp"
#include "thermorel/fields.hpp"
#include "thermorel/mesh.hpp"

namespace thermorel {

/// Disk of radius outer_radius minus the ball B(hole_center, hole_radius),
/// together with the exterior container ball of radius ext_radius that all
/// admissible deformations stay inside.
struct BaselineDesign {
    double outer_radius = 1.0;
    Vec3 hole_center{};
    double hole_radius = 0.3;
    double ext_radius = 1.6;

    double clearance() const {
        return outer_radius - std::hypot(hole_center.x, hole_center.y) - hole_radius;
    }
    void validate() const;
};

/// Smooth vector field entering a deformation basis. `jacobian` may be left
/// empty; a central finite difference is used then. `norm_estimate` caches a
/// C^{4,alpha} norm estimate used by the admissibility coefficient budget.
struct VectorBasisField {
    std::string name;
    std::function<Vec3(const Vec3&)> value;
    std::function<Mat3(const Vec3&)> jacobian;
    double norm_estimate = 0.0;
};

/// Default family: radial direction fields modulated by angular Fourier modes,
/// psi_{2k-1} = eta(rho) cos(k phi) e_rho, psi_{2k} = eta(rho) sin(k phi) e_rho,
/// k = 1..modes, with eta a C-infinity plateau bump vanishing near the hole and
/// near the exterior container. 4 modes give the default 8 coefficients.
std::vector<VectorBasisField> fourier_bump_basis(const BaselineDesign& design, int modes = 4);

/// Pure radial inflation eta(rho) e_rho (the k = 0 cosine mode); changes volume
/// at first order, which the Fourier modes do not.
VectorBasisField uniform_inflation_field(const BaselineDesign& design);

/// Phi(x) = x + sum_j theta_j psi_j(x); identity outside the basis supports.
struct DeformationMap {
    std::vector<VectorBasisField> basis;
    std::vector<double> theta;
    double bound_K = 10.0;
    double ext_radius = 0.0;  // container radius, for the identity-norm budget

    Vec3 apply(const Vec3& x) const;
    Mat3 jacobian(const Vec3& x) const;  // dim-agnostic; identity in unused rows
    double jacobian_det(const Vec3& x, int dim) const;
    Vec3 inverse(const Vec3& y) const;  // Newton; throws NumericalError if singular
    /// ||id|| + sum |theta_j| ||psi_j||, the certified norm budget.
    double coeff_budget() const;
    bool is_identity() const;
};

DeformationMap make_map(const BaselineDesign& design, std::vector<double> theta,
                        double bound_K = 10.0, int modes = 4);

struct Shape {
    BaselineDesign baseline;
    DeformationMap map;
    std::shared_ptr<const Mesh> baseline_mesh;
    std::shared_ptr<const Mesh> mesh;  // deformed
};

/// Meshes the baseline design; inner boundary Dirichlet, outer Robin/Neumann.
Mesh build_baseline(const BaselineDesign& design, double resolution);
/// 3D variant: thin slab extruded from the 2D baseline mesh.
Mesh build_baseline(const BaselineDesign& design, double resolution, double thickness,
                    int layers);

/// Node-wise image mesh; connectivity and boundary tags are preserved.
/// Throws AdmissibilityError when a cell folds (non-positive Jacobian at a
/// quadrature point or inverted image cell).
Mesh apply_deformation(const DeformationMap& map, const Mesh& base);

Shape make_shape(const BaselineDesign& design, const DeformationMap& map, double resolution);
Shape make_shape(const BaselineDesign& design, const DeformationMap& map,
                 std::shared_ptr<const Mesh> baseline_mesh);

/// Volume of the deformed shape: per-cell quadrature of |det grad Phi| with the
/// discrete (node-image) deformation gradient, so the identity map reproduces
/// the baseline cell volumes exactly.
double shape_volume(const Shape& shape);

struct AdmissibilityOptions {
    double det_floor = 0.1;
    double vol_tol = 1e-3;
    bool estimate_norms = true;
    int derivative_order = 4;    ///< FD sup-norm estimates up to this order
    double holder_alpha = 0.5;   ///< exponent for the order-k Holder seminorm
    double fd_step = 0.02;
    int max_samples = 120;
    int holder_pairs = 400;
    uint64_t seed = 20240001;
};

/// Finite-difference derivative estimates of a map: sup-norms per order and the
/// top-order Holder seminorm. `total` is the C^{k,alpha} norm estimate.
struct DerivativeEstimate {
    std::vector<double> sup_by_order;
    double holder_top = 0.0;
    double total = 0.0;
};

struct AdmissibilityReport {
    double min_det = 0.0;
    double volume_rel_dev = 0.0;
    double coeff_budget = 0.0;
    bool norms_estimated = false;
    DerivativeEstimate forward, inverse;
    double bound_K = 0.0, det_floor = 0.0, vol_tol = 0.0;
    bool pass_det = false, pass_volume = false, pass_norm = false;
    bool pass() const { return pass_det && pass_volume && pass_norm; }
};

AdmissibilityReport check_admissible(const DeformationMap& map, const Mesh& base,
                                     const AdmissibilityOptions& opts = {});

/// Holder seminorm estimate of a nodal field over sampled node pairs:
/// max |D^beta f(x) - D^beta f(y)| / |x-y|^alpha over |beta| = k. Supported
/// orders: k = 0 (values) and k = 1 (recovered gradients). Pair sampling mixes
/// uniform pairs with scale-stratified short-range pairs and is deterministic
/// under the seed.
double holder_seminorm_estimate(const ScalarField& f, int k, double alpha, int n_pairs,
                                uint64_t seed);
double holder_seminorm_estimate(const VectorField& f, int k, double alpha, int n_pairs,
                                uint64_t seed);

}  // namespace thermorel
