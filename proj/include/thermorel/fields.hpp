#pragma once

#include <memory>
#include <vector>

#include "thermorel/common.hpp"
#include "thermorel/mesh.hpp"

namespace thermorel {

/// Nodal P1 scalar field (temperature and friends).
struct ScalarField {
    std::shared_ptr<const Mesh> mesh;
    std::vector<double> values;  // one per node

    double min() const;
    double max() const;
};

/// Nodal P1 vector field (displacement); dim components per node, node-major.
struct VectorField {
    std::shared_ptr<const Mesh> mesh;
    std::vector<double> values;

    Vec3 at_node(int i) const {
        const int d = mesh->dim;
        return {values[i * d], values[i * d + 1], d == 3 ? values[i * d + 2] : 0.0};
    }
    double max_norm() const;
};

/// Piecewise-constant P1 gradient per cell.
std::vector<Vec3> cell_gradients(const ScalarField& f);

/// Volume-weighted average of adjacent cell gradients at each node.
std::vector<Vec3> recovered_nodal_gradients(const ScalarField& f);

/// Per-cell displacement gradient, (i,j) = d u_i / d x_j.
std::vector<Mat3> cell_gradient_tensors(const VectorField& u);
std::vector<Mat3> recovered_nodal_gradient_tensors(const VectorField& u);

/// P1 interpolation weights of a point on a boundary facet (barycentric).
std::array<double, 3> facet_weights(const Mesh& mesh, const Facet& f, const Vec3& p);

}  // namespace thermorel
