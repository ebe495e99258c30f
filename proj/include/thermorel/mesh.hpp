#pragma once

#include <array>
#include <memory>
#include <vector>

#include "thermorel/common.hpp"

namespace thermorel {

enum class BoundaryTag { Dirichlet, RobinNeumann };

/// Boundary facet: a segment (dim 2) or triangle (dim 3) owned by one cell.
struct Facet {
    std::array<int, 3> nodes{-1, -1, -1};
    int cell = -1;
    BoundaryTag tag = BoundaryTag::RobinNeumann;
};

struct QuadPoint {
    Vec3 point;
    double weight;  // includes the cell/facet measure; weights sum to it
};

/// Conforming simplicial mesh (triangles or tetrahedra) with tagged boundary.
/// Instances are treated as immutable after construction.
struct Mesh {
    int dim = 2;
    std::vector<Vec3> nodes;
    std::vector<std::array<int, 4>> cells;  // dim+1 entries used per cell
    std::vector<Facet> boundary_facets;

    int nodes_per_cell() const { return dim + 1; }
    int n_nodes() const { return static_cast<int>(nodes.size()); }
    int n_cells() const { return static_cast<int>(cells.size()); }

    double cell_volume(int c) const;  // positive for valid orientation
    /// P1 shape-function gradients for each cell vertex (dim+1 used entries).
    std::array<Vec3, 4> shape_gradients(int c) const;
    Vec3 cell_centroid(int c) const;
    double cell_diameter(int c) const;

    double facet_measure(const Facet& f) const;
    Vec3 facet_normal(const Facet& f) const;  // unit, outward
    Vec3 facet_centroid(const Facet& f) const;

    /// Order-2 rules: 3 mid-edge points on triangles, 4-point rule on tets.
    std::vector<QuadPoint> cell_quadrature(int c) const;
    /// Order-2 rules: 2-point Gauss on segments, 3 mid-edge points on triangles.
    std::vector<QuadPoint> facet_quadrature(const Facet& f) const;

    double total_volume() const;
    double max_cell_diameter() const;
    double boundary_measure(BoundaryTag tag) const;

    /// Checks positive volumes, conformity (interior faces shared by exactly two
    /// cells), and that tagged boundary facets are exactly the one-sided faces
    /// with both boundary parts of positive measure. Throws ValidationError.
    void validate() const;
};

/// Structured body-fitted mesh of the annular region between the outer circle
/// |x| = outer_radius and the (possibly eccentric) hole boundary. The inner
/// boundary is tagged Dirichlet, the outer Robin/Neumann. Maximum cell
/// diameter is at most `resolution`.
Mesh build_annulus_mesh(double outer_radius, const Vec3& hole_center, double hole_radius,
                        double resolution);

/// Extrudes a 2D triangle mesh into a slab of given thickness (prisms split
/// into tetrahedra). Facets on the inner cylinder keep the Dirichlet tag; the
/// outer cylinder and the top/bottom caps are Robin/Neumann.
Mesh extrude_to_3d(const Mesh& base, double thickness, int layers);

}  // namespace thermorel
