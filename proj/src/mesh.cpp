#include "thermorel/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

namespace thermorel {

double Mesh::cell_volume(int c) const {
    const auto& cell = cells[c];
    const Vec3& a = nodes[cell[0]];
    if (dim == 2) {
        const Vec3 e1 = nodes[cell[1]] - a, e2 = nodes[cell[2]] - a;
        return 0.5 * (e1.x * e2.y - e1.y * e2.x);
    }
    const Vec3 e1 = nodes[cell[1]] - a, e2 = nodes[cell[2]] - a, e3 = nodes[cell[3]] - a;
    return e1.cross(e2).dot(e3) / 6.0;
}

std::array<Vec3, 4> Mesh::shape_gradients(int c) const {
    const auto& cell = cells[c];
    const Vec3& a = nodes[cell[0]];
    std::array<Vec3, 4> g{};
    if (dim == 2) {
        const Vec3 e1 = nodes[cell[1]] - a, e2 = nodes[cell[2]] - a;
        const double det = e1.x * e2.y - e1.y * e2.x;
        // rows of the inverse edge matrix are the barycentric gradients
        g[1] = Vec3{e2.y, -e2.x, 0.0} / det;
        g[2] = Vec3{-e1.y, e1.x, 0.0} / det;
        g[0] = -(g[1] + g[2]);
        return g;
    }
    const Vec3 e1 = nodes[cell[1]] - a, e2 = nodes[cell[2]] - a, e3 = nodes[cell[3]] - a;
    const double det = e1.cross(e2).dot(e3);
    g[1] = e2.cross(e3) / det;
    g[2] = e3.cross(e1) / det;
    g[3] = e1.cross(e2) / det;
    g[0] = -(g[1] + g[2] + g[3]);
    return g;
}

Vec3 Mesh::cell_centroid(int c) const {
    Vec3 s;
    for (int i = 0; i <= dim; ++i) s += nodes[cells[c][i]];
    return s / (dim + 1.0);
}

double Mesh::cell_diameter(int c) const {
    double d = 0.0;
    for (int i = 0; i <= dim; ++i)
        for (int j = i + 1; j <= dim; ++j)
            d = std::max(d, (nodes[cells[c][i]] - nodes[cells[c][j]]).norm());
    return d;
}

double Mesh::facet_measure(const Facet& f) const {
    if (dim == 2) return (nodes[f.nodes[1]] - nodes[f.nodes[0]]).norm();
    const Vec3 e1 = nodes[f.nodes[1]] - nodes[f.nodes[0]];
    const Vec3 e2 = nodes[f.nodes[2]] - nodes[f.nodes[0]];
    return 0.5 * e1.cross(e2).norm();
}

Vec3 Mesh::facet_normal(const Facet& f) const {
    Vec3 n;
    if (dim == 2) {
        const Vec3 t = nodes[f.nodes[1]] - nodes[f.nodes[0]];
        n = Vec3{t.y, -t.x, 0.0} / t.norm();
    } else {
        const Vec3 e1 = nodes[f.nodes[1]] - nodes[f.nodes[0]];
        const Vec3 e2 = nodes[f.nodes[2]] - nodes[f.nodes[0]];
        n = e1.cross(e2);
        n = n / n.norm();
    }
    // orient away from the owning cell
    const Vec3 away = facet_centroid(f) - cell_centroid(f.cell);
    if (n.dot(away) < 0.0) n = -n;
    return n;
}

Vec3 Mesh::facet_centroid(const Facet& f) const {
    Vec3 s;
    const int k = dim;  // nodes per facet
    for (int i = 0; i < k; ++i) s += nodes[f.nodes[i]];
    return s / static_cast<double>(k);
}

std::vector<QuadPoint> Mesh::cell_quadrature(int c) const {
    const auto& cell = cells[c];
    const double vol = cell_volume(c);
    std::vector<QuadPoint> q;
    if (dim == 2) {
        // mid-edge rule, exact for quadratics
        for (int i = 0; i < 3; ++i) {
            const Vec3 p = (nodes[cell[i]] + nodes[cell[(i + 1) % 3]]) * 0.5;
            q.push_back({p, vol / 3.0});
        }
    } else {
        constexpr double alpha = 0.5854101966249685;
        constexpr double beta = 0.1381966011250105;
        for (int i = 0; i < 4; ++i) {
            Vec3 p;
            for (int j = 0; j < 4; ++j) p += nodes[cell[j]] * (i == j ? alpha : beta);
            q.push_back({p, vol / 4.0});
        }
    }
    return q;
}

std::vector<QuadPoint> Mesh::facet_quadrature(const Facet& f) const {
    const double meas = facet_measure(f);
    std::vector<QuadPoint> q;
    if (dim == 2) {
        const Vec3& a = nodes[f.nodes[0]];
        const Vec3& b = nodes[f.nodes[1]];
        const Vec3 mid = (a + b) * 0.5;
        const Vec3 half = (b - a) * 0.5;
        const double xi = 1.0 / std::sqrt(3.0);
        q.push_back({mid - half * xi, meas / 2.0});
        q.push_back({mid + half * xi, meas / 2.0});
    } else {
        for (int i = 0; i < 3; ++i) {
            const Vec3 p = (nodes[f.nodes[i]] + nodes[f.nodes[(i + 1) % 3]]) * 0.5;
            q.push_back({p, meas / 3.0});
        }
    }
    return q;
}

double Mesh::total_volume() const {
    double v = 0.0;
    for (int c = 0; c < n_cells(); ++c) v += cell_volume(c);
    return v;
}

double Mesh::max_cell_diameter() const {
    double d = 0.0;
    for (int c = 0; c < n_cells(); ++c) d = std::max(d, cell_diameter(c));
    return d;
}

double Mesh::boundary_measure(BoundaryTag tag) const {
    double m = 0.0;
    for (const auto& f : boundary_facets)
        if (f.tag == tag) m += facet_measure(f);
    return m;
}

namespace {
std::array<int, 3> sorted_face(std::array<int, 3> f) {
    std::sort(f.begin(), f.end());
    return f;
}
}  // namespace

void Mesh::validate() const {
    for (int c = 0; c < n_cells(); ++c)
        if (!(cell_volume(c) > 0.0))
            throw ValidationError("Mesh: non-positive volume in cell " + std::to_string(c));

    // collect faces of all cells; a face is a (dim)-subset of cell nodes
    std::map<std::array<int, 3>, int> face_count;
    for (int c = 0; c < n_cells(); ++c) {
        const auto& cell = cells[c];
        if (dim == 2) {
            for (int i = 0; i < 3; ++i)
                ++face_count[sorted_face({cell[i], cell[(i + 1) % 3], -1})];
        } else {
            const int faces[4][3] = {{0, 1, 2}, {0, 1, 3}, {0, 2, 3}, {1, 2, 3}};
            for (const auto& fc : faces)
                ++face_count[sorted_face({cell[fc[0]], cell[fc[1]], cell[fc[2]]})];
        }
    }
    std::set<std::array<int, 3>> one_sided;
    for (const auto& [face, count] : face_count) {
        if (count == 1)
            one_sided.insert(face);
        else if (count != 2)
            throw ValidationError("Mesh: face shared by more than two cells");
    }

    std::set<std::array<int, 3>> tagged;
    for (const auto& f : boundary_facets) {
        std::array<int, 3> key =
            dim == 2 ? sorted_face({f.nodes[0], f.nodes[1], -1})
                     : sorted_face({f.nodes[0], f.nodes[1], f.nodes[2]});
        if (!one_sided.count(key))
            throw ValidationError("Mesh: tagged facet is not a boundary face");
        if (!tagged.insert(key).second) throw ValidationError("Mesh: facet tagged twice");
    }
    if (tagged.size() != one_sided.size())
        throw ValidationError("Mesh: boundary faces without a tag");

    if (!(boundary_measure(BoundaryTag::Dirichlet) > 0.0))
        throw ValidationError("Mesh: Dirichlet boundary has zero measure");
    if (!(boundary_measure(BoundaryTag::RobinNeumann) > 0.0))
        throw ValidationError("Mesh: Robin/Neumann boundary has zero measure");
}

Mesh build_annulus_mesh(double outer_radius, const Vec3& hole_center, double hole_radius,
                        double resolution) {
    if (!(outer_radius > 0.0) || !(hole_radius > 0.0))
        throw ValidationError("build_annulus_mesh: radii must be positive");
    const double offset = std::hypot(hole_center.x, hole_center.y);
    if (!(outer_radius - offset - hole_radius > 0.0))
        throw ValidationError("build_annulus_mesh: hole does not fit inside the disk");
    if (!(resolution > 0.0)) throw ValidationError("build_annulus_mesh: resolution must be > 0");

    // ray from the hole center at angle phi exits the outer circle at distance t(phi)
    auto outer_dist = [&](const Vec3& dir) {
        const double zd = hole_center.x * dir.x + hole_center.y * dir.y;
        return -zd + std::sqrt(outer_radius * outer_radius - offset * offset + zd * zd);
    };

    const double max_thickness = outer_radius + offset - hole_radius;
    const double target = resolution / std::sqrt(2.0);

    int n_theta = std::max<int>(12, static_cast<int>(std::ceil(2.0 * M_PI * outer_radius / target)));
    int n_rad = std::max<int>(2, static_cast<int>(std::ceil(max_thickness / target)));

    for (;;) {
        Mesh m;
        m.dim = 2;
        m.nodes.reserve(static_cast<size_t>(n_rad + 1) * n_theta);
        for (int i = 0; i <= n_rad; ++i) {
            const double s = static_cast<double>(i) / n_rad;
            for (int j = 0; j < n_theta; ++j) {
                const double phi = 2.0 * M_PI * j / n_theta;
                const Vec3 dir{std::cos(phi), std::sin(phi), 0.0};
                const double t = hole_radius + s * (outer_dist(dir) - hole_radius);
                m.nodes.push_back(hole_center + dir * t);
            }
        }
        auto id = [&](int i, int j) { return i * n_theta + (j % n_theta); };
        for (int i = 0; i < n_rad; ++i) {
            for (int j = 0; j < n_theta; ++j) {
                const int a = id(i, j), b = id(i, j + 1), c = id(i + 1, j + 1), d = id(i + 1, j);
                m.cells.push_back({a, c, b, -1});
                m.cells.push_back({a, d, c, -1});
                if (i == 0)
                    m.boundary_facets.push_back(
                        {{a, b, -1}, static_cast<int>(m.cells.size()) - 2, BoundaryTag::Dirichlet});
                if (i == n_rad - 1)
                    m.boundary_facets.push_back({{d, c, -1},
                                                 static_cast<int>(m.cells.size()) - 1,
                                                 BoundaryTag::RobinNeumann});
            }
        }
        if (m.max_cell_diameter() <= resolution) {
            m.validate();
            return m;
        }
        n_theta = static_cast<int>(std::ceil(n_theta * 1.15));
        n_rad = static_cast<int>(std::ceil(n_rad * 1.15));
    }
}

namespace {

// Orientation-preserving prism relabelings placing each vertex first
// (bottom 0,1,2 / top 3,4,5), after Dompierre et al.
constexpr int kPrismPerm[6][6] = {
    {0, 1, 2, 3, 4, 5}, {1, 2, 0, 4, 5, 3}, {2, 0, 1, 5, 3, 4},
    {3, 5, 4, 0, 2, 1}, {4, 3, 5, 1, 0, 2}, {5, 4, 3, 2, 1, 0},
};

}  // namespace

Mesh extrude_to_3d(const Mesh& base, double thickness, int layers) {
    if (base.dim != 2) throw ValidationError("extrude_to_3d: base mesh must be 2D");
    if (!(thickness > 0.0) || layers < 1)
        throw ValidationError("extrude_to_3d: thickness must be > 0 and layers >= 1");

    const int n2d = base.n_nodes();
    Mesh m;
    m.dim = 3;
    const double dz = thickness / layers;
    for (int l = 0; l <= layers; ++l)
        for (int i = 0; i < n2d; ++i)
            m.nodes.push_back({base.nodes[i].x, base.nodes[i].y, l * dz});

    // nodes on the hole boundary of the base mesh (Dirichlet side)
    std::vector<char> inner(n2d, 0);
    for (const auto& f : base.boundary_facets)
        if (f.tag == BoundaryTag::Dirichlet) inner[f.nodes[0]] = inner[f.nodes[1]] = 1;

    for (int l = 0; l < layers; ++l) {
        for (int c = 0; c < base.n_cells(); ++c) {
            const auto& tri = base.cells[c];
            const int v[6] = {tri[0] + l * n2d,       tri[1] + l * n2d,
                              tri[2] + l * n2d,       tri[0] + (l + 1) * n2d,
                              tri[1] + (l + 1) * n2d, tri[2] + (l + 1) * n2d};
            int smallest = 0;
            for (int i = 1; i < 6; ++i)
                if (v[i] < v[smallest]) smallest = i;
            int w[6];
            for (int i = 0; i < 6; ++i) w[i] = v[kPrismPerm[smallest][i]];
            if (std::min(w[1], w[5]) < std::min(w[2], w[4])) {
                m.cells.push_back({w[0], w[1], w[2], w[5]});
                m.cells.push_back({w[0], w[1], w[5], w[4]});
                m.cells.push_back({w[0], w[4], w[5], w[3]});
            } else {
                m.cells.push_back({w[0], w[1], w[2], w[4]});
                m.cells.push_back({w[0], w[4], w[2], w[5]});
                m.cells.push_back({w[0], w[4], w[5], w[3]});
            }
        }
    }

    // boundary facets = faces owned by exactly one tet
    std::map<std::array<int, 3>, std::pair<int, std::array<int, 3>>> once;
    std::set<std::array<int, 3>> twice;
    for (int c = 0; c < m.n_cells(); ++c) {
        const auto& cell = m.cells[c];
        const int faces[4][3] = {{0, 1, 2}, {0, 1, 3}, {0, 2, 3}, {1, 2, 3}};
        for (const auto& fc : faces) {
            std::array<int, 3> raw{cell[fc[0]], cell[fc[1]], cell[fc[2]]};
            std::array<int, 3> key = raw;
            std::sort(key.begin(), key.end());
            if (twice.count(key)) throw ValidationError("extrude_to_3d: non-conforming split");
            auto it = once.find(key);
            if (it == once.end())
                once[key] = {c, raw};
            else {
                once.erase(it);
                twice.insert(key);
            }
        }
    }
    for (const auto& [key, owner] : once) {
        Facet f;
        f.nodes = owner.second;
        f.cell = owner.first;
        const bool is_inner = inner[key[0] % n2d] && inner[key[1] % n2d] && inner[key[2] % n2d] &&
                              // exclude cap faces whose nodes all sit in one layer circle
                              !(key[0] / n2d == key[1] / n2d && key[1] / n2d == key[2] / n2d);
        f.tag = is_inner ? BoundaryTag::Dirichlet : BoundaryTag::RobinNeumann;
        m.boundary_facets.push_back(f);
    }
    m.validate();
    return m;
}

}  // namespace thermorel
