#include "thermorel/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <tuple>

#include "thermorel/rng.hpp"

namespace thermorel {

void BaselineDesign::validate() const {
    if (!(outer_radius > 0.0)) throw ValidationError("BaselineDesign: outer_radius must be > 0");
    if (!(hole_radius > 0.0)) throw ValidationError("BaselineDesign: hole_radius must be > 0");
    if (!(clearance() > 0.0))
        throw ValidationError("BaselineDesign: hole must keep positive clearance from the boundary");
    if (!(ext_radius > outer_radius))
        throw ValidationError("BaselineDesign: ext_radius must exceed outer_radius");
}

namespace {

struct BumpGeometry {
    Vec3 center;
    RadialBump bump;
};

BumpGeometry support_bump(const BaselineDesign& design) {
    const double D = design.clearance();
    const double offset = std::hypot(design.hole_center.x, design.hole_center.y);
    const double margin = design.ext_radius - design.outer_radius;
    RadialBump bump;
    bump.a = design.hole_radius + 0.2 * D;
    bump.b = design.hole_radius + 0.6 * D;
    bump.c = design.outer_radius + 0.4 * margin - offset;
    bump.d = design.outer_radius + 0.8 * margin - offset;
    if (!(bump.c > bump.b))
        throw ValidationError("fourier_bump_basis: hole offset too large for a plateau bump");
    return {design.hole_center, bump};
}

/// psi = eta(rho) g(phi) e_rho with g = cos(k phi) or sin(k phi).
VectorBasisField angular_field(const BumpGeometry& geo, int k, bool use_cos) {
    const Vec3 center = geo.center;
    const RadialBump bump = geo.bump;
    auto value = [center, bump, k, use_cos](const Vec3& x) -> Vec3 {
        const double u = x.x - center.x, v = x.y - center.y;
        const double rho = std::hypot(u, v);
        if (rho <= bump.a || rho >= bump.d) return {};
        const double eta = bump.value(rho);
        const double phi = std::atan2(v, u);
        const double g = use_cos ? std::cos(k * phi) : std::sin(k * phi);
        return {eta * g * u / rho, eta * g * v / rho, 0.0};
    };
    auto jac = [center, bump, k, use_cos](const Vec3& x) -> Mat3 {
        const double u = x.x - center.x, v = x.y - center.y;
        const double rho = std::hypot(u, v);
        Mat3 J = Mat3::zero();
        if (rho <= bump.a || rho >= bump.d) return J;
        const double cphi = u / rho, sphi = v / rho;
        const double phi = std::atan2(v, u);
        const double g = use_cos ? std::cos(k * phi) : std::sin(k * phi);
        const double gp = use_cos ? -k * std::sin(k * phi) : k * std::cos(k * phi);
        const double eta = bump.value(rho), etap = bump.d1(rho);
        J(0, 0) = etap * g * cphi * cphi + eta / rho * (-gp * sphi * cphi + g * sphi * sphi);
        J(0, 1) = etap * g * sphi * cphi + eta / rho * (gp * cphi * cphi - g * sphi * cphi);
        J(1, 0) = etap * g * cphi * sphi - eta / rho * (gp * sphi * sphi + g * sphi * cphi);
        J(1, 1) = etap * g * sphi * sphi + eta / rho * (gp * sphi * cphi + g * cphi * cphi);
        return J;
    };
    VectorBasisField f;
    f.name = (use_cos ? "cos" : "sin") + std::to_string(k) + "_radial";
    f.value = value;
    f.jacobian = jac;
    return f;
}

/// Nested central differences: D^(b0,b1,b2) f at p, component-wise, step h.
Vec3 fd_partial(const std::function<Vec3(const Vec3&)>& f, const Vec3& p, int b0, int b1, int b2,
                double h) {
    auto binom = [](int n, int k) {
        double r = 1.0;
        for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
        return r;
    };
    Vec3 acc;
    const int order = b0 + b1 + b2;
    for (int i = 0; i <= b0; ++i)
        for (int j = 0; j <= b1; ++j)
            for (int l = 0; l <= b2; ++l) {
                const double coeff = ((i + j + l) % 2 ? -1.0 : 1.0) * binom(b0, i) * binom(b1, j) *
                                     binom(b2, l);
                const Vec3 q{p.x + (b0 / 2.0 - i) * h, p.y + (b1 / 2.0 - j) * h,
                             p.z + (b2 / 2.0 - l) * h};
                acc += f(q) * coeff;
            }
    return acc / std::pow(h, order);
}

std::vector<std::array<int, 3>> multi_indices(int order, int dim) {
    std::vector<std::array<int, 3>> out;
    for (int b0 = 0; b0 <= order; ++b0)
        for (int b1 = 0; b1 <= order - b0; ++b1) {
            const int b2 = order - b0 - b1;
            if (dim == 2 && b2 != 0) continue;
            out.push_back({b0, b1, b2});
        }
    return out;
}

double max_abs(const Vec3& v) {
    return std::max({std::fabs(v.x), std::fabs(v.y), std::fabs(v.z)});
}

/// Sup-norms per derivative order plus the top-order Holder seminorm, sampled.
DerivativeEstimate estimate_derivatives(const std::function<Vec3(const Vec3&)>& f,
                                        const std::vector<Vec3>& samples, int dim, int max_order,
                                        double alpha, double h, int holder_pairs, SeededRng& rng) {
    DerivativeEstimate est;
    est.sup_by_order.assign(max_order + 1, 0.0);

    std::vector<std::vector<Vec3>> top_derivs(samples.size());
    for (size_t s = 0; s < samples.size(); ++s) {
        for (int order = 0; order <= max_order; ++order) {
            for (const auto& b : multi_indices(order, dim)) {
                const Vec3 d = order == 0 ? f(samples[s])
                                          : fd_partial(f, samples[s], b[0], b[1], b[2], h);
                est.sup_by_order[order] = std::max(est.sup_by_order[order], max_abs(d));
                if (order == max_order) top_derivs[s].push_back(d);
            }
        }
    }

    const int n = static_cast<int>(samples.size());
    for (int pair = 0; pair < holder_pairs && n > 1; ++pair) {
        const int i = static_cast<int>(rng.below(n));
        int j = static_cast<int>(rng.below(n));
        if (j == i) j = (j + 1) % n;
        const double dist = (samples[i] - samples[j]).norm();
        if (dist < 1e-12) continue;
        for (size_t b = 0; b < top_derivs[i].size(); ++b) {
            const double diff = max_abs(top_derivs[i][b] - top_derivs[j][b]);
            est.holder_top = std::max(est.holder_top, diff / std::pow(dist, alpha));
        }
    }

    for (double s : est.sup_by_order) est.total += s;
    est.total += est.holder_top;
    return est;
}

std::vector<Vec3> subsample_nodes(const Mesh& mesh, int max_samples) {
    std::vector<Vec3> samples;
    const int n = mesh.n_nodes();
    const int stride = std::max(1, n / max_samples);
    for (int i = 0; i < n; i += stride) samples.push_back(mesh.nodes[i]);
    return samples;
}

}  // namespace

std::vector<VectorBasisField> fourier_bump_basis(const BaselineDesign& design, int modes) {
    design.validate();
    if (modes < 1) throw ValidationError("fourier_bump_basis: modes must be >= 1");
    const BumpGeometry geo = support_bump(design);

    std::vector<VectorBasisField> basis;
    for (int k = 1; k <= modes; ++k) {
        basis.push_back(angular_field(geo, k, true));
        basis.push_back(angular_field(geo, k, false));
    }

    // cache a C^{4,1/2} norm estimate per field over a polar grid of the support
    std::vector<Vec3> samples;
    for (int ir = 0; ir <= 12; ++ir) {
        const double rho = geo.bump.a + (geo.bump.d - geo.bump.a) * ir / 12.0;
        for (int it = 0; it < 16; ++it) {
            const double phi = 2.0 * M_PI * it / 16.0;
            samples.push_back(geo.center + Vec3{rho * std::cos(phi), rho * std::sin(phi), 0.0});
        }
    }
    const double h = 0.02 * (geo.bump.d - geo.bump.a);
    for (auto& f : basis) {
        SeededRng rng(977);
        f.norm_estimate = estimate_derivatives(f.value, samples, 2, 4, 0.5, h, 300, rng).total;
    }
    return basis;
}

VectorBasisField uniform_inflation_field(const BaselineDesign& design) {
    const BumpGeometry geo = support_bump(design);
    VectorBasisField f = angular_field(geo, 0, true);  // cos(0 phi) = 1
    f.name = "inflation_radial";
    std::vector<Vec3> samples;
    for (int ir = 0; ir <= 12; ++ir) {
        const double rho = geo.bump.a + (geo.bump.d - geo.bump.a) * ir / 12.0;
        samples.push_back(geo.center + Vec3{rho, 0.0, 0.0});
    }
    SeededRng rng(977);
    f.norm_estimate =
        estimate_derivatives(f.value, samples, 2, 4, 0.5, 0.02 * (geo.bump.d - geo.bump.a), 100,
                             rng)
            .total;
    return f;
}

Vec3 DeformationMap::apply(const Vec3& x) const {
    Vec3 y = x;
    for (size_t j = 0; j < basis.size(); ++j) {
        if (theta[j] == 0.0) continue;
        y += basis[j].value(x) * theta[j];
    }
    return y;
}

Mat3 DeformationMap::jacobian(const Vec3& x) const {
    Mat3 J = Mat3::identity();
    for (size_t j = 0; j < basis.size(); ++j) {
        if (theta[j] == 0.0) continue;
        Mat3 dpsi;
        if (basis[j].jacobian) {
            dpsi = basis[j].jacobian(x);
        } else {
            const double h = 1e-6;
            for (int col = 0; col < 3; ++col) {
                Vec3 dp;
                dp[col] = h;
                const Vec3 d = (basis[j].value(x + dp) - basis[j].value(x - dp)) / (2.0 * h);
                for (int row = 0; row < 3; ++row) dpsi(row, col) = d[row];
            }
        }
        J += dpsi * theta[j];
    }
    return J;
}

double DeformationMap::jacobian_det(const Vec3& x, int dim) const {
    return jacobian(x).det(dim);
}

Vec3 DeformationMap::inverse(const Vec3& y) const {
    Vec3 x = y;
    for (int it = 0; it < 60; ++it) {
        const Vec3 res = apply(x) - y;
        if (res.norm() < 1e-13) return x;
        const Mat3 J = jacobian(x);
        // solve the 2x2 (upper-left) or full 3x3 system; maps are planar here
        const double det = J.det(2);
        if (std::fabs(det) < 1e-12) throw NumericalError("DeformationMap::inverse: singular Jacobian");
        const double dx = (J(1, 1) * res.x - J(0, 1) * res.y) / det;
        const double dy = (-J(1, 0) * res.x + J(0, 0) * res.y) / det;
        x = Vec3{x.x - dx, x.y - dy, x.z - res.z};
    }
    throw NumericalError("DeformationMap::inverse: Newton did not converge");
}

double DeformationMap::coeff_budget() const {
    double budget = ext_radius + 1.0;  // C^k norm of the identity on the container
    for (size_t j = 0; j < basis.size(); ++j)
        budget += std::fabs(theta[j]) * basis[j].norm_estimate;
    return budget;
}

bool DeformationMap::is_identity() const {
    for (double t : theta)
        if (t != 0.0) return false;
    return true;
}

DeformationMap make_map(const BaselineDesign& design, std::vector<double> theta, double bound_K,
                        int modes) {
    DeformationMap map;
    map.basis = fourier_bump_basis(design, modes);
    if (theta.empty()) theta.assign(map.basis.size(), 0.0);
    if (theta.size() != map.basis.size())
        throw ValidationError("make_map: theta size does not match basis size");
    map.theta = std::move(theta);
    map.bound_K = bound_K;
    map.ext_radius = design.ext_radius;
    return map;
}

Mesh build_baseline(const BaselineDesign& design, double resolution) {
    design.validate();
    return build_annulus_mesh(design.outer_radius, design.hole_center, design.hole_radius,
                              resolution);
}

Mesh build_baseline(const BaselineDesign& design, double resolution, double thickness,
                    int layers) {
    return extrude_to_3d(build_baseline(design, resolution), thickness, layers);
}

Mesh apply_deformation(const DeformationMap& map, const Mesh& base) {
    Mesh out = base;
    if (map.is_identity()) return out;

    for (int i = 0; i < base.n_nodes(); ++i) out.nodes[i] = map.apply(base.nodes[i]);

    for (int c = 0; c < base.n_cells(); ++c) {
        for (const auto& qp : base.cell_quadrature(c))
            if (!(map.jacobian_det(qp.point, base.dim) > 0.0))
                throw AdmissibilityError("apply_deformation: non-positive Jacobian in cell " +
                                         std::to_string(c));
        if (!(out.cell_volume(c) > 0.0))
            throw AdmissibilityError("apply_deformation: inverted image cell " + std::to_string(c));
    }
    return out;
}

Shape make_shape(const BaselineDesign& design, const DeformationMap& map, double resolution) {
    return make_shape(design, map, std::make_shared<const Mesh>(build_baseline(design, resolution)));
}

Shape make_shape(const BaselineDesign& design, const DeformationMap& map,
                 std::shared_ptr<const Mesh> baseline_mesh) {
    Shape s;
    s.baseline = design;
    s.map = map;
    s.baseline_mesh = std::move(baseline_mesh);
    s.mesh = std::make_shared<const Mesh>(apply_deformation(map, *s.baseline_mesh));
    return s;
}

double shape_volume(const Shape& shape) {
    double v = 0.0;
    for (int c = 0; c < shape.mesh->n_cells(); ++c) v += std::fabs(shape.mesh->cell_volume(c));
    return v;
}

AdmissibilityReport check_admissible(const DeformationMap& map, const Mesh& base,
                                     const AdmissibilityOptions& opts) {
    AdmissibilityReport rep;
    rep.bound_K = map.bound_K;
    rep.det_floor = opts.det_floor;
    rep.vol_tol = opts.vol_tol;

    rep.min_det = std::numeric_limits<double>::infinity();
    for (int c = 0; c < base.n_cells(); ++c)
        for (const auto& qp : base.cell_quadrature(c))
            rep.min_det = std::min(rep.min_det, map.jacobian_det(qp.point, base.dim));
    rep.pass_det = rep.min_det >= opts.det_floor;

    double vol_base = 0.0, vol_def = 0.0;
    std::vector<Vec3> deformed(base.nodes.size());
    for (int i = 0; i < base.n_nodes(); ++i) deformed[i] = map.apply(base.nodes[i]);
    for (int c = 0; c < base.n_cells(); ++c) {
        vol_base += std::fabs(base.cell_volume(c));
        const auto& cell = base.cells[c];
        if (base.dim == 2) {
            const Vec3 e1 = deformed[cell[1]] - deformed[cell[0]];
            const Vec3 e2 = deformed[cell[2]] - deformed[cell[0]];
            vol_def += std::fabs(0.5 * (e1.x * e2.y - e1.y * e2.x));
        } else {
            const Vec3 e1 = deformed[cell[1]] - deformed[cell[0]];
            const Vec3 e2 = deformed[cell[2]] - deformed[cell[0]];
            const Vec3 e3 = deformed[cell[3]] - deformed[cell[0]];
            vol_def += std::fabs(e1.cross(e2).dot(e3) / 6.0);
        }
    }
    rep.volume_rel_dev = std::fabs(vol_def - vol_base) / vol_base;
    rep.pass_volume = rep.volume_rel_dev <= opts.vol_tol;

    rep.coeff_budget = map.coeff_budget();
    rep.pass_norm = rep.coeff_budget <= map.bound_K;

    if (opts.estimate_norms) {
        rep.norms_estimated = true;
        const auto samples = subsample_nodes(base, opts.max_samples);
        SeededRng rng(opts.seed);
        auto fwd = [&map](const Vec3& x) { return map.apply(x); };
        rep.forward = estimate_derivatives(fwd, samples, base.dim, opts.derivative_order,
                                           opts.holder_alpha, opts.fd_step, opts.holder_pairs, rng);

        bool inverse_ok = rep.min_det > 0.0;
        if (inverse_ok) {
            std::vector<Vec3> image(samples.size());
            for (size_t i = 0; i < samples.size(); ++i) image[i] = map.apply(samples[i]);
            auto inv = [&map](const Vec3& y) { return map.inverse(y); };
            try {
                rep.inverse = estimate_derivatives(inv, image, base.dim, opts.derivative_order,
                                                   opts.holder_alpha, opts.fd_step,
                                                   opts.holder_pairs, rng);
            } catch (const NumericalError&) {
                inverse_ok = false;
            }
        }
        if (!inverse_ok) {
            rep.inverse.sup_by_order.assign(opts.derivative_order + 1,
                                            std::numeric_limits<double>::infinity());
            rep.inverse.total = std::numeric_limits<double>::infinity();
        }
        rep.pass_norm = rep.pass_norm && rep.forward.total <= map.bound_K &&
                        rep.inverse.total <= map.bound_K;
    }
    return rep;
}

namespace {

/// Uniform grid over node positions for short-range partner lookup.
class NodeGrid {
public:
    NodeGrid(const std::vector<Vec3>& nodes, double spacing) : nodes_(nodes), h_(spacing) {
        for (int i = 0; i < static_cast<int>(nodes.size()); ++i)
            cells_[key(nodes[i])].push_back(i);
    }

    int nearest(const Vec3& p, int exclude) const {
        const auto [ci, cj, ck] = cell_of(p);
        int best = -1;
        double best_d = std::numeric_limits<double>::infinity();
        for (int di = -1; di <= 1; ++di)
            for (int dj = -1; dj <= 1; ++dj)
                for (int dk = -1; dk <= 1; ++dk) {
                    auto it = cells_.find(pack(ci + di, cj + dj, ck + dk));
                    if (it == cells_.end()) continue;
                    for (int idx : it->second) {
                        if (idx == exclude) continue;
                        const double d = (nodes_[idx] - p).norm();
                        if (d < best_d) {
                            best_d = d;
                            best = idx;
                        }
                    }
                }
        return best;
    }

private:
    std::tuple<int, int, int> cell_of(const Vec3& p) const {
        return {static_cast<int>(std::floor(p.x / h_)), static_cast<int>(std::floor(p.y / h_)),
                static_cast<int>(std::floor(p.z / h_))};
    }
    int64_t key(const Vec3& p) const {
        const auto [i, j, k] = cell_of(p);
        return pack(i, j, k);
    }
    static int64_t pack(int i, int j, int k) {
        return (static_cast<int64_t>(i) << 42) ^ (static_cast<int64_t>(j & 0x1fffff) << 21) ^
               (k & 0x1fffff);
    }

    const std::vector<Vec3>& nodes_;
    double h_;
    std::map<int64_t, std::vector<int>> cells_;
};

double holder_estimate_impl(const Mesh& mesh, const std::vector<std::vector<double>>& derivs,
                            double alpha, int n_pairs, uint64_t seed) {
    const int n = mesh.n_nodes();
    if (n < 2 || n_pairs < 1) return 0.0;

    double diam = 0.0;
    Vec3 lo = mesh.nodes[0], hi = mesh.nodes[0];
    for (const auto& p : mesh.nodes) {
        lo = {std::min(lo.x, p.x), std::min(lo.y, p.y), std::min(lo.z, p.z)};
        hi = {std::max(hi.x, p.x), std::max(hi.y, p.y), std::max(hi.z, p.z)};
    }
    diam = (hi - lo).norm();

    // typical node spacing for the short-range sampler
    const double h_min = std::max(1e-9, mesh.max_cell_diameter() * 0.5);
    NodeGrid grid(mesh.nodes, std::max(h_min, diam / 64.0));

    SeededRng rng(seed);
    double best = 0.0;
    for (int pair = 0; pair < n_pairs; ++pair) {
        const int i = static_cast<int>(rng.below(n));
        int j;
        if (pair % 2 == 0) {
            j = static_cast<int>(rng.below(n));
        } else {
            // scale-stratified: aim at a log-uniform distance in a random direction
            const double ell = h_min * std::pow(diam / h_min, rng.uniform());
            const double ang = rng.uniform(0.0, 2.0 * M_PI);
            Vec3 target = mesh.nodes[i] + Vec3{ell * std::cos(ang), ell * std::sin(ang), 0.0};
            if (mesh.dim == 3) target.z = mesh.nodes[i].z + ell * (rng.uniform() - 0.5);
            j = grid.nearest(target, i);
            if (j < 0) j = static_cast<int>(rng.below(n));
        }
        if (j == i) continue;
        const double dist = (mesh.nodes[i] - mesh.nodes[j]).norm();
        if (dist < 1e-12) continue;
        for (const auto& comp : derivs) {
            const double diff = std::fabs(comp[i] - comp[j]);
            best = std::max(best, diff / std::pow(dist, alpha));
        }
    }
    return best;
}

}  // namespace

double holder_seminorm_estimate(const ScalarField& f, int k, double alpha, int n_pairs,
                                uint64_t seed) {
    if (k < 0 || k > 1)
        throw ValidationError("holder_seminorm_estimate: only orders 0 and 1 are recoverable "
                              "from P1 fields");
    std::vector<std::vector<double>> derivs;
    if (k == 0) {
        derivs.push_back(f.values);
    } else {
        const auto g = recovered_nodal_gradients(f);
        for (int c = 0; c < f.mesh->dim; ++c) {
            std::vector<double> comp(g.size());
            for (size_t i = 0; i < g.size(); ++i) comp[i] = g[i][c];
            derivs.push_back(std::move(comp));
        }
    }
    return holder_estimate_impl(*f.mesh, derivs, alpha, n_pairs, seed);
}

double holder_seminorm_estimate(const VectorField& f, int k, double alpha, int n_pairs,
                                uint64_t seed) {
    if (k < 0 || k > 1)
        throw ValidationError("holder_seminorm_estimate: only orders 0 and 1 are recoverable "
                              "from P1 fields");
    const int dim = f.mesh->dim;
    std::vector<std::vector<double>> derivs;
    if (k == 0) {
        for (int c = 0; c < dim; ++c) {
            std::vector<double> comp(f.mesh->n_nodes());
            for (int i = 0; i < f.mesh->n_nodes(); ++i) comp[i] = f.at_node(i)[c];
            derivs.push_back(std::move(comp));
        }
    } else {
        const auto g = recovered_nodal_gradient_tensors(f);
        for (int a = 0; a < dim; ++a)
            for (int b = 0; b < dim; ++b) {
                std::vector<double> comp(g.size());
                for (size_t i = 0; i < g.size(); ++i) comp[i] = g[i](a, b);
                derivs.push_back(std::move(comp));
            }
    }
    return holder_estimate_impl(*f.mesh, derivs, alpha, n_pairs, seed);
}

}  // namespace thermorel
