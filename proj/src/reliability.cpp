#include "thermorel/reliability.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "thermorel/rng.hpp"

namespace thermorel {

namespace {

ReliabilityReport integrate_life(const Shape& shape, const LifeFn& life_at, double m,
                                 const ReliabilityOptions& opts) {
    const Mesh& mesh = *shape.mesh;
    ReliabilityReport rep;
    rep.m = m;

    for (int fi = 0; fi < static_cast<int>(mesh.boundary_facets.size()); ++fi) {
        const Facet& f = mesh.boundary_facets[fi];
        if (!opts.include_dirichlet_boundary && f.tag == BoundaryTag::Dirichlet) continue;
        for (const auto& qp : mesh.facet_quadrature(f)) {
            BoundaryLifeSample s;
            s.facet = fi;
            s.point = qp.point;
            s.weight = qp.weight;
            s.n_sur = life_at(qp.point);
            rep.J += qp.weight * s.n_sur.inv_pow(m);
            rep.samples.push_back(std::move(s));
        }
    }
    rep.N_scale = rep.J > 0.0 ? Life::finite(std::pow(rep.J, -1.0 / m)) : Life::infinite();
    return rep;
}

}  // namespace

ReliabilityReport objective_J(const Shape& shape, const VectorField& u, const ScalarField& T,
                              const MaterialParams& p, const ReliabilityOptions& opts) {
    const Mesh& mesh = *shape.mesh;
    if (u.mesh.get() != shape.mesh.get() || T.mesh.get() != shape.mesh.get())
        throw ValidationError("objective_J: fields not solved on the shape's mesh");
    if (static_cast<int>(T.values.size()) != mesh.n_nodes() ||
        static_cast<int>(u.values.size()) != mesh.n_nodes() * mesh.dim)
        throw ValidationError("objective_J: field sizes do not match the mesh");

    const auto nodal_grad = recovered_nodal_gradient_tensors(u);

    // per-facet interpolation of nodal data to quadrature points
    const int dim = mesh.dim;
    auto life_at_facet = [&](const Facet& f, const Vec3& x) {
        const auto w = facet_weights(mesh, f, x);
        Mat3 g;
        double t = 0.0;
        for (int i = 0; i < dim; ++i) {
            g += nodal_grad[f.nodes[i]] * w[i];
            t += T.values[f.nodes[i]] * w[i];
        }
        return nsur_pointwise(g, dim, t, p);
    };

    ReliabilityReport rep;
    rep.m = p.m_weib;
    for (int fi = 0; fi < static_cast<int>(mesh.boundary_facets.size()); ++fi) {
        const Facet& f = mesh.boundary_facets[fi];
        if (!opts.include_dirichlet_boundary && f.tag == BoundaryTag::Dirichlet) continue;
        for (const auto& qp : mesh.facet_quadrature(f)) {
            BoundaryLifeSample s;
            s.facet = fi;
            s.point = qp.point;
            s.weight = qp.weight;
            s.n_sur = life_at_facet(f, qp.point);
            rep.J += qp.weight * s.n_sur.inv_pow(rep.m);
            rep.samples.push_back(std::move(s));
        }
    }
    rep.N_scale = rep.J > 0.0 ? Life::finite(std::pow(rep.J, -1.0 / rep.m)) : Life::infinite();
    return rep;
}

ReliabilityReport objective_from_life(const Shape& shape, const LifeFn& life, double m,
                                      const ReliabilityOptions& opts) {
    if (!(m > 0.0)) throw ValidationError("objective_from_life: m must be > 0");
    return integrate_life(shape, life, m, opts);
}

double failure_cdf(double t, const ReliabilityReport& report) {
    if (t < 0.0) throw ValidationError("failure_cdf: t must be >= 0");
    if (report.N_scale.is_infinite()) return 0.0;
    const double z = std::pow(t / report.N_scale.cycles(), report.m);
    return -std::expm1(-z);
}

double hazard_rate(double t, const ReliabilityReport& report) {
    if (t < 0.0 || (t == 0.0 && report.m < 1.0))
        throw ValidationError("hazard_rate: t must be > 0 (t = 0 allowed when m >= 1)");
    if (report.N_scale.is_infinite()) return 0.0;
    const double n = report.N_scale.cycles();
    return report.m / n * std::pow(t / n, report.m - 1.0);
}

double gamma_function(double x) {
    if (!(x > 0.0)) throw ValidationError("gamma_function: requires x > 0");
    // Lanczos approximation, g = 7, 9 coefficients
    static const double coeff[9] = {
        0.99999999999980993,  676.5203681218851,   -1259.1392167224028,
        771.32342877765313,   -176.61502916214059, 12.507343278686905,
        -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7};
    if (x < 0.5)  // reflection, not reached for 1 + 1/m but kept for completeness
        return M_PI / (std::sin(M_PI * x) * gamma_function(1.0 - x));
    const double z = x - 1.0;
    double a = coeff[0];
    for (int i = 1; i < 9; ++i) a += coeff[i] / (z + i);
    const double t = z + 7.5;
    return std::sqrt(2.0 * M_PI) * std::pow(t, z + 0.5) * std::exp(-t) * a;
}

double mean_life(const ReliabilityReport& report) {
    if (report.N_scale.is_infinite())
        throw ValidationError("mean_life: scale is the no-failure value");
    return report.N_scale.cycles() * gamma_function(1.0 + 1.0 / report.m);
}

namespace {
int sign_of(double a, double b) {
    if (a < b) return +1;  // smaller CDF/hazard means more reliable
    if (a > b) return -1;
    return 0;
}
}  // namespace

DominanceVerdict dominance_compare(const ReliabilityReport& r1, const ReliabilityReport& r2,
                                   std::span<const double> times) {
    if (r1.m != r2.m) throw ValidationError("dominance_compare: reports must share the shape m");
    DominanceVerdict v;
    v.shape_below_one = r1.m < 1.0;

    for (double t : times) v.fixed_time.push_back(sign_of(failure_cdf(t, r1), failure_cdf(t, r2)));

    // Weibull closed form: every sense reduces to the scale ordering
    auto scale_of = [](const ReliabilityReport& r) {
        return r.N_scale.is_infinite() ? std::numeric_limits<double>::infinity()
                                       : r.N_scale.cycles();
    };
    const double n1 = scale_of(r1), n2 = scale_of(r2);
    const int n_order = n1 > n2 ? +1 : (n1 < n2 ? -1 : 0);
    v.first_stochastic_order = n_order;
    v.instantaneous_hazard = n_order;

    v.consistent = true;
    for (int ft : v.fixed_time)
        if (ft != 0 && ft != n_order) v.consistent = false;
    return v;
}

CrackEventSet sample_crack_process(const ReliabilityReport& report, double t_max, uint64_t seed) {
    if (!(t_max > 0.0)) throw ValidationError("sample_crack_process: t_max must be > 0");
    CrackEventSet out;
    out.t_max = t_max;

    const double cumulative_hazard = std::pow(t_max, report.m) * report.J;
    SeededRng rng(seed);
    const int count = sample_poisson(rng, cumulative_hazard);
    if (count == 0) return out;

    std::vector<double> weights;
    weights.reserve(report.samples.size());
    for (const auto& s : report.samples) weights.push_back(s.weight * s.n_sur.inv_pow(report.m));
    const DiscreteSampler location(weights);

    out.events.reserve(count);
    for (int k = 0; k < count; ++k) {
        CrackEvent ev;
        // time density m t^(m-1)/t_max^m on [0, t_max]: inverse-CDF of a uniform
        ev.time = t_max * std::pow(rng.uniform(), 1.0 / report.m);
        const int idx = location.draw(rng);
        ev.location = report.samples[idx].point;
        ev.facet = report.samples[idx].facet;
        out.events.push_back(ev);
    }
    double first = out.events[0].time;
    for (const auto& ev : out.events) first = std::min(first, ev.time);
    out.tau = first;
    return out;
}

CrackEventSet sample_crack_process(const Shape& shape, const VectorField& u, const ScalarField& T,
                                   const MaterialParams& p, double t_max, uint64_t seed,
                                   const ReliabilityOptions& opts) {
    return sample_crack_process(objective_J(shape, u, T, p, opts), t_max, seed);
}

}  // namespace thermorel
