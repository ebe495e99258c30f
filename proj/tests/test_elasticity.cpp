#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "support.hpp"
#include "thermorel/elasticity.hpp"
#include "thermorel/rng.hpp"
#include "thermorel/thermal.hpp"

using namespace thermorel;
using test_support::steel;
using test_support::unit_annulus;

namespace {

Shape identity_shape(double resolution) {
    const BaselineDesign d = unit_annulus();
    return make_shape(d, make_map(d, {}), resolution);
}

ScalarField constant_field(const Shape& shape, double value) {
    return {shape.mesh, std::vector<double>(shape.mesh->n_nodes(), value)};
}

MaterialParams unit_material() {
    MaterialParams p = steel();
    p.lambda = 1.0;
    p.mu = 1.0;
    p.E = p.mu * (3.0 * p.lambda + 2.0 * p.mu) / (p.lambda + p.mu);
    p.K_hard = 1.0;
    p.sigma_f = 1.0;
    return p;
}

/// Manufactured displacement u* = amp (sin(pi x) sin(pi y) B(r), 0) with a
/// smooth radial cutoff vanishing near the hole, plus an affine temperature.
/// All derivatives are analytic; a finite-difference subtest guards them.
struct Manufactured {
    double amp = 1e-3;
    double r0 = 0.32, w = 0.40;  // cutoff rises on [r0, r0 + w]
    double beta = 50.0;          // T* = T0 + beta x
    MaterialParams p = steel();

    double B(double r) const { return SmoothStep::value((r - r0) / w); }
    double B1(double r) const { return SmoothStep::d1((r - r0) / w) / w; }
    double B2(double r) const { return SmoothStep::d2((r - r0) / w) / (w * w); }

    struct Derivs {
        double w0, wx, wy, wxx, wyy, wxy;
    };
    Derivs omega(const Vec3& v) const {
        const double x = v.x, y = v.y;
        const double r = std::hypot(x, y);
        const double A = std::sin(M_PI * x) * std::sin(M_PI * y);
        const double Ax = M_PI * std::cos(M_PI * x) * std::sin(M_PI * y);
        const double Ay = M_PI * std::sin(M_PI * x) * std::cos(M_PI * y);
        const double Axx = -M_PI * M_PI * A;
        const double Ayy = -M_PI * M_PI * A;
        const double Axy = M_PI * M_PI * std::cos(M_PI * x) * std::cos(M_PI * y);
        const double b = B(r), b1 = B1(r), b2 = B2(r);
        const double bx = b1 * x / r, by = b1 * y / r;
        const double bxx = b2 * x * x / (r * r) + b1 * y * y / (r * r * r);
        const double byy = b2 * y * y / (r * r) + b1 * x * x / (r * r * r);
        const double bxy = b2 * x * y / (r * r) - b1 * x * y / (r * r * r);
        Derivs d;
        d.w0 = amp * A * b;
        d.wx = amp * (Ax * b + A * bx);
        d.wy = amp * (Ay * b + A * by);
        d.wxx = amp * (Axx * b + 2.0 * Ax * bx + A * bxx);
        d.wyy = amp * (Ayy * b + 2.0 * Ay * by + A * byy);
        d.wxy = amp * (Axy * b + Ax * by + Ay * bx + A * bxy);
        return d;
    }

    Vec3 u_star(const Vec3& x) const { return {omega(x).w0, 0.0, 0.0}; }
    double T_star(const Vec3& x) const { return p.T0 + beta * x.x; }

    Vec3 force(const Vec3& x) const {
        const Derivs d = omega(x);
        const double c = p.thermal_stress_coeff();
        return {-((p.lambda + 2.0 * p.mu) * d.wxx + p.mu * d.wyy) + c * beta,
                -((p.lambda + p.mu) * d.wxy), 0.0};
    }

    Vec3 traction(const Vec3& x, const Vec3& n) const {
        const Derivs d = omega(x);
        const double c = p.thermal_stress_coeff();
        const double dT = T_star(x) - p.T0;
        const double s11 = (p.lambda + 2.0 * p.mu) * d.wx - c * dT;
        const double s22 = p.lambda * d.wx - c * dT;
        const double s12 = p.mu * d.wy;
        return {s11 * n.x + s12 * n.y, s12 * n.x + s22 * n.y, 0.0};
    }
};

}  // namespace

TEST_CASE("zero loads and reference temperature give zero displacement") {
    const Shape shape = identity_shape(0.1);
    const MaterialParams p = steel();
    const ScalarField T = constant_field(shape, p.T0);
    const VectorField u = solve_elasticity(shape, {}, T, p);
    CHECK(u.max_norm() <= 1e-10);
}

TEST_CASE("manufactured derivatives agree with finite differences") {
    Manufactured mms;
    const double h = 1e-6;
    for (const Vec3 x : {Vec3{0.7, 0.2, 0.0}, Vec3{0.45, -0.31, 0.0}, Vec3{-0.5, 0.62, 0.0}}) {
        const auto d = mms.omega(x);
        auto w_at = [&](double dx, double dy) { return mms.omega({x.x + dx, x.y + dy, 0.0}).w0; };
        CHECK(d.wx == doctest::Approx((w_at(h, 0) - w_at(-h, 0)) / (2 * h)).epsilon(1e-5));
        CHECK(d.wy == doctest::Approx((w_at(0, h) - w_at(0, -h)) / (2 * h)).epsilon(1e-5));
        CHECK(d.wxx ==
              doctest::Approx((w_at(h, 0) - 2 * w_at(0, 0) + w_at(-h, 0)) / (h * h)).epsilon(1e-3));
        CHECK(d.wyy ==
              doctest::Approx((w_at(0, h) - 2 * w_at(0, 0) + w_at(0, -h)) / (h * h)).epsilon(1e-3));
        CHECK(d.wxy == doctest::Approx((w_at(h, h) - w_at(h, -h) - w_at(-h, h) + w_at(-h, -h)) /
                                       (4 * h * h))
                           .epsilon(1e-3));
    }
}

TEST_CASE("manufactured solution converges: L2 order 2, H1 order 1") {
    Manufactured mms;
    LoadData loads;
    loads.f = [&mms](const Vec3& x) { return mms.force(x); };
    loads.g = [&mms](const Vec3& x, const Vec3& n) { return mms.traction(x, n); };

    std::vector<double> l2, h1;
    for (double res : {0.16, 0.08, 0.04}) {
        const Shape shape = identity_shape(res);
        ScalarField T{shape.mesh, {}};
        T.values.resize(shape.mesh->n_nodes());
        for (int i = 0; i < shape.mesh->n_nodes(); ++i)
            T.values[i] = mms.T_star(shape.mesh->nodes[i]);

        const VectorField u = solve_elasticity(shape, loads, T, mms.p);

        double e_l2 = 0.0, e_h1 = 0.0;
        const auto grads_u = cell_gradient_tensors(u);
        for (int c = 0; c < shape.mesh->n_cells(); ++c) {
            const auto& cell = shape.mesh->cells[c];
            const auto sg = shape.mesh->shape_gradients(c);
            const Vec3 x0 = shape.mesh->nodes[cell[0]];
            for (const auto& qp : shape.mesh->cell_quadrature(c)) {
                std::array<double, 3> wgt{1.0, 0.0, 0.0};
                for (int i = 1; i <= 2; ++i) {
                    wgt[i] = sg[i].dot(qp.point - x0);
                    wgt[0] -= wgt[i];
                }
                Vec3 uh;
                for (int i = 0; i <= 2; ++i) uh += u.at_node(cell[i]) * wgt[i];
                const Vec3 diff = uh - mms.u_star(qp.point);
                e_l2 += qp.weight * diff.dot(diff);

                const auto d = mms.omega(qp.point);
                const Mat3& gh = grads_u[c];
                const double gx = gh(0, 0) - d.wx, gy = gh(0, 1) - d.wy;
                const double g2x = gh(1, 0), g2y = gh(1, 1);
                e_h1 += qp.weight * (gx * gx + gy * gy + g2x * g2x + g2y * g2y);
            }
        }
        l2.push_back(std::sqrt(e_l2));
        h1.push_back(std::sqrt(e_h1));
    }
    const double l2_order1 = std::log2(l2[0] / l2[1]);
    const double l2_order2 = std::log2(l2[1] / l2[2]);
    const double h1_order = std::log2(h1[1] / h1[2]);
    CAPTURE(l2[0]);
    CAPTURE(l2[1]);
    CAPTURE(l2[2]);
    CHECK(l2_order1 >= 1.8);
    CHECK(l2_order2 >= 1.8);
    CHECK(h1_order >= 0.8);
}

TEST_CASE("patch test: affine displacement reproduced to 1e-9") {
    const Shape shape = identity_shape(0.1);
    const MaterialParams p = unit_material();
    Mat3 A = Mat3::zero();
    A(0, 0) = 1e-3;
    A(0, 1) = 4e-4;
    A(1, 0) = -2e-4;
    A(1, 1) = 6e-4;

    const Mat3 strain = A.sym();
    Mat3 sigma = strain * (2.0 * p.mu);
    const double tr = strain(0, 0) + strain(1, 1);
    sigma(0, 0) += p.lambda * tr;
    sigma(1, 1) += p.lambda * tr;

    LoadData loads;
    loads.g = [sigma](const Vec3&, const Vec3& n) { return sigma.mul(n); };
    loads.dirichlet_values = [A](const Vec3& x) { return A.mul(x); };

    const ScalarField T = constant_field(shape, p.T0);
    const VectorField u = solve_elasticity(shape, loads, T, p);
    for (int i = 0; i < shape.mesh->n_nodes(); ++i) {
        const Vec3 expect = A.mul(shape.mesh->nodes[i]);
        CHECK((u.at_node(i) - expect).norm() <= 1e-9);
    }
}

TEST_CASE("rigid rotation produces no stress") {
    const Shape shape = identity_shape(0.1);
    const MaterialParams p = unit_material();
    Mat3 W = Mat3::zero();
    W(0, 1) = 1e-3;
    W(1, 0) = -1e-3;

    LoadData loads;
    loads.dirichlet_values = [W](const Vec3& x) { return W.mul(x); };
    const ScalarField T = constant_field(shape, p.T0);
    const VectorField u = solve_elasticity(shape, loads, T, p);
    const StressField s = stress(shape, u, T, p);
    for (const Mat3& sig : s.cell_stress) CHECK(sig.frobenius() <= 1e-12);
}

TEST_CASE("stress formula reductions") {
    const Shape shape = identity_shape(0.15);
    const MaterialParams p = steel();

    SUBCASE("pure thermal: sigma = -rho(3l+2m) dT I") {
        const double dT = 40.0;
        const ScalarField T = constant_field(shape, p.T0 + dT);
        VectorField u{shape.mesh, std::vector<double>(shape.mesh->n_nodes() * 2, 0.0)};
        const StressField s = stress(shape, u, T, p);
        const double expect = -p.thermal_stress_coeff() * dT;
        for (const Mat3& sig : s.cell_stress) {
            CHECK(sig(0, 0) == doctest::Approx(expect));
            CHECK(sig(1, 1) == doctest::Approx(expect));
            CHECK(sig(2, 2) == doctest::Approx(expect));
            CHECK(sig(0, 1) == doctest::Approx(0.0));
        }
    }

    SUBCASE("constant displacement: zero stress") {
        const ScalarField T = constant_field(shape, p.T0);
        VectorField u{shape.mesh, {}};
        u.values.assign(shape.mesh->n_nodes() * 2, 0.0);
        for (int i = 0; i < shape.mesh->n_nodes(); ++i) {
            u.values[2 * i] = 1e-3;
            u.values[2 * i + 1] = -2e-3;
        }
        const StressField s = stress(shape, u, T, p);
        for (const Mat3& sig : s.cell_stress) CHECK(sig.frobenius() <= 1e-12 * p.mu);
    }

    SUBCASE("affine displacement matches the hand-evaluated tensor") {
        Mat3 A = Mat3::zero();
        A(0, 0) = 2e-4;
        A(0, 1) = -1e-4;
        A(1, 0) = 3e-4;
        A(1, 1) = 5e-4;
        const ScalarField T = constant_field(shape, p.T0);
        VectorField u{shape.mesh, {}};
        u.values.resize(shape.mesh->n_nodes() * 2);
        for (int i = 0; i < shape.mesh->n_nodes(); ++i) {
            const Vec3 v = A.mul(shape.mesh->nodes[i]);
            u.values[2 * i] = v.x;
            u.values[2 * i + 1] = v.y;
        }
        const Mat3 strain = A.sym();
        const double tr = strain(0, 0) + strain(1, 1);
        const StressField s = stress(shape, u, T, p);
        for (const Mat3& sig : s.cell_stress) {
            CHECK(sig(0, 0) ==
                  doctest::Approx(p.lambda * tr + 2.0 * p.mu * strain(0, 0)).epsilon(1e-9));
            CHECK(sig(1, 1) ==
                  doctest::Approx(p.lambda * tr + 2.0 * p.mu * strain(1, 1)).epsilon(1e-9));
            CHECK(sig(0, 1) == doctest::Approx(2.0 * p.mu * strain(0, 1)).epsilon(1e-9));
        }
    }
}

TEST_CASE("linearity in loads and thermal offset jointly") {
    const Shape shape = identity_shape(0.12);
    const MaterialParams p = unit_material();

    LoadData l1;
    l1.f = [](const Vec3& x) { return Vec3{0.1 * x.y, 0.2, 0.0}; };
    l1.g = [](const Vec3&, const Vec3& n) { return n * 0.05; };
    LoadData l2;
    l2.f = [](const Vec3& x) { return Vec3{-0.3, 0.1 * x.x, 0.0}; };
    l2.g = [](const Vec3& x, const Vec3&) { return Vec3{0.02 * x.x, 0.0, 0.0}; };

    ScalarField T1{shape.mesh, {}}, T2{shape.mesh, {}}, T12{shape.mesh, {}};
    T1.values.resize(shape.mesh->n_nodes());
    T2.values.resize(shape.mesh->n_nodes());
    T12.values.resize(shape.mesh->n_nodes());
    const double a = 2.0, b = -0.5;
    for (int i = 0; i < shape.mesh->n_nodes(); ++i) {
        const Vec3& x = shape.mesh->nodes[i];
        const double dt1 = 10.0 * x.x, dt2 = -4.0 * x.y;
        T1.values[i] = p.T0 + dt1;
        T2.values[i] = p.T0 + dt2;
        T12.values[i] = p.T0 + a * dt1 + b * dt2;
    }
    LoadData l12;
    l12.f = [&](const Vec3& x) { return l1.f(x) * a + l2.f(x) * b; };
    l12.g = [&](const Vec3& x, const Vec3& n) { return l1.g(x, n) * a + l2.g(x, n) * b; };

    const VectorField u1 = solve_elasticity(shape, l1, T1, p);
    const VectorField u2 = solve_elasticity(shape, l2, T2, p);
    const VectorField u12 = solve_elasticity(shape, l12, T12, p);
    const double scale = u12.max_norm();
    for (size_t i = 0; i < u12.values.size(); ++i)
        CHECK(std::fabs(u12.values[i] - (a * u1.values[i] + b * u2.values[i])) <= 1e-8 * scale);
}

TEST_CASE("assembled elasticity system is symmetric positive definite") {
    const Shape shape = identity_shape(0.15);
    const MaterialParams p = unit_material();
    const ScalarField T = constant_field(shape, p.T0);
    const ElasticitySystem sys = assemble_elasticity_system(shape, {}, T, p);
    CHECK(sys.A.symmetry_defect() <= 1e-14);

    SeededRng rng(9);
    for (int trial = 0; trial < 10; ++trial) {
        std::vector<double> v(sys.A.n), Av(sys.A.n);
        bool nonzero = false;
        for (int i = 0; i < sys.A.n; ++i) {
            v[i] = sys.fixed_dof[i] ? 0.0 : rng.uniform(-1.0, 1.0);
            nonzero = nonzero || v[i] != 0.0;
        }
        REQUIRE(nonzero);
        sys.A.multiply(v, Av);
        double energy = 0.0;
        for (int i = 0; i < sys.A.n; ++i) energy += v[i] * Av[i];
        CHECK(energy > 0.0);
    }
}

TEST_CASE("tractions beyond the configured bound are rejected") {
    const Shape shape = identity_shape(0.2);
    const MaterialParams p = unit_material();
    const ScalarField T = constant_field(shape, p.T0);
    LoadData loads;
    loads.g = [](const Vec3&, const Vec3& n) { return n * 5.0; };
    loads.traction_bound = 1.0;
    CHECK_THROWS_AS(solve_elasticity(shape, loads, T, p), ValidationError);
    loads.traction_bound = 10.0;
    CHECK_NOTHROW(solve_elasticity(shape, loads, T, p));
}

TEST_CASE("empty Dirichlet set is rejected") {
    const Shape shape = identity_shape(0.2);
    Mesh all_robin = *shape.mesh;
    for (auto& f : all_robin.boundary_facets) f.tag = BoundaryTag::RobinNeumann;
    Shape s2 = shape;
    s2.mesh = std::make_shared<const Mesh>(std::move(all_robin));
    const MaterialParams p = unit_material();
    const ScalarField T{s2.mesh, std::vector<double>(s2.mesh->n_nodes(), p.T0)};
    CHECK_THROWS_AS(solve_elasticity(s2, {}, T, p), ValidationError);
}

TEST_CASE("displacement envelope over random admissible shapes (regression)") {
    const BaselineDesign d = unit_annulus();
    auto base = std::make_shared<const Mesh>(build_baseline(d, 0.12));
    const MaterialParams p = steel();
    SeededRng rng(777);

    RobinData robin;
    robin.k_cond = p.k_cond;
    robin.eta = [](const Vec3&, const Vec3&) { return 50.0; };
    robin.T_ambient = [&p](const Vec3& x, const Vec3&) {
        return p.T0 + 80.0 * std::exp(-((x.x - 1.0) * (x.x - 1.0) + x.y * x.y) / 0.3);
    };

    double envelope = 0.0;
    for (int trial = 0; trial < 10; ++trial) {
        DeformationMap map = make_map(d, {}, 1e9);
        if (trial > 0)
            for (double& t : map.theta) t = rng.uniform(-0.12, 0.12);
        AdmissibilityOptions fast;
        fast.estimate_norms = false;
        fast.vol_tol = 1.0;
        while (!check_admissible(map, *base, fast).pass_det)
            for (double& t : map.theta) t *= 0.5;
        const Shape shape = make_shape(d, map, base);
        const ScalarField T = solve_heat(shape, robin);
        const VectorField u = solve_elasticity(shape, {}, T, p);
        envelope = std::max(envelope, u.max_norm());
    }
    CAPTURE(envelope);
    // regression envelope recorded from the fixed-seed suite (displacements in
    // metres for the 80 K hot spot); a change beyond this bound is a regression
    CHECK(envelope <= 2.5e-3);
    CHECK(envelope > 0.0);
}
