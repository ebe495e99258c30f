#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "support.hpp"
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

RobinData constant_ambient(double value, double eta, double k) {
    RobinData data;
    data.k_cond = k;
    data.eta = [eta](const Vec3&, const Vec3&) { return eta; };
    data.T_ambient = [value](const Vec3&, const Vec3&) { return value; };
    return data;
}

/// Robin data manufactured from T* = x: T_e = T* + (k/eta) dT*/dn with
/// dT*/dn = n_x on the discrete boundary. The affine T* lies in the P1 space
/// and the discrete solution reproduces it to roundoff.
RobinData manufactured_x1(double k) {
    auto eta = [](const Vec3& x) { return 5.0 + 2.0 * std::sin(2.0 * x.x + 1.0) * std::cos(x.y); };
    RobinData data;
    data.k_cond = k;
    data.eta = [eta](const Vec3& x, const Vec3&) { return eta(x); };
    data.T_ambient = [eta, k](const Vec3& x, const Vec3& n) { return x.x + k / eta(x) * n.x; };
    return data;
}

/// Quadratic harmonic T* = x^2 - y^2, outside the P1 space: genuine
/// discretization error, used for the empirical convergence rate.
RobinData manufactured_quadratic(double k) {
    auto eta = [](const Vec3& x) { return 5.0 + 2.0 * std::sin(2.0 * x.x + 1.0) * std::cos(x.y); };
    RobinData data;
    data.k_cond = k;
    data.eta = [eta](const Vec3& x, const Vec3&) { return eta(x); };
    data.T_ambient = [eta, k](const Vec3& x, const Vec3& n) {
        return x.x * x.x - x.y * x.y + k / eta(x) * (2.0 * x.x * n.x - 2.0 * x.y * n.y);
    };
    return data;
}

double linf_error_vs_x1(const ScalarField& T) {
    double e = 0.0;
    for (int i = 0; i < T.mesh->n_nodes(); ++i)
        e = std::max(e, std::fabs(T.values[i] - T.mesh->nodes[i].x));
    return e;
}

double linf_error_vs_quadratic(const ScalarField& T) {
    double e = 0.0;
    for (int i = 0; i < T.mesh->n_nodes(); ++i) {
        const Vec3& p = T.mesh->nodes[i];
        e = std::max(e, std::fabs(T.values[i] - (p.x * p.x - p.y * p.y)));
    }
    return e;
}

}  // namespace

TEST_CASE("constant ambient temperature is reproduced exactly") {
    const Shape shape = identity_shape(0.1);
    const ScalarField T = solve_heat(shape, constant_ambient(350.0, 7.0, 45.0));
    for (double v : T.values) CHECK(std::fabs(v - 350.0) <= 1e-10);

    const TemperatureBoundsReport rep =
        temperature_bounds_check(T, constant_ambient(350.0, 7.0, 45.0));
    CHECK(rep.pass);
    CHECK(rep.slack_used <= 1e-10);
}

TEST_CASE("manufactured solutions: affine exact, quadratic second order") {
    const double k = 45.0;

    // T* = x is in the P1 space: reproduced to roundoff at every resolution
    for (double res : {0.2, 0.1}) {
        const Shape shape = identity_shape(res);
        const ScalarField T = solve_heat(shape, manufactured_x1(k));
        CHECK(linf_error_vs_x1(T) <= 1e-11);
    }

    // T* = x^2 - y^2 carries a real discretization error; measure the rate
    std::vector<double> errors;
    for (double res : {0.2, 0.1, 0.05}) {
        const Shape shape = identity_shape(res);
        const ScalarField T = solve_heat(shape, manufactured_quadratic(k));
        errors.push_back(linf_error_vs_quadratic(T));
    }
    const double order1 = std::log2(errors[0] / errors[1]);
    const double order2 = std::log2(errors[1] / errors[2]);
    CAPTURE(errors[0]);
    CAPTURE(errors[1]);
    CAPTURE(errors[2]);
    CHECK(order1 >= 1.8);
    CHECK(order2 >= 1.8);
}

TEST_CASE("penalty limit approaches Dirichlet data") {
    const Shape shape = identity_shape(0.08);
    RobinData data;
    data.k_cond = 45.0;
    data.eta = [](const Vec3&, const Vec3&) { return 1e6; };
    data.T_ambient = [](const Vec3& x, const Vec3&) { return x.x; };
    const ScalarField T = solve_heat(shape, data);

    std::vector<char> on_boundary(shape.mesh->n_nodes(), 0);
    for (const auto& f : shape.mesh->boundary_facets)
        for (int i = 0; i < shape.mesh->dim; ++i) on_boundary[f.nodes[i]] = 1;
    for (int i = 0; i < shape.mesh->n_nodes(); ++i)
        if (on_boundary[i])
            CHECK(std::fabs(T.values[i] - shape.mesh->nodes[i].x) < 1e-3);
}

TEST_CASE("assembled system is symmetric SPD and matches the dense oracle") {
    const Shape shape = identity_shape(0.15);
    const RobinData data = manufactured_x1(45.0);
    const AssembledSystem sys = assemble_heat_system(*shape.mesh, data);
    CHECK(sys.A.symmetry_defect() <= 1e-14);

    std::vector<double> x(sys.A.n, 0.0);
    const CgResult cg = cg_solve(sys.A, sys.rhs, x, 1e-12);
    CHECK(cg.converged);

    const std::vector<double> xd = dense_spd_solve(sys.A, sys.rhs);
    for (int i = 0; i < sys.A.n; ++i) CHECK(std::fabs(x[i] - xd[i]) <= 1e-8);
}

TEST_CASE("solver rejects vanishing heat transfer") {
    const Shape shape = identity_shape(0.2);
    RobinData data;
    data.k_cond = 45.0;
    data.eta = [](const Vec3&, const Vec3&) { return 0.0; };
    data.T_ambient = [](const Vec3&, const Vec3&) { return 300.0; };
    CHECK_THROWS_AS(solve_heat(shape, data), ValidationError);
}

TEST_CASE("linearity in the ambient field") {
    const Shape shape = identity_shape(0.12);
    const double eta = 3.0, k = 45.0;
    auto make_data = [&](std::function<double(const Vec3&)> te) {
        RobinData d;
        d.k_cond = k;
        d.eta = [eta](const Vec3&, const Vec3&) { return eta; };
        d.T_ambient = [te](const Vec3& x, const Vec3&) { return te(x); };
        return d;
    };
    const ScalarField T1 = solve_heat(shape, make_data([](const Vec3& x) { return 300.0 + 40.0 * x.x; }));
    const ScalarField T2 = solve_heat(shape, make_data([](const Vec3& x) { return 100.0 * x.y; }));
    const double a = 0.7, b = -1.3;
    const ScalarField T12 = solve_heat(
        shape, make_data([a, b](const Vec3& x) {
            return a * (300.0 + 40.0 * x.x) + b * (100.0 * x.y);
        }));
    double scale = 0.0;
    for (double v : T12.values) scale = std::max(scale, std::fabs(v));
    for (int i = 0; i < shape.mesh->n_nodes(); ++i)
        CHECK(std::fabs(T12.values[i] - (a * T1.values[i] + b * T2.values[i])) <= 1e-9 * scale);
}

TEST_CASE("maximum principle over random admissible shapes") {
    const BaselineDesign d = unit_annulus();
    auto base = std::make_shared<const Mesh>(build_baseline(d, 0.1));
    SeededRng rng(321);

    RobinData data;
    data.k_cond = 45.0;
    data.eta = [](const Vec3& x, const Vec3&) { return 2.0 + std::sin(3.0 * x.x) * 0.5 + 0.6; };
    data.T_ambient = [](const Vec3& x, const Vec3&) { return 300.0 + 100.0 * x.x; };

    for (int trial = 0; trial < 10; ++trial) {
        DeformationMap map = make_map(d, {}, 1e9);
        for (double& t : map.theta) t = rng.uniform(-0.15, 0.15);
        AdmissibilityOptions fast;
        fast.estimate_norms = false;
        fast.vol_tol = 1.0;
        while (!check_admissible(map, *base, fast).pass_det)
            for (double& t : map.theta) t *= 0.5;

        const Shape shape = make_shape(d, map, base);
        const ScalarField T = solve_heat(shape, data);
        const TemperatureBoundsReport rep = temperature_bounds_check(T, data);
        CHECK(rep.pass);
        CHECK(rep.slack_used <= rep.tol);
    }
}

TEST_CASE("bounds check flags artificial violations") {
    const Shape shape = identity_shape(0.15);
    const RobinData data = constant_ambient(300.0, 5.0, 45.0);
    ScalarField T = solve_heat(shape, data);
    T.values[7] = 301.0;  // outside the ambient range
    CHECK_FALSE(temperature_bounds_check(T, data).pass);
}

TEST_CASE("gradient recovery") {
    const Shape shape = identity_shape(0.1);

    SUBCASE("cell gradients reproduce affine fields exactly") {
        ScalarField f{shape.mesh, {}};
        f.values.resize(shape.mesh->n_nodes());
        for (int i = 0; i < shape.mesh->n_nodes(); ++i)
            f.values[i] = 2.0 * shape.mesh->nodes[i].x - 0.5 * shape.mesh->nodes[i].y + 3.0;
        for (const Vec3& g : cell_gradients(f)) {
            CHECK(g.x == doctest::Approx(2.0).epsilon(1e-12));
            CHECK(g.y == doctest::Approx(-0.5).epsilon(1e-12));
        }
        for (const Vec3& g : recovered_nodal_gradients(f)) {
            CHECK(g.x == doctest::Approx(2.0).epsilon(1e-12));
            CHECK(g.y == doctest::Approx(-0.5).epsilon(1e-12));
        }
    }

    SUBCASE("constant ambient gives vanishing gradient") {
        const ScalarField T = solve_heat(shape, constant_ambient(300.0, 5.0, 45.0));
        for (const Vec3& g : cell_gradients(T)) CHECK(g.norm() <= 1e-9);
    }

    SUBCASE("recovered gradient of the manufactured solve converges") {
        double prev = 0.0;
        int level = 0;
        for (double res : {0.2, 0.1, 0.05}) {
            const Shape s = identity_shape(res);
            const ScalarField T = solve_heat(s, manufactured_quadratic(45.0));
            const auto g = recovered_nodal_gradients(T);
            double err = 0.0;
            for (int i = 0; i < s.mesh->n_nodes(); ++i) {
                const Vec3& p = s.mesh->nodes[i];
                err = std::max(err, (g[i] - Vec3{2.0 * p.x, -2.0 * p.y, 0.0}).norm());
            }
            if (level > 0) CHECK(err < prev);
            prev = err;
            ++level;
        }
        CHECK(prev < 0.1);
    }
}

TEST_CASE("3d smoke: constant ambient solve on the extruded slab") {
    const BaselineDesign d = unit_annulus();
    auto slab = std::make_shared<const Mesh>(
        extrude_to_3d(build_baseline(d, 0.25), 0.25, 1));
    const ScalarField T = solve_heat(slab, constant_ambient(310.0, 4.0, 45.0));
    for (double v : T.values) CHECK(std::fabs(v - 310.0) <= 1e-9);
}
