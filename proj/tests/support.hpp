#pragma once

// Shared test fixtures and independent oracles. Everything here stays
// deliberately separate from the library implementation paths it checks.

#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include "thermorel/geometry.hpp"
#include "thermorel/material.hpp"

namespace test_support {

using thermorel::BaselineDesign;
using thermorel::MaterialParams;
using thermorel::Vec3;

/// Steel-like parameter set with E consistent with the Lame pair.
inline MaterialParams steel() {
    MaterialParams p;
    p.lambda = 1.1538461538461538e11;
    p.mu = 7.692307692307692e10;
    p.E = p.mu * (3.0 * p.lambda + 2.0 * p.mu) / (p.lambda + p.mu);
    p.rho_cte = 1.2e-5;
    p.k_cond = 45.0;
    p.K_hard = 1.5e9;
    p.n_hard = 0.12;
    p.sigma_f = 1.2e9;
    p.eps_f = 0.5;
    p.b_exp = -0.08;
    p.c_exp = -0.6;
    p.Q_act = 5e-3;
    p.T0 = 300.0;
    p.m_weib = 2.5;
    return p;
}

/// Small-magnitude parameter set with hand-checkable Neuber/Ramberg-Osgood
/// arithmetic (E = 1e5, K = 1000, n' = 0.1 in MPa-scale units).
inline MaterialParams mpa_toy() {
    MaterialParams p = steel();
    p.E = 1e5;
    p.K_hard = 1000.0;
    p.n_hard = 0.1;
    // keep the Lame pair consistent with E (nu = 0.3)
    const double nu = 0.3;
    p.mu = p.E / (2.0 * (1.0 + nu));
    p.lambda = p.E * nu / ((1.0 + nu) * (1.0 - 2.0 * nu));
    return p;
}

inline BaselineDesign unit_annulus() {
    BaselineDesign d;
    d.outer_radius = 1.0;
    d.hole_center = Vec3{0.0, 0.0, 0.0};
    d.hole_radius = 0.3;
    d.ext_radius = 1.6;
    return d;
}

/// Plain bisection to high accuracy; the independent root oracle.
inline double bisect(const std::function<double(double)>& f, double lo, double hi, double tol) {
    double flo = f(lo);
    for (int it = 0; it < 400 && hi - lo > tol; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = f(mid);
        if ((flo <= 0.0) == (fm <= 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

/// Composite Simpson quadrature oracle.
inline double simpson(const std::function<double(double)>& f, double a, double b, int n) {
    if (n % 2) ++n;
    const double h = (b - a) / n;
    double s = f(a) + f(b);
    for (int i = 1; i < n; ++i) s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
    return s * h / 3.0;
}

/// Shoelace area of a closed polygon.
inline double shoelace(const std::vector<Vec3>& poly) {
    double s = 0.0;
    for (size_t i = 0; i < poly.size(); ++i) {
        const Vec3& a = poly[i];
        const Vec3& b = poly[(i + 1) % poly.size()];
        s += a.x * b.y - b.x * a.y;
    }
    return 0.5 * s;
}

}  // namespace test_support
