#include "thermorel/material.hpp"

#include <algorithm>
#include <cmath>

namespace thermorel {

void MaterialParams::validate(double consistency_rtol) const {
    auto require = [](bool ok, const char* what) {
        if (!ok) throw ValidationError(std::string("MaterialParams: ") + what);
    };
    require(lambda > 0.0, "lambda must be > 0");
    require(mu > 0.0, "mu must be > 0");
    require(E > 0.0, "E must be > 0");
    require(K_hard > 0.0, "K_hard must be > 0");
    require(n_hard > 0.0 && n_hard < 1.0, "n_hard must be in (0,1)");
    require(b_exp < 0.0, "b_exp must be < 0");
    require(c_exp < 0.0, "c_exp must be < 0");
    require(m_weib > 0.0, "m_weib must be > 0");
    require(sigma_f > 0.0, "sigma_f must be > 0");
    require(eps_f > 0.0, "eps_f must be > 0");
    require(k_cond > 0.0, "k_cond must be > 0");

    const double E_lame = mu * (3.0 * lambda + 2.0 * mu) / (lambda + mu);
    if (std::fabs(E - E_lame) > consistency_rtol * E)
        throw ValidationError("MaterialParams: E inconsistent with Lame parameters (got E=" +
                              fmt_full(E) + ", mu(3l+2m)/(l+m)=" + fmt_full(E_lame) + ")");
}

double von_mises(const Mat3& sigma) {
    double scale = 0.0;
    for (double v : sigma.a) scale = std::max(scale, std::fabs(v));
    const Mat3 skew = sigma - sigma.transpose();
    double defect = 0.0;
    for (double v : skew.a) defect = std::max(defect, std::fabs(v));
    if (scale > 0.0 && defect > 1e-12 * scale)
        throw ValidationError("von_mises: stress tensor not symmetric");

    const double p = sigma.trace() / 3.0;
    Mat3 dev = sigma;
    dev(0, 0) -= p;
    dev(1, 1) -= p;
    dev(2, 2) -= p;
    return std::sqrt(1.5 * dev.ddot(dev));
}

double von_mises_plane_strain(const Mat3& sigma_2d, double T, const MaterialParams& p) {
    Mat3 full = sigma_2d;
    const double nu_p = p.lambda / (2.0 * (p.lambda + p.mu));
    full(2, 2) = nu_p * (sigma_2d(0, 0) + sigma_2d(1, 1)) - p.E * p.rho_cte * (T - p.T0);
    full(0, 2) = full(2, 0) = 0.0;
    full(1, 2) = full(2, 1) = 0.0;
    return von_mises(full);
}

Mat3 thermo_stress_tensor(const Mat3& grad_u, int dim, double T, const MaterialParams& p) {
    if (dim != 2 && dim != 3) throw ValidationError("thermo_stress_tensor: dim must be 2 or 3");
    Mat3 grad = grad_u;
    if (dim == 2) {
        // embed with e33 = ei3 = 0 (plane strain)
        grad(0, 2) = grad(1, 2) = grad(2, 0) = grad(2, 1) = grad(2, 2) = 0.0;
    }
    const Mat3 strain = grad.sym();
    const double tr = strain.trace();
    const double thermal = p.thermal_stress_coeff() * (T - p.T0);

    Mat3 sigma = strain * (2.0 * p.mu);
    sigma(0, 0) += p.lambda * tr - thermal;
    sigma(1, 1) += p.lambda * tr - thermal;
    sigma(2, 2) += p.lambda * tr - thermal;
    return sigma;
}

namespace {

/// Bisection-safeguarded Newton for a strictly monotone scalar function on [lo, hi].
/// g must satisfy g(lo) <= 0 <= g(hi) (increasing) after the caller arranges signs.
template <typename F, typename DF>
double monotone_root(F g, DF dg, double lo, double hi, double xtol, int max_iter = 200) {
    double x = 0.5 * (lo + hi);
    for (int it = 0; it < max_iter; ++it) {
        const double gx = g(x);
        if (gx > 0.0)
            hi = x;
        else
            lo = x;
        const double d = dg(x);
        double next = d != 0.0 ? x - gx / d : 0.5 * (lo + hi);
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        if (std::fabs(next - x) <= xtol) return next;
        x = next;
    }
    throw NumericalError("monotone_root: no convergence");
}

}  // namespace

double neuber_convert(double sigma_a, const MaterialParams& p) {
    if (sigma_a < 0.0) throw ValidationError("neuber_convert: negative stress amplitude");
    if (sigma_a == 0.0) return 0.0;

    const double target = sigma_a * sigma_a / p.E;
    const double inv_n = 1.0 / p.n_hard;
    auto g = [&](double s) {
        return s * s / p.E + s * std::pow(s / p.K_hard, inv_n) - target;
    };
    auto dg = [&](double s) {
        return 2.0 * s / p.E + (1.0 + inv_n) * std::pow(s / p.K_hard, inv_n);
    };
    const double tol = 1e-10 * std::max(1.0, sigma_a);
    return monotone_root(g, dg, 0.0, sigma_a, tol);
}

double ramberg_osgood(double sigma_ep, const MaterialParams& p) {
    if (sigma_ep < 0.0) throw ValidationError("ramberg_osgood: negative stress amplitude");
    return sigma_ep / p.E + std::pow(sigma_ep / p.K_hard, 1.0 / p.n_hard);
}

Life cmb_invert(double eps_a, const MaterialParams& p, double fatigue_floor) {
    if (!(eps_a > 0.0)) throw ValidationError("cmb_invert: strain amplitude must be > 0");
    if (eps_a <= fatigue_floor) return Life::infinite();

    // Work in q = 2N. The curve (sf/E) q^b + ef q^c is strictly decreasing and
    // spans (0, inf), so a root always exists; bracket by doubling/halving.
    auto curve = [&](double q) {
        return p.sigma_f / p.E * std::pow(q, p.b_exp) + p.eps_f * std::pow(q, p.c_exp);
    };
    double lo = 1.0, hi = 1.0;
    while (curve(lo) < eps_a) {
        lo *= 0.5;
        if (lo < 1e-300) throw NumericalError("cmb_invert: bracket underflow");
    }
    while (curve(hi) > eps_a) {
        hi *= 2.0;
        if (hi > 1e300) throw NumericalError("cmb_invert: bracket overflow");
    }

    // Newton in log q with bisection safeguard; relative tolerance 1e-10 on q.
    double llo = std::log(lo), lhi = std::log(hi);
    auto g = [&](double lq) { return eps_a - curve(std::exp(lq)); };  // increasing in lq
    auto dg = [&](double lq) {
        const double q = std::exp(lq);
        return -(p.sigma_f / p.E * p.b_exp * std::pow(q, p.b_exp) +
                 p.eps_f * p.c_exp * std::pow(q, p.c_exp));
    };
    const double lq = monotone_root(g, dg, llo, lhi, 1e-12);
    return Life::finite(0.5 * std::exp(lq));
}

Life arrhenius_life(Life n_mech, double T, const MaterialParams& p) {
    if (n_mech.is_infinite()) return Life::infinite();
    return Life::finite(std::exp(-p.Q_act * (T - p.T0)) * n_mech.cycles());
}

Life nsur_pointwise(const Mat3& grad_u, int dim, double T, const MaterialParams& p) {
    const Mat3 sigma = thermo_stress_tensor(grad_u, dim, T, p);
    const double sigma_v = von_mises(sigma);
    if (sigma_v == 0.0) return Life::infinite();
    const double sigma_a = 0.5 * sigma_v;
    const double sigma_ep = neuber_convert(sigma_a, p);
    const double eps_a = ramberg_osgood(sigma_ep, p);
    if (eps_a == 0.0) return Life::infinite();
    return arrhenius_life(cmb_invert(eps_a, p), T, p);
}

double weibull_intensity(double t, Life N, const MaterialParams& p) {
    if (t < 0.0) throw ValidationError("weibull_intensity: t must be >= 0");
    if (N.is_infinite()) return 0.0;
    const double n = N.cycles();
    return p.m_weib / n * std::pow(t / n, p.m_weib - 1.0);
}

}  // namespace thermorel
