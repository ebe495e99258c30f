#pragma once

#include "thermorel/common.hpp"

namespace thermorel {

/// Elastic, thermal, cyclic-hardening, strain-life, Arrhenius and Weibull constants.
/// Stresses are SI (Pa); a config-level units flag may scale MPa inputs on load.
struct MaterialParams {
    double lambda = 0.0;   ///< Lame first parameter [Pa]
    double mu = 0.0;       ///< shear modulus [Pa]
    double E = 0.0;        ///< Young's modulus [Pa]
    double rho_cte = 0.0;  ///< linear thermal expansion coefficient [1/K]
    double k_cond = 0.0;   ///< thermal conductivity [W/(m K)]
    double K_hard = 0.0;   ///< cyclic hardening coefficient [Pa]
    double n_hard = 0.0;   ///< cyclic hardening exponent
    double sigma_f = 0.0;  ///< fatigue strength coefficient [Pa]
    double eps_f = 0.0;    ///< fatigue ductility coefficient
    double b_exp = 0.0;    ///< fatigue strength exponent, < 0
    double c_exp = 0.0;    ///< fatigue ductility exponent, < 0
    double Q_act = 0.0;    ///< Arrhenius activation coefficient [1/K]
    double T0 = 0.0;       ///< stress-free reference temperature [K]
    double m_weib = 0.0;   ///< Weibull shape, > 0

    /// Checks sign constraints and the E = mu(3 lambda + 2 mu)/(lambda + mu)
    /// consistency relation; throws ValidationError on violation.
    void validate(double consistency_rtol = 1e-6) const;

    /// rho (3 lambda + 2 mu), the thermal stress coupling coefficient.
    double thermal_stress_coeff() const { return rho_cte * (3.0 * lambda + 2.0 * mu); }
};

/// Cycles-to-crack-initiation with a dedicated no-failure variant. The
/// infinite state never leaks a floating-point infinity into integrands:
/// inv_pow returns an exact 0 there.
class Life {
public:
    Life() : cycles_(0.0), infinite_(true) {}

    static Life infinite() { return Life(); }
    static Life finite(double cycles) {
        if (!(cycles > 0.0)) throw ValidationError("Life::finite requires cycles > 0");
        Life l;
        l.cycles_ = cycles;
        l.infinite_ = false;
        return l;
    }

    bool is_infinite() const { return infinite_; }
    double cycles() const {
        if (infinite_) throw ValidationError("Life::cycles called on the no-failure value");
        return cycles_;
    }
    /// (1/N)^m, defined as exactly 0 for the no-failure value.
    double inv_pow(double m) const { return infinite_ ? 0.0 : std::pow(1.0 / cycles_, m); }

    Life scaled(double factor) const {
        return infinite_ ? infinite() : finite(cycles_ * factor);
    }

private:
    double cycles_;
    bool infinite_;
};

/// von Mises stress sqrt(3/2 s':s') of a symmetric 3x3 tensor (3D trace convention).
/// Throws ValidationError if the input is not symmetric to 1e-12 relative.
double von_mises(const Mat3& sigma);

/// Completes a 2D in-plane stress tensor to 3x3 with the plane-strain relation
/// s33 = lambda/(2(lambda+mu)) (s11+s22) - E rho (T - T0) and evaluates von Mises.
double von_mises_plane_strain(const Mat3& sigma_2d, double T, const MaterialParams& p);

/// Thermoelastic stress lambda div(u) I + mu (grad u + grad u^T) - rho(3l+2m)(T-T0) I,
/// returned as a full 3x3 tensor. For dim == 2 the out-of-plane entry follows from
/// the 3D law with e33 = 0 (plane strain), which the failure model requires.
Mat3 thermo_stress_tensor(const Mat3& grad_u, int dim, double T, const MaterialParams& p);

/// Elastic -> elastic-plastic stress amplitude via the Neuber relation:
/// unique root s >= 0 of s^2/E + s (s/K)^(1/n') = sigma_a^2/E on [0, sigma_a].
double neuber_convert(double sigma_a, const MaterialParams& p);

/// Ramberg-Osgood strain amplitude sigma/E + (sigma/K)^(1/n').
double ramberg_osgood(double sigma_ep, const MaterialParams& p);

/// Inverts the Coffin-Manson-Basquin curve
/// (sigma_f'/E)(2N)^b + eps_f'(2N)^c = eps_a for N > 0 (strictly decreasing in N).
/// Amplitudes at or below the optional fatigue floor count as no-failure;
/// the default floor of 0 never triggers (the curve spans all of (0, inf)).
Life cmb_invert(double eps_a, const MaterialParams& p, double fatigue_floor = 0.0);

/// Arrhenius temperature scaling N_sur = exp(-Q (T - T0)) N_mech.
Life arrhenius_life(Life n_mech, double T, const MaterialParams& p);

/// Full pointwise LCF chain: stress(grad u, T) -> von Mises -> amplitude sigma_v/2
/// -> Neuber -> Ramberg-Osgood -> CMB -> Arrhenius. Zero stress gives no failure.
Life nsur_pointwise(const Mat3& grad_u, int dim, double T, const MaterialParams& p);

/// Local Weibull hazard density (m/N)(t/N)^(m-1); 0 for the no-failure value.
double weibull_intensity(double t, Life N, const MaterialParams& p);

}  // namespace thermorel
