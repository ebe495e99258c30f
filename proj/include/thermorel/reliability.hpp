#pragma once

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "thermorel/elasticity.hpp"
#include "thermorel/fields.hpp"
#include "thermorel/geometry.hpp"
#include "thermorel/material.hpp"

namespace thermorel {

struct ReliabilityOptions {
    /// The surface integral runs over all of the boundary by default; switch
    /// off to exclude the clamped (Dirichlet) part.
    bool include_dirichlet_boundary = true;
};

/// One boundary quadrature point with its weight and local life.
struct BoundaryLifeSample {
    int facet = -1;
    Vec3 point;
    double weight = 0.0;
    Life n_sur;
};

/// Objective value J = integral over the boundary of (1/N_sur)^m dA together
/// with the induced Weibull scale N = J^(-1/m) and the sampled life table.
/// The volume term of the intensity is identically zero (N_vol = infinity).
struct ReliabilityReport {
    double J = 0.0;
    Life N_scale = Life::infinite();
    double m = 0.0;
    double volume_term = 0.0;
    std::vector<BoundaryLifeSample> samples;
};

/// Full surface objective from solved fields: N_sur from the pointwise LCF
/// chain evaluated with recovered nodal displacement gradients and nodal
/// temperatures interpolated to order-2 facet quadrature points.
ReliabilityReport objective_J(const Shape& shape, const VectorField& u, const ScalarField& T,
                              const MaterialParams& p, const ReliabilityOptions& opts = {});

/// Test/diagnostic hook: the same boundary quadrature with an injected life
/// field instead of the solved-state chain.
using LifeFn = std::function<Life(const Vec3&)>;
ReliabilityReport objective_from_life(const Shape& shape, const LifeFn& life, double m,
                                      const ReliabilityOptions& opts = {});

/// F(t) = 1 - exp(-(t/N)^m); 0 for the no-failure scale.
double failure_cdf(double t, const ReliabilityReport& report);

/// h(t) = (m/N)(t/N)^(m-1); 0 for the no-failure scale.
double hazard_rate(double t, const ReliabilityReport& report);

/// Expected cycles N Gamma(1 + 1/m). Requires a finite scale.
double mean_life(const ReliabilityReport& report);

/// Local Lanczos evaluation of the Gamma function (x > 0), ~1e-13 relative.
double gamma_function(double x);

/// Orderings: +1 means r1 dominates (more reliable), -1 the opposite, 0 equal.
struct DominanceVerdict {
    std::vector<int> fixed_time;  ///< per grid time, CDF comparison
    int first_stochastic_order = 0;
    int instantaneous_hazard = 0;
    bool consistent = false;      ///< all senses reduce to the N ordering
    bool shape_below_one = false; ///< noted when m < 1
};

/// Closed-form Weibull comparison of two reports with equal shape m.
DominanceVerdict dominance_compare(const ReliabilityReport& r1, const ReliabilityReport& r2,
                                   std::span<const double> times);

struct CrackEvent {
    double time = 0.0;
    Vec3 location;
    int facet = -1;
};

/// Sampled crack-initiation events on [0, t_max] x boundary; tau is the first
/// event time, or empty when censored at the horizon.
struct CrackEventSet {
    std::vector<CrackEvent> events;
    double t_max = 0.0;
    std::optional<double> tau;
    bool censored() const { return !tau.has_value(); }
};

/// Poisson point process draw: K ~ Poisson(t_max^m J); locations over boundary
/// quadrature points with probability proportional to the local intensity
/// weight; times i.i.d. with density m t^(m-1) / t_max^m. Deterministic per seed.
CrackEventSet sample_crack_process(const ReliabilityReport& report, double t_max, uint64_t seed);
CrackEventSet sample_crack_process(const Shape& shape, const VectorField& u, const ScalarField& T,
                                   const MaterialParams& p, double t_max, uint64_t seed,
                                   const ReliabilityOptions& opts = {});

}  // namespace thermorel
