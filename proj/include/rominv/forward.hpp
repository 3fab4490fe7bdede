#pragma once

#include <array>
#include <map>
#include <vector>

#include "rominv/series.hpp"

namespace rominv {

// Parametric stand-in for the high-fidelity simulator: surface displacement
// as a smooth deterministic function of injection rate. Defaults give an
// order-of-magnitude spread over rates 100-400 MSCF/day and 115 samples at
// dt = 1 day.
struct ForwardParams {
    double q_ref = 100.0;    // MSCF/day
    double amp_lin = 0.01;   // m
    double amp_quad = 0.005; // m
    double amp_osc = 0.001;  // m
    double tau = 20.0;       // days
    double period = 30.0;    // days
    double horizon = 114.0;  // days
    double dt = 1.0;         // days

    std::size_t steps() const; // horizon/dt, validated integral
    void validate() const;     // throws ConfigError
};

// u(t, q) = amp_lin*(q/q_ref)*(1 - exp(-t/tau))
//         + amp_quad*(q/q_ref)^2*(t/horizon)
//         + amp_osc*(q/q_ref)*sin(2*pi*t/period)
// Monotone increasing in q for every fixed t in [0, horizon] with defaults.
double synth_displacement(double t, double q, const ForwardParams& p);

// One series per rate, horizon/dt + 1 samples each. Rates must be positive
// and distinct (DuplicateRateError).
std::map<double, TimeSeries> generate_dataset(const std::vector<double>& rates,
                                              const ForwardParams& p);

// Linear slip-weakening friction.
struct FrictionLaw {
    double mu_s = 0.5;    // static friction
    double mu_d = 0.2;    // dynamic friction
    double d_c = 0.005;   // critical slip distance, m
    double tau_c = 0.0;   // cohesive strength, Pa

    void validate() const; // throws ConfigError
};

// mu_s - (mu_s - mu_d)*|d|/d_c for |d| <= d_c, mu_d beyond; continuous at d_c.
double friction_coefficient(double slip_mag, const FrictionLaw& law);

struct FaultStrength {
    double tau;    // shear stress magnitude, Pa
    double tau_f;  // Mohr-Coulomb frictional strength, Pa
};

// tau   = |l - (l.n)n|
// tau_f = tau_c - mu_f*(l.n) under compression (l.n < 0), else tau_c.
// The normal must be unit length within 1e-12 (NonUnitNormalError).
FaultStrength fault_strength(const std::array<double, 3>& traction,
                             const std::array<double, 3>& normal, const FrictionLaw& law,
                             double mu_f);

} // namespace rominv
