#include "rominv/forward.hpp"

#include <cmath>

#include "rominv/csv.hpp"

namespace rominv {

void ForwardParams::validate() const {
    auto positive = [](double v) { return std::isfinite(v) && v > 0.0; };
    if (!positive(q_ref) || !positive(amp_lin) || !positive(amp_quad) || !positive(amp_osc) ||
        !positive(tau) || !positive(period) || !positive(horizon) || !positive(dt))
        throw ConfigError("forward params: all fields must be positive and finite");
    const double ratio = horizon / dt;
    if (std::abs(ratio - std::round(ratio)) > 1e-9)
        throw ConfigError("forward params: horizon must be an integer multiple of dt");
}

std::size_t ForwardParams::steps() const {
    validate();
    return static_cast<std::size_t>(std::llround(horizon / dt));
}

double synth_displacement(double t, double q, const ForwardParams& p) {
    const double s = q / p.q_ref;
    return p.amp_lin * s * (1.0 - std::exp(-t / p.tau)) +
           p.amp_quad * s * s * (t / p.horizon) +
           p.amp_osc * s * std::sin(2.0 * M_PI * t / p.period);
}

std::map<double, TimeSeries> generate_dataset(const std::vector<double>& rates,
                                              const ForwardParams& p) {
    p.validate();
    std::map<double, TimeSeries> out;
    for (double q : rates) {
        if (!(q > 0.0)) throw ConfigError("generate_dataset: rates must be positive");
        if (out.count(q))
            throw DuplicateRateError("generate_dataset: duplicate rate " + format_double(q));
        TimeSeries series;
        series.t0 = 0.0;
        series.dt = p.dt;
        series.label = "synthetic q=" + format_double(q);
        const std::size_t n = p.steps() + 1;
        series.values.reserve(n);
        for (std::size_t i = 0; i < n; ++i)
            series.values.push_back(synth_displacement(series.time(i), q, p));
        out.emplace(q, std::move(series));
    }
    return out;
}

void FrictionLaw::validate() const {
    if (!(mu_s >= mu_d) || !(mu_d >= 0.0))
        throw ConfigError("friction law: need mu_s >= mu_d >= 0");
    if (!(d_c > 0.0)) throw ConfigError("friction law: d_c must be positive");
    if (!(tau_c >= 0.0)) throw ConfigError("friction law: tau_c must be >= 0");
}

double friction_coefficient(double slip_mag, const FrictionLaw& law) {
    law.validate();
    const double d = std::abs(slip_mag);
    if (d > law.d_c) return law.mu_d;
    return law.mu_s - (law.mu_s - law.mu_d) * d / law.d_c;
}

FaultStrength fault_strength(const std::array<double, 3>& traction,
                             const std::array<double, 3>& normal, const FrictionLaw& law,
                             double mu_f) {
    law.validate();
    const double n2 = normal[0] * normal[0] + normal[1] * normal[1] + normal[2] * normal[2];
    if (std::abs(std::sqrt(n2) - 1.0) > 1e-12)
        throw NonUnitNormalError("fault_strength: normal is not unit length");

    const double ln = traction[0] * normal[0] + traction[1] * normal[1] + traction[2] * normal[2];
    std::array<double, 3> shear{traction[0] - ln * normal[0], traction[1] - ln * normal[1],
                                traction[2] - ln * normal[2]};
    FaultStrength out;
    out.tau = std::sqrt(shear[0] * shear[0] + shear[1] * shear[1] + shear[2] * shear[2]);
    out.tau_f = ln < 0.0 ? law.tau_c - mu_f * ln : law.tau_c;
    return out;
}

} // namespace rominv
