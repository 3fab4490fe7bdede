#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "rominv/forward.hpp"

using namespace rominv;

TEST_CASE("displacement vanishes at t = 0 for any rate") {
    const ForwardParams p;
    for (double q : {1.0, 100.0, 250.0, 400.0, 5000.0})
        CHECK(synth_displacement(0.0, q, p) == 0.0);
}

TEST_CASE("pure exponential branch at q = q_ref, t = tau") {
    // synth_displacement itself does not gate on the dataset-level
    // positivity checks, so zeroed amplitudes isolate the first term
    ForwardParams p;
    p.amp_quad = 0.0;
    p.amp_osc = 0.0;
    const double expected = p.amp_lin * (1.0 - std::exp(-1.0));
    CHECK(synth_displacement(p.tau, p.q_ref, p) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("super-linear rate scaling at the horizon") {
    const ForwardParams p;
    const double hi = synth_displacement(p.horizon, 400.0, p);
    const double lo = synth_displacement(p.horizon, 100.0, p);
    CHECK(hi / lo > 4.0);
}

TEST_CASE("displacement is monotone in q on a (t, q) grid") {
    const ForwardParams p;
    for (double t = 1.0; t <= p.horizon; t += 1.0) {
        double prev = synth_displacement(t, 50.0, p);
        for (double q = 55.0; q <= 500.0; q += 5.0) {
            const double cur = synth_displacement(t, q, p);
            CHECK(cur > prev);
            prev = cur;
        }
    }
}

TEST_CASE("generate_dataset: default params give 115 samples per rate") {
    const ForwardParams p;
    const auto data = generate_dataset({100.0, 400.0}, p);
    REQUIRE(data.size() == 2);
    for (const auto& [rate, series] : data) {
        CHECK(series.size() == 115);
        CHECK(series.t0 == 0.0);
        CHECK(series.dt == 1.0);
        CHECK(series.values[10] == synth_displacement(10.0, rate, p));
    }
}

TEST_CASE("generate_dataset: empty rate list gives an empty map") {
    CHECK(generate_dataset({}, ForwardParams{}).empty());
}

TEST_CASE("generate_dataset: duplicate and non-positive rates are rejected") {
    CHECK_THROWS_AS(generate_dataset({100.0, 100.0}, ForwardParams{}), DuplicateRateError);
    CHECK_THROWS_AS(generate_dataset({-5.0}, ForwardParams{}), ConfigError);
}

TEST_CASE("forward params validation") {
    ForwardParams p;
    CHECK(p.steps() == 114);
    p.horizon = 114.5;
    CHECK_THROWS_AS(p.validate(), ConfigError);
    p.horizon = 114.0;
    p.tau = 0.0;
    CHECK_THROWS_AS(p.validate(), ConfigError);
}

TEST_CASE("friction coefficient: static, dynamic and midpoint values") {
    FrictionLaw law; // mu_s 0.5, mu_d 0.2, d_c 5 mm
    CHECK(friction_coefficient(0.0, law) == 0.5);
    CHECK(friction_coefficient(0.005, law) == doctest::Approx(0.2).epsilon(1e-15));
    CHECK(friction_coefficient(0.0025, law) == doctest::Approx(0.35).epsilon(1e-12));
}

TEST_CASE("friction coefficient: continuous, non-increasing, bounded") {
    FrictionLaw law;
    const double just_below = friction_coefficient(law.d_c * (1.0 - 1e-12), law);
    const double just_above = friction_coefficient(law.d_c * (1.0 + 1e-12), law);
    CHECK(std::abs(just_below - just_above) < 1e-9);

    double prev = friction_coefficient(0.0, law);
    for (double d = 0.0; d <= 2.0 * law.d_c; d += law.d_c / 50.0) {
        const double mu = friction_coefficient(d, law);
        CHECK(mu <= prev + 1e-15);
        CHECK(mu >= law.mu_d);
        CHECK(mu <= law.mu_s);
        prev = mu;
    }
}

TEST_CASE("friction law validation") {
    FrictionLaw law;
    law.mu_d = 0.6; // above mu_s
    CHECK_THROWS_AS(law.validate(), ConfigError);
    law = FrictionLaw{};
    law.d_c = 0.0;
    CHECK_THROWS_AS(law.validate(), ConfigError);
}

TEST_CASE("fault strength: compressive traction adds friction") {
    FrictionLaw law;
    law.tau_c = 0.0;
    const auto out = fault_strength({0.0, -1.0, 0.0}, {0.0, 1.0, 0.0}, law, 0.5);
    CHECK(out.tau == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(out.tau_f == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("fault strength: tensile branch keeps only cohesion") {
    FrictionLaw law;
    law.tau_c = 3.5;
    const auto out = fault_strength({0.0, 2.0, 0.0}, {0.0, 1.0, 0.0}, law, 0.7);
    CHECK(out.tau == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(out.tau_f == 3.5);
}

TEST_CASE("fault strength: pure shear with zero normal component") {
    FrictionLaw law;
    law.tau_c = 0.0;
    const auto out = fault_strength({1.0, 0.0, 0.0}, {0.0, 1.0, 0.0}, law, 123.0);
    CHECK(out.tau == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(out.tau_f == 0.0);
}

TEST_CASE("fault strength rejects non-unit normals") {
    CHECK_THROWS_AS(fault_strength({1.0, 0.0, 0.0}, {0.0, 2.0, 0.0}, FrictionLaw{}, 0.5),
                    NonUnitNormalError);
}

TEST_CASE("fault strength invariants on random 3D inputs") {
    FrictionLaw law;
    law.tau_c = 1.25;
    std::uint64_t state = 42;
    auto next = [&state]() {
        state = state * 6364136223846793005ULL + 1442695040888963407ULL;
        return static_cast<double>(state >> 11) / 9007199254740992.0 * 2.0 - 1.0;
    };
    for (int trial = 0; trial < 200; ++trial) {
        const std::array<double, 3> l{5.0 * next(), 5.0 * next(), 5.0 * next()};
        std::array<double, 3> n{next(), next(), next()};
        const double norm = std::sqrt(n[0] * n[0] + n[1] * n[1] + n[2] * n[2]);
        if (norm < 1e-3) continue;
        for (double& c : n) c /= norm;
        const double mu_f = 0.5 * (next() + 1.0);
        const auto out = fault_strength(l, n, law, mu_f);
        CHECK(out.tau >= 0.0);
        const double ln = l[0] * n[0] + l[1] * n[1] + l[2] * n[2];
        if (ln < 0.0) CHECK(out.tau_f >= law.tau_c);
    }
}
