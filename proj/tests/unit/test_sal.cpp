#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "oracles.hpp"
#include "salnet/rng.hpp"
#include "salnet/sal.hpp"

using namespace salnet;

TEST_CASE("sensitivity is f'(U) times the weight norm") {
    const Vector w{0.3, -0.4};
    CHECK(sensitivity(0.0, w) == doctest::Approx(0.5));
    const double t = std::tanh(1.2);
    CHECK(sensitivity(1.2, w) == doctest::Approx((1 - t * t) * 0.5));
    CHECK(sensitivity(0.7, Vector{0.0, 0.0}) == 0.0);
}

TEST_CASE("moving average follows the recursion from zero") {
    SalState s;
    s = update_moving_average(s, 1.0, 0.99);
    CHECK(s.s_bar == doctest::Approx(0.01));
    CHECK(s.n == 1);
    s = update_moving_average(s, 1.0, 0.99);
    CHECK(s.s_bar == doctest::Approx(0.0199));
    // Constant input converges to that input.
    for (int i = 0; i < 5000; ++i) s = update_moving_average(s, 2.0, 0.99);
    CHECK(s.s_bar == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(s.n == 5002);
}

TEST_CASE("gate applies at or below the target") {
    SalConfig cfg;
    SalState s;
    s.s_bar = 1.0;
    CHECK(sal_gate(s, cfg));
    s.s_bar = std::nextafter(1.0, 2.0);
    CHECK_FALSE(sal_gate(s, cfg));
    cfg.mode = SalMode::off;
    s.s_bar = 0.0;
    CHECK_FALSE(sal_gate(s, cfg));
    cfg.mode = SalMode::always;
    s.s_bar = 10.0;
    CHECK(sal_gate(s, cfg));
}

TEST_CASE("linear criterion averages the weight norm instead of s") {
    SalConfig cfg;
    cfg.criterion = SalCriterion::linear;
    cfg.beta = 0.5;
    SalState s;
    CHECK(observe_and_gate(s, cfg, 0.1, 1.6));
    CHECK(s.s_bar == doctest::Approx(0.8));
    CHECK_FALSE(observe_and_gate(s, cfg, 0.1, 1.6));
    CHECK(s.s_bar == doctest::Approx(1.2));
    cfg.criterion = SalCriterion::nonlinear;
    SalState t;
    CHECK(observe_and_gate(t, cfg, 0.1, 100.0));
    CHECK(t.s_bar == doctest::Approx(0.05));
}

TEST_CASE("once mode stops for good after the target is first exceeded") {
    SalConfig cfg;
    cfg.mode = SalMode::once;
    cfg.beta = 0.0;  // s_bar = s
    SalState s;
    CHECK(observe_and_gate(s, cfg, 0.5, 1.0));
    CHECK_FALSE(s.reached_target_once);
    CHECK_FALSE(observe_and_gate(s, cfg, 1.5, 1.0));
    CHECK(s.reached_target_once);
    CHECK_FALSE(observe_and_gate(s, cfg, 0.2, 1.0));

    cfg.mode = SalMode::continuous;
    SalState c;
    CHECK_FALSE(observe_and_gate(c, cfg, 1.5, 1.0));
    CHECK(observe_and_gate(c, cfg, 0.2, 1.0));
    CHECK_FALSE(c.reached_target_once);
}

TEST_CASE("SAL weight and bias updates are the gradient of s (finite differences)") {
    Rng rng(31);
    SalConfig cfg;
    cfg.eta_sal = 1.0;
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t m = 1 + rng.below(12);
        Vector w(m), x(m);
        for (auto& v : w) v = rng.uniform(-1.0, 1.0);
        for (auto& v : x) v = rng.uniform(-1.0, 1.0);
        double theta = rng.uniform(-1.0, 1.0);
        const double o = std::tanh(dot(w, x) + theta);

        auto analytic = *sal_delta_w(w, x, o, cfg);
        analytic.push_back(sal_delta_theta(o, norm(w), cfg));
        std::vector<double> params = w;
        params.push_back(theta);
        const auto numeric = oracle::numeric_gradient(params, [&] {
            const std::vector<double> wv(params.begin(), params.end() - 1);
            return oracle::sensitivity(wv, x, params.back());
        });
        worst = std::max(worst, oracle::relative_error(analytic, numeric));
    }
    CHECK(worst < 1e-6);
}

TEST_CASE("linear variant keeps only the radial term") {
    SalConfig cfg;
    cfg.eta_sal = 0.1;
    cfg.variant = SalVariant::linear_update;
    const Vector w{3.0, 4.0}, x{1.0, -1.0};
    const double o = 0.5;
    const auto dw = *sal_delta_w(w, x, o, cfg);
    CHECK(dw[0] == doctest::Approx(0.1 * 0.75 * 0.6));
    CHECK(dw[1] == doctest::Approx(0.1 * 0.75 * 0.8));
}

TEST_CASE("zero weight vector has no update direction") {
    SalConfig cfg;
    CHECK_FALSE(sal_delta_w(Vector{0.0, 0.0}, Vector{1.0, 1.0}, 0.3, cfg).has_value());
    Vector w{0.0, 0.0};
    const Vector mask{1.0, 1.0};
    CHECK_FALSE(apply_sal_delta_w(w, mask, Vector{1.0, 1.0}, 0.3, cfg));
    CHECK(w == Vector{0.0, 0.0});
}

TEST_CASE("masked entries are never updated") {
    SalConfig cfg;
    cfg.eta_sal = 0.5;
    Vector w{0.2, 0.0, -0.3};
    const Vector mask{1.0, 0.0, 1.0}, x{1.0, 1.0, 1.0};
    const auto full = *sal_delta_w(w, x, 0.2, cfg);
    const Vector before = w;
    CHECK(apply_sal_delta_w(w, mask, x, 0.2, cfg));
    CHECK(w[1] == 0.0);
    CHECK(w[0] == doctest::Approx(before[0] + full[0]));
    CHECK(w[2] == doctest::Approx(before[2] + full[2]));
}

TEST_CASE("SAL raises the sensitivity of a neuron") {
    Rng rng(32);
    SalConfig cfg;
    cfg.eta_sal = 1e-3;
    for (int trial = 0; trial < 50; ++trial) {
        Vector w(5), x(5);
        for (auto& v : w) v = rng.uniform(-0.5, 0.5);
        for (auto& v : x) v = rng.uniform(-1.0, 1.0);
        const double before = oracle::sensitivity(w, x, 0.0);
        const auto dw = *sal_delta_w(w, x, std::tanh(dot(w, x)), cfg);
        axpy(1.0, dw, w);
        CHECK(oracle::sensitivity(w, x, 0.0) > before);
    }
}

TEST_CASE("config validation and enum names") {
    SalConfig cfg;
    CHECK_NOTHROW(cfg.validate());
    cfg.beta = 1.5;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg.beta = 1.0;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg.beta = 0.0;
    CHECK_NOTHROW(cfg.validate());
    for (auto m : {SalMode::always, SalMode::continuous, SalMode::once, SalMode::off})
        CHECK(parse_sal_mode(to_string(m)) == m);
    CHECK(parse_sal_variant("linear") == SalVariant::linear_update);
    CHECK(parse_sal_criterion("nonlinear") == SalCriterion::nonlinear);
    CHECK_THROWS_AS(parse_sal_mode("sometimes"), std::invalid_argument);
}
