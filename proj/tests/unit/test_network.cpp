#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "oracles.hpp"
#include "salnet/network.hpp"
#include "salnet/rng.hpp"

using namespace salnet;

TEST_CASE("layer initialisation respects rate, range and self connections") {
    Rng rng(41);
    LayerInit init;
    init.outputs = init.inputs = 200;
    init.connection_rate = 0.3;
    init.weight_range = 0.01;
    init.allow_self_connections = false;
    const auto layer = make_layer(init, rng);
    const double rate = static_cast<double>(layer.active_connections()) / (200.0 * 200.0);
    CHECK(rate == doctest::Approx(0.3 * 199.0 / 200.0).epsilon(0.03));
    for (std::size_t i = 0; i < 200; ++i) CHECK(layer.mask(i, i) == 0.0);
    for (std::size_t k = 0; k < layer.w.data().size(); ++k) {
        const double w = layer.w.data()[k];
        REQUIRE(std::abs(w) <= 0.01);
        if (layer.mask.data()[k] == 0.0) REQUIRE(w == 0.0);
    }
    CHECK_FALSE(layer.has_bias());
    CHECK(layer.sal.size() == 200);
}

TEST_CASE("zero range gives exact zeros and bad rates throw") {
    Rng rng(42);
    LayerInit init;
    init.outputs = 3;
    init.inputs = 4;
    init.bias = true;
    const auto layer = make_layer(init, rng);
    for (double w : layer.w.data()) CHECK(w == 0.0);
    for (double b : layer.theta) CHECK(b == 0.0);
    CHECK(layer.active_connections() == 12);
    init.connection_rate = 1.5;
    CHECK_THROWS_AS(make_layer(init, rng), std::invalid_argument);
    init.connection_rate = 1.0;
    init.weight_range = -1.0;
    CHECK_THROWS_AS(make_layer(init, rng), std::invalid_argument);
}

TEST_CASE("flat step is u = W o + p, o = tanh u") {
    Rng rng(43);
    auto net = init_flat_rnn({5, 1.0, 0.5, true}, rng);
    net.o = {0.1, -0.2, 0.3, 0.0, 0.5};
    const Vector p{0.01, 0.0, 0.0, -0.02, 0.0};
    const Eigen::VectorXd expected = oracle::to_eigen(net.recurrent.w) * oracle::to_eigen(net.o) + oracle::to_eigen(p);
    flat_step(net, p);
    for (std::size_t i = 0; i < 5; ++i) {
        CHECK(net.u[i] == doctest::Approx(expected(static_cast<Eigen::Index>(i))));
        CHECK(net.o[i] == doctest::Approx(std::tanh(net.u[i])));
    }
    CHECK(net.t == 1);
    CHECK_THROWS_AS(flat_step(net, Vector(3)), std::invalid_argument);
}

TEST_CASE("two-layer step updates layer 2 first, then layer 1 from the new layer 2") {
    Rng rng(44);
    auto net = init_two_layer_rnn({6, 3, 0.5, 1.0, 0.5}, rng);
    net.o1 = {0.1, 0.2, -0.3, 0.4, -0.5, 0.6};
    const auto w1 = oracle::to_eigen(net.first.w), w2 = oracle::to_eigen(net.second.w);
    const Eigen::VectorXd o2 = (w2 * oracle::to_eigen(net.o1)).array().tanh();
    const Eigen::VectorXd o1 = (w1 * o2).array().tanh();
    two_layer_step(net);
    for (std::size_t i = 0; i < 3; ++i) CHECK(net.o2[i] == doctest::Approx(o2(static_cast<Eigen::Index>(i))));
    for (std::size_t i = 0; i < 6; ++i) CHECK(net.o1[i] == doctest::Approx(o1(static_cast<Eigen::Index>(i))));
}

TEST_CASE("Elman step and output") {
    Rng rng(45);
    auto net = init_elman_rnn({3, 4, 1, 0.5, 0.5, 0.5}, rng);
    SequencePattern p;
    p.schedule = {{0, 0, 1.0}, {1, 2, -1.0}};
    p.output_step = 2;
    for (std::size_t t = 0; t <= 2; ++t) elman_step(net, p.input_at(t, 3));
    CHECK(elman_output(net).o.front() == doctest::Approx(oracle::elman_forward(net, p)));
    net.reset_state();
    CHECK(net.t == 0);
    for (double o : net.o) CHECK(o == 0.0);
}

TEST_CASE("default Elman initialisation") {
    Rng rng(46);
    const auto net = init_elman_rnn({}, rng);
    for (double w : net.input.w.data()) CHECK(w == 0.0);
    CHECK_FALSE(net.input.has_bias());
    CHECK(net.feedback.has_bias());
    CHECK(net.output.has_bias());
    for (double w : net.feedback.w.data()) CHECK(std::abs(w) <= 0.1);
    for (double b : net.feedback.theta) CHECK(std::abs(b) <= 0.1);
    for (double w : net.output.w.data()) CHECK(std::abs(w) <= 0.3);
}

TEST_CASE("DFNN structure counts input and output layers") {
    Rng rng(47);
    DfnnSpec spec;
    spec.layers = 5;
    const auto net = init_dfnn(spec, rng);
    CHECK(net.layers.size() == 4);
    CHECK(net.hidden_layers() == 3);
    CHECK(net.layers.front().inputs() == 8);
    CHECK(net.layers.back().outputs() == 1);
    for (const auto& l : net.layers) CHECK(l.has_bias());
    spec.layers = 2;
    CHECK_THROWS_AS(init_dfnn(spec, rng), std::invalid_argument);
}

TEST_CASE("DFNN forward matches a plain evaluation") {
    Rng rng(48);
    DfnnSpec spec;
    spec.layers = 7;
    spec.hidden_range = 0.6;
    const auto net = init_dfnn(spec, rng);
    const Vector x{1, -1, 1, 1, -1, -1, 1, -1};
    const auto trace = dfnn_forward(net, x);
    CHECK(trace.outputs.size() == 6);
    CHECK(dfnn_output(net, x) == doctest::Approx(oracle::dfnn_forward(net, x)));
    CHECK(trace.outputs.back().front() == doctest::Approx(oracle::dfnn_forward(net, x)));
}

TEST_CASE("layer Jacobian matches finite differences") {
    Rng rng(49);
    LayerInit init;
    init.outputs = 4;
    init.inputs = 3;
    init.weight_range = 0.8;
    const auto layer = make_layer(init, rng);
    Vector x{0.2, -0.5, 0.7};
    const auto u = layer.pre_activation(x);
    const auto jac = layer_jacobian(u, layer.w);
    for (std::size_t i = 0; i < 4; ++i) {
        auto fi = [&] { return std::tanh(layer.pre_activation(x)[i]); };
        const auto g = oracle::numeric_gradient(x, fi);
        for (std::size_t j = 0; j < 3; ++j) CHECK(jac(i, j) == doctest::Approx(g[j]).epsilon(1e-7));
    }
    const auto s = layer_sensitivities(layer, Vector{std::tanh(u[0]), std::tanh(u[1]), std::tanh(u[2]), std::tanh(u[3])});
    for (std::size_t i = 0; i < 4; ++i) CHECK(s[i] == doctest::Approx(norm(jac.row(i))));
}

TEST_CASE("apply_sal touches only gated neurons and reports them") {
    Rng rng(50);
    LayerInit init;
    init.outputs = 3;
    init.inputs = 3;
    init.weight_range = 0.5;
    init.bias = true;
    init.bias_range = 0.1;
    auto layer = make_layer(init, rng);
    const Vector x{0.5, -0.5, 0.2};
    Vector o = layer.pre_activation(x);
    for (auto& v : o) v = std::tanh(v);
    SalConfig cfg;
    cfg.mode = SalMode::off;
    const auto before = layer;
    std::vector<char> fired(3, 0);
    const auto stats = apply_sal(layer, o, x, cfg, fired);
    CHECK(stats.applied == 0);
    CHECK(layer.w == before.w);
    CHECK(layer.sal[0].n == 1);
    cfg.mode = SalMode::always;
    const auto stats2 = apply_sal(layer, o, x, cfg, fired);
    CHECK(stats2.applied == 3);
    CHECK(fired == std::vector<char>{1, 1, 1});
    CHECK_FALSE(layer.w == before.w);
    CHECK_FALSE(layer.theta == before.theta);
}

TEST_CASE("snapshots round-trip every topology") {
    Rng rng(51);
    auto flat = init_flat_rnn({10, 0.5, 0.3, false}, rng);
    flat_step(flat, random_unit_vector(rng, 10, 0.1));
    flat.recurrent.sal[3].s_bar = 0.123456789;
    flat.recurrent.sal[3].reached_target_once = true;
    const auto snap = to_snapshot(flat);
    const auto text = write_snapshot(snap);
    CHECK(read_snapshot(text) == snap);
    const auto back = flat_from_snapshot(read_snapshot(text));
    CHECK(back.recurrent == flat.recurrent);
    CHECK(back.o == flat.o);
    CHECK(back.t == flat.t);

    auto two = init_two_layer_rnn({8, 4, 0.5, 1.0, 0.03}, rng);
    CHECK(two_layer_from_snapshot(read_snapshot(write_snapshot(to_snapshot(two)))).first == two.first);
    auto elman = init_elman_rnn({}, rng);
    CHECK(elman_from_snapshot(read_snapshot(write_snapshot(to_snapshot(elman)))).feedback == elman.feedback);
    DfnnSpec spec;
    spec.layers = 6;
    auto dfnn = init_dfnn(spec, rng);
    const auto d2 = dfnn_from_snapshot(read_snapshot(write_snapshot(to_snapshot(dfnn))));
    CHECK(d2.layers == dfnn.layers);
}

TEST_CASE("malformed snapshots are rejected") {
    CHECK_THROWS_AS(read_snapshot(""), std::runtime_error);
    CHECK_THROWS_AS(read_snapshot("salnet-snapshot 2\n"), std::runtime_error);
    Rng rng(52);
    auto text = write_snapshot(to_snapshot(init_flat_rnn({4, 1.0, 0.1, true}, rng)));
    CHECK_THROWS_AS(read_snapshot(text.substr(0, text.size() / 2)), std::runtime_error);
    CHECK_THROWS_AS(flat_from_snapshot(to_snapshot(init_elman_rnn({}, rng))), std::runtime_error);
}
