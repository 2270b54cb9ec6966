#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "salnet/matrix.hpp"
#include "salnet/rng.hpp"
#include "salnet/sal.hpp"

namespace salnet {

// One group of tanh neurons: weights, 0/1 connectivity mask, optional bias
// and per-neuron SAL state. Invariant: w(i,j) == 0 wherever mask(i,j) == 0.
struct DenseLayer {
    std::string group;
    Matrix w;
    Matrix mask;
    Vector theta;  // empty when the layer has no bias
    std::vector<SalState> sal;

    std::size_t outputs() const { return w.rows(); }
    std::size_t inputs() const { return w.cols(); }
    bool has_bias() const { return !theta.empty(); }
    double bias(std::size_t j) const { return theta.empty() ? 0.0 : theta[j]; }
    double weight_norm(std::size_t j) const { return norm(w.row(j)); }

    // U = W x + theta
    Vector pre_activation(std::span<const double> x) const;
    void pre_activation_into(std::span<const double> x, std::span<double> out) const;
    void enforce_mask();
    std::size_t active_connections() const;

    bool operator==(const DenseLayer&) const = default;
};

struct LayerInit {
    std::size_t outputs = 0;
    std::size_t inputs = 0;
    double connection_rate = 1.0;
    double weight_range = 0.0;  // weights ~ U[-range, range) on active entries
    bool bias = false;
    double bias_range = 0.0;
    bool allow_self_connections = true;  // only meaningful for square layers
    std::string group;
};

// Mask entries are i.i.d. Bernoulli(rate). A zero range yields exact zeros.
// Throws std::invalid_argument for rate outside [0, 1] or negative ranges.
DenseLayer make_layer(const LayerInit& init, Rng& rng);

struct SalStepStats {
    std::size_t applied = 0;
    double sum_s = 0.0;
    double sum_s2 = 0.0;
};

// Applies SAL to every neuron of `layer` after a forward computation that
// produced outputs `o` from inputs `x`. The sensitivity uses the layer's own
// (masked) incoming weights. Masked entries are never touched; the bias is
// updated whenever the weights are and the layer has a bias. When `fired`
// is non-empty, fired[j] is set to 1 for every neuron that was updated.
SalStepStats apply_sal(DenseLayer& layer, std::span<const double> o, std::span<const double> x,
                       const SalConfig& config, std::span<char> fired = {});

// Per-neuron sensitivities f'(U_j) ||w_j|| given the layer's outputs o = tanh(U).
Vector layer_sensitivities(const DenseLayer& layer, std::span<const double> o);

// Row j = f'(U_j) w_j^T.
Matrix layer_jacobian(std::span<const double> pre_activation, const Matrix& w);

// ---------------------------------------------------------------------------
// Topologies

struct FlatRnnSpec {
    std::size_t neurons = 100;
    double connection_rate = 1.0;
    double weight_range = 0.01;
    bool self_connections = true;
};

struct FlatRnn {
    DenseLayer recurrent;
    Vector u;
    Vector o;
    std::uint64_t t = 0;

    std::size_t size() const { return u.size(); }
};

FlatRnn init_flat_rnn(const FlatRnnSpec& spec, Rng& rng);
// u <- (W o) + perturbation; o <- tanh(u).
void flat_step(FlatRnn& net, std::span<const double> perturbation = {});

struct TwoLayerRnnSpec {
    std::size_t first = 1000;
    std::size_t second = 100;
    double rate_first_from_second = 0.1;
    double rate_second_from_first = 1.0;
    double weight_range = 0.03;
};

// `first` holds layer 1's incoming weights (from layer 2), `second` layer 2's
// incoming weights (from layer 1).
struct TwoLayerRnn {
    DenseLayer first;
    DenseLayer second;
    Vector u1, o1, u2, o2;
    std::uint64_t t = 0;
};

TwoLayerRnn init_two_layer_rnn(const TwoLayerRnnSpec& spec, Rng& rng);
// Layer 2 is computed from layer 1's current output, then layer 1 from the
// new layer-2 output; the perturbation is added to layer 1's u.
void two_layer_step(TwoLayerRnn& net, std::span<const double> perturbation = {});

struct ElmanSpec {
    std::size_t inputs = 3;
    std::size_t hidden = 20;
    std::size_t outputs = 1;
    double input_range = 0.0;
    double feedback_range = 0.1;
    double output_range = 0.3;
};

struct ElmanRnn {
    DenseLayer input;     // hidden <- input, no bias
    DenseLayer feedback;  // hidden <- hidden, carries the hidden bias and SAL state
    DenseLayer output;    // output <- hidden, with bias
    Vector u;             // hidden pre-activation U (bias included)
    Vector o;             // hidden output
    std::uint64_t t = 0;

    void reset_state();
};

ElmanRnn init_elman_rnn(const ElmanSpec& spec, Rng& rng);
// Hidden U = W_in x + W_fb o_prev + theta, o = tanh(U).
void elman_step(ElmanRnn& net, std::span<const double> x);

struct OutputRead {
    Vector pre_activation;
    Vector o;
};
OutputRead elman_output(const ElmanRnn& net);

struct DfnnSpec {
    std::size_t inputs = 8;
    std::size_t width = 20;
    std::size_t outputs = 1;
    // Counting input and output layers, so `layers - 2` hidden layers.
    std::size_t layers = 3;
    double input_range = 0.1;
    double hidden_range = 0.1;
    double output_range = 0.1;
};

struct Dfnn {
    std::vector<DenseLayer> layers;  // layers.back() is the output layer

    std::size_t hidden_layers() const { return layers.size() - 1; }
};

Dfnn init_dfnn(const DfnnSpec& spec, Rng& rng);

struct ForwardTrace {
    std::vector<Vector> inputs;           // input to each weight layer
    std::vector<Vector> pre_activation;   // U per layer
    std::vector<Vector> outputs;          // o per layer
};

ForwardTrace dfnn_forward(const Dfnn& net, std::span<const double> x);
double dfnn_output(const Dfnn& net, std::span<const double> x);

// ---------------------------------------------------------------------------
// Snapshots (see docs in README): a line-oriented text format holding every
// layer's weights, mask, bias and SAL state plus the dynamic state vectors.

struct Snapshot {
    std::string topology;  // flat | two-layer | elman | dfnn
    std::vector<DenseLayer> layers;
    std::vector<Vector> state;
    std::uint64_t t = 0;

    bool operator==(const Snapshot&) const = default;
};

Snapshot to_snapshot(const FlatRnn& net);
Snapshot to_snapshot(const TwoLayerRnn& net);
Snapshot to_snapshot(const ElmanRnn& net);
Snapshot to_snapshot(const Dfnn& net);
FlatRnn flat_from_snapshot(const Snapshot& snap);
TwoLayerRnn two_layer_from_snapshot(const Snapshot& snap);
ElmanRnn elman_from_snapshot(const Snapshot& snap);
Dfnn dfnn_from_snapshot(const Snapshot& snap);

std::string write_snapshot(const Snapshot& snap);
// Throws std::runtime_error on malformed input.
Snapshot read_snapshot(const std::string& text);

}  // namespace salnet
