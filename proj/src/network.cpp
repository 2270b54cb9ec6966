#include "salnet/network.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "salnet/format.hpp"

namespace salnet {

Vector DenseLayer::pre_activation(std::span<const double> x) const {
    Vector out(outputs());
    pre_activation_into(x, out);
    return out;
}

void DenseLayer::pre_activation_into(std::span<const double> x, std::span<double> out) const {
    matvec_into(w, x, out);
    if (has_bias())
        for (std::size_t j = 0; j < out.size(); ++j) out[j] += theta[j];
}

void DenseLayer::enforce_mask() {
    auto wd = w.data();
    auto md = mask.data();
    for (std::size_t i = 0; i < wd.size(); ++i)
        if (md[i] == 0.0) wd[i] = 0.0;
}

std::size_t DenseLayer::active_connections() const {
    std::size_t count = 0;
    for (double m : mask.data()) count += m != 0.0;
    return count;
}

DenseLayer make_layer(const LayerInit& init, Rng& rng) {
    if (!(init.connection_rate >= 0.0 && init.connection_rate <= 1.0))
        throw std::invalid_argument("make_layer: connection rate must lie in [0, 1]");
    if (init.weight_range < 0.0 || init.bias_range < 0.0)
        throw std::invalid_argument("make_layer: negative initialisation range");

    DenseLayer layer;
    layer.group = init.group;
    layer.w = Matrix(init.outputs, init.inputs);
    layer.mask = Matrix(init.outputs, init.inputs, 1.0);
    layer.sal.assign(init.outputs, SalState{});

    const bool square = init.outputs == init.inputs;
    for (std::size_t i = 0; i < init.outputs; ++i) {
        for (std::size_t j = 0; j < init.inputs; ++j) {
            bool active = init.connection_rate >= 1.0 ? true : rng.bernoulli(init.connection_rate);
            if (square && i == j && !init.allow_self_connections) active = false;
            layer.mask(i, j) = active ? 1.0 : 0.0;
        }
    }
    if (init.weight_range > 0.0) {
        for (std::size_t i = 0; i < init.outputs; ++i)
            for (std::size_t j = 0; j < init.inputs; ++j)
                if (layer.mask(i, j) != 0.0) layer.w(i, j) = rng.uniform(-init.weight_range, init.weight_range);
    }
    if (init.bias) {
        layer.theta.assign(init.outputs, 0.0);
        if (init.bias_range > 0.0)
            for (auto& b : layer.theta) b = rng.uniform(-init.bias_range, init.bias_range);
    }
    return layer;
}

SalStepStats apply_sal(DenseLayer& layer, std::span<const double> o, std::span<const double> x,
                       const SalConfig& config, std::span<char> fired) {
    if (o.size() != layer.outputs() || x.size() != layer.inputs())
        throw std::invalid_argument("apply_sal: dimension mismatch");
    SalStepStats stats;
    for (std::size_t j = 0; j < layer.outputs(); ++j) {
        auto row = layer.w.row(j);
        const double w_norm = norm(row);
        const double s = tanh_derivative_from_output(o[j]) * w_norm;
        stats.sum_s += s;
        stats.sum_s2 += s * s;
        if (!observe_and_gate(layer.sal[j], config, s, w_norm)) continue;
        if (w_norm == 0.0) continue;
        if (layer.has_bias()) layer.theta[j] += sal_delta_theta(o[j], w_norm, config);
        apply_sal_delta_w(row, layer.mask.row(j), x, o[j], config);
        ++stats.applied;
        if (!fired.empty()) fired[j] = 1;
    }
    return stats;
}

Vector layer_sensitivities(const DenseLayer& layer, std::span<const double> o) {
    if (o.size() != layer.outputs()) throw std::invalid_argument("layer_sensitivities: dimension mismatch");
    Vector s(layer.outputs());
    for (std::size_t j = 0; j < s.size(); ++j) s[j] = tanh_derivative_from_output(o[j]) * layer.weight_norm(j);
    return s;
}

Matrix layer_jacobian(std::span<const double> pre_activation, const Matrix& w) {
    if (pre_activation.size() != w.rows()) throw std::invalid_argument("layer_jacobian: dimension mismatch");
    Matrix j = w;
    for (std::size_t r = 0; r < w.rows(); ++r) {
        const double t = std::tanh(pre_activation[r]);
        const double fprime = 1.0 - t * t;
        for (auto& x : j.row(r)) x *= fprime;
    }
    return j;
}

// ---------------------------------------------------------------------------

namespace {

void tanh_into(std::span<const double> u, std::span<double> o) {
    for (std::size_t i = 0; i < u.size(); ++i) o[i] = std::tanh(u[i]);
}

void require_perturbation(std::span<const double> p, std::size_t n) {
    if (!p.empty() && p.size() != n) throw std::invalid_argument("perturbation has the wrong dimension");
}

}  // namespace

FlatRnn init_flat_rnn(const FlatRnnSpec& spec, Rng& rng) {
    LayerInit init;
    init.outputs = init.inputs = spec.neurons;
    init.connection_rate = spec.connection_rate;
    init.weight_range = spec.weight_range;
    init.allow_self_connections = spec.self_connections;
    init.group = "recurrent";
    FlatRnn net;
    net.recurrent = make_layer(init, rng);
    net.u.assign(spec.neurons, 0.0);
    net.o.assign(spec.neurons, 0.0);
    return net;
}

void flat_step(FlatRnn& net, std::span<const double> perturbation) {
    require_perturbation(perturbation, net.size());
    Vector next = matvec(net.recurrent.w, net.o);
    if (!perturbation.empty()) axpy(1.0, perturbation, next);
    net.u = std::move(next);
    tanh_into(net.u, net.o);
    ++net.t;
}

TwoLayerRnn init_two_layer_rnn(const TwoLayerRnnSpec& spec, Rng& rng) {
    TwoLayerRnn net;
    LayerInit first;
    first.outputs = spec.first;
    first.inputs = spec.second;
    first.connection_rate = spec.rate_first_from_second;
    first.weight_range = spec.weight_range;
    first.group = "first";
    LayerInit second;
    second.outputs = spec.second;
    second.inputs = spec.first;
    second.connection_rate = spec.rate_second_from_first;
    second.weight_range = spec.weight_range;
    second.group = "second";
    net.first = make_layer(first, rng);
    net.second = make_layer(second, rng);
    net.u1.assign(spec.first, 0.0);
    net.o1.assign(spec.first, 0.0);
    net.u2.assign(spec.second, 0.0);
    net.o2.assign(spec.second, 0.0);
    return net;
}

void two_layer_step(TwoLayerRnn& net, std::span<const double> perturbation) {
    require_perturbation(perturbation, net.u1.size());
    matvec_into(net.second.w, net.o1, net.u2);
    tanh_into(net.u2, net.o2);
    matvec_into(net.first.w, net.o2, net.u1);
    if (!perturbation.empty()) axpy(1.0, perturbation, net.u1);
    tanh_into(net.u1, net.o1);
    ++net.t;
}

void ElmanRnn::reset_state() {
    u.assign(feedback.outputs(), 0.0);
    o.assign(feedback.outputs(), 0.0);
    t = 0;
}

ElmanRnn init_elman_rnn(const ElmanSpec& spec, Rng& rng) {
    ElmanRnn net;
    LayerInit in;
    in.outputs = spec.hidden;
    in.inputs = spec.inputs;
    in.weight_range = spec.input_range;
    in.group = "input";
    LayerInit fb;
    fb.outputs = fb.inputs = spec.hidden;
    fb.weight_range = spec.feedback_range;
    fb.bias = true;
    fb.bias_range = spec.feedback_range;
    fb.group = "feedback";
    LayerInit out;
    out.outputs = spec.outputs;
    out.inputs = spec.hidden;
    out.weight_range = spec.output_range;
    out.bias = true;
    out.bias_range = spec.output_range;
    out.group = "output";
    net.input = make_layer(in, rng);
    net.feedback = make_layer(fb, rng);
    net.output = make_layer(out, rng);
    net.reset_state();
    return net;
}

void elman_step(ElmanRnn& net, std::span<const double> x) {
    if (x.size() != net.input.inputs()) throw std::invalid_argument("elman_step: input dimension mismatch");
    Vector next = net.feedback.pre_activation(net.o);
    for (std::size_t j = 0; j < next.size(); ++j) next[j] += dot(net.input.w.row(j), x);
    net.u = std::move(next);
    tanh_into(net.u, net.o);
    ++net.t;
}

OutputRead elman_output(const ElmanRnn& net) {
    OutputRead read;
    read.pre_activation = net.output.pre_activation(net.o);
    read.o.resize(read.pre_activation.size());
    tanh_into(read.pre_activation, read.o);
    return read;
}

Dfnn init_dfnn(const DfnnSpec& spec, Rng& rng) {
    if (spec.layers < 3) throw std::invalid_argument("init_dfnn: need at least 3 layers (input, hidden, output)");
    Dfnn net;
    const std::size_t hidden = spec.layers - 2;
    for (std::size_t k = 0; k <= hidden; ++k) {
        LayerInit init;
        init.inputs = k == 0 ? spec.inputs : spec.width;
        init.outputs = k == hidden ? spec.outputs : spec.width;
        init.weight_range = k == 0 ? spec.input_range : (k == hidden ? spec.output_range : spec.hidden_range);
        init.bias = true;
        init.bias_range = init.weight_range;
        init.group = k == 0 ? "input" : (k == hidden ? "output" : "hidden");
        net.layers.push_back(make_layer(init, rng));
    }
    return net;
}

ForwardTrace dfnn_forward(const Dfnn& net, std::span<const double> x) {
    if (net.layers.empty() || x.size() != net.layers.front().inputs())
        throw std::invalid_argument("dfnn_forward: input dimension mismatch");
    ForwardTrace trace;
    trace.inputs.reserve(net.layers.size());
    trace.pre_activation.reserve(net.layers.size());
    trace.outputs.reserve(net.layers.size());
    Vector current(x.begin(), x.end());
    for (const auto& layer : net.layers) {
        Vector u = layer.pre_activation(current);
        Vector o(u.size());
        tanh_into(u, o);
        trace.inputs.push_back(std::move(current));
        trace.pre_activation.push_back(std::move(u));
        current = o;
        trace.outputs.push_back(std::move(o));
    }
    return trace;
}

double dfnn_output(const Dfnn& net, std::span<const double> x) {
    Vector current(x.begin(), x.end());
    Vector next;
    for (const auto& layer : net.layers) {
        next.resize(layer.outputs());
        layer.pre_activation_into(current, next);
        for (auto& v : next) v = std::tanh(v);
        current.swap(next);
    }
    return current.front();
}

// ---------------------------------------------------------------------------
// Snapshots

Snapshot to_snapshot(const FlatRnn& net) {
    return {"flat", {net.recurrent}, {net.u, net.o}, net.t};
}

Snapshot to_snapshot(const TwoLayerRnn& net) {
    return {"two-layer", {net.first, net.second}, {net.u1, net.o1, net.u2, net.o2}, net.t};
}

Snapshot to_snapshot(const ElmanRnn& net) {
    return {"elman", {net.input, net.feedback, net.output}, {net.u, net.o}, net.t};
}

Snapshot to_snapshot(const Dfnn& net) { return {"dfnn", net.layers, {}, 0}; }

namespace {

void expect_shape(const Snapshot& snap, const char* topology, std::size_t layers, std::size_t states) {
    if (snap.topology != topology || snap.layers.size() != layers || snap.state.size() != states)
        throw std::runtime_error(std::string("snapshot is not a valid ") + topology + " network");
}

}  // namespace

FlatRnn flat_from_snapshot(const Snapshot& snap) {
    expect_shape(snap, "flat", 1, 2);
    FlatRnn net;
    net.recurrent = snap.layers[0];
    net.u = snap.state[0];
    net.o = snap.state[1];
    net.t = snap.t;
    return net;
}

TwoLayerRnn two_layer_from_snapshot(const Snapshot& snap) {
    expect_shape(snap, "two-layer", 2, 4);
    TwoLayerRnn net;
    net.first = snap.layers[0];
    net.second = snap.layers[1];
    net.u1 = snap.state[0];
    net.o1 = snap.state[1];
    net.u2 = snap.state[2];
    net.o2 = snap.state[3];
    net.t = snap.t;
    return net;
}

ElmanRnn elman_from_snapshot(const Snapshot& snap) {
    expect_shape(snap, "elman", 3, 2);
    ElmanRnn net;
    net.input = snap.layers[0];
    net.feedback = snap.layers[1];
    net.output = snap.layers[2];
    net.u = snap.state[0];
    net.o = snap.state[1];
    net.t = snap.t;
    return net;
}

Dfnn dfnn_from_snapshot(const Snapshot& snap) {
    if (snap.topology != "dfnn" || snap.layers.empty()) throw std::runtime_error("snapshot is not a valid dfnn network");
    return Dfnn{snap.layers};
}

namespace {

void write_values(std::ostringstream& out, std::span<const double> values) {
    for (std::size_t i = 0; i < values.size(); ++i) out << (i ? " " : "") << format_double(values[i]);
    out << '\n';
}

}  // namespace

// Format (one item per line, whitespace separated):
//   salnet-snapshot 1
//   topology <name>
//   t <step>
//   layers <count>
//   per layer:
//     layer <group> <rows> <cols> <has_bias 0|1>
//     w <rows*cols values>
//     mask <rows*cols values>
//     theta <rows values>            (only when has_bias)
//     sal <rows triples s_bar n reached>
//   states <count>
//   per state vector: state <len> <values>
std::string write_snapshot(const Snapshot& snap) {
    std::ostringstream out;
    out << "salnet-snapshot 1\n";
    out << "topology " << snap.topology << '\n';
    out << "t " << snap.t << '\n';
    out << "layers " << snap.layers.size() << '\n';
    for (const auto& layer : snap.layers) {
        out << "layer " << (layer.group.empty() ? "-" : layer.group) << ' ' << layer.w.rows() << ' '
            << layer.w.cols() << ' ' << (layer.has_bias() ? 1 : 0) << '\n';
        out << "w ";
        write_values(out, layer.w.data());
        out << "mask ";
        write_values(out, layer.mask.data());
        if (layer.has_bias()) {
            out << "theta ";
            write_values(out, layer.theta);
        }
        out << "sal";
        for (const auto& s : layer.sal)
            out << ' ' << format_double(s.s_bar) << ' ' << s.n << ' ' << (s.reached_target_once ? 1 : 0);
        out << '\n';
    }
    out << "states " << snap.state.size() << '\n';
    for (const auto& v : snap.state) {
        out << "state " << v.size() << (v.empty() ? "" : " ");
        write_values(out, v);
    }
    return out.str();
}

namespace {

class Reader {
public:
    explicit Reader(const std::string& text) : in_(text) {}

    std::string word() {
        std::string w;
        if (!(in_ >> w)) throw std::runtime_error("snapshot: unexpected end of input");
        return w;
    }
    void expect(const std::string& keyword) {
        const auto w = word();
        if (w != keyword) throw std::runtime_error("snapshot: expected '" + keyword + "', found '" + w + "'");
    }
    std::uint64_t integer() {
        const auto w = word();
        try {
            std::size_t pos = 0;
            const auto v = std::stoull(w, &pos);
            if (pos != w.size()) throw std::invalid_argument(w);
            return v;
        } catch (const std::exception&) {
            throw std::runtime_error("snapshot: expected integer, found '" + w + "'");
        }
    }
    double real() {
        const auto w = word();
        try {
            return parse_double(w);
        } catch (const std::invalid_argument&) {
            throw std::runtime_error("snapshot: expected number, found '" + w + "'");
        }
    }
    void reals(std::span<double> out) {
        for (auto& v : out) v = real();
    }

private:
    std::istringstream in_;
};

}  // namespace

Snapshot read_snapshot(const std::string& text) {
    Reader in(text);
    in.expect("salnet-snapshot");
    if (in.integer() != 1) throw std::runtime_error("snapshot: unsupported version");
    Snapshot snap;
    in.expect("topology");
    snap.topology = in.word();
    in.expect("t");
    snap.t = in.integer();
    in.expect("layers");
    const auto layer_count = in.integer();
    for (std::uint64_t k = 0; k < layer_count; ++k) {
        DenseLayer layer;
        in.expect("layer");
        layer.group = in.word();
        if (layer.group == "-") layer.group.clear();
        const auto rows = in.integer();
        const auto cols = in.integer();
        const auto bias = in.integer();
        layer.w = Matrix(rows, cols);
        layer.mask = Matrix(rows, cols);
        in.expect("w");
        in.reals(layer.w.data());
        in.expect("mask");
        in.reals(layer.mask.data());
        if (bias) {
            layer.theta.resize(rows);
            in.expect("theta");
            in.reals(layer.theta);
        }
        in.expect("sal");
        layer.sal.resize(rows);
        for (auto& s : layer.sal) {
            s.s_bar = in.real();
            s.n = in.integer();
            s.reached_target_once = in.integer() != 0;
        }
        snap.layers.push_back(std::move(layer));
    }
    in.expect("states");
    const auto state_count = in.integer();
    for (std::uint64_t k = 0; k < state_count; ++k) {
        in.expect("state");
        Vector v(in.integer());
        in.reals(v);
        snap.state.push_back(std::move(v));
    }
    return snap;
}

}  // namespace salnet
