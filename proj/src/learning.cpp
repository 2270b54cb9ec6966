#include "salnet/learning.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace salnet {

double squash_delta(double delta_hat, double fprime, bool enabled) {
    const double delta = delta_hat * fprime;
    return enabled ? std::tanh(delta) : delta;
}

Vector propagate_error(const Matrix& w, std::span<const double> pre_activation,
                       std::span<const double> delta_hat_upper, bool squash) {
    if (pre_activation.size() != w.rows() || delta_hat_upper.size() != w.rows())
        throw std::invalid_argument("propagate_error: dimension mismatch");
    Vector delta(w.rows());
    for (std::size_t j = 0; j < delta.size(); ++j) {
        const double t = std::tanh(pre_activation[j]);
        delta[j] = squash_delta(delta_hat_upper[j], 1.0 - t * t, squash);
    }
    return matvec_transposed(w, delta);
}

std::string_view to_string(AblationCase c) {
    switch (c) {
        case AblationCase::A: return "A";
        case AblationCase::A2: return "A2";
        case AblationCase::B: return "B";
        case AblationCase::C: return "C";
        case AblationCase::D: return "D";
        case AblationCase::E: return "E";
        case AblationCase::F: return "F";
        case AblationCase::G: return "G";
    }
    return "?";
}

AblationCase parse_case(std::string_view text) {
    if (text == "A") return AblationCase::A;
    if (text == "A2" || text == "A'") return AblationCase::A2;
    if (text == "B") return AblationCase::B;
    if (text == "C") return AblationCase::C;
    if (text == "D") return AblationCase::D;
    if (text == "E") return AblationCase::E;
    if (text == "F") return AblationCase::F;
    if (text == "G") return AblationCase::G;
    throw std::invalid_argument("unknown case: " + std::string(text));
}

ElmanTrainConfig configure_case(AblationCase c, ElmanTrainConfig base) {
    base.ablation = c;
    base.tanh_in_backprop = c != AblationCase::A2;
    base.sal.mode = SalMode::continuous;
    base.sal.variant = SalVariant::full_nonlinear;
    base.sal.criterion = SalCriterion::nonlinear;
    switch (c) {
        case AblationCase::A:
        case AblationCase::A2:
            break;
        case AblationCase::B:
            base.sal.mode = SalMode::once;
            break;
        case AblationCase::C:
            base.sal.criterion = SalCriterion::linear;
            break;
        case AblationCase::D:
            base.sal.variant = SalVariant::linear_update;
            break;
        case AblationCase::E:
            base.sal.variant = SalVariant::linear_update;
            base.sal.criterion = SalCriterion::linear;
            break;
        case AblationCase::F:
        case AblationCase::G:
            base.sal.mode = SalMode::off;
            break;
    }
    return base;
}

namespace {

bool all_finite(std::span<const double> v) {
    return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

// W += eta * grad on unmasked entries.
void add_masked(DenseLayer& layer, double eta, const Matrix& grad) {
    auto w = layer.w.data();
    auto m = layer.mask.data();
    auto g = grad.data();
    for (std::size_t i = 0; i < w.size(); ++i)
        if (m[i] != 0.0) w[i] += eta * g[i];
}

}  // namespace

BpttResult bptt_pattern(ElmanRnn& net, const SequencePattern& pattern, const ElmanTrainConfig& config,
                        PatternMode mode) {
    const std::size_t hidden = net.feedback.outputs();
    const std::size_t channels = net.input.inputs();
    const std::size_t steps = pattern.output_step + 1;
    const bool learn = mode == PatternMode::learn;

    SalConfig sal = config.sal;
    if (!learn) sal.mode = SalMode::off;

    // Tape rows per step: inputs, previous hidden outputs, hidden outputs.
    Matrix xs(steps, channels), prev(steps, hidden), outs(steps, hidden);
    for (const auto& in : pattern.schedule)
        if (in.step < steps && in.channel < channels) xs(in.step, in.channel) = in.value;
    std::vector<char> fired(hidden, 0);
    double sum_s = 0.0, sum_s2 = 0.0;
    std::size_t s_count = 0;

    net.reset_state();
    for (std::size_t t = 0; t < steps; ++t) {
        std::copy(net.o.begin(), net.o.end(), prev.row(t).begin());
        elman_step(net, xs.row(t));
        if (t >= 1) {
            const auto stats = apply_sal(net.feedback, net.o, prev.row(t), sal, fired);
            sum_s += stats.sum_s;
            sum_s2 += stats.sum_s2;
            s_count += hidden;
        }
        std::copy(net.o.begin(), net.o.end(), outs.row(t).begin());
    }

    BpttResult result;
    const auto read = elman_output(net);
    result.output = read.o.front();
    result.error = pattern.target - result.output;
    if (s_count > 0) {
        result.sensitivity_mean = sum_s / static_cast<double>(s_count);
        const double var = sum_s2 / static_cast<double>(s_count) - result.sensitivity_mean * result.sensitivity_mean;
        result.sensitivity_std = std::sqrt(std::max(var, 0.0));
    }
    result.sal_neurons = static_cast<std::size_t>(std::count(fired.begin(), fired.end(), 1));
    if (!std::isfinite(result.output) || !all_finite(net.feedback.w.data()) || !all_finite(net.feedback.theta)) {
        result.diverged = true;
        return result;
    }

    // Backward through time.
    const bool squash = config.tanh_in_backprop;
    const std::size_t outputs = net.output.outputs();
    Vector delta_out(outputs);
    for (std::size_t k = 0; k < outputs; ++k) {
        const double target = k == 0 ? pattern.target : 0.0;
        const double o = read.o[k];
        delta_out[k] = squash_delta(target - o, 1.0 - o * o, squash && config.squash_output_delta);
    }

    Matrix grad_in(hidden, channels), grad_fb(hidden, hidden);
    Vector grad_bias(hidden, 0.0);
    Vector delta_hat = matvec_transposed(net.output.w, delta_out);
    Vector delta(hidden);
    for (std::size_t t = steps; t-- > 0;) {
        const auto o_t = outs.row(t);
        for (std::size_t j = 0; j < hidden; ++j) {
            const double o = o_t[j];
            delta[j] = squash_delta(delta_hat[j], 1.0 - o * o, squash);
        }
        for (std::size_t p = 0; p < kDeltaProbeSteps.size(); ++p)
            if (kDeltaProbeSteps[p] == t) result.delta_rms[p] = rms(delta);
        if (learn) {
            add_outer(grad_in, 1.0, delta, xs.row(t));
            add_outer(grad_fb, 1.0, delta, prev.row(t));
            axpy(1.0, delta, grad_bias);
        }
        if (t > 0) matvec_transposed_into(net.feedback.w, delta, delta_hat);
    }
    if (!all_finite(delta) || !all_finite(delta_out)) {
        result.diverged = true;
        return result;
    }
    if (!learn) return result;

    add_outer(net.output.w, config.eta_output, delta_out, outs.row(steps - 1));
    axpy(config.eta_output, delta_out, net.output.theta);
    add_masked(net.input, config.eta_input, grad_in);
    add_masked(net.feedback, config.eta_feedback, grad_fb);
    axpy(config.eta_feedback, grad_bias, net.feedback.theta);

    if (!all_finite(net.feedback.w.data()) || !all_finite(net.input.w.data()) || !all_finite(net.output.w.data()))
        result.diverged = true;
    return result;
}

ElmanRunResult run_elman_training(ElmanRnn& net, const std::vector<SequencePattern>& patterns,
                                  const ElmanTrainConfig& config, const ElmanRunOptions& options) {
    ElmanRunResult run;
    std::vector<double> errors(patterns.size(), 0.0);

    auto record_epoch = [&](std::size_t epoch, std::size_t p, const BpttResult& r) {
        errors[p] = r.error;
        if (options.keep_probes) run.probes.push_back({epoch, p, r});
    };
    auto epoch_rms = [&] {
        double sq = 0.0;
        for (double e : errors) sq += e * e;
        return std::sqrt(sq / static_cast<double>(errors.size()));
    };

    for (std::size_t p = 0; p < patterns.size(); ++p) {
        const auto r = bptt_pattern(net, patterns[p], config, PatternMode::observe);
        record_epoch(0, p, r);
        if (r.diverged) {
            run.diverged = true;
            run.rms_error.push_back(epoch_rms());
            return run;
        }
    }
    run.rms_error.push_back(epoch_rms());
    if (options.on_epoch) options.on_epoch(0, net);

    run.epochs_used = config.max_epochs;
    for (std::size_t epoch = 1; epoch <= config.max_epochs; ++epoch) {
        for (std::size_t p = 0; p < patterns.size(); ++p) {
            const auto r = bptt_pattern(net, patterns[p], config, PatternMode::learn);
            record_epoch(epoch, p, r);
            if (r.diverged) {
                run.diverged = true;
                run.epochs_used = epoch;
                run.rms_error.push_back(epoch_rms());
                return run;
            }
        }
        run.rms_error.push_back(epoch_rms());
        if (options.on_epoch) options.on_epoch(epoch, net);
        const bool solved = std::all_of(errors.begin(), errors.end(),
                                        [&](double e) { return std::abs(e) < config.success_threshold; });
        if (solved) {
            run.success = true;
            run.epochs_used = epoch;
            break;
        }
    }
    return run;
}

// ---------------------------------------------------------------------------

double dfnn_learning_rate(std::size_t layers) {
    static constexpr std::array<std::pair<double, double>, 8> table = {{
        {3, 0.01}, {5, 0.003}, {10, 0.001}, {30, 0.0007},
        {100, 0.0005}, {200, 0.0004}, {300, 0.0003}, {1000, 0.0001},
    }};
    const double l = static_cast<double>(layers);
    if (l <= table.front().first) return table.front().second;
    if (l >= table.back().first) return table.back().second;
    for (std::size_t i = 1; i < table.size(); ++i) {
        const auto [l0, r0] = table[i - 1];
        const auto [l1, r1] = table[i];
        if (l == l1) return r1;
        if (l < l1) {
            const double f = std::log(l / l0) / std::log(l1 / l0);
            return std::exp(std::log(r0) + f * (std::log(r1) - std::log(r0)));
        }
    }
    return table.back().second;
}

DfnnTrainConfig dfnn_config_for_depth(std::size_t layers, bool with_sal) {
    DfnnTrainConfig cfg;
    cfg.eta_other = dfnn_learning_rate(layers);
    if (!with_sal) cfg.sal.mode = SalMode::off;
    return cfg;
}

BpResult bp_pattern(Dfnn& net, std::span<const double> input, double target, const DfnnTrainConfig& config,
                    PatternMode mode, bool record_deltas) {
    const bool learn = mode == PatternMode::learn;
    const std::size_t count = net.layers.size();
    SalConfig sal = config.sal;
    if (!learn) sal.mode = SalMode::off;

    std::vector<Vector> xs(count), outs(count);
    Vector current(input.begin(), input.end());
    BpResult result;
    for (std::size_t k = 0; k < count; ++k) {
        auto& layer = net.layers[k];
        Vector o = layer.pre_activation(current);
        for (auto& v : o) v = std::tanh(v);
        if (k + 1 < count) result.sal_applied += apply_sal(layer, o, current, sal).applied;
        xs[k] = std::move(current);
        current = o;
        outs[k] = std::move(o);
    }
    result.output = outs.back().front();
    result.error = target - result.output;
    if (!std::isfinite(result.output)) {
        result.diverged = true;
        return result;
    }

    const bool squash = config.tanh_in_backprop;
    if (record_deltas) result.delta_rms.assign(count - 1, 0.0);

    Vector delta(outs.back().size());
    for (std::size_t j = 0; j < delta.size(); ++j) {
        const double o = outs.back()[j];
        const double d = j == 0 ? target : 0.0;
        delta[j] = squash_delta(d - o, 1.0 - o * o, squash && config.squash_output_delta);
    }
    for (std::size_t k = count; k-- > 0;) {
        auto& layer = net.layers[k];
        Vector delta_hat_lower;
        if (k > 0) delta_hat_lower = matvec_transposed(layer.w, delta);
        if (learn) {
            const double eta = k == 0 ? config.eta_input : config.eta_other;
            add_outer(layer.w, eta, delta, xs[k]);
            if (layer.has_bias()) axpy(eta, delta, layer.theta);
        }
        if (k == 0) break;
        const auto& o_lower = outs[k - 1];
        delta.resize(o_lower.size());
        for (std::size_t j = 0; j < delta.size(); ++j)
            delta[j] = squash_delta(delta_hat_lower[j], 1.0 - o_lower[j] * o_lower[j], squash);
        if (record_deltas) result.delta_rms[k - 1] = rms(delta);
    }
    if (!all_finite(delta)) result.diverged = true;
    return result;
}

double dfnn_parity_rms_error(const Dfnn& net, double target) {
    Rng unused(0);
    double sq = 0.0;
    for (std::uint32_t bits = 0; bits < 256; ++bits) {
        const auto p = parity8_pattern(bits, unused, 0.0, target);
        const double e = p.target - dfnn_output(net, p.inputs);
        sq += e * e;
    }
    return std::sqrt(sq / 256.0);
}

DfnnRunResult run_dfnn_training(Dfnn& net, const DfnnTrainConfig& config, Rng& rng, const DfnnRunOptions& options) {
    DfnnRunResult run;
    const std::size_t hidden = net.layers.size() - 1;

    double sq_err = 0.0, sq_bottom = 0.0, sq_top = 0.0;
    for (std::uint32_t bits = 0; bits < 256; ++bits) {
        const auto p = parity8_pattern(bits, rng, config.noise, config.target);
        const auto r = bp_pattern(net, p.inputs, p.target, config, PatternMode::observe, true);
        sq_err += r.error * r.error;
        if (hidden > 0) {
            sq_bottom += r.delta_rms.front() * r.delta_rms.front();
            sq_top += r.delta_rms.back() * r.delta_rms.back();
        }
    }
    run.pre_delta_bottom = std::sqrt(sq_bottom / 256.0);
    run.pre_delta_top = std::sqrt(sq_top / 256.0);
    run.epoch_rms_error.push_back(std::sqrt(sq_err / 256.0));

    if (!options.pre_probe_only) {
        for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
            const auto order = shuffled_indices(rng, 256);
            sq_err = 0.0;
            for (std::size_t idx : order) {
                const auto p = parity8_pattern(static_cast<std::uint32_t>(idx), rng, config.noise, config.target);
                const auto r = bp_pattern(net, p.inputs, p.target, config, PatternMode::learn);
                if (r.diverged) {
                    run.diverged = true;
                    break;
                }
                sq_err += r.error * r.error;
            }
            if (run.diverged) break;
            run.epoch_rms_error.push_back(std::sqrt(sq_err / 256.0));
        }
    }
    run.final_rms_error = run.diverged ? std::nan("") : dfnn_parity_rms_error(net, config.target);
    return run;
}

}  // namespace salnet
