#include "salnet/lyapunov.hpp"

#include <cmath>
#include <stdexcept>

namespace salnet {

LyapunovResult estimate_lambda(const StateMap& step, std::span<const double> start, Rng& rng,
                               const LyapunovOptions& opts) {
    if (start.empty()) throw std::invalid_argument("estimate_lambda: empty state");
    if (opts.window == 0 || !(opts.separation > 0.0)) throw std::invalid_argument("estimate_lambda: bad options");
    const std::size_t n = start.size();
    Vector u1(start.begin(), start.end());
    Vector u2 = u1;
    axpy(1.0, random_unit_vector(rng, n, opts.separation), u2);
    Vector next1(n), next2(n), diff(n);

    LyapunovResult result;
    double sum = 0.0;
    const std::size_t total = opts.warmup + opts.window;
    for (std::size_t tau = 1; tau <= total; ++tau) {
        step(u1, next1);
        step(u2, next2);
        u1.swap(next1);
        u2.swap(next2);
        for (std::size_t i = 0; i < n; ++i) diff[i] = u2[i] - u1[i];
        const double d = norm(diff);
        double l;
        if (d > 0.0 && std::isfinite(d)) {
            l = std::log(d / opts.separation);
            const double scale = opts.separation / d;
            for (std::size_t i = 0; i < n; ++i) u2[i] = u1[i] + scale * diff[i];
        } else {
            l = opts.log_floor;
            if (tau > opts.warmup) ++result.underflows;
            const auto kick = random_unit_vector(rng, n, opts.separation);
            for (std::size_t i = 0; i < n; ++i) u2[i] = u1[i] + kick[i];
        }
        if (tau > opts.warmup) sum += l;
    }
    result.lambda = sum / static_cast<double>(opts.window);
    return result;
}

LyapunovResult estimate_lambda(const FlatRnn& net, Rng& rng, const LyapunovOptions& opts) {
    const Matrix& w = net.recurrent.w;
    Vector o(net.size());
    StateMap step = [&](std::span<const double> in, std::span<double> out) {
        for (std::size_t i = 0; i < in.size(); ++i) o[i] = std::tanh(in[i]);
        matvec_into(w, o, out);
    };
    return estimate_lambda(step, net.u, rng, opts);
}

LyapunovResult estimate_lambda(const TwoLayerRnn& net, Rng& rng, const LyapunovOptions& opts) {
    Vector o1(net.u1.size()), u2(net.u2.size());
    StateMap step = [&](std::span<const double> in, std::span<double> out) {
        for (std::size_t i = 0; i < in.size(); ++i) o1[i] = std::tanh(in[i]);
        matvec_into(net.second.w, o1, u2);
        for (auto& v : u2) v = std::tanh(v);
        matvec_into(net.first.w, u2, out);
    };
    return estimate_lambda(step, net.u1, rng, opts);
}

LyapunovResult estimate_lambda(const ElmanRnn& net, Rng& rng, const LyapunovOptions& opts) {
    Vector o(net.u.size());
    StateMap step = [&](std::span<const double> in, std::span<double> out) {
        for (std::size_t i = 0; i < in.size(); ++i) o[i] = std::tanh(in[i]);
        net.feedback.pre_activation_into(o, out);
    };
    return estimate_lambda(step, net.u, rng, opts);
}

double log_rms(std::span<const double> sensitivities) {
    const double r = rms(sensitivities);
    if (!(r > 0.0)) return kLogSensitivityFloor;
    return std::max(std::log(r), kLogSensitivityFloor);
}

LogSensitivity log_sensitivity(const FlatRnn& net) {
    LogSensitivity out;
    const auto s = layer_sensitivities(net.recurrent, net.o);
    out.rms.push_back(rms(s));
    out.per_layer.push_back(log_rms(s));
    out.total = out.per_layer.front();
    return out;
}

LogSensitivity log_sensitivity(const TwoLayerRnn& net) {
    LogSensitivity out;
    for (const auto& [layer, o] : {std::pair{&net.first, &net.o1}, std::pair{&net.second, &net.o2}}) {
        const auto s = layer_sensitivities(*layer, *o);
        out.rms.push_back(rms(s));
        out.per_layer.push_back(log_rms(s));
        out.total += out.per_layer.back();
    }
    return out;
}

}  // namespace salnet
