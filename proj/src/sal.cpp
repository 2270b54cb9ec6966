#include "salnet/sal.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace salnet {

void SalConfig::validate() const {
    if (!(beta >= 0.0 && beta < 1.0)) throw std::invalid_argument("sal: beta must satisfy 0 <= beta < 1");
    if (!(eta_sal > 0.0)) throw std::invalid_argument("sal: eta_sal must be > 0");
    if (!(target > 0.0)) throw std::invalid_argument("sal: target must be > 0");
}

double sensitivity(double pre_activation, std::span<const double> w) {
    const double o = std::tanh(pre_activation);
    return tanh_derivative_from_output(o) * norm(w);
}

SalState update_moving_average(SalState state, double s, double beta) {
    state.s_bar = beta * state.s_bar + (1.0 - beta) * s;
    ++state.n;
    return state;
}

bool sal_gate(const SalState& state, const SalConfig& config) {
    switch (config.mode) {
        case SalMode::off:
            return false;
        case SalMode::always:
            return true;
        case SalMode::once:
            if (state.reached_target_once) return false;
            [[fallthrough]];
        case SalMode::continuous:
            return state.s_bar <= config.target;
    }
    return false;
}

bool observe_and_gate(SalState& state, const SalConfig& config, double s, double w_norm) {
    const double tracked = config.criterion == SalCriterion::nonlinear ? s : w_norm;
    state = update_moving_average(state, tracked, config.beta);
    const bool apply = sal_gate(state, config);
    if (!apply && config.mode == SalMode::once && state.s_bar > config.target)
        state.reached_target_once = true;
    return apply;
}

std::optional<Vector> sal_delta_w(std::span<const double> w, std::span<const double> x, double o,
                                  const SalConfig& config) {
    if (w.size() != x.size()) throw std::invalid_argument("sal_delta_w: w and x differ in length");
    const double w_norm = norm(w);
    if (w_norm == 0.0) return std::nullopt;
    const double gain = config.eta_sal * (1.0 - o * o);
    const double radial = gain / w_norm;
    const double nonlinear = config.variant == SalVariant::full_nonlinear ? -2.0 * gain * o * w_norm : 0.0;
    Vector dw(w.size());
    for (std::size_t i = 0; i < w.size(); ++i) dw[i] = radial * w[i] + nonlinear * x[i];
    return dw;
}

bool apply_sal_delta_w(std::span<double> w, std::span<const double> mask, std::span<const double> x,
                       double o, const SalConfig& config) {
    if (w.size() != x.size() || w.size() != mask.size())
        throw std::invalid_argument("apply_sal_delta_w: length mismatch");
    const double w_norm = norm(w);
    if (w_norm == 0.0) return false;
    const double gain = config.eta_sal * (1.0 - o * o);
    const double radial = gain / w_norm;
    const double nonlinear = config.variant == SalVariant::full_nonlinear ? -2.0 * gain * o * w_norm : 0.0;
    for (std::size_t i = 0; i < w.size(); ++i)
        if (mask[i] != 0.0) w[i] += radial * w[i] + nonlinear * x[i];
    return true;
}

double sal_delta_theta(double o, double w_norm, const SalConfig& config) {
    return -2.0 * config.eta_sal * o * (1.0 - o * o) * w_norm;
}

std::string_view to_string(SalMode mode) {
    switch (mode) {
        case SalMode::always: return "always";
        case SalMode::continuous: return "continuous";
        case SalMode::once: return "once";
        case SalMode::off: return "off";
    }
    return "?";
}

std::string_view to_string(SalVariant variant) {
    return variant == SalVariant::full_nonlinear ? "nonlinear" : "linear";
}

std::string_view to_string(SalCriterion criterion) {
    return criterion == SalCriterion::nonlinear ? "nonlinear" : "linear";
}

SalMode parse_sal_mode(std::string_view text) {
    if (text == "always") return SalMode::always;
    if (text == "continuous") return SalMode::continuous;
    if (text == "once") return SalMode::once;
    if (text == "off") return SalMode::off;
    throw std::invalid_argument("unknown SAL mode: " + std::string(text));
}

SalVariant parse_sal_variant(std::string_view text) {
    if (text == "nonlinear") return SalVariant::full_nonlinear;
    if (text == "linear") return SalVariant::linear_update;
    throw std::invalid_argument("unknown SAL variant: " + std::string(text));
}

SalCriterion parse_sal_criterion(std::string_view text) {
    if (text == "nonlinear") return SalCriterion::nonlinear;
    if (text == "linear") return SalCriterion::linear;
    throw std::invalid_argument("unknown SAL criterion: " + std::string(text));
}

}  // namespace salnet
