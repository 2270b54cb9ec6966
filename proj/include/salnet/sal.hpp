#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>

#include "salnet/matrix.hpp"

namespace salnet {

// Which weight update is used: the full hill-climbing gradient of the
// sensitivity, or only its radial ("linear") term.
enum class SalVariant { full_nonlinear, linear_update };

// What is compared against the target to decide whether SAL applies:
// the moving average of the sensitivity, or the moving average of the
// weight norm ||w|| (same decay).
enum class SalCriterion { nonlinear, linear };

// always:     apply on every forward computation, no gating.
// continuous: apply whenever the criterion is <= target.
// once:       like continuous, but stop for good the first time the
//             criterion exceeds the target.
// off:        never apply.
enum class SalMode { always, continuous, once, off };

struct SalConfig {
    double eta_sal = 0.00002;
    double beta = 0.99;
    double target = 1.0;
    SalVariant variant = SalVariant::full_nonlinear;
    SalCriterion criterion = SalCriterion::nonlinear;
    SalMode mode = SalMode::continuous;

    // Throws std::invalid_argument unless 0 <= beta < 1, eta_sal > 0, target > 0.
    void validate() const;
};

struct SalState {
    double s_bar = 0.0;  // averages s, or ||w|| under the linear criterion
    std::uint64_t n = 0;  // forward computations seen; never reset
    bool reached_target_once = false;

    bool operator==(const SalState&) const = default;
};

inline double tanh_derivative_from_output(double o) { return 1.0 - o * o; }

// s = f'(U) ||w|| for f = tanh.
double sensitivity(double pre_activation, std::span<const double> w);

// s_bar <- beta s_bar + (1 - beta) s; n += 1.
SalState update_moving_average(SalState state, double s, double beta);

// Pure gating decision for a neuron whose moving average is already updated.
bool sal_gate(const SalState& state, const SalConfig& config);

// Records one forward computation: folds s (or w_norm, for the linear
// criterion) into the moving average, evaluates the gate and latches reached_target_once for SalMode::once. Returns the gate.
bool observe_and_gate(SalState& state, const SalConfig& config, double s, double w_norm);

// eta (1 - o^2) (w/||w|| - 2 o ||w|| x); the linear variant keeps only the
// first term. Returns nullopt when ||w|| = 0 (direction undefined).
std::optional<Vector> sal_delta_w(std::span<const double> w, std::span<const double> x, double o,
                                  const SalConfig& config);

// Same update written into `w` in place, restricted to entries where
// mask != 0. Returns false (and leaves w untouched) when ||w|| = 0.
bool apply_sal_delta_w(std::span<double> w, std::span<const double> mask, std::span<const double> x,
                       double o, const SalConfig& config);

// -2 eta o (1 - o^2) ||w||
double sal_delta_theta(double o, double w_norm, const SalConfig& config);

std::string_view to_string(SalMode mode);
std::string_view to_string(SalVariant variant);
std::string_view to_string(SalCriterion criterion);
SalMode parse_sal_mode(std::string_view text);
SalVariant parse_sal_variant(std::string_view text);
SalCriterion parse_sal_criterion(std::string_view text);

}  // namespace salnet
