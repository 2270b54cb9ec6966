#pragma once

#include <functional>
#include <span>
#include <vector>

#include "salnet/matrix.hpp"
#include "salnet/network.hpp"
#include "salnet/rng.hpp"

namespace salnet {

struct LyapunovOptions {
    double separation = 1e-3;
    std::size_t warmup = 100;
    std::size_t window = 1000;
    double log_floor = -50.0;
};

struct LyapunovResult {
    double lambda = 0.0;
    std::size_t underflows = 0;  // window steps whose separation collapsed to zero
};

// Advances the probed state vector by one step with frozen weights.
using StateMap = std::function<void(std::span<const double> in, std::span<double> out)>;

// Twin-trajectory estimate of the maximum Lyapunov exponent. The second
// trajectory starts at distance `separation` in a random direction; after
// every step l = ln(||u2 - u1|| / separation) is recorded and u2 is pulled
// back to that distance along the current separation. Lambda is the mean of
// l over steps warmup+1 .. warmup+window. A collapsed separation records
// `log_floor` and the separation is re-seeded in a fresh direction.
LyapunovResult estimate_lambda(const StateMap& step, std::span<const double> start, Rng& rng,
                               const LyapunovOptions& opts = {});

// Network overloads: weights are read, never modified. For the two-layer
// network the distance is measured on layer 1's u. The Elman network is
// probed with zero input.
LyapunovResult estimate_lambda(const FlatRnn& net, Rng& rng, const LyapunovOptions& opts = {});
LyapunovResult estimate_lambda(const TwoLayerRnn& net, Rng& rng, const LyapunovOptions& opts = {});
LyapunovResult estimate_lambda(const ElmanRnn& net, Rng& rng, const LyapunovOptions& opts = {});

struct LogSensitivity {
    std::vector<double> per_layer;
    double total = 0.0;
    std::vector<double> rms;  // RMS sensitivity per layer
};

inline constexpr double kLogSensitivityFloor = -50.0;

// ln(RMS of per-neuron sensitivities) per layer at the current state, and
// their sum. Zero sensitivity maps to the floor.
LogSensitivity log_sensitivity(const FlatRnn& net);
LogSensitivity log_sensitivity(const TwoLayerRnn& net);
double log_rms(std::span<const double> sensitivities);

}  // namespace salnet
