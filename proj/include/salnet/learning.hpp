#pragma once

#include <array>
#include <functional>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "salnet/network.hpp"
#include "salnet/rng.hpp"
#include "salnet/sal.hpp"
#include "salnet/tasks.hpp"

namespace salnet {

// enabled:  delta = tanh(delta_hat * f'(U))
// disabled: delta = delta_hat * f'(U)
double squash_delta(double delta_hat, double fprime, bool enabled);

// delta_hat_lower = W^T (f'(U) o delta_hat_upper), optionally squashing each
// delta before it is propagated. With squashing off this is exactly
// J(U; W)^T delta_hat_upper.
Vector propagate_error(const Matrix& w, std::span<const double> pre_activation,
                       std::span<const double> delta_hat_upper, bool squash);

// ---------------------------------------------------------------------------
// Elman RNN + BPTT

// Rows of the ablation table for the sequential parity task.
enum class AblationCase { A, A2, B, C, D, E, F, G };

inline constexpr std::array<AblationCase, 8> kAllCases = {
    AblationCase::A, AblationCase::A2, AblationCase::B, AblationCase::C,
    AblationCase::D, AblationCase::E,  AblationCase::F, AblationCase::G};

std::string_view to_string(AblationCase c);
// Accepts A, A2 (or A'), B, ..., G.
AblationCase parse_case(std::string_view text);

struct ElmanTrainConfig {
    double eta_input = 0.4;
    double eta_output = 0.1;
    double eta_feedback = 0.00004;  // also the hidden-bias rate
    bool tanh_in_backprop = true;
    bool squash_output_delta = true;
    SalConfig sal{0.0002, 0.999, 1.0, SalVariant::full_nonlinear, SalCriterion::nonlinear, SalMode::continuous};
    std::size_t max_epochs = 1000;
    double success_threshold = 0.01;
    AblationCase ablation = AblationCase::A;
};

// Sets the SAL/backprop switches for one ablation row on top of `base`
// (learning rates and epoch cap are kept). Case G is SAL off; the
// spectral-radius tuning of W_fb happens at initialisation.
ElmanTrainConfig configure_case(AblationCase c, ElmanTrainConfig base = {});

inline constexpr std::array<std::size_t, 4> kDeltaProbeSteps = {0, 100, 200, 300};

struct BpttResult {
    double error = 0.0;  // d - o at the output step
    double output = 0.0;
    std::array<double, 4> delta_rms{};  // RMS of hidden delta at kDeltaProbeSteps
    double sensitivity_mean = 0.0;      // pooled over hidden neurons and steps 1..T
    double sensitivity_std = 0.0;
    std::size_t sal_neurons = 0;  // hidden neurons where SAL fired at least once
    bool diverged = false;
};

enum class PatternMode { learn, observe };

// One pattern presentation: forward t = 0..T with per-step SAL on the
// hidden neurons (feedback weights and hidden bias), then BPTT from the
// output step using the post-SAL weights. In observe mode the moving
// averages are still updated but no weight changes.
BpttResult bptt_pattern(ElmanRnn& net, const SequencePattern& pattern, const ElmanTrainConfig& config,
                        PatternMode mode = PatternMode::learn);

struct PresentationProbe {
    std::size_t epoch = 0;
    std::size_t pattern = 0;
    BpttResult result;
};

struct ElmanRunResult {
    bool success = false;
    bool diverged = false;
    std::size_t epochs_used = 0;        // epoch at which success was reached, else the cap
    std::vector<double> rms_error;      // per epoch, index 0 = pre-learning
    std::vector<PresentationProbe> probes;
};

struct ElmanRunOptions {
    bool keep_probes = true;
    // Called after every epoch (0 = the observation epoch) with the current net.
    std::function<void(std::size_t epoch, const ElmanRnn& net)> on_epoch;
};

// Epoch 0 observes all patterns without learning; epochs 1.. learn in fixed
// pattern order until every |error| < threshold or the cap is reached.
ElmanRunResult run_elman_training(ElmanRnn& net, const std::vector<SequencePattern>& patterns,
                                  const ElmanTrainConfig& config, const ElmanRunOptions& options = {});

// ---------------------------------------------------------------------------
// Deep feed-forward network + BP

// Learning rate for weights other than input->hidden, by layer count.
// Listed depths are exact; others interpolate log-linearly and clamp.
double dfnn_learning_rate(std::size_t layers);

struct DfnnTrainConfig {
    double eta_input = 0.02;
    double eta_other = 0.01;
    bool tanh_in_backprop = true;
    bool squash_output_delta = true;
    SalConfig sal{0.001, 0.99, 1.0, SalVariant::full_nonlinear, SalCriterion::nonlinear, SalMode::continuous};
    std::size_t epochs = 5000;
    double noise = 0.2;
    double target = 0.8;
};

DfnnTrainConfig dfnn_config_for_depth(std::size_t layers, bool with_sal);

struct BpResult {
    double error = 0.0;  // d - o
    double output = 0.0;
    std::vector<double> delta_rms;  // per hidden layer, bottom first (filled when requested)
    std::size_t sal_applied = 0;
    bool diverged = false;
};

// Forward with per-hidden-neuron SAL, then backprop with per-group rates.
BpResult bp_pattern(Dfnn& net, std::span<const double> input, double target, const DfnnTrainConfig& config,
                    PatternMode mode = PatternMode::learn, bool record_deltas = false);

struct DfnnRunResult {
    double final_rms_error = 0.0;     // noiseless, all 256 patterns
    double pre_delta_bottom = 0.0;    // RMS delta at the bottom hidden layer before learning
    double pre_delta_top = 0.0;       // ... at the top hidden layer
    std::vector<double> epoch_rms_error;  // online error per epoch, index 0 = pre-learning
    bool diverged = false;
};

struct DfnnRunOptions {
    bool pre_probe_only = false;  // stop after the epoch-0 probe
};

DfnnRunResult run_dfnn_training(Dfnn& net, const DfnnTrainConfig& config, Rng& rng,
                                const DfnnRunOptions& options = {});

// Noiseless RMS error over the 256 parity words.
double dfnn_parity_rms_error(const Dfnn& net, double target = 0.8);

}  // namespace salnet
