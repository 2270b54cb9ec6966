#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "salnet/learning.hpp"
#include "salnet/lyapunov.hpp"
#include "salnet/sal.hpp"

namespace salnet {

enum class ExperimentKind { chaos_flat, chaos_two_layer, rnn_parity, dfnn_parity, dfnn_probe, analyze };

std::string_view to_string(ExperimentKind kind);
// Accepts the CLI names: chaos-flat, chaos-2layer, rnn-parity, dfnn-parity, dfnn-probe, analyze.
ExperimentKind parse_kind(std::string_view text);

// Every hyperparameter of every experiment. default_spec(kind) fills in the
// published values for that kind; each field is settable by name through
// set_param, which is what config files and CLI flags use.
struct ExperimentSpec {
    ExperimentKind kind = ExperimentKind::chaos_flat;
    std::uint64_t seed = 1;
    std::size_t runs = 0;  // 0 = default for the kind and scale
    bool paper_scale = false;
    std::size_t threads = 0;  // 0 = hardware concurrency

    // SAL
    double eta_sal = 2e-5;
    double beta = 0.99;
    double target_sensitivity = 1.0;
    SalMode sal_mode = SalMode::always;
    SalVariant sal_variant = SalVariant::full_nonlinear;
    SalCriterion sal_criterion = SalCriterion::nonlinear;

    // Flat RNN
    std::size_t neurons = 100;
    double connection_rate = 1.0;
    double weight_range = 0.01;
    bool self_connections = true;

    // Two-layer RNN
    std::size_t first_neurons = 1000;
    std::size_t second_neurons = 100;
    double rate_first_from_second = 0.1;
    double rate_second_from_first = 1.0;
    bool stop_at_target = false;

    // Chaos runs
    std::size_t steps = 100000;
    std::size_t probe_interval = 100;
    std::size_t lambda_interval = 100;  // 0 disables the lambda probe
    std::size_t perturbation_interval = 1000;
    double perturbation_size = 0.001;
    LyapunovOptions lyapunov{};

    // Elman RNN parity
    std::vector<AblationCase> cases{AblationCase::A, AblationCase::A2, AblationCase::B, AblationCase::C,
                                    AblationCase::D, AblationCase::E, AblationCase::F, AblationCase::G};
    std::size_t hidden = 20;
    double input_range = 0.0;
    double feedback_range = 0.1;
    double output_range = 0.3;
    double eta_input = 0.4;
    double eta_output = 0.1;
    double eta_feedback = 0.00004;
    std::size_t max_epochs = 1000;
    double success_threshold = 0.01;
    bool tanh_in_backprop = true;
    bool squash_output_delta = true;
    double radius_min = 1.0;
    double radius_max = 2.0;
    double radius_step = 0.0;  // 0 = default for the scale
    bool presentation_traces = false;

    // DFNN
    std::vector<std::size_t> layers{3, 5, 10, 30, 100, 200, 300};
    std::vector<double> init_scales{0.1};
    bool use_sal = true;
    bool long_run = false;  // required for depths >= 1000
    std::size_t width = 20;
    double dfnn_input_range = 0.1;
    double dfnn_output_range = 0.1;
    double eta_dfnn_input = 0.02;
    double eta_dfnn_other = 0.0;  // 0 = by depth
    std::size_t epochs = 5000;
    double noise = 0.2;
    double target = 0.8;
    std::size_t trace_interval = 50;
    bool save_nets = false;

    // analyze
    std::string nets_dir;  // load trained nets from here instead of training
    std::size_t probe_count = 1000;
    std::size_t histogram_bins = 40;
    double band_low = 0.75;
    double band_high = 0.85;

    bool operator==(const ExperimentSpec&) const = default;
};

ExperimentSpec default_spec(ExperimentKind kind);

// Throws std::invalid_argument for an unknown key or a malformed value.
void set_param(ExperimentSpec& spec, std::string_view key, std::string_view value);

// Every settable key with its current value, in a fixed order.
std::vector<std::pair<std::string, std::string>> list_params(const ExperimentSpec& spec);

// Throws std::invalid_argument naming the offending key.
void validate(const ExperimentSpec& spec);

std::size_t resolved_runs(const ExperimentSpec& spec);
double resolved_radius_step(const ExperimentSpec& spec);
SalConfig resolved_sal(const ExperimentSpec& spec);
ElmanTrainConfig resolved_elman_config(const ExperimentSpec& spec, AblationCase c);
DfnnTrainConfig resolved_dfnn_config(const ExperimentSpec& spec, std::size_t layers);

}  // namespace salnet
