#include "salnet/experiment.hpp"

#include <charconv>
#include <functional>
#include <stdexcept>
#include <string>

#include "salnet/format.hpp"

namespace salnet {

std::string_view to_string(ExperimentKind kind) {
    switch (kind) {
        case ExperimentKind::chaos_flat: return "chaos-flat";
        case ExperimentKind::chaos_two_layer: return "chaos-2layer";
        case ExperimentKind::rnn_parity: return "rnn-parity";
        case ExperimentKind::dfnn_parity: return "dfnn-parity";
        case ExperimentKind::dfnn_probe: return "dfnn-probe";
        case ExperimentKind::analyze: return "analyze";
    }
    return "?";
}

ExperimentKind parse_kind(std::string_view text) {
    for (auto k : {ExperimentKind::chaos_flat, ExperimentKind::chaos_two_layer, ExperimentKind::rnn_parity,
                   ExperimentKind::dfnn_parity, ExperimentKind::dfnn_probe, ExperimentKind::analyze})
        if (to_string(k) == text) return k;
    throw std::invalid_argument("unknown experiment kind: " + std::string(text));
}

ExperimentSpec default_spec(ExperimentKind kind) {
    ExperimentSpec s;
    s.kind = kind;
    switch (kind) {
        case ExperimentKind::chaos_flat:
            break;
        case ExperimentKind::chaos_two_layer:
            s.weight_range = 0.03;
            break;
        case ExperimentKind::rnn_parity:
            s.eta_sal = 0.0002;
            s.beta = 0.999;
            s.sal_mode = SalMode::continuous;
            s.lambda_interval = 0;
            break;
        case ExperimentKind::dfnn_parity:
        case ExperimentKind::dfnn_probe:
        case ExperimentKind::analyze:
            s.eta_sal = 0.001;
            s.beta = 0.99;
            s.sal_mode = SalMode::continuous;
            s.lambda_interval = 0;
            break;
    }
    if (kind == ExperimentKind::dfnn_probe) {
        s.layers = {30, 100, 300};
        s.init_scales.clear();
        for (int i = 1; i <= 20; ++i) s.init_scales.push_back(0.05 * i);
    }
    if (kind == ExperimentKind::analyze) s.layers = {3, 10, 30, 100, 300};
    return s;
}

namespace {

std::string fmt(double v) { return format_double(v); }
std::string fmt(bool v) { return v ? "true" : "false"; }
std::string fmt(std::size_t v) { return std::to_string(v); }
std::string fmt(std::uint64_t v, int) { return std::to_string(v); }

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t");
    return std::string(s.substr(b, e - b + 1));
}

std::uint64_t parse_u64(std::string_view text) {
    const std::string t = trim(text);
    std::uint64_t v = 0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (t.empty() || ec != std::errc() || ptr != t.data() + t.size())
        throw std::invalid_argument("expected a non-negative integer, got '" + std::string(text) + "'");
    return v;
}

double parse_real(std::string_view text) { return parse_double(trim(text)); }

bool parse_bool(std::string_view text) {
    const std::string t = trim(text);
    if (t == "true" || t == "1" || t == "yes" || t == "on") return true;
    if (t == "false" || t == "0" || t == "no" || t == "off") return false;
    throw std::invalid_argument("expected true or false, got '" + std::string(text) + "'");
}

std::vector<std::string> split_list(std::string_view text) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start <= text.size()) {
        const auto comma = text.find(',', start);
        const auto piece = trim(text.substr(start, comma == std::string_view::npos ? text.npos : comma - start));
        if (!piece.empty()) out.push_back(piece);
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    if (out.empty()) throw std::invalid_argument("expected a non-empty list");
    return out;
}

template <typename T, typename F>
std::string join(const std::vector<T>& items, F f) {
    std::string out;
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (i) out += ',';
        out += f(items[i]);
    }
    return out;
}

struct Param {
    const char* key;
    std::function<void(ExperimentSpec&, std::string_view)> set;
    std::function<std::string(const ExperimentSpec&)> get;
};

#define SALNET_REAL(name) \
    Param { #name, [](ExperimentSpec& s, std::string_view v) { s.name = parse_real(v); }, \
            [](const ExperimentSpec& s) { return fmt(s.name); } }
#define SALNET_SIZE(name) \
    Param { #name, [](ExperimentSpec& s, std::string_view v) { s.name = parse_u64(v); }, \
            [](const ExperimentSpec& s) { return fmt(s.name); } }
#define SALNET_BOOL(name) \
    Param { #name, [](ExperimentSpec& s, std::string_view v) { s.name = parse_bool(v); }, \
            [](const ExperimentSpec& s) { return fmt(s.name); } }

const std::vector<Param>& params() {
    static const std::vector<Param> table = {
        {"kind", [](ExperimentSpec& s, std::string_view v) { s.kind = parse_kind(trim(v)); },
         [](const ExperimentSpec& s) { return std::string(to_string(s.kind)); }},
        {"seed", [](ExperimentSpec& s, std::string_view v) { s.seed = parse_u64(v); },
         [](const ExperimentSpec& s) { return fmt(s.seed, 0); }},
        SALNET_SIZE(runs),
        SALNET_BOOL(paper_scale),
        SALNET_SIZE(threads),
        SALNET_REAL(eta_sal),
        SALNET_REAL(beta),
        SALNET_REAL(target_sensitivity),
        {"sal_mode", [](ExperimentSpec& s, std::string_view v) { s.sal_mode = parse_sal_mode(trim(v)); },
         [](const ExperimentSpec& s) { return std::string(to_string(s.sal_mode)); }},
        {"sal_variant", [](ExperimentSpec& s, std::string_view v) { s.sal_variant = parse_sal_variant(trim(v)); },
         [](const ExperimentSpec& s) { return std::string(to_string(s.sal_variant)); }},
        {"sal_criterion",
         [](ExperimentSpec& s, std::string_view v) { s.sal_criterion = parse_sal_criterion(trim(v)); },
         [](const ExperimentSpec& s) { return std::string(to_string(s.sal_criterion)); }},
        SALNET_SIZE(neurons),
        SALNET_REAL(connection_rate),
        SALNET_REAL(weight_range),
        SALNET_BOOL(self_connections),
        SALNET_SIZE(first_neurons),
        SALNET_SIZE(second_neurons),
        SALNET_REAL(rate_first_from_second),
        SALNET_REAL(rate_second_from_first),
        SALNET_BOOL(stop_at_target),
        SALNET_SIZE(steps),
        SALNET_SIZE(probe_interval),
        SALNET_SIZE(lambda_interval),
        SALNET_SIZE(perturbation_interval),
        SALNET_REAL(perturbation_size),
        {"lyapunov_separation", [](ExperimentSpec& s, std::string_view v) { s.lyapunov.separation = parse_real(v); },
         [](const ExperimentSpec& s) { return fmt(s.lyapunov.separation); }},
        {"lyapunov_warmup", [](ExperimentSpec& s, std::string_view v) { s.lyapunov.warmup = parse_u64(v); },
         [](const ExperimentSpec& s) { return fmt(s.lyapunov.warmup); }},
        {"lyapunov_window", [](ExperimentSpec& s, std::string_view v) { s.lyapunov.window = parse_u64(v); },
         [](const ExperimentSpec& s) { return fmt(s.lyapunov.window); }},
        {"cases",
         [](ExperimentSpec& s, std::string_view v) {
             std::vector<AblationCase> cases;
             for (const auto& item : split_list(v)) cases.push_back(parse_case(item));
             s.cases = cases;
         },
         [](const ExperimentSpec& s) { return join(s.cases, [](AblationCase c) { return std::string(to_string(c)); }); }},
        SALNET_SIZE(hidden),
        SALNET_REAL(input_range),
        SALNET_REAL(feedback_range),
        SALNET_REAL(output_range),
        SALNET_REAL(eta_input),
        SALNET_REAL(eta_output),
        SALNET_REAL(eta_feedback),
        SALNET_SIZE(max_epochs),
        SALNET_REAL(success_threshold),
        SALNET_BOOL(tanh_in_backprop),
        SALNET_BOOL(squash_output_delta),
        SALNET_REAL(radius_min),
        SALNET_REAL(radius_max),
        SALNET_REAL(radius_step),
        SALNET_BOOL(presentation_traces),
        {"layers",
         [](ExperimentSpec& s, std::string_view v) {
             std::vector<std::size_t> layers;
             for (const auto& item : split_list(v)) layers.push_back(parse_u64(item));
             s.layers = layers;
         },
         [](const ExperimentSpec& s) { return join(s.layers, [](std::size_t l) { return fmt(l); }); }},
        {"init_scales",
         [](ExperimentSpec& s, std::string_view v) {
             std::vector<double> scales;
             for (const auto& item : split_list(v)) scales.push_back(parse_real(item));
             s.init_scales = scales;
         },
         [](const ExperimentSpec& s) { return join(s.init_scales, [](double d) { return fmt(d); }); }},
        SALNET_BOOL(use_sal),
        SALNET_BOOL(long_run),
        SALNET_SIZE(width),
        SALNET_REAL(dfnn_input_range),
        SALNET_REAL(dfnn_output_range),
        SALNET_REAL(eta_dfnn_input),
        SALNET_REAL(eta_dfnn_other),
        SALNET_SIZE(epochs),
        SALNET_REAL(noise),
        SALNET_REAL(target),
        SALNET_SIZE(trace_interval),
        SALNET_BOOL(save_nets),
        {"nets_dir", [](ExperimentSpec& s, std::string_view v) { s.nets_dir = trim(v); },
         [](const ExperimentSpec& s) { return s.nets_dir; }},
        SALNET_SIZE(probe_count),
        SALNET_SIZE(histogram_bins),
        SALNET_REAL(band_low),
        SALNET_REAL(band_high),
    };
    return table;
}

#undef SALNET_REAL
#undef SALNET_SIZE
#undef SALNET_BOOL

}  // namespace

void set_param(ExperimentSpec& spec, std::string_view key, std::string_view value) {
    for (const auto& p : params()) {
        if (key != p.key) continue;
        try {
            p.set(spec, value);
        } catch (const std::invalid_argument& e) {
            throw std::invalid_argument(std::string(key) + ": " + e.what());
        }
        return;
    }
    throw std::invalid_argument("unknown key: " + std::string(key));
}

std::vector<std::pair<std::string, std::string>> list_params(const ExperimentSpec& spec) {
    std::vector<std::pair<std::string, std::string>> out;
    for (const auto& p : params()) out.emplace_back(p.key, p.get(spec));
    return out;
}

void validate(const ExperimentSpec& s) {
    auto fail = [](const char* key, const char* why) {
        throw std::invalid_argument(std::string(key) + ": " + why);
    };
    if (!(s.beta >= 0.0 && s.beta < 1.0)) fail("beta", "must satisfy 0 <= beta < 1");
    if (!(s.eta_sal > 0.0)) fail("eta_sal", "must be positive");
    if (!(s.target_sensitivity > 0.0)) fail("target_sensitivity", "must be positive");
    if (!(s.connection_rate >= 0.0 && s.connection_rate <= 1.0)) fail("connection_rate", "must be in [0, 1]");
    if (!(s.rate_first_from_second >= 0.0 && s.rate_first_from_second <= 1.0))
        fail("rate_first_from_second", "must be in [0, 1]");
    if (!(s.rate_second_from_first >= 0.0 && s.rate_second_from_first <= 1.0))
        fail("rate_second_from_first", "must be in [0, 1]");
    if (s.neurons == 0) fail("neurons", "must be positive");
    if (s.first_neurons == 0 || s.second_neurons == 0) fail("first_neurons", "layer sizes must be positive");
    if (s.probe_interval == 0) fail("probe_interval", "must be positive");
    if (s.perturbation_interval == 0) fail("perturbation_interval", "must be positive");
    if (!(s.perturbation_size >= 0.0)) fail("perturbation_size", "must be non-negative");
    if (!(s.lyapunov.separation > 0.0)) fail("lyapunov_separation", "must be positive");
    if (s.lyapunov.window == 0) fail("lyapunov_window", "must be positive");
    for (double r : {s.weight_range, s.input_range, s.feedback_range, s.output_range, s.dfnn_input_range,
                     s.dfnn_output_range})
        if (!(r >= 0.0)) fail("weight ranges", "must be non-negative");
    if (s.cases.empty()) fail("cases", "must not be empty");
    if (s.hidden == 0) fail("hidden", "must be positive");
    if (!(s.radius_min > 0.0 && s.radius_max >= s.radius_min)) fail("radius_min", "need 0 < radius_min <= radius_max");
    if (!(s.radius_step >= 0.0)) fail("radius_step", "must be non-negative");
    if (s.layers.empty()) fail("layers", "must not be empty");
    for (auto l : s.layers) {
        if (l < 3) fail("layers", "a network needs at least 3 layers");
        if (l >= 1000 && !s.long_run) fail("layers", "depths of 1000 or more need long_run = true");
    }
    if (s.init_scales.empty()) fail("init_scales", "must not be empty");
    for (double v : s.init_scales)
        if (!(v >= 0.0)) fail("init_scales", "must be non-negative");
    if (s.width == 0) fail("width", "must be positive");
    if (!(s.noise >= 0.0)) fail("noise", "must be non-negative");
    if (s.trace_interval == 0) fail("trace_interval", "must be positive");
    if (s.probe_count == 0) fail("probe_count", "must be positive");
    if (s.histogram_bins == 0) fail("histogram_bins", "must be positive");
    if (!(s.band_low >= 0.0 && s.band_high > s.band_low)) fail("band_low", "need 0 <= band_low < band_high");
}

std::size_t resolved_runs(const ExperimentSpec& s) {
    if (s.runs > 0) return s.runs;
    switch (s.kind) {
        case ExperimentKind::chaos_flat:
        case ExperimentKind::chaos_two_layer: return 1;
        case ExperimentKind::rnn_parity: return s.paper_scale ? 100 : 10;
        case ExperimentKind::dfnn_parity:
        case ExperimentKind::dfnn_probe:
        case ExperimentKind::analyze: return s.paper_scale ? 20 : 5;
    }
    return 1;
}

double resolved_radius_step(const ExperimentSpec& s) {
    if (s.radius_step > 0.0) return s.radius_step;
    return s.paper_scale ? 0.01 : 0.1;
}

SalConfig resolved_sal(const ExperimentSpec& s) {
    SalConfig cfg;
    cfg.eta_sal = s.eta_sal;
    cfg.beta = s.beta;
    cfg.target = s.target_sensitivity;
    cfg.variant = s.sal_variant;
    cfg.criterion = s.sal_criterion;
    cfg.mode = s.sal_mode;
    if (s.kind == ExperimentKind::chaos_two_layer && s.stop_at_target) cfg.mode = SalMode::continuous;
    return cfg;
}

ElmanTrainConfig resolved_elman_config(const ExperimentSpec& s, AblationCase c) {
    ElmanTrainConfig base;
    base.eta_input = s.eta_input;
    base.eta_output = s.eta_output;
    base.eta_feedback = s.eta_feedback;
    base.squash_output_delta = s.squash_output_delta;
    base.sal = resolved_sal(s);
    base.max_epochs = s.max_epochs;
    base.success_threshold = s.success_threshold;
    auto cfg = configure_case(c, base);
    if (!s.tanh_in_backprop) cfg.tanh_in_backprop = false;
    return cfg;
}

DfnnTrainConfig resolved_dfnn_config(const ExperimentSpec& s, std::size_t layers) {
    DfnnTrainConfig cfg = dfnn_config_for_depth(layers, s.use_sal);
    cfg.eta_input = s.eta_dfnn_input;
    if (s.eta_dfnn_other > 0.0) cfg.eta_other = s.eta_dfnn_other;
    cfg.tanh_in_backprop = s.tanh_in_backprop;
    cfg.squash_output_delta = s.squash_output_delta;
    cfg.sal = resolved_sal(s);
    if (!s.use_sal) cfg.sal.mode = SalMode::off;
    cfg.epochs = s.epochs;
    cfg.noise = s.noise;
    cfg.target = s.target;
    return cfg;
}

}  // namespace salnet
