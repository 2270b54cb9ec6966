#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "salnet/config.hpp"
#include "salnet/csv.hpp"
#include "salnet/experiment.hpp"
#include "salnet/harness.hpp"
#include "salnet/manifest.hpp"
#include "salnet/selftest.hpp"
#include "salnet/svg.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitDiverged = 2;
constexpr int kExitIo = 3;

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Options {
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> runs;
    std::optional<std::size_t> threads;
    bool paper_scale = false;
    std::vector<std::string> cases;
    std::vector<std::size_t> layers;
    std::vector<double> init_scales;
    bool no_sal = false;
    bool no_tanh_bp = false;
    bool stop_at_target = false;
    bool save_nets = false;
    bool long_run = false;
    std::string nets_dir;
    std::string out;
    std::string config;
    std::vector<std::string> settings;
};

void write_file(const fs::path& path, const std::string& contents) {
    std::error_code ec;
    if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
    if (ec) throw IoError("cannot create " + path.parent_path().string() + ": " + ec.message());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path.string());
    out << contents;
    out.close();
    if (!out) throw IoError("write failed for " + path.string());
}

std::string join_list(const auto& items) {
    std::string out;
    for (const auto& item : items) {
        if (!out.empty()) out += ',';
        if constexpr (std::is_same_v<std::decay_t<decltype(item)>, std::string>)
            out += item;
        else
            out += std::to_string(item);
    }
    return out;
}

// Defaults, then the config file, then command-line flags.
salnet::ExperimentSpec resolve_spec(salnet::ExperimentKind kind, const Options& o) {
    using namespace salnet;
    ExperimentSpec spec = default_spec(kind);
    if (!o.config.empty()) {
        std::ifstream probe(o.config);
        if (!probe) throw IoError("cannot read config file " + o.config);
        load_config(spec, o.config);
    }
    if (o.seed) spec.seed = *o.seed;
    if (o.runs) spec.runs = *o.runs;
    if (o.threads) spec.threads = *o.threads;
    if (o.paper_scale) spec.paper_scale = true;
    if (!o.cases.empty()) set_param(spec, "cases", join_list(o.cases));
    if (!o.layers.empty()) spec.layers = o.layers;
    if (!o.init_scales.empty()) spec.init_scales = o.init_scales;
    if (o.no_sal) {
        spec.use_sal = false;
        if (kind == ExperimentKind::chaos_flat || kind == ExperimentKind::chaos_two_layer) spec.sal_mode = SalMode::off;
    }
    if (o.no_tanh_bp) spec.tanh_in_backprop = false;
    if (o.stop_at_target) spec.stop_at_target = true;
    if (o.save_nets) spec.save_nets = true;
    if (o.long_run) spec.long_run = true;
    if (!o.nets_dir.empty()) spec.nets_dir = o.nets_dir;
    for (const auto& kv : o.settings) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) throw std::invalid_argument("--set expects key=value, got '" + kv + "'");
        set_param(spec, kv.substr(0, eq), kv.substr(eq + 1));
    }
    validate(spec);
    return spec;
}

fs::path output_dir(const Options& o) {
    if (!o.out.empty()) return o.out;
    if (const char* env = std::getenv("SALNET_OUT"); env && *env) return env;
    return "salnet-out";
}

int run_kind(salnet::ExperimentKind kind, const Options& o) {
    using namespace salnet;
    ExperimentSpec spec;
    try {
        spec = resolve_spec(kind, o);
    } catch (const IoError&) {
        throw;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }

    const fs::path dir = output_dir(o);
    RunManifest manifest = make_manifest(spec, planned_seeds(spec));
    write_file(dir / "manifest.json", manifest_json(manifest));

    ExperimentResult result;
    try {
        result = run_experiment(spec);
    } catch (const std::exception& e) {
        manifest.status = "failed";
        manifest.finished = utc_timestamp();
        write_file(dir / "manifest.json", manifest_json(manifest));
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    }

    auto emit = [&](const std::string& rel, const std::string& contents) {
        write_file(dir / rel, contents);
        manifest.outputs.push_back({rel, git_blob_hash(contents)});
    };
    for (const auto& table : result.tables) emit(table.name + ".csv", write_csv(table));
    for (const auto& [stem, chart] : result.charts) emit(stem + ".svg", render_svg(chart));
    for (const auto& [rel, contents] : result.files) emit(rel, contents);
    manifest.status = result.diverged ? "diverged" : "ok";
    manifest.finished = utc_timestamp();
    write_file(dir / "manifest.json", manifest_json(manifest));

    for (const auto& line : result.summary) std::cout << line << "\n";
    std::cout << "wrote " << manifest.outputs.size() << " files to " << dir.string() << "\n";
    return result.diverged ? kExitDiverged : kExitOk;
}

int run_selftest_command(const Options& o) {
    const auto report = salnet::run_selftest(o.seed.value_or(1));
    for (const auto& c : report.checks)
        std::cout << (c.passed ? "PASS " : "FAIL ") << c.name << ": " << c.value << " (limit " << c.limit << ")\n";
    return report.passed() ? kExitOk : kExitDiverged;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Sensitivity adjustment learning experiments"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(salnet::kToolVersion));

    Options opts;
    struct Command {
        CLI::App* app;
        std::optional<salnet::ExperimentKind> kind;
    };
    std::vector<Command> commands;

    auto common = [&](CLI::App* sub) {
        sub->add_option("--seed", opts.seed, "master seed");
        sub->add_option("--runs", opts.runs, "number of independent runs");
        sub->add_option("--threads", opts.threads, "worker threads (0 = all cores)");
        sub->add_flag("--paper-scale", opts.paper_scale, "use the full run counts");
        sub->add_option("--out", opts.out, "output directory (default $SALNET_OUT or ./salnet-out)");
        sub->add_option("--config", opts.config, "key = value settings file");
        sub->add_option("--set", opts.settings, "override one setting, key=value (repeatable)");
    };

    auto add = [&](const char* name, const char* help, salnet::ExperimentKind kind) {
        CLI::App* sub = app.add_subcommand(name, help);
        common(sub);
        commands.push_back({sub, kind});
        return sub;
    };

    auto* flat = add("chaos-flat", "SAL-driven chaos generation in a flat RNN", salnet::ExperimentKind::chaos_flat);
    flat->add_flag("--no-sal", opts.no_sal, "disable SAL");

    auto* two = add("chaos-2layer", "SAL-driven chaos generation in a two-layer RNN",
                    salnet::ExperimentKind::chaos_two_layer);
    two->add_flag("--no-sal", opts.no_sal, "disable SAL");
    two->add_flag("--stop-at-target", opts.stop_at_target, "stop SAL per neuron once its average sensitivity reaches the target");

    auto* rnn = add("rnn-parity", "Elman RNN on delayed 3-bit parity, ablation cases",
                    salnet::ExperimentKind::rnn_parity);
    rnn->add_option("--case", opts.cases, "ablation case(s): A, A2, B, C, D, E, F, G")
        ->delimiter(',')
        ->check(CLI::IsMember({"A", "A2", "A'", "B", "C", "D", "E", "F", "G"}));
    rnn->add_flag("--no-tanh-bp", opts.no_tanh_bp, "no tanh squashing of propagated errors");

    for (auto [name, help, kind] : {std::tuple{"dfnn-parity", "deep feed-forward network on noisy 8-bit parity",
                                               salnet::ExperimentKind::dfnn_parity},
                                    std::tuple{"dfnn-probe", "error-signal size before learning vs weight scale",
                                               salnet::ExperimentKind::dfnn_probe},
                                    std::tuple{"analyze", "output histograms and PCA of trained deep networks",
                                               salnet::ExperimentKind::analyze}}) {
        auto* sub = add(name, help, kind);
        sub->add_option("--layers", opts.layers, "layer counts including input and output")->delimiter(',');
        sub->add_option("--init-scale", opts.init_scales, "hidden weight range(s)")->delimiter(',');
        sub->add_flag("--no-sal", opts.no_sal, "disable SAL");
        sub->add_flag("--no-tanh-bp", opts.no_tanh_bp, "no tanh squashing of propagated errors");
        sub->add_flag("--long-run", opts.long_run, "allow depths of 1000 layers or more");
        if (kind == salnet::ExperimentKind::dfnn_parity)
            sub->add_flag("--save-nets", opts.save_nets, "write trained networks under nets/");
        if (kind == salnet::ExperimentKind::analyze)
            sub->add_option("--nets", opts.nets_dir, "load trained networks from this directory");
    }

    auto* selftest = app.add_subcommand("selftest", "finite-difference and Monte-Carlo checks");
    selftest->add_option("--seed", opts.seed, "seed");
    commands.push_back({selftest, std::nullopt});

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        for (const auto& cmd : commands) {
            if (!cmd.app->parsed()) continue;
            if (!cmd.kind) return run_selftest_command(opts);
            return run_kind(*cmd.kind, opts);
        }
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    }
    return kExitUsage;
}
