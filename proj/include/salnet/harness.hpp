#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "salnet/csv.hpp"
#include "salnet/experiment.hpp"
#include "salnet/manifest.hpp"
#include "salnet/network.hpp"
#include "salnet/svg.hpp"

namespace salnet {

struct ExperimentResult {
    std::vector<Table> tables;
    std::vector<std::pair<std::string, Chart>> charts;       // file stem, chart
    std::vector<std::pair<std::string, std::string>> files;  // relative path, contents (snapshots)
    std::vector<std::string> summary;                        // one line each, for the terminal
    bool diverged = false;
};

// Seeds of every independent run, derived from the master seed. Known before
// anything runs so the manifest can be written first.
std::vector<RunSeed> planned_seeds(const ExperimentSpec& spec);
std::uint64_t run_seed(std::uint64_t master, std::size_t run);

// Runs `count` jobs on up to `threads` workers (0 = hardware concurrency).
// Each job writes only its own slot, so results do not depend on scheduling.
void parallel_for(std::size_t count, std::size_t threads, const std::function<void(std::size_t)>& job);

ExperimentResult run_chaos_flat(const ExperimentSpec& spec);
ExperimentResult run_chaos_two_layer(const ExperimentSpec& spec);
ExperimentResult run_rnn_parity(const ExperimentSpec& spec);
ExperimentResult run_dfnn(const ExperimentSpec& spec);
ExperimentResult run_dfnn_probe(const ExperimentSpec& spec);
ExperimentResult analyze_outputs(const ExperimentSpec& spec);
ExperimentResult run_experiment(const ExperimentSpec& spec);

// ---------------------------------------------------------------------------
// Building blocks shared with tests

// One trained (or freshly initialised) DFNN for the given depth and run.
struct DfnnJob {
    std::size_t layers = 3;
    double init_scale = 0.1;
    std::size_t run = 0;
};
DfnnSpec dfnn_spec_for(const ExperimentSpec& spec, std::size_t layers, double init_scale);
Dfnn init_dfnn_for_run(const ExperimentSpec& spec, const DfnnJob& job);

struct Histogram {
    double lo = -1.0;
    double hi = 1.0;
    std::vector<std::size_t> counts;

    std::size_t total() const;
    double bin_low(std::size_t i) const;
    double bin_high(std::size_t i) const;
};

// Values outside [lo, hi] are clamped into the end bins; hi falls in the last bin.
Histogram make_histogram(std::span<const double> values, std::size_t bins, double lo = -1.0, double hi = 1.0);

// Fraction of values with low <= |v| <= high.
double band_fraction(std::span<const double> values, double low, double high);

// Output of every net for every probe input, net-major.
std::vector<double> probe_outputs(const std::vector<Dfnn>& nets, const std::vector<Vector>& probes);

// 1-based hidden-layer indices for the PCA snapshots: bottom, about one
// third, about two thirds and top (1, 100, 199, 298 for 298 hidden layers).
std::vector<std::size_t> pca_layers(std::size_t hidden_layers);

}  // namespace salnet
