#include "salnet/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <filesystem>
#include <fstream>
#include <limits>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "salnet/format.hpp"
#include "salnet/learning.hpp"
#include "salnet/linalg.hpp"
#include "salnet/lyapunov.hpp"
#include "salnet/tasks.hpp"

namespace salnet {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

Column I(const char* name) { return {name, ColumnType::integer}; }
Column R(const char* name) { return {name, ColumnType::real}; }
Column T(const char* name) { return {name, ColumnType::text}; }

std::int64_t i64(std::size_t v) { return static_cast<std::int64_t>(v); }

bool finite_all(std::span<const double> v) {
    return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

double max_abs(std::span<const double> v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

double mean_abs(std::span<const double> v) {
    if (v.empty()) return 0.0;
    double s = 0.0;
    for (double x : v) s += std::abs(x);
    return s / static_cast<double>(v.size());
}

double mean_s_bar(const DenseLayer& layer) {
    if (layer.sal.empty()) return 0.0;
    double s = 0.0;
    for (const auto& st : layer.sal) s += st.s_bar;
    return s / static_cast<double>(layer.sal.size());
}

struct Stats {
    double mean = kNaN, std = kNaN, median = kNaN, min = kNaN, max = kNaN;
};

Stats stats_of(std::vector<double> v) {
    Stats s;
    if (v.empty()) return s;
    std::sort(v.begin(), v.end());
    double sum = 0.0;
    for (double x : v) sum += x;
    s.mean = sum / static_cast<double>(v.size());
    double sq = 0.0;
    for (double x : v) sq += (x - s.mean) * (x - s.mean);
    s.std = v.size() > 1 ? std::sqrt(sq / static_cast<double>(v.size() - 1)) : 0.0;
    const std::size_t n = v.size();
    s.median = n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
    s.min = v.front();
    s.max = v.back();
    return s;
}

std::string seed_text(std::uint64_t seed) { return std::to_string(seed); }

std::string scale_tag(double scale) {
    std::string s = format_double(scale);
    std::replace(s.begin(), s.end(), '.', 'p');
    return s;
}

// Grid values are rounded so that the printed radius is the intended one.
std::vector<double> radius_grid(const ExperimentSpec& spec) {
    const double step = resolved_radius_step(spec);
    std::vector<double> grid;
    for (std::size_t k = 0;; ++k) {
        const double r = std::round((spec.radius_min + static_cast<double>(k) * step) * 1e9) / 1e9;
        if (r > spec.radius_max + 1e-9) break;
        grid.push_back(r);
    }
    return grid;
}

}  // namespace

std::uint64_t run_seed(std::uint64_t master, std::size_t run) { return Rng::child_seed(master, run); }

std::vector<RunSeed> planned_seeds(const ExperimentSpec& spec) {
    std::vector<RunSeed> seeds;
    const std::size_t runs = resolved_runs(spec);
    for (std::size_t r = 0; r < runs; ++r) seeds.push_back({"run " + std::to_string(r), run_seed(spec.seed, r)});
    return seeds;
}

void parallel_for(std::size_t count, std::size_t threads, const std::function<void(std::size_t)>& job) {
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = std::min(threads, count);
    if (threads <= 1) {
        for (std::size_t i = 0; i < count; ++i) job(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < threads; ++t) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < count; i = next++) {
                try {
                    job(i);
                } catch (...) {
                    std::lock_guard lock(error_mutex);
                    if (!error) error = std::current_exception();
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
}

// ---------------------------------------------------------------------------
// Chaos generation

namespace {

std::vector<std::pair<std::size_t, std::size_t>> sample_entries(const DenseLayer& layer, std::size_t count) {
    std::vector<std::pair<std::size_t, std::size_t>> out;
    for (std::size_t i = 0; i < layer.outputs() && out.size() < count; ++i)
        for (std::size_t j = 0; j < layer.inputs() && out.size() < count; ++j)
            if (i != j && layer.mask(i, j) != 0.0) out.emplace_back(i, j);
    return out;
}

struct ChaosRun {
    std::vector<Row> rows;
    bool diverged = false;
};

Chart lambda_chart(const Table& t, const std::string& title, const char* log_column) {
    Chart c{title, "log-sensitivity", "maximum Lyapunov exponent", {}, false};
    const auto run_col = t.column_index("run");
    const auto x_col = t.column_index(log_column);
    const auto y_col = t.column_index("lambda");
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (const auto& row : t.rows) {
        const auto run = static_cast<std::size_t>(std::get<std::int64_t>(row[run_col]));
        const double x = std::get<double>(row[x_col]);
        const double y = std::get<double>(row[y_col]);
        if (!std::isfinite(x) || !std::isfinite(y)) continue;
        while (c.series.size() <= run) c.series.push_back({"run " + std::to_string(c.series.size()), {}, {}, SeriesStyle::points});
        c.series[run].x.push_back(x);
        c.series[run].y.push_back(y);
        lo = std::min(lo, x);
        hi = std::max(hi, x);
    }
    if (std::isfinite(lo)) c.series.push_back({"lambda = log-sensitivity", {lo, hi}, {lo, hi}, SeriesStyle::line});
    return c;
}

Chart trajectory_chart(const Table& t, const std::string& title, const std::vector<const char*>& columns) {
    Chart c{title, "step", "value", {}, false};
    const auto run_col = t.column_index("run");
    const auto step_col = t.column_index("step");
    for (const char* name : columns) {
        Series s{name, {}, {}, SeriesStyle::line};
        const auto col = t.column_index(name);
        for (const auto& row : t.rows) {
            if (std::get<std::int64_t>(row[run_col]) != 0) continue;
            s.x.push_back(static_cast<double>(std::get<std::int64_t>(row[step_col])));
            s.y.push_back(std::get<double>(row[col]));
        }
        c.series.push_back(std::move(s));
    }
    return c;
}

}  // namespace

ExperimentResult run_chaos_flat(const ExperimentSpec& spec) {
    validate(spec);
    const std::size_t runs = resolved_runs(spec);
    const SalConfig sal = resolved_sal(spec);
    std::vector<ChaosRun> results(runs);

    parallel_for(runs, spec.threads, [&](std::size_t r) {
        const std::uint64_t seed = run_seed(spec.seed, r);
        Rng init_rng = Rng::child(seed, 0), perturb_rng = Rng::child(seed, 1), probe_rng = Rng::child(seed, 2);
        FlatRnn net = init_flat_rnn({spec.neurons, spec.connection_rate, spec.weight_range, spec.self_connections},
                                    init_rng);
        const auto samples = sample_entries(net.recurrent, 3);
        auto& out = results[r];
        std::size_t applied = 0;
        Vector prev(spec.neurons);
        for (std::size_t t = 0;; ++t) {
            if (t % spec.probe_interval == 0 || t == spec.steps || out.diverged) {
                const auto ls = log_sensitivity(net);
                double lambda = kNaN;
                std::int64_t underflows = 0;
                if (!out.diverged && spec.lambda_interval > 0 && t % spec.lambda_interval == 0) {
                    const auto res = estimate_lambda(net, probe_rng, spec.lyapunov);
                    lambda = res.lambda;
                    underflows = i64(res.underflows);
                }
                Row row{i64(r), i64(t), max_abs(net.o), mean_abs(net.o)};
                for (std::size_t k = 0; k < 3; ++k)
                    row.push_back(k < samples.size() ? net.recurrent.w(samples[k].first, samples[k].second) : kNaN);
                row.insert(row.end(), {ls.rms.front(), ls.total, lambda, underflows, mean_s_bar(net.recurrent),
                                       i64(applied)});
                out.rows.push_back(std::move(row));
                applied = 0;
            }
            if (t == spec.steps || out.diverged) break;
            Vector perturbation;
            if (spec.perturbation_size > 0.0 && t % spec.perturbation_interval == 0)
                perturbation = random_unit_vector(perturb_rng, spec.neurons, spec.perturbation_size);
            prev = net.o;
            flat_step(net, perturbation);
            applied += apply_sal(net.recurrent, net.o, prev, sal).applied;
            if (!finite_all(net.o) || !finite_all(net.recurrent.w.data())) out.diverged = true;
        }
    });

    ExperimentResult result;
    Table t{"metrics",
            {I("run"), I("step"), R("max_abs_o"), R("mean_abs_o"), R("w_sample_0"), R("w_sample_1"),
             R("w_sample_2"), R("rms_sensitivity"), R("log_sensitivity"), R("lambda"), I("lambda_underflows"),
             R("mean_s_bar"), I("sal_applied")},
            {}};
    for (std::size_t r = 0; r < runs; ++r) {
        for (auto& row : results[r].rows) t.add(std::move(row));
        result.diverged = result.diverged || results[r].diverged;
        if (results[r].diverged) result.summary.push_back("run " + std::to_string(r) + ": state diverged");
    }
    result.charts.emplace_back("lambda_vs_log_sensitivity",
                               lambda_chart(t, "Lyapunov exponent vs log-sensitivity", "log_sensitivity"));
    result.charts.emplace_back("trajectory", trajectory_chart(t, "Run 0 during SAL", {"log_sensitivity", "lambda"}));
    result.charts.emplace_back("outputs", trajectory_chart(t, "Run 0 outputs", {"max_abs_o", "mean_abs_o"}));
    for (std::size_t r = 0; r < runs && !t.rows.empty(); ++r) {
        double first = kNaN, last = kNaN, last_lambda = kNaN;
        for (std::size_t i = 0; i < t.rows.size(); ++i) {
            if (t.integer(i, "run") != i64(r)) continue;
            if (std::isnan(first)) first = t.real(i, "log_sensitivity");
            last = t.real(i, "log_sensitivity");
            if (std::isfinite(t.real(i, "lambda"))) last_lambda = t.real(i, "lambda");
        }
        result.summary.push_back("run " + std::to_string(r) + ": log-sensitivity " + format_double(first) + " -> " +
                                 format_double(last) + ", last lambda " + format_double(last_lambda));
    }
    result.tables.push_back(std::move(t));
    return result;
}

ExperimentResult run_chaos_two_layer(const ExperimentSpec& spec) {
    validate(spec);
    const std::size_t runs = resolved_runs(spec);
    const SalConfig sal = resolved_sal(spec);
    std::vector<ChaosRun> results(runs);

    parallel_for(runs, spec.threads, [&](std::size_t r) {
        const std::uint64_t seed = run_seed(spec.seed, r);
        Rng init_rng = Rng::child(seed, 0), perturb_rng = Rng::child(seed, 1), probe_rng = Rng::child(seed, 2);
        TwoLayerRnn net = init_two_layer_rnn({spec.first_neurons, spec.second_neurons, spec.rate_first_from_second,
                                              spec.rate_second_from_first, spec.weight_range},
                                             init_rng);
        auto& out = results[r];
        std::size_t applied1 = 0, applied2 = 0;
        Vector prev_o1(spec.first_neurons);
        for (std::size_t t = 0;; ++t) {
            if (t % spec.probe_interval == 0 || t == spec.steps || out.diverged) {
                const auto ls = log_sensitivity(net);
                double lambda = kNaN;
                std::int64_t underflows = 0;
                if (!out.diverged && spec.lambda_interval > 0 && t % spec.lambda_interval == 0) {
                    const auto res = estimate_lambda(net, probe_rng, spec.lyapunov);
                    lambda = res.lambda;
                    underflows = i64(res.underflows);
                }
                out.rows.push_back(Row{i64(r), i64(t), max_abs(net.o1), mean_abs(net.o1), max_abs(net.o2),
                                       mean_abs(net.o2), ls.rms[0], ls.rms[1], ls.per_layer[0], ls.per_layer[1],
                                       ls.total, lambda, underflows, mean_s_bar(net.first), mean_s_bar(net.second),
                                       i64(applied1), i64(applied2)});
                applied1 = applied2 = 0;
            }
            if (t == spec.steps || out.diverged) break;
            Vector perturbation;
            if (spec.perturbation_size > 0.0 && t % spec.perturbation_interval == 0)
                perturbation = random_unit_vector(perturb_rng, spec.first_neurons, spec.perturbation_size);
            prev_o1 = net.o1;
            two_layer_step(net, perturbation);
            applied2 += apply_sal(net.second, net.o2, prev_o1, sal).applied;
            applied1 += apply_sal(net.first, net.o1, net.o2, sal).applied;
            if (!finite_all(net.o1) || !finite_all(net.o2)) out.diverged = true;
        }
    });

    ExperimentResult result;
    Table t{"metrics",
            {I("run"), I("step"), R("max_abs_o1"), R("mean_abs_o1"), R("max_abs_o2"), R("mean_abs_o2"),
             R("rms_sensitivity_1"), R("rms_sensitivity_2"), R("log_sensitivity_1"), R("log_sensitivity_2"),
             R("log_sensitivity_total"), R("lambda"), I("lambda_underflows"), R("mean_s_bar_1"), R("mean_s_bar_2"),
             I("sal_applied_1"), I("sal_applied_2")},
            {}};
    for (std::size_t r = 0; r < runs; ++r) {
        for (auto& row : results[r].rows) t.add(std::move(row));
        result.diverged = result.diverged || results[r].diverged;
        if (results[r].diverged) result.summary.push_back("run " + std::to_string(r) + ": state diverged");
    }
    result.charts.emplace_back(
        "lambda_vs_log_sensitivity",
        lambda_chart(t, "Lyapunov exponent vs total log-sensitivity", "log_sensitivity_total"));
    result.charts.emplace_back(
        "trajectory", trajectory_chart(t, "Run 0 during SAL",
                                       {"log_sensitivity_1", "log_sensitivity_2", "log_sensitivity_total", "lambda"}));
    for (std::size_t r = 0; r < runs; ++r) {
        double last_total = kNaN, last_lambda = kNaN;
        for (std::size_t i = 0; i < t.rows.size(); ++i) {
            if (t.integer(i, "run") != i64(r)) continue;
            last_total = t.real(i, "log_sensitivity_total");
            if (std::isfinite(t.real(i, "lambda"))) last_lambda = t.real(i, "lambda");
        }
        result.summary.push_back("run " + std::to_string(r) + ": final total log-sensitivity " +
                                 format_double(last_total) + ", last lambda " + format_double(last_lambda));
    }
    result.tables.push_back(std::move(t));
    return result;
}

// ---------------------------------------------------------------------------
// Elman parity ablation

namespace {

struct ParityRun {
    AblationCase c = AblationCase::A;
    double radius = kNaN;
    std::size_t run = 0;
    ElmanRunResult training;
    std::vector<std::pair<std::size_t, double>> lambdas;
};

ParityRun parity_run(const ExperimentSpec& spec, AblationCase c, double radius, std::size_t run,
                     const std::vector<SequencePattern>& patterns) {
    ParityRun out;
    out.c = c;
    out.radius = radius;
    out.run = run;
    const std::uint64_t seed = run_seed(spec.seed, run);
    Rng init_rng = Rng::child(seed, 0), probe_rng = Rng::child(seed, 2);
    ElmanRnn net = init_elman_rnn({3, spec.hidden, 1, spec.input_range, spec.feedback_range, spec.output_range},
                                  init_rng);
    if (std::isfinite(radius)) net.feedback.w = scale_to_spectral_radius(net.feedback.w, radius);
    ElmanRunOptions options;
    options.keep_probes = true;
    if (spec.lambda_interval > 0) {
        options.on_epoch = [&](std::size_t epoch, const ElmanRnn& n) {
            if (epoch % spec.lambda_interval == 0)
                out.lambdas.emplace_back(epoch, estimate_lambda(n, probe_rng, spec.lyapunov).lambda);
        };
    }
    out.training = run_elman_training(net, patterns, resolved_elman_config(spec, c), options);
    if (!spec.presentation_traces)
        std::erase_if(out.training.probes, [](const PresentationProbe& p) { return p.epoch != 0; });
    return out;
}

std::size_t successes(const std::vector<ParityRun>& runs) {
    return static_cast<std::size_t>(
        std::count_if(runs.begin(), runs.end(), [](const ParityRun& r) { return r.training.success; }));
}

}  // namespace

ExperimentResult run_rnn_parity(const ExperimentSpec& spec) {
    validate(spec);
    const std::size_t runs = resolved_runs(spec);
    const auto patterns = parity3_patterns();

    auto run_batch = [&](AblationCase c, double radius) {
        std::vector<ParityRun> batch(runs);
        parallel_for(runs, spec.threads, [&](std::size_t r) { batch[r] = parity_run(spec, c, radius, r, patterns); });
        return batch;
    };

    ExperimentResult result;
    Table run_table{"runs",
                    {T("case"), R("radius"), I("run"), T("seed"), I("success"), I("epochs"), R("final_rms_error"),
                     I("diverged")},
                    {}};
    Table summary{"summary",
                  {T("case"), R("radius"), I("successes"), I("runs"), R("success_ratio"), R("mean_epochs_success"),
                   I("selected")},
                  {}};
    Table epochs{"epochs", {T("case"), R("radius"), I("run"), I("epoch"), R("rms_error")}, {}};
    Table prelearn{"prelearn",
                   {T("case"), R("radius"), I("run"), I("pattern"), R("error"), R("delta_rms_0"), R("delta_rms_100"),
                    R("delta_rms_200"), R("delta_rms_300"), R("sensitivity_mean"), R("sensitivity_std")},
                   {}};
    Table presentations{"presentations",
                        {T("case"), R("radius"), I("run"), I("epoch"), I("pattern"), R("error"), R("delta_rms_0"),
                         R("delta_rms_100"), R("delta_rms_200"), R("delta_rms_300"), R("sensitivity_mean"),
                         R("sensitivity_std"), I("sal_neurons")},
                        {}};
    Table lambdas{"lambda", {T("case"), R("radius"), I("run"), I("epoch"), R("lambda")}, {}};

    Chart ratio_chart{"Success ratio by case", "case index", "successes", {}, false};
    Series ratio_series{"successes", {}, {}, SeriesStyle::bars};
    Chart scan_chart{"Spectral-radius scan without SAL", "spectral radius of feedback weights", "successes", {}, false};
    Chart curve_chart{"Run 0 RMS error per epoch", "epoch", "RMS error", {}, true};

    auto emit_summary_row = [&](AblationCase c, double radius, const std::vector<ParityRun>& batch, bool selected) {
        const std::size_t ok = successes(batch);
        double epoch_sum = 0.0;
        for (const auto& r : batch)
            if (r.training.success) epoch_sum += static_cast<double>(r.training.epochs_used);
        summary.add({std::string(to_string(c)), radius, i64(ok), i64(batch.size()),
                     static_cast<double>(ok) / static_cast<double>(batch.size()),
                     ok ? epoch_sum / static_cast<double>(ok) : kNaN, std::int64_t{selected}});
    };

    auto emit_detail = [&](const std::vector<ParityRun>& batch) {
        for (const auto& r : batch) {
            const std::string name(to_string(r.c));
            const auto& tr = r.training;
            for (std::size_t e = 0; e < tr.rms_error.size(); ++e)
                epochs.add({name, r.radius, i64(r.run), i64(e), tr.rms_error[e]});
            for (const auto& p : tr.probes) {
                const auto& b = p.result;
                if (p.epoch == 0)
                    prelearn.add({name, r.radius, i64(r.run), i64(p.pattern), b.error, b.delta_rms[0], b.delta_rms[1],
                                  b.delta_rms[2], b.delta_rms[3], b.sensitivity_mean, b.sensitivity_std});
                if (spec.presentation_traces)
                    presentations.add({name, r.radius, i64(r.run), i64(p.epoch), i64(p.pattern), b.error,
                                       b.delta_rms[0], b.delta_rms[1], b.delta_rms[2], b.delta_rms[3],
                                       b.sensitivity_mean, b.sensitivity_std, i64(b.sal_neurons)});
            }
            for (const auto& [epoch, lambda] : r.lambdas)
                lambdas.add({name, r.radius, i64(r.run), i64(epoch), lambda});
        }
        if (!batch.empty()) {
            Series s{std::string(to_string(batch.front().c)), {}, {}, SeriesStyle::line};
            const auto& rms = batch.front().training.rms_error;
            for (std::size_t e = 0; e < rms.size(); ++e) {
                s.x.push_back(static_cast<double>(e));
                s.y.push_back(rms[e]);
            }
            curve_chart.series.push_back(std::move(s));
        }
    };

    for (std::size_t ci = 0; ci < spec.cases.size(); ++ci) {
        const AblationCase c = spec.cases[ci];
        std::vector<ParityRun> chosen;
        double chosen_radius = kNaN;
        if (c == AblationCase::G) {
            Series scan{"G", {}, {}, SeriesStyle::line};
            std::size_t best = 0;
            std::size_t first_summary = summary.rows.size();
            for (double radius : radius_grid(spec)) {
                auto batch = run_batch(c, radius);
                for (const auto& r : batch)
                    run_table.add({"G", radius, i64(r.run), seed_text(run_seed(spec.seed, r.run)),
                                   std::int64_t{r.training.success}, i64(r.training.epochs_used),
                                   r.training.rms_error.back(), std::int64_t{r.training.diverged}});
                const std::size_t ok = successes(batch);
                scan.x.push_back(radius);
                scan.y.push_back(static_cast<double>(ok));
                emit_summary_row(c, radius, batch, false);
                if (chosen.empty() || ok > best) {
                    best = ok;
                    chosen = std::move(batch);
                    chosen_radius = radius;
                }
            }
            const auto selected_col = summary.column_index("selected");
            for (std::size_t k = first_summary; k < summary.rows.size(); ++k)
                summary.rows[k][selected_col] = std::int64_t{summary.real(k, "radius") == chosen_radius};
            scan_chart.series.push_back(std::move(scan));
            result.summary.push_back("case G: best " + std::to_string(best) + "/" + std::to_string(runs) +
                                     " at spectral radius " + format_double(chosen_radius));
        } else {
            chosen = run_batch(c, kNaN);
            for (const auto& r : chosen)
                run_table.add({std::string(to_string(c)), kNaN, i64(r.run), seed_text(run_seed(spec.seed, r.run)),
                               std::int64_t{r.training.success}, i64(r.training.epochs_used),
                               r.training.rms_error.back(), std::int64_t{r.training.diverged}});
            emit_summary_row(c, kNaN, chosen, true);
            result.summary.push_back("case " + std::string(to_string(c)) + ": " + std::to_string(successes(chosen)) +
                                     "/" + std::to_string(runs) + " successes");
        }
        const bool all_diverged = !chosen.empty() && std::all_of(chosen.begin(), chosen.end(), [](const ParityRun& r) {
            return r.training.diverged;
        });
        result.diverged = result.diverged || all_diverged;
        ratio_series.x.push_back(static_cast<double>(ci));
        ratio_series.y.push_back(static_cast<double>(successes(chosen)));
        emit_detail(chosen);
    }

    ratio_chart.series.push_back(std::move(ratio_series));
    std::string legend;
    for (std::size_t ci = 0; ci < spec.cases.size(); ++ci)
        legend += (ci ? " " : "") + std::to_string(ci) + "=" + std::string(to_string(spec.cases[ci]));
    ratio_chart.x_label = "case (" + legend + ")";

    result.tables.push_back(std::move(summary));
    result.tables.push_back(std::move(run_table));
    result.tables.push_back(std::move(epochs));
    result.tables.push_back(std::move(prelearn));
    if (spec.presentation_traces) result.tables.push_back(std::move(presentations));
    if (spec.lambda_interval > 0) result.tables.push_back(std::move(lambdas));
    result.charts.emplace_back("success_ratio", std::move(ratio_chart));
    if (!scan_chart.series.empty()) result.charts.emplace_back("radius_scan", std::move(scan_chart));
    result.charts.emplace_back("error_curves", std::move(curve_chart));
    return result;
}

// ---------------------------------------------------------------------------
// Deep feed-forward network

DfnnSpec dfnn_spec_for(const ExperimentSpec& spec, std::size_t layers, double init_scale) {
    DfnnSpec d;
    d.inputs = 8;
    d.width = spec.width;
    d.outputs = 1;
    d.layers = layers;
    d.input_range = spec.dfnn_input_range;
    d.hidden_range = init_scale;
    d.output_range = spec.dfnn_output_range;
    return d;
}

Dfnn init_dfnn_for_run(const ExperimentSpec& spec, const DfnnJob& job) {
    Rng rng = Rng::child(run_seed(spec.seed, job.run), 0);
    return init_dfnn(dfnn_spec_for(spec, job.layers, job.init_scale), rng);
}

namespace {

std::vector<DfnnJob> dfnn_jobs(const ExperimentSpec& spec, const std::vector<std::size_t>& layers) {
    std::vector<DfnnJob> jobs;
    for (std::size_t l : layers)
        for (double scale : spec.init_scales)
            for (std::size_t r = 0; r < resolved_runs(spec); ++r) jobs.push_back({l, scale, r});
    return jobs;
}

struct TrainedDfnn {
    Dfnn net;
    DfnnRunResult run;
};

TrainedDfnn train_dfnn(const ExperimentSpec& spec, const DfnnJob& job, bool pre_probe_only) {
    TrainedDfnn out{init_dfnn_for_run(spec, job), {}};
    Rng rng = Rng::child(run_seed(spec.seed, job.run), 1);
    out.run = run_dfnn_training(out.net, resolved_dfnn_config(spec, job.layers), rng, {pre_probe_only});
    return out;
}

std::string snapshot_name(const DfnnJob& job) {
    return "dfnn_L" + std::to_string(job.layers) + "_s" + scale_tag(job.init_scale) + "_r" + std::to_string(job.run) +
           ".snap";
}

}  // namespace

ExperimentResult run_dfnn(const ExperimentSpec& spec) {
    validate(spec);
    const auto jobs = dfnn_jobs(spec, spec.layers);
    std::vector<DfnnRunResult> runs(jobs.size());
    std::vector<std::string> snapshots(jobs.size());
    parallel_for(jobs.size(), spec.threads, [&](std::size_t i) {
        auto trained = train_dfnn(spec, jobs[i], false);
        runs[i] = std::move(trained.run);
        if (spec.save_nets) snapshots[i] = write_snapshot(to_snapshot(trained.net));
    });

    ExperimentResult result;
    const std::int64_t sal = spec.use_sal;
    Table run_table{"runs",
                    {I("layers"), R("init_scale"), I("sal"), I("run"), T("seed"), R("final_rms_error"),
                     R("pre_delta_bottom"), R("pre_delta_top"), I("diverged")},
                    {}};
    Table summary{"summary",
                  {I("layers"), R("init_scale"), I("sal"), I("runs"), I("diverged"), R("mean_error"), R("std_error"),
                   R("median_error"), R("min_error"), R("max_error")},
                  {}};
    Table curves{"epochs", {I("layers"), R("init_scale"), I("sal"), I("run"), I("epoch"), R("rms_error")}, {}};

    Chart by_depth{"Final RMS error by depth", "layers", "RMS error", {}, true};
    Chart by_scale{"Final RMS error by initial weight scale", "initial hidden weight scale", "RMS error", {}, false};

    for (std::size_t i = 0; i < jobs.size(); ++i) {
        const auto& job = jobs[i];
        const auto& run = runs[i];
        run_table.add({i64(job.layers), job.init_scale, sal, i64(job.run), seed_text(run_seed(spec.seed, job.run)),
                       run.final_rms_error, run.pre_delta_bottom, run.pre_delta_top, std::int64_t{run.diverged}});
        for (std::size_t e = 0; e < run.epoch_rms_error.size(); ++e)
            if (e % spec.trace_interval == 0 || e + 1 == run.epoch_rms_error.size())
                curves.add({i64(job.layers), job.init_scale, sal, i64(job.run), i64(e), run.epoch_rms_error[e]});
        if (spec.save_nets) result.files.emplace_back("nets/" + snapshot_name(job), std::move(snapshots[i]));
    }

    const std::size_t per = resolved_runs(spec);
    std::vector<Series> depth_series(spec.init_scales.size());
    std::vector<Series> scale_series(spec.layers.size());
    for (std::size_t i = 0; i < jobs.size(); i += per) {
        std::vector<double> errors;
        std::size_t diverged = 0;
        for (std::size_t k = i; k < i + per; ++k) {
            if (runs[k].diverged)
                ++diverged;
            else
                errors.push_back(runs[k].final_rms_error);
        }
        const auto st = stats_of(errors);
        const auto& job = jobs[i];
        summary.add({i64(job.layers), job.init_scale, sal, i64(per), i64(diverged), st.mean, st.std, st.median,
                     st.min, st.max});
        if (diverged == per) result.diverged = true;
        const std::size_t li = (i / per) / spec.init_scales.size();
        const std::size_t si = (i / per) % spec.init_scales.size();
        depth_series[si].label = "scale " + format_double(job.init_scale);
        depth_series[si].x.push_back(static_cast<double>(job.layers));
        depth_series[si].y.push_back(st.mean);
        scale_series[li].label = std::to_string(job.layers) + " layers";
        scale_series[li].x.push_back(job.init_scale);
        scale_series[li].y.push_back(st.mean);
        result.summary.push_back(std::to_string(job.layers) + " layers, scale " + format_double(job.init_scale) +
                                 ": mean error " + format_double(st.mean) + ", median " + format_double(st.median) +
                                 (diverged ? ", " + std::to_string(diverged) + " diverged" : ""));
    }
    for (auto& s : depth_series) by_depth.series.push_back(std::move(s));
    for (auto& s : scale_series) by_scale.series.push_back(std::move(s));

    result.tables.push_back(std::move(summary));
    result.tables.push_back(std::move(run_table));
    result.tables.push_back(std::move(curves));
    result.charts.emplace_back("error_by_depth", std::move(by_depth));
    if (spec.init_scales.size() > 1) result.charts.emplace_back("error_by_scale", std::move(by_scale));
    return result;
}

ExperimentResult run_dfnn_probe(const ExperimentSpec& spec) {
    validate(spec);
    const auto jobs = dfnn_jobs(spec, spec.layers);
    struct Probe {
        DfnnRunResult run;
        double radius = kNaN;
    };
    std::vector<Probe> probes(jobs.size());
    parallel_for(jobs.size(), spec.threads, [&](std::size_t i) {
        auto trained = train_dfnn(spec, jobs[i], true);
        probes[i].run = std::move(trained.run);
        if (trained.net.hidden_layers() >= 2) probes[i].radius = spectral_radius(trained.net.layers[1].w);
    });

    ExperimentResult result;
    Table rows{"runs",
               {I("layers"), R("init_scale"), I("run"), T("seed"), R("delta_bottom"), R("delta_top"), R("ratio"),
                R("spectral_radius")},
               {}};
    Table summary{"summary",
                  {I("layers"), R("init_scale"), I("runs"), R("mean_delta_bottom"), R("mean_delta_top"),
                   R("bottom_top_ratio"), R("mean_spectral_radius")},
                  {}};
    Chart chart{"Error signal before learning", "initial hidden weight scale", "delta RMS", {}, true};
    const std::size_t per = resolved_runs(spec);
    std::vector<Series> bottom(spec.layers.size()), top(spec.layers.size());
    for (std::size_t i = 0; i < jobs.size(); ++i) {
        const auto& p = probes[i];
        rows.add({i64(jobs[i].layers), jobs[i].init_scale, i64(jobs[i].run), seed_text(run_seed(spec.seed, jobs[i].run)),
                  p.run.pre_delta_bottom, p.run.pre_delta_top, p.run.pre_delta_bottom / p.run.pre_delta_top, p.radius});
    }
    for (std::size_t i = 0; i < jobs.size(); i += per) {
        double b = 0.0, t = 0.0, rad = 0.0;
        for (std::size_t k = i; k < i + per; ++k) {
            b += probes[k].run.pre_delta_bottom;
            t += probes[k].run.pre_delta_top;
            rad += probes[k].radius;
        }
        const double n = static_cast<double>(per);
        summary.add({i64(jobs[i].layers), jobs[i].init_scale, i64(per), b / n, t / n, b / t, rad / n});
        const std::size_t li = (i / per) / spec.init_scales.size();
        bottom[li].label = std::to_string(jobs[i].layers) + " layers, bottom";
        bottom[li].x.push_back(jobs[i].init_scale);
        bottom[li].y.push_back(b / n);
        top[li].label = std::to_string(jobs[i].layers) + " layers, top";
        top[li].x.push_back(jobs[i].init_scale);
        top[li].y.push_back(t / n);
    }
    for (std::size_t li = 0; li < spec.layers.size(); ++li) {
        chart.series.push_back(std::move(bottom[li]));
        chart.series.push_back(std::move(top[li]));
    }
    for (std::size_t r = 0; r < summary.rows.size(); ++r) {
        const double ratio = summary.real(r, "bottom_top_ratio");
        if (ratio >= 1.0 / 3.0 && ratio <= 3.0)
            result.summary.push_back(std::to_string(summary.integer(r, "layers")) + " layers: bottom/top ratio " +
                                     format_double(ratio) + " at scale " + format_double(summary.real(r, "init_scale")));
    }
    result.tables.push_back(std::move(summary));
    result.tables.push_back(std::move(rows));
    result.charts.emplace_back("delta_by_scale", std::move(chart));
    return result;
}

// ---------------------------------------------------------------------------
// Output analysis

std::size_t Histogram::total() const {
    std::size_t n = 0;
    for (auto c : counts) n += c;
    return n;
}

double Histogram::bin_low(std::size_t i) const {
    return lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(counts.size());
}

double Histogram::bin_high(std::size_t i) const { return bin_low(i + 1); }

Histogram make_histogram(std::span<const double> values, std::size_t bins, double lo, double hi) {
    if (bins == 0 || !(hi > lo)) throw std::invalid_argument("make_histogram: need bins > 0 and hi > lo");
    Histogram h{lo, hi, std::vector<std::size_t>(bins, 0)};
    for (double v : values) {
        if (std::isnan(v)) continue;
        const double f = (v - lo) / (hi - lo) * static_cast<double>(bins);
        const auto idx = static_cast<std::size_t>(std::clamp(std::floor(f), 0.0, static_cast<double>(bins - 1)));
        ++h.counts[idx];
    }
    return h;
}

double band_fraction(std::span<const double> values, double low, double high) {
    if (values.empty()) return 0.0;
    std::size_t n = 0;
    for (double v : values)
        if (std::abs(v) >= low && std::abs(v) <= high) ++n;
    return static_cast<double>(n) / static_cast<double>(values.size());
}

std::vector<double> probe_outputs(const std::vector<Dfnn>& nets, const std::vector<Vector>& probes) {
    std::vector<double> out;
    out.reserve(nets.size() * probes.size());
    for (const auto& net : nets)
        for (const auto& x : probes) out.push_back(dfnn_output(net, x));
    return out;
}

std::vector<std::size_t> pca_layers(std::size_t hidden) {
    std::vector<std::size_t> out;
    if (hidden == 0) return out;
    for (int k = 0; k < 4; ++k) {
        const auto h = 1 + static_cast<std::size_t>(std::lround(k * static_cast<double>(hidden - 1) / 3.0));
        if (out.empty() || out.back() != h) out.push_back(h);
    }
    return out;
}

namespace {

std::vector<Dfnn> load_nets(const std::string& dir, std::size_t layers) {
    namespace fs = std::filesystem;
    const std::string prefix = "dfnn_L" + std::to_string(layers) + "_";
    std::vector<fs::path> paths;
    std::error_code ec;
    for (const auto& entry : fs::directory_iterator(dir, ec)) {
        const auto name = entry.path().filename().string();
        if (name.rfind(prefix, 0) == 0 && entry.path().extension() == ".snap") paths.push_back(entry.path());
    }
    if (ec) throw std::runtime_error("cannot list " + dir + ": " + ec.message());
    std::sort(paths.begin(), paths.end());
    std::vector<Dfnn> nets;
    for (const auto& p : paths) {
        std::ifstream in(p, std::ios::binary);
        if (!in) throw std::runtime_error("cannot read " + p.string());
        std::ostringstream buf;
        buf << in.rdbuf();
        nets.push_back(dfnn_from_snapshot(read_snapshot(buf.str())));
    }
    if (nets.empty()) throw std::runtime_error("no " + prefix + "*.snap files in " + dir);
    return nets;
}

std::string band_label(double o, double low, double high) {
    if (o >= low && o <= high) return "positive";
    if (o <= -low && o >= -high) return "negative";
    return "other";
}

}  // namespace

ExperimentResult analyze_outputs(const ExperimentSpec& spec) {
    validate(spec);
    std::vector<std::vector<Dfnn>> nets(spec.layers.size());
    std::vector<std::vector<double>> final_errors(spec.layers.size());
    if (!spec.nets_dir.empty()) {
        for (std::size_t li = 0; li < spec.layers.size(); ++li) nets[li] = load_nets(spec.nets_dir, spec.layers[li]);
    } else {
        const std::size_t per = resolved_runs(spec);
        std::vector<DfnnJob> jobs;
        for (std::size_t l : spec.layers)
            for (std::size_t r = 0; r < per; ++r) jobs.push_back({l, spec.init_scales.front(), r});
        std::vector<TrainedDfnn> trained(jobs.size());
        parallel_for(jobs.size(), spec.threads, [&](std::size_t i) { trained[i] = train_dfnn(spec, jobs[i], false); });
        for (std::size_t i = 0; i < jobs.size(); ++i) {
            nets[i / per].push_back(std::move(trained[i].net));
            final_errors[i / per].push_back(trained[i].run.final_rms_error);
        }
    }

    Rng probe_rng = Rng::child(spec.seed, std::numeric_limits<std::uint64_t>::max());
    const auto probes = random_probe_inputs(probe_rng, spec.probe_count, 8);

    ExperimentResult result;
    Table hist{"histogram", {I("layers"), I("bin"), R("bin_low"), R("bin_high"), I("count")}, {}};
    Table bands{"bands",
                {I("layers"), I("nets"), I("outputs"), R("band_fraction"), R("positive_fraction"),
                 R("negative_fraction"), R("mean_final_rms_error")},
                {}};
    Table pca{"pca", {I("layers"), I("hidden_layer"), I("point"), R("pc1"), R("pc2"), R("output"), T("band")}, {}};
    Chart hist_chart{"Output histogram over random inputs", "network output", "count", {}, false};

    for (std::size_t li = 0; li < spec.layers.size(); ++li) {
        const std::size_t layers = spec.layers[li];
        const auto outputs = probe_outputs(nets[li], probes);
        const auto h = make_histogram(outputs, spec.histogram_bins);
        Series s{std::to_string(layers) + " layers", {}, {}, SeriesStyle::line};
        for (std::size_t b = 0; b < h.counts.size(); ++b) {
            hist.add({i64(layers), i64(b), h.bin_low(b), h.bin_high(b), i64(h.counts[b])});
            s.x.push_back(0.5 * (h.bin_low(b) + h.bin_high(b)));
            s.y.push_back(static_cast<double>(h.counts[b]));
        }
        hist_chart.series.push_back(std::move(s));
        std::size_t pos = 0, neg = 0;
        for (double o : outputs) {
            const auto label = band_label(o, spec.band_low, spec.band_high);
            pos += label == "positive";
            neg += label == "negative";
        }
        const double n = static_cast<double>(outputs.size());
        const double frac = band_fraction(outputs, spec.band_low, spec.band_high);
        const auto err = stats_of(final_errors[li]);
        bands.add({i64(layers), i64(nets[li].size()), i64(outputs.size()), frac, static_cast<double>(pos) / n,
                   static_cast<double>(neg) / n, err.mean});
        result.summary.push_back(std::to_string(layers) + " layers: band fraction " + format_double(frac));

        // PCA of hidden representations of the first net.
        const Dfnn& net = nets[li].front();
        std::vector<ForwardTrace> traces;
        traces.reserve(probes.size());
        for (const auto& x : probes) traces.push_back(dfnn_forward(net, x));
        for (std::size_t hl : pca_layers(net.hidden_layers())) {
            std::vector<Vector> points;
            points.reserve(traces.size());
            for (const auto& tr : traces) points.push_back(tr.outputs[hl - 1]);
            Pca2 p;
            try {
                p = pca_top2(points);
            } catch (const std::exception& e) {
                result.summary.push_back(std::to_string(layers) + " layers, hidden layer " + std::to_string(hl) +
                                         ": no PCA (" + e.what() + ")");
                continue;
            }
            Chart scatter{"PCA of hidden layer " + std::to_string(hl) + " (" + std::to_string(layers) + " layers)",
                          "PC1", "PC2", {}, false};
            scatter.series = {{"0.75 <= o <= 0.85", {}, {}, SeriesStyle::points},
                              {"-0.85 <= o <= -0.75", {}, {}, SeriesStyle::points},
                              {"other", {}, {}, SeriesStyle::points}};
            for (std::size_t k = 0; k < traces.size(); ++k) {
                const double o = traces[k].outputs.back().front();
                const auto label = band_label(o, spec.band_low, spec.band_high);
                pca.add({i64(layers), i64(hl), i64(k), p.projected[k][0], p.projected[k][1], o, label});
                auto& series = scatter.series[label == "positive" ? 0 : label == "negative" ? 1 : 2];
                series.x.push_back(p.projected[k][0]);
                series.y.push_back(p.projected[k][1]);
            }
            result.charts.emplace_back("pca_L" + std::to_string(layers) + "_h" + std::to_string(hl), std::move(scatter));
        }
    }
    result.tables.push_back(std::move(bands));
    result.tables.push_back(std::move(hist));
    result.tables.push_back(std::move(pca));
    result.charts.insert(result.charts.begin(), {"histogram", std::move(hist_chart)});
    return result;
}

ExperimentResult run_experiment(const ExperimentSpec& spec) {
    switch (spec.kind) {
        case ExperimentKind::chaos_flat: return run_chaos_flat(spec);
        case ExperimentKind::chaos_two_layer: return run_chaos_two_layer(spec);
        case ExperimentKind::rnn_parity: return run_rnn_parity(spec);
        case ExperimentKind::dfnn_parity: return run_dfnn(spec);
        case ExperimentKind::dfnn_probe: return run_dfnn_probe(spec);
        case ExperimentKind::analyze: return analyze_outputs(spec);
    }
    throw std::invalid_argument("unknown experiment kind");
}

}  // namespace salnet
