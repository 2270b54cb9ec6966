// Acceptance runner: one PASS/FAIL line per criterion.

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "salnet/csv.hpp"
#include "salnet/experiment.hpp"
#include "salnet/harness.hpp"
#include "salnet/learning.hpp"
#include "salnet/linalg.hpp"
#include "salnet/lyapunov.hpp"
#include "salnet/network.hpp"
#include "salnet/rng.hpp"
#include "salnet/sal.hpp"

namespace fs = std::filesystem;
using namespace salnet;

namespace {

struct Outcome {
    bool passed = false;
    std::string detail;
};

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

std::string fmt_e(double v) { return fmt("%.3g", v); }

const Table& table(const ExperimentResult& r, const std::string& name) {
    for (const auto& t : r.tables)
        if (t.name == name) return t;
    throw std::runtime_error("missing table " + name);
}

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// ---------------------------------------------------------------------------

Outcome gradient_oracles() {
    Rng rng(101);
    SalConfig cfg;
    cfg.eta_sal = 1.0;
    double sal_worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t m = 1 + rng.below(10);
        Vector w(m), x(m);
        for (auto& v : w) v = rng.uniform(-1.0, 1.0);
        for (auto& v : x) v = rng.uniform(-1.0, 1.0);
        const double theta = rng.uniform(-0.5, 0.5);
        const double o = std::tanh(dot(w, x) + theta);
        Vector analytic = *sal_delta_w(w, x, o, cfg);
        analytic.push_back(sal_delta_theta(o, norm(w), cfg));
        std::vector<double> params = w;
        params.push_back(theta);
        const auto numeric = oracle::numeric_gradient(params, [&] {
            const std::vector<double> wv(params.begin(), params.end() - 1);
            return oracle::sensitivity(wv, x, params.back());
        });
        sal_worst = std::max(sal_worst, oracle::relative_error(analytic, numeric));
    }

    auto collect = [](auto& net, std::vector<double>& p, const std::vector<double>& moved,
                      const auto& loss, Vector& a, Vector& n) {
        for (std::size_t i = 0; i < p.size(); ++i) a.push_back(p[i] - moved[i]);
        const auto g = oracle::numeric_gradient(p, [&] { return loss(net); });
        n.insert(n.end(), g.begin(), g.end());
    };

    double bptt_worst = 0.0;
    for (int trial = 0; trial < 10; ++trial) {
        ElmanRnn net = init_elman_rnn({3, 4, 1, 0.6, 0.6, 0.6}, rng);
        SequencePattern p;
        p.schedule = {{0, 0, 1.0}, {1, 1, -1.0}, {2, 2, trial % 2 ? 1.0 : -1.0}};
        p.output_step = 2;
        p.target = trial % 3 ? 0.8 : -0.8;
        ElmanTrainConfig tc = configure_case(AblationCase::F);
        tc.tanh_in_backprop = false;
        tc.squash_output_delta = false;
        tc.eta_input = tc.eta_output = tc.eta_feedback = 1.0;
        auto loss = [&](const ElmanRnn& n) {
            const double e = p.target - oracle::elman_forward(n, p);
            return 0.5 * e * e;
        };
        ElmanRnn after = net;
        bptt_pattern(after, p, tc);
        Vector a, n;
        collect(net, net.input.w.data_vector(), after.input.w.data_vector(), loss, a, n);
        collect(net, net.feedback.w.data_vector(), after.feedback.w.data_vector(), loss, a, n);
        collect(net, net.feedback.theta, after.feedback.theta, loss, a, n);
        collect(net, net.output.w.data_vector(), after.output.w.data_vector(), loss, a, n);
        collect(net, net.output.theta, after.output.theta, loss, a, n);
        bptt_worst = std::max(bptt_worst, oracle::relative_error(a, n));
    }

    double bp_worst = 0.0;
    for (int trial = 0; trial < 10; ++trial) {
        DfnnSpec spec;
        spec.inputs = 3;
        spec.width = 4;
        spec.layers = 4;
        spec.input_range = spec.hidden_range = spec.output_range = 0.8;
        Dfnn net = init_dfnn(spec, rng);
        const Vector x{rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};
        const double target = trial % 2 ? 0.8 : -0.8;
        DfnnTrainConfig tc = dfnn_config_for_depth(4, false);
        tc.tanh_in_backprop = false;
        tc.squash_output_delta = false;
        tc.eta_input = tc.eta_other = 1.0;
        auto loss = [&](const Dfnn& n) {
            const double e = target - oracle::dfnn_forward(n, x);
            return 0.5 * e * e;
        };
        Dfnn after = net;
        bp_pattern(after, x, target, tc);
        Vector a, n;
        for (std::size_t k = 0; k < net.layers.size(); ++k) {
            collect(net, net.layers[k].w.data_vector(), after.layers[k].w.data_vector(), loss, a, n);
            collect(net, net.layers[k].theta, after.layers[k].theta, loss, a, n);
        }
        bp_worst = std::max(bp_worst, oracle::relative_error(a, n));
    }
    return {sal_worst < 1e-6 && bptt_worst < 1e-5 && bp_worst < 1e-5,
            "SAL " + fmt_e(sal_worst) + ", BPTT " + fmt_e(bptt_worst) + ", BP " + fmt_e(bp_worst)};
}

// Scales every row so that f'(U_j) ||w_j|| = 1 at input x, taking the
// root on the rising side of c -> (1 - tanh^2(c u)) c ||w||.
void normalise_rows(Matrix& w, const Vector& x) {
    for (std::size_t j = 0; j < w.rows(); ++j) {
        auto row = w.row(j);
        const double u = dot(row, x), n = norm(row);
        auto s = [&](double c) {
            const double t = std::tanh(c * u);
            return (1.0 - t * t) * c * n;
        };
        double lo = 0.0, hi = 1.0 / n;
        while (s(hi) < 1.0) {
            lo = hi;
            hi *= 1.1;
            if (hi > 1e6) throw std::runtime_error("row cannot reach unit sensitivity");
        }
        for (int it = 0; it < 200; ++it) {
            const double mid = 0.5 * (lo + hi);
            (s(mid) < 1.0 ? lo : hi) = mid;
        }
        for (auto& v : row) v *= 0.5 * (lo + hi);
    }
}

Outcome variance_propagation() {
    Rng rng(202);
    const std::size_t n = 200, m = 200;
    LayerInit init;
    init.outputs = n;
    init.inputs = m;
    init.weight_range = 0.05;
    DenseLayer layer = make_layer(init, rng);
    Vector x(m);
    for (auto& v : x) v = rng.uniform(-0.1, 0.1);
    normalise_rows(layer.w, x);
    const Vector u = layer.pre_activation(x);
    Vector o(n);
    for (std::size_t j = 0; j < n; ++j) o[j] = std::tanh(u[j]);
    const auto s = layer_sensitivities(layer, o);
    double s_dev = 0.0;
    for (double v : s) s_dev = std::max(s_dev, std::abs(v - 1.0));

    double do2 = 0.0, dx2 = 0.0, lo2 = 0.0, up2 = 0.0;
    for (int trial = 0; trial < 2000; ++trial) {
        Vector dx(m), xp = x;
        for (std::size_t i = 0; i < m; ++i) {
            dx[i] = 1e-7 * rng.normal();
            xp[i] += dx[i];
        }
        const Vector up = layer.pre_activation(xp);
        for (std::size_t j = 0; j < n; ++j) {
            const double d = std::tanh(up[j]) - o[j];
            do2 += d * d;
        }
        dx2 += squared_norm(dx);

        Vector delta(n);
        for (auto& v : delta) v = rng.normal();
        lo2 += squared_norm(propagate_error(layer.w, u, delta, false));
        up2 += squared_norm(delta);
    }
    // Per-element variance ratios.
    const double forward = (do2 / n) / (dx2 / m);
    const double backward = (lo2 / m) / (up2 / n);
    // Exact expectation of both ratios: tr(J^T J) / m.
    Eigen::VectorXd fp(n);
    for (std::size_t j = 0; j < n; ++j) fp(static_cast<Eigen::Index>(j)) = 1.0 - o[j] * o[j];
    const Eigen::MatrixXd jac = fp.asDiagonal() * oracle::to_eigen(layer.w);
    const double exact = jac.squaredNorm() / static_cast<double>(m);
    const bool ok = std::abs(forward - 1.0) <= 0.1 && std::abs(backward - 1.0) <= 0.1 && s_dev < 1e-9;
    return {ok, "forward " + fmt("%.4f", forward) + ", backward " + fmt("%.4f", backward) + ", exact " +
                    fmt("%.4f", exact)};
}

Outcome linear_lyapunov() {
    Rng rng(303);
    bool ok = true;
    std::string detail;
    for (double rho : {0.5, 1.0, 1.5}) {
        FlatRnn net = init_flat_rnn({100, 1.0, 0.1, true}, rng);
        net.recurrent.w = scale_to_spectral_radius(net.recurrent.w, rho);
        const double check_rho = oracle::spectral_radius(net.recurrent.w);
        const auto r = estimate_lambda(net, rng);
        const double err = std::abs(r.lambda - std::log(rho));
        ok = ok && err <= 0.05 && std::abs(check_rho - rho) < 1e-3;
        detail += (detail.empty() ? "" : ", ") + fmt("rho %.1f", rho) + ": lambda " + fmt("%.4f", r.lambda) +
                  " (ln rho " + fmt("%.4f", std::log(rho)) + ")";
    }
    return {ok, detail};
}

Outcome chaos_flat(std::uint64_t seed) {
    auto spec = default_spec(ExperimentKind::chaos_flat);
    spec.seed = seed;
    const auto result = run_chaos_flat(spec);
    const auto& t = table(result, "metrics");
    const double initial = t.real(0, "log_sensitivity");

    double worst_gap = 0.0;
    std::size_t tracked = 0;
    double crossing_lambda = std::nan("");
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
        const double lam = t.real(i, "lambda"), ls = t.real(i, "log_sensitivity");
        if (std::isfinite(lam) && lam <= -0.3) {
            worst_gap = std::max(worst_gap, std::abs(lam - ls));
            ++tracked;
        }
        if (i > 0 && std::isnan(crossing_lambda)) {
            const double ls0 = t.real(i - 1, "log_sensitivity");
            if (ls0 < 0.0 && ls >= 0.0) {
                const double f = -ls0 / (ls - ls0);
                const double l0 = t.real(i - 1, "lambda");
                crossing_lambda = l0 + f * (lam - l0);
            }
        }
    }

    Rng rng(seed);
    const double small = log_sensitivity(init_flat_rnn({30, 1.0, 0.01, true}, rng)).total;
    const double sparse = log_sensitivity(init_flat_rnn({100, 0.3, 0.01, true}, rng)).total;

    const bool ok = std::abs(initial + 2.85) <= 0.1 && tracked > 0 && worst_gap <= 0.15 &&
                    std::isfinite(crossing_lambda) && std::abs(crossing_lambda) <= 0.1 &&
                    std::abs(small + 3.45) <= 0.1 && std::abs(sparse + 3.45) <= 0.1;
    return {ok, "initial " + fmt("%.4f", initial) + ", max |lambda - log s| " + fmt("%.4f", worst_gap) + " over " +
                    std::to_string(tracked) + " probes, lambda at crossing " + fmt("%.4f", crossing_lambda) +
                    ", n=30 " + fmt("%.4f", small) + ", rate 0.3 " + fmt("%.4f", sparse)};
}

Outcome chaos_two_layer(std::uint64_t seed) {
    auto spec = default_spec(ExperimentKind::chaos_two_layer);
    spec.seed = seed;
    spec.first_neurons = 200;
    spec.second_neurons = 20;
    spec.stop_at_target = true;
    const auto result = run_chaos_two_layer(spec);
    const auto& t = table(result, "metrics");
    std::vector<double> lambdas;
    for (std::size_t i = 0; i < t.rows.size(); ++i)
        if (std::isfinite(t.real(i, "lambda"))) lambdas.push_back(t.real(i, "lambda"));
    if (lambdas.size() < 20) return {false, "fewer than 20 lambda probes"};
    const auto tail = std::vector<double>(lambdas.end() - 20, lambdas.end());
    const auto [lo, hi] = std::minmax_element(tail.begin(), tail.end());
    const bool ok = *lo >= -0.15 && *hi <= 0.15;
    return {ok, "last 20 lambda in [" + fmt("%.4f", *lo) + ", " + fmt("%.4f", *hi) + "], initial log s " +
                    fmt("%.3f", t.real(0, "log_sensitivity_1")) + " / " + fmt("%.3f", t.real(0, "log_sensitivity_2"))};
}

struct Ablation {
    std::map<std::string, double> ratio;  // best radius for G
    std::map<std::string, std::int64_t> successes;
    std::int64_t runs = 0;
    double best_radius = 0.0;
};

Ablation ablation(std::uint64_t seed, bool paper_scale) {
    auto spec = default_spec(ExperimentKind::rnn_parity);
    spec.seed = seed;
    spec.paper_scale = paper_scale;
    const auto result = run_rnn_parity(spec);
    const auto& t = table(result, "summary");
    Ablation a;
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
        const auto& c = t.text(i, "case");
        if (c == "G" && t.integer(i, "selected") == 0) continue;
        a.successes[c] = t.integer(i, "successes");
        a.ratio[c] = t.real(i, "success_ratio");
        a.runs = t.integer(i, "runs");
        if (c == "G") a.best_radius = t.real(i, "radius");
    }
    return a;
}

std::string describe(const Ablation& a) {
    std::string out;
    for (const auto& [c, s] : a.successes) out += (out.empty() ? "" : " ") + c + "=" + std::to_string(s);
    return out + " of " + std::to_string(a.runs) + " (G at radius " + fmt("%.2f", a.best_radius) + ")";
}

Outcome ablation_desk(std::uint64_t seed) {
    const auto a = ablation(seed, false);
    const auto s = [&](const char* c) { return a.successes.at(c); };
    const bool ok = s("A") >= 8 && s("F") == 0 && s("A") > s("B") && s("A") > s("C") && s("A") > s("D") &&
                    s("E") >= s("G") - 1;
    return {ok, describe(a)};
}

Outcome ablation_full_scale(std::uint64_t seed) {
    const auto a = ablation(seed, true);
    const std::map<std::string, double> reference{{"A", 0.99}, {"D", 0.01}, {"E", 0.50}, {"F", 0.0}, {"G", 0.43}};
    double worst = 0.0;
    for (const auto& [c, r] : reference) worst = std::max(worst, std::abs(a.ratio.at(c) - r));
    return {worst <= 0.10, describe(a) + ", max deviation " + fmt("%.2f", 100 * worst) + " points"};
}

Outcome delta_probe(std::uint64_t seed) {
    // Elman, case F, epoch 0 (no learning): RMS of the hidden delta at the
    // first and last step, over every pattern of ten initialisations.
    double worst_first = 0.0, min_last = 1e300, max_last = 0.0;
    for (std::size_t r = 0; r < 10; ++r) {
        Rng rng(Rng::child_seed(run_seed(seed, r), 0));
        ElmanRnn net = init_elman_rnn({}, rng);
        for (const auto& p : parity3_patterns()) {
            const auto res = bptt_pattern(net, p, configure_case(AblationCase::F), PatternMode::observe);
            worst_first = std::max(worst_first, res.delta_rms[0]);
            min_last = std::min(min_last, res.delta_rms[3]);
            max_last = std::max(max_last, res.delta_rms[3]);
        }
    }
    const bool elman_ok = worst_first < 1e-30 && min_last > 1e-2 && max_last < 1.0;

    auto spec = default_spec(ExperimentKind::dfnn_probe);
    spec.seed = seed;
    spec.layers = {100};
    spec.init_scales = {0.1, 0.58};
    const auto result = run_dfnn_probe(spec);
    const auto& t = table(result, "summary");
    double bottom_01 = 0.0, ratio_058 = 0.0;
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
        if (t.real(i, "init_scale") == 0.1) bottom_01 = t.real(i, "mean_delta_bottom");
        if (t.real(i, "init_scale") == 0.58) ratio_058 = t.real(i, "bottom_top_ratio");
    }
    const bool dfnn_ok = bottom_01 < 1e-10 && ratio_058 >= 0.3 && ratio_058 <= 3.0;
    return {elman_ok && dfnn_ok, "Elman step 0 max " + fmt_e(worst_first) + ", step 300 in [" + fmt_e(min_last) + ", " +
                                     fmt_e(max_last) + "]; DFNN 100 layers bottom at 0.1 " + fmt_e(bottom_01) +
                                     ", ratio at 0.58 " + fmt("%.3f", ratio_058)};
}

struct DfnnOutcomes {
    Outcome training;
    Outcome bands;
};

DfnnOutcomes dfnn_training(std::uint64_t seed, const fs::path& work) {
    auto spec = default_spec(ExperimentKind::dfnn_parity);
    spec.seed = seed;
    spec.layers = {3, 30, 100};
    spec.runs = 5;
    spec.save_nets = true;
    const auto with_sal = run_dfnn(spec);
    const auto& runs = table(with_sal, "runs");
    std::map<std::int64_t, std::vector<double>> errors;
    for (std::size_t i = 0; i < runs.rows.size(); ++i)
        errors[runs.integer(i, "layers")].push_back(runs.real(i, "final_rms_error"));

    auto off = spec;
    off.layers = {30};
    off.use_sal = false;
    off.save_nets = false;
    const auto without = run_dfnn(off);
    const auto& off_runs = table(without, "runs");
    std::vector<double> off_errors;
    for (std::size_t i = 0; i < off_runs.rows.size(); ++i) off_errors.push_back(off_runs.real(i, "final_rms_error"));

    auto all_below = [](const std::vector<double>& v, double x) {
        return v.size() == 5 && std::all_of(v.begin(), v.end(), [&](double e) { return e < x; });
    };
    const double m30 = median(errors[30]), m100 = median(errors[100]);
    const double worst30 = *std::max_element(errors[30].begin(), errors[30].end());
    const double worst100 = *std::max_element(errors[100].begin(), errors[100].end());
    const double best_off = *std::min_element(off_errors.begin(), off_errors.end());
    const bool train_ok = all_below(errors[30], 0.4) && all_below(errors[100], 0.4) && m100 < m30 &&
                          off_errors.size() == 5 && best_off > 0.7;
    Outcome training{train_ok, "with SAL max error depth 30 " + fmt("%.4f", worst30) + ", depth 100 " +
                                   fmt("%.4f", worst100) + "; medians " + fmt("%.4f", m30) + " / " +
                                   fmt("%.4f", m100) + "; without SAL depth 30 min " + fmt("%.4f", best_off)};

    // Output histograms of the trained nets.
    fs::remove_all(work);
    for (const auto& [rel, contents] : with_sal.files) {
        const fs::path p = work / rel;
        fs::create_directories(p.parent_path());
        std::ofstream(p, std::ios::binary) << contents;
    }
    auto an = default_spec(ExperimentKind::analyze);
    an.seed = seed;
    an.layers = {3, 30, 100};
    an.nets_dir = (work / "nets").string();
    const auto analysed = analyze_outputs(an);
    const auto& bands = table(analysed, "bands");
    std::vector<double> fractions;
    for (std::size_t i = 0; i < bands.rows.size(); ++i) fractions.push_back(bands.real(i, "band_fraction"));
    bool increasing = fractions.size() == 3;
    for (std::size_t i = 1; increasing && i < fractions.size(); ++i) increasing = fractions[i] > fractions[i - 1];
    std::string detail;
    for (std::size_t i = 0; i < fractions.size(); ++i)
        detail += (i ? ", " : "") + std::to_string(bands.integer(i, "layers")) + " layers " +
                  fmt("%.4f", fractions[i]);
    return {training, {increasing, detail}};
}

// Runs the CLI twice per subcommand with the same seed and compares every CSV.
Outcome determinism(const std::string& cli, const fs::path& work) {
    if (cli.empty()) return {false, "no --cli given"};
    const std::vector<std::pair<std::string, std::string>> commands = {
        {"chaos-flat", "--set neurons=20 --set steps=3000 --set lyapunov_window=200"},
        {"chaos-2layer", "--set first_neurons=40 --set second_neurons=8 --set steps=3000 --set lyapunov_window=200"},
        {"rnn-parity", "--case A,F,G --runs 2 --set max_epochs=3 --set radius_step=0.5"},
        {"dfnn-parity", "--layers 3,5 --runs 2 --set epochs=5 --save-nets"},
        {"dfnn-probe", "--layers 10 --init-scale 0.1,0.5 --runs 2"},
        {"analyze", "--layers 3,5 --runs 2 --set epochs=5 --set probe_count=200"},
    };
    fs::remove_all(work);
    bool ok = true;
    std::string detail;
    for (const auto& [name, args] : commands) {
        std::map<std::string, std::string> csv[2];
        for (int k = 0; k < 2; ++k) {
            const fs::path out = work / (name + "-" + std::to_string(k));
            const std::string cmd = "\"" + cli + "\" " + name + " --seed 7 " + args + " --out \"" + out.string() +
                                    "\" > \"" + (work / (name + ".log")).string() + "\" 2>&1";
            fs::create_directories(work);
            const int rc = std::system(cmd.c_str());
            if (rc != 0) {
                ok = false;
                detail += name + " exited with " + std::to_string(rc) + "; ";
            }
            for (const auto& e : fs::recursive_directory_iterator(out)) {
                if (!e.is_regular_file() || e.path().extension() != ".csv") continue;
                std::ifstream in(e.path(), std::ios::binary);
                std::stringstream ss;
                ss << in.rdbuf();
                csv[k][fs::relative(e.path(), out).string()] = ss.str();
            }
        }
        const bool same = !csv[0].empty() && csv[0] == csv[1];
        ok = ok && same;
        detail += name + " " + std::to_string(csv[0].size()) + (same ? " identical" : " DIFFER") + "; ";
    }
    if (detail.size() >= 2) detail.resize(detail.size() - 2);
    return {ok, detail};
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"salnet acceptance checks"};
    std::string cli;
    bool paper_scale = false;
    bool strict = false;
    std::vector<int> only;
    std::uint64_t seed = 1;
    std::string work = (fs::temp_directory_path() / "salnet-acceptance").string();
    app.add_option("--cli", cli, "path to the salnet executable");
    app.add_flag("--paper-scale", paper_scale, "also run the 100-run ablation comparison");
    app.add_flag("--strict", strict, "exit non-zero when any criterion fails");
    app.add_option("--only", only, "criteria to run (default all)")->delimiter(',');
    app.add_option("--seed", seed, "master seed");
    app.add_option("--work", work, "scratch directory");
    CLI11_PARSE(app, argc, argv);

    const std::vector<std::pair<int, std::string>> names = {
        {1, "gradient oracles"},       {2, "variance propagation"}, {3, "linear Lyapunov"},
        {4, "chaos flat"},             {5, "two-layer gated"},      {6, "ablation ordering"},
        {7, "pre-learning delta"},     {8, "DFNN with SAL"},        {9, "output band fraction"},
        {10, "determinism"},
    };
    auto wanted = [&](int id) { return only.empty() || std::find(only.begin(), only.end(), id) != only.end(); };

    std::optional<DfnnOutcomes> dfnn;
    int failures = 0;
    for (const auto& [id, name] : names) {
        if (!wanted(id)) continue;
        const auto start = std::chrono::steady_clock::now();
        Outcome out;
        try {
            switch (id) {
                case 1: out = gradient_oracles(); break;
                case 2: out = variance_propagation(); break;
                case 3: out = linear_lyapunov(); break;
                case 4: out = chaos_flat(seed); break;
                case 5: out = chaos_two_layer(seed); break;
                case 6: out = ablation_desk(seed); break;
                case 7: out = delta_probe(seed); break;
                case 8:
                case 9:
                    if (!dfnn) dfnn = dfnn_training(seed, fs::path(work) / "nets");
                    out = id == 8 ? dfnn->training : dfnn->bands;
                    break;
                case 10: out = determinism(cli, fs::path(work) / "determinism"); break;
            }
        } catch (const std::exception& e) {
            out = {false, std::string("error: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::cout << (out.passed ? "PASS" : "FAIL") << " AC" << id << " " << name << ": " << out.detail << " ("
                  << fmt("%.1f", secs) << " s)" << std::endl;
        failures += !out.passed;
    }
    if (paper_scale && wanted(6)) {
        Outcome out;
        try {
            out = ablation_full_scale(seed);
        } catch (const std::exception& e) {
            out = {false, std::string("error: ") + e.what()};
        }
        std::cout << (out.passed ? "PASS" : "FAIL") << " AC6 ablation at paper scale: " << out.detail << std::endl;
        failures += !out.passed;
    }
    std::cout << failures << " criteria failed" << std::endl;
    return strict && failures > 0 ? 1 : 0;
}
