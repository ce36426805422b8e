// Acceptance run: one PASS/FAIL line per criterion, exit status 1 on any FAIL.

#include "support/properties.hpp"

#include "pansr/bart/bart.hpp"
#include "pansr/core/random.hpp"
#include "pansr/datagen/catalog.hpp"
#include "pansr/datagen/dataset.hpp"
#include "pansr/harness/experiment.hpp"
#include "pansr/metrics/metrics.hpp"
#include "pansr/panselect/pan.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

using namespace pansr;

namespace {

struct Outcome {
    bool passed = false;
    std::string detail;
};

std::string fmt(double v, int digits = 3)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

double mean(std::vector<double> const& v)
{
    double s = 0.0;
    for (double x : v) {
        s += x;
    }
    return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

double median(std::vector<double> v)
{
    std::sort(v.begin(), v.end());
    auto const m = v.size() / 2;
    return v.size() % 2 == 1 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

std::set<std::size_t> as_set(std::vector<std::size_t> const& v)
{
    return { v.begin(), v.end() };
}

// Desk-scale chains: M = 20 trees, 1000 burn-in, 1000 retained.
panselect::PanConfig desk_pan(std::size_t chains, std::uint64_t seed)
{
    panselect::PanConfig cfg;
    cfg.num_chains = chains;
    cfg.seed = seed;
    cfg.bart.keep_trees = false;
    return cfg;
}

struct ScenarioStats {
    std::size_t perfect_tpr = 0;
    std::vector<double> fpr;
};

ScenarioStats friedman_trials(datagen::Scenario scenario, std::uint64_t seed)
{
    ScenarioStats stats;
    for (std::size_t t = 0; t < 20; ++t) {
        auto const data_seed = derive_seed(seed, { 1000 + static_cast<std::uint64_t>(scenario), t });
        auto const d = datagen::friedman_scenario(scenario, 1000, 100, 10.0, data_seed);
        auto const sel = panselect::run_pan(d.X, d.y, desk_pan(10, derive_seed(data_seed, { 1 })));
        auto const u = metrics::usage_of_set(as_set(sel.selected), as_set(d.meta.relevant), d.p());
        stats.perfect_tpr += u.tpr == 1.0 ? 1 : 0;
        stats.fpr.push_back(u.fpr);
    }
    return stats;
}

Outcome friedman_baseline(std::uint64_t seed)
{
    auto const s = friedman_trials(datagen::Scenario::Standard, seed);
    double const fpr = mean(s.fpr);
    return { s.perfect_tpr >= 19 && fpr <= 0.20,
        "TPR=100% in " + std::to_string(s.perfect_tpr) + "/20 (need >= 19), mean FPR " + fmt(100 * fpr, 2)
            + "% (need <= 20%)" };
}

Outcome scenario_robustness(std::uint64_t seed)
{
    bool ok = true;
    std::ostringstream out;
    for (auto scenario : { datagen::Scenario::NoisyX, datagen::Scenario::DuplicatedX, datagen::Scenario::CorrelatedX }) {
        auto const s = friedman_trials(scenario, seed);
        double const fpr = mean(s.fpr);
        ok = ok && s.perfect_tpr >= 18;
        if (scenario == datagen::Scenario::DuplicatedX) {
            ok = ok && fpr <= 0.35;
        }
        out << datagen::name_of(scenario) << ": TPR=100% in " << s.perfect_tpr << "/20, mean FPR " << fmt(100 * fpr, 2)
            << "%; ";
    }
    out << "need >= 18/20 each and duplicatedX FPR <= 35%";
    return { ok, out.str() };
}

// Shared by the cluster-mean and rank-model criteria.
struct FeynmanRanks {
    std::vector<panselect::SelectionResult> runs;
    std::vector<std::set<std::size_t>> relevant;
};

FeynmanRanks const& feynman_ranks(std::uint64_t seed)
{
    static std::map<std::uint64_t, FeynmanRanks> cache;
    auto it = cache.find(seed);
    if (it != cache.end()) {
        return it->second;
    }
    FeynmanRanks out;
    auto const eq = datagen::builtin_equation("feynman_I_38_12");
    for (std::size_t t = 0; t < 10; ++t) {
        auto const data_seed = derive_seed(seed, { 3000, t });
        auto const d = datagen::generate({ eq, 1000, datagen::kNoiseless, 50, data_seed });
        out.runs.push_back(panselect::run_pan(d.X, d.y, desk_pan(20, derive_seed(data_seed, { 1 }))));
        out.relevant.push_back(as_set(d.meta.relevant));
    }
    return cache.emplace(seed, std::move(out)).first->second;
}

Outcome cluster_separation(std::uint64_t seed)
{
    auto const& fr = feynman_ranks(seed);
    bool ok = true;
    double lo_min = 1e9, lo_max = -1e9, hi_min = 1e9, hi_max = -1e9;
    for (auto const& run : fr.runs) {
        double const lo = run.clusters.means[0];
        double const hi = run.clusters.means[1];
        ok = ok && !run.degenerate && lo >= 1.0 && lo <= 10.0 && hi >= 95.0 && hi <= 115.0;
        lo_min = std::min(lo_min, lo);
        lo_max = std::max(lo_max, lo);
        hi_min = std::min(hi_min, hi);
        hi_max = std::max(hi_max, hi);
    }
    return { ok,
        "p=204 over 10 seeds: low-cluster mean in [" + fmt(lo_min) + ", " + fmt(lo_max) + "] (need [1, 10]), high in ["
            + fmt(hi_min) + ", " + fmt(hi_max) + "] (need [95, 115])" };
}

Outcome rank_model(std::uint64_t seed)
{
    auto const& fr = feynman_ranks(seed);
    double worst = 0.0;
    double expected = 0.0;
    for (std::size_t t = 0; t < fr.runs.size(); ++t) {
        auto const rep = panselect::rank_distribution_check(fr.runs[t].ranks, fr.relevant[t]);
        worst = std::max(worst, rep.irrelevant_deviation);
        expected = rep.irrelevant_expected;
    }
    return { worst <= 0.10,
        "irrelevant mean rank vs " + fmt(expected, 1) + ": worst relative deviation " + fmt(100 * worst, 3)
            + "% over 10 seeds (need <= 10%)" };
}

Outcome noise_degradation(std::uint64_t seed, std::filesystem::path const& scratch)
{
    harness::ExperimentConfig cfg;
    cfg.equations = { "friedman", "poly_sum_product", "poly_quadratic", "poly_pairs", "poly_cubic" };
    cfg.s = 10;
    cfg.trials = 4;
    cfg.methods = { harness::Method::Pan };
    cfg.pan = desk_pan(10, 1);
    cfg.master_seed = seed;
    cfg.output_dir = scratch / "noise";
    std::map<std::pair<std::size_t, double>, std::vector<double>> fnr;
    for (auto [n, snr] : { std::pair { std::size_t { 500 }, 0.5 }, std::pair { std::size_t { 1000 }, datagen::kNoiseless } }) {
        cfg.n_grid = { n };
        cfg.snr_grid = { snr };
        harness::run_grid(cfg);
    }
    for (auto const& r : harness::load_records(cfg.output_dir)) {
        if (r.ok && r.selection_fnr) {
            fnr[{ r.n, r.snr }].push_back(*r.selection_fnr);
        }
    }
    auto const& noisy = fnr[{ 500, 0.5 }];
    auto const& clean = fnr[{ 1000, datagen::kNoiseless }];
    double const fn = mean(noisy);
    double const fc = mean(clean);
    bool const complete = noisy.size() == 20 && clean.size() == 20;
    bool const ok = complete && fn >= fc && fc == 0.0;
    return { ok,
        "mean FNR " + fmt(fn) + " at (n=500, SNR=0.5) vs " + fmt(fc) + " at (n=1000, noiseless) over "
            + std::to_string(noisy.size()) + "+" + std::to_string(clean.size()) + " runs (need >= and noiseless 0)" };
}

Outcome solution_oracle()
{
    using expr::BinaryOp;
    using expr::Expression;
    int right = 0;
    int total = 0;
    std::string wrong;
    for (auto const* name : { "feynman_I_38_12", "friedman" }) {
        auto const eq = datagen::builtin_equation(name);
        auto const f0 = eq.parse();
        auto const x1 = Expression::variable(0, eq.variable_names[0]);
        auto const x2 = Expression::variable(1, eq.variable_names[1]);
        auto const unrelated = Expression::binary(
            BinaryOp::Add, Expression::unary(expr::UnaryOp::Sin, x1), Expression::binary(BinaryOp::Mul, x2, x2));
        std::vector<std::pair<Expression, bool>> cases {
            { Expression::binary(BinaryOp::Add, f0, Expression::constant(2.5)), true },
            { Expression::binary(BinaryOp::Mul, Expression::constant(-3.0), f0), true },
            { Expression::binary(BinaryOp::Add, f0, x1), false },
            { Expression::constant(4.0), false },
            { f0, true },
            { unrelated, false },
        };
        for (auto const& [fhat, expected] : cases) {
            metrics::SolutionOptions opts;
            opts.tol = 1e-6;
            auto const v = metrics::is_solution(fhat, f0, eq.bounds, opts);
            ++total;
            if (v.is_solution == expected) {
                ++right;
            } else {
                wrong += " " + std::string(name) + ":" + fhat.to_string();
            }
        }
    }
    return { right == total,
        std::to_string(right) + "/" + std::to_string(total) + " oracle cases classified at tol 1e-6" + wrong };
}

Outcome bart_sanity(std::uint64_t seed)
{
    // Fit quality on noiseless Friedman with p = 5.
    auto const clean = datagen::friedman_scenario(datagen::Scenario::Standard, 2000, 5, datagen::kNoiseless,
        derive_seed(seed, { 7000 }));
    auto const [train, test] = datagen::train_test_split(clean, 1000, derive_seed(seed, { 7001 }));
    bart::BartConfig cfg;
    cfg.seed = derive_seed(seed, { 7002 });
    auto const post = bart::fit_bart(train.X, train.y, cfg, test.X);
    auto const r2 = metrics::r_squared(test.y, *post.test_predictions());

    // Noise level at SNR 10, several seeds.
    std::vector<double> ratios;
    for (std::uint64_t t = 0; t < 5; ++t) {
        auto const d = datagen::friedman_scenario(datagen::Scenario::Standard, 1000, 5, 10.0, derive_seed(seed, { 7100, t }));
        bart::BartConfig c;
        c.seed = derive_seed(seed, { 7200, t });
        c.keep_trees = false;
        auto const p = bart::fit_bart(d.X, d.y, c);
        ratios.push_back(median(p.sigma2_draws()) / d.meta.sigma_eps2);
    }
    auto const [lo, hi] = std::minmax_element(ratios.begin(), ratios.end());
    bool const ok = r2 >= 0.90 && *lo >= 0.5 && *hi <= 2.0;
    return { ok,
        "noiseless test R2 " + fmt(r2, 4) + " (need >= 0.90); posterior median sigma2 / true in [" + fmt(*lo) + ", "
            + fmt(*hi) + "] over 5 seeds (need [0.5, 2])" };
}

Outcome pan_uplift(std::uint64_t seed, std::filesystem::path const& scratch)
{
    harness::ExperimentConfig cfg;
    cfg.equations = { "poly_sum_product" };
    cfg.n_grid = { 1000 };
    cfg.snr_grid = { datagen::kNoiseless };
    cfg.s = 50;
    cfg.trials = 10;
    cfg.methods = { harness::Method::SR, harness::Method::PanSR };
    cfg.pan = desk_pan(10, 1);
    cfg.gp.max_evaluations = 50000;
    cfg.master_seed = seed;
    cfg.output_dir = scratch / "uplift";
    harness::run_grid(cfg);

    std::map<harness::Method, std::vector<double>> r2;
    std::map<harness::Method, int> solved;
    std::size_t width = 0;
    for (auto const& r : harness::load_records(cfg.output_dir)) {
        if (!r.ok) {
            continue;
        }
        // an undefined model on test rows counts as a failed fit
        r2[r.method].push_back(r.test_r2.value_or(-std::numeric_limits<double>::infinity()));
        solved[r.method] += r.is_solution.value_or(false) ? 1 : 0;
    }
    width = cfg.s * 3 + 3;
    bool const complete = r2[harness::Method::SR].size() == 10 && r2[harness::Method::PanSR].size() == 10;
    double const m_sr = complete ? median(r2[harness::Method::SR]) : 0.0;
    double const m_pan = complete ? median(r2[harness::Method::PanSR]) : 0.0;
    bool const ok = complete && m_pan > m_sr && solved[harness::Method::PanSR] >= solved[harness::Method::SR];
    return { ok,
        "p=" + std::to_string(width) + ", 50k evaluations: median test R2 PAN+SR " + fmt(m_pan, 4) + " vs SR " + fmt(m_sr, 4)
            + "; solved " + std::to_string(solved[harness::Method::PanSR]) + "/10 vs "
            + std::to_string(solved[harness::Method::SR]) + "/10" };
}

Outcome invariants()
{
    bool ok = true;
    std::ostringstream out;
    std::size_t count = 0;
    for (std::uint64_t seed : { 101, 202, 303 }) {
        for (auto const& r : testing::all_properties(seed)) {
            ++count;
            if (!r.passed) {
                ok = false;
                out << " [seed " << seed << "] " << r.name << ": " << r.detail;
            }
        }
    }
    return { ok, std::to_string(count) + " property runs over seeds 101, 202, 303" + out.str() };
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app { "Acceptance criteria" };
    std::vector<int> only;
    std::uint64_t seed = 20240;
    std::filesystem::path scratch = std::filesystem::temp_directory_path() / "pansr_acceptance";
    app.add_option("--only", only, "Run only these criteria (1-9)");
    app.add_option("--seed", seed, "Master seed for data and chains");
    app.add_option("--scratch", scratch, "Directory for experiment records");
    CLI11_PARSE(app, argc, argv);

    std::filesystem::remove_all(scratch);

    std::vector<std::pair<std::string, std::function<Outcome()>>> const criteria {
        { "Friedman baseline selection", [&] { return friedman_baseline(seed); } },
        { "Friedman scenario robustness", [&] { return scenario_robustness(seed); } },
        { "Average-rank cluster separation", [&] { return cluster_separation(seed); } },
        { "Irrelevant ranks follow the uniform model", [&] { return rank_model(seed); } },
        { "FNR rises with noise and small n", [&] { return noise_degradation(seed, scratch); } },
        { "Symbolic solution oracle", [] { return solution_oracle(); } },
        { "BART fit and noise calibration", [&] { return bart_sanity(seed); } },
        { "PAN+SR beats SR on p=153", [&] { return pan_uplift(seed, scratch); } },
        { "Property suites under three seeds", [] { return invariants(); } },
    };

    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        int const id = static_cast<int>(i) + 1;
        if (!only.empty() && std::find(only.begin(), only.end(), id) == only.end()) {
            continue;
        }
        auto const start = std::chrono::steady_clock::now();
        Outcome result;
        try {
            result = criteria[i].second();
        } catch (std::exception const& e) {
            result = { false, std::string("exception: ") + e.what() };
        }
        double const secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        failures += result.passed ? 0 : 1;
        std::cout << (result.passed ? "PASS" : "FAIL") << " [" << id << "] " << criteria[i].first << ": "
                  << result.detail << " (" << fmt(secs, 1) << " s)" << std::endl;
    }
    std::filesystem::remove_all(scratch);
    return failures == 0 ? 0 : 1;
}
