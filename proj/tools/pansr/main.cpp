// pansr: command-line front end for dataset generation, PAN selection,
// GP fitting, model evaluation and experiment grids.

#include "pansr/datagen/catalog.hpp"
#include "pansr/datagen/dataset.hpp"
#include "pansr/expr/evaluate.hpp"
#include "pansr/expr/parser.hpp"
#include "pansr/expr/simplify.hpp"
#include "pansr/harness/experiment.hpp"
#include "pansr/harness/report.hpp"
#include "pansr/metrics/metrics.hpp"
#include "pansr/panselect/pan.hpp"
#include "pansr/symreg/gp.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

json read_json(fs::path const& path)
{
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot read " + path.string());
    }
    return json::parse(in);
}

void emit(json const& j, fs::path const& out)
{
    if (out.empty()) {
        std::cout << j.dump(2) << '\n';
        return;
    }
    if (out.has_parent_path()) {
        fs::create_directories(out.parent_path());
    }
    std::ofstream(out) << j.dump(2) << '\n';
}

double parse_snr(std::string const& text)
{
    if (text == "inf" || text == "none" || text == "None") {
        return pansr::datagen::kNoiseless;
    }
    return std::stod(text);
}

std::string snr_tag(double snr)
{
    if (std::isinf(snr)) {
        return "inf";
    }
    std::ostringstream out;
    out << snr;
    return out.str();
}

struct GenerateArgs {
    std::vector<std::string> equations;
    fs::path equations_file;
    std::string friedman;
    std::size_t p = 100;
    std::vector<std::size_t> n { 1000 };
    std::vector<std::string> snr { "inf" };
    std::vector<std::size_t> s { 0 };
    std::uint64_t seed = 1;
    fs::path out = "data";
};

int run_generate(GenerateArgs const& a)
{
    std::vector<pansr::expr::EquationSpec> specs;
    if (!a.equations_file.empty()) {
        specs = pansr::expr::read_equations_csv(a.equations_file);
    }
    std::vector<pansr::expr::EquationSpec> chosen;
    for (auto const& name : a.equations) {
        auto it = std::find_if(specs.begin(), specs.end(), [&](auto const& e) { return e.name == name; });
        chosen.push_back(it != specs.end() ? *it : pansr::datagen::builtin_equation(name));
    }
    if (a.equations.empty()) {
        chosen = specs;
    }
    if (chosen.empty() && a.friedman.empty()) {
        throw std::invalid_argument("nothing to generate: pass --equation, --equations-file or --friedman");
    }
    std::size_t written = 0;
    for (auto n : a.n) {
        for (auto const& snr_text : a.snr) {
            double const snr = parse_snr(snr_text);
            if (!a.friedman.empty()) {
                auto const scenario = pansr::datagen::scenario_from_name(a.friedman);
                auto const d = pansr::datagen::friedman_scenario(scenario, n, a.p, snr, a.seed);
                auto const path = a.out / (d.meta.name + "_p" + std::to_string(a.p) + "_n" + std::to_string(n) + "_snr"
                    + snr_tag(snr) + ".csv");
                pansr::datagen::write_dataset(path, d);
                std::cout << path.string() << '\n';
                ++written;
            }
            for (auto const& eq : chosen) {
                for (auto s : a.s) {
                    auto const d = pansr::datagen::generate({ eq, n, snr, s, a.seed });
                    auto const path = a.out / (eq.name + "_n" + std::to_string(n) + "_snr" + snr_tag(snr) + "_s"
                        + std::to_string(s) + ".csv");
                    pansr::datagen::write_dataset(path, d);
                    std::cout << path.string() << '\n';
                    ++written;
                }
            }
        }
    }
    std::cerr << written << " dataset(s) written\n";
    return 0;
}

struct SelectArgs {
    fs::path data;
    fs::path config;
    std::optional<std::size_t> chains;
    std::optional<std::size_t> burn_in;
    std::optional<std::size_t> draws;
    std::string cluster;
    std::optional<std::uint64_t> seed;
    std::size_t threads = 0;
    fs::path out;
    fs::path reduced;
};

int run_select(SelectArgs const& a)
{
    auto const d = pansr::datagen::read_dataset(a.data);
    auto cfg = a.config.empty() ? pansr::panselect::PanConfig {} : pansr::panselect::pan_config_from_json(read_json(a.config));
    if (a.chains) {
        cfg.num_chains = *a.chains;
    }
    if (a.burn_in) {
        cfg.bart.burn_in = *a.burn_in;
    }
    if (a.draws) {
        cfg.bart.posterior_draws = *a.draws;
    }
    if (!a.cluster.empty()) {
        cfg.algo = pansr::panselect::cluster_algo_from_name(a.cluster);
    }
    if (a.seed) {
        cfg.seed = *a.seed;
    }
    cfg.threads = a.threads;
    auto const result = pansr::panselect::run_pan(d.X, d.y, cfg);
    auto j = pansr::panselect::to_json(result);
    j["config"] = pansr::panselect::to_json(cfg);
    if (!d.meta.relevant.empty()) {
        std::set<std::size_t> const s0(d.meta.relevant.begin(), d.meta.relevant.end());
        j["usage"] = pansr::metrics::to_json(
            pansr::metrics::usage_of_set({ result.selected.begin(), result.selected.end() }, s0, d.p()));
        if (s0.size() < d.p()) {
            j["rank_model"] = pansr::panselect::to_json(pansr::panselect::rank_distribution_check(result.ranks, s0));
        }
    }
    emit(j, a.out);
    if (!a.reduced.empty()) {
        if (a.reduced.has_parent_path()) {
            fs::create_directories(a.reduced.parent_path());
        }
        std::ofstream csv(a.reduced);
        csv.precision(17);
        for (auto c : result.selected) {
            csv << 'x' << c + 1 << ',';
        }
        csv << "target\n";
        for (Eigen::Index i = 0; i < d.X.rows(); ++i) {
            for (auto c : result.selected) {
                csv << d.X(i, static_cast<Eigen::Index>(c)) << ',';
            }
            csv << d.y[i] << '\n';
        }
    }
    return 0;
}

struct FitArgs {
    fs::path data;
    fs::path config;
    std::optional<std::size_t> budget;
    std::optional<std::uint64_t> seed;
    fs::path out;
    fs::path model_out;
};

int run_fit(FitArgs const& a)
{
    auto const d = pansr::datagen::read_dataset(a.data);
    auto cfg = a.config.empty() ? pansr::symreg::GPConfig {} : read_json(a.config).get<pansr::symreg::GPConfig>();
    if (a.budget) {
        cfg.max_evaluations = *a.budget;
    }
    if (a.seed) {
        cfg.seed = *a.seed;
    }
    auto const result = pansr::symreg::evolve(d.X, d.y, cfg);
    auto j = pansr::symreg::to_json(result);
    j["config"] = cfg;
    emit(j, a.out);
    if (!a.model_out.empty()) {
        std::ofstream(a.model_out) << result.best.expression.to_string() << '\n';
    }
    return 0;
}

struct EvaluateArgs {
    std::string model;
    fs::path model_file;
    fs::path data;
    std::optional<double> tol;
    fs::path out;
};

int run_evaluate(EvaluateArgs const& a)
{
    auto const d = pansr::datagen::read_dataset(a.data);
    std::string text = a.model;
    if (!a.model_file.empty()) {
        std::ifstream in(a.model_file);
        std::getline(in, text);
    }
    if (text.empty()) {
        throw std::invalid_argument("pass --model or --model-file");
    }
    auto const names = pansr::expr::default_variable_names(d.p());
    auto const model = pansr::expr::parse_expression(text, names);
    json j = { { "model", model.to_string() }, { "complexity", pansr::expr::complexity(model) } };
    Eigen::VectorXd const pred = pansr::expr::evaluate_rows(model, d.X).matrix();
    j["test_r2"] = pred.allFinite() ? json(pansr::metrics::r_squared(d.y, pred)) : json(nullptr);
    if (!d.meta.expression.empty()) {
        pansr::metrics::SolutionOptions opts;
        opts.tol = a.tol.value_or(std::isinf(d.meta.snr) ? 1e-6 : 1e-3);
        j["solution"] = pansr::metrics::to_json(pansr::metrics::is_solution(model, d.ground_truth(), d.meta.bounds, opts));
        std::set<std::size_t> const s0(d.meta.relevant.begin(), d.meta.relevant.end());
        j["usage"] = pansr::metrics::to_json(pansr::metrics::feature_usage(model, s0, d.p()));
    }
    emit(j, a.out);
    return 0;
}

int run_experiments(fs::path const& config, fs::path const& output_dir)
{
    auto cfg = pansr::harness::load_experiment_config(config);
    if (!output_dir.empty()) {
        cfg.output_dir = output_dir;
    }
    pansr::harness::apply_env_overrides(cfg);
    fs::create_directories(cfg.output_dir);
    emit(json(cfg), cfg.output_dir / "config.json");
    auto const summary = pansr::harness::run_grid(cfg);
    std::size_t failed = 0;
    for (auto const& r : summary.records) {
        if (!r.ok) {
            ++failed;
            std::cerr << "failed: " << r.dataset_id << " " << pansr::harness::name_of(r.method) << ": " << r.failure << '\n';
        }
    }
    std::cout << summary.records.size() << " records (" << summary.computed << " computed, " << summary.reused
              << " reused, " << failed << " failed) in " << cfg.output_dir.string() << '\n';
    return 0;
}

int run_report(fs::path const& input, fs::path const& out)
{
    auto const records = pansr::harness::load_records(input);
    if (records.empty()) {
        throw std::invalid_argument("no records under " + input.string());
    }
    auto const rows = pansr::harness::report(records);
    auto const target = out.empty() ? input / "report.csv" : out;
    pansr::harness::write_report_csv(target, rows);
    std::cout << rows.size() << " rows from " << records.size() << " records -> " << target.string() << '\n';
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app { "Feature pre-screening and symbolic regression laboratory" };
    app.require_subcommand(1);

    GenerateArgs gen;
    auto* generate = app.add_subcommand("generate", "Write synthetic datasets (CSV + JSON sidecar)");
    generate->add_option("-e,--equation", gen.equations, "Equation name (built-in or from --equations-file)");
    generate->add_option("--equations-file", gen.equations_file, "Equation CSV")->check(CLI::ExistingFile);
    generate->add_option("--friedman", gen.friedman, "Friedman scenario: baseline, noisyX, duplicatedX, correlatedX");
    generate->add_option("-p", gen.p, "Columns for --friedman");
    generate->add_option("-n", gen.n, "Row counts");
    generate->add_option("--snr", gen.snr, "SNR values, 'inf' for noiseless");
    generate->add_option("-s", gen.s, "Irrelevant copies per relevant feature");
    generate->add_option("--seed", gen.seed);
    generate->add_option("-o,--out", gen.out, "Output directory");

    SelectArgs sel;
    auto* select = app.add_subcommand("select", "Run PAN feature selection on a dataset");
    select->add_option("-d,--data", sel.data)->required()->check(CLI::ExistingFile);
    select->add_option("-c,--config", sel.config, "PAN config JSON")->check(CLI::ExistingFile);
    select->add_option("-K,--chains", sel.chains);
    select->add_option("--burn-in", sel.burn_in);
    select->add_option("--draws", sel.draws);
    select->add_option("--cluster", sel.cluster, "ahc, kmeans or gmm");
    select->add_option("--seed", sel.seed);
    select->add_option("--threads", sel.threads, "0 = all cores");
    select->add_option("-o,--out", sel.out, "Result JSON (default stdout)");
    select->add_option("--reduced", sel.reduced, "Also write the selected columns as CSV");

    FitArgs fit;
    auto* fit_cmd = app.add_subcommand("fit", "Fit a GP symbolic regression model");
    fit_cmd->add_option("-d,--data", fit.data)->required()->check(CLI::ExistingFile);
    fit_cmd->add_option("-c,--config", fit.config, "GP config JSON")->check(CLI::ExistingFile);
    fit_cmd->add_option("--budget", fit.budget, "Evaluation budget");
    fit_cmd->add_option("--seed", fit.seed);
    fit_cmd->add_option("-o,--out", fit.out, "Stats JSON (default stdout)");
    fit_cmd->add_option("--model-out", fit.model_out, "Write the model text here");

    EvaluateArgs ev;
    auto* evaluate = app.add_subcommand("evaluate", "Score a model against a dataset and its ground truth");
    evaluate->add_option("-m,--model", ev.model, "Model text over x1..xp");
    evaluate->add_option("--model-file", ev.model_file)->check(CLI::ExistingFile);
    evaluate->add_option("-d,--data", ev.data)->required()->check(CLI::ExistingFile);
    evaluate->add_option("--tol", ev.tol, "Constancy tolerance (default 1e-6 noiseless, 1e-3 noisy)");
    evaluate->add_option("-o,--out", ev.out);

    fs::path run_config;
    fs::path run_output;
    auto* run = app.add_subcommand("run", "Run an experiment grid (resumable)");
    run->add_option("-c,--config", run_config)->required()->check(CLI::ExistingFile);
    run->add_option("-o,--output-dir", run_output, "Overrides output_dir from the config");

    fs::path report_input;
    fs::path report_out;
    auto* report = app.add_subcommand("report", "Aggregate records into a CSV table");
    report->add_option("-i,--input", report_input, "Experiment output directory")->required();
    report->add_option("-o,--out", report_out, "CSV path (default <input>/report.csv)");

    CLI11_PARSE(app, argc, argv);
    try {
        if (generate->parsed()) {
            return run_generate(gen);
        }
        if (select->parsed()) {
            return run_select(sel);
        }
        if (fit_cmd->parsed()) {
            return run_fit(fit);
        }
        if (evaluate->parsed()) {
            return run_evaluate(ev);
        }
        if (run->parsed()) {
            return run_experiments(run_config, run_output);
        }
        if (report->parsed()) {
            return run_report(report_input, report_out);
        }
    } catch (std::exception const& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
