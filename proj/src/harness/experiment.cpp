#include "pansr/harness/experiment.hpp"

#include "pansr/core/random.hpp"
#include "pansr/datagen/catalog.hpp"
#include "pansr/expr/evaluate.hpp"
#include "pansr/expr/simplify.hpp"
#include "pansr/metrics/metrics.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace pansr::harness {

namespace {

constexpr std::string_view kFriedmanPrefix = "friedman_";

std::uint64_t fnv1a(std::string_view text)
{
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001B3ULL;
    }
    return h;
}

std::string hex(std::uint64_t v)
{
    std::ostringstream out;
    out << std::hex << std::setw(16) << std::setfill('0') << v;
    return out.str();
}

nlohmann::json snr_to_json(double snr)
{
    return std::isinf(snr) ? nlohmann::json(nullptr) : nlohmann::json(snr);
}

double snr_from_json(nlohmann::json const& j)
{
    return j.is_null() ? datagen::kNoiseless : j.get<double>();
}

std::string snr_label(double snr)
{
    if (std::isinf(snr)) {
        return "inf";
    }
    std::ostringstream out;
    out << snr;
    return out.str();
}

std::optional<datagen::Scenario> friedman_scenario_of(std::string const& name)
{
    if (name.rfind(kFriedmanPrefix, 0) != 0) {
        return std::nullopt;
    }
    try {
        return datagen::scenario_from_name(name.substr(kFriedmanPrefix.size()));
    } catch (std::invalid_argument const&) {
        return std::nullopt;
    }
}

expr::EquationSpec resolve_equation(ExperimentConfig const& cfg, std::string const& name)
{
    if (!cfg.equations_file.empty()) {
        for (auto const& eq : expr::read_equations_csv(cfg.equations_file)) {
            if (eq.name == name) {
                return eq;
            }
        }
    }
    return datagen::builtin_equation(name);
}

template <typename T>
nlohmann::json optional_json(std::optional<T> const& v)
{
    return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

template <typename T>
std::optional<T> optional_from(nlohmann::json const& j, char const* key)
{
    if (!j.contains(key) || j.at(key).is_null()) {
        return std::nullopt;
    }
    return j.at(key).get<T>();
}

double seconds_since(std::chrono::steady_clock::time_point start)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

void write_record(std::filesystem::path const& path, ExperimentRecord const& record)
{
    std::filesystem::create_directories(path.parent_path());
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp);
        if (!out) {
            throw std::runtime_error("cannot write " + tmp.string());
        }
        out << nlohmann::json(record).dump() << '\n';
    }
    std::filesystem::rename(tmp, path);
}

std::optional<ExperimentRecord> read_record(std::filesystem::path const& path)
{
    std::ifstream in(path);
    std::string line;
    if (!in || !std::getline(in, line) || line.empty()) {
        return std::nullopt;
    }
    try {
        return nlohmann::json::parse(line).get<ExperimentRecord>();
    } catch (nlohmann::json::exception const&) {
        return std::nullopt;
    }
}

ExperimentRecord blank_record(ExperimentConfig const& cfg, Cell const& cell)
{
    ExperimentRecord r;
    r.equation = cell.equation;
    r.n = cell.n;
    r.snr = cell.snr;
    r.trial = cell.trial;
    r.method = cell.method;
    r.seed = dataset_seed(cfg, cell);
    r.dataset_id = cell.equation + "/n=" + std::to_string(cell.n) + "/snr=" + snr_label(cell.snr) + "/trial="
        + std::to_string(cell.trial);
    return r;
}

} // namespace

std::string_view name_of(Method method) noexcept
{
    switch (method) {
    case Method::SR:
        return "SR";
    case Method::PanSR:
        return "PAN+SR";
    case Method::Pan:
        return "PAN";
    }
    return "SR";
}

Method method_from_name(std::string_view name)
{
    for (auto m : { Method::SR, Method::PanSR, Method::Pan }) {
        if (name == name_of(m)) {
            return m;
        }
    }
    if (name == "PAN-only") {
        return Method::Pan;
    }
    throw std::invalid_argument("unknown method: " + std::string(name));
}

void ExperimentConfig::validate() const
{
    if (equations.empty() || n_grid.empty() || snr_grid.empty() || methods.empty()) {
        throw std::invalid_argument("experiment grid has an empty axis");
    }
    if (trials == 0) {
        throw std::invalid_argument("trials must be positive");
    }
    for (double snr : snr_grid) {
        if (!(snr > 0.0)) {
            throw std::invalid_argument("SNR values must be positive (null for noiseless)");
        }
    }
    for (auto const& name : equations) {
        if (!friedman_scenario_of(name)) {
            resolve_equation(*this, name).validate();
        }
    }
    bool const uses_pan = std::any_of(methods.begin(), methods.end(), [](Method m) { return m != Method::SR; });
    if (uses_pan) {
        pan.validate();
    }
    gp.validate();
}

void to_json(nlohmann::json& j, ExperimentConfig const& c)
{
    nlohmann::json snrs = nlohmann::json::array();
    for (double s : c.snr_grid) {
        snrs.push_back(snr_to_json(s));
    }
    nlohmann::json methods = nlohmann::json::array();
    for (auto m : c.methods) {
        methods.push_back(name_of(m));
    }
    j = {
        { "equations", c.equations },
        { "equations_file", c.equations_file.string() },
        { "n", c.n_grid },
        { "snr", snrs },
        { "s", c.s },
        { "friedman_p", c.friedman_p },
        { "trials", c.trials },
        { "methods", methods },
        { "pan", panselect::to_json(c.pan) },
        { "gp", c.gp },
        { "solution_tol_noiseless", c.solution_tol_noiseless },
        { "solution_tol_noisy", c.solution_tol_noisy },
        { "cell_seconds", c.cell_seconds },
        { "output_dir", c.output_dir.string() },
        { "parallelism", c.parallelism },
        { "master_seed", c.master_seed },
    };
}

void from_json(nlohmann::json const& j, ExperimentConfig& c)
{
    ExperimentConfig const d;
    c.equations = j.at("equations").get<std::vector<std::string>>();
    c.equations_file = j.value("equations_file", std::string());
    c.n_grid = j.value("n", d.n_grid);
    c.snr_grid.clear();
    if (j.contains("snr")) {
        for (auto const& s : j.at("snr")) {
            c.snr_grid.push_back(snr_from_json(s));
        }
    } else {
        c.snr_grid = d.snr_grid;
    }
    c.s = j.value("s", d.s);
    c.friedman_p = j.value("friedman_p", d.friedman_p);
    c.trials = j.value("trials", d.trials);
    c.methods.clear();
    if (j.contains("methods")) {
        for (auto const& m : j.at("methods")) {
            c.methods.push_back(method_from_name(m.get<std::string>()));
        }
    } else {
        c.methods = d.methods;
    }
    c.pan = j.contains("pan") ? panselect::pan_config_from_json(j.at("pan")) : d.pan;
    c.gp = j.contains("gp") ? j.at("gp").get<symreg::GPConfig>() : d.gp;
    c.solution_tol_noiseless = j.value("solution_tol_noiseless", d.solution_tol_noiseless);
    c.solution_tol_noisy = j.value("solution_tol_noisy", d.solution_tol_noisy);
    c.cell_seconds = j.value("cell_seconds", d.cell_seconds);
    c.output_dir = j.value("output_dir", d.output_dir.string());
    c.parallelism = j.value("parallelism", d.parallelism);
    c.master_seed = j.value("master_seed", d.master_seed);
}

ExperimentConfig load_experiment_config(std::filesystem::path const& path)
{
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot read " + path.string());
    }
    auto cfg = nlohmann::json::parse(in).get<ExperimentConfig>();
    if (!cfg.equations_file.empty() && cfg.equations_file.is_relative()) {
        cfg.equations_file = path.parent_path() / cfg.equations_file;
    }
    return cfg;
}

void apply_env_overrides(ExperimentConfig& cfg)
{
    if (char const* seed = std::getenv("PANSR_SEED"); seed != nullptr && *seed != '\0') {
        cfg.master_seed = std::stoull(seed);
    }
    if (char const* par = std::getenv("PANSR_PARALLELISM"); par != nullptr && *par != '\0') {
        cfg.parallelism = std::max<std::size_t>(1, std::stoull(par));
    }
}

void to_json(nlohmann::json& j, ExperimentRecord const& r)
{
    j = {
        { "dataset_id", r.dataset_id },
        { "equation", r.equation },
        { "n", r.n },
        { "snr", snr_to_json(r.snr) },
        { "trial", r.trial },
        { "method", name_of(r.method) },
        { "seed", r.seed },
        { "status", r.ok ? "ok" : "failed" },
        { "failure", r.failure },
        { "model", r.model },
        { "test_r2", optional_json(r.test_r2) },
        { "complexity", optional_json(r.complexity) },
        { "is_solution", optional_json(r.is_solution) },
        { "solution_mode", r.solution_mode },
        { "selection_tpr", optional_json(r.selection_tpr) },
        { "selection_fpr", optional_json(r.selection_fpr) },
        { "selection_fnr", optional_json(r.selection_fnr) },
        { "selected_count", optional_json(r.selected_count) },
        { "model_tpr", optional_json(r.model_tpr) },
        { "model_fpr", optional_json(r.model_fpr) },
        { "model_fnr", optional_json(r.model_fnr) },
        { "pan_seconds", r.pan_seconds },
        { "sr_seconds", r.sr_seconds },
        { "train_seconds", r.train_seconds },
        { "evaluations", r.evaluations },
    };
}

void from_json(nlohmann::json const& j, ExperimentRecord& r)
{
    r.dataset_id = j.at("dataset_id").get<std::string>();
    r.equation = j.at("equation").get<std::string>();
    r.n = j.at("n").get<std::size_t>();
    r.snr = snr_from_json(j.at("snr"));
    r.trial = j.at("trial").get<std::size_t>();
    r.method = method_from_name(j.at("method").get<std::string>());
    r.seed = j.at("seed").get<std::uint64_t>();
    r.ok = j.at("status").get<std::string>() == "ok";
    r.failure = j.value("failure", "");
    r.model = j.value("model", "");
    r.test_r2 = optional_from<double>(j, "test_r2");
    r.complexity = optional_from<std::size_t>(j, "complexity");
    r.is_solution = optional_from<bool>(j, "is_solution");
    r.solution_mode = j.value("solution_mode", "");
    r.selection_tpr = optional_from<double>(j, "selection_tpr");
    r.selection_fpr = optional_from<double>(j, "selection_fpr");
    r.selection_fnr = optional_from<double>(j, "selection_fnr");
    r.selected_count = optional_from<std::size_t>(j, "selected_count");
    r.model_tpr = optional_from<double>(j, "model_tpr");
    r.model_fpr = optional_from<double>(j, "model_fpr");
    r.model_fnr = optional_from<double>(j, "model_fnr");
    r.pan_seconds = j.value("pan_seconds", 0.0);
    r.sr_seconds = j.value("sr_seconds", 0.0);
    r.train_seconds = j.value("train_seconds", 0.0);
    r.evaluations = j.value("evaluations", std::size_t { 0 });
}

std::vector<Cell> expand_grid(ExperimentConfig const& cfg)
{
    std::vector<Cell> cells;
    for (auto const& eq : cfg.equations) {
        for (auto n : cfg.n_grid) {
            for (double snr : cfg.snr_grid) {
                for (std::size_t t = 0; t < cfg.trials; ++t) {
                    for (auto m : cfg.methods) {
                        cells.push_back({ eq, n, snr, t, m });
                    }
                }
            }
        }
    }
    return cells;
}

std::uint64_t dataset_seed(ExperimentConfig const& cfg, Cell const& cell)
{
    return derive_seed(cfg.master_seed,
        { fnv1a(cell.equation), cell.n, std::bit_cast<std::uint64_t>(cell.snr), cell.trial });
}

std::filesystem::path record_path(ExperimentConfig const& cfg, Cell const& cell)
{
    // The key covers everything that can change a record's content.
    nlohmann::json key = {
        { "equation", cell.equation },
        { "n", cell.n },
        { "snr", snr_label(cell.snr) },
        { "trial", cell.trial },
        { "method", name_of(cell.method) },
        { "master_seed", cfg.master_seed },
        { "s", cfg.s },
        { "friedman_p", cfg.friedman_p },
        { "pan", panselect::to_json(cfg.pan) },
        { "gp", cfg.gp },
        { "tol", { cfg.solution_tol_noiseless, cfg.solution_tol_noisy } },
        { "equations_file", cfg.equations_file.string() },
    };
    key["pan"].erase("threads");
    auto const digest = hex(fnv1a(key.dump()));
    return cfg.output_dir / "records" / digest.substr(0, 2) / (digest.substr(2) + ".jsonl");
}

std::pair<datagen::Dataset, datagen::Dataset> cell_data(ExperimentConfig const& cfg, Cell const& cell)
{
    auto const seed = dataset_seed(cfg, cell);
    auto const pool = 2 * cell.n;
    datagen::Dataset d;
    if (auto const scenario = friedman_scenario_of(cell.equation)) {
        d = datagen::friedman_scenario(*scenario, pool, cfg.friedman_p, cell.snr, seed);
    } else {
        d = datagen::generate({ resolve_equation(cfg, cell.equation), pool, cell.snr, cfg.s, seed });
    }
    return datagen::train_test_split(d, cell.n, derive_seed(seed, { 7 }));
}

ExperimentRecord run_cell(ExperimentConfig const& cfg, Cell const& cell)
{
    auto r = blank_record(cfg, cell);
    try {
        auto const [train, test] = cell_data(cfg, cell);
        auto const p = train.p();
        std::set<std::size_t> const s0(train.meta.relevant.begin(), train.meta.relevant.end());

        std::vector<std::size_t> columns(p);
        for (std::size_t j = 0; j < p; ++j) {
            columns[j] = j;
        }
        if (cell.method != Method::SR) {
            auto pan = cfg.pan;
            pan.seed = derive_seed(r.seed, { 1 });
            if (cfg.parallelism > 1) {
                pan.threads = 1;
            }
            auto const start = std::chrono::steady_clock::now();
            auto const sel = panselect::run_pan(train.X, train.y, pan);
            r.pan_seconds = seconds_since(start);
            columns = sel.selected;
            auto const usage = metrics::usage_of_set({ columns.begin(), columns.end() }, s0, p);
            r.selection_tpr = usage.tpr;
            r.selection_fpr = usage.fpr;
            r.selection_fnr = usage.fnr;
            r.selected_count = columns.size();
        }
        if (cell.method != Method::Pan) {
            Eigen::MatrixXd Xr(train.X.rows(), static_cast<Eigen::Index>(columns.size()));
            for (std::size_t c = 0; c < columns.size(); ++c) {
                Xr.col(static_cast<Eigen::Index>(c)) = train.X.col(static_cast<Eigen::Index>(columns[c]));
            }
            auto gp = cfg.gp;
            gp.seed = derive_seed(r.seed, { 2 });
            gp.max_seconds = std::min(gp.max_seconds, cfg.cell_seconds);
            auto const start = std::chrono::steady_clock::now();
            auto const fit = symreg::evolve(Xr, train.y, gp);
            r.sr_seconds = seconds_since(start);
            r.evaluations = fit.evaluations;

            auto const model = expr::remap_variables(fit.best.expression, columns);
            r.model = model.to_string();
            r.complexity = expr::complexity(model);
            Eigen::VectorXd const pred = expr::evaluate_rows(model, test.X).matrix();
            if (pred.allFinite()) {
                r.test_r2 = metrics::r_squared(test.y, pred);
            } else {
                r.failure = "model undefined on some test rows";
            }
            metrics::SolutionOptions opts;
            opts.tol = std::isinf(cell.snr) ? cfg.solution_tol_noiseless : cfg.solution_tol_noisy;
            try {
                auto const verdict = metrics::is_solution(model, train.ground_truth(), train.meta.bounds, opts);
                r.is_solution = verdict.is_solution;
                r.solution_mode = metrics::name_of(verdict.mode);
            } catch (std::domain_error const&) {
                r.is_solution = false;
                r.solution_mode = "none";
            }
            auto const usage = metrics::feature_usage(model, s0, p);
            r.model_tpr = usage.tpr;
            r.model_fpr = usage.fpr;
            r.model_fnr = usage.fnr;
        }
        r.train_seconds = r.pan_seconds + r.sr_seconds;
    } catch (std::exception const& e) {
        r.ok = false;
        r.failure = e.what();
    }
    return r;
}

GridSummary run_grid(ExperimentConfig const& cfg, GridHooks const& hooks)
{
    cfg.validate();
    auto const cells = expand_grid(cfg);
    GridSummary summary;
    summary.records.resize(cells.size());
    std::vector<std::size_t> todo;
    for (std::size_t i = 0; i < cells.size(); ++i) {
        auto existing = read_record(record_path(cfg, cells[i]));
        if (existing && existing->ok) {
            summary.records[i] = std::move(*existing);
            ++summary.reused;
        } else {
            todo.push_back(i);
        }
    }

    std::atomic<std::size_t> next { 0 };
    auto worker = [&] {
        for (std::size_t k = next++; k < todo.size(); k = next++) {
            auto const& cell = cells[todo[k]];
            ExperimentRecord record;
            try {
                if (hooks.before_cell) {
                    hooks.before_cell(cell);
                }
                record = run_cell(cfg, cell);
            } catch (std::exception const& e) {
                record = blank_record(cfg, cell);
                record.ok = false;
                record.failure = e.what();
            }
            write_record(record_path(cfg, cell), record);
            summary.records[todo[k]] = std::move(record);
        }
    };
    auto const threads = std::min(std::max<std::size_t>(1, cfg.parallelism), std::max<std::size_t>(1, todo.size()));
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t t = 0; t < threads; ++t) {
            pool.emplace_back(worker);
        }
    }
    summary.computed = todo.size();
    return summary;
}

std::vector<ExperimentRecord> load_records(std::filesystem::path const& output_dir)
{
    std::vector<std::filesystem::path> files;
    auto const root = output_dir / "records";
    if (!std::filesystem::exists(root)) {
        return {};
    }
    for (auto const& entry : std::filesystem::recursive_directory_iterator(root)) {
        if (entry.is_regular_file() && entry.path().extension() == ".jsonl") {
            files.push_back(entry.path());
        }
    }
    std::sort(files.begin(), files.end());
    std::vector<ExperimentRecord> out;
    for (auto const& f : files) {
        std::ifstream in(f);
        std::string line;
        while (std::getline(in, line)) {
            if (!line.empty()) {
                out.push_back(nlohmann::json::parse(line).get<ExperimentRecord>());
            }
        }
    }
    return out;
}

} // namespace pansr::harness
