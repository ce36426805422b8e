#pragma once

#include "pansr/datagen/dataset.hpp"
#include "pansr/panselect/pan.hpp"
#include "pansr/symreg/gp.hpp"

#include <json.hpp>

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace pansr::harness {

enum class Method { SR, PanSR, Pan };

std::string_view name_of(Method method) noexcept;
Method method_from_name(std::string_view name);

struct ExperimentConfig {
    // Built-in names, names from `equations_file`, or friedman_<scenario>
    // (baseline, noisyX, duplicatedX, correlatedX) with `friedman_p` columns.
    std::vector<std::string> equations;
    std::filesystem::path equations_file;
    std::vector<std::size_t> n_grid { 1000 };
    std::vector<double> snr_grid { datagen::kNoiseless };
    std::size_t s = 50;
    std::size_t friedman_p = 100;
    std::size_t trials = 10;
    std::vector<Method> methods { Method::SR, Method::PanSR };
    panselect::PanConfig pan;
    symreg::GPConfig gp;
    double solution_tol_noiseless = 1e-6;
    double solution_tol_noisy = 1e-3;
    double cell_seconds = 600.0;
    std::filesystem::path output_dir = "results";
    std::size_t parallelism = 1;
    std::uint64_t master_seed = 1;

    // Throws std::invalid_argument on an empty grid or an unknown equation.
    void validate() const;
};

void to_json(nlohmann::json& j, ExperimentConfig const& cfg);
void from_json(nlohmann::json const& j, ExperimentConfig& cfg);

ExperimentConfig load_experiment_config(std::filesystem::path const& path);

/// PANSR_SEED and PANSR_PARALLELISM replace the master seed and worker count.
void apply_env_overrides(ExperimentConfig& cfg);

struct Cell {
    std::string equation;
    std::size_t n = 0;
    double snr = datagen::kNoiseless;
    std::size_t trial = 0;
    Method method = Method::SR;
};

struct ExperimentRecord {
    std::string dataset_id;
    std::string equation;
    std::size_t n = 0;
    double snr = datagen::kNoiseless;
    std::size_t trial = 0;
    Method method = Method::SR;
    std::uint64_t seed = 0;

    bool ok = true;
    std::string failure;

    std::string model;
    std::optional<double> test_r2;
    std::optional<std::size_t> complexity;
    std::optional<bool> is_solution;
    std::string solution_mode;
    std::optional<double> selection_tpr, selection_fpr, selection_fnr;
    std::optional<std::size_t> selected_count;
    std::optional<double> model_tpr, model_fpr, model_fnr;
    double pan_seconds = 0.0;
    double sr_seconds = 0.0;
    double train_seconds = 0.0; // pan_seconds + sr_seconds
    std::size_t evaluations = 0;
};

void to_json(nlohmann::json& j, ExperimentRecord const& r);
void from_json(nlohmann::json const& j, ExperimentRecord& r);

/// Every (equation, n, SNR, trial, method) combination in grid order.
std::vector<Cell> expand_grid(ExperimentConfig const& cfg);

/// Seed shared by all methods of one (equation, n, SNR, trial).
std::uint64_t dataset_seed(ExperimentConfig const& cfg, Cell const& cell);

/// Content-addressed location of a cell's JSON-lines record file.
std::filesystem::path record_path(ExperimentConfig const& cfg, Cell const& cell);

/// Builds the dataset of a cell and splits it into train and test parts.
std::pair<datagen::Dataset, datagen::Dataset> cell_data(ExperimentConfig const& cfg, Cell const& cell);

/// Runs one cell. Errors are captured in the record, never thrown.
ExperimentRecord run_cell(ExperimentConfig const& cfg, Cell const& cell);

struct GridHooks {
    // Called before a cell is computed; throwing marks the cell as failed.
    std::function<void(Cell const&)> before_cell;
};

struct GridSummary {
    std::vector<ExperimentRecord> records; // in grid order
    std::size_t computed = 0;
    std::size_t reused = 0;
};

/// Runs every cell whose record file is missing (or holds a failure), writes
/// its record file, and loads the rest from disk.
GridSummary run_grid(ExperimentConfig const& cfg, GridHooks const& hooks = {});

std::vector<ExperimentRecord> load_records(std::filesystem::path const& output_dir);

} // namespace pansr::harness
