#pragma once

#include "pansr/expr/equation.hpp"
#include "pansr/expr/expression.hpp"

#include <Eigen/Core>
#include <json.hpp>

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace pansr::datagen {

inline constexpr double kNoiseless = std::numeric_limits<double>::infinity();

enum class Scenario { Standard, NoisyX, DuplicatedX, CorrelatedX };

std::string_view name_of(Scenario scenario) noexcept;
Scenario scenario_from_name(std::string_view name);

struct DatasetSpec {
    expr::EquationSpec equation;
    std::size_t n = 1000;
    double snr = kNoiseless;
    std::size_t s = 0; // irrelevant copies per relevant feature
    std::uint64_t seed = 1;
};

struct DatasetMeta {
    std::string name;
    // Ground truth over the dataset columns x1..xp.
    std::string expression;
    std::vector<std::size_t> relevant; // S0, zero-based, ascending
    std::vector<expr::Bounds> bounds;  // one box per column
    double snr = kNoiseless;
    double sigma_f2 = 0.0;
    double sigma_eps2 = 0.0;
    std::size_t s = 0;
    std::uint64_t seed = 0;
    Scenario scenario = Scenario::Standard;
};

struct Dataset {
    Eigen::MatrixXd X;
    Eigen::VectorXd y;
    DatasetMeta meta;

    [[nodiscard]] std::size_t rows() const noexcept { return static_cast<std::size_t>(X.rows()); }
    [[nodiscard]] std::size_t p() const noexcept { return static_cast<std::size_t>(X.cols()); }
    [[nodiscard]] std::size_t p0() const noexcept { return meta.relevant.size(); }

    // Parses meta.expression over x1..xp.
    [[nodiscard]] expr::Expression ground_truth() const;

    [[nodiscard]] Dataset take_rows(std::vector<std::size_t> const& rows) const;
};

/// Relevant features ~ Unif(a_j, b_j) in equation order, then s independent
/// copies per relevant feature ([X_S0, X_irr^1, ..., X_irr^p0]), y = f0 + eps
/// with Var(eps) = sample variance of f0 / SNR. Rows where f0 is undefined
/// are redrawn up to 100 times. Throws std::invalid_argument for SNR <= 0,
/// n == 0, an invalid equation, or a row that never becomes defined.
Dataset generate(DatasetSpec const& spec);

/// The Friedman benchmark with p columns under one of the perturbation
/// scenarios. duplicatedX inserts x6 = x1 + x2 as column 6 and counts it in p.
Dataset friedman_scenario(Scenario scenario, std::size_t n, std::size_t p, double snr, std::uint64_t seed);

/// Shuffles, splits 75/25 (by `train_frac`), then keeps exactly target_n
/// training rows and floor(target_n / 3) test rows. Row order within each
/// part follows the original dataset.
std::pair<Dataset, Dataset> train_test_split(
    Dataset const& d, std::size_t target_n, std::uint64_t seed, double train_frac = 0.75);

nlohmann::json meta_to_json(DatasetMeta const& meta);
DatasetMeta meta_from_json(nlohmann::json const& j);

/// Writes `<stem>.csv` (header x1..xp,target) and the metadata sidecar
/// `<stem>.json` next to it.
void write_dataset(std::filesystem::path const& csv_path, Dataset const& d);

/// Reads a dataset CSV. The sidecar is optional; without it the metadata is
/// empty apart from default bounds.
Dataset read_dataset(std::filesystem::path const& csv_path);

std::filesystem::path sidecar_path(std::filesystem::path const& csv_path);

} // namespace pansr::datagen
