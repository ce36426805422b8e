#include "pansr/datagen/dataset.hpp"

#include "pansr/core/csv.hpp"
#include "pansr/core/random.hpp"
#include "pansr/expr/evaluate.hpp"
#include "pansr/expr/parser.hpp"
#include "pansr/expr/simplify.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <numeric>
#include <random>
#include <stdexcept>

namespace pansr::datagen {

namespace {

constexpr int kMaxRedraws = 100;

double sample_variance(Eigen::VectorXd const& v)
{
    if (v.size() < 2) {
        return 0.0;
    }
    return (v.array() - v.mean()).square().sum() / static_cast<double>(v.size() - 1);
}

void check_snr(double snr)
{
    if (!(snr > 0.0)) {
        throw std::invalid_argument("SNR must be positive (use infinity for noiseless data)");
    }
}

// Adds N(0, sigma_f2 / snr) noise to f and fills the noise fields of meta.
Eigen::VectorXd add_noise(Eigen::VectorXd const& f, double snr, Rng& rng, DatasetMeta& meta)
{
    meta.snr = snr;
    meta.sigma_f2 = sample_variance(f);
    meta.sigma_eps2 = std::isinf(snr) ? 0.0 : meta.sigma_f2 / snr;
    Eigen::VectorXd y = f;
    if (meta.sigma_eps2 > 0.0) {
        std::normal_distribution<double> noise(0.0, std::sqrt(meta.sigma_eps2));
        for (Eigen::Index i = 0; i < y.size(); ++i) {
            y[i] += noise(rng);
        }
    }
    return y;
}

std::vector<std::size_t> iota_indices(std::size_t count)
{
    std::vector<std::size_t> v(count);
    std::iota(v.begin(), v.end(), std::size_t { 0 });
    return v;
}

std::string canonical_over_columns(expr::Expression const& e)
{
    auto const identity = iota_indices(e.arity());
    return expr::remap_variables(e, identity).to_string();
}

double standard_normal_cdf(double z)
{
    return 0.5 * std::erfc(-z / std::numbers::sqrt2);
}

} // namespace

std::string_view name_of(Scenario scenario) noexcept
{
    switch (scenario) {
    case Scenario::Standard:
        return "standard";
    case Scenario::NoisyX:
        return "noisyX";
    case Scenario::DuplicatedX:
        return "duplicatedX";
    case Scenario::CorrelatedX:
        return "correlatedX";
    }
    return "standard";
}

Scenario scenario_from_name(std::string_view name)
{
    for (auto s : { Scenario::Standard, Scenario::NoisyX, Scenario::DuplicatedX, Scenario::CorrelatedX }) {
        if (name == name_of(s)) {
            return s;
        }
    }
    if (name == "baseline") {
        return Scenario::Standard;
    }
    throw std::invalid_argument("unknown scenario: " + std::string(name));
}

expr::Expression Dataset::ground_truth() const
{
    if (meta.expression.empty()) {
        throw std::logic_error("dataset has no ground-truth expression");
    }
    auto const names = expr::default_variable_names(p());
    return expr::parse_expression(meta.expression, names);
}

Dataset Dataset::take_rows(std::vector<std::size_t> const& rows) const
{
    Dataset out;
    out.meta = meta;
    out.X.resize(static_cast<Eigen::Index>(rows.size()), X.cols());
    out.y.resize(static_cast<Eigen::Index>(rows.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        auto const r = static_cast<Eigen::Index>(rows[i]);
        out.X.row(static_cast<Eigen::Index>(i)) = X.row(r);
        out.y[static_cast<Eigen::Index>(i)] = y[r];
    }
    return out;
}

Dataset generate(DatasetSpec const& spec)
{
    check_snr(spec.snr);
    if (spec.n == 0) {
        throw std::invalid_argument("generate: n must be positive");
    }
    spec.equation.validate();
    auto const f0 = spec.equation.parse();
    auto const p0 = spec.equation.p0();
    auto const p = p0 * (1 + spec.s);
    auto const n = static_cast<Eigen::Index>(spec.n);

    Rng rng(spec.seed);
    std::vector<std::uniform_real_distribution<double>> draw;
    for (auto const& b : spec.equation.bounds) {
        draw.emplace_back(b.lower, b.upper);
    }

    Dataset d;
    d.X.resize(n, static_cast<Eigen::Index>(p));
    Eigen::VectorXd f(n);
    std::vector<double> row(p0);
    for (Eigen::Index i = 0; i < n; ++i) {
        std::optional<double> value;
        for (int attempt = 0; attempt < kMaxRedraws && !value; ++attempt) {
            for (std::size_t j = 0; j < p0; ++j) {
                row[j] = draw[j](rng);
            }
            value = expr::evaluate(f0, row);
        }
        if (!value) {
            throw std::invalid_argument("generate: " + spec.equation.name + " is undefined on "
                + std::to_string(kMaxRedraws) + " consecutive draws");
        }
        for (std::size_t j = 0; j < p0; ++j) {
            d.X(i, static_cast<Eigen::Index>(j)) = row[j];
        }
        f[i] = *value;
    }
    // Irrelevant block for relevant feature j occupies s consecutive columns.
    for (std::size_t j = 0; j < p0; ++j) {
        for (std::size_t c = 0; c < spec.s; ++c) {
            auto const col = static_cast<Eigen::Index>(p0 + j * spec.s + c);
            for (Eigen::Index i = 0; i < n; ++i) {
                d.X(i, col) = draw[j](rng);
            }
        }
    }

    d.meta.name = spec.equation.name;
    d.meta.expression = canonical_over_columns(f0);
    d.meta.relevant = iota_indices(p0);
    d.meta.bounds = spec.equation.bounds;
    for (std::size_t j = 0; j < p0; ++j) {
        for (std::size_t c = 0; c < spec.s; ++c) {
            d.meta.bounds.push_back(spec.equation.bounds[j]);
        }
    }
    d.meta.s = spec.s;
    d.meta.seed = spec.seed;
    d.meta.scenario = Scenario::Standard;
    d.y = add_noise(f, spec.snr, rng, d.meta);
    return d;
}

Dataset friedman_scenario(Scenario scenario, std::size_t n, std::size_t p, double snr, std::uint64_t seed)
{
    check_snr(snr);
    std::size_t const min_p = scenario == Scenario::DuplicatedX ? 6 : 5;
    if (p < min_p) {
        throw std::invalid_argument("friedman_scenario: p must be at least " + std::to_string(min_p));
    }
    if (n == 0) {
        throw std::invalid_argument("friedman_scenario: n must be positive");
    }
    auto const rows = static_cast<Eigen::Index>(n);
    auto const cols = static_cast<Eigen::Index>(p);
    Rng rng(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::normal_distribution<double> normal(0.0, 1.0);

    // Base predictors; duplicatedX draws p - 1 and inserts the duplicate.
    Eigen::Index const base_cols = scenario == Scenario::DuplicatedX ? cols - 1 : cols;
    Eigen::MatrixXd base(rows, base_cols);
    if (scenario == Scenario::CorrelatedX) {
        double const rho = 0.9;
        double const innovation = std::sqrt(1.0 - rho * rho);
        for (Eigen::Index i = 0; i < rows; ++i) {
            double z = normal(rng);
            base(i, 0) = standard_normal_cdf(z);
            for (Eigen::Index j = 1; j < base_cols; ++j) {
                z = rho * z + innovation * normal(rng);
                base(i, j) = standard_normal_cdf(z);
            }
        }
    } else {
        for (Eigen::Index i = 0; i < rows; ++i) {
            for (Eigen::Index j = 0; j < base_cols; ++j) {
                base(i, j) = unif(rng);
            }
        }
    }

    auto const& eq = [] {
        expr::EquationSpec spec;
        spec.name = "friedman";
        spec.expression = "10*sin(pi*x1*x2) + 20*(x3-0.5)**2 + 10*x4 + 5*x5";
        spec.variable_names = expr::default_variable_names(5);
        spec.bounds.assign(5, expr::Bounds { 0.0, 1.0 });
        return spec;
    }();
    auto const f0 = eq.parse();
    Eigen::VectorXd const f = expr::evaluate_rows(f0, base.leftCols(5)).matrix();

    Dataset d;
    d.meta.name = "friedman_" + std::string(name_of(scenario));
    d.meta.expression = f0.to_string();
    d.meta.relevant = iota_indices(5);
    d.meta.bounds.assign(p, expr::Bounds { 0.0, 1.0 });
    d.meta.seed = seed;
    d.meta.scenario = scenario;

    if (scenario == Scenario::DuplicatedX) {
        d.X.resize(rows, cols);
        d.X.leftCols(5) = base.leftCols(5);
        d.X.col(5) = base.col(0) + base.col(1);
        d.X.rightCols(cols - 6) = base.rightCols(base_cols - 5);
        d.meta.bounds[5] = expr::Bounds { 0.0, 2.0 };
    } else {
        d.X = base;
    }
    if (scenario == Scenario::NoisyX) {
        // Each predictor is perturbed with a fifth of its own variance (1/12).
        std::normal_distribution<double> jitter(0.0, std::sqrt(1.0 / 60.0));
        for (Eigen::Index i = 0; i < rows; ++i) {
            for (Eigen::Index j = 0; j < cols; ++j) {
                d.X(i, j) += jitter(rng);
            }
        }
    }
    d.y = add_noise(f, snr, rng, d.meta);
    return d;
}

std::pair<Dataset, Dataset> train_test_split(Dataset const& d, std::size_t target_n, std::uint64_t seed, double train_frac)
{
    if (!(train_frac > 0.0 && train_frac < 1.0)) {
        throw std::invalid_argument("train_test_split: train_frac must lie in (0, 1)");
    }
    auto const total = d.rows();
    auto const train_pool = static_cast<std::size_t>(std::floor(train_frac * static_cast<double>(total)));
    auto const test_n = target_n / 3;
    if (target_n == 0 || target_n > train_pool || test_n > total - train_pool) {
        throw std::invalid_argument("train_test_split: " + std::to_string(total) + " rows cannot supply "
            + std::to_string(target_n) + " training rows");
    }
    auto order = iota_indices(total);
    Rng rng(seed);
    std::shuffle(order.begin(), order.end(), rng);
    std::vector<std::size_t> train(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(target_n));
    auto const test_begin = order.begin() + static_cast<std::ptrdiff_t>(train_pool);
    std::vector<std::size_t> test(test_begin, test_begin + static_cast<std::ptrdiff_t>(test_n));
    std::sort(train.begin(), train.end());
    std::sort(test.begin(), test.end());
    return { d.take_rows(train), d.take_rows(test) };
}

nlohmann::json meta_to_json(DatasetMeta const& meta)
{
    nlohmann::json bounds = nlohmann::json::array();
    for (auto const& b : meta.bounds) {
        bounds.push_back({ b.lower, b.upper });
    }
    nlohmann::json relevant = nlohmann::json::array();
    for (auto j : meta.relevant) {
        relevant.push_back("x" + std::to_string(j + 1));
    }
    return {
        { "name", meta.name },
        { "expression", meta.expression },
        { "relevant", relevant },
        { "bounds", bounds },
        { "snr", std::isinf(meta.snr) ? nlohmann::json(nullptr) : nlohmann::json(meta.snr) },
        { "sigma_f2", meta.sigma_f2 },
        { "sigma_eps2", meta.sigma_eps2 },
        { "s", meta.s },
        { "seed", meta.seed },
        { "scenario", name_of(meta.scenario) },
    };
}

DatasetMeta meta_from_json(nlohmann::json const& j)
{
    DatasetMeta meta;
    meta.name = j.value("name", "");
    meta.expression = j.value("expression", "");
    for (auto const& r : j.at("relevant")) {
        auto const text = r.get<std::string>();
        if (text.size() < 2 || text[0] != 'x') {
            throw std::invalid_argument("bad relevant feature name: " + text);
        }
        meta.relevant.push_back(static_cast<std::size_t>(std::stoul(text.substr(1))) - 1);
    }
    for (auto const& b : j.at("bounds")) {
        meta.bounds.push_back({ b.at(0).get<double>(), b.at(1).get<double>() });
    }
    meta.snr = j.at("snr").is_null() ? kNoiseless : j.at("snr").get<double>();
    meta.sigma_f2 = j.value("sigma_f2", 0.0);
    meta.sigma_eps2 = j.value("sigma_eps2", 0.0);
    meta.s = j.value("s", std::size_t { 0 });
    meta.seed = j.value("seed", std::uint64_t { 0 });
    meta.scenario = scenario_from_name(j.value("scenario", "standard"));
    return meta;
}

std::filesystem::path sidecar_path(std::filesystem::path const& csv_path)
{
    auto path = csv_path;
    path.replace_extension(".json");
    return path;
}

void write_dataset(std::filesystem::path const& csv_path, Dataset const& d)
{
    if (csv_path.has_parent_path()) {
        std::filesystem::create_directories(csv_path.parent_path());
    }
    std::ofstream out(csv_path);
    if (!out) {
        throw std::runtime_error("cannot write " + csv_path.string());
    }
    for (std::size_t j = 0; j < d.p(); ++j) {
        out << 'x' << j + 1 << ',';
    }
    out << "target\n";
    out.precision(17);
    for (Eigen::Index i = 0; i < d.X.rows(); ++i) {
        for (Eigen::Index j = 0; j < d.X.cols(); ++j) {
            out << d.X(i, j) << ',';
        }
        out << d.y[i] << '\n';
    }
    std::ofstream side(sidecar_path(csv_path));
    side << meta_to_json(d.meta).dump(2) << '\n';
}

Dataset read_dataset(std::filesystem::path const& csv_path)
{
    auto const table = csv::read(csv_path);
    if (table.header.size() < 2) {
        throw std::invalid_argument(csv_path.string() + ": need at least one feature and a target column");
    }
    auto const p = table.header.size() - 1;
    Dataset d;
    d.X.resize(static_cast<Eigen::Index>(table.rows.size()), static_cast<Eigen::Index>(p));
    d.y.resize(static_cast<Eigen::Index>(table.rows.size()));
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
        auto const& r = table.rows[i];
        if (r.size() != p + 1) {
            throw std::invalid_argument(csv_path.string() + ": row " + std::to_string(i + 1) + " has "
                + std::to_string(r.size()) + " fields");
        }
        for (std::size_t j = 0; j < p; ++j) {
            d.X(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = csv::parse_double(r[j]);
        }
        d.y[static_cast<Eigen::Index>(i)] = csv::parse_double(r[p]);
    }
    auto const side = sidecar_path(csv_path);
    if (std::filesystem::exists(side)) {
        std::ifstream in(side);
        d.meta = meta_from_json(nlohmann::json::parse(in));
        if (d.meta.bounds.size() != p) {
            throw std::invalid_argument(side.string() + ": bounds do not match the column count");
        }
    } else {
        d.meta.name = csv_path.stem().string();
        for (Eigen::Index j = 0; j < d.X.cols(); ++j) {
            d.meta.bounds.push_back({ d.X.col(j).minCoeff(), d.X.col(j).maxCoeff() });
        }
    }
    return d;
}

} // namespace pansr::datagen
