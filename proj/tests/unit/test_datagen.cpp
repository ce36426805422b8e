#include "pansr/datagen/catalog.hpp"
#include "pansr/datagen/dataset.hpp"
#include "pansr/expr/evaluate.hpp"
#include "pansr/expr/simplify.hpp"

#include "support/friedman.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <set>

using namespace pansr::datagen;
using pansr::expr::Bounds;
using pansr::expr::EquationSpec;

namespace {
DatasetSpec spec_for(std::string const& name, std::size_t n, double snr, std::size_t s, std::uint64_t seed)
{
    return DatasetSpec { builtin_equation(name), n, snr, s, seed };
}

double corr(Eigen::VectorXd const& a, Eigen::VectorXd const& b)
{
    auto const ca = (a.array() - a.mean()).matrix();
    auto const cb = (b.array() - b.mean()).matrix();
    return ca.dot(cb) / std::sqrt(ca.squaredNorm() * cb.squaredNorm());
}
} // namespace

TEST_CASE("catalog equations validate and are known by name")
{
    CHECK(builtin_equations().size() >= 10);
    CHECK(builtin_equation("feynman_I_38_12").p0() == 4);
    CHECK(builtin_equation("friedman").p0() == 5);
    CHECK_THROWS_AS(builtin_equation("nope"), std::out_of_range);
    for (auto const& eq : builtin_equations()) {
        CHECK_NOTHROW(eq.validate());
    }
}

TEST_CASE("noiseless generation reproduces f0 exactly")
{
    auto const d = generate(spec_for("feynman_I_38_12", 300, kNoiseless, 2, 5));
    CHECK(d.meta.sigma_eps2 == 0.0);
    auto const f0 = d.ground_truth();
    auto const f = pansr::expr::evaluate_rows(f0, d.X);
    CHECK((f == d.y.array()).all());
    // the ground truth touches only the first p0 columns
    auto const used = pansr::expr::variables_used(f0);
    CHECK(used == std::set<std::size_t> { 0, 1, 2, 3 });
    for (std::size_t j = 0; j < d.p(); ++j) {
        auto const col = d.X.col(static_cast<Eigen::Index>(j));
        CHECK(col.minCoeff() >= d.meta.bounds[j].lower);
        CHECK(col.maxCoeff() <= d.meta.bounds[j].upper);
    }
}

TEST_CASE("p = p0 (1 + s) with the documented column order")
{
    auto const d = generate(spec_for("feynman_I_38_12", 20, kNoiseless, 50, 1));
    CHECK(d.p() == 204);
    CHECK(d.meta.relevant == std::vector<std::size_t> { 0, 1, 2, 3 });

    // Distinct bounds per relevant feature reveal which block each copy belongs to.
    EquationSpec eq;
    eq.name = "blocks";
    eq.expression = "a + b";
    eq.variable_names = { "a", "b" };
    eq.bounds = { Bounds { 0.0, 1.0 }, Bounds { 10.0, 11.0 } };
    auto const blocks = generate(DatasetSpec { eq, 200, kNoiseless, 3, 9 });
    REQUIRE(blocks.p() == 8);
    for (Eigen::Index c : { 0, 2, 3, 4 }) {
        CHECK(blocks.X.col(c).maxCoeff() <= 1.0);
    }
    for (Eigen::Index c : { 1, 5, 6, 7 }) {
        CHECK(blocks.X.col(c).minCoeff() >= 10.0);
    }
}

TEST_CASE("noise calibration at n = 10^4")
{
    auto const d = generate(spec_for("feynman_I_12_4", 10000, 10.0, 1, 44));
    Eigen::VectorXd const f = pansr::expr::evaluate_rows(d.ground_truth(), d.X).matrix();
    Eigen::VectorXd const eps = d.y - f;
    double const ratio = pansr::testing::sample_variance(eps) / d.meta.sigma_f2;
    CHECK(ratio >= 0.08);
    CHECK(ratio <= 0.12);
    double const snr_hat = d.meta.sigma_f2 / pansr::testing::sample_variance(eps);
    CHECK(std::abs(snr_hat - 10.0) / 10.0 <= 0.1);
    CHECK(d.meta.sigma_eps2 == doctest::Approx(d.meta.sigma_f2 / 10.0));
    CHECK(d.meta.sigma_f2 == doctest::Approx(pansr::testing::sample_variance(f)).epsilon(1e-12));
}

TEST_CASE("irrelevant columns are uncorrelated with the response")
{
    auto const d = generate(spec_for("poly_sum_product", 10000, 5.0, 4, 12));
    double worst = 0.0;
    for (Eigen::Index c = 3; c < d.X.cols(); ++c) {
        worst = std::max(worst, std::abs(corr(d.X.col(c), d.y)));
    }
    CHECK(worst <= 0.1);
}

TEST_CASE("generation errors")
{
    CHECK_THROWS_AS(generate(spec_for("friedman", 10, 0.0, 0, 1)), std::invalid_argument);
    CHECK_THROWS_AS(generate(spec_for("friedman", 10, -1.0, 0, 1)), std::invalid_argument);
    CHECK_THROWS_AS(generate(spec_for("friedman", 0, 1.0, 0, 1)), std::invalid_argument);
    EquationSpec never;
    never.name = "never";
    never.expression = "log(x1)";
    never.variable_names = { "x1" };
    never.bounds = { Bounds { -2.0, -1.0 } };
    CHECK_THROWS_AS(generate(DatasetSpec { never, 5, kNoiseless, 0, 1 }), std::invalid_argument);
}

TEST_CASE("rows where f0 is undefined are redrawn")
{
    EquationSpec eq;
    eq.name = "half";
    eq.expression = "sqrt(x1)";
    eq.variable_names = { "x1" };
    eq.bounds = { Bounds { -1.0, 1.0 } };
    auto const d = generate(DatasetSpec { eq, 500, kNoiseless, 0, 3 });
    CHECK(d.X.col(0).minCoeff() >= 0.0);
    CHECK(d.y.allFinite());
}

TEST_CASE("seed determinism")
{
    auto const a = generate(spec_for("friedman", 100, 2.0, 3, 77));
    auto const b = generate(spec_for("friedman", 100, 2.0, 3, 77));
    CHECK((a.X.array() == b.X.array()).all());
    CHECK((a.y.array() == b.y.array()).all());
    auto const c = generate(spec_for("friedman", 100, 2.0, 3, 78));
    CHECK((a.X.array() != c.X.array()).any());
    auto const fa = friedman_scenario(Scenario::CorrelatedX, 50, 10, 10.0, 4);
    auto const fb = friedman_scenario(Scenario::CorrelatedX, 50, 10, 10.0, 4);
    CHECK((fa.X.array() == fb.X.array()).all());
    CHECK((fa.y.array() == fb.y.array()).all());
}

TEST_CASE("friedman scenarios")
{
    SUBCASE("baseline is the Friedman function on uniform predictors")
    {
        auto const d = friedman_scenario(Scenario::Standard, 200, 12, kNoiseless, 2);
        CHECK(d.p() == 12);
        CHECK(d.X.minCoeff() >= 0.0);
        CHECK(d.X.maxCoeff() <= 1.0);
        for (Eigen::Index i = 0; i < 200; ++i) {
            CHECK(d.y[i] == doctest::Approx(pansr::testing::friedman(d.X(i, 0), d.X(i, 1), d.X(i, 2), d.X(i, 3), d.X(i, 4))).epsilon(1e-13));
        }
    }
    SUBCASE("duplicatedX column 6 equals column 1 + column 2")
    {
        auto const d = friedman_scenario(Scenario::DuplicatedX, 300, 100, 10.0, 2);
        CHECK(d.p() == 100);
        CHECK((d.X.col(5).array() == (d.X.col(0) + d.X.col(1)).array()).all());
        CHECK(d.meta.relevant.size() == 5);
        CHECK_THROWS_AS(friedman_scenario(Scenario::DuplicatedX, 10, 5, 1.0, 1), std::invalid_argument);
    }
    SUBCASE("correlatedX has uniform marginals and lag-one correlation near 0.9")
    {
        auto const d = friedman_scenario(Scenario::CorrelatedX, 10000, 8, 10.0, 6);
        double const r12 = corr(d.X.col(0), d.X.col(1));
        CHECK(r12 == doctest::Approx(0.9).epsilon(0.05 / 0.9));
        CHECK(d.X.col(3).mean() == doctest::Approx(0.5).epsilon(0.02));
        CHECK(pansr::testing::sample_variance(d.X.col(3)) == doctest::Approx(1.0 / 12.0).epsilon(0.05));
        CHECK(std::abs(corr(d.X.col(0), d.X.col(7))) < 0.6);
    }
    SUBCASE("noisyX perturbs predictors by a fifth of their variance, not the signal")
    {
        auto const noisy = friedman_scenario(Scenario::NoisyX, 10000, 6, kNoiseless, 8);
        double const var = pansr::testing::sample_variance(noisy.X.col(5));
        CHECK(var == doctest::Approx(1.0 / 12.0 + 1.0 / 60.0).epsilon(0.05));
        // y is computed from the unperturbed predictors
        Eigen::VectorXd f(noisy.X.rows());
        for (Eigen::Index i = 0; i < f.size(); ++i) {
            f[i] = pansr::testing::friedman(noisy.X(i, 0), noisy.X(i, 1), noisy.X(i, 2), noisy.X(i, 3), noisy.X(i, 4));
        }
        CHECK((f - noisy.y).cwiseAbs().maxCoeff() > 0.1);
    }
    CHECK_THROWS_AS(friedman_scenario(Scenario::Standard, 10, 4, 1.0, 1), std::invalid_argument);
}

TEST_CASE("train_test_split")
{
    auto const big = generate(spec_for("feynman_I_12_1", 100000, kNoiseless, 0, 1));
    auto const [train, test] = train_test_split(big, 1000, 5);
    CHECK(train.rows() == 1000);
    CHECK(test.rows() == 333);

    // identify rows by their first coordinate (continuous draws are distinct)
    std::set<double> seen;
    for (Eigen::Index i = 0; i < train.X.rows(); ++i) {
        seen.insert(train.X(i, 0));
    }
    for (Eigen::Index i = 0; i < test.X.rows(); ++i) {
        CHECK(seen.count(test.X(i, 0)) == 0);
    }

    auto const again = train_test_split(big, 1000, 5);
    CHECK((again.first.X.array() == train.X.array()).all());
    CHECK((again.second.y.array() == test.y.array()).all());

    auto const small = generate(spec_for("feynman_I_12_1", 100, kNoiseless, 0, 2));
    auto const [all_train, quarter] = train_test_split(small, 75, 1);
    CHECK(all_train.rows() == 75);
    CHECK(quarter.rows() == 25);
    CHECK_THROWS_AS(train_test_split(small, 76, 1), std::invalid_argument);
}

TEST_CASE("dataset files round-trip")
{
    auto const dir = std::filesystem::temp_directory_path() / "pansr_test_datagen";
    std::filesystem::remove_all(dir);
    auto const d = generate(spec_for("feynman_I_38_12", 40, 2.0, 1, 3));
    auto const path = dir / "sub" / "data.csv";
    write_dataset(path, d);
    CHECK(std::filesystem::exists(dir / "sub" / "data.json"));
    auto const back = read_dataset(path);
    CHECK((back.X.array() == d.X.array()).all());
    CHECK((back.y.array() == d.y.array()).all());
    CHECK(back.meta.expression == d.meta.expression);
    CHECK(back.meta.relevant == d.meta.relevant);
    CHECK(back.meta.sigma_f2 == d.meta.sigma_f2);
    CHECK(back.meta.snr == 2.0);
    CHECK(back.meta.bounds.size() == d.p());

    auto noiseless = d;
    noiseless.meta.snr = kNoiseless;
    write_dataset(path, noiseless);
    CHECK(std::isinf(read_dataset(path).meta.snr));

    std::filesystem::remove(dir / "sub" / "data.json");
    auto const bare = read_dataset(path);
    CHECK(bare.meta.relevant.empty());
    CHECK(bare.meta.bounds.size() == d.p());
    std::filesystem::remove_all(dir);
}
