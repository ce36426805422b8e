#include "pansr/metrics/metrics.hpp"

#include "pansr/core/random.hpp"
#include "pansr/expr/evaluate.hpp"
#include "pansr/expr/simplify.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

namespace pansr::metrics {

namespace {

// Degeneracy threshold for "f-hat is constant", |f0| ~ 0 and b ~ 0. It does
// not follow tol, so tightening tol can only make the constancy test stricter.
constexpr double kDegenerate = 1e-6;

double median(std::vector<double> v)
{
    auto const mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
    std::nth_element(v.begin(), mid, v.end());
    double m = *mid;
    if (v.size() % 2 == 0) {
        m = 0.5 * (m + *std::max_element(v.begin(), mid));
    }
    return m;
}

// Range of v relative to 1 + |median(v)|.
double relative_range(std::vector<double> const& v, double med)
{
    auto const [lo, hi] = std::minmax_element(v.begin(), v.end());
    return (*hi - *lo) / (1.0 + std::abs(med));
}

double rate(std::size_t num, std::size_t den, double empty)
{
    return den == 0 ? empty : static_cast<double>(num) / static_cast<double>(den);
}

} // namespace

double r_squared(Eigen::Ref<Eigen::VectorXd const> const& y, Eigen::Ref<Eigen::VectorXd const> const& yhat)
{
    if (y.size() != yhat.size()) {
        throw std::invalid_argument("r_squared: length mismatch");
    }
    if (y.size() < 2) {
        throw std::invalid_argument("r_squared: need at least two points");
    }
    double const sst = (y.array() - y.mean()).square().sum();
    if (!(sst > 0.0)) {
        throw std::invalid_argument("r_squared: y has zero variance");
    }
    return 1.0 - (y - yhat).squaredNorm() / sst;
}

std::string_view name_of(SolutionMode mode) noexcept
{
    switch (mode) {
    case SolutionMode::Difference:
        return "difference";
    case SolutionMode::Ratio:
        return "ratio";
    case SolutionMode::None:
        break;
    }
    return "none";
}

SolutionVerdict is_solution(expr::Expression const& fhat, expr::Expression const& f0,
    std::span<expr::Bounds const> bounds, SolutionOptions const& options)
{
    if (fhat.arity() > bounds.size() || f0.arity() > bounds.size()) {
        throw std::invalid_argument("is_solution: expression reads a variable without bounds");
    }
    Rng rng(options.seed);
    std::vector<double> row(bounds.size());
    std::vector<double> fh;
    std::vector<double> ft;
    fh.reserve(options.samples);
    ft.reserve(options.samples);
    for (std::size_t s = 0; s < options.samples; ++s) {
        for (std::size_t j = 0; j < bounds.size(); ++j) {
            row[j] = std::uniform_real_distribution<double>(bounds[j].lower, bounds[j].upper)(rng);
        }
        auto const a = expr::evaluate(fhat, row);
        auto const b = expr::evaluate(f0, row);
        if (a && b) {
            fh.push_back(*a);
            ft.push_back(*b);
        }
    }
    if (fh.empty()) {
        throw std::domain_error("is_solution: no sample point where both expressions are defined");
    }

    SolutionVerdict verdict;
    verdict.non_constant_model = relative_range(fh, median(fh)) > kDegenerate;
    if (!verdict.non_constant_model) {
        return verdict;
    }

    auto const structural = expr::simplify(expr::Expression::binary(expr::BinaryOp::Sub, fhat, f0));
    if (structural.is_constant()) {
        verdict.is_solution = true;
        verdict.mode = SolutionMode::Difference;
        verdict.constant = structural.value();
        return verdict;
    }

    std::vector<double> diff(fh.size());
    for (std::size_t i = 0; i < fh.size(); ++i) {
        diff[i] = fh[i] - ft[i];
    }
    double const a = median(diff);
    double const diff_range = relative_range(diff, a);
    if (diff_range <= options.tol) {
        verdict.is_solution = true;
        verdict.mode = SolutionMode::Difference;
        verdict.constant = a;
        verdict.residual = diff_range;
        return verdict;
    }

    std::vector<double> ratio;
    for (std::size_t i = 0; i < fh.size(); ++i) {
        if (std::abs(ft[i]) > kDegenerate) {
            ratio.push_back(fh[i] / ft[i]);
        }
    }
    verdict.residual = diff_range;
    if (ratio.empty()) {
        return verdict;
    }
    double const b = median(ratio);
    double const ratio_range = relative_range(ratio, b);
    verdict.residual = std::min(diff_range, ratio_range);
    if (ratio_range <= options.tol && std::abs(b) > kDegenerate) {
        verdict.is_solution = true;
        verdict.mode = SolutionMode::Ratio;
        verdict.constant = b;
        verdict.residual = ratio_range;
    }
    return verdict;
}

UsageReport usage_of_set(std::set<std::size_t> const& used, std::set<std::size_t> const& s0, std::size_t p)
{
    for (auto const* set : { &used, &s0 }) {
        if (!set->empty() && *set->rbegin() >= p) {
            throw std::out_of_range("feature index " + std::to_string(*set->rbegin()) + " >= p = " + std::to_string(p));
        }
    }
    UsageReport r;
    for (auto j : used) {
        (s0.count(j) != 0 ? r.tp : r.fp) += 1;
    }
    r.fn = s0.size() - r.tp;
    r.tn = p - s0.size() - r.fp;
    r.tpr = rate(r.tp, s0.size(), 1.0);
    r.fnr = rate(r.fn, s0.size(), 0.0);
    r.fpr = rate(r.fp, p - s0.size(), 0.0);
    return r;
}

UsageReport feature_usage(expr::Expression const& fhat, std::set<std::size_t> const& s0, std::size_t p)
{
    return usage_of_set(expr::variables_used(fhat), s0, p);
}

nlohmann::json to_json(SolutionVerdict const& v)
{
    return {
        { "is_solution", v.is_solution },
        { "mode", name_of(v.mode) },
        { "constant", v.constant },
        { "residual", v.residual },
        { "non_constant_model", v.non_constant_model },
    };
}

nlohmann::json to_json(UsageReport const& u)
{
    return {
        { "tp", u.tp },
        { "fp", u.fp },
        { "fn", u.fn },
        { "tn", u.tn },
        { "tpr", u.tpr },
        { "fpr", u.fpr },
        { "fnr", u.fnr },
    };
}

} // namespace pansr::metrics
