#include "pansr/bart/bart.hpp"

#include "pansr/bart/sampler.hpp"

#include <stdexcept>

namespace pansr::bart {

namespace {
    void check_inputs(Eigen::Ref<Eigen::MatrixXd const> const& X, Eigen::Ref<Eigen::VectorXd const> const& y)
    {
        if (X.rows() < 10) {
            throw std::invalid_argument("fit_bart: need n >= 10 rows");
        }
        if (X.cols() < 1) {
            throw std::invalid_argument("fit_bart: need p >= 1 features");
        }
        if (X.rows() != y.size()) {
            throw std::invalid_argument("fit_bart: X has " + std::to_string(X.rows()) + " rows but y has " + std::to_string(y.size()));
        }
        if (!X.allFinite() || !y.allFinite()) {
            throw std::invalid_argument("fit_bart: non-finite entries in X or y");
        }
        if (y.maxCoeff() == y.minCoeff()) {
            throw std::invalid_argument("fit_bart: response has zero variance");
        }
    }

    // Ensemble sum for one draw, trees summed in order.
    void accumulate_draw(std::vector<RegressionTree> const& trees, Eigen::Ref<Eigen::MatrixXd const> const& X, Eigen::VectorXd& acc)
    {
        for (Eigen::Index i = 0; i < X.rows(); ++i) {
            double s = 0.0;
            for (auto const& tree : trees) {
                s += tree.predict(X, i);
            }
            acc[i] += s;
        }
    }

    Eigen::VectorXd finish_mean(Eigen::VectorXd const& acc, std::size_t draws, ResponseScale const& scale)
    {
        auto const d = static_cast<double>(draws);
        return acc.unaryExpr([&](double s) { return scale.to_original(s / d); });
    }
} // namespace

BartPosterior fit_bart(Eigen::Ref<Eigen::MatrixXd const> const& X, Eigen::Ref<Eigen::VectorXd const> const& y,
    BartConfig const& cfg, std::optional<Eigen::MatrixXd> const& X_test)
{
    cfg.validate();
    check_inputs(X, y);
    if (X_test && X_test->cols() != X.cols()) {
        throw std::invalid_argument("fit_bart: test design has a different column count");
    }

    BartSampler sampler(X, y, cfg);
    for (std::size_t i = 0; i < cfg.burn_in; ++i) {
        sampler.step();
    }

    std::vector<BartDraw> draws;
    draws.reserve(cfg.posterior_draws);
    Eigen::VectorXd train_acc = Eigen::VectorXd::Zero(X.rows());
    Eigen::VectorXd test_acc = X_test ? Eigen::VectorXd::Zero(X_test->rows()) : Eigen::VectorXd();
    for (std::size_t i = 0; i < cfg.posterior_draws; ++i) {
        sampler.step();
        train_acc += sampler.ensemble_fit();
        if (X_test) {
            accumulate_draw(sampler.trees(), *X_test, test_acc);
        }
        draws.push_back(sampler.snapshot(cfg.keep_trees));
    }

    auto const& scale = sampler.scale();
    std::optional<Eigen::VectorXd> test_pred;
    if (X_test) {
        test_pred = finish_mean(test_acc, cfg.posterior_draws, scale);
    }
    return BartPosterior(static_cast<std::size_t>(X.cols()), scale, std::move(draws),
        finish_mean(train_acc, cfg.posterior_draws, scale), std::move(test_pred));
}

Eigen::VectorXd predict(BartPosterior const& posterior, Eigen::Ref<Eigen::MatrixXd const> const& X_new)
{
    if (static_cast<std::size_t>(X_new.cols()) != posterior.num_features()) {
        throw std::invalid_argument("predict: expected " + std::to_string(posterior.num_features()) + " columns, got " + std::to_string(X_new.cols()));
    }
    if (!posterior.has_trees()) {
        throw std::logic_error("predict: posterior was fitted without keeping trees");
    }
    Eigen::VectorXd acc = Eigen::VectorXd::Zero(X_new.rows());
    for (auto const& draw : posterior.draws()) {
        accumulate_draw(draw.trees, X_new, acc);
    }
    return finish_mean(acc, posterior.draws().size(), posterior.scale());
}

std::vector<double> vip(BartPosterior const& posterior)
{
    auto const p = posterior.num_features();
    std::vector<double> q(p, 0.0);
    auto const& draws = posterior.draws();
    if (draws.empty()) {
        return q;
    }
    for (auto const& d : draws) {
        if (d.total_splits == 0) {
            continue;
        }
        auto const total = static_cast<double>(d.total_splits);
        for (std::size_t j = 0; j < p; ++j) {
            q[j] += static_cast<double>(d.split_counts[j]) / total;
        }
    }
    auto const count = static_cast<double>(draws.size());
    for (auto& v : q) {
        v /= count;
    }
    return q;
}

nlohmann::json posterior_to_json(BartPosterior const& posterior)
{
    nlohmann::json sigma2 = nlohmann::json::array();
    nlohmann::json counts = nlohmann::json::array();
    for (auto const& d : posterior.draws()) {
        sigma2.push_back(d.sigma2);
        counts.push_back(d.split_counts);
    }
    return {
        { "num_features", posterior.num_features() },
        { "num_draws", posterior.draws().size() },
        { "response_min", posterior.scale().min },
        { "response_range", posterior.scale().range },
        { "sigma2", std::move(sigma2) },
        { "split_counts", std::move(counts) },
    };
}

} // namespace pansr::bart
