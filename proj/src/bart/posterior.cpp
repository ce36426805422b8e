#include "pansr/bart/posterior.hpp"

#include <algorithm>
#include <stdexcept>

namespace pansr::bart {

BartPosterior::BartPosterior(std::size_t num_features, ResponseScale scale, std::vector<BartDraw> draws,
    Eigen::VectorXd train_predictions, std::optional<Eigen::VectorXd> test_predictions)
    : num_features_(num_features)
    , scale_(scale)
    , draws_(std::move(draws))
    , train_predictions_(std::move(train_predictions))
    , test_predictions_(std::move(test_predictions))
{
    for (auto const& d : draws_) {
        if (d.split_counts.size() != num_features_) {
            throw std::invalid_argument("posterior: split-count vector length differs from feature count");
        }
        std::uint64_t total = 0;
        for (auto c : d.split_counts) {
            total += c;
        }
        if (total != d.total_splits) {
            throw std::invalid_argument("posterior: split counts do not sum to the draw total");
        }
    }
}

bool BartPosterior::has_trees() const noexcept
{
    return !draws_.empty() && std::all_of(draws_.begin(), draws_.end(), [](auto const& d) { return !d.trees.empty(); });
}

std::vector<double> BartPosterior::sigma2_draws() const
{
    std::vector<double> out;
    out.reserve(draws_.size());
    for (auto const& d : draws_) {
        out.push_back(d.sigma2);
    }
    return out;
}

} // namespace pansr::bart
