#include "cotr/tradaboost.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace cotr {

namespace {

constexpr double kEpsMin = 1e-6;

}  // namespace

int TrAdaBoostModel::predict(std::span<const double> x) const {
    const std::size_t n = trees.size();
    // 1-based window t = ceil(N/2)..N.
    const std::size_t first = (n + 1) / 2 - 1;
    double vote = 0.0;
    double half = 0.0;
    for (std::size_t t = first; t < n; ++t) {
        const double alpha = -std::log(betas[t]);
        if (trees[t].predict(x) == 1) vote += alpha;
        half += alpha;
    }
    return vote >= half / 2.0 ? 1 : 0;
}

std::vector<int> TrAdaBoostModel::predict_all(const EncodedDataset& data) const {
    std::vector<int> out(data.size());
    for (std::size_t i = 0; i < data.size(); ++i) out[i] = predict(data.row(i));
    return out;
}

TrAdaBoostModel fit_tradaboost(const EncodedDataset& source,
                               const EncodedDataset& target, int n_rounds,
                               int depth, TrAdaBoostDiagnostics* diagnostics) {
    if (n_rounds < 1) {
        throw std::invalid_argument("tradaboost: rounds must be >= 1");
    }
    if (source.size() == 0 || target.size() == 0) {
        throw std::invalid_argument("tradaboost: empty source or target set");
    }
    if (source.cols != target.cols) {
        throw std::invalid_argument("tradaboost: source has " +
                                    std::to_string(source.cols) +
                                    " columns, target has " +
                                    std::to_string(target.cols));
    }
    if (!target.has_both_classes()) {
        throw std::invalid_argument("tradaboost: target set is single-class");
    }

    const std::size_t n_source = source.size();
    const std::size_t n_target = target.size();
    const std::size_t n = n_source + n_target;
    const EncodedDataset combined = EncodedDataset::concat(source, target);

    TrAdaBoostModel model;
    model.depth = depth;
    model.source_beta =
        1.0 / (1.0 + std::sqrt(2.0 * std::log(static_cast<double>(n_source)) /
                               static_cast<double>(n_rounds)));
    model.trees.reserve(static_cast<std::size_t>(n_rounds));
    model.betas.reserve(static_cast<std::size_t>(n_rounds));
    if (diagnostics) diagnostics->rounds.clear();

    std::vector<double> weights(n, 1.0);
    std::vector<double> p(n);
    for (int round = 0; round < n_rounds; ++round) {
        double total = 0.0;
        for (double w : weights) total += w;
        for (std::size_t i = 0; i < n; ++i) p[i] = weights[i] / total;

        TreeModel tree = fit_tree(combined, p, depth);
        const std::vector<int> pred = tree.predict_all(combined);

        double target_mass = 0.0;
        double target_wrong = 0.0;
        for (std::size_t i = n_source; i < n; ++i) {
            target_mass += p[i];
            if (pred[i] != combined.labels[i]) target_wrong += p[i];
        }
        const double raw_error = target_wrong / target_mass;
        const double error = std::clamp(raw_error, kEpsMin, 0.5 - kEpsMin);
        const double beta_t = error / (1.0 - error);

        for (std::size_t i = 0; i < n_source; ++i) {
            if (pred[i] != combined.labels[i]) weights[i] *= model.source_beta;
        }
        for (std::size_t i = n_source; i < n; ++i) {
            if (pred[i] != combined.labels[i]) weights[i] /= beta_t;
        }

        if (diagnostics) {
            TrAdaBoostRound rec;
            rec.raw_error = raw_error;
            rec.error = error;
            rec.beta_t = beta_t;
            for (std::size_t i = 0; i < n_source; ++i) {
                rec.source_weight += weights[i];
            }
            for (std::size_t i = n_source; i < n; ++i) {
                rec.target_weight += weights[i];
            }
            rec.min_weight = *std::min_element(weights.begin(), weights.end());
            diagnostics->rounds.push_back(rec);
        }

        // Rescale so repeated beta_t^{-1} up-weighting cannot overflow; the
        // per-round normalization above makes this a no-op observationally.
        double after = 0.0;
        for (double w : weights) after += w;
        for (double& w : weights) w /= after;

        model.trees.push_back(std::move(tree));
        model.betas.push_back(beta_t);
    }
    return model;
}

}  // namespace cotr
