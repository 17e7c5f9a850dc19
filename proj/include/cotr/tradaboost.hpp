// Boosting for transfer learning: source instances that the current tree
// misclassifies are down-weighted by a fixed factor while misclassified
// target instances are up-weighted AdaBoost-style, so the ensemble gradually
// concentrates on source rows that still look like the target task.
#pragma once

#include <cstdint>
#include <vector>

#include "cotr/dataset.hpp"
#include "cotr/tree.hpp"

namespace cotr {

// Per-round training record, mainly for tests and tracing.
struct TrAdaBoostRound {
    double raw_error = 0.0;      // weighted target error before clamping
    double error = 0.0;          // clamped error used for beta_t
    double beta_t = 0.0;
    double source_weight = 0.0;  // sums after the update, pre-normalization
    double target_weight = 0.0;
    double min_weight = 0.0;
};

struct TrAdaBoostDiagnostics {
    std::vector<TrAdaBoostRound> rounds;
};

struct TrAdaBoostModel {
    std::vector<TreeModel> trees;  // one per boosting round
    std::vector<double> betas;     // beta_t per round
    double source_beta = 0.0;      // fixed source down-weighting factor
    int depth = 0;

    std::size_t rounds() const { return trees.size(); }

    // Weighted vote of the later half of the rounds, in log space:
    // class 1 iff sum_{t in window} alpha_t h_t(x) >= 1/2 sum alpha_t with
    // alpha_t = -ln beta_t and window t = ceil(N/2)..N (1-based).
    int predict(std::span<const double> x) const;
    std::vector<int> predict_all(const EncodedDataset& data) const;
};

// Trains n_rounds trees of the given depth on source+target. Weights start
// uniform over the union; each round the tree is fit on normalized weights,
// the error is measured on the target portion only and clamped away from
// {0, 1/2} so every round produces a usable beta_t.
TrAdaBoostModel fit_tradaboost(const EncodedDataset& source,
                               const EncodedDataset& target, int n_rounds,
                               int depth,
                               TrAdaBoostDiagnostics* diagnostics = nullptr);

}  // namespace cotr
