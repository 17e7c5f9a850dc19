// Tri-training baseline: three bootstrap-initialized trees pseudo-label the
// unlabeled pool for each other under the shrinking e·l acceptance bound, and
// predict by majority vote.
#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "cotr/dataset.hpp"
#include "cotr/tree.hpp"

namespace cotr {

struct TriModel {
    std::array<TreeModel, 3> trees;
    std::array<double, 3> prev_error{0.5, 0.5, 0.5};        // e'_i
    std::array<std::size_t, 3> prev_count{0, 0, 0};         // l'_i
    std::size_t iterations = 0;  // repeat-body executions, final no-change round included

    int predict(std::span<const double> x) const;
    std::vector<int> predict_all(const EncodedDataset& data) const;
};

// One repeat-body record.
struct TriIterationTrace {
    std::array<double, 3> pair_error{};      // e_i measured on L
    std::array<std::size_t, 3> accepted{};   // |L_i| adopted this round
    std::array<bool, 3> updated{};
    double holdout_error = 0.0;  // NaN when no eval set was given
};

struct TriRun {
    TriModel model;
    double initial_holdout_error = 0.0;  // NaN when no eval set was given
    std::vector<TriIterationTrace> trace;
};

// Trains on labeled set L and unlabeled pool U (labels of U are ignored and
// stay untouched). When eval is given, the majority vote's error on *eval is
// recorded before the first round and after every round.
TriRun fit_tritraining(const EncodedDataset& labeled,
                       const EncodedDataset& unlabeled, std::uint64_t seed,
                       const EncodedDataset* eval = nullptr);

}  // namespace cotr
