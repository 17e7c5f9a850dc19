// Co-Transfer: two three-member boosted ensembles, one per transfer
// direction, that pseudo-label each domain's unlabeled pool for each other
// every round. Newly labeled rows are adopted only under the shrinking e·l
// bound, screened rows flow into the opposite direction's source side, and
// the target-direction ensemble's majority vote is the final hypothesis.
#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "cotr/dataset.hpp"
#include "cotr/pseudo.hpp"
#include "cotr/tradaboost.hpp"

namespace cotr {

struct CoTransferOptions {
    int rounds = 10;                 // boosting rounds per ensemble member
    int depth = 10;                  // base tree depth
    std::size_t max_iterations = 50; // safety cap on repeat bodies
};

// One acceptance-gate evaluation, kept for tracing and property checks.
struct GateTrace {
    bool considered = false;     // error improved, gate was evaluated
    bool accept = false;
    bool subsampled = false;
    bool unblocked = false;
    double error = 0.0;          // e measured this round
    double prev_error = 0.5;     // e' the gate compared against
    std::size_t prev_count = 0;  // l' the gate used (after unblocking)
    std::size_t candidate = 0;   // freshly labeled rows before subsampling
    std::size_t accepted = 0;    // rows adopted (0 unless accept)
};

struct CoTransferRoundTrace {
    std::size_t round = 0;  // 1-based
    std::array<std::array<GateTrace, 3>, 2> pair;  // [domain][classifier]
    std::array<GateTrace, 2> ensemble;             // [domain]
    std::array<std::array<bool, 3>, 2> refit{};    // classifier retrained
    bool changed = false;
    std::array<double, 2> holdout_error{};  // per-direction majority vote; NaN without eval
};

struct CoTransferState {
    std::array<std::array<TrAdaBoostModel, 3>, 2> ensembles;  // [domain][member]
    std::array<std::array<double, 3>, 2> prev_error{
        {{0.5, 0.5, 0.5}, {0.5, 0.5, 0.5}}};                  // e'_i^d
    std::array<std::array<std::size_t, 3>, 2> prev_count{};   // l'_i^d
    std::array<double, 2> ens_prev_error{0.5, 0.5};           // e'^d
    std::array<std::size_t, 2> ens_prev_count{};              // l'^d
    DomainPair data;  // labeled sets and the never-mutated unlabeled pools
    CoTransferOptions options;
    std::uint64_t seed = 0;
    std::size_t iterations = 0;

    // Majority vote of ensemble d's three members.
    int predict_domain(std::size_t d, std::span<const double> x) const;
    // Final hypothesis: the target-direction ensemble (d = 1).
    int predict(std::span<const double> x) const { return predict_domain(1, x); }
    std::vector<int> predict_all(const EncodedDataset& data) const;
};

// Optional held-out sets evaluated after every round (index = domain).
struct CoTransferEval {
    std::array<const EncodedDataset*, 2> test{nullptr, nullptr};
};

struct CoTransferRun {
    CoTransferState state;
    std::array<double, 2> initial_holdout_error{};  // before the first round
    std::vector<CoTransferRoundTrace> trace;
};

double measure_ensemble_error(const std::array<TrAdaBoostModel, 3>& ensemble,
                              const EncodedDataset& labeled);
double measure_pair_error(const TrAdaBoostModel& hj, const TrAdaBoostModel& hk,
                          const EncodedDataset& labeled);
PseudoLabeledSet pseudo_label_pair(const TrAdaBoostModel& hj,
                                   const TrAdaBoostModel& hk,
                                   const EncodedDataset& pool,
                                   int provenance_tag);

// Bootstraps the 2x3 members: member i of direction d boosts from the other
// domain's labeled set into domain d's. Bookkeeping starts at e' = 0.5, l' = 0.
CoTransferState init_ensembles(const DomainPair& data,
                               const CoTransferOptions& options,
                               std::uint64_t seed);

// One repeat-body execution; returns whether any classifier was refit.
bool cotransfer_round(CoTransferState& state,
                      CoTransferRoundTrace* trace = nullptr,
                      const CoTransferEval* eval = nullptr);

// init_ensembles + rounds until nothing changes (the closing unchanged round
// is counted in state.iterations).
CoTransferRun fit_cotransfer(const DomainPair& data,
                             const CoTransferOptions& options,
                             std::uint64_t seed,
                             const CoTransferEval* eval = nullptr);

}  // namespace cotr
