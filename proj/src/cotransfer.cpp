#include "cotr/cotransfer.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "cotr/estimators.hpp"
#include "cotr/rng.hpp"
#include "cotr/update_gate.hpp"

namespace cotr {

namespace {

constexpr std::uint64_t kTagBootSource = 1;
constexpr std::uint64_t kTagBootTarget = 2;
constexpr std::uint64_t kTagPairSubsample = 3;
constexpr std::uint64_t kTagEnsembleSubsample = 4;

int majority3(int a, int b, int c) { return a + b + c >= 2 ? 1 : 0; }

double holdout_error(const CoTransferState& state, std::size_t d,
                     const CoTransferEval* eval) {
    if (!eval || !eval->test[d]) {
        return std::numeric_limits<double>::quiet_NaN();
    }
    const EncodedDataset& test = *eval->test[d];
    std::size_t wrong = 0;
    for (std::size_t i = 0; i < test.size(); ++i) {
        if (state.predict_domain(d, test.row(i)) != test.labels[i]) ++wrong;
    }
    return static_cast<double>(wrong) / static_cast<double>(test.size());
}

void check_product_bound(const GateTrace& g, const char* level) {
    if (!(g.error * static_cast<double>(g.accepted) <
          g.prev_error * static_cast<double>(g.prev_count))) {
        throw std::logic_error(std::string("co-transfer: accepted ") + level +
                               " set violates the e*l bound");
    }
}

}  // namespace

int CoTransferState::predict_domain(std::size_t d,
                                    std::span<const double> x) const {
    return majority3(ensembles[d][0].predict(x), ensembles[d][1].predict(x),
                     ensembles[d][2].predict(x));
}

std::vector<int> CoTransferState::predict_all(const EncodedDataset& data) const {
    std::vector<int> out(data.size());
    for (std::size_t i = 0; i < data.size(); ++i) out[i] = predict(data.row(i));
    return out;
}

double measure_ensemble_error(const std::array<TrAdaBoostModel, 3>& ensemble,
                              const EncodedDataset& labeled) {
    return ensemble_error_from_predictions(
        ensemble[0].predict_all(labeled), ensemble[1].predict_all(labeled),
        ensemble[2].predict_all(labeled), labeled.labels);
}

double measure_pair_error(const TrAdaBoostModel& hj, const TrAdaBoostModel& hk,
                          const EncodedDataset& labeled) {
    return pair_error_from_predictions(hj.predict_all(labeled),
                                       hk.predict_all(labeled), labeled.labels);
}

PseudoLabeledSet pseudo_label_pair(const TrAdaBoostModel& hj,
                                   const TrAdaBoostModel& hk,
                                   const EncodedDataset& pool,
                                   int provenance_tag) {
    return pseudo_label_from_votes(pool, hj.predict_all(pool),
                                   hk.predict_all(pool), provenance_tag);
}

CoTransferState init_ensembles(const DomainPair& data,
                               const CoTransferOptions& options,
                               std::uint64_t seed) {
    for (std::size_t d = 0; d < 2; ++d) {
        if (data.labeled[d].size() == 0 || !data.labeled[d].has_both_classes()) {
            throw std::invalid_argument(
                "co-transfer: labeled set of domain " + std::to_string(d) +
                " must be nonempty with both classes");
        }
        if (data.unlabeled[d].size() > 0 &&
            data.unlabeled[d].cols != data.labeled[d].cols) {
            throw std::invalid_argument("co-transfer: column mismatch in domain " +
                                        std::to_string(d));
        }
    }
    if (data.labeled[0].cols != data.labeled[1].cols) {
        throw std::invalid_argument(
            "co-transfer: domains have different encoded widths");
    }

    CoTransferState state;
    state.data = data;
    state.options = options;
    state.seed = seed;
    for (std::size_t d = 0; d < 2; ++d) {
        for (std::size_t i = 0; i < 3; ++i) {
            const EncodedDataset source = bootstrap_sample(
                data.labeled[(d + 1) % 2], derive_seed(seed, {kTagBootSource, d, i}));
            const EncodedDataset target = bootstrap_sample(
                data.labeled[d], derive_seed(seed, {kTagBootTarget, d, i}));
            state.ensembles[d][i] = fit_tradaboost(source, target, options.rounds,
                                                   options.depth);
        }
    }
    return state;
}

bool cotransfer_round(CoTransferState& state, CoTransferRoundTrace* trace,
                      const CoTransferEval* eval) {
    if (state.iterations >= state.options.max_iterations) {
        throw std::runtime_error("co-transfer: iteration cap (" +
                                 std::to_string(state.options.max_iterations) +
                                 ") hit");
    }
    ++state.iterations;

    CoTransferRoundTrace local;
    CoTransferRoundTrace& rec = trace ? *trace : local;
    rec = CoTransferRoundTrace{};
    rec.round = state.iterations;

    // Decision phase: everything below is measured against the round's
    // incoming classifiers; refits happen only after both domains decided.
    std::array<std::array<PseudoLabeledSet, 3>, 2> pair_sets;   // L_i^d
    std::array<std::array<bool, 3>, 2> pair_update{};           // Update_i^d
    std::array<PseudoLabeledSet, 2> screened;                   // L^d
    std::array<bool, 2> ensemble_update{};                      // Update^d

    for (std::size_t d = 0; d < 2; ++d) {
        const EncodedDataset& labeled = state.data.labeled[d];
        const EncodedDataset& pool = state.data.unlabeled[d];
        std::array<std::vector<int>, 3> on_labeled;
        std::array<std::vector<int>, 3> on_pool;
        for (std::size_t i = 0; i < 3; ++i) {
            on_labeled[i] = state.ensembles[d][i].predict_all(labeled);
            on_pool[i] = state.ensembles[d][i].predict_all(pool);
        }

        const double ens_err = ensemble_error_from_predictions(
            on_labeled[0], on_labeled[1], on_labeled[2], labeled.labels);

        for (std::size_t i = 0; i < 3; ++i) {
            const std::size_t j = (i + 1) % 3;
            const std::size_t k = (i + 2) % 3;
            GateTrace& g = rec.pair[d][i];
            g.error = pair_error_from_predictions(on_labeled[j], on_labeled[k],
                                                  labeled.labels);
            g.prev_error = state.prev_error[d][i];
            g.prev_count = state.prev_count[d][i];
            if (!(g.error < g.prev_error)) continue;
            g.considered = true;

            pair_sets[d][i] = pseudo_label_from_votes(pool, on_pool[j], on_pool[k],
                                                      static_cast<int>(i));
            g.candidate = pair_sets[d][i].size();
            const GateDecision gate =
                evaluate_update_gate(g.error, g.prev_error,
                                     state.prev_count[d][i], g.candidate);
            g.unblocked = gate.unblocked;
            g.prev_count = gate.lprime_after;
            state.prev_count[d][i] = gate.lprime_after;
            if (!gate.accept) continue;
            if (gate.subsampled) {
                pair_sets[d][i] = subsample(
                    pair_sets[d][i], gate.keep,
                    derive_seed(state.seed,
                                {kTagPairSubsample, state.iterations, d, i}));
                g.subsampled = true;
            }
            g.accept = true;
            g.accepted = pair_sets[d][i].size();
            check_product_bound(g, "classifier");
            pair_update[d][i] = true;
        }

        GateTrace& ge = rec.ensemble[d];
        ge.error = ens_err;
        ge.prev_error = state.ens_prev_error[d];
        ge.prev_count = state.ens_prev_count[d];
        if (ens_err < state.ens_prev_error[d]) {
            ge.considered = true;
            screened[d] = screen_pseudo_label(on_pool[0], on_pool[1], on_pool[2],
                                              pair_sets[d][0], pair_sets[d][1],
                                              pair_sets[d][2]);
            ge.candidate = screened[d].size();
            const GateDecision gate =
                evaluate_update_gate(ens_err, state.ens_prev_error[d],
                                     state.ens_prev_count[d], ge.candidate);
            ge.unblocked = gate.unblocked;
            ge.prev_count = gate.lprime_after;
            state.ens_prev_count[d] = gate.lprime_after;
            if (gate.accept) {
                if (gate.subsampled) {
                    screened[d] = subsample(
                        screened[d], gate.keep,
                        derive_seed(state.seed,
                                    {kTagEnsembleSubsample, state.iterations, d}));
                    ge.subsampled = true;
                }
                ge.accept = true;
                ge.accepted = screened[d].size();
                check_product_bound(ge, "ensemble");
                ensemble_update[d] = true;
            }
        }
    }

    // Update phase: classifier i of direction d is refit only when its own
    // pseudo-labels and the opposite direction's screened set were both
    // accepted; the screened rows extend its source side.
    bool changed = false;
    for (std::size_t d = 0; d < 2; ++d) {
        const std::size_t o = (d + 1) % 2;
        for (std::size_t i = 0; i < 3; ++i) {
            if (!(pair_update[d][i] && ensemble_update[o])) continue;
            const EncodedDataset new_source =
                augment(state.data.labeled[o], screened[o]);
            const EncodedDataset new_target =
                augment(state.data.labeled[d], pair_sets[d][i]);
            state.ensembles[d][i] =
                fit_tradaboost(new_source, new_target, state.options.rounds,
                               state.options.depth);
            state.prev_error[d][i] = rec.pair[d][i].error;
            state.prev_count[d][i] = pair_sets[d][i].size();
            rec.refit[d][i] = true;
            changed = true;
        }
        if (ensemble_update[d]) {
            state.ens_prev_error[d] = rec.ensemble[d].error;
            state.ens_prev_count[d] = screened[d].size();
        }
    }
    rec.changed = changed;
    for (std::size_t d = 0; d < 2; ++d) {
        rec.holdout_error[d] = holdout_error(state, d, eval);
    }
    return changed;
}

CoTransferRun fit_cotransfer(const DomainPair& data,
                             const CoTransferOptions& options,
                             std::uint64_t seed, const CoTransferEval* eval) {
    CoTransferRun run;
    run.state = init_ensembles(data, options, seed);
    for (std::size_t d = 0; d < 2; ++d) {
        run.initial_holdout_error[d] = holdout_error(run.state, d, eval);
    }
    for (;;) {
        CoTransferRoundTrace trace;
        const bool changed = cotransfer_round(run.state, &trace, eval);
        run.trace.push_back(trace);
        if (!changed) break;
    }
    return run;
}

}  // namespace cotr
