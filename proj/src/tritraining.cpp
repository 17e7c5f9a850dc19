#include "cotr/tritraining.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "cotr/estimators.hpp"
#include "cotr/pseudo.hpp"
#include "cotr/rng.hpp"
#include "cotr/update_gate.hpp"

namespace cotr {

namespace {

constexpr std::size_t kIterationCap = 50;
constexpr std::uint64_t kTagBootstrap = 1;
constexpr std::uint64_t kTagSubsample = 2;

int majority3(int a, int b, int c) { return a + b + c >= 2 ? 1 : 0; }

double holdout_error(const TriModel& m, const EncodedDataset* eval) {
    if (!eval) return std::numeric_limits<double>::quiet_NaN();
    std::size_t wrong = 0;
    for (std::size_t i = 0; i < eval->size(); ++i) {
        if (m.predict(eval->row(i)) != eval->labels[i]) ++wrong;
    }
    return static_cast<double>(wrong) / static_cast<double>(eval->size());
}

}  // namespace

int TriModel::predict(std::span<const double> x) const {
    return majority3(trees[0].predict(x), trees[1].predict(x),
                     trees[2].predict(x));
}

std::vector<int> TriModel::predict_all(const EncodedDataset& data) const {
    std::vector<int> out(data.size());
    for (std::size_t i = 0; i < data.size(); ++i) out[i] = predict(data.row(i));
    return out;
}

TriRun fit_tritraining(const EncodedDataset& labeled,
                       const EncodedDataset& unlabeled, std::uint64_t seed,
                       const EncodedDataset* eval) {
    if (labeled.size() < 2 || !labeled.has_both_classes()) {
        throw std::invalid_argument(
            "tri-training: labeled set needs >= 2 rows covering both classes");
    }
    if (unlabeled.size() > 0 && unlabeled.cols != labeled.cols) {
        throw std::invalid_argument("tri-training: column mismatch");
    }

    TriRun run;
    TriModel& model = run.model;
    for (std::size_t i = 0; i < 3; ++i) {
        const EncodedDataset boot =
            bootstrap_sample(labeled, derive_seed(seed, {kTagBootstrap, i}));
        model.trees[i] = fit_tree(boot, kUnboundedDepth);
    }
    run.initial_holdout_error = holdout_error(model, eval);

    for (;;) {
        if (model.iterations == kIterationCap) {
            throw std::runtime_error("tri-training: iteration cap (50) hit");
        }
        ++model.iterations;

        // Decision phase: one snapshot of predictions for all three pairs.
        std::array<std::vector<int>, 3> on_labeled;
        std::array<std::vector<int>, 3> on_pool;
        for (std::size_t i = 0; i < 3; ++i) {
            on_labeled[i] = model.trees[i].predict_all(labeled);
            on_pool[i] = model.trees[i].predict_all(unlabeled);
        }

        TriIterationTrace trace;
        std::array<PseudoLabeledSet, 3> adopted;
        std::array<bool, 3> update{false, false, false};
        std::array<double, 3> measured{};
        for (std::size_t i = 0; i < 3; ++i) {
            const std::size_t j = (i + 1) % 3;
            const std::size_t k = (i + 2) % 3;
            const double err = pair_error_from_predictions(
                on_labeled[j], on_labeled[k], labeled.labels);
            measured[i] = err;
            trace.pair_error[i] = err;
            if (!(err < model.prev_error[i])) continue;

            PseudoLabeledSet candidate = pseudo_label_from_votes(
                unlabeled, on_pool[j], on_pool[k], static_cast<int>(i));
            const GateDecision gate =
                evaluate_update_gate(err, model.prev_error[i],
                                     model.prev_count[i], candidate.size());
            model.prev_count[i] = gate.lprime_after;
            if (!gate.accept) continue;
            if (gate.subsampled) {
                candidate = subsample(
                    candidate, gate.keep,
                    derive_seed(seed, {kTagSubsample, model.iterations, i}));
            }
            if (!(err * static_cast<double>(candidate.size()) <
                  model.prev_error[i] *
                      static_cast<double>(model.prev_count[i]))) {
                throw std::logic_error(
                    "tri-training: accepted set violates the e*l bound");
            }
            adopted[i] = std::move(candidate);
            update[i] = true;
        }

        // Update phase: refit flagged trees on L plus their adopted rows.
        bool changed = false;
        for (std::size_t i = 0; i < 3; ++i) {
            if (!update[i]) continue;
            model.trees[i] = fit_tree(augment(labeled, adopted[i]), kUnboundedDepth);
            model.prev_error[i] = measured[i];
            model.prev_count[i] = adopted[i].size();
            trace.accepted[i] = adopted[i].size();
            trace.updated[i] = true;
            changed = true;
        }
        trace.holdout_error = holdout_error(model, eval);
        run.trace.push_back(trace);
        if (!changed) break;
    }
    return run;
}

}  // namespace cotr
