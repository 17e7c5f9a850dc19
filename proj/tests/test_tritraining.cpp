#include <doctest.h>

#include <array>
#include <cmath>
#include <vector>

#include "cotr/rng.hpp"
#include "cotr/tritraining.hpp"

using namespace cotr;

namespace {

// Two overlapping Gaussian blobs; flip_rate adds label noise.
EncodedDataset blobs(std::size_t n, double gap, double flip_rate,
                     std::uint64_t seed) {
    Rng rng(seed);
    EncodedDataset d;
    d.cols = 2;
    for (std::size_t i = 0; i < n; ++i) {
        int y = static_cast<int>(i % 2);
        const double cx = y == 0 ? -gap : gap;
        d.values.push_back(cx + rng.normal());
        d.values.push_back(rng.normal());
        if (rng.uniform_real() < flip_rate) y = 1 - y;
        d.labels.push_back(y);
    }
    return d;
}

EncodedDataset hide_labels(EncodedDataset d) {
    d.sealed = SealedLabels(d.labels);
    for (auto& y : d.labels) y = kNoLabel;
    return d;
}

TreeModel stump_tree(int f) {
    TreeModel m;
    m.n_features = 3;
    m.max_depth = 1;
    TreeNode root;
    root.feature = f;
    root.threshold = 0.5;
    root.left = 1;
    root.right = 2;
    m.nodes.push_back(root);
    TreeNode l; l.leaf_class = 0;
    TreeNode r; r.leaf_class = 1;
    m.nodes.push_back(l);
    m.nodes.push_back(r);
    return m;
}

}  // namespace

TEST_CASE("tritraining: input validation") {
    const EncodedDataset l = blobs(20, 2.0, 0.0, 1);
    EncodedDataset mono = l;
    for (auto& y : mono.labels) y = 0;
    EncodedDataset tiny;
    tiny.cols = 2;
    tiny.values = {0.0, 0.0};
    tiny.labels = {1};
    EncodedDataset wide = blobs(10, 2.0, 0.0, 2);
    wide.cols = 1;  // deliberately inconsistent width

    CHECK_THROWS(fit_tritraining(mono, hide_labels(blobs(10, 2.0, 0.0, 3)), 1));
    CHECK_THROWS(fit_tritraining(tiny, hide_labels(blobs(10, 2.0, 0.0, 3)), 1));
    CHECK_THROWS(fit_tritraining(l, wide, 1));
}

TEST_CASE("tritraining: empty pool stops after one unchanged round") {
    const EncodedDataset l = blobs(24, 2.0, 0.0, 4);
    EncodedDataset empty;
    empty.cols = 2;
    const EncodedDataset eval = blobs(100, 2.0, 0.0, 5);

    const TriRun run = fit_tritraining(l, empty, 9, &eval);
    CHECK(run.model.iterations == 1);
    REQUIRE(run.trace.size() == 1);
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK_FALSE(run.trace[0].updated[i]);
        CHECK(run.trace[0].accepted[i] == 0);
        // Bookkeeping still at its initial state.
        CHECK(run.model.prev_error[i] == 0.5);
    }
    CHECK(run.trace[0].holdout_error == run.initial_holdout_error);
}

TEST_CASE("tritraining: majority vote over all eight patterns") {
    TriModel m;
    m.trees = {stump_tree(0), stump_tree(1), stump_tree(2)};
    for (int bits = 0; bits < 8; ++bits) {
        const std::vector<double> x{static_cast<double>(bits & 1),
                                    static_cast<double>((bits >> 1) & 1),
                                    static_cast<double>((bits >> 2) & 1)};
        const int votes = (bits & 1) + ((bits >> 1) & 1) + ((bits >> 2) & 1);
        CHECK(m.predict(x) == (votes >= 2 ? 1 : 0));
    }
}

TEST_CASE("tritraining: unlabeled data does not hurt on average") {
    double init_sum = 0.0, final_sum = 0.0;
    int runs = 0;
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        const EncodedDataset l = blobs(16, 1.1, 0.05, 100 + seed);
        if (!l.has_both_classes()) continue;
        const EncodedDataset u = hide_labels(blobs(240, 1.1, 0.05, 200 + seed));
        const EncodedDataset eval = blobs(400, 1.1, 0.0, 300 + seed);
        const TriRun run = fit_tritraining(l, u, seed, &eval);
        init_sum += run.initial_holdout_error;
        final_sum += run.trace.back().holdout_error;
        ++runs;
        CHECK(run.model.iterations >= 1);
        CHECK(run.model.iterations < 50);
    }
    REQUIRE(runs > 40);
    CHECK(final_sum / runs <= init_sum / runs + 0.01);
}

TEST_CASE("tritraining: traces respect the update bookkeeping") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const EncodedDataset l = blobs(20, 1.0, 0.1, 400 + seed);
        if (!l.has_both_classes()) continue;
        const EncodedDataset u = hide_labels(blobs(150, 1.0, 0.1, 500 + seed));
        const TriRun run = fit_tritraining(l, u, seed);

        // Last round never updates (that is the stop condition).
        const TriIterationTrace& last = run.trace.back();
        for (std::size_t i = 0; i < 3; ++i) CHECK_FALSE(last.updated[i]);

        std::array<double, 3> last_e{};
        std::array<std::size_t, 3> last_n{};
        std::array<int, 3> update_count{};
        for (const TriIterationTrace& it : run.trace) {
            for (std::size_t i = 0; i < 3; ++i) {
                if (!it.updated[i]) {
                    CHECK(it.accepted[i] == 0);
                    continue;
                }
                CHECK(it.accepted[i] >= 1);
                CHECK(it.pair_error[i] < 0.5);
                if (update_count[i] > 0) {
                    // Chained product decrease: each accepted update pushes
                    // e*l strictly below the previous accepted update's.
                    CHECK(it.pair_error[i] * static_cast<double>(it.accepted[i]) <
                          last_e[i] * static_cast<double>(last_n[i]));
                }
                last_e[i] = it.pair_error[i];
                last_n[i] = it.accepted[i];
                ++update_count[i];
            }
        }
        // Final bookkeeping equals the last accepted update per classifier.
        for (std::size_t i = 0; i < 3; ++i) {
            if (update_count[i] == 0) continue;
            CHECK(run.model.prev_error[i] == last_e[i]);
            CHECK(run.model.prev_count[i] == last_n[i]);
        }
    }
}

TEST_CASE("tritraining: pool labels are never touched") {
    const EncodedDataset l = blobs(20, 1.5, 0.0, 600);
    const EncodedDataset u = hide_labels(blobs(100, 1.5, 0.0, 601));
    const EncodedDataset before = u;
    fit_tritraining(l, u, 3);
    CHECK(u.values == before.values);
    CHECK(u.labels == before.labels);
    CHECK(u.sealed.reveal() == before.sealed.reveal());
    for (int y : u.labels) CHECK(y == kNoLabel);
}

TEST_CASE("tritraining: deterministic per seed") {
    const EncodedDataset l = blobs(18, 1.2, 0.05, 700);
    const EncodedDataset u = hide_labels(blobs(120, 1.2, 0.05, 701));
    const EncodedDataset eval = blobs(200, 1.2, 0.0, 702);

    const TriRun a = fit_tritraining(l, u, 42, &eval);
    const TriRun b = fit_tritraining(l, u, 42, &eval);
    CHECK(a.model.iterations == b.model.iterations);
    CHECK(a.initial_holdout_error == b.initial_holdout_error);
    REQUIRE(a.trace.size() == b.trace.size());
    for (std::size_t t = 0; t < a.trace.size(); ++t) {
        CHECK(a.trace[t].holdout_error == b.trace[t].holdout_error);
        for (std::size_t i = 0; i < 3; ++i) {
            CHECK(a.trace[t].pair_error[i] == b.trace[t].pair_error[i]);
            CHECK(a.trace[t].accepted[i] == b.trace[t].accepted[i]);
        }
    }
    CHECK(a.model.predict_all(eval) == b.model.predict_all(eval));

    const TriRun c = fit_tritraining(l, u, 43, &eval);
    // A different seed draws different bootstraps; at least the trace or the
    // predictions should differ somewhere (not guaranteed row by row, so
    // compare the whole bundle).
    const bool same_everything =
        c.model.iterations == a.model.iterations &&
        c.model.predict_all(eval) == a.model.predict_all(eval) &&
        c.initial_holdout_error == a.initial_holdout_error;
    CHECK_FALSE(same_everything);
}
