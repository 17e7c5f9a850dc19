#include "cotr/tree.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace cotr {

namespace {

struct SplitChoice {
    bool found = false;
    int feature = -1;
    double threshold = 0.0;
    double score = std::numeric_limits<double>::infinity();
};

// Weighted Gini mass of one side: total * (1 - sum p_c^2) == 2ab/(a+b).
double gini_mass(double a, double b) {
    const double total = a + b;
    if (total <= 0.0) return 0.0;
    return 2.0 * a * b / total;
}

struct Builder {
    std::span<const double> values;
    std::size_t n_cols;
    std::span<const int> labels;
    std::span<const double> weights;
    std::vector<TreeNode>* nodes;

    double at(std::size_t row, std::size_t col) const {
        return values[row * n_cols + col];
    }

    SplitChoice best_split(const std::vector<std::size_t>& rows) const {
        SplitChoice best;
        std::vector<std::pair<double, std::size_t>> order;
        order.reserve(rows.size());
        for (std::size_t f = 0; f < n_cols; ++f) {
            order.clear();
            for (std::size_t r : rows) order.emplace_back(at(r, f), r);
            std::sort(order.begin(), order.end(),
                      [](const auto& a, const auto& b) { return a.first < b.first; });

            std::array<double, 2> right{0.0, 0.0};
            for (std::size_t r : rows) right[labels[r]] += weights[r];
            std::array<double, 2> left{0.0, 0.0};

            for (std::size_t i = 0; i + 1 < order.size(); ++i) {
                const std::size_t r = order[i].second;
                left[labels[r]] += weights[r];
                right[labels[r]] -= weights[r];
                if (order[i].first == order[i + 1].first) continue;
                const double threshold =
                    order[i].first + (order[i + 1].first - order[i].first) / 2.0;
                const double score =
                    gini_mass(left[0], left[1]) + gini_mass(right[0], right[1]);
                // Strict < keeps the lowest feature index / lowest threshold
                // among ties because candidates are visited in that order.
                if (score < best.score) {
                    best.found = true;
                    best.feature = static_cast<int>(f);
                    best.threshold = threshold;
                    best.score = score;
                }
            }
        }
        return best;
    }

    int build(const std::vector<std::size_t>& rows, int depth_left) {
        std::array<double, 2> mass{0.0, 0.0};
        for (std::size_t r : rows) mass[labels[r]] += weights[r];

        const int index = static_cast<int>(nodes->size());
        nodes->emplace_back();
        (*nodes)[index].class_mass = mass;
        (*nodes)[index].leaf_class = mass[1] > mass[0] ? 1 : 0;

        const bool impure = mass[0] > 0.0 && mass[1] > 0.0;
        if (impure && depth_left > 0) {
            const SplitChoice split = best_split(rows);
            if (split.found) {
                std::vector<std::size_t> left_rows;
                std::vector<std::size_t> right_rows;
                for (std::size_t r : rows) {
                    const std::size_t col = static_cast<std::size_t>(split.feature);
                    (at(r, col) <= split.threshold ? left_rows : right_rows)
                        .push_back(r);
                }
                const int next_depth =
                    depth_left == kUnboundedDepth ? depth_left : depth_left - 1;
                const int left = build(left_rows, next_depth);
                const int right = build(right_rows, next_depth);
                (*nodes)[index].feature = split.feature;
                (*nodes)[index].threshold = split.threshold;
                (*nodes)[index].left = left;
                (*nodes)[index].right = right;
            }
        }
        return index;
    }
};

}  // namespace

int TreeModel::predict(std::span<const double> x) const {
    if (x.size() != n_features) {
        throw std::invalid_argument("tree: feature vector has " +
                                    std::to_string(x.size()) + " columns, expected " +
                                    std::to_string(n_features));
    }
    int at = 0;
    while (!nodes[at].is_leaf()) {
        const TreeNode& node = nodes[at];
        at = x[static_cast<std::size_t>(node.feature)] <= node.threshold
                 ? node.left
                 : node.right;
    }
    return nodes[at].leaf_class;
}

std::vector<int> TreeModel::predict_all(const EncodedDataset& data) const {
    std::vector<int> out(data.size());
    for (std::size_t i = 0; i < data.size(); ++i) out[i] = predict(data.row(i));
    return out;
}

TreeModel fit_tree(std::span<const double> values, std::size_t n_cols,
                   std::span<const int> labels, std::span<const double> weights,
                   int max_depth) {
    if (max_depth < 1) throw std::invalid_argument("tree: max_depth must be >= 1");
    if (n_cols == 0) throw std::invalid_argument("tree: no feature columns");
    const std::size_t n_rows = labels.size();
    if (n_rows == 0) throw std::invalid_argument("tree: empty training set");
    if (values.size() != n_rows * n_cols) {
        throw std::invalid_argument("tree: values/labels size mismatch");
    }
    if (weights.size() != n_rows) {
        throw std::invalid_argument("tree: weights/labels size mismatch");
    }
    double mass = 0.0;
    for (std::size_t i = 0; i < n_rows; ++i) {
        if (labels[i] != 0 && labels[i] != 1) {
            throw std::invalid_argument("tree: label out of {0,1} at row " +
                                        std::to_string(i));
        }
        if (!(weights[i] >= 0.0)) {
            throw std::invalid_argument("tree: negative or NaN weight at row " +
                                        std::to_string(i));
        }
        mass += weights[i];
    }
    if (!(mass > 0.0)) {
        throw std::invalid_argument("tree: total weight must be positive");
    }

    TreeModel model;
    model.n_features = n_cols;
    model.max_depth = max_depth;
    std::vector<std::size_t> rows(n_rows);
    std::iota(rows.begin(), rows.end(), std::size_t{0});
    Builder builder{values, n_cols, labels, weights, &model.nodes};
    builder.build(rows, max_depth);
    return model;
}

TreeModel fit_tree(const EncodedDataset& data, std::span<const double> weights,
                   int max_depth) {
    return fit_tree(data.values, data.cols, data.labels, weights, max_depth);
}

TreeModel fit_tree(const EncodedDataset& data, int max_depth) {
    std::vector<double> weights(data.size(), 1.0);
    return fit_tree(data, weights, max_depth);
}

double error_rate(const TreeModel& m, const EncodedDataset& data) {
    if (data.size() == 0) throw std::invalid_argument("error_rate: empty dataset");
    std::size_t wrong = 0;
    for (std::size_t i = 0; i < data.size(); ++i) {
        if (m.predict(data.row(i)) != data.labels[i]) ++wrong;
    }
    return static_cast<double>(wrong) / static_cast<double>(data.size());
}

}  // namespace cotr
