// Depth-bounded binary classification tree with per-instance weights: the
// base learner inside the boosted ensembles and the standalone DT baseline.
#pragma once

#include <array>
#include <limits>
#include <span>
#include <vector>

#include "cotr/dataset.hpp"

namespace cotr {

// Depth limit that lets a tree grow to purity.
inline constexpr int kUnboundedDepth = std::numeric_limits<int>::max();

struct TreeNode {
    int feature = -1;  // -1 marks a leaf
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    int leaf_class = 0;
    std::array<double, 2> class_mass{0.0, 0.0};

    bool is_leaf() const { return feature < 0; }
};

struct TreeModel {
    std::vector<TreeNode> nodes;  // nodes[0] is the root
    std::size_t n_features = 0;
    int max_depth = 0;

    int predict(std::span<const double> x) const;
    std::vector<int> predict_all(const EncodedDataset& data) const;
};

// Greedy CART with weighted Gini impurity. At each node the (feature,
// threshold) pair minimizing the weighted child impurity is chosen;
// thresholds are midpoints between consecutive distinct feature values and
// ties are broken by lowest feature index, then lowest threshold. A node
// becomes a leaf when the depth limit is reached, its weight is pure, or no
// feature has two distinct values left.
TreeModel fit_tree(std::span<const double> values, std::size_t n_cols,
                   std::span<const int> labels, std::span<const double> weights,
                   int max_depth);

TreeModel fit_tree(const EncodedDataset& data, std::span<const double> weights,
                   int max_depth);

// Unit-weight convenience overload.
TreeModel fit_tree(const EncodedDataset& data, int max_depth);

double error_rate(const TreeModel& m, const EncodedDataset& data);

}  // namespace cotr
