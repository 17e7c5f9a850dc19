// Pseudo-labeled sets: rows of an unlabeled pool plus the labels a classifier
// pair assigned to them. The pool itself is never modified; sets reference it
// by row index so repeated rounds can relabel the same rows.
#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "cotr/dataset.hpp"

namespace cotr {

struct PseudoLabeledSet {
    const EncodedDataset* origin = nullptr;  // pool the rows are drawn from
    std::vector<std::size_t> indices;        // rows of *origin
    std::vector<int> labels;                 // assigned pseudo-labels
    std::vector<int> provenance;             // classifier-pair id per row

    std::size_t size() const { return indices.size(); }
};

// Rows of `origin` where the two prediction vectors agree, labeled with the
// agreed class.
PseudoLabeledSet pseudo_label_from_votes(const EncodedDataset& origin,
                                         std::span<const int> pj,
                                         std::span<const int> pk,
                                         int provenance_tag);

// Deduplicated union of three pair-labeled sets over the same pool, kept only
// where the full ensemble (predictions p1/p2/p3 on the pool) is unanimous and
// its verdict matches the pseudo-label. Duplicates are detected by feature
// vector content; first occurrence wins.
PseudoLabeledSet screen_pseudo_label(std::span<const int> p1,
                                     std::span<const int> p2,
                                     std::span<const int> p3,
                                     const PseudoLabeledSet& l1,
                                     const PseudoLabeledSet& l2,
                                     const PseudoLabeledSet& l3);

// Uniformly random subset of exactly `keep` rows (original order preserved).
PseudoLabeledSet subsample(const PseudoLabeledSet& s, std::size_t keep,
                           std::uint64_t seed);

// Training set: base rows followed by the pseudo-labeled rows (features
// copied from the origin pool, labels taken from the set).
EncodedDataset augment(const EncodedDataset& base, const PseudoLabeledSet& extra);

}  // namespace cotr
