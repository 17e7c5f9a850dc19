#include "cotr/pseudo.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

#include "cotr/rng.hpp"

namespace cotr {

PseudoLabeledSet pseudo_label_from_votes(const EncodedDataset& origin,
                                         std::span<const int> pj,
                                         std::span<const int> pk,
                                         int provenance_tag) {
    if (pj.size() != origin.size() || pk.size() != origin.size()) {
        throw std::invalid_argument("pseudo_label: prediction size mismatch");
    }
    PseudoLabeledSet out;
    out.origin = &origin;
    for (std::size_t i = 0; i < origin.size(); ++i) {
        if (pj[i] != pk[i]) continue;
        out.indices.push_back(i);
        out.labels.push_back(pj[i]);
        out.provenance.push_back(provenance_tag);
    }
    return out;
}

PseudoLabeledSet screen_pseudo_label(std::span<const int> p1,
                                     std::span<const int> p2,
                                     std::span<const int> p3,
                                     const PseudoLabeledSet& l1,
                                     const PseudoLabeledSet& l2,
                                     const PseudoLabeledSet& l3) {
    const EncodedDataset* origin = l1.origin ? l1.origin
                                 : l2.origin ? l2.origin
                                             : l3.origin;
    for (const PseudoLabeledSet* s : {&l1, &l2, &l3}) {
        if (s->origin && s->origin != origin) {
            throw std::invalid_argument("screen: sets drawn from different pools");
        }
    }
    PseudoLabeledSet out;
    out.origin = origin;
    if (!origin) return out;
    if (p1.size() != origin->size() || p2.size() != origin->size() ||
        p3.size() != origin->size()) {
        throw std::invalid_argument("screen: prediction size mismatch");
    }

    std::set<std::vector<double>> seen;
    for (const PseudoLabeledSet* s : {&l1, &l2, &l3}) {
        for (std::size_t r = 0; r < s->size(); ++r) {
            const std::size_t idx = s->indices[r];
            if (p1[idx] != p2[idx] || p2[idx] != p3[idx]) continue;
            if (p1[idx] != s->labels[r]) continue;
            const std::span<const double> row = origin->row(idx);
            std::vector<double> key(row.begin(), row.end());
            if (!seen.insert(std::move(key)).second) continue;
            out.indices.push_back(idx);
            out.labels.push_back(s->labels[r]);
            out.provenance.push_back(s->provenance[r]);
        }
    }
    return out;
}

PseudoLabeledSet subsample(const PseudoLabeledSet& s, std::size_t keep,
                           std::uint64_t seed) {
    if (keep > s.size()) {
        throw std::invalid_argument("subsample: keep " + std::to_string(keep) +
                                    " exceeds set size " +
                                    std::to_string(s.size()));
    }
    Rng rng(seed);
    std::vector<std::size_t> picked =
        rng.sample_without_replacement(s.size(), keep);
    std::sort(picked.begin(), picked.end());
    PseudoLabeledSet out;
    out.origin = s.origin;
    out.indices.reserve(keep);
    out.labels.reserve(keep);
    out.provenance.reserve(keep);
    for (std::size_t p : picked) {
        out.indices.push_back(s.indices[p]);
        out.labels.push_back(s.labels[p]);
        out.provenance.push_back(s.provenance[p]);
    }
    return out;
}

EncodedDataset augment(const EncodedDataset& base, const PseudoLabeledSet& extra) {
    if (extra.size() > 0 && extra.origin == nullptr) {
        throw std::invalid_argument("augment: pseudo set has no origin pool");
    }
    if (extra.origin && extra.origin->cols != base.cols) {
        throw std::invalid_argument("augment: column mismatch");
    }
    EncodedDataset out;
    out.cols = base.cols;
    out.values = base.values;
    out.labels = base.labels;
    std::vector<int> sealed = base.sealed.reveal();
    sealed.resize(base.size(), kNoLabel);
    for (std::size_t r = 0; r < extra.size(); ++r) {
        const std::span<const double> row = extra.origin->row(extra.indices[r]);
        out.values.insert(out.values.end(), row.begin(), row.end());
        out.labels.push_back(extra.labels[r]);
        sealed.push_back(kNoLabel);
    }
    out.sealed = SealedLabels(std::move(sealed));
    return out;
}

}  // namespace cotr
