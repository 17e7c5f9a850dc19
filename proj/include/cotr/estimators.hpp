// Agreement-based error estimators used by both tri-training and Co-Transfer.
// They score only the rows where the voters agree, and fall back to the 0.5
// sentinel (which blocks any update) when no such row exists.
#pragma once

#include <span>

namespace cotr {

inline constexpr double kNoAgreementError = 0.5;

// both-wrong count / agreement count over rows where pj == pk.
inline double pair_error_from_predictions(std::span<const int> pj,
                                          std::span<const int> pk,
                                          std::span<const int> labels) {
    std::size_t agree = 0;
    std::size_t both_wrong = 0;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (pj[i] != pk[i]) continue;
        ++agree;
        if (pj[i] != labels[i]) ++both_wrong;
    }
    if (agree == 0) return kNoAgreementError;
    return static_cast<double>(both_wrong) / static_cast<double>(agree);
}

// unanimous-wrong count / unanimous count over rows where all three agree.
inline double ensemble_error_from_predictions(std::span<const int> p1,
                                              std::span<const int> p2,
                                              std::span<const int> p3,
                                              std::span<const int> labels) {
    std::size_t unanimous = 0;
    std::size_t wrong = 0;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (p1[i] != p2[i] || p2[i] != p3[i]) continue;
        ++unanimous;
        if (p1[i] != labels[i]) ++wrong;
    }
    if (unanimous == 0) return kNoAgreementError;
    return static_cast<double>(wrong) / static_cast<double>(unanimous);
}

}  // namespace cotr
