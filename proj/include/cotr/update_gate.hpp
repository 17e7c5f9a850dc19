// The noise-bounded acceptance test shared by tri-training and Co-Transfer:
// a freshly pseudo-labeled set is adopted only while the error/size product
// e·l keeps shrinking, optionally after subsampling the set down to a size
// that restores the bound.
#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>

namespace cotr {

struct GateDecision {
    bool accept = false;
    bool subsampled = false;
    bool unblocked = false;        // first-round l' bootstrap device fired
    std::size_t keep = 0;          // accepted size (== candidate when not subsampled)
    std::size_t lprime_after = 0;  // l' value the caller must persist
};

// err: current estimated error e; prev_err/prev_count: bookkeeping (e', l');
// candidate_size: |L| of the freshly labeled set. Caller must have already
// established err < prev_err.
//
// When l' = 0 neither branch below can fire, so it is first re-seeded to
// floor(e/(e'-e)) + 1; both branches are then tested with the new value
// (testing only the subsample branch could ask for more rows than the
// candidate holds). Then, if l' < |L|: accept outright when e·|L| < e'·l',
// else subsample to ceil(e'·l'/e - 1) rows when l' > e/(e'-e).
inline GateDecision evaluate_update_gate(double err, double prev_err,
                                         std::size_t prev_count,
                                         std::size_t candidate_size) {
    if (!(err < prev_err)) {
        throw std::logic_error("update gate: requires err < prev_err");
    }
    GateDecision d;
    d.lprime_after = prev_count;
    if (prev_count == 0) {
        d.lprime_after =
            static_cast<std::size_t>(std::floor(err / (prev_err - err))) + 1;
        d.unblocked = true;
    }
    const double lp = static_cast<double>(d.lprime_after);
    if (d.lprime_after < candidate_size) {
        if (err * static_cast<double>(candidate_size) < prev_err * lp) {
            d.accept = true;
            d.keep = candidate_size;
        } else if (lp > err / (prev_err - err)) {
            d.accept = true;
            d.subsampled = true;
            d.keep = static_cast<std::size_t>(
                std::ceil(prev_err * lp / err - 1.0));
        }
    }
    return d;
}

}  // namespace cotr
