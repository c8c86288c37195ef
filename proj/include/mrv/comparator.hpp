#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "mrv/dag_store.hpp"
#include "mrv/types.hpp"
#include "mrv/visibility.hpp"

namespace mrv {

enum class Verdict : std::uint8_t {
    EdgeForward,   // a -> b
    EdgeBackward,  // b -> a
    AbstainTruncated,
    AbstainConflict,
    AbstainNoSignal,
};

std::string_view to_string(Verdict v);
Verdict verdict_from_string(std::string_view s);

/// Verdict of the pair read in the opposite direction.
constexpr Verdict mirrored(Verdict v) {
    switch (v) {
        case Verdict::EdgeForward: return Verdict::EdgeBackward;
        case Verdict::EdgeBackward: return Verdict::EdgeForward;
        default: return v;
    }
}

/// Comparison parameters. `margin` is the strong-signal threshold (f+1) and
/// the scan covers t in {s + window_offset, ..., H}.
struct VerdictRule {
    std::uint32_t margin = 2;
    Round window_offset = 1;

    static VerdictRule from(const RunConfig& config) { return {config.margin(), 1}; }
};

/// Four-way comparison of two settled profiles over their post-coexistence
/// window. Throws UnsettledStoppingTime if either stopping time is unknown
/// and HorizonNotReached if `frontier` < H(a, b).
Verdict pairwise_verdict(const VisibilityProfile& a, const VisibilityProfile& b,
                         const VerdictRule& rule, Round frontier);

struct PairRecord {
    Digest a;  // kappa(a) < kappa(b)
    Digest b;
    std::uint32_t a_index = 0;  // positions in the kappa-sorted slice
    std::uint32_t b_index = 0;
    Round coexist_round = 0;
    std::optional<Round> horizon;
    std::optional<Verdict> verdict;
};

/// All unordered pairs of one slice, frozen exactly once as their horizons pass.
class PairBook {
public:
    /// `members` sorted by completion key, with their live profiles.
    PairBook(std::vector<const VisibilityProfile*> members, VerdictRule rule);

    /// Freezes every pair with both stopping times settled and frontier >= H.
    /// Returns indices (into records()) of pairs frozen by this call.
    std::vector<std::size_t> freeze_ready_pairs(Round frontier);

    bool all_frozen() const { return pending_.empty(); }
    const std::vector<PairRecord>& records() const { return records_; }
    std::uint64_t evaluations() const { return evaluations_; }

private:
    std::vector<const VisibilityProfile*> members_;
    VerdictRule rule_;
    std::vector<PairRecord> records_;
    std::vector<std::size_t> pending_;
    std::uint64_t evaluations_ = 0;
};

}  // namespace mrv
