#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include "mrv/dag_store.hpp"
#include "mrv/types.hpp"

namespace mrv {

/// Creator-level visibility trajectory of one active AUF.
///
/// `counts[i]` is C_X(birth_round + i). The vector only grows while X is
/// still an ancestor of some canonical vertex; once a round records zero
/// every later round is zero as well, so trailing zeros are left implicit.
struct VisibilityProfile {
    Digest target;
    VertexId id = 0;
    Round birth_round = 0;
    std::vector<std::uint32_t> counts;
    std::optional<Round> stopping_time;
    std::optional<bool> mature;

    /// C_X(t) for birth_round <= t; caller guarantees t was recorded.
    std::uint32_t count_at(Round t) const {
        const Round i = t - birth_round;
        return i < counts.size() ? counts[i] : 0;
    }
};

/// Incremental visibility counting and stopping-time settlement.
///
/// Each committed vertex carries the sorted set of active AUFs in its
/// reflexive ancestor closure, built from its parents' sets. Parents are
/// always one round below, so only the previous round's sets are retained.
class VisibilityEngine {
public:
    VisibilityEngine(const RunConfig& config, const DagStore& store);

    /// Records C_X(round) for every active X. `canonical` must already be in
    /// the store and `round` must be the next frontier (FrontierSkew otherwise).
    void on_round_committed(Round round, std::span<const VertexId> canonical);

    /// Settles stopping times using the counts of `round`; returns ids newly settled.
    std::vector<VertexId> settle_stopping_times(Round round);

    /// C_X(t). Throws UnknownAuf if X is not active, RoundNotRecorded if t is
    /// before X's birth round or beyond the frontier.
    std::uint32_t visibility(const Digest& x, Round t) const;

    const VisibilityProfile* profile(VertexId id) const;
    const VisibilityProfile& profile(const Digest& x) const;

    /// Drops X from the active set; later rounds stop tracking it.
    void release(VertexId id);

    std::size_t active_size() const { return profiles_.size(); }
    std::optional<Round> frontier() const { return frontier_; }

private:
    RunConfig config_;
    const DagStore* store_;
    std::optional<Round> frontier_;
    std::unordered_map<VertexId, VisibilityProfile> profiles_;
    std::unordered_map<VertexId, std::vector<VertexId>> prev_reach_;
    std::vector<VertexId> unsettled_;
};

}  // namespace mrv
