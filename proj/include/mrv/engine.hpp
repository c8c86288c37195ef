#pragma once

#include <chrono>
#include <cstdint>
#include <deque>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "mrv/comparator.hpp"
#include "mrv/dag_store.hpp"
#include "mrv/exporter.hpp"
#include "mrv/linearizer.hpp"
#include "mrv/types.hpp"
#include "mrv/visibility.hpp"

namespace mrv {

/// Deliberate comparator defects, used to check that verification catches them.
enum class EngineFault {
    None,
    WindowFromCoexistence,  // scan from s instead of s+1
    ThresholdF,             // strong-signal margin f instead of f+1
};

struct EngineOptions {
    EngineFault fault = EngineFault::None;
    bool record_trace = true;
};

struct AufOutcome {
    Round birth_round = 0;
    Round stopping_time = 0;
    bool mature = false;

    friend bool operator==(const AufOutcome&, const AufOutcome&) = default;
};

using PairKey = std::pair<Digest, Digest>;  // kappa-ordered

/// Everything the engine decided, kept after per-slice state is released.
struct EngineTrace {
    std::map<Digest, AufOutcome> aufs;
    std::map<PairKey, Verdict> verdicts;
    std::vector<SliceOrder> slices;
};

struct PhaseTimes {
    std::chrono::nanoseconds visibility{0};
    std::chrono::nanoseconds comparator{0};
    std::chrono::nanoseconds linearizer{0};
};

struct RunMetrics {
    std::uint64_t rounds = 0;
    std::uint64_t aufs_committed = 0;
    std::uint64_t aufs_settled = 0;
    std::uint64_t aufs_mature = 0;
    std::uint64_t slices_delivered = 0;
    std::uint64_t slices_sealed = 0;
    std::uint64_t pair_evaluations = 0;
    std::uint64_t edges = 0;
    std::uint64_t abstain_truncated = 0;
    std::uint64_t abstain_conflict = 0;
    std::uint64_t abstain_no_signal = 0;
    std::uint64_t sealing_delay_sum = 0;
    std::uint64_t sealing_delay_max = 0;
    std::uint64_t enforceable_edges = 0;
    std::uint64_t preserved_edges = 0;
    std::uint64_t causal_edges = 0;
    std::uint64_t causal_violations = 0;
    std::uint64_t bound_violations = 0;  // h_X > r(X)+w_max or late sealing
    PhaseTimes wall;

    /// Canonical record of the deterministic fields (no timings, no floats).
    std::string to_record() const;
    /// Separate record holding the wall-clock fields.
    std::string timing_record() const;

    bool invariants_hold() const {
        return preserved_edges == enforceable_edges && causal_violations == 0 &&
               bound_violations == 0;
    }
};

/// Online ordering layer driven by the exporter stream.
///
/// On each committed round: record visibility, settle stopping times, freeze
/// ready pairs of delivered slices, then seal ready slices in slice order.
/// A ready slice waits until every earlier slice has sealed.
class OrderingEngine {
public:
    explicit OrderingEngine(const RunConfig& config, EngineOptions options = {});

    std::vector<SliceOrder> apply(const ExporterEvent& event);
    std::vector<SliceOrder> on_round_committed(const RoundCommitted& event);
    std::vector<SliceOrder> on_slice_delivered(const SliceDelivered& event);

    const RunConfig& config() const { return config_; }
    const DagStore& store() const { return store_; }
    const VisibilityEngine& visibility() const { return visibility_; }
    const EngineTrace& trace() const { return trace_; }
    const RunMetrics& metrics() const { return metrics_; }
    std::optional<Round> frontier() const { return store_.frontier(); }
    std::size_t pending_slices() const { return slices_.size(); }

    /// Precedence graph of the most recently sealed slice (for inspection).
    const PrecedenceGraph& last_graph() const { return last_graph_; }

private:
    struct SliceState {
        std::uint64_t index = 0;
        std::vector<VertexId> members;  // kappa-sorted
        std::unique_ptr<PairBook> pairs;
    };

    void freeze_pairs();
    std::vector<SliceOrder> seal_ready_slices();
    SliceOrder seal(SliceState& slice, Round sealing_time);

    RunConfig config_;
    EngineOptions options_;
    VerdictRule rule_;
    DagStore store_;
    VisibilityEngine visibility_;
    StreamValidator validator_;
    std::deque<SliceState> slices_;
    EngineTrace trace_;
    RunMetrics metrics_;
    PrecedenceGraph last_graph_;
};

/// Runs a whole event sequence through a fresh engine.
struct EngineRun {
    std::vector<SliceOrder> orders;
    EngineTrace trace;
    RunMetrics metrics;
};
EngineRun run_engine(const std::vector<ExporterEvent>& events, const RunConfig& config,
                     EngineOptions options = {});

}  // namespace mrv
