#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mrv/comparator.hpp"
#include "mrv/engine.hpp"
#include "mrv/exporter.hpp"
#include "mrv/types.hpp"

namespace mrv {

// Reference evaluation straight from the definitions over the fully
// materialized DAG. Recomputes everything on every call; shares no state or
// traversal code with the incremental engine.

struct OracleAuf {
    CreatorId creator;
    Round birth_round = 0;
    std::vector<std::uint32_t> counts;  // C_X(t) for t = birth_round .. frontier
    std::optional<Round> stopping_time;
    std::optional<bool> mature;
};

struct OracleReport {
    RunConfig config;
    std::optional<Round> frontier;
    std::map<Digest, OracleAuf> aufs;
    std::map<PairKey, Verdict> verdicts;
    std::vector<SliceOrder> slices;  // the sealable prefix of delivered slices
};

/// Throws InvalidLog if `events` violates the exporter contract.
OracleReport oracle_evaluate(const std::vector<ExporterEvent>& events, const RunConfig& config);

/// Empty iff stopping times, maturity, verdicts, enforceable edges and slice
/// orders all agree. Throws ConfigMismatch if n, f or w_max differ.
std::vector<std::string> diff_reports(const RunConfig& engine_config, const EngineTrace& engine,
                                      const OracleReport& oracle);

/// Generic slice graph for the reference linearizers. Indices refer to `keys`.
struct OracleGraph {
    std::vector<CompletionKey> keys;
    std::vector<std::pair<std::size_t, std::size_t>> causal;
    std::vector<std::pair<std::size_t, std::size_t>> svp;
};

/// Component label per vertex from mutual reachability (transitive closure).
std::vector<std::size_t> oracle_components(const OracleGraph& graph);

/// Lexicographically kappa-minimal order among all orders that keep every
/// SCC contiguous, respect condensation edges, and respect causal edges
/// inside each SCC. Enumerates permutations; refuses more than 9 vertices.
std::vector<std::size_t> oracle_order_exhaustive(const OracleGraph& graph);

/// Same order built greedily: repeatedly emit the eligible SCC with the
/// smallest kappa, expanding it causal-first then by kappa.
std::vector<std::size_t> oracle_order_greedy(const OracleGraph& graph);

}  // namespace mrv
