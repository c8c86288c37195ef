#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "mrv/comparator.hpp"
#include "mrv/dag_store.hpp"
#include "mrv/exporter.hpp"
#include "mrv/types.hpp"
#include "mrv/visibility.hpp"

namespace mrv {

using LocalEdge = std::pair<std::uint32_t, std::uint32_t>;

/// Slice-local precedence graph. Vertices are sorted by completion key, so a
/// smaller index always means a smaller kappa. Edge lists are sorted.
struct PrecedenceGraph {
    std::vector<Digest> vertices;
    std::vector<CompletionKey> keys;
    std::vector<LocalEdge> causal_edges;  // (ancestor, descendant)
    std::vector<LocalEdge> svp_edges;     // certified comparator edges
};

/// T(S): the latest member stopping time. Throws UnsettledMember.
Round slice_sealing_time(std::span<const VisibilityProfile* const> members);

/// Assembles causal edges from `store` and svp edges from frozen `pairs`.
/// `members` must be sorted by completion key (the PairBook order).
/// Throws UnfrozenPair if any record lacks a verdict.
PrecedenceGraph build_precedence_graph(const DagStore& store, std::span<const VertexId> members,
                                       const std::vector<PairRecord>& pairs);

/// Tarjan's algorithm; returns the component index of every vertex.
std::vector<std::uint32_t> strongly_connected_components(std::uint32_t vertex_count,
                                                         std::span<const LocalEdge> edges,
                                                         std::uint32_t* component_count);

/// Condenses SCCs of causal+svp edges, emits components in kappa-minimal
/// topological order, and orders each component by its causal subgraph with
/// kappa among causally incomparable members.
SliceOrder condense_and_linearize(const PrecedenceGraph& graph, std::uint64_t slice_index);

}  // namespace mrv
