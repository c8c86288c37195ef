#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <unordered_map>
#include <vector>

#include "mrv/types.hpp"

namespace mrv {

/// Dense handle into a DagStore, assigned in insertion order.
using VertexId = std::uint32_t;

/// Monotonically growing committed DAG prefix.
///
/// Vertices of round R may be inserted once the frontier is R-1 (or, for
/// round 0, before any round has been committed). Every parent must already
/// be present and sit exactly one round below its child.
class DagStore {
public:
    /// `n` bounds creator indices; rounds >= 1 need at least `min_parents` parents.
    DagStore(std::uint32_t n, std::uint32_t min_parents);

    VertexId insert_vertex(const AufMeta& meta);

    /// Marks `round` as committed. Must be frontier+1 (or 0 for the first call).
    void commit_round(Round round);

    std::optional<Round> frontier() const { return frontier_; }

    bool contains(const Digest& d) const { return index_.count(d) != 0; }
    VertexId id_of(const Digest& d) const;
    std::optional<VertexId> find(const Digest& d) const;
    std::optional<VertexId> at(CreatorId creator, Round round) const;

    const AufMeta& meta(VertexId id) const { return vertices_[id]; }
    const std::vector<VertexId>& parent_ids(VertexId id) const { return parent_ids_[id]; }
    std::size_t size() const { return vertices_.size(); }

    /// Vertices of `round`, ordered by creator.
    std::vector<VertexId> round_vertices(Round round) const;

    /// True iff `a` is in the reflexive ancestor closure of `b`.
    bool is_ancestor(const Digest& a, const Digest& b) const;
    bool is_ancestor(VertexId a, VertexId b) const;

    /// Ancestors of `start` (inclusive) with round >= floor_round, sorted by digest.
    std::vector<Digest> bounded_ancestors(const Digest& start, Round floor_round) const;
    /// Same traversal on ids; result sorted ascending by id.
    std::vector<VertexId> bounded_ancestor_ids(VertexId start, Round floor_round) const;

    std::uint32_t n() const { return n_; }
    std::uint32_t min_parents() const { return min_parents_; }

private:
    std::uint32_t n_;
    std::uint32_t min_parents_;
    std::vector<AufMeta> vertices_;
    std::vector<std::vector<VertexId>> parent_ids_;
    std::unordered_map<Digest, VertexId> index_;
    std::map<std::pair<Round, std::uint32_t>, VertexId> by_round_creator_;
    std::optional<Round> frontier_;
};

}  // namespace mrv
