#include "mrv/dag_store.hpp"

#include <algorithm>

#include "mrv/error.hpp"

namespace mrv {

DagStore::DagStore(std::uint32_t n, std::uint32_t min_parents)
    : n_(n), min_parents_(min_parents) {}

VertexId DagStore::insert_vertex(const AufMeta& meta) {
    if (meta.creator.index >= n_) {
        throw MrvError(ErrorCode::UnknownCreator, "creator " + std::to_string(meta.creator.index));
    }
    const Round next = frontier_ ? *frontier_ + 1 : 0;
    if (meta.round > next) {
        throw MrvError(ErrorCode::FrontierSkew, "vertex round " + std::to_string(meta.round) +
                                                    " beyond frontier+1 = " + std::to_string(next));
    }
    if (by_round_creator_.count({meta.round, meta.creator.index}) != 0) {
        throw MrvError(ErrorCode::DuplicateCreatorRound,
                       "creator " + std::to_string(meta.creator.index) + " round " +
                           std::to_string(meta.round));
    }
    if (index_.count(meta.digest) != 0) {
        throw MrvError(ErrorCode::DuplicateCreatorRound, "digest already stored");
    }

    std::vector<VertexId> parents;
    parents.reserve(meta.parents.size());
    for (const auto& p : meta.parents) {
        auto it = index_.find(p);
        if (it == index_.end()) throw MrvError(ErrorCode::MissingParent, p.hex());
        if (meta.round == 0 || vertices_[it->second].round != meta.round - 1) {
            throw MrvError(ErrorCode::BadParentRound,
                           "parent " + p.hex().substr(0, 8) + " of round " +
                               std::to_string(vertices_[it->second].round) + " under round " +
                               std::to_string(meta.round));
        }
        parents.push_back(it->second);
    }
    std::sort(parents.begin(), parents.end());
    if (std::adjacent_find(parents.begin(), parents.end()) != parents.end()) {
        throw MrvError(ErrorCode::BadParentRound, "repeated parent reference");
    }
    if (meta.round >= 1 && parents.size() < min_parents_) {
        throw MrvError(ErrorCode::InsufficientParents,
                       std::to_string(parents.size()) + " < " + std::to_string(min_parents_));
    }
    if (compute_digest(meta.creator, meta.round, meta.parents, meta.payload_size) != meta.digest) {
        throw MrvError(ErrorCode::DigestMismatch, meta.digest.hex());
    }

    const auto id = static_cast<VertexId>(vertices_.size());
    vertices_.push_back(meta);
    std::sort(vertices_.back().parents.begin(), vertices_.back().parents.end());
    parent_ids_.push_back(std::move(parents));
    index_.emplace(meta.digest, id);
    by_round_creator_.emplace(std::pair{meta.round, meta.creator.index}, id);
    return id;
}

void DagStore::commit_round(Round round) {
    const Round expected = frontier_ ? *frontier_ + 1 : 0;
    if (round != expected) {
        throw MrvError(ErrorCode::FrontierSkew, "commit of round " + std::to_string(round) +
                                                    ", expected " + std::to_string(expected));
    }
    frontier_ = round;
}

VertexId DagStore::id_of(const Digest& d) const {
    auto it = index_.find(d);
    if (it == index_.end()) throw MrvError(ErrorCode::UnknownDigest, d.hex());
    return it->second;
}

std::optional<VertexId> DagStore::find(const Digest& d) const {
    auto it = index_.find(d);
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

std::optional<VertexId> DagStore::at(CreatorId creator, Round round) const {
    auto it = by_round_creator_.find({round, creator.index});
    if (it == by_round_creator_.end()) return std::nullopt;
    return it->second;
}

std::vector<VertexId> DagStore::round_vertices(Round round) const {
    std::vector<VertexId> out;
    for (auto it = by_round_creator_.lower_bound({round, 0});
         it != by_round_creator_.end() && it->first.first == round; ++it) {
        out.push_back(it->second);
    }
    return out;
}

bool DagStore::is_ancestor(const Digest& a, const Digest& b) const {
    return is_ancestor(id_of(a), id_of(b));
}

bool DagStore::is_ancestor(VertexId a, VertexId b) const {
    if (a == b) return true;
    const Round floor = vertices_[a].round;
    if (vertices_[b].round <= floor) return false;
    std::vector<std::uint8_t> seen(vertices_.size(), 0);
    std::vector<VertexId> stack{b};
    seen[b] = 1;
    while (!stack.empty()) {
        const VertexId v = stack.back();
        stack.pop_back();
        for (VertexId p : parent_ids_[v]) {
            if (p == a) return true;
            if (seen[p] || vertices_[p].round <= floor) continue;
            seen[p] = 1;
            stack.push_back(p);
        }
    }
    return false;
}

std::vector<VertexId> DagStore::bounded_ancestor_ids(VertexId start, Round floor_round) const {
    std::vector<VertexId> out{start};
    std::unordered_map<VertexId, bool> seen{{start, true}};
    for (std::size_t i = 0; i < out.size(); ++i) {
        for (VertexId p : parent_ids_[out[i]]) {
            if (vertices_[p].round < floor_round || seen.count(p)) continue;
            seen.emplace(p, true);
            out.push_back(p);
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<Digest> DagStore::bounded_ancestors(const Digest& start, Round floor_round) const {
    const VertexId id = id_of(start);
    std::vector<Digest> out;
    for (VertexId v : bounded_ancestor_ids(id, floor_round)) out.push_back(vertices_[v].digest);
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace mrv
