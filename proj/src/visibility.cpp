#include "mrv/visibility.hpp"

#include <algorithm>

#include "mrv/error.hpp"

namespace mrv {

VisibilityEngine::VisibilityEngine(const RunConfig& config, const DagStore& store)
    : config_(config), store_(&store) {}

void VisibilityEngine::on_round_committed(Round round, std::span<const VertexId> canonical) {
    const Round expected = frontier_ ? *frontier_ + 1 : 0;
    if (round != expected) {
        throw MrvError(ErrorCode::FrontierSkew, "visibility at round " + std::to_string(round) +
                                                    ", expected " + std::to_string(expected));
    }

    for (VertexId y : canonical) {
        const auto& meta = store_->meta(y);
        VisibilityProfile p;
        p.target = meta.digest;
        p.id = y;
        p.birth_round = round;
        profiles_.emplace(y, std::move(p));
        unsettled_.push_back(y);
    }

    std::unordered_map<VertexId, std::vector<VertexId>> reach;
    reach.reserve(canonical.size());
    std::vector<VertexId> merged;
    for (VertexId y : canonical) {
        merged.clear();
        merged.push_back(y);
        for (VertexId p : store_->parent_ids(y)) {
            auto it = prev_reach_.find(p);
            if (it == prev_reach_.end()) continue;
            for (VertexId x : it->second) {
                if (profiles_.count(x)) merged.push_back(x);
            }
        }
        std::sort(merged.begin(), merged.end());
        merged.erase(std::unique(merged.begin(), merged.end()), merged.end());

        for (VertexId x : merged) {
            auto& prof = profiles_.at(x);
            const Round idx = round - prof.birth_round;
            if (prof.counts.size() == idx) prof.counts.push_back(0);
            ++prof.counts[idx];
        }
        reach.emplace(y, merged);
    }
    prev_reach_ = std::move(reach);
    frontier_ = round;
}

std::vector<VertexId> VisibilityEngine::settle_stopping_times(Round round) {
    std::vector<VertexId> settled;
    std::vector<VertexId> remaining;
    remaining.reserve(unsettled_.size());
    for (VertexId id : unsettled_) {
        auto it = profiles_.find(id);
        if (it == profiles_.end()) continue;
        auto& prof = it->second;
        if (round < prof.birth_round) {
            remaining.push_back(id);
            continue;
        }
        if (prof.count_at(round) >= config_.quorum()) {
            prof.stopping_time = round;
            prof.mature = true;
            settled.push_back(id);
        } else if (round >= prof.birth_round + config_.w_max) {
            prof.stopping_time = prof.birth_round + config_.w_max;
            prof.mature = false;
            settled.push_back(id);
        } else {
            remaining.push_back(id);
        }
    }
    unsettled_ = std::move(remaining);
    return settled;
}

const VisibilityProfile* VisibilityEngine::profile(VertexId id) const {
    auto it = profiles_.find(id);
    return it == profiles_.end() ? nullptr : &it->second;
}

const VisibilityProfile& VisibilityEngine::profile(const Digest& x) const {
    const auto id = store_->find(x);
    const VisibilityProfile* p = id ? profile(*id) : nullptr;
    if (!p) throw MrvError(ErrorCode::UnknownAuf, x.hex());
    return *p;
}

std::uint32_t VisibilityEngine::visibility(const Digest& x, Round t) const {
    const auto& p = profile(x);
    if (t < p.birth_round || !frontier_ || t > *frontier_) {
        throw MrvError(ErrorCode::RoundNotRecorded,
                       "round " + std::to_string(t) + " for AUF born at " +
                           std::to_string(p.birth_round));
    }
    return p.count_at(t);
}

void VisibilityEngine::release(VertexId id) { profiles_.erase(id); }

}  // namespace mrv
