#include "mrv/comparator.hpp"

#include <algorithm>

#include "mrv/error.hpp"

namespace mrv {

std::string_view to_string(Verdict v) {
    switch (v) {
        case Verdict::EdgeForward: return "edge_forward";
        case Verdict::EdgeBackward: return "edge_backward";
        case Verdict::AbstainTruncated: return "abstain_truncated";
        case Verdict::AbstainConflict: return "abstain_conflict";
        case Verdict::AbstainNoSignal: return "abstain_no_signal";
    }
    return "?";
}

Verdict verdict_from_string(std::string_view s) {
    for (auto v : {Verdict::EdgeForward, Verdict::EdgeBackward, Verdict::AbstainTruncated,
                   Verdict::AbstainConflict, Verdict::AbstainNoSignal}) {
        if (to_string(v) == s) return v;
    }
    throw MrvError(ErrorCode::InvalidLog, "unknown verdict '" + std::string(s) + "'");
}

Verdict pairwise_verdict(const VisibilityProfile& a, const VisibilityProfile& b,
                         const VerdictRule& rule, Round frontier) {
    if (!a.stopping_time || !b.stopping_time) {
        throw MrvError(ErrorCode::UnsettledStoppingTime, (a.stopping_time ? b : a).target.hex());
    }
    const Round horizon = std::max(*a.stopping_time, *b.stopping_time);
    if (frontier < horizon) {
        throw MrvError(ErrorCode::HorizonNotReached, "frontier " + std::to_string(frontier) +
                                                         " < horizon " + std::to_string(horizon));
    }
    if (!*a.mature || !*b.mature) return Verdict::AbstainTruncated;

    const Round coexist = std::max(a.birth_round, b.birth_round);
    const auto margin = static_cast<std::int64_t>(rule.margin);
    bool pos = false;
    bool neg = false;
    for (Round t = coexist + rule.window_offset; t <= horizon; ++t) {
        const auto delta = static_cast<std::int64_t>(a.count_at(t)) -
                           static_cast<std::int64_t>(b.count_at(t));
        pos = pos || delta >= margin;
        neg = neg || delta <= -margin;
    }
    if (pos && !neg) return Verdict::EdgeForward;
    if (neg && !pos) return Verdict::EdgeBackward;
    if (pos && neg) return Verdict::AbstainConflict;
    return Verdict::AbstainNoSignal;
}

PairBook::PairBook(std::vector<const VisibilityProfile*> members, VerdictRule rule)
    : members_(std::move(members)), rule_(rule) {
    const auto k = members_.size();
    records_.reserve(k * (k - (k > 0 ? 1 : 0)) / 2);
    for (std::uint32_t i = 0; i < k; ++i) {
        for (std::uint32_t j = i + 1; j < k; ++j) {
            PairRecord r;
            r.a = members_[i]->target;
            r.b = members_[j]->target;
            r.a_index = i;
            r.b_index = j;
            r.coexist_round = std::max(members_[i]->birth_round, members_[j]->birth_round);
            records_.push_back(r);
        }
    }
    pending_.resize(records_.size());
    for (std::size_t i = 0; i < pending_.size(); ++i) pending_[i] = i;
}

std::vector<std::size_t> PairBook::freeze_ready_pairs(Round frontier) {
    std::vector<std::size_t> frozen;
    std::size_t keep = 0;
    for (std::size_t idx : pending_) {
        auto& rec = records_[idx];
        const auto* a = members_[rec.a_index];
        const auto* b = members_[rec.b_index];
        if (a->stopping_time && b->stopping_time) {
            rec.horizon = std::max(*a->stopping_time, *b->stopping_time);
            if (frontier >= *rec.horizon) {
                rec.verdict = pairwise_verdict(*a, *b, rule_, frontier);
                ++evaluations_;
                frozen.push_back(idx);
                continue;
            }
        }
        pending_[keep++] = idx;
    }
    pending_.resize(keep);
    return frozen;
}

}  // namespace mrv
