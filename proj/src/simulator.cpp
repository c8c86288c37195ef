#include "mrv/simulator.hpp"

#include <algorithm>
#include <charconv>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "mrv/error.hpp"

namespace mrv {

std::uint64_t SimRng::below(std::uint64_t bound) {
    if (bound <= 1) return 0;
    // Reject the top partial bucket so every residue is equally likely.
    const std::uint64_t limit = UINT64_MAX - (UINT64_MAX % bound);
    std::uint64_t x;
    do {
        x = next();
    } while (x >= limit);
    return x % bound;
}

namespace {

std::vector<CreatorId> parse_creators(std::string_view text) {
    std::vector<CreatorId> out;
    while (!text.empty()) {
        const auto comma = text.find(',');
        const auto item = text.substr(0, comma);
        std::uint32_t v = 0;
        auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
        if (ec != std::errc{} || ptr != item.data() + item.size()) {
            throw MrvError(ErrorCode::InfeasiblePlan, "bad creator list '" + std::string(text) + "'");
        }
        out.push_back(CreatorId{v});
        if (comma == std::string_view::npos) break;
        text.remove_prefix(comma + 1);
    }
    return out;
}

std::string format_creators(const std::vector<CreatorId>& cs) {
    std::string out;
    for (std::size_t i = 0; i < cs.size(); ++i) {
        if (i) out.push_back(',');
        out += std::to_string(cs[i].index);
    }
    return out;
}

}  // namespace

Strategy parse_strategy(std::string_view text) {
    const auto colon = text.find(':');
    const auto kind = text.substr(0, colon);
    const auto arg = colon == std::string_view::npos ? std::string_view{} : text.substr(colon + 1);
    if (kind == "honest") return Honest{};
    if (kind == "withhold") {
        try {
            const double p = std::stod(std::string(arg));
            if (p < 0.0 || p > 1.0) throw std::out_of_range("probability");
            return WithholdRounds{p};
        } catch (const std::exception&) {
            throw MrvError(ErrorCode::InfeasiblePlan, "withhold needs a probability in [0,1]");
        }
    }
    if (kind == "selective") {
        const auto slash = arg.find('/');
        if (slash == std::string_view::npos) {
            throw MrvError(ErrorCode::InfeasiblePlan, "selective needs <favored>/<shunned>");
        }
        return SelectiveParents{parse_creators(arg.substr(0, slash)),
                                parse_creators(arg.substr(slash + 1))};
    }
    if (kind == "conflict") {
        auto targets = parse_creators(arg);
        if (targets.empty()) throw MrvError(ErrorCode::InfeasiblePlan, "conflict needs targets");
        return ConflictInjector{std::move(targets)};
    }
    throw MrvError(ErrorCode::InfeasiblePlan, "unknown strategy '" + std::string(text) + "'");
}

std::string format_strategy(const Strategy& strategy) {
    if (std::holds_alternative<Honest>(strategy)) return "honest";
    if (const auto* w = std::get_if<WithholdRounds>(&strategy)) {
        return "withhold:" + std::to_string(w->probability);
    }
    if (const auto* s = std::get_if<SelectiveParents>(&strategy)) {
        return "selective:" + format_creators(s->favored) + "/" + format_creators(s->shunned);
    }
    return "conflict:" + format_creators(std::get<ConflictInjector>(strategy).targets);
}

namespace {

struct ParentPolicy {
    std::set<std::uint32_t> favored;
    std::set<std::uint32_t> shunned;
    bool byzantine = false;
};

ParentPolicy policy_for(const Strategy& s, Round round) {
    ParentPolicy p;
    if (const auto* sel = std::get_if<SelectiveParents>(&s)) {
        p.byzantine = true;
        for (auto c : sel->favored) p.favored.insert(c.index);
        for (auto c : sel->shunned) p.shunned.insert(c.index);
    } else if (const auto* ci = std::get_if<ConflictInjector>(&s)) {
        p.byzantine = true;
        const auto shun = ci->targets[round % ci->targets.size()].index;
        for (auto c : ci->targets) {
            if (c.index == shun) {
                p.shunned.insert(c.index);
            } else {
                p.favored.insert(c.index);
            }
        }
    } else if (std::holds_alternative<WithholdRounds>(s)) {
        p.byzantine = true;
    }
    return p;
}

std::vector<Digest> choose_parents(const std::vector<AufMeta>& prev, const ParentPolicy& policy,
                                   ParentMode mode, std::uint32_t quorum, SimRng& rng,
                                   CreatorId who, Round round) {
    std::vector<const AufMeta*> favored;
    std::vector<const AufMeta*> neutral;
    std::vector<const AufMeta*> shunned;
    for (const auto& v : prev) {
        if (policy.shunned.count(v.creator.index)) {
            shunned.push_back(&v);
        } else if (policy.favored.count(v.creator.index)) {
            favored.push_back(&v);
        } else {
            neutral.push_back(&v);
        }
    }

    std::vector<const AufMeta*> chosen = favored;
    if (mode == ParentMode::Dense) {
        chosen.insert(chosen.end(), neutral.begin(), neutral.end());
    } else {
        // Partial Fisher-Yates over the neutral pool.
        for (std::size_t i = 0; i < neutral.size() && chosen.size() < quorum; ++i) {
            const auto j = i + rng.below(neutral.size() - i);
            std::swap(neutral[i], neutral[j]);
            chosen.push_back(neutral[i]);
        }
    }
    if (chosen.size() < quorum && policy.byzantine) {
        for (const auto* v : shunned) {
            if (chosen.size() >= quorum) break;
            chosen.push_back(v);
        }
    }
    if (chosen.size() < quorum) {
        throw MrvError(ErrorCode::InfeasiblePlan,
                       "creator " + std::to_string(who.index) + " round " + std::to_string(round) +
                           " sees " + std::to_string(chosen.size()) + " parents, needs " +
                           std::to_string(quorum));
    }
    std::vector<Digest> out;
    for (const auto* v : chosen) out.push_back(v->digest);
    return out;
}

}  // namespace

EventLog generate(const SimPlan& plan) {
    const RunConfig& cfg = plan.config;
    try {
        cfg.validate();
    } catch (const MrvError& e) {
        throw MrvError(ErrorCode::InfeasiblePlan, e.what());
    }
    if (plan.wave_length < 1 || plan.rounds < plan.wave_length) {
        throw MrvError(ErrorCode::InfeasiblePlan, "need wave_length >= 1 and rounds >= wave_length");
    }
    std::uint32_t faulty = 0;
    for (const auto& [c, s] : plan.strategies) {
        if (c >= cfg.n) throw MrvError(ErrorCode::InfeasiblePlan, "strategy for unknown creator");
        if (!std::holds_alternative<Honest>(s)) ++faulty;
        if (const auto* ci = std::get_if<ConflictInjector>(&s); ci && ci->targets.empty()) {
            throw MrvError(ErrorCode::InfeasiblePlan, "conflict strategy without targets");
        }
    }
    if (faulty > cfg.f) {
        throw MrvError(ErrorCode::InfeasiblePlan, std::to_string(faulty) +
                                                      " non-honest creators exceed f=" +
                                                      std::to_string(cfg.f));
    }

    SimRng rng(cfg.seed);
    EventLog log;
    log.config = cfg;
    std::unordered_map<Digest, const AufMeta*> index;
    std::vector<std::vector<AufMeta>> by_round;
    std::unordered_set<Digest> delivered;
    std::uint64_t next_slice = 0;

    auto payload = [&] { return plan.max_payload ? rng.below(plan.max_payload) : 0; };
    const Round last = plan.rounds + cfg.w_max;
    by_round.reserve(last + 1);

    for (Round r = 0; r <= last; ++r) {
        std::vector<AufMeta> current;
        for (std::uint32_t c = 0; c < cfg.n; ++c) {
            const CreatorId who{c};
            if (r == 0) {
                current.push_back(make_vertex(who, 0, {}, payload()));
                continue;
            }
            auto it = plan.strategies.find(c);
            const Strategy strategy = it == plan.strategies.end() ? Strategy{Honest{}} : it->second;
            if (const auto* w = std::get_if<WithholdRounds>(&strategy)) {
                if (rng.unit() < w->probability) continue;
            }
            auto parents = choose_parents(by_round[r - 1], policy_for(strategy, r), plan.parent_mode,
                                          cfg.quorum(), rng, who, r);
            current.push_back(make_vertex(who, r, std::move(parents), payload()));
        }
        by_round.push_back(std::move(current));
        for (const auto& v : by_round.back()) index.emplace(v.digest, &v);
        log.append(RoundCommitted{r, by_round.back()});

        if (r == 0 || r > plan.rounds || r % plan.wave_length != 0) continue;
        const std::uint32_t leader = static_cast<std::uint32_t>((r / plan.wave_length - 1) % cfg.n);
        const AufMeta* anchor = nullptr;
        for (const auto& v : by_round.back()) {
            if (v.creator.index == leader) anchor = &v;
        }
        if (!anchor) continue;  // leader slot empty: no commit this wave

        // Delivered sets are ancestor-closed, so the walk stops at delivered vertices.
        std::vector<const AufMeta*> history{anchor};
        std::unordered_set<Digest> seen{anchor->digest};
        for (std::size_t i = 0; i < history.size(); ++i) {
            for (const auto& p : history[i]->parents) {
                if (delivered.count(p) || !seen.insert(p).second) continue;
                history.push_back(index.at(p));
            }
        }
        std::sort(history.begin(), history.end(), [](const AufMeta* a, const AufMeta* b) {
            return completion_key(*a) < completion_key(*b);
        });
        SliceDelivered slice;
        slice.slice_index = next_slice++;
        for (const auto* v : history) {
            slice.members.push_back(v->digest);
            delivered.insert(v->digest);
        }
        log.append(std::move(slice));
    }
    return log;
}

}  // namespace mrv
