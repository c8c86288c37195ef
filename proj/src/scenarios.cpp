#include <algorithm>
#include <functional>
#include <map>

#include "mrv/error.hpp"
#include "mrv/simulator.hpp"

namespace mrv {

namespace {

// Builds a log round by round. Parents are named by creator and refer to the
// previous round.
class FixtureBuilder {
public:
    explicit FixtureBuilder(RunConfig config) : config_(config) {
        log_.config = config;
        std::vector<AufMeta> genesis;
        for (std::uint32_t c = 0; c < config.n; ++c) genesis.push_back(make_vertex({c}, 0, {}));
        commit(std::move(genesis));
    }

    /// Adds a vertex for `creator` at the next round.
    void add(std::uint32_t creator, std::vector<std::uint32_t> parents) {
        std::vector<Digest> ds;
        for (auto p : parents) ds.push_back(at(p, round_));
        pending_.push_back(make_vertex({creator}, round_ + 1, std::move(ds)));
    }

    /// Round where every creator references every previous-round vertex.
    void dense_round() {
        std::vector<std::uint32_t> all;
        for (const auto& [key, d] : vertices_) {
            if (key.first == round_) all.push_back(key.second);
        }
        for (std::uint32_t c = 0; c < config_.n; ++c) add(c, all);
        close_round();
    }

    void close_round() {
        std::sort(pending_.begin(), pending_.end(),
                  [](const AufMeta& a, const AufMeta& b) { return a.creator < b.creator; });
        commit(std::move(pending_));
        pending_.clear();
    }

    Digest at(std::uint32_t creator, Round round) const { return vertices_.at({round, creator}); }

    void deliver(std::vector<Digest> members) {
        std::map<Digest, CompletionKey> keys;
        for (const auto& [key, d] : vertices_) {
            keys.emplace(d, CompletionKey{key.first, CreatorId{key.second}, d});
        }
        std::sort(members.begin(), members.end(),
                  [&](const Digest& a, const Digest& b) { return keys.at(a) < keys.at(b); });
        log_.append(SliceDelivered{next_slice_++, std::move(members)});
    }

    EventLog take() { return std::move(log_); }

private:
    void commit(std::vector<AufMeta> vertices) {
        const Round r = log_.events.empty() ? 0 : round_ + 1;
        for (const auto& v : vertices) vertices_[{r, v.creator.index}] = v.digest;
        log_.append(RoundCommitted{r, std::move(vertices)});
        round_ = r;
    }

    RunConfig config_;
    EventLog log_;
    Round round_ = 0;
    std::vector<AufMeta> pending_;
    std::map<std::pair<Round, std::uint32_t>, Digest> vertices_;
    std::uint64_t next_slice_ = 0;
};

RunConfig make_config(std::uint32_t n, std::uint32_t f, std::uint32_t w_max) {
    RunConfig c;
    c.n = n;
    c.f = f;
    c.w_max = w_max;
    return c;
}

Scenario finish(std::string name, std::string description, FixtureBuilder& b, RunConfig config,
                std::map<std::string, Digest> roles) {
    std::vector<Digest> members;
    for (const auto& [role, d] : roles) members.push_back(d);
    b.deliver(members);
    return Scenario{std::move(name), std::move(description), config, b.take(), std::move(roles)};
}

Scenario empty_window() {
    const auto cfg = make_config(4, 0, 2);
    FixtureBuilder b(cfg);
    b.dense_round();
    b.add(0, {0, 1, 2, 3});
    b.add(1, {1, 2, 3});  // B does not see A
    b.add(2, {0, 1, 2, 3});
    b.add(3, {0, 1, 2, 3});
    b.close_round();
    b.dense_round();
    return finish("empty-window", "both AUFs mature at birth, so the comparison window is empty", b,
                  cfg, {{"A", b.at(0, 1)}, {"B", b.at(1, 2)}});
}

Scenario exact_f_delta() {
    const auto cfg = make_config(4, 1, 3);
    FixtureBuilder b(cfg);
    b.dense_round();
    b.add(0, {0, 1, 2, 3});
    b.add(1, {0, 1, 2, 3});
    b.add(2, {1, 2, 3});  // misses A
    b.add(3, {0, 1, 2, 3});
    b.close_round();
    b.dense_round();
    return finish("exact-f-delta", "visibility difference of exactly f, one short of the margin", b,
                  cfg, {{"A", b.at(0, 1)}, {"B", b.at(1, 1)}});
}

Scenario conflict() {
    const auto cfg = make_config(6, 1, 4);
    FixtureBuilder b(cfg);
    b.dense_round();
    // Round 2: A seen by creators 0, 2, 3; B only by creator 1.
    b.add(0, {0, 2, 3});
    b.add(1, {1, 2, 3});
    b.add(2, {0, 2, 4});
    b.add(3, {0, 3, 4});
    b.add(4, {2, 3, 4});
    b.add(5, {3, 4, 5});
    b.close_round();
    // Round 3: B reaches creators 1, 4, 5 while A falls back to creator 0.
    b.add(0, {0, 2, 3});
    b.add(1, {1, 4, 5});
    b.add(4, {1, 4, 5});
    b.add(5, {1, 4, 5});
    b.close_round();
    b.add(0, {0, 1, 4, 5});
    b.add(1, {0, 1, 4, 5});
    b.add(4, {0, 1, 4, 5});
    b.add(5, {0, 1, 4, 5});
    b.close_round();
    return finish("conflict", "each AUF leads by the margin in a different round", b, cfg,
                  {{"A", b.at(0, 1)}, {"B", b.at(1, 1)}});
}

Scenario immature() {
    const auto cfg = make_config(4, 1, 2);
    FixtureBuilder b(cfg);
    b.dense_round();
    b.add(0, {0, 1, 2});
    b.add(1, {0, 1, 2});
    b.add(2, {0, 1, 2});
    b.add(3, {0, 1, 3});
    b.close_round();
    b.add(0, {0, 1, 2});
    b.add(1, {0, 1, 2});
    b.add(2, {0, 1, 2});
    b.add(3, {0, 1, 3});
    b.close_round();
    return finish("immature", "X never reaches a quorum and hits the window cap", b, cfg,
                  {{"X", b.at(3, 1)}, {"Y", b.at(0, 1)}});
}

Scenario svp_vs_causal() {
    const auto cfg = make_config(10, 1, 4);
    FixtureBuilder b(cfg);
    b.dense_round();
    // B = c0_1, C = c1_1. A = c0_2 is a child of B.
    b.add(0, {0, 2, 3});
    b.add(1, {0, 2, 3});
    b.add(2, {0, 4, 5});
    b.add(3, {1, 2, 3});
    b.add(4, {1, 3, 4});
    b.add(5, {1, 4, 5});
    b.add(6, {1, 5, 6});
    b.add(7, {1, 6, 7});
    b.add(8, {6, 7, 8});
    b.add(9, {7, 8, 9});
    b.close_round();
    b.add(0, {0, 8, 9});
    b.add(1, {0, 8, 9});
    b.add(2, {0, 8, 9});
    b.add(3, {3, 4, 5});
    b.close_round();
    b.dense_round();
    return finish("svp-vs-causal", "svp edges close a cycle through a causal edge", b, cfg,
                  {{"A", b.at(0, 2)}, {"B", b.at(0, 1)}, {"C", b.at(1, 1)}});
}

Scenario three_cycle() {
    const auto cfg = make_config(10, 1, 4);
    FixtureBuilder b(cfg);
    b.dense_round();
    // A = c0_1, B = c1_1, C = c2_1. Counts A:3,2,1  B:1,3,2  C:2,1,3.
    for (std::uint32_t c : {0u, 1u, 2u}) b.add(c, {0, 3, 4});
    b.add(3, {1, 3, 4});
    for (std::uint32_t c : {4u, 5u}) b.add(c, {2, 3, 4});
    for (std::uint32_t c : {6u, 7u, 8u, 9u}) b.add(c, {3, 4, 5});
    b.close_round();
    b.add(0, {0, 6, 7});
    b.add(1, {1, 6, 7});
    for (std::uint32_t c : {2u, 3u, 4u}) b.add(c, {3, 6, 7});
    b.add(5, {4, 6, 7});
    for (std::uint32_t c : {6u, 7u, 8u, 9u}) b.add(c, {6, 7, 8});
    b.close_round();
    b.add(0, {0, 6, 7});
    for (std::uint32_t c : {1u, 2u}) b.add(c, {2, 6, 7});
    for (std::uint32_t c : {3u, 4u, 5u}) b.add(c, {5, 6, 7});
    for (std::uint32_t c : {6u, 7u, 8u, 9u}) b.add(c, {6, 7, 8});
    b.close_round();
    return finish("three-cycle", "three pairwise edges forming a directed cycle", b, cfg,
                  {{"A", b.at(0, 1)}, {"B", b.at(1, 1)}, {"C", b.at(2, 1)}});
}

Scenario coexistence_lead() {
    const auto cfg = make_config(4, 1, 3);
    FixtureBuilder b(cfg);
    b.dense_round();
    b.add(0, {0, 1, 2, 3});
    b.add(1, {0, 1, 2, 3});
    b.add(2, {0, 1, 2, 3});
    b.add(3, {1, 2, 3});  // B avoids A
    b.close_round();
    b.dense_round();
    return finish("coexistence-lead", "a margin lead that exists only at the coexistence round", b,
                  cfg, {{"A", b.at(0, 1)}, {"B", b.at(3, 2)}});
}

const std::vector<std::pair<std::string, std::function<Scenario()>>>& catalog() {
    static const std::vector<std::pair<std::string, std::function<Scenario()>>> entries{
        {"empty-window", empty_window}, {"exact-f-delta", exact_f_delta},
        {"conflict", conflict},         {"immature", immature},
        {"svp-vs-causal", svp_vs_causal}, {"three-cycle", three_cycle},
        {"coexistence-lead", coexistence_lead},
    };
    return entries;
}

}  // namespace

std::vector<std::string> scenario_names() {
    std::vector<std::string> out;
    for (const auto& [name, fn] : catalog()) out.push_back(name);
    return out;
}

Scenario targeted_scenario(std::string_view name) {
    for (const auto& [n, fn] : catalog()) {
        if (n == name) return fn();
    }
    throw MrvError(ErrorCode::UnknownScenario, std::string(name));
}

}  // namespace mrv
