#include "doctest.h"

#include <algorithm>
#include <map>
#include <set>

#include "dag_builder.hpp"
#include "mrv/error.hpp"
#include "mrv/linearizer.hpp"
#include "mrv/oracle.hpp"
#include "mrv/simulator.hpp"

using namespace mrv;

namespace {

// k vertices with strictly increasing completion keys.
PrecedenceGraph graph_of(std::uint32_t k, std::vector<LocalEdge> causal, std::vector<LocalEdge> svp) {
    PrecedenceGraph g;
    for (std::uint32_t i = 0; i < k; ++i) {
        const auto v = make_vertex({i % 4}, i / 4, {}, i);
        g.vertices.push_back(v.digest);
        g.keys.push_back(completion_key(v));
    }
    std::sort(causal.begin(), causal.end());
    std::sort(svp.begin(), svp.end());
    g.causal_edges = std::move(causal);
    g.svp_edges = std::move(svp);
    return g;
}

std::vector<std::uint32_t> positions(const PrecedenceGraph& g, const SliceOrder& order) {
    std::vector<std::uint32_t> out;
    for (const auto& d : order.ordered) {
        out.push_back(static_cast<std::uint32_t>(
            std::find(g.vertices.begin(), g.vertices.end(), d) - g.vertices.begin()));
    }
    return out;
}

OracleGraph oracle_graph(const PrecedenceGraph& g) {
    OracleGraph og;
    og.keys = g.keys;
    for (auto [u, v] : g.causal_edges) og.causal.emplace_back(u, v);
    for (auto [u, v] : g.svp_edges) og.svp.emplace_back(u, v);
    return og;
}

VisibilityProfile settled(Round h) {
    VisibilityProfile p;
    p.stopping_time = h;
    p.mature = true;
    return p;
}

}  // namespace

TEST_CASE("slice sealing time") {
    auto a = settled(3), b = settled(5), c = settled(4);
    std::vector<const VisibilityProfile*> one{&a};
    std::vector<const VisibilityProfile*> three{&a, &b, &c};
    CHECK(slice_sealing_time(one) == 3);
    CHECK(slice_sealing_time(three) == 5);
    c.stopping_time.reset();
    CHECK_THROWS_AS(slice_sealing_time(three), MrvError);
}

TEST_CASE("condense and linearize examples") {
    SUBCASE("edgeless graph keeps kappa order") {
        const auto g = graph_of(3, {}, {});
        const auto o = condense_and_linearize(g, 7);
        CHECK(o.slice_index == 7);
        CHECK(positions(g, o) == std::vector<std::uint32_t>{0, 1, 2});
        CHECK(o.enforceable_svp.empty());
    }
    SUBCASE("svp three-cycle collapses to kappa order") {
        const auto g = graph_of(3, {}, {{0, 1}, {1, 2}, {2, 0}});
        const auto o = condense_and_linearize(g, 0);
        CHECK(positions(g, o) == std::vector<std::uint32_t>{0, 1, 2});
        CHECK(o.enforceable_svp.empty());
    }
    SUBCASE("causal edge dominates an opposing svp edge") {
        // B = 0 is an ancestor of A = 1; svp claims A before B.
        const auto g = graph_of(2, {{0, 1}}, {{1, 0}});
        const auto o = condense_and_linearize(g, 0);
        CHECK(positions(g, o) == std::vector<std::uint32_t>{0, 1});
        CHECK(o.enforceable_svp.empty());
    }
    SUBCASE("svp edge against kappa is enforced") {
        const auto g = graph_of(3, {}, {{2, 0}});
        const auto o = condense_and_linearize(g, 0);
        CHECK(positions(g, o) == std::vector<std::uint32_t>{1, 2, 0});
        CHECK(o.enforceable_svp == std::vector<std::pair<Digest, Digest>>{{g.vertices[2], g.vertices[0]}});
    }
    SUBCASE("smaller kappa-min component is emitted first") {
        // Components {1,3} (cycle) and {2}; 0 is free. Component {1,3} has min 1 < 2.
        const auto g = graph_of(4, {}, {{1, 3}, {3, 1}});
        const auto o = condense_and_linearize(g, 0);
        CHECK(positions(g, o) == std::vector<std::uint32_t>{0, 1, 3, 2});
    }
    SUBCASE("inside a component causal order comes first") {
        // Cycle 0 -> 2 -> 1 -> 0 where 2 -> 1 is causal.
        const auto g = graph_of(3, {{2, 1}}, {{0, 2}, {1, 0}});
        const auto o = condense_and_linearize(g, 0);
        CHECK(positions(g, o) == std::vector<std::uint32_t>{0, 2, 1});
    }
    SUBCASE("empty slice") {
        CHECK(condense_and_linearize(graph_of(0, {}, {}), 3).ordered.empty());
    }
}

TEST_CASE("random graphs match exhaustive enumeration") {
    SimRng rng(7);
    for (int iter = 0; iter < 1500; ++iter) {
        const auto k = static_cast<std::uint32_t>(1 + rng.below(8));
        std::vector<LocalEdge> causal, svp;
        for (std::uint32_t u = 0; u < k; ++u) {
            for (std::uint32_t v = u + 1; v < k; ++v) {
                const auto roll = rng.below(10);
                if (roll < 2) causal.emplace_back(u, v);
                if (roll >= 2 && roll < 4) svp.emplace_back(u, v);
                if (roll >= 4 && roll < 6) svp.emplace_back(v, u);
                if (roll == 1 && rng.below(2)) svp.emplace_back(v, u);
            }
        }
        const auto g = graph_of(k, causal, svp);
        const auto o = condense_and_linearize(g, 0);
        const auto pos = positions(g, o);
        const auto og = oracle_graph(g);

        std::vector<std::size_t> expect = oracle_order_exhaustive(og);
        CHECK(std::vector<std::size_t>(pos.begin(), pos.end()) == expect);
        CHECK(oracle_order_greedy(og) == expect);

        // Permutation, causal consistency, enforceable edges respected.
        CHECK(std::set<std::uint32_t>(pos.begin(), pos.end()).size() == k);
        std::vector<std::size_t> at(k);
        for (std::size_t i = 0; i < k; ++i) at[pos[i]] = i;
        for (auto [u, v] : causal) CHECK(at[u] < at[v]);

        std::uint32_t count = 0;
        std::vector<LocalEdge> all = causal;
        all.insert(all.end(), svp.begin(), svp.end());
        const auto comp = strongly_connected_components(k, all, &count);
        const auto ref = oracle_components(og);
        for (std::uint32_t u = 0; u < k; ++u) {
            for (std::uint32_t v = 0; v < k; ++v) CHECK((comp[u] == comp[v]) == (ref[u] == ref[v]));
        }
        std::size_t enforceable = 0;
        for (auto [u, v] : svp) {
            if (ref[u] != ref[v]) {
                ++enforceable;
                CHECK(at[u] < at[v]);
            }
        }
        CHECK(o.enforceable_svp.size() == enforceable);
    }
}

TEST_CASE("precedence graph from a store") {
    // A = c0_2 has B = c0_1 as a parent; C = c1_1 is unrelated to B.
    test::DagBuilder b(4);
    b.dense();
    b.add(0, {0, 2, 3});
    b.add(1, {1, 2, 3});
    b.add(2, {1, 2, 3});
    b.add(3, {1, 2, 3});
    b.close();
    DagStore store(4, 3);
    for (const auto& e : b.events()) {
        const auto& rc = std::get<RoundCommitted>(e);
        for (const auto& v : rc.canonical) store.insert_vertex(v);
        store.commit_round(rc.round);
    }
    const auto B = store.id_of(b.at(0, 1));
    const auto C = store.id_of(b.at(1, 1));
    const auto A = store.id_of(b.at(0, 2));
    std::vector<VertexId> members{B, C, A};

    auto record = [&](std::uint32_t i, std::uint32_t j, std::optional<Verdict> v) {
        PairRecord r;
        r.a = store.meta(members[i]).digest;
        r.b = store.meta(members[j]).digest;
        r.a_index = i;
        r.b_index = j;
        r.verdict = v;
        return r;
    };

    SUBCASE("abstentions leave only causal edges") {
        std::vector<PairRecord> pairs{record(0, 1, Verdict::AbstainNoSignal),
                                      record(0, 2, Verdict::AbstainNoSignal),
                                      record(1, 2, Verdict::AbstainTruncated)};
        const auto g = build_precedence_graph(store, members, pairs);
        CHECK(g.causal_edges == std::vector<LocalEdge>{{0, 2}});
        CHECK(g.svp_edges.empty());
    }
    SUBCASE("edge verdicts are mirrored") {
        std::vector<PairRecord> pairs{record(0, 1, Verdict::EdgeForward),
                                      record(0, 2, Verdict::AbstainNoSignal),
                                      record(1, 2, Verdict::EdgeBackward)};
        const auto g = build_precedence_graph(store, members, pairs);
        CHECK(g.svp_edges == std::vector<LocalEdge>{{0, 1}, {2, 1}});
    }
    SUBCASE("unfrozen pair") {
        std::vector<PairRecord> pairs{record(0, 1, std::nullopt)};
        try {
            build_precedence_graph(store, members, pairs);
            FAIL("expected UnfrozenPair");
        } catch (const MrvError& e) {
            CHECK(e.code() == ErrorCode::UnfrozenPair);
        }
    }
}
