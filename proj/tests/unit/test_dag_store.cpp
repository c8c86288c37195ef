#include "doctest.h"

#include <set>

#include "brute.hpp"
#include "dag_builder.hpp"
#include "mrv/dag_store.hpp"
#include "mrv/error.hpp"
#include "mrv/simulator.hpp"

using namespace mrv;

namespace {

ErrorCode code_of(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const MrvError& e) {
        return e.code();
    }
    FAIL("expected MrvError");
    return ErrorCode::InvalidLog;
}

// Loads all RoundCommitted events of `events` into a fresh store.
DagStore load(const std::vector<ExporterEvent>& events, std::uint32_t n, std::uint32_t min_parents) {
    DagStore store(n, min_parents);
    for (const auto& e : events) {
        if (const auto* rc = std::get_if<RoundCommitted>(&e)) {
            for (const auto& v : rc->canonical) store.insert_vertex(v);
            store.commit_round(rc->round);
        }
    }
    return store;
}

}  // namespace

TEST_CASE("genesis vertex is stored") {
    DagStore store(4, 3);
    const auto g = make_vertex({0}, 0, {});
    const auto id = store.insert_vertex(g);
    CHECK(store.contains(g.digest));
    CHECK(store.meta(id) == g);
    CHECK(store.at({0}, 0) == id);
    CHECK_FALSE(store.frontier());
}

TEST_CASE("insertion errors") {
    test::DagBuilder b(4);
    b.dense();
    b.dense();
    DagStore store = load(b.events(), 4, 3);

    SUBCASE("parent two rounds below") {
        auto v = make_vertex({0}, 3, {b.at(0, 1), b.at(1, 2), b.at(2, 2)});
        CHECK(code_of([&] { store.insert_vertex(v); }) == ErrorCode::BadParentRound);
    }
    SUBCASE("second vertex for a creator and round") {
        auto v = make_vertex({1}, 2, {b.at(0, 1), b.at(1, 1), b.at(2, 1)}, 99);
        CHECK(code_of([&] { store.insert_vertex(v); }) == ErrorCode::DuplicateCreatorRound);
    }
    SUBCASE("missing parent") {
        auto ghost = make_vertex({3}, 2, {}, 7);
        auto v = make_vertex({0}, 3, {ghost.digest, b.at(1, 2), b.at(2, 2)});
        CHECK(code_of([&] { store.insert_vertex(v); }) == ErrorCode::MissingParent);
    }
    SUBCASE("too few parents") {
        auto v = make_vertex({0}, 3, {b.at(1, 2), b.at(2, 2)});
        CHECK(code_of([&] { store.insert_vertex(v); }) == ErrorCode::InsufficientParents);
    }
    SUBCASE("creator out of range") {
        auto v = make_vertex({4}, 3, {b.at(0, 2), b.at(1, 2), b.at(2, 2)});
        CHECK(code_of([&] { store.insert_vertex(v); }) == ErrorCode::UnknownCreator);
    }
    SUBCASE("digest does not match content") {
        auto v = make_vertex({0}, 3, {b.at(0, 2), b.at(1, 2), b.at(2, 2)});
        v.payload_size = 5;
        CHECK(code_of([&] { store.insert_vertex(v); }) == ErrorCode::DigestMismatch);
    }
    SUBCASE("round beyond frontier+1") {
        auto v = make_vertex({0}, 4, {});
        CHECK(code_of([&] { store.insert_vertex(v); }) == ErrorCode::FrontierSkew);
    }
    SUBCASE("genesis with parents") {
        DagStore fresh(4, 3);
        const auto g = make_vertex({0}, 0, {});
        fresh.insert_vertex(g);
        auto v = make_vertex({1}, 0, {g.digest});
        CHECK(code_of([&] { fresh.insert_vertex(v); }) == ErrorCode::BadParentRound);
    }
    SUBCASE("commit out of order") {
        CHECK(code_of([&] { store.commit_round(5); }) == ErrorCode::FrontierSkew);
    }
}

TEST_CASE("ancestry basics") {
    test::DagBuilder b(4);
    b.add(0, {0, 1, 2});
    b.add(1, {1, 2, 3});
    b.close();
    const DagStore store = load(b.events(), 4, 3);
    CHECK(store.is_ancestor(b.at(0, 1), b.at(0, 1)));
    CHECK(store.is_ancestor(b.at(0, 0), b.at(0, 1)));
    CHECK_FALSE(store.is_ancestor(b.at(3, 0), b.at(0, 1)));
    CHECK_FALSE(store.is_ancestor(b.at(0, 1), b.at(1, 1)));
    CHECK_FALSE(store.is_ancestor(b.at(1, 1), b.at(0, 1)));
    CHECK_FALSE(store.is_ancestor(b.at(0, 1), b.at(0, 0)));
}

TEST_CASE("bounded ancestors") {
    SUBCASE("floor at own round") {
        test::DagBuilder b(4);
        b.dense();
        const DagStore store = load(b.events(), 4, 3);
        CHECK(store.bounded_ancestors(b.at(2, 1), 1) == std::vector<Digest>{b.at(2, 1)});
    }
    SUBCASE("chain of five, floor two below start") {
        test::DagBuilder b(1);
        for (int r = 1; r < 5; ++r) {
            b.add(0, {0});
            b.close();
        }
        const DagStore store = load(b.events(), 1, 1);
        const auto got = store.bounded_ancestors(b.at(0, 4), 2);
        CHECK(got.size() == 3);
        CHECK(std::set<Digest>(got.begin(), got.end()) ==
              std::set<Digest>{b.at(0, 4), b.at(0, 3), b.at(0, 2)});
    }
    SUBCASE("diamond counts the grandparent once") {
        test::DagBuilder b(2, false);
        b.add_at(0, 0, {});
        b.close();
        b.add(0, {0});
        b.add(1, {0});
        b.close();
        b.add(0, {0, 1});
        b.close();
        const DagStore store = load(b.events(), 2, 1);
        const auto got = store.bounded_ancestors(b.at(0, 2), 0);
        CHECK(got.size() == 4);
        CHECK(std::is_sorted(got.begin(), got.end()));
    }
}

TEST_CASE("digest ignores parent order") {
    const auto a = make_vertex({0}, 0, {}, 1).digest;
    const auto b = make_vertex({1}, 0, {}, 1).digest;
    const auto c = make_vertex({2}, 0, {}, 1).digest;
    const std::vector<Digest> p1{a, b, c};
    const std::vector<Digest> p2{c, a, b};
    std::vector<Digest> sorted = p2;
    std::sort(sorted.begin(), sorted.end());
    CHECK(compute_digest({3}, 1, p1, 4) == compute_digest({3}, 1, sorted, 4));
    CHECK(make_vertex({3}, 1, p2, 4).digest == make_vertex({3}, 1, p1, 4).digest);
    CHECK(make_vertex({3}, 1, p1, 4).digest != make_vertex({3}, 1, p1, 5).digest);
    CHECK(Digest::from_hex(a.hex()) == a);
}

TEST_CASE("ancestry agrees with naive recursion on generated DAGs") {
    for (std::uint64_t seed = 1; seed <= 25; ++seed) {
        SimPlan plan;
        plan.config = RunConfig{4, 1, 2, seed};
        plan.rounds = 6;
        plan.wave_length = 3;
        plan.parent_mode = seed % 2 ? ParentMode::Sparse : ParentMode::Dense;
        if (seed % 3 == 0) plan.strategies[3] = WithholdRounds{0.5};
        const auto log = generate(plan);
        const test::BruteDag brute(log.events);
        const DagStore store = load(log.events, 4, 3);
        REQUIRE(store.size() <= 50);
        for (const auto& [b, vb] : brute.vertices) {
            const auto closure = brute.closure(b);
            const auto bounded = store.bounded_ancestors(b, 0);
            CHECK(std::set<Digest>(bounded.begin(), bounded.end()) == closure);
            for (const auto& [a, va] : brute.vertices) {
                const bool anc = store.is_ancestor(a, b);
                CHECK(anc == (closure.count(a) != 0));
                if (anc && a != b) {
                    CHECK(va.round < vb.round);
                    CHECK_FALSE(store.is_ancestor(b, a));
                }
            }
        }
    }
}
