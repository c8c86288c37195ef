#include "doctest.h"

#include "dag_builder.hpp"
#include "mrv/engine.hpp"
#include "mrv/error.hpp"
#include "mrv/simulator.hpp"

using namespace mrv;

TEST_CASE("empty stream gives zeroed metrics") {
    const auto run = run_engine({}, RunConfig{});
    CHECK(run.orders.empty());
    CHECK(run.metrics.to_record() == RunMetrics{}.to_record());
    CHECK(run.metrics.invariants_hold());
}

TEST_CASE("sealing is gated by the frontier and slice order") {
    test::DagBuilder b(4);
    b.dense();
    b.dense();
    OrderingEngine engine(RunConfig{4, 1, 3, 0});
    const auto& ev = b.events();
    CHECK(engine.apply(ev[0]).empty());
    CHECK(engine.apply(ev[1]).empty());
    // Both slices hold round-1 AUFs, which settle at round 2.
    CHECK(engine.apply(SliceDelivered{0, {b.at(0, 1)}}).empty());
    CHECK(engine.apply(SliceDelivered{1, {b.at(1, 1), b.at(2, 1)}}).empty());
    CHECK(engine.pending_slices() == 2);
    const auto sealed = engine.apply(ev[2]);
    REQUIRE(sealed.size() == 2);
    CHECK(sealed[0].slice_index == 0);
    CHECK(sealed[1].slice_index == 1);
    CHECK(sealed[1].ordered == std::vector<Digest>{b.at(1, 1), b.at(2, 1)});
    CHECK(engine.pending_slices() == 0);
    CHECK(engine.metrics().slices_sealed == 2);
}

TEST_CASE("a ready slice waits behind an earlier unready one") {
    test::DagBuilder b(4);
    for (int i = 0; i < 4; ++i) b.dense();
    OrderingEngine engine(RunConfig{4, 1, 3, 0});
    const auto& ev = b.events();
    engine.apply(ev[0]);
    engine.apply(ev[1]);
    engine.apply(ev[2]);
    engine.apply(SliceDelivered{0, {b.at(0, 2)}});  // settles at round 3
    engine.apply(SliceDelivered{1, {b.at(0, 1)}});  // already settled at round 2
    CHECK(engine.pending_slices() == 2);
    const auto sealed = engine.apply(ev[3]);
    REQUIRE(sealed.size() == 2);
    CHECK(sealed[0].slice_index == 0);
    CHECK(engine.apply(ev[4]).empty());  // nothing re-emitted
}

TEST_CASE("sealed slices release their state") {
    test::DagBuilder b(4);
    b.dense();
    OrderingEngine engine(RunConfig{4, 1, 2, 0});
    for (const auto& e : b.events()) engine.apply(e);
    const auto before = engine.visibility().active_size();
    engine.apply(SliceDelivered{0, {b.at(0, 0), b.at(1, 0), b.at(2, 0), b.at(3, 0)}});
    CHECK(engine.pending_slices() == 0);
    CHECK(engine.visibility().active_size() == before - 4);
}

TEST_CASE("skewed rounds are rejected") {
    test::DagBuilder b(4);
    b.dense();
    b.dense();
    OrderingEngine engine(RunConfig{});
    engine.apply(b.events()[0]);
    try {
        engine.apply(b.events()[2]);
        FAIL("expected FrontierSkew");
    } catch (const MrvError& e) {
        CHECK(e.code() == ErrorCode::FrontierSkew);
    }
}

TEST_CASE("restart from a prefix reproduces the same output") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        SimPlan plan;
        plan.config = RunConfig{7, 2, 4, seed};
        plan.rounds = 8;
        plan.parent_mode = ParentMode::Sparse;
        plan.strategies[5] = WithholdRounds{0.3};
        plan.strategies[6] = ConflictInjector{{CreatorId{0}, CreatorId{1}}};
        const auto log = generate(plan);
        const auto full = run_engine(log.events, plan.config);
        CHECK(full.metrics.invariants_hold());

        const std::size_t cut = log.events.size() / 2;
        OrderingEngine first(plan.config);
        for (std::size_t i = 0; i < cut; ++i) first.apply(log.events[i]);
        OrderingEngine resumed(plan.config);
        std::vector<SliceOrder> out;
        for (std::size_t i = 0; i < log.events.size(); ++i) {
            auto sealed = resumed.apply(log.events[i]);
            out.insert(out.end(), sealed.begin(), sealed.end());
        }
        CHECK(encode_order_log(plan.config, out) == encode_order_log(plan.config, full.orders));
        CHECK(resumed.metrics().to_record() == full.metrics.to_record());
    }
}
