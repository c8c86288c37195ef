#include "doctest.h"

#include <cmath>

#include "mrv/bench.hpp"

using namespace mrv;

TEST_CASE("pair counts are k(k-1)/2") {
    const auto rows = scaling_bench({8, 16}, 1);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].pair_evaluations == 28);
    CHECK(rows[1].pair_evaluations == 120);
}

TEST_CASE("log-log slope") {
    std::vector<double> x, quad, pairs;
    for (double k = 1024; k <= 1 << 20; k *= 2) {
        x.push_back(k);
        quad.push_back(3 * k * k);
        pairs.push_back(k * (k - 1) / 2);
    }
    CHECK(loglog_slope(x, quad) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(loglog_slope(x, pairs) == doctest::Approx(2.0).epsilon(1e-3));
}

TEST_CASE("bench log holds exactly one slice of the requested size") {
    RunConfig cfg{10, 3, 10, 0};
    const auto log = bench_log(25, cfg);
    std::size_t slices = 0;
    for (const auto& e : log.events) {
        if (const auto* s = std::get_if<SliceDelivered>(&e)) {
            ++slices;
            CHECK(s->members.size() == 25);
        }
    }
    CHECK(slices == 1);
}
