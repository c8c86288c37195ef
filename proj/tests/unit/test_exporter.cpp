#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "dag_builder.hpp"
#include "mrv/error.hpp"
#include "mrv/exporter.hpp"
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

RoundCommitted genesis(std::uint32_t n) {
    RoundCommitted rc{0, {}};
    for (std::uint32_t c = 0; c < n; ++c) rc.canonical.push_back(make_vertex({c}, 0, {}));
    return rc;
}

EventLog small_log() {
    test::DagBuilder b(4);
    b.dense();
    b.deliver({b.at(0, 0), b.at(1, 0)});
    EventLog log;
    for (const auto& e : b.events()) log.append(e);
    return log;
}

}  // namespace

TEST_CASE("append enforces the stream contract") {
    test::DagBuilder b(4);
    b.dense();
    b.dense();
    const auto& ev = b.events();

    SUBCASE("consecutive rounds") {
        EventLog log;
        log.append(ev[0]);
        log.append(ev[1]);
        CHECK(log.events.size() == 2);
    }
    SUBCASE("round gap") {
        EventLog log;
        log.append(ev[0]);
        CHECK(code_of([&] { log.append(ev[2]); }) == ErrorCode::NonConsecutiveRound);
    }
    SUBCASE("first round must be zero") {
        EventLog log;
        CHECK(code_of([&] { log.append(ev[1]); }) == ErrorCode::NonConsecutiveRound);
    }
    SUBCASE("slice reusing a member") {
        EventLog log;
        for (const auto& e : ev) log.append(e);
        log.append(SliceDelivered{0, {b.at(0, 1)}});
        CHECK(code_of([&] { log.append(SliceDelivered{1, {b.at(1, 1), b.at(0, 1)}}); }) ==
              ErrorCode::DuplicateSliceMember);
    }
    SUBCASE("slice member not committed yet") {
        EventLog log;
        log.append(ev[0]);
        CHECK(code_of([&] { log.append(SliceDelivered{0, {b.at(0, 1)}}); }) ==
              ErrorCode::UnknownSliceMember);
    }
    SUBCASE("slice index gap") {
        EventLog log;
        log.append(ev[0]);
        CHECK(code_of([&] { log.append(SliceDelivered{1, {b.at(0, 0)}}); }) ==
              ErrorCode::NonConsecutiveSlice);
    }
    SUBCASE("creators out of order") {
        auto rc = genesis(4);
        std::swap(rc.canonical[0], rc.canonical[1]);
        EventLog log;
        CHECK(code_of([&] { log.append(rc); }) == ErrorCode::NonCanonicalRound);
    }
}

TEST_CASE("replay") {
    SUBCASE("empty") { CHECK(replay("").empty()); }
    SUBCASE("three events replayed twice") {
        const auto bytes = small_log().to_bytes();
        const auto first = replay(bytes);
        CHECK(first.size() == 3);
        CHECK(first == replay(bytes));
    }
    SUBCASE("any flipped byte is detected") {
        const auto bytes = small_log().to_bytes();
        for (std::size_t i = 0; i < bytes.size(); ++i) {
            auto bad = bytes;
            bad[i] = static_cast<char>(bad[i] ^ 0x01);
            CHECK(code_of([&] { replay(bad); }) == ErrorCode::CorruptLog);
        }
    }
    SUBCASE("truncated log") {
        const auto bytes = small_log().to_bytes();
        CHECK(code_of([&] { replay(bytes.substr(0, bytes.size() - 3)); }) == ErrorCode::CorruptLog);
    }
    SUBCASE("well-framed garbage") {
        CHECK(code_of([&] { replay(frame_record("{not json")); }) == ErrorCode::InvalidLog);
        CHECK(code_of([&] { replay(frame_record("{\"kind\":\"bogus\"}")); }) == ErrorCode::InvalidLog);
    }
}

TEST_CASE("records are canonical text") {
    const auto bytes = small_log().to_bytes();
    CHECK(bytes.find('.') == std::string::npos);  // no floating point
    std::istringstream in(bytes);
    std::string line;
    while (std::getline(in, line)) {
        const auto sp = line.find(' ');
        const auto last = line.rfind(' ');
        const auto len = std::stoul(line.substr(0, sp));
        CHECK(len == last - sp - 1);
        CHECK(line.size() - last - 1 == 8);
    }
}

TEST_CASE("round trip and prefix validity on generated logs") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        SimPlan plan;
        plan.config = RunConfig{7, 2, 3, seed};
        plan.rounds = 6;
        plan.parent_mode = seed % 2 ? ParentMode::Sparse : ParentMode::Dense;
        plan.strategies[6] = ConflictInjector{{CreatorId{0}, CreatorId{1}}};
        const auto log = generate(plan);
        for (const auto& e : log.events) CHECK(decode_event(encode_event(e)) == e);
        const auto bytes = log.to_bytes();
        CHECK(EventLog::from_bytes(bytes) == log);
        CHECK(EventLog::from_bytes(bytes).to_bytes() == bytes);
        EventLog prefix;
        prefix.config = log.config;
        for (const auto& e : log.events) {
            prefix.append(e);
            CHECK(EventLog::from_bytes(prefix.to_bytes()) == prefix);
        }
    }
}

TEST_CASE("file writer matches in-memory serialization") {
    const auto log = small_log();
    const auto path = std::filesystem::temp_directory_path() / "mrv_writer_test.log";
    {
        LogWriter w(path);
        for (const auto& e : log.events) w.append(e);
    }
    std::ifstream in(path, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    CHECK(ss.str() == log.to_bytes());
    CHECK(EventLog::load(path) == log);
    std::filesystem::remove(path);
}

TEST_CASE("order log round trip") {
    const auto a = make_vertex({0}, 0, {}).digest;
    const auto b = make_vertex({1}, 0, {}).digest;
    std::vector<SliceOrder> orders{{0, {a, b}, {{a, b}}}, {1, {}, {}}};
    const RunConfig cfg{4, 1, 3, 9};
    CHECK(decode_order_log(encode_order_log(cfg, orders)) == orders);
    CHECK(decode_slice_order(encode_slice_order(orders[0])) == orders[0]);
}
