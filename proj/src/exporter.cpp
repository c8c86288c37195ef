#include "mrv/exporter.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <sstream>

#include <zlib.h>

#include "json.hpp"
#include "mrv/error.hpp"

namespace mrv {

using nlohmann::json;

// ----------------------------------------------------------------------------
// Stream validation
// ----------------------------------------------------------------------------

void StreamValidator::check(const ExporterEvent& event) const {
    if (const auto* rc = std::get_if<RoundCommitted>(&event)) {
        const Round expected = frontier_ ? *frontier_ + 1 : 0;
        if (rc->round != expected) {
            throw MrvError(ErrorCode::NonConsecutiveRound,
                           "got round " + std::to_string(rc->round) + ", expected " +
                               std::to_string(expected));
        }
        for (std::size_t i = 0; i < rc->canonical.size(); ++i) {
            const auto& v = rc->canonical[i];
            if (v.round != rc->round) {
                throw MrvError(ErrorCode::NonCanonicalRound, "vertex of round " +
                                                                 std::to_string(v.round) +
                                                                 " in round " +
                                                                 std::to_string(rc->round));
            }
            if (i > 0 && !(rc->canonical[i - 1].creator < v.creator)) {
                throw MrvError(ErrorCode::NonCanonicalRound,
                               "canonical vertices must be strictly ordered by creator");
            }
            if (!std::is_sorted(v.parents.begin(), v.parents.end())) {
                throw MrvError(ErrorCode::NonCanonicalRound, "parent digests must be sorted");
            }
        }
        return;
    }
    const auto& sd = std::get<SliceDelivered>(event);
    if (sd.slice_index != next_slice_) {
        throw MrvError(ErrorCode::NonConsecutiveSlice, "got slice " + std::to_string(sd.slice_index) +
                                                           ", expected " +
                                                           std::to_string(next_slice_));
    }
    std::unordered_set<Digest> local;
    for (const auto& m : sd.members) {
        if (delivered_.count(m) || !local.insert(m).second) {
            throw MrvError(ErrorCode::DuplicateSliceMember, m.hex());
        }
        if (!committed_.count(m)) throw MrvError(ErrorCode::UnknownSliceMember, m.hex());
    }
}

void StreamValidator::apply(const ExporterEvent& event) {
    check(event);
    if (const auto* rc = std::get_if<RoundCommitted>(&event)) {
        frontier_ = rc->round;
        for (const auto& v : rc->canonical) committed_.insert(v.digest);
    } else {
        const auto& sd = std::get<SliceDelivered>(event);
        ++next_slice_;
        for (const auto& m : sd.members) delivered_.insert(m);
    }
}

// ----------------------------------------------------------------------------
// Canonical payloads
// ----------------------------------------------------------------------------

namespace {

json digests_to_json(const std::vector<Digest>& ds) {
    json arr = json::array();
    for (const auto& d : ds) arr.push_back(d.hex());
    return arr;
}

std::vector<Digest> digests_from_json(const json& arr) {
    std::vector<Digest> out;
    for (const auto& v : arr) out.push_back(Digest::from_hex(v.get<std::string>()));
    return out;
}

json parse_payload(std::string_view payload) {
    try {
        json j = json::parse(payload);
        if (!j.is_object() || !j.contains("kind")) {
            throw MrvError(ErrorCode::InvalidLog, "record is not a tagged object");
        }
        return j;
    } catch (const json::exception& e) {
        throw MrvError(ErrorCode::InvalidLog, e.what());
    }
}

template <typename Fn>
auto guarded(Fn&& fn) {
    try {
        return fn();
    } catch (const json::exception& e) {
        throw MrvError(ErrorCode::InvalidLog, e.what());
    }
}

RunConfig config_from_json(const json& j) {
    return guarded([&] {
        RunConfig c;
        c.n = j.at("n").get<std::uint32_t>();
        c.f = j.at("f").get<std::uint32_t>();
        c.w_max = j.at("w_max").get<std::uint32_t>();
        c.seed = j.at("seed").get<std::uint64_t>();
        return c;
    });
}

}  // namespace

std::string encode_event(const ExporterEvent& event) {
    json j;
    if (const auto* rc = std::get_if<RoundCommitted>(&event)) {
        j["kind"] = "round";
        j["round"] = rc->round;
        json verts = json::array();
        for (const auto& v : rc->canonical) {
            verts.push_back({{"creator", v.creator.index},
                             {"digest", v.digest.hex()},
                             {"parents", digests_to_json(v.parents)},
                             {"payload", v.payload_size},
                             {"round", v.round}});
        }
        j["vertices"] = std::move(verts);
    } else {
        const auto& sd = std::get<SliceDelivered>(event);
        j["kind"] = "slice";
        j["slice"] = sd.slice_index;
        j["members"] = digests_to_json(sd.members);
    }
    return j.dump();
}

ExporterEvent decode_event(std::string_view payload) {
    const json j = parse_payload(payload);
    return guarded([&]() -> ExporterEvent {
        const auto kind = j.at("kind").get<std::string>();
        if (kind == "round") {
            RoundCommitted rc;
            rc.round = j.at("round").get<Round>();
            for (const auto& v : j.at("vertices")) {
                AufMeta m;
                m.creator = CreatorId{v.at("creator").get<std::uint32_t>()};
                m.digest = Digest::from_hex(v.at("digest").get<std::string>());
                m.parents = digests_from_json(v.at("parents"));
                m.payload_size = v.at("payload").get<std::uint64_t>();
                m.round = v.at("round").get<Round>();
                rc.canonical.push_back(std::move(m));
            }
            return rc;
        }
        if (kind == "slice") {
            SliceDelivered sd;
            sd.slice_index = j.at("slice").get<std::uint64_t>();
            sd.members = digests_from_json(j.at("members"));
            return sd;
        }
        throw MrvError(ErrorCode::InvalidLog, "unexpected record kind '" + kind + "'");
    });
}

std::string encode_config(const RunConfig& config) {
    json j{{"kind", "header"},
           {"format", 1},
           {"n", config.n},
           {"f", config.f},
           {"w_max", config.w_max},
           {"seed", config.seed}};
    return j.dump();
}

std::string encode_slice_order(const SliceOrder& order) {
    json enforce = json::array();
    for (const auto& [a, b] : order.enforceable_svp) enforce.push_back({a.hex(), b.hex()});
    json j{{"kind", "order"},
           {"slice", order.slice_index},
           {"ordered", digests_to_json(order.ordered)},
           {"enforceable", std::move(enforce)}};
    return j.dump();
}

SliceOrder decode_slice_order(std::string_view payload) {
    const json j = parse_payload(payload);
    return guarded([&] {
        if (j.at("kind").get<std::string>() != "order") {
            throw MrvError(ErrorCode::InvalidLog, "expected an order record");
        }
        SliceOrder o;
        o.slice_index = j.at("slice").get<std::uint64_t>();
        o.ordered = digests_from_json(j.at("ordered"));
        for (const auto& e : j.at("enforceable")) {
            o.enforceable_svp.emplace_back(Digest::from_hex(e.at(0).get<std::string>()),
                                           Digest::from_hex(e.at(1).get<std::string>()));
        }
        return o;
    });
}

// ----------------------------------------------------------------------------
// Framing
// ----------------------------------------------------------------------------

namespace {

std::uint32_t crc_of(std::string_view payload) {
    return static_cast<std::uint32_t>(
        crc32(0L, reinterpret_cast<const Bytef*>(payload.data()), static_cast<uInt>(payload.size())));
}

}  // namespace

std::string frame_record(std::string_view payload) {
    char crc[9];
    std::snprintf(crc, sizeof crc, "%08x", crc_of(payload));
    std::string out = std::to_string(payload.size());
    out.push_back(' ');
    out.append(payload);
    out.push_back(' ');
    out.append(crc, 8);
    out.push_back('\n');
    return out;
}

std::vector<std::string> unframe_records(std::string_view bytes) {
    std::vector<std::string> out;
    std::size_t pos = 0;
    auto corrupt = [&](const std::string& why) {
        return MrvError(ErrorCode::CorruptLog, "record " + std::to_string(out.size()) + ": " + why);
    };
    while (pos < bytes.size()) {
        const auto space = bytes.find(' ', pos);
        if (space == std::string_view::npos || space == pos || space - pos > 12) {
            throw corrupt("missing length prefix");
        }
        std::size_t len = 0;
        const auto* first = bytes.data() + pos;
        const auto* last = bytes.data() + space;
        auto [ptr, ec] = std::from_chars(first, last, len);
        if (ec != std::errc{} || ptr != last) throw corrupt("bad length prefix");
        const std::size_t body = space + 1;
        if (body + len + 10 > bytes.size()) throw corrupt("truncated record");
        const std::string_view payload = bytes.substr(body, len);
        if (bytes[body + len] != ' ' || bytes[body + len + 9] != '\n') throw corrupt("bad framing");
        std::uint32_t stored = 0;
        const auto* cfirst = bytes.data() + body + len + 1;
        auto [cptr, cec] = std::from_chars(cfirst, cfirst + 8, stored, 16);
        if (cec != std::errc{} || cptr != cfirst + 8) throw corrupt("bad checksum field");
        if (stored != crc_of(payload)) throw corrupt("checksum mismatch");
        out.emplace_back(payload);
        pos = body + len + 10;
    }
    return out;
}

// ----------------------------------------------------------------------------
// Event logs
// ----------------------------------------------------------------------------

void EventLog::append(ExporterEvent event) {
    validator_.apply(event);
    events.push_back(std::move(event));
}

std::string EventLog::to_bytes() const {
    std::string out;
    if (config) out += frame_record(encode_config(*config));
    for (const auto& e : events) out += frame_record(encode_event(e));
    return out;
}

EventLog EventLog::from_bytes(std::string_view bytes) {
    EventLog log;
    const auto records = unframe_records(bytes);
    for (std::size_t i = 0; i < records.size(); ++i) {
        const json j = parse_payload(records[i]);
        if (j.at("kind") == "header") {
            if (i != 0) throw MrvError(ErrorCode::InvalidLog, "header record not first");
            log.config = config_from_json(j);
            continue;
        }
        log.append(decode_event(records[i]));
    }
    return log;
}

namespace {

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw MrvError(ErrorCode::InvalidLog, "cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

void EventLog::save(const std::filesystem::path& path) const {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw MrvError(ErrorCode::InvalidLog, "cannot write " + path.string());
    out << to_bytes();
}

EventLog EventLog::load(const std::filesystem::path& path) { return from_bytes(read_file(path)); }

std::vector<ExporterEvent> replay(std::string_view bytes) {
    std::vector<ExporterEvent> out;
    for (const auto& payload : unframe_records(bytes)) {
        if (parse_payload(payload).at("kind") == "header") continue;
        out.push_back(decode_event(payload));
    }
    return out;
}

LogWriter::LogWriter(const std::filesystem::path& path)
    : out_(path, std::ios::binary | std::ios::trunc) {
    if (!out_) throw MrvError(ErrorCode::InvalidLog, "cannot write " + path.string());
}

void LogWriter::write_config(const RunConfig& config) { write_payload(encode_config(config)); }

void LogWriter::append(const ExporterEvent& event) {
    validator_.apply(event);
    write_payload(encode_event(event));
}

void LogWriter::append_slice_order(const SliceOrder& order) {
    write_payload(encode_slice_order(order));
}

void LogWriter::write_payload(const std::string& payload) {
    out_ << frame_record(payload);
    out_.flush();
}

std::string encode_order_log(const std::optional<RunConfig>& config,
                             const std::vector<SliceOrder>& orders) {
    std::string out;
    if (config) out += frame_record(encode_config(*config));
    for (const auto& o : orders) out += frame_record(encode_slice_order(o));
    return out;
}

std::vector<SliceOrder> decode_order_log(std::string_view bytes) {
    std::vector<SliceOrder> out;
    for (const auto& payload : unframe_records(bytes)) {
        if (parse_payload(payload).at("kind") == "header") continue;
        out.push_back(decode_slice_order(payload));
    }
    return out;
}

}  // namespace mrv
