#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_set>
#include <variant>
#include <vector>

#include "mrv/types.hpp"

namespace mrv {

struct RoundCommitted {
    Round round = 0;
    std::vector<AufMeta> canonical;  // ordered by creator

    friend bool operator==(const RoundCommitted&, const RoundCommitted&) = default;
};

struct SliceDelivered {
    std::uint64_t slice_index = 0;
    std::vector<Digest> members;

    friend bool operator==(const SliceDelivered&, const SliceDelivered&) = default;
};

using ExporterEvent = std::variant<RoundCommitted, SliceDelivered>;

/// Checks the committed-output stream contract event by event:
/// consecutive rounds from 0, canonical per-round ordering, consecutive
/// slice indices, and disjoint slices drawn from already committed vertices.
class StreamValidator {
public:
    void check(const ExporterEvent& event) const;
    void apply(const ExporterEvent& event);

    std::optional<Round> frontier() const { return frontier_; }

private:
    std::optional<Round> frontier_;
    std::uint64_t next_slice_ = 0;
    std::unordered_set<Digest> committed_;
    std::unordered_set<Digest> delivered_;
};

/// Sealed output for one slice.
struct SliceOrder {
    std::uint64_t slice_index = 0;
    std::vector<Digest> ordered;
    std::vector<std::pair<Digest, Digest>> enforceable_svp;  // sorted

    friend bool operator==(const SliceOrder&, const SliceOrder&) = default;
};

// ---------------------------------------------------------------------------
// Canonical text records.
//
// A log is a sequence of lines `<len> <payload> <crc32>\n`, where payload is a
// compact JSON object with sorted keys and integer-only values, `len` is its
// byte length in decimal and `crc32` is the zlib CRC-32 of the payload as 8
// lowercase hex digits. An optional first record of kind "header" carries the
// RunConfig the log was produced under.
// ---------------------------------------------------------------------------

std::string encode_event(const ExporterEvent& event);
ExporterEvent decode_event(std::string_view payload);

std::string encode_config(const RunConfig& config);
std::string encode_slice_order(const SliceOrder& order);
SliceOrder decode_slice_order(std::string_view payload);

/// Frames one payload as a checksummed record line.
std::string frame_record(std::string_view payload);
/// Splits a log into payloads, verifying framing and checksums (CorruptLog).
std::vector<std::string> unframe_records(std::string_view bytes);

struct EventLog {
    std::optional<RunConfig> config;
    std::vector<ExporterEvent> events;

    /// Validates `event` against the prefix and appends it.
    void append(ExporterEvent event);

    std::string to_bytes() const;
    static EventLog from_bytes(std::string_view bytes);

    void save(const std::filesystem::path& path) const;
    static EventLog load(const std::filesystem::path& path);

    friend bool operator==(const EventLog& a, const EventLog& b) {
        return a.config == b.config && a.events == b.events;
    }

private:
    StreamValidator validator_;
};

/// Replays a serialized log; byte-identical input yields an identical sequence.
std::vector<ExporterEvent> replay(std::string_view bytes);

/// Append-only file writer; each record is flushed as it is written.
class LogWriter {
public:
    explicit LogWriter(const std::filesystem::path& path);

    void write_config(const RunConfig& config);
    void append(const ExporterEvent& event);
    void append_slice_order(const SliceOrder& order);

private:
    void write_payload(const std::string& payload);

    std::ofstream out_;
    StreamValidator validator_;
};

/// Output log for sealed orders: optional header plus one record per slice.
std::string encode_order_log(const std::optional<RunConfig>& config,
                             const std::vector<SliceOrder>& orders);
std::vector<SliceOrder> decode_order_log(std::string_view bytes);

}  // namespace mrv
