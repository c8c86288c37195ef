#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace mrv {

using Round = std::uint64_t;

struct CreatorId {
    std::uint32_t index = 0;

    friend auto operator<=>(const CreatorId&, const CreatorId&) = default;
};

/// 32-byte content identifier of a committed vertex.
struct Digest {
    std::array<std::uint8_t, 32> bytes{};

    std::string hex() const;
    static Digest from_hex(std::string_view text);

    friend auto operator<=>(const Digest&, const Digest&) = default;
};

/// One committed DAG vertex, i.e. one atomic unit of fairness (AUF).
struct AufMeta {
    Digest digest;
    CreatorId creator;
    Round round = 0;
    std::vector<Digest> parents;  // sorted ascending
    std::uint64_t payload_size = 0;

    friend bool operator==(const AufMeta&, const AufMeta&) = default;
};

/// SHA-256 over (creator, round, sorted parents, payload_size) in a fixed
/// little-endian layout. Independent of the order `parents` is given in.
Digest compute_digest(CreatorId creator, Round round, std::span<const Digest> parents,
                      std::uint64_t payload_size);

/// Builds a vertex with sorted parents and its content digest filled in.
AufMeta make_vertex(CreatorId creator, Round round, std::vector<Digest> parents,
                    std::uint64_t payload_size = 0);

/// Deterministic completion key: (round, creator, digest), compared lexicographically.
struct CompletionKey {
    Round round = 0;
    CreatorId creator;
    Digest digest;

    friend auto operator<=>(const CompletionKey&, const CompletionKey&) = default;
};

inline CompletionKey completion_key(const AufMeta& meta) {
    return {meta.round, meta.creator, meta.digest};
}

struct RunConfig {
    std::uint32_t n = 4;
    std::uint32_t f = 1;
    std::uint32_t w_max = 4;
    std::uint64_t seed = 0;

    std::uint32_t quorum() const { return 2 * f + 1; }
    std::uint32_t margin() const { return f + 1; }

    /// Throws InvalidConfig unless n >= 3f+1 and w_max >= 1.
    void validate() const;

    friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

}  // namespace mrv

template <>
struct std::hash<mrv::Digest> {
    std::size_t operator()(const mrv::Digest& d) const noexcept {
        std::size_t h = 0;
        for (int i = 0; i < 8; ++i) h = (h << 8) | d.bytes[i];
        return h;
    }
};
