#include "mrv/types.hpp"

#include <algorithm>

#include <openssl/sha.h>

#include "mrv/error.hpp"

namespace mrv {

std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::MissingParent: return "MissingParent";
        case ErrorCode::DuplicateCreatorRound: return "DuplicateCreatorRound";
        case ErrorCode::BadParentRound: return "BadParentRound";
        case ErrorCode::InsufficientParents: return "InsufficientParents";
        case ErrorCode::UnknownCreator: return "UnknownCreator";
        case ErrorCode::DigestMismatch: return "DigestMismatch";
        case ErrorCode::UnknownDigest: return "UnknownDigest";
        case ErrorCode::NonConsecutiveRound: return "NonConsecutiveRound";
        case ErrorCode::NonConsecutiveSlice: return "NonConsecutiveSlice";
        case ErrorCode::DuplicateSliceMember: return "DuplicateSliceMember";
        case ErrorCode::UnknownSliceMember: return "UnknownSliceMember";
        case ErrorCode::NonCanonicalRound: return "NonCanonicalRound";
        case ErrorCode::CorruptLog: return "CorruptLog";
        case ErrorCode::FrontierSkew: return "FrontierSkew";
        case ErrorCode::RoundNotRecorded: return "RoundNotRecorded";
        case ErrorCode::UnknownAuf: return "UnknownAuf";
        case ErrorCode::HorizonNotReached: return "HorizonNotReached";
        case ErrorCode::UnsettledStoppingTime: return "UnsettledStoppingTime";
        case ErrorCode::UnsettledMember: return "UnsettledMember";
        case ErrorCode::UnfrozenPair: return "UnfrozenPair";
        case ErrorCode::InvalidLog: return "InvalidLog";
        case ErrorCode::ConfigMismatch: return "ConfigMismatch";
        case ErrorCode::InvalidConfig: return "InvalidConfig";
        case ErrorCode::InfeasiblePlan: return "InfeasiblePlan";
        case ErrorCode::UnknownScenario: return "UnknownScenario";
    }
    return "Unknown";
}

std::string Digest::hex() const {
    static constexpr char kDigits[] = "0123456789abcdef";
    std::string out;
    out.reserve(64);
    for (auto b : bytes) {
        out.push_back(kDigits[b >> 4]);
        out.push_back(kDigits[b & 0xf]);
    }
    return out;
}

Digest Digest::from_hex(std::string_view text) {
    if (text.size() != 64) throw MrvError(ErrorCode::InvalidLog, "digest must be 64 hex chars");
    auto nibble = [](char c) -> int {
        if (c >= '0' && c <= '9') return c - '0';
        if (c >= 'a' && c <= 'f') return c - 'a' + 10;
        throw MrvError(ErrorCode::InvalidLog, "bad hex digit in digest");
    };
    Digest d;
    for (std::size_t i = 0; i < 32; ++i) {
        d.bytes[i] = static_cast<std::uint8_t>((nibble(text[2 * i]) << 4) | nibble(text[2 * i + 1]));
    }
    return d;
}

namespace {

void put_u64(std::vector<std::uint8_t>& buf, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) buf.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

}  // namespace

Digest compute_digest(CreatorId creator, Round round, std::span<const Digest> parents,
                      std::uint64_t payload_size) {
    std::vector<Digest> sorted(parents.begin(), parents.end());
    std::sort(sorted.begin(), sorted.end());

    std::vector<std::uint8_t> buf;
    buf.reserve(32 + 32 * sorted.size());
    put_u64(buf, creator.index);
    put_u64(buf, round);
    put_u64(buf, sorted.size());
    for (const auto& p : sorted) buf.insert(buf.end(), p.bytes.begin(), p.bytes.end());
    put_u64(buf, payload_size);

    Digest out;
    SHA256(buf.data(), buf.size(), out.bytes.data());
    return out;
}

AufMeta make_vertex(CreatorId creator, Round round, std::vector<Digest> parents,
                    std::uint64_t payload_size) {
    std::sort(parents.begin(), parents.end());
    AufMeta meta;
    meta.digest = compute_digest(creator, round, parents, payload_size);
    meta.creator = creator;
    meta.round = round;
    meta.parents = std::move(parents);
    meta.payload_size = payload_size;
    return meta;
}

void RunConfig::validate() const {
    if (n < 3 * f + 1) {
        throw MrvError(ErrorCode::InvalidConfig,
                       "n=" + std::to_string(n) + " violates n >= 3f+1 with f=" + std::to_string(f));
    }
    if (w_max < 1) throw MrvError(ErrorCode::InvalidConfig, "w_max must be >= 1");
}

}  // namespace mrv
