#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace mrv {

enum class ErrorCode {
    // dag store
    MissingParent,
    DuplicateCreatorRound,
    BadParentRound,
    InsufficientParents,
    UnknownCreator,
    DigestMismatch,
    UnknownDigest,
    // exporter stream / log
    NonConsecutiveRound,
    NonConsecutiveSlice,
    DuplicateSliceMember,
    UnknownSliceMember,
    NonCanonicalRound,
    CorruptLog,
    // engine
    FrontierSkew,
    RoundNotRecorded,
    UnknownAuf,
    HorizonNotReached,
    UnsettledStoppingTime,
    UnsettledMember,
    UnfrozenPair,
    // oracle / simulator / config
    InvalidLog,
    ConfigMismatch,
    InvalidConfig,
    InfeasiblePlan,
    UnknownScenario,
};

std::string_view to_string(ErrorCode code);

class MrvError : public std::runtime_error {
public:
    MrvError(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace mrv
