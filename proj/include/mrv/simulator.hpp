#pragma once

#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "mrv/exporter.hpp"
#include "mrv/types.hpp"

namespace mrv {

struct Honest {
    friend bool operator==(const Honest&, const Honest&) = default;
};

/// Skips each round with the given probability.
struct WithholdRounds {
    double probability = 0.0;
    friend bool operator==(const WithholdRounds&, const WithholdRounds&) = default;
};

/// Always references `favored` creators' vertices, avoids `shunned` ones.
struct SelectiveParents {
    std::vector<CreatorId> favored;
    std::vector<CreatorId> shunned;
    friend bool operator==(const SelectiveParents&, const SelectiveParents&) = default;
};

/// Each round shuns one target (rotating through `targets`) and favors the others.
struct ConflictInjector {
    std::vector<CreatorId> targets;
    friend bool operator==(const ConflictInjector&, const ConflictInjector&) = default;
};

using Strategy = std::variant<Honest, WithholdRounds, SelectiveParents, ConflictInjector>;

/// Parses `honest`, `withhold:<p>`, `selective:<favored>/<shunned>` (comma
/// separated creator lists, either may be empty) or `conflict:<targets>`.
Strategy parse_strategy(std::string_view text);
std::string format_strategy(const Strategy& strategy);

enum class ParentMode {
    Dense,   // reference every available prior-round vertex
    Sparse,  // reference exactly 2f+1 drawn uniformly
};

struct SimPlan {
    RunConfig config;
    Round rounds = 8;       // rounds after genesis that may carry leaders
    Round wave_length = 2;  // a leader commits every wave_length rounds
    std::map<std::uint32_t, Strategy> strategies;  // creator -> strategy; others honest
    ParentMode parent_mode = ParentMode::Dense;
    std::uint64_t max_payload = 4096;  // payload sizes drawn from [0, max_payload)
};

/// Seeded, portable random source. The engine is std::mt19937_64, whose
/// output sequence is fixed by the C++ standard; bounded draws use rejection
/// sampling so no implementation-defined distribution is involved.
class SimRng {
public:
    explicit SimRng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }
    /// Uniform in [0, bound).
    std::uint64_t below(std::uint64_t bound);
    /// Uniform in [0, 1) with 53 bits.
    double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

private:
    std::mt19937_64 engine_;
};

/// Genesis, `rounds` rounds with a leader every `wave_length`, then w_max
/// trailing rounds. Each leader commit delivers its not yet delivered causal
/// history as one slice, sorted by completion key. Throws InfeasiblePlan.
EventLog generate(const SimPlan& plan);

// ---------------------------------------------------------------------------
// Hand-built fixtures for boundary cases.
// ---------------------------------------------------------------------------

struct Scenario {
    std::string name;
    std::string description;
    RunConfig config;
    EventLog log;
    std::map<std::string, Digest> roles;  // named AUFs, e.g. "A", "B"
};

std::vector<std::string> scenario_names();
/// Throws UnknownScenario.
Scenario targeted_scenario(std::string_view name);

}  // namespace mrv
