#pragma once

#include <chrono>
#include <cstdint>
#include <vector>

#include "mrv/exporter.hpp"
#include "mrv/types.hpp"

namespace mrv {

struct BenchRow {
    std::uint32_t size = 0;
    std::uint64_t pair_evaluations = 0;
    std::chrono::nanoseconds wall{0};  // comparator + linearizer, best of `repeats`
    std::chrono::nanoseconds seal{0};  // wall time of the round event that sealed the slice
};

/// Dense honest log (n=10, w_max=10 by default) whose single slice holds the
/// first `size` AUFs in (round, creator) order, followed by w_max trailing rounds.
EventLog bench_log(std::uint32_t size, const RunConfig& config);

/// One row per size; `sizes` must be ascending.
std::vector<BenchRow> scaling_bench(const std::vector<std::uint32_t>& sizes, int repeats = 3);

/// Least-squares slope of log(y) against log(x).
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace mrv
