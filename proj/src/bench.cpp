#include "mrv/bench.hpp"

#include <algorithm>
#include <cmath>

#include "mrv/engine.hpp"
#include "mrv/error.hpp"

namespace mrv {

EventLog bench_log(std::uint32_t size, const RunConfig& config) {
    EventLog log;
    log.config = config;
    std::vector<AufMeta> prev;
    std::vector<Digest> members;
    bool delivered = false;
    Round last = 0;
    for (Round r = 0;; ++r) {
        std::vector<Digest> parents;
        for (const auto& v : prev) parents.push_back(v.digest);
        std::vector<AufMeta> current;
        for (std::uint32_t c = 0; c < config.n; ++c) {
            current.push_back(make_vertex({c}, r, parents, r * config.n + c));
        }
        for (const auto& v : current) {
            if (members.size() < size) members.push_back(v.digest);
        }
        log.append(RoundCommitted{r, current});
        if (!delivered && members.size() == size) {
            log.append(SliceDelivered{0, members});
            delivered = true;
            last = r + config.w_max;
        }
        if (delivered && r >= last) break;
        prev = std::move(current);
    }
    return log;
}

std::vector<BenchRow> scaling_bench(const std::vector<std::uint32_t>& sizes, int repeats) {
    if (!std::is_sorted(sizes.begin(), sizes.end())) {
        throw MrvError(ErrorCode::InvalidConfig, "bench sizes must be ascending");
    }
    RunConfig config;
    config.n = 10;
    config.f = 3;
    config.w_max = 10;
    std::vector<BenchRow> rows;
    for (std::uint32_t size : sizes) {
        const EventLog log = bench_log(size, config);
        BenchRow row;
        row.size = size;
        for (int i = 0; i < std::max(repeats, 1); ++i) {
            OrderingEngine engine(config, EngineOptions{EngineFault::None, false});
            std::chrono::nanoseconds seal{0};
            for (const auto& e : log.events) {
                const auto t0 = std::chrono::steady_clock::now();
                const auto sealed = engine.apply(e);
                if (!sealed.empty()) seal = std::chrono::steady_clock::now() - t0;
            }
            const auto& m = engine.metrics();
            const auto wall = m.wall.comparator + m.wall.linearizer;
            if (i == 0 || wall < row.wall) row.wall = wall;
            if (i == 0 || seal < row.seal) row.seal = seal;
            row.pair_evaluations = m.pair_evaluations;
        }
        rows.push_back(row);
    }
    return rows;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = std::min(x.size(), y.size());
    if (n < 2) return 0.0;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double lx = std::log(x[i]);
        const double ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    const double denom = n * sxx - sx * sx;
    return denom == 0.0 ? 0.0 : (n * sxy - sx * sy) / denom;
}

}  // namespace mrv
