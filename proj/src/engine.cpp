#include "mrv/engine.hpp"

#include <algorithm>
#include <unordered_map>

#include "json.hpp"
#include "mrv/error.hpp"

namespace mrv {

namespace {

using Clock = std::chrono::steady_clock;

VerdictRule rule_for(const RunConfig& config, EngineFault fault) {
    VerdictRule rule = VerdictRule::from(config);
    if (fault == EngineFault::WindowFromCoexistence) rule.window_offset = 0;
    if (fault == EngineFault::ThresholdF) rule.margin = config.f;
    return rule;
}

}  // namespace

std::string RunMetrics::to_record() const {
    const std::uint64_t maturity_ppm = aufs_settled ? aufs_mature * 1'000'000 / aufs_settled : 0;
    nlohmann::json j{
        {"kind", "metrics"},
        {"rounds", rounds},
        {"aufs_committed", aufs_committed},
        {"aufs_settled", aufs_settled},
        {"aufs_mature", aufs_mature},
        {"maturity_ppm", maturity_ppm},
        {"slices_delivered", slices_delivered},
        {"slices_sealed", slices_sealed},
        {"pair_evaluations", pair_evaluations},
        {"verdict_edge", edges},
        {"verdict_truncated", abstain_truncated},
        {"verdict_conflict", abstain_conflict},
        {"verdict_no_signal", abstain_no_signal},
        {"sealing_delay_sum", sealing_delay_sum},
        {"sealing_delay_max", sealing_delay_max},
        {"enforceable_edges", enforceable_edges},
        {"preserved_edges", preserved_edges},
        {"causal_edges", causal_edges},
        {"causal_violations", causal_violations},
        {"bound_violations", bound_violations},
    };
    return j.dump();
}

std::string RunMetrics::timing_record() const {
    nlohmann::json j{{"kind", "timing"},
                     {"visibility_ns", wall.visibility.count()},
                     {"comparator_ns", wall.comparator.count()},
                     {"linearizer_ns", wall.linearizer.count()}};
    return j.dump();
}

OrderingEngine::OrderingEngine(const RunConfig& config, EngineOptions options)
    : config_(config),
      options_(options),
      rule_(rule_for(config, options.fault)),
      store_(config.n, config.quorum()),
      visibility_(config, store_) {
    config_.validate();
}

std::vector<SliceOrder> OrderingEngine::apply(const ExporterEvent& event) {
    if (const auto* rc = std::get_if<RoundCommitted>(&event)) return on_round_committed(*rc);
    return on_slice_delivered(std::get<SliceDelivered>(event));
}

std::vector<SliceOrder> OrderingEngine::on_round_committed(const RoundCommitted& event) {
    const Round expected = store_.frontier() ? *store_.frontier() + 1 : 0;
    if (event.round != expected) {
        throw MrvError(ErrorCode::FrontierSkew, "round " + std::to_string(event.round) +
                                                    " after frontier " + std::to_string(expected));
    }
    validator_.apply(event);

    const auto t0 = Clock::now();
    std::vector<VertexId> ids;
    ids.reserve(event.canonical.size());
    for (const auto& v : event.canonical) ids.push_back(store_.insert_vertex(v));
    store_.commit_round(event.round);
    visibility_.on_round_committed(event.round, ids);
    metrics_.rounds += 1;
    metrics_.aufs_committed += ids.size();

    for (VertexId id : visibility_.settle_stopping_times(event.round)) {
        const auto* p = visibility_.profile(id);
        metrics_.aufs_settled += 1;
        metrics_.aufs_mature += *p->mature ? 1 : 0;
        if (*p->stopping_time > p->birth_round + config_.w_max) metrics_.bound_violations += 1;
        if (options_.record_trace) {
            trace_.aufs[p->target] = {p->birth_round, *p->stopping_time, *p->mature};
        }
    }
    metrics_.wall.visibility += Clock::now() - t0;

    freeze_pairs();
    return seal_ready_slices();
}

std::vector<SliceOrder> OrderingEngine::on_slice_delivered(const SliceDelivered& event) {
    validator_.apply(event);

    SliceState slice;
    slice.index = event.slice_index;
    for (const auto& d : event.members) slice.members.push_back(store_.id_of(d));
    std::sort(slice.members.begin(), slice.members.end(), [&](VertexId a, VertexId b) {
        return completion_key(store_.meta(a)) < completion_key(store_.meta(b));
    });
    std::vector<const VisibilityProfile*> profiles;
    profiles.reserve(slice.members.size());
    for (VertexId v : slice.members) {
        const auto* p = visibility_.profile(v);
        if (!p) throw MrvError(ErrorCode::UnknownAuf, store_.meta(v).digest.hex());
        profiles.push_back(p);
    }
    slice.pairs = std::make_unique<PairBook>(std::move(profiles), rule_);
    slices_.push_back(std::move(slice));
    metrics_.slices_delivered += 1;

    freeze_pairs();
    return seal_ready_slices();
}

void OrderingEngine::freeze_pairs() {
    if (!store_.frontier()) return;
    const auto t0 = Clock::now();
    for (auto& slice : slices_) {
        if (slice.pairs->all_frozen()) continue;
        for (std::size_t idx : slice.pairs->freeze_ready_pairs(*store_.frontier())) {
            const auto& rec = slice.pairs->records()[idx];
            metrics_.pair_evaluations += 1;
            switch (*rec.verdict) {
                case Verdict::EdgeForward:
                case Verdict::EdgeBackward: metrics_.edges += 1; break;
                case Verdict::AbstainTruncated: metrics_.abstain_truncated += 1; break;
                case Verdict::AbstainConflict: metrics_.abstain_conflict += 1; break;
                case Verdict::AbstainNoSignal: metrics_.abstain_no_signal += 1; break;
            }
            if (options_.record_trace) trace_.verdicts[{rec.a, rec.b}] = *rec.verdict;
        }
    }
    metrics_.wall.comparator += Clock::now() - t0;
}

std::vector<SliceOrder> OrderingEngine::seal_ready_slices() {
    std::vector<SliceOrder> out;
    if (!store_.frontier()) return out;
    const Round frontier = *store_.frontier();
    while (!slices_.empty()) {
        auto& slice = slices_.front();
        std::vector<const VisibilityProfile*> profiles;
        bool settled = true;
        for (VertexId v : slice.members) {
            const auto* p = visibility_.profile(v);
            settled = settled && p->stopping_time.has_value();
            profiles.push_back(p);
        }
        if (!settled) break;
        const Round sealing_time = slice_sealing_time(profiles);
        if (frontier < sealing_time || !slice.pairs->all_frozen()) break;
        out.push_back(seal(slice, sealing_time));
        slices_.pop_front();
    }
    return out;
}

SliceOrder OrderingEngine::seal(SliceState& slice, Round sealing_time) {
    const auto t0 = Clock::now();
    Round newest_member = 0;
    for (VertexId v : slice.members) newest_member = std::max(newest_member, store_.meta(v).round);

    PrecedenceGraph graph = build_precedence_graph(store_, slice.members, slice.pairs->records());
    SliceOrder order = condense_and_linearize(graph, slice.index);

    std::unordered_map<Digest, std::size_t> position;
    for (std::size_t i = 0; i < order.ordered.size(); ++i) position.emplace(order.ordered[i], i);
    for (const auto& [a, b] : order.enforceable_svp) {
        if (position.at(a) < position.at(b)) metrics_.preserved_edges += 1;
    }
    for (const auto& [u, v] : graph.causal_edges) {
        if (position.at(graph.vertices[u]) > position.at(graph.vertices[v])) {
            metrics_.causal_violations += 1;
        }
    }
    metrics_.enforceable_edges += order.enforceable_svp.size();
    metrics_.causal_edges += graph.causal_edges.size();
    metrics_.slices_sealed += 1;
    const Round delay = sealing_time - newest_member;
    metrics_.sealing_delay_sum += delay;
    metrics_.sealing_delay_max = std::max<std::uint64_t>(metrics_.sealing_delay_max, delay);
    if (delay > config_.w_max) metrics_.bound_violations += 1;

    for (VertexId v : slice.members) visibility_.release(v);
    if (options_.record_trace) trace_.slices.push_back(order);
    last_graph_ = std::move(graph);
    metrics_.wall.linearizer += Clock::now() - t0;
    return order;
}

EngineRun run_engine(const std::vector<ExporterEvent>& events, const RunConfig& config,
                     EngineOptions options) {
    OrderingEngine engine(config, options);
    EngineRun run;
    for (const auto& e : events) {
        auto sealed = engine.apply(e);
        run.orders.insert(run.orders.end(), std::make_move_iterator(sealed.begin()),
                          std::make_move_iterator(sealed.end()));
    }
    run.trace = engine.trace();
    run.metrics = engine.metrics();
    return run;
}

}  // namespace mrv
