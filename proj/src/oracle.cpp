#include "mrv/oracle.hpp"

#include <algorithm>
#include <functional>
#include <numeric>
#include <set>

#include "mrv/error.hpp"

namespace mrv {

namespace {

struct OracleVertex {
    CreatorId creator;
    Round round = 0;
    std::vector<Digest> parents;
};

std::string short_hex(const Digest& d) { return d.hex().substr(0, 12); }

}  // namespace

std::vector<std::size_t> oracle_components(const OracleGraph& graph) {
    const std::size_t k = graph.keys.size();
    std::vector<std::vector<bool>> reach(k, std::vector<bool>(k, false));
    for (std::size_t i = 0; i < k; ++i) reach[i][i] = true;
    for (const auto& [u, v] : graph.causal) reach[u][v] = true;
    for (const auto& [u, v] : graph.svp) reach[u][v] = true;
    for (std::size_t m = 0; m < k; ++m) {
        for (std::size_t i = 0; i < k; ++i) {
            if (!reach[i][m]) continue;
            for (std::size_t j = 0; j < k; ++j) {
                if (reach[m][j]) reach[i][j] = true;
            }
        }
    }
    std::vector<std::size_t> label(k, k);
    std::size_t next = 0;
    for (std::size_t i = 0; i < k; ++i) {
        if (label[i] != k) continue;
        for (std::size_t j = 0; j < k; ++j) {
            if (reach[i][j] && reach[j][i]) label[j] = next;
        }
        ++next;
    }
    return label;
}

namespace {

bool respects(const OracleGraph& g, const std::vector<std::size_t>& comp,
              const std::vector<std::size_t>& order) {
    const std::size_t k = order.size();
    std::vector<std::size_t> pos(k);
    for (std::size_t i = 0; i < k; ++i) pos[order[i]] = i;
    // Each SCC occupies a contiguous run.
    std::set<std::size_t> closed;
    for (std::size_t i = 0; i < k; ++i) {
        const auto c = comp[order[i]];
        if (closed.count(c)) return false;
        if (i + 1 < k && comp[order[i + 1]] != c) closed.insert(c);
    }
    for (const auto& [u, v] : g.causal) {
        if (pos[u] > pos[v]) return false;
    }
    for (const auto& [u, v] : g.svp) {
        if (comp[u] != comp[v] && pos[u] > pos[v]) return false;
    }
    return true;
}

std::vector<std::size_t> kappa_sorted_indices(const OracleGraph& g) {
    std::vector<std::size_t> idx(g.keys.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](auto a, auto b) { return g.keys[a] < g.keys[b]; });
    return idx;
}

}  // namespace

std::vector<std::size_t> oracle_order_exhaustive(const OracleGraph& graph) {
    if (graph.keys.size() > 9) {
        throw MrvError(ErrorCode::InvalidConfig, "exhaustive enumeration limited to 9 vertices");
    }
    const auto comp = oracle_components(graph);
    auto perm = kappa_sorted_indices(graph);
    std::vector<std::size_t> rank(perm.size());
    for (std::size_t i = 0; i < perm.size(); ++i) rank[perm[i]] = i;
    auto by_rank = [&](std::size_t a, std::size_t b) { return rank[a] < rank[b]; };
    // next_permutation under the kappa comparator walks orders lexicographically by kappa.
    do {
        if (respects(graph, comp, perm)) return perm;
    } while (std::next_permutation(perm.begin(), perm.end(), by_rank));
    throw MrvError(ErrorCode::InvalidLog, "no admissible order (cyclic causal edges?)");
}

std::vector<std::size_t> oracle_order_greedy(const OracleGraph& graph) {
    const std::size_t k = graph.keys.size();
    const auto comp = oracle_components(graph);
    std::vector<bool> emitted(k, false);
    std::vector<std::size_t> order;
    auto all_edges = graph.causal;
    all_edges.insert(all_edges.end(), graph.svp.begin(), graph.svp.end());

    while (order.size() < k) {
        // Eligible components: every edge entering them from outside has an emitted source.
        std::optional<std::size_t> best;
        for (std::size_t v = 0; v < k; ++v) {
            if (emitted[v]) continue;
            bool eligible = true;
            for (const auto& [a, b] : all_edges) {
                if (comp[b] == comp[v] && comp[a] != comp[v] && !emitted[a]) eligible = false;
            }
            if (eligible && (!best || graph.keys[v] < graph.keys[*best])) best = v;
        }
        const auto c = comp[*best];
        std::size_t remaining = 0;
        for (std::size_t v = 0; v < k; ++v) remaining += (comp[v] == c);
        while (remaining > 0) {
            std::optional<std::size_t> pick;
            for (std::size_t v = 0; v < k; ++v) {
                if (emitted[v] || comp[v] != c) continue;
                bool free = true;
                for (const auto& [a, b] : graph.causal) {
                    if (b == v && comp[a] == c && !emitted[a]) free = false;
                }
                if (free && (!pick || graph.keys[v] < graph.keys[*pick])) pick = v;
            }
            emitted[*pick] = true;
            order.push_back(*pick);
            --remaining;
        }
    }
    return order;
}

OracleReport oracle_evaluate(const std::vector<ExporterEvent>& events, const RunConfig& config) {
    OracleReport report;
    report.config = config;

    std::map<Digest, OracleVertex> vertices;
    std::map<Round, std::vector<Digest>> by_round;
    std::vector<std::vector<Digest>> slices;
    {
        StreamValidator validator;
        for (const auto& e : events) {
            try {
                validator.apply(e);
            } catch (const MrvError& err) {
                throw MrvError(ErrorCode::InvalidLog, err.what());
            }
            if (const auto* rc = std::get_if<RoundCommitted>(&e)) {
                for (const auto& v : rc->canonical) {
                    if (v.round > 0 && v.parents.size() < config.quorum()) {
                        throw MrvError(ErrorCode::InvalidLog, "under-certified " + short_hex(v.digest));
                    }
                    for (const auto& p : v.parents) {
                        auto it = vertices.find(p);
                        if (it == vertices.end() || it->second.round + 1 != v.round) {
                            throw MrvError(ErrorCode::InvalidLog, "bad parent of " + short_hex(v.digest));
                        }
                    }
                    vertices[v.digest] = {v.creator, v.round, v.parents};
                    by_round[v.round].push_back(v.digest);
                }
                report.frontier = rc->round;
            } else {
                slices.push_back(std::get<SliceDelivered>(e).members);
            }
        }
    }
    if (!report.frontier) return report;
    const Round frontier = *report.frontier;

    // Full reflexive ancestor closure of every vertex, no horizon bound.
    std::map<Digest, std::set<Digest>> anc;
    std::function<const std::set<Digest>&(const Digest&)> closure = [&](const Digest& d)
        -> const std::set<Digest>& {
        if (auto it = anc.find(d); it != anc.end()) return it->second;
        std::set<Digest> s{d};
        for (const auto& p : vertices.at(d).parents) {
            const auto& ps = closure(p);
            s.insert(ps.begin(), ps.end());
        }
        return anc.emplace(d, std::move(s)).first->second;
    };

    for (const auto& [d, v] : vertices) {
        OracleAuf a;
        a.creator = v.creator;
        a.birth_round = v.round;
        for (Round t = v.round; t <= frontier; ++t) {
            std::uint32_t c = 0;
            if (auto it = by_round.find(t); it != by_round.end()) {
                for (const auto& y : it->second) c += closure(y).count(d) ? 1 : 0;
            }
            a.counts.push_back(c);
        }
        // h = min({t >= r : C(t) >= 2f+1} U {r + W}), known once the frontier decides it.
        const Round cap = v.round + config.w_max;
        for (Round t = v.round; t <= std::min(cap, frontier); ++t) {
            if (a.counts[t - v.round] >= config.quorum()) {
                a.stopping_time = t;
                break;
            }
        }
        if (!a.stopping_time && frontier >= cap) a.stopping_time = cap;
        if (a.stopping_time) a.mature = a.counts[*a.stopping_time - v.round] >= config.quorum();
        report.aufs.emplace(d, std::move(a));
    }

    auto key_of = [&](const Digest& d) {
        const auto& v = vertices.at(d);
        return CompletionKey{v.round, v.creator, d};
    };
    auto count = [&](const Digest& d, Round t) -> std::int64_t {
        const auto& a = report.aufs.at(d);
        return a.counts[t - a.birth_round];
    };
    const auto margin = static_cast<std::int64_t>(config.f) + 1;

    // Structural visibility precedence, read directly off the definition.
    auto precedes = [&](const Digest& x, const Digest& y, Round s, Round h) {
        for (Round t = s + 1; t <= h; ++t) {
            if (count(x, t) - count(y, t) >= margin) return true;
        }
        return false;
    };

    bool prefix_open = true;
    for (std::size_t si = 0; si < slices.size(); ++si) {
        auto members = slices[si];
        std::sort(members.begin(), members.end(),
                  [&](const Digest& a, const Digest& b) { return key_of(a) < key_of(b); });

        bool all_settled = true;
        Round sealing = 0;
        for (const auto& m : members) {
            const auto& a = report.aufs.at(m);
            if (!a.stopping_time) {
                all_settled = false;
                continue;
            }
            sealing = std::max(sealing, *a.stopping_time);
        }

        OracleGraph graph;
        for (const auto& m : members) graph.keys.push_back(key_of(m));
        for (std::size_t i = 0; i < members.size(); ++i) {
            for (std::size_t j = i + 1; j < members.size(); ++j) {
                const auto& A = members[i];
                const auto& B = members[j];
                const auto& a = report.aufs.at(A);
                const auto& b = report.aufs.at(B);
                if (closure(B).count(A)) graph.causal.emplace_back(i, j);
                if (closure(A).count(B)) graph.causal.emplace_back(j, i);
                if (!a.stopping_time || !b.stopping_time) continue;
                const Round h = std::max(*a.stopping_time, *b.stopping_time);
                if (h > frontier) continue;
                const Round s = std::max(a.birth_round, b.birth_round);
                Verdict verdict;
                if (!*a.mature || !*b.mature) {
                    verdict = Verdict::AbstainTruncated;
                } else {
                    const bool a_over_b = precedes(A, B, s, h);
                    const bool b_over_a = precedes(B, A, s, h);
                    if (a_over_b && !b_over_a) {
                        verdict = Verdict::EdgeForward;
                        graph.svp.emplace_back(i, j);
                    } else if (b_over_a && !a_over_b) {
                        verdict = Verdict::EdgeBackward;
                        graph.svp.emplace_back(j, i);
                    } else if (a_over_b && b_over_a) {
                        verdict = Verdict::AbstainConflict;
                    } else {
                        verdict = Verdict::AbstainNoSignal;
                    }
                }
                report.verdicts[{A, B}] = verdict;
            }
        }

        if (!prefix_open || !all_settled || sealing > frontier) {
            prefix_open = false;
            continue;
        }
        const auto comp = oracle_components(graph);
        const auto order =
            members.size() <= 8 ? oracle_order_exhaustive(graph) : oracle_order_greedy(graph);
        SliceOrder so;
        so.slice_index = si;
        for (auto i : order) so.ordered.push_back(members[i]);
        for (const auto& [u, v] : graph.svp) {
            if (comp[u] != comp[v]) so.enforceable_svp.emplace_back(members[u], members[v]);
        }
        std::sort(so.enforceable_svp.begin(), so.enforceable_svp.end());
        report.slices.push_back(std::move(so));
    }
    return report;
}

std::vector<std::string> diff_reports(const RunConfig& engine_config, const EngineTrace& engine,
                                      const OracleReport& oracle) {
    const auto& oc = oracle.config;
    if (engine_config.n != oc.n || engine_config.f != oc.f || engine_config.w_max != oc.w_max) {
        throw MrvError(ErrorCode::ConfigMismatch, "engine and oracle ran under different configs");
    }
    std::vector<std::string> out;

    for (const auto& [d, a] : oracle.aufs) {
        auto it = engine.aufs.find(d);
        if (!a.stopping_time) {
            if (it != engine.aufs.end()) out.push_back("auf " + short_hex(d) + ": engine settled early");
            continue;
        }
        if (it == engine.aufs.end()) {
            out.push_back("auf " + short_hex(d) + ": not settled by engine");
            continue;
        }
        if (it->second.stopping_time != *a.stopping_time || it->second.mature != *a.mature) {
            out.push_back("auf " + short_hex(d) + ": engine h=" +
                          std::to_string(it->second.stopping_time) +
                          " mature=" + std::to_string(it->second.mature) +
                          " oracle h=" + std::to_string(*a.stopping_time) +
                          " mature=" + std::to_string(*a.mature));
        }
    }
    for (const auto& [d, _] : engine.aufs) {
        if (!oracle.aufs.count(d)) out.push_back("auf " + short_hex(d) + ": unknown to oracle");
    }

    for (const auto& [key, v] : oracle.verdicts) {
        auto it = engine.verdicts.find(key);
        const std::string name = short_hex(key.first) + "/" + short_hex(key.second);
        if (it == engine.verdicts.end()) {
            out.push_back("pair " + name + ": not frozen by engine");
        } else if (it->second != v) {
            out.push_back("pair " + name + ": engine " + std::string(to_string(it->second)) +
                          " oracle " + std::string(to_string(v)));
        }
    }
    for (const auto& [key, _] : engine.verdicts) {
        if (!oracle.verdicts.count(key)) {
            out.push_back("pair " + short_hex(key.first) + "/" + short_hex(key.second) +
                          ": frozen by engine only");
        }
    }

    if (engine.slices.size() != oracle.slices.size()) {
        out.push_back("sealed slices: engine " + std::to_string(engine.slices.size()) + " oracle " +
                      std::to_string(oracle.slices.size()));
    }
    const auto common = std::min(engine.slices.size(), oracle.slices.size());
    for (std::size_t i = 0; i < common; ++i) {
        const auto& e = engine.slices[i];
        const auto& o = oracle.slices[i];
        const auto label = "slice " + std::to_string(o.slice_index);
        if (e.slice_index != o.slice_index) out.push_back(label + ": index mismatch");
        if (e.ordered != o.ordered) out.push_back(label + ": order differs");
        if (e.enforceable_svp != o.enforceable_svp) out.push_back(label + ": enforceable edges differ");
    }
    return out;
}

}  // namespace mrv
