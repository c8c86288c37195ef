#include "mrv/linearizer.hpp"

#include <algorithm>
#include <bit>
#include <functional>
#include <queue>
#include <unordered_map>

#include "mrv/error.hpp"

namespace mrv {

Round slice_sealing_time(std::span<const VisibilityProfile* const> members) {
    Round sealing = 0;
    for (const auto* p : members) {
        if (!p->stopping_time) throw MrvError(ErrorCode::UnsettledMember, p->target.hex());
        sealing = std::max(sealing, *p->stopping_time);
    }
    return sealing;
}

PrecedenceGraph build_precedence_graph(const DagStore& store, std::span<const VertexId> members,
                                       const std::vector<PairRecord>& pairs) {
    PrecedenceGraph g;
    const auto k = static_cast<std::uint32_t>(members.size());
    g.vertices.reserve(k);
    g.keys.reserve(k);
    for (VertexId v : members) {
        g.vertices.push_back(store.meta(v).digest);
        g.keys.push_back(completion_key(store.meta(v)));
    }
    if (k == 0) return g;

    // In-slice ancestry by bitset propagation over the rounds the slice spans.
    Round lo = store.meta(members[0]).round;
    Round hi = lo;
    std::unordered_map<VertexId, std::uint32_t> local;
    for (std::uint32_t i = 0; i < k; ++i) {
        local.emplace(members[i], i);
        lo = std::min(lo, store.meta(members[i]).round);
        hi = std::max(hi, store.meta(members[i]).round);
    }
    const std::size_t words = (k + 63) / 64;
    std::unordered_map<VertexId, std::vector<std::uint64_t>> anc;
    for (Round r = lo; r <= hi; ++r) {
        for (VertexId v : store.round_vertices(r)) {
            std::vector<std::uint64_t> bits(words, 0);
            if (r > lo) {
                for (VertexId p : store.parent_ids(v)) {
                    auto it = anc.find(p);
                    if (it == anc.end()) continue;
                    for (std::size_t w = 0; w < words; ++w) bits[w] |= it->second[w];
                }
            }
            if (auto it = local.find(v); it != local.end()) {
                const std::uint32_t to = it->second;
                for (std::size_t w = 0; w < words; ++w) {
                    for (std::uint64_t word = bits[w]; word != 0; word &= word - 1) {
                        const auto from = static_cast<std::uint32_t>(w * 64 + std::countr_zero(word));
                        g.causal_edges.emplace_back(from, to);
                    }
                }
                bits[to / 64] |= std::uint64_t{1} << (to % 64);
            }
            anc.emplace(v, std::move(bits));
        }
    }
    std::sort(g.causal_edges.begin(), g.causal_edges.end());

    for (const auto& rec : pairs) {
        if (!rec.verdict) throw MrvError(ErrorCode::UnfrozenPair, rec.a.hex() + "/" + rec.b.hex());
        if (*rec.verdict == Verdict::EdgeForward) g.svp_edges.emplace_back(rec.a_index, rec.b_index);
        if (*rec.verdict == Verdict::EdgeBackward) g.svp_edges.emplace_back(rec.b_index, rec.a_index);
    }
    std::sort(g.svp_edges.begin(), g.svp_edges.end());
    return g;
}

std::vector<std::uint32_t> strongly_connected_components(std::uint32_t vertex_count,
                                                         std::span<const LocalEdge> edges,
                                                         std::uint32_t* component_count) {
    std::vector<std::vector<std::uint32_t>> adj(vertex_count);
    for (const auto& [u, v] : edges) adj[u].push_back(v);

    constexpr std::uint32_t kUnvisited = UINT32_MAX;
    std::vector<std::uint32_t> index(vertex_count, kUnvisited);
    std::vector<std::uint32_t> lowlink(vertex_count, 0);
    std::vector<std::uint32_t> comp(vertex_count, kUnvisited);
    std::vector<std::uint8_t> on_stack(vertex_count, 0);
    std::vector<std::uint32_t> stack;
    std::uint32_t next_index = 0;
    std::uint32_t next_comp = 0;

    // Iterative DFS: frames of (vertex, next successor position).
    std::vector<std::pair<std::uint32_t, std::size_t>> frames;
    for (std::uint32_t root = 0; root < vertex_count; ++root) {
        if (index[root] != kUnvisited) continue;
        frames.emplace_back(root, 0);
        index[root] = lowlink[root] = next_index++;
        stack.push_back(root);
        on_stack[root] = 1;
        while (!frames.empty()) {
            auto& [v, pos] = frames.back();
            if (pos < adj[v].size()) {
                const std::uint32_t w = adj[v][pos++];
                if (index[w] == kUnvisited) {
                    index[w] = lowlink[w] = next_index++;
                    stack.push_back(w);
                    on_stack[w] = 1;
                    frames.emplace_back(w, 0);
                } else if (on_stack[w]) {
                    lowlink[v] = std::min(lowlink[v], index[w]);
                }
                continue;
            }
            const std::uint32_t done = v;
            frames.pop_back();
            if (!frames.empty()) {
                auto& parent = frames.back().first;
                lowlink[parent] = std::min(lowlink[parent], lowlink[done]);
            }
            if (lowlink[done] == index[done]) {
                std::uint32_t w;
                do {
                    w = stack.back();
                    stack.pop_back();
                    on_stack[w] = 0;
                    comp[w] = next_comp;
                } while (w != done);
                ++next_comp;
            }
        }
    }
    if (component_count) *component_count = next_comp;
    return comp;
}

namespace {

/// Kahn's algorithm always taking the smallest eligible id.
std::vector<std::uint32_t> min_topological_order(std::uint32_t count,
                                                 const std::vector<LocalEdge>& edges) {
    std::vector<std::vector<std::uint32_t>> out(count);
    std::vector<std::uint32_t> indegree(count, 0);
    for (const auto& [u, v] : edges) {
        out[u].push_back(v);
        ++indegree[v];
    }
    std::priority_queue<std::uint32_t, std::vector<std::uint32_t>, std::greater<>> ready;
    for (std::uint32_t i = 0; i < count; ++i) {
        if (indegree[i] == 0) ready.push(i);
    }
    std::vector<std::uint32_t> order;
    order.reserve(count);
    while (!ready.empty()) {
        const auto u = ready.top();
        ready.pop();
        order.push_back(u);
        for (auto v : out[u]) {
            if (--indegree[v] == 0) ready.push(v);
        }
    }
    return order;
}

}  // namespace

SliceOrder condense_and_linearize(const PrecedenceGraph& graph, std::uint64_t slice_index) {
    const auto k = static_cast<std::uint32_t>(graph.vertices.size());
    SliceOrder result;
    result.slice_index = slice_index;
    if (k == 0) return result;

    std::vector<LocalEdge> all;
    all.reserve(graph.causal_edges.size() + graph.svp_edges.size());
    all.insert(all.end(), graph.causal_edges.begin(), graph.causal_edges.end());
    all.insert(all.end(), graph.svp_edges.begin(), graph.svp_edges.end());

    std::uint32_t comp_count = 0;
    const auto comp = strongly_connected_components(k, all, &comp_count);

    // Relabel components by their kappa-minimal member so that the min-id
    // topological sort over components breaks ties by kappa(C).
    constexpr std::uint32_t kNone = UINT32_MAX;
    std::vector<std::uint32_t> rank_of(comp_count, kNone);
    std::vector<std::uint32_t> leader;  // rank -> min member
    for (std::uint32_t v = 0; v < k; ++v) {
        if (rank_of[comp[v]] == kNone) {
            rank_of[comp[v]] = static_cast<std::uint32_t>(leader.size());
            leader.push_back(v);
        }
    }
    std::vector<std::vector<std::uint32_t>> members(comp_count);
    for (std::uint32_t v = 0; v < k; ++v) members[rank_of[comp[v]]].push_back(v);

    std::vector<LocalEdge> dag_edges;
    std::vector<std::vector<LocalEdge>> inner_causal(comp_count);
    for (const auto& [u, v] : all) {
        const auto cu = rank_of[comp[u]];
        const auto cv = rank_of[comp[v]];
        if (cu != cv) dag_edges.emplace_back(cu, cv);
    }
    std::sort(dag_edges.begin(), dag_edges.end());
    dag_edges.erase(std::unique(dag_edges.begin(), dag_edges.end()), dag_edges.end());

    std::vector<std::uint32_t> local_pos(k, 0);
    for (const auto& group : members) {
        for (std::uint32_t i = 0; i < group.size(); ++i) local_pos[group[i]] = i;
    }
    for (const auto& [u, v] : graph.causal_edges) {
        const auto cu = rank_of[comp[u]];
        if (cu == rank_of[comp[v]]) inner_causal[cu].emplace_back(local_pos[u], local_pos[v]);
    }

    result.ordered.reserve(k);
    for (auto c : min_topological_order(comp_count, dag_edges)) {
        const auto& group = members[c];
        const auto inner =
            min_topological_order(static_cast<std::uint32_t>(group.size()), inner_causal[c]);
        for (auto i : inner) result.ordered.push_back(graph.vertices[group[i]]);
    }

    for (const auto& [u, v] : graph.svp_edges) {
        if (comp[u] != comp[v]) result.enforceable_svp.emplace_back(graph.vertices[u], graph.vertices[v]);
    }
    std::sort(result.enforceable_svp.begin(), result.enforceable_svp.end());
    return result;
}

}  // namespace mrv
