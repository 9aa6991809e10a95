#include "dcmbqc/layout.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

namespace dcmbqc {

GridSpec default_grid(std::uint32_t qubits, double fill_factor) {
    if (qubits == 0) throw ValidationError("grid: qubit count must be positive");
    if (!(fill_factor > 0.0 && fill_factor <= 1.0))
        throw ValidationError("grid: fill factor must be in (0, 1]");
    std::uint32_t root = static_cast<std::uint32_t>(std::ceil(std::sqrt(static_cast<double>(qubits))));
    return GridSpec{2 * root - 1, fill_factor};
}

LayerOrdering parse_ordering(const std::string& name) {
    if (name == "bfs") return LayerOrdering::Bfs;
    if (name == "cuthill_mckee" || name == "rcm") return LayerOrdering::CuthillMckee;
    throw UsageError("unknown ordering: " + name + " (expected bfs or cuthill_mckee)");
}

std::string ordering_name(LayerOrdering o) {
    return o == LayerOrdering::Bfs ? "bfs" : "cuthill_mckee";
}

std::vector<SubgraphView> split_parts(const ComputationGraph& g,
                                      std::span<const std::uint32_t> assignment,
                                      std::uint32_t k) {
    std::vector<SubgraphView> parts(k);
    for (NodeId v = 0; v < g.num_nodes; ++v) parts[assignment[v]].nodes.push_back(v);
    for (const auto& e : g.edges) {
        std::uint32_t pu = assignment[e.first], pv = assignment[e.second];
        if (pu == pv) {
            parts[pu].intra_edges.push_back(e);
        } else {
            parts[pu].cut_incident.push_back(e);
            parts[pv].cut_incident.push_back(e);
        }
    }
    return parts;
}

namespace {

// Local adjacency over part-relative indices, neighbor lists ascending by
// global id (local index order preserves global order).
struct LocalAdj {
    std::vector<std::uint32_t> xadj;
    std::vector<std::uint32_t> adj;
};

LocalAdj build_local(const SubgraphView& part, std::span<const std::int32_t> local_of) {
    std::uint32_t n = static_cast<std::uint32_t>(part.nodes.size());
    std::vector<Edge> local_edges;
    local_edges.reserve(part.intra_edges.size());
    for (const auto& [u, v] : part.intra_edges)
        local_edges.emplace_back(static_cast<NodeId>(local_of[u]), static_cast<NodeId>(local_of[v]));
    Csr csr = build_csr(n, local_edges);
    return {std::move(csr.xadj), std::move(csr.adj)};
}

std::vector<std::uint32_t> bfs_order(std::uint32_t n, const LocalAdj& a) {
    std::vector<std::uint32_t> order;
    order.reserve(n);
    std::vector<std::uint8_t> seen(n, 0);
    std::queue<std::uint32_t> q;
    std::uint32_t scan = 0;
    while (order.size() < n) {
        while (scan < n && seen[scan]) ++scan;
        q.push(scan);
        seen[scan] = 1;
        while (!q.empty()) {
            std::uint32_t v = q.front();
            q.pop();
            order.push_back(v);
            for (std::uint32_t i = a.xadj[v]; i < a.xadj[v + 1]; ++i) {
                std::uint32_t u = a.adj[i];
                if (!seen[u]) {
                    seen[u] = 1;
                    q.push(u);
                }
            }
        }
    }
    return order;
}

// Cuthill-McKee: per component, start from a minimum-degree node and visit
// neighbors in ascending (degree, id) order; the concatenated order is
// reversed at the end.
std::vector<std::uint32_t> rcm_order(std::uint32_t n, const LocalAdj& a) {
    auto degree = [&](std::uint32_t v) { return a.xadj[v + 1] - a.xadj[v]; };
    std::vector<std::uint32_t> order;
    order.reserve(n);
    std::vector<std::uint8_t> seen(n, 0);
    std::vector<std::uint8_t> in_comp(n, 0);
    std::vector<std::uint32_t> comp, nbrs;
    std::uint32_t scan = 0;
    while (order.size() < n) {
        while (scan < n && seen[scan]) ++scan;
        // find the minimum-degree node of this component
        std::uint32_t start = scan;
        comp.clear();
        {
            std::queue<std::uint32_t> cq;
            cq.push(scan);
            in_comp[scan] = 1;
            while (!cq.empty()) {
                std::uint32_t v = cq.front();
                cq.pop();
                comp.push_back(v);
                for (std::uint32_t i = a.xadj[v]; i < a.xadj[v + 1]; ++i)
                    if (!in_comp[a.adj[i]]) {
                        in_comp[a.adj[i]] = 1;
                        cq.push(a.adj[i]);
                    }
            }
            for (std::uint32_t v : comp)
                if (degree(v) < degree(start) || (degree(v) == degree(start) && v < start))
                    start = v;
        }
        std::queue<std::uint32_t> q;
        q.push(start);
        seen[start] = 1;
        while (!q.empty()) {
            std::uint32_t v = q.front();
            q.pop();
            order.push_back(v);
            nbrs.clear();
            for (std::uint32_t i = a.xadj[v]; i < a.xadj[v + 1]; ++i)
                if (!seen[a.adj[i]]) nbrs.push_back(a.adj[i]);
            std::sort(nbrs.begin(), nbrs.end(), [&](std::uint32_t x, std::uint32_t y) {
                return degree(x) != degree(y) ? degree(x) < degree(y) : x < y;
            });
            for (std::uint32_t u : nbrs) {
                seen[u] = 1;
                q.push(u);
            }
        }
    }
    std::reverse(order.begin(), order.end());
    return order;
}

} // namespace

ExecutionPlan assemble_layers(const SubgraphView& part, const GridSpec& grid,
                              LayerOrdering ordering, std::uint64_t /*seed*/, std::uint32_t qpu,
                              std::uint32_t global_nodes) {
    std::int64_t cap = grid.capacity();
    if (cap < 1) throw ValidationError("grid: layer capacity must be at least 1");

    std::uint32_t n = static_cast<std::uint32_t>(part.nodes.size());
    std::vector<std::int32_t> local_of(global_nodes, -1);
    for (std::uint32_t i = 0; i < n; ++i) local_of[part.nodes[i]] = static_cast<std::int32_t>(i);

    ExecutionPlan plan;
    plan.qpu = qpu;
    plan.node_layer.assign(global_nodes, -1);
    if (n == 0) return plan;

    LocalAdj adj = build_local(part, local_of);
    std::vector<std::uint32_t> order =
        ordering == LayerOrdering::Bfs ? bfs_order(n, adj) : rcm_order(n, adj);

    std::uint32_t num_layers = static_cast<std::uint32_t>((n + cap - 1) / cap);
    plan.layers.resize(num_layers);
    for (std::uint32_t pos = 0; pos < n; ++pos) {
        NodeId global = part.nodes[order[pos]];
        std::uint32_t layer = pos / static_cast<std::uint32_t>(cap);
        plan.layers[layer].push_back(global);
        plan.node_layer[global] = static_cast<std::int32_t>(layer);
    }

    for (const auto& [u, v] : part.intra_edges) {
        std::uint32_t lu = static_cast<std::uint32_t>(plan.node_layer[u]);
        std::uint32_t lv = static_cast<std::uint32_t>(plan.node_layer[v]);
        if (lu != lv) plan.fusee_pairs.push_back({u, v, lu, lv});
    }
    for (const auto& e : part.cut_incident) {
        NodeId local = local_of[e.first] >= 0 ? e.first : e.second;
        plan.connectors.push_back({e, local, static_cast<std::uint32_t>(plan.node_layer[local])});
    }
    return plan;
}

} // namespace dcmbqc
