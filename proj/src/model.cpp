#include "dcmbqc/model.hpp"

#include <algorithm>
#include <queue>
#include <sstream>

namespace dcmbqc {

Csr build_csr(std::uint32_t num_nodes, std::span<const Edge> edges) {
    Csr csr;
    csr.xadj.assign(num_nodes + 1, 0);
    for (const auto& [u, v] : edges) {
        ++csr.xadj[u + 1];
        ++csr.xadj[v + 1];
    }
    for (std::uint32_t i = 0; i < num_nodes; ++i) csr.xadj[i + 1] += csr.xadj[i];
    csr.adj.resize(csr.xadj[num_nodes]);
    std::vector<std::uint32_t> fill(csr.xadj.begin(), csr.xadj.end() - 1);
    for (const auto& [u, v] : edges) {
        csr.adj[fill[u]++] = v;
        csr.adj[fill[v]++] = u;
    }
    for (std::uint32_t i = 0; i < num_nodes; ++i)
        std::sort(csr.adj.begin() + csr.xadj[i], csr.adj.begin() + csr.xadj[i + 1]);
    return csr;
}

void normalize_edges(std::vector<Edge>& edges, const char* what) {
    for (auto& [u, v] : edges) {
        if (u == v) {
            std::ostringstream os;
            os << what << ": self-loop on node " << u;
            throw ValidationError(os.str());
        }
        if (u > v) std::swap(u, v);
    }
    std::sort(edges.begin(), edges.end());
    auto dup = std::adjacent_find(edges.begin(), edges.end());
    if (dup != edges.end()) {
        std::ostringstream os;
        os << what << ": duplicate edge (" << dup->first << ", " << dup->second << ")";
        throw ValidationError(os.str());
    }
}

void validate_graph(const ComputationGraph& g) {
    if (g.roles.size() != g.num_nodes || g.wires.size() != g.num_nodes)
        throw ValidationError("graph: per-node metadata size does not match node count");
    Edge prev{0, 0};
    bool first = true;
    for (const auto& e : g.edges) {
        if (e.first >= e.second) {
            std::ostringstream os;
            if (e.first == e.second)
                os << "graph: self-loop on node " << e.first;
            else
                os << "graph: edge (" << e.first << ", " << e.second << ") not stored u < v";
            throw ValidationError(os.str());
        }
        if (e.second >= g.num_nodes) {
            std::ostringstream os;
            os << "graph: edge references undeclared node " << e.second;
            throw ValidationError(os.str());
        }
        if (!first && !(prev < e)) {
            std::ostringstream os;
            if (prev == e)
                os << "graph: duplicate edge (" << e.first << ", " << e.second << ")";
            else
                os << "graph: edges not sorted ascending at (" << e.first << ", " << e.second << ")";
            throw ValidationError(os.str());
        }
        prev = e;
        first = false;
    }
}

void validate_deps(const DependencyGraph& d) {
    if (d.angles.size() != d.num_nodes || d.removee.size() != d.num_nodes)
        throw ValidationError("deps: per-node metadata size does not match node count");
    for (const auto& [u, v] : d.dep_edges) {
        if (u >= d.num_nodes || v >= d.num_nodes) {
            std::ostringstream os;
            os << "deps: edge references undeclared node " << std::max(u, v);
            throw ValidationError(os.str());
        }
        if (u == v) {
            std::ostringstream os;
            os << "deps: self-dependency on node " << u;
            throw ValidationError(os.str());
        }
        if (d.removee[u] || d.removee[v]) {
            std::ostringstream os;
            os << "deps: removee node " << (d.removee[u] ? u : v) << " carries a dependency edge";
            throw ValidationError(os.str());
        }
    }
    topo_sort(d); // throws with a witness cycle when cyclic
}

void validate_bundle(const ProgramBundle& b) {
    validate_graph(b.graph);
    if (b.deps.num_nodes != b.graph.num_nodes)
        throw ValidationError("bundle: graph and deps disagree on node count");
    for (std::uint32_t i = 0; i < b.graph.num_nodes; ++i) {
        bool rem = b.graph.roles[i] == NodeRole::Removee;
        if (rem != static_cast<bool>(b.deps.removee[i])) {
            std::ostringstream os;
            os << "bundle: node " << i << " role disagrees between graph and deps";
            throw ValidationError(os.str());
        }
    }
    validate_deps(b.deps);
}

namespace {

// Walks backward through in-edges until a node repeats; reports that loop.
std::string witness_cycle(const DependencyGraph& d, std::span<const std::uint32_t> remaining_in) {
    std::uint32_t n = d.num_nodes;
    std::vector<std::vector<NodeId>> parents(n);
    for (const auto& [u, v] : d.dep_edges) parents[v].push_back(u);

    NodeId start = 0;
    for (NodeId i = 0; i < n; ++i)
        if (remaining_in[i] > 0) { start = i; break; }

    std::vector<std::int32_t> seen_at(n, -1);
    std::vector<NodeId> path;
    NodeId cur = start;
    while (seen_at[cur] < 0) {
        seen_at[cur] = static_cast<std::int32_t>(path.size());
        path.push_back(cur);
        NodeId next = cur;
        for (NodeId p : parents[cur])
            if (remaining_in[p] > 0) { next = p; break; }
        cur = next;
    }
    std::ostringstream os;
    os << "deps: dependency cycle:";
    for (std::size_t i = path.size(); i-- > static_cast<std::size_t>(seen_at[cur]);)
        os << " " << path[i] << " ->";
    os << " " << cur;
    return os.str();
}

} // namespace

std::vector<NodeId> topo_sort(const DependencyGraph& deps) {
    std::uint32_t n = deps.num_nodes;
    std::vector<std::uint32_t> indeg(n, 0);
    std::vector<std::vector<NodeId>> out(n);
    for (const auto& [u, v] : deps.dep_edges) {
        out[u].push_back(v);
        ++indeg[v];
    }
    std::priority_queue<NodeId, std::vector<NodeId>, std::greater<>> ready;
    for (NodeId i = 0; i < n; ++i)
        if (indeg[i] == 0) ready.push(i);

    std::vector<NodeId> order;
    order.reserve(n);
    while (!ready.empty()) {
        NodeId u = ready.top();
        ready.pop();
        order.push_back(u);
        for (NodeId v : out[u])
            if (--indeg[v] == 0) ready.push(v);
    }
    if (order.size() != n) throw ValidationError(witness_cycle(deps, indeg));
    return order;
}

} // namespace dcmbqc
