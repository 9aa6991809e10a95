#pragma once

#include <algorithm>
#include <random>
#include <set>
#include <vector>

#include "dcmbqc/model.hpp"
#include "dcmbqc/schedule.hpp"

namespace dcmbqc::test {

inline double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline std::uint64_t pick(std::mt19937_64& rng, std::uint64_t n) { return rng() % n; }

/// Random valid bundle: arbitrary simple graph, removee flags, and a DAG of
/// dependencies (edges oriented low->high id) on the measuree nodes.
inline ProgramBundle random_bundle(std::mt19937_64& rng, std::uint32_t max_nodes = 30) {
    std::uint32_t n = 2 + static_cast<std::uint32_t>(pick(rng, max_nodes - 1));
    ProgramBundle b;
    b.graph.num_nodes = n;
    b.deps.num_nodes = n;
    for (NodeId i = 0; i < n; ++i) {
        bool rem = pick(rng, 5) == 0;
        b.graph.roles.push_back(rem ? NodeRole::Removee : NodeRole::Measuree);
        b.graph.wires.push_back(-1);
        b.deps.removee.push_back(rem ? 1 : 0);
        b.deps.angles.push_back(uniform01(rng) * 6.0 - 3.0);
    }
    std::set<Edge> edges;
    std::uint32_t target_edges = static_cast<std::uint32_t>(pick(rng, 3 * n));
    for (std::uint32_t i = 0; i < target_edges; ++i) {
        NodeId u = static_cast<NodeId>(pick(rng, n));
        NodeId v = static_cast<NodeId>(pick(rng, n));
        if (u == v) continue;
        edges.insert({std::min(u, v), std::max(u, v)});
    }
    b.graph.edges.assign(edges.begin(), edges.end());

    std::set<Edge> deps;
    std::uint32_t target_deps = static_cast<std::uint32_t>(pick(rng, 2 * n));
    for (std::uint32_t i = 0; i < target_deps; ++i) {
        NodeId u = static_cast<NodeId>(pick(rng, n));
        NodeId v = static_cast<NodeId>(pick(rng, n));
        if (u == v || b.deps.removee[u] || b.deps.removee[v]) continue;
        deps.insert({std::min(u, v), std::max(u, v)}); // low->high keeps it acyclic
    }
    b.deps.dep_edges.assign(deps.begin(), deps.end());
    b.meta = {"random", n, 0, "test"};
    return b;
}

/// Random single-QPU plan over n nodes: nodes spread over a few layers with
/// fusee pairs drawn from a random edge set.
struct PlanDeps {
    struct Plan {
        std::vector<std::vector<NodeId>> layers;
        std::vector<std::int32_t> node_layer;
        std::vector<std::pair<NodeId, NodeId>> fusee_edges;
    };
    Plan plan;
    DependencyGraph deps;
};

inline PlanDeps random_plan_deps(std::mt19937_64& rng, std::uint32_t max_nodes = 25) {
    std::uint32_t n = 1 + static_cast<std::uint32_t>(pick(rng, max_nodes));
    std::uint32_t layers = 1 + static_cast<std::uint32_t>(pick(rng, 8));
    PlanDeps out;
    out.plan.layers.resize(layers);
    out.plan.node_layer.resize(n);
    for (NodeId u = 0; u < n; ++u) {
        std::uint32_t l = static_cast<std::uint32_t>(pick(rng, layers));
        out.plan.layers[l].push_back(u);
        out.plan.node_layer[u] = static_cast<std::int32_t>(l);
    }
    out.deps.num_nodes = n;
    for (NodeId u = 0; u < n; ++u) {
        out.deps.removee.push_back(pick(rng, 6) == 0 ? 1 : 0);
        out.deps.angles.push_back(0.0);
    }
    std::set<Edge> graph_edges, dep_edges;
    for (std::uint32_t i = 0; i < 2 * n; ++i) {
        NodeId u = static_cast<NodeId>(pick(rng, n));
        NodeId v = static_cast<NodeId>(pick(rng, n));
        if (u == v) continue;
        graph_edges.insert({std::min(u, v), std::max(u, v)});
        if (!out.deps.removee[u] && !out.deps.removee[v] && pick(rng, 2) == 0)
            dep_edges.insert({std::min(u, v), std::max(u, v)});
    }
    for (const auto& e : graph_edges)
        if (out.plan.node_layer[e.first] != out.plan.node_layer[e.second])
            out.plan.fusee_edges.push_back(e);
    out.deps.dep_edges.assign(dep_edges.begin(), dep_edges.end());
    return out;
}

/// Random scheduling instance: a handful of QPUs with short task lists,
/// random dependencies, fusee pairs and sync links.
inline LspInstance random_instance(std::mt19937_64& rng) {
    LspInstance inst;
    inst.num_qpus = 1 + static_cast<std::uint32_t>(pick(rng, 4));
    inst.k_max = 1 + static_cast<std::uint32_t>(pick(rng, 4));
    inst.qpu_offset.push_back(0);
    std::uint32_t node = 0;
    for (std::uint32_t q = 0; q < inst.num_qpus; ++q) {
        std::uint32_t tasks = 1 + static_cast<std::uint32_t>(pick(rng, 5));
        for (std::uint32_t t = 0; t < tasks; ++t) {
            MainTask mt;
            std::uint32_t sz = 1 + static_cast<std::uint32_t>(pick(rng, 3));
            for (std::uint32_t i = 0; i < sz; ++i) mt.nodes.push_back(node++);
            inst.main_tasks.push_back(std::move(mt));
            inst.main_qpu.push_back(q);
        }
        inst.qpu_offset.push_back(inst.num_mains());
    }
    inst.node_main.resize(node);
    for (std::uint32_t m = 0; m < inst.num_mains(); ++m)
        for (NodeId u : inst.main_tasks[m].nodes) inst.node_main[u] = static_cast<std::int32_t>(m);

    inst.deps.num_nodes = node;
    inst.deps.angles.assign(node, 0.0);
    inst.deps.removee.assign(node, 0);
    std::set<Edge> dep_edges;
    for (std::uint32_t i = 0; i < node; ++i) {
        NodeId u = static_cast<NodeId>(pick(rng, node));
        NodeId v = static_cast<NodeId>(pick(rng, node));
        if (u != v) dep_edges.insert({std::min(u, v), std::max(u, v)});
    }
    inst.deps.dep_edges.assign(dep_edges.begin(), dep_edges.end());

    std::set<Edge> fusee;
    for (std::uint32_t i = 0; i < node; ++i) {
        NodeId u = static_cast<NodeId>(pick(rng, node));
        NodeId v = static_cast<NodeId>(pick(rng, node));
        if (u == v || inst.node_main[u] == inst.node_main[v]) continue;
        if (inst.main_qpu[inst.node_main[u]] != inst.main_qpu[inst.node_main[v]]) continue;
        fusee.insert({std::min(u, v), std::max(u, v)});
    }
    inst.fusee_pairs.assign(fusee.begin(), fusee.end());

    if (inst.num_qpus > 1) {
        std::uint32_t syncs = static_cast<std::uint32_t>(pick(rng, 6));
        for (std::uint32_t k = 0; k < syncs; ++k) {
            std::uint32_t a = static_cast<std::uint32_t>(pick(rng, inst.num_mains()));
            std::uint32_t b = static_cast<std::uint32_t>(pick(rng, inst.num_mains()));
            if (inst.main_qpu[a] == inst.main_qpu[b]) continue;
            if (inst.main_qpu[a] > inst.main_qpu[b]) std::swap(a, b);
            inst.sync_tasks.push_back(
                {a, b, {inst.main_tasks[a].nodes[0], inst.main_tasks[b].nodes[0]}});
        }
    }
    inst.horizon = 2 * (inst.num_mains() + inst.num_syncs());
    return inst;
}

/// Connected simple graph on n nodes (random spanning tree plus extras).
inline ComputationGraph random_connected_graph(std::mt19937_64& rng, std::uint32_t n,
                                               std::uint32_t extra_edges) {
    ComputationGraph g;
    g.num_nodes = n;
    g.roles.assign(n, NodeRole::Measuree);
    g.wires.assign(n, -1);
    std::set<Edge> edges;
    for (NodeId v = 1; v < n; ++v) {
        NodeId u = static_cast<NodeId>(pick(rng, v));
        edges.insert({u, v});
    }
    for (std::uint32_t i = 0; i < extra_edges; ++i) {
        NodeId u = static_cast<NodeId>(pick(rng, n));
        NodeId v = static_cast<NodeId>(pick(rng, n));
        if (u != v) edges.insert({std::min(u, v), std::max(u, v)});
    }
    g.edges.assign(edges.begin(), edges.end());
    return g;
}

} // namespace dcmbqc::test
