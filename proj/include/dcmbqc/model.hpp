#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "dcmbqc/errors.hpp"

namespace dcmbqc {

/// Node ids are dense integers 0..n-1 so layer/schedule arrays can index by id.
using NodeId = std::uint32_t;

using Edge = std::pair<NodeId, NodeId>;

enum class NodeRole : std::uint8_t {
    Measuree, ///< consumed by an adaptive measurement
    Removee,  ///< discarded via a Z-basis measurement; zero lifetime cost
};

/// Undirected graph whose nodes are resource units and edges are fusions.
/// Edges are stored normalized (u < v) and sorted ascending.
struct ComputationGraph {
    std::uint32_t num_nodes = 0;
    std::vector<Edge> edges;
    std::vector<NodeRole> roles;      ///< per node; size num_nodes
    std::vector<std::int32_t> wires;  ///< per node wire index, -1 when unset

    bool operator==(const ComputationGraph&) const = default;
};

/// DAG of real-time dependencies over the same node space as the companion
/// ComputationGraph: edge (u, v) means the basis of v depends on the outcome
/// of u. Removee nodes carry no dependency edges.
struct DependencyGraph {
    std::uint32_t num_nodes = 0;
    std::vector<Edge> dep_edges;       ///< ordered pairs (u, v), sorted ascending
    std::vector<double> angles;        ///< measurement angle per node, radians
    std::vector<std::uint8_t> removee; ///< per-node flag mirroring graph roles

    bool operator==(const DependencyGraph&) const = default;
};

struct BundleMeta {
    std::string name;
    std::uint32_t qubits = 0;
    std::uint64_t seed = 0;
    std::string generator;

    bool operator==(const BundleMeta&) const = default;
};

/// Compiler pipeline input: one computation graph plus its dependency DAG.
struct ProgramBundle {
    ComputationGraph graph;
    DependencyGraph deps;
    BundleMeta meta;

    bool operator==(const ProgramBundle&) const = default;
};

/// Compressed adjacency built from an undirected edge list; neighbor lists
/// are sorted ascending.
struct Csr {
    std::vector<std::uint32_t> xadj; ///< size n+1
    std::vector<NodeId> adj;

    std::span<const NodeId> neighbors(NodeId v) const {
        return {adj.data() + xadj[v], adj.data() + xadj[v + 1]};
    }
    std::uint32_t degree(NodeId v) const { return xadj[v + 1] - xadj[v]; }
};

Csr build_csr(std::uint32_t num_nodes, std::span<const Edge> edges);

/// Normalizes (u < v) and sorts an edge list in place; rejects self-loops
/// and duplicates.
void normalize_edges(std::vector<Edge>& edges, const char* what);

/// Throws ValidationError naming the offending element when any type
/// invariant is broken.
void validate_graph(const ComputationGraph& g);
void validate_deps(const DependencyGraph& d);
void validate_bundle(const ProgramBundle& b);

/// Deterministic topological order of the dependency DAG; ties are broken
/// by ascending NodeId. Throws ValidationError carrying a witness cycle when
/// the graph is cyclic.
std::vector<NodeId> topo_sort(const DependencyGraph& deps);

} // namespace dcmbqc
