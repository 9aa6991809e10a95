#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "dcmbqc/model.hpp"

namespace dcmbqc {

/// Usable fraction of a grid layer once routing overhead is discounted.
/// Calibrated to the layer occupancy a routed mapping sustains in practice
/// (a few percent of raw grid area); override with --fill-factor.
constexpr double kDefaultFillFactor = 0.05;

/// Per-QPU grid abstraction. The fill factor discounts raw grid area for
/// routing overhead; what remains is the node capacity of one execution
/// layer.
struct GridSpec {
    std::uint32_t side = 1; ///< L of an LxL layer
    double fill_factor = kDefaultFillFactor; ///< in (0, 1]

    std::int64_t capacity() const {
        return static_cast<std::int64_t>(fill_factor * side * static_cast<double>(side));
    }
};

/// Grid side for a program of the given qubit count: L = 2*ceil(sqrt(q)) - 1.
GridSpec default_grid(std::uint32_t qubits, double fill_factor = kDefaultFillFactor);

enum class LayerOrdering : std::uint8_t { Bfs, CuthillMckee };

LayerOrdering parse_ordering(const std::string& name);
std::string ordering_name(LayerOrdering o);

struct FuseePair {
    NodeId u, v;
    std::uint32_t layer_u, layer_v;
};

struct Connector {
    Edge edge;          ///< the cut edge, normalized
    NodeId local;       ///< this QPU's endpoint
    std::uint32_t layer; ///< execution layer holding the local endpoint
};

/// One QPU's compiled output: an ordered list of capacity-bounded execution
/// layers over global node ids, plus the intra-QPU edges that span layers
/// (fusee pairs) and one connector record per incident cut edge.
struct ExecutionPlan {
    std::uint32_t qpu = 0;
    std::vector<std::vector<NodeId>> layers;
    std::vector<std::int32_t> node_layer; ///< dense over the global node space; -1 absent
    std::vector<FuseePair> fusee_pairs;
    std::vector<Connector> connectors;
};

/// One part of a partitioned graph, in global node ids.
struct SubgraphView {
    std::vector<NodeId> nodes;       ///< ascending
    std::vector<Edge> intra_edges;   ///< both endpoints inside
    std::vector<Edge> cut_incident;  ///< exactly one endpoint inside
};

/// Orders the part's nodes (BFS from the minimum-id node, or reverse
/// Cuthill-McKee) and packs them greedily into layers of at most
/// grid.capacity() nodes. Deterministic; `seed` is reserved for future
/// randomized orderings.
ExecutionPlan assemble_layers(const SubgraphView& part, const GridSpec& grid,
                              LayerOrdering ordering, std::uint64_t seed, std::uint32_t qpu,
                              std::uint32_t global_nodes);

/// Splits a graph into per-part views according to an assignment.
std::vector<SubgraphView> split_parts(const ComputationGraph& g,
                                      std::span<const std::uint32_t> assignment,
                                      std::uint32_t k);

} // namespace dcmbqc
