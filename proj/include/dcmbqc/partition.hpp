#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "dcmbqc/model.hpp"

namespace dcmbqc {

struct PartitionConfig {
    std::uint32_t k = 1;     ///< QPU count
    double eps_q = 0.01;     ///< modularity improvement threshold
    double gamma = 1.02;     ///< imbalance step factor, > 1
    double alpha_max = 1.5;  ///< maximum imbalance factor, >= 1
    std::uint64_t seed = 0;
};

struct PartitionResult {
    std::vector<std::uint32_t> assignment; ///< node -> part in 0..k-1
    std::uint32_t k = 1;
    double imbalance_used = 1.0;           ///< the alpha this result was produced at
    std::vector<Edge> cut_edges;           ///< edges with endpoints in distinct parts
    double modularity = 0.0;
};

/// Newman modularity Q = sum_c (e_c/m - (d_c/(2m))^2); 0 for an edgeless
/// graph. Edge tallies run in parallel; the final fold over parts is a fixed
/// serial order so results are identical for any thread count.
double modularity(const ComputationGraph& g, std::span<const std::uint32_t> assignment);

/// Single-loop reference used by the unit tests and the kernel benchmark.
double modularity_serial(const ComputationGraph& g, std::span<const std::uint32_t> assignment);

/// Balanced k-way partition: heavy-edge-matching coarsening down to 20k
/// nodes, greedy BFS-region initial split, boundary Fiduccia-Mattheyses
/// refinement. The balance bound max part size <= alpha * ceil(n/k) holds
/// after every individual move. Deterministic per seed.
PartitionResult kway_partition(const ComputationGraph& g, std::uint32_t k, double alpha,
                               std::uint64_t seed);

/// Adaptive search over the imbalance factor: starts at alpha = 1, probes
/// alpha * gamma while modularity keeps improving by more than eps_q, backs
/// off on regressions, returns the best-modularity partition seen.
PartitionResult adaptive_partition(const ComputationGraph& g, const PartitionConfig& cfg);

/// Recomputes the cut edge list from an assignment (sorted ascending).
std::vector<Edge> cut_edges_of(const ComputationGraph& g,
                               std::span<const std::uint32_t> assignment);

/// Balance cap for a given graph size: floor(alpha * ceil(n/k)).
std::int64_t balance_cap(std::uint32_t n, std::uint32_t k, double alpha);

} // namespace dcmbqc
