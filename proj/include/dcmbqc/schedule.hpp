#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "dcmbqc/layout.hpp"
#include "dcmbqc/model.hpp"
#include "dcmbqc/partition.hpp"

namespace dcmbqc {

/// One execution layer of one QPU, in plan order.
struct MainTask {
    std::vector<NodeId> nodes;
};

/// One inter-QPU connection: a cut edge whose endpoints live in main tasks
/// on distinct QPUs. Both sides must start it at the same slot.
struct SyncTask {
    std::uint32_t main_a = 0; ///< global main-task id
    std::uint32_t main_b = 0;
    Edge edge;
};

/// Layer scheduling instance: per-QPU ordered main tasks, one sync task per
/// cut edge, the per-slot connection capacity k_max and a horizon T.
/// Main tasks are stored QPU-major; global main id = qpu_offset[q] + index.
struct LspInstance {
    std::uint32_t num_qpus = 0;
    std::vector<std::uint32_t> qpu_offset; ///< size num_qpus + 1
    std::vector<MainTask> main_tasks;
    std::vector<std::uint32_t> main_qpu;   ///< qpu of each main task
    std::vector<SyncTask> sync_tasks;
    std::vector<Edge> fusee_pairs;         ///< intra-QPU edges spanning distinct tasks
    std::vector<std::int32_t> node_main;   ///< node -> global main id, -1 absent
    DependencyGraph deps;                  ///< shared node space
    std::uint32_t k_max = 1;
    std::uint32_t horizon = 0;

    std::uint32_t num_mains() const { return static_cast<std::uint32_t>(main_tasks.size()); }
    std::uint32_t num_syncs() const { return static_cast<std::uint32_t>(sync_tasks.size()); }
    /// 1-based layer index of a main task within its QPU.
    std::uint32_t plan_index(std::uint32_t m) const { return m - qpu_offset[main_qpu[m]] + 1; }
};

/// Start times, 1-based over the horizon.
struct Schedule {
    std::vector<std::uint32_t> main_start;
    std::vector<std::uint32_t> sync_start;

    bool operator==(const Schedule&) const = default;
};

struct Violation {
    std::uint32_t qpu;
    std::uint32_t slot;
    std::string what;
};

/// Builds an instance from per-QPU plans: one main task per execution layer
/// in plan order, one sync task per cut edge, horizon T = 2*(sum m_i + K).
/// Throws ValidationError when the two connector records of a cut edge
/// disagree.
LspInstance build_instance(std::span<const ExecutionPlan> plans, const PartitionResult& partition,
                           const DependencyGraph& deps, std::uint32_t k_max);

/// Checks machine exclusivity literally per (QPU, slot): at most one main
/// task, or up to k_max sync tasks, never both. Also range-checks starts.
/// Returns every violation found.
std::vector<Violation> validate(const LspInstance& inst, const Schedule& sched);

/// Priority-based list scheduler. A main task's priority is its layer index
/// j; a sync task's is (j + j')/2. Ties dispatch mains first, then lower
/// task id. Each task takes the earliest slot satisfying exclusivity on all
/// involved QPUs; sync tasks pack up to k_max per slot.
Schedule list_schedule(const LspInstance& inst);

struct BdirParams {
    double t0 = 10.0;
    double cooling = 0.95;
    std::uint32_t iters = 20;
    std::uint64_t seed = 0;
};

/// Bottleneck-driven iterative refinement: simulated annealing whose
/// neighborhood move pins the task attaining the current lifetime at its
/// locally optimal slot and re-lists the rest with priorities equal to
/// their previous start times. Returns the best schedule encountered, so
/// the result never costs more than `init`.
Schedule bdir(const LspInstance& inst, const Schedule& init, const BdirParams& params);

struct BruteResult {
    Schedule sched;
    std::int64_t cost = 0;
};

/// Exhaustive minimizer over start-time tuples for desk-scale instances.
/// Guarded: throws ValidationError when tasks > 10 or t_cap > 8.
BruteResult brute_force(const LspInstance& inst, std::uint32_t t_cap);

/// Test-harness reduction from graph layout: a single-QPU instance with one
/// main task per vertex and one fusee pair per edge, no sync tasks and no
/// dependencies. Its optimal lifetime equals the graph bandwidth.
LspInstance gbp_reduce(const ComputationGraph& g);

} // namespace dcmbqc
