#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "dcmbqc/layout.hpp"
#include "dcmbqc/model.hpp"
#include "dcmbqc/schedule.hpp"

namespace dcmbqc {

/// Required photon lifetime breakdown, all in clock cycles.
/// tau_photon = max(tau_local, tau_remote); in single-QPU mode tau_remote
/// is 0 and tau_local = max(tau_fusee, tau_measuree).
struct LifetimeReport {
    std::int64_t tau_fusee = 0;
    std::int64_t tau_measuree = 0;
    std::int64_t tau_local = 0;
    std::int64_t tau_remote = 0;
    std::int64_t tau_photon = 0;
    std::int64_t exec_time = 0;       ///< makespan: latest occupied slot
    double loss_probability = 0.0;    ///< at clock_ns, derived
    double clock_ns = 0.0;

    bool operator==(const LifetimeReport&) const = default;
};

/// Lifetime of a single-QPU plan. Fusees wait |layer(u) - layer(v)| for
/// their partner; a measuree waits until one cycle after the last of its
/// own arrival and every parent's measurement. Removees contribute nothing.
LifetimeReport lifetime_single(const ExecutionPlan& plan, const DependencyGraph& deps,
                               double clock_ns = 0.0);

/// Distributed lifetime: the same recurrence with layer indices replaced by
/// main-task start times, globally across QPUs; tau_remote is the largest
/// gap between a sync task and either of its main tasks. Validates the
/// schedule first.
LifetimeReport lifetime_distributed(const LspInstance& inst, const Schedule& sched,
                                    const DependencyGraph& deps, double clock_ns = 0.0);

/// Probability of losing a photon stored for `cycles` clock cycles in a
/// fiber delay line (0.2 dB/km attenuation, signal at 2/3 vacuum light
/// speed taken as 2e5 km/s).
double loss_probability(std::int64_t cycles, double cycle_ns);

/// Reusable evaluator for scheduler hot loops: the dependency topo order
/// and parent lists are built once, eval() allocates nothing.
class LifetimeEvaluator {
public:
    explicit LifetimeEvaluator(const LspInstance& inst);

    LifetimeReport eval(const Schedule& sched) const;
    std::int64_t cost(const Schedule& sched) const { return eval(sched).tau_photon; }

    /// Task ids for bottleneck attribution: mains are 0..M-1, syncs M..M+K-1.
    struct Bottleneck {
        std::int64_t tau = 0;
        std::uint32_t task = 0; ///< lowest task id attaining tau
    };
    Bottleneck bottleneck(const Schedule& sched) const;

    const LspInstance& instance() const { return *inst_; }
    std::span<const NodeId> topo_order() const { return topo_; }
    std::span<const std::uint32_t> parents_of(NodeId u) const {
        return {parent_adj_.data() + parent_xadj_[u], parent_adj_.data() + parent_xadj_[u + 1]};
    }
    std::span<const std::uint32_t> children_of(NodeId u) const {
        return {child_adj_.data() + child_xadj_[u], child_adj_.data() + child_xadj_[u + 1]};
    }
    /// maxparent values from the most recent eval(); input to local rescans.
    std::span<const std::int64_t> maxparent_scratch() const { return mp_; }
    std::span<const std::int64_t> net_scratch() const { return net_; }

private:
    const LspInstance* inst_;
    std::vector<NodeId> topo_;
    std::vector<std::uint32_t> parent_xadj_, parent_adj_;
    std::vector<std::uint32_t> child_xadj_, child_adj_;
    // scratch reused across eval calls; no per-call horizon allocation
    mutable std::vector<std::int64_t> mp_;
    mutable std::vector<std::int64_t> net_;
};

namespace detail {
/// Max |net[u] - net[v]| over pairs; serial and OpenMP variants produce
/// identical results (integer max reduction).
std::int64_t fusee_span_serial(std::span<const Edge> pairs, std::span<const std::int64_t> net);
std::int64_t fusee_span_parallel(std::span<const Edge> pairs, std::span<const std::int64_t> net);
} // namespace detail

} // namespace dcmbqc
