#include "dcmbqc/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace dcmbqc {

namespace detail {

std::int64_t fusee_span_serial(std::span<const Edge> pairs, std::span<const std::int64_t> net) {
    std::int64_t best = 0;
    for (const auto& [u, v] : pairs) best = std::max(best, std::abs(net[u] - net[v]));
    return best;
}

std::int64_t fusee_span_parallel(std::span<const Edge> pairs, std::span<const std::int64_t> net) {
    std::int64_t best = 0;
#ifdef _OPENMP
#pragma omp parallel for reduction(max : best)
#endif
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(pairs.size()); ++i) {
        const auto& [u, v] = pairs[static_cast<std::size_t>(i)];
        best = std::max(best, std::abs(net[u] - net[v]));
    }
    return best;
}

} // namespace detail

namespace {

constexpr std::size_t kParallelFuseeThreshold = 1 << 14;

std::int64_t fusee_span(std::span<const Edge> pairs, std::span<const std::int64_t> net) {
    return pairs.size() >= kParallelFuseeThreshold ? detail::fusee_span_parallel(pairs, net)
                                                   : detail::fusee_span_serial(pairs, net);
}

struct ParentCsr {
    std::vector<std::uint32_t> xadj, adj;
};

ParentCsr build_parent_csr(const DependencyGraph& deps) {
    ParentCsr p;
    p.xadj.assign(deps.num_nodes + 1, 0);
    for (const auto& [u, v] : deps.dep_edges) ++p.xadj[v + 1];
    for (std::uint32_t i = 0; i < deps.num_nodes; ++i) p.xadj[i + 1] += p.xadj[i];
    p.adj.resize(deps.dep_edges.size());
    std::vector<std::uint32_t> fill(p.xadj.begin(), p.xadj.end() - 1);
    for (const auto& [u, v] : deps.dep_edges) p.adj[fill[v]++] = u;
    return p;
}

// maxparent recurrence over a topological order: a photon arrives at the
// measurement device one cycle after generation and can be measured one
// cycle after the last parent outcome. Removees are skipped from the max.
std::int64_t measuree_span(std::span<const NodeId> topo, std::span<const std::uint32_t> pxadj,
                           std::span<const std::uint32_t> padj,
                           std::span<const std::uint8_t> removee,
                           std::span<const std::int64_t> net, std::span<std::int64_t> mp) {
    std::int64_t best = 0;
    for (NodeId u : topo) {
        std::int64_t m = net[u] + 1;
        for (std::uint32_t i = pxadj[u]; i < pxadj[u + 1]; ++i)
            m = std::max(m, mp[padj[i]] + 1);
        mp[u] = m;
        if (!removee[u]) best = std::max(best, m - net[u]);
    }
    return best;
}

} // namespace

LifetimeReport lifetime_single(const ExecutionPlan& plan, const DependencyGraph& deps,
                               double clock_ns) {
    if (plan.node_layer.size() < deps.num_nodes)
        throw ValidationError("lifetime: plan does not cover the dependency node space");
    std::vector<std::int64_t> net(deps.num_nodes);
    for (NodeId u = 0; u < deps.num_nodes; ++u) {
        if (plan.node_layer[u] < 0) {
            std::ostringstream os;
            os << "lifetime: node " << u << " missing from plan";
            throw ValidationError(os.str());
        }
        net[u] = plan.node_layer[u];
    }

    std::vector<Edge> pairs;
    pairs.reserve(plan.fusee_pairs.size());
    for (const auto& f : plan.fusee_pairs) pairs.emplace_back(f.u, f.v);

    LifetimeReport r;
    r.tau_fusee = fusee_span(pairs, net);

    auto topo = topo_sort(deps);
    ParentCsr pc = build_parent_csr(deps);
    std::vector<std::int64_t> mp(deps.num_nodes, 0);
    r.tau_measuree = measuree_span(topo, pc.xadj, pc.adj, deps.removee, net, mp);

    r.tau_local = std::max(r.tau_fusee, r.tau_measuree);
    r.tau_remote = 0;
    r.tau_photon = r.tau_local;
    r.exec_time = static_cast<std::int64_t>(plan.layers.size());
    r.clock_ns = clock_ns;
    r.loss_probability = clock_ns > 0.0 ? loss_probability(r.tau_photon, clock_ns) : 0.0;
    return r;
}

double loss_probability(std::int64_t cycles, double cycle_ns) {
    if (cycles < 0) throw ValidationError("loss: cycle count must be non-negative");
    if (!(cycle_ns > 0.0)) throw ValidationError("loss: clock period must be positive");
    constexpr double kAttenuationDbPerKm = 0.2;
    constexpr double kSignalKmPerS = 2.0e5; // 2/3 of c in fiber delay lines
    double distance_km = static_cast<double>(cycles) * cycle_ns * 1e-9 * kSignalKmPerS;
    return 1.0 - std::pow(10.0, -kAttenuationDbPerKm * distance_km / 10.0);
}

LifetimeEvaluator::LifetimeEvaluator(const LspInstance& inst) : inst_(&inst) {
    topo_ = topo_sort(inst.deps);
    ParentCsr pc = build_parent_csr(inst.deps);
    parent_xadj_ = std::move(pc.xadj);
    parent_adj_ = std::move(pc.adj);

    child_xadj_.assign(inst.deps.num_nodes + 1, 0);
    for (const auto& [u, v] : inst.deps.dep_edges) ++child_xadj_[u + 1];
    for (std::uint32_t i = 0; i < inst.deps.num_nodes; ++i) child_xadj_[i + 1] += child_xadj_[i];
    child_adj_.resize(inst.deps.dep_edges.size());
    std::vector<std::uint32_t> fill(child_xadj_.begin(), child_xadj_.end() - 1);
    for (const auto& [u, v] : inst.deps.dep_edges) child_adj_[fill[u]++] = v;

    mp_.assign(inst.deps.num_nodes, 0);
    net_.assign(inst.deps.num_nodes, 0);
}

LifetimeReport LifetimeEvaluator::eval(const Schedule& sched) const {
    const LspInstance& inst = *inst_;
    for (NodeId u = 0; u < inst.deps.num_nodes; ++u)
        net_[u] = sched.main_start[static_cast<std::uint32_t>(inst.node_main[u])];

    LifetimeReport r;
    r.tau_fusee = fusee_span(inst.fusee_pairs, net_);
    r.tau_measuree =
        measuree_span(topo_, parent_xadj_, parent_adj_, inst.deps.removee, net_, mp_);
    r.tau_local = std::max(r.tau_fusee, r.tau_measuree);

    for (std::uint32_t k = 0; k < inst.num_syncs(); ++k) {
        const SyncTask& s = inst.sync_tasks[k];
        std::int64_t sk = sched.sync_start[k];
        std::int64_t d =
            std::max(std::abs(sk - static_cast<std::int64_t>(sched.main_start[s.main_a])),
                     std::abs(sk - static_cast<std::int64_t>(sched.main_start[s.main_b])));
        r.tau_remote = std::max(r.tau_remote, d);
    }
    r.tau_photon = std::max(r.tau_local, r.tau_remote);

    std::int64_t makespan = 0;
    for (std::uint32_t t : sched.main_start) makespan = std::max<std::int64_t>(makespan, t);
    for (std::uint32_t t : sched.sync_start) makespan = std::max<std::int64_t>(makespan, t);
    r.exec_time = makespan;
    return r;
}

LifetimeEvaluator::Bottleneck LifetimeEvaluator::bottleneck(const Schedule& sched) const {
    const LspInstance& inst = *inst_;
    LifetimeReport r = eval(sched); // leaves net_/mp_ populated for the attainer scan
    std::int64_t tau = r.tau_photon;
    std::uint32_t best = inst.num_mains() + inst.num_syncs();

    auto task_of = [&](NodeId u) { return static_cast<std::uint32_t>(inst.node_main[u]); };

    if (r.tau_fusee == tau)
        for (const auto& [u, v] : inst.fusee_pairs)
            if (std::abs(net_[u] - net_[v]) == tau)
                best = std::min({best, task_of(u), task_of(v)});

    if (r.tau_measuree == tau)
        for (NodeId u = 0; u < inst.deps.num_nodes; ++u)
            if (!inst.deps.removee[u] && mp_[u] - net_[u] == tau)
                best = std::min(best, task_of(u));

    if (r.tau_remote == tau) {
        // remote terms are indexed by sync tasks, so the sync attains them
        for (std::uint32_t k = 0; k < inst.num_syncs(); ++k) {
            const SyncTask& s = inst.sync_tasks[k];
            std::int64_t sk = sched.sync_start[k];
            std::int64_t da = std::abs(sk - static_cast<std::int64_t>(sched.main_start[s.main_a]));
            std::int64_t db = std::abs(sk - static_cast<std::int64_t>(sched.main_start[s.main_b]));
            if (std::max(da, db) == tau) {
                best = std::min(best, inst.num_mains() + k);
                break; // syncs scan in id order
            }
        }
    }
    return {tau, best};
}

LifetimeReport lifetime_distributed(const LspInstance& inst, const Schedule& sched,
                                    const DependencyGraph& deps, double clock_ns) {
    if (&deps != &inst.deps && !(deps == inst.deps))
        throw ValidationError("lifetime: dependency graph does not match the instance");
    auto violations = validate(inst, sched);
    if (!violations.empty())
        throw ValidationError("lifetime: schedule invalid: " + violations.front().what);
    LifetimeEvaluator ev(inst);
    LifetimeReport r = ev.eval(sched);
    r.clock_ns = clock_ns;
    r.loss_probability = clock_ns > 0.0 ? loss_probability(r.tau_photon, clock_ns) : 0.0;
    return r;
}

} // namespace dcmbqc
