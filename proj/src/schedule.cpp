#include "dcmbqc/schedule.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <random>
#include <sstream>

#include "dcmbqc/metrics.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace dcmbqc {

LspInstance build_instance(std::span<const ExecutionPlan> plans, const PartitionResult& partition,
                           const DependencyGraph& deps, std::uint32_t k_max) {
    if (k_max < 1) throw ValidationError("instance: k_max must be at least 1");
    if (plans.size() != partition.k)
        throw ValidationError("instance: plan count does not match partition");

    LspInstance inst;
    inst.num_qpus = partition.k;
    inst.k_max = k_max;
    inst.deps = deps;
    inst.node_main.assign(deps.num_nodes, -1);

    inst.qpu_offset.push_back(0);
    for (std::uint32_t q = 0; q < partition.k; ++q) {
        const ExecutionPlan& plan = plans[q];
        if (plan.qpu != q) throw ValidationError("instance: plans out of QPU order");
        for (const auto& layer : plan.layers) {
            std::uint32_t m = inst.num_mains();
            for (NodeId u : layer) {
                if (inst.node_main[u] != -1) {
                    std::ostringstream os;
                    os << "instance: node " << u << " appears in two execution layers";
                    throw ValidationError(os.str());
                }
                inst.node_main[u] = static_cast<std::int32_t>(m);
            }
            inst.main_tasks.push_back({layer});
            inst.main_qpu.push_back(q);
        }
        inst.qpu_offset.push_back(inst.num_mains());
        for (const auto& f : plan.fusee_pairs) inst.fusee_pairs.emplace_back(f.u, f.v);
    }
    for (NodeId u = 0; u < deps.num_nodes; ++u)
        if (inst.node_main[u] == -1) {
            std::ostringstream os;
            os << "instance: node " << u << " missing from every plan";
            throw ValidationError(os.str());
        }

    // pair up the two connector records of every cut edge
    std::map<Edge, std::vector<const Connector*>> records;
    for (const ExecutionPlan& plan : plans)
        for (const Connector& c : plan.connectors) records[c.edge].push_back(&c);

    if (records.size() != partition.cut_edges.size())
        throw ValidationError("instance: connector records do not match the cut edge set");
    for (const Edge& e : partition.cut_edges) {
        auto it = records.find(e);
        if (it == records.end() || it->second.size() != 2) {
            std::ostringstream os;
            os << "instance: connector mismatch on edge (" << e.first << ", " << e.second
               << "): expected records from both sides";
            throw ValidationError(os.str());
        }
        std::uint32_t ma = static_cast<std::uint32_t>(inst.node_main[it->second[0]->local]);
        std::uint32_t mb = static_cast<std::uint32_t>(inst.node_main[it->second[1]->local]);
        if (inst.main_qpu[ma] == inst.main_qpu[mb] ||
            Edge{std::min(it->second[0]->local, it->second[1]->local),
                 std::max(it->second[0]->local, it->second[1]->local)} != e) {
            std::ostringstream os;
            os << "instance: connector mismatch on edge (" << e.first << ", " << e.second << ")";
            throw ValidationError(os.str());
        }
        if (inst.main_qpu[ma] > inst.main_qpu[mb]) std::swap(ma, mb);
        inst.sync_tasks.push_back({ma, mb, e});
    }

    inst.horizon = 2 * (inst.num_mains() + inst.num_syncs());
    return inst;
}

std::vector<Violation> validate(const LspInstance& inst, const Schedule& sched) {
    if (sched.main_start.size() != inst.num_mains() ||
        sched.sync_start.size() != inst.num_syncs())
        throw ValidationError("validate: schedule shape does not match the instance");

    std::vector<Violation> out;
    auto in_range = [&](std::uint32_t t) { return t >= 1 && t <= inst.horizon; };
    for (std::uint32_t m = 0; m < inst.num_mains(); ++m)
        if (!in_range(sched.main_start[m])) {
            std::ostringstream os;
            os << "main task " << m << " starts at " << sched.main_start[m]
               << ", outside 1.." << inst.horizon;
            out.push_back({inst.main_qpu[m], sched.main_start[m], os.str()});
        }
    for (std::uint32_t k = 0; k < inst.num_syncs(); ++k)
        if (!in_range(sched.sync_start[k])) {
            std::ostringstream os;
            os << "sync task " << k << " starts at " << sched.sync_start[k] << ", outside 1.."
               << inst.horizon;
            out.push_back({inst.main_qpu[inst.sync_tasks[k].main_a], sched.sync_start[k], os.str()});
        }
    if (!out.empty()) return out;

    std::uint32_t width = inst.horizon + 2;
    std::vector<std::uint32_t> mains_at(static_cast<std::size_t>(inst.num_qpus) * width, 0);
    std::vector<std::uint32_t> syncs_at(static_cast<std::size_t>(inst.num_qpus) * width, 0);
    for (std::uint32_t m = 0; m < inst.num_mains(); ++m)
        ++mains_at[static_cast<std::size_t>(inst.main_qpu[m]) * width + sched.main_start[m]];
    for (std::uint32_t k = 0; k < inst.num_syncs(); ++k) {
        const SyncTask& s = inst.sync_tasks[k];
        ++syncs_at[static_cast<std::size_t>(inst.main_qpu[s.main_a]) * width + sched.sync_start[k]];
        ++syncs_at[static_cast<std::size_t>(inst.main_qpu[s.main_b]) * width + sched.sync_start[k]];
    }

    for (std::uint32_t q = 0; q < inst.num_qpus; ++q)
        for (std::uint32_t t = 1; t <= inst.horizon; ++t) {
            std::uint32_t nm = mains_at[static_cast<std::size_t>(q) * width + t];
            std::uint32_t ns = syncs_at[static_cast<std::size_t>(q) * width + t];
            std::uint32_t lhs = nm + (ns + inst.k_max - 1) / inst.k_max;
            if (lhs > 1) {
                std::ostringstream os;
                os << "QPU " << q << " slot " << t << ": " << nm << " main and " << ns
                   << " sync starts exceed machine exclusivity (k_max=" << inst.k_max << ")";
                out.push_back({q, t, os.str()});
            }
        }
    return out;
}

namespace {

/// Per-QPU slot occupancy shared by the list scheduler and the rescheduler.
struct Board {
    std::uint32_t num_qpus, k_max, horizon;
    std::vector<std::vector<std::uint8_t>> main_busy;
    std::vector<std::vector<std::uint16_t>> sync_cnt;

    Board(std::uint32_t nq, std::uint32_t kmax, std::uint32_t T)
        : num_qpus(nq), k_max(kmax), horizon(T),
          main_busy(nq, std::vector<std::uint8_t>(T + 2, 0)),
          sync_cnt(nq, std::vector<std::uint16_t>(T + 2, 0)) {}

    bool main_ok(std::uint32_t q, std::uint32_t t) const {
        return !main_busy[q][t] && sync_cnt[q][t] == 0;
    }
    bool sync_ok(std::uint32_t q, std::uint32_t t) const {
        return !main_busy[q][t] && sync_cnt[q][t] < k_max;
    }
    std::uint32_t place_main_earliest(std::uint32_t q, std::uint32_t from) {
        std::uint32_t t = std::max<std::uint32_t>(from, 1);
        while (t <= horizon && !main_ok(q, t)) ++t;
        if (t > horizon) throw InternalError("schedule: horizon exhausted placing a main task");
        main_busy[q][t] = 1;
        return t;
    }
    std::uint32_t place_sync_earliest(std::uint32_t qa, std::uint32_t qb) {
        std::uint32_t t = 1;
        while (t <= horizon && !(sync_ok(qa, t) && sync_ok(qb, t))) ++t;
        if (t > horizon) throw InternalError("schedule: horizon exhausted placing a sync task");
        ++sync_cnt[qa][t];
        ++sync_cnt[qb][t];
        return t;
    }
};

struct DispatchKey {
    std::int64_t priority2; ///< doubled so sync priorities (j+j')/2 stay integral
    std::uint8_t kind;      ///< 0 main, 1 sync
    std::uint32_t task;

    bool operator<(const DispatchKey& o) const {
        if (priority2 != o.priority2) return priority2 < o.priority2;
        if (kind != o.kind) return kind < o.kind;
        return task < o.task;
    }
};

Schedule dispatch(const LspInstance& inst, std::vector<DispatchKey> keys,
                  std::int32_t pinned_task, std::uint32_t pinned_slot) {
    std::sort(keys.begin(), keys.end());
    Board board(inst.num_qpus, inst.k_max, inst.horizon);
    Schedule out;
    out.main_start.assign(inst.num_mains(), 0);
    out.sync_start.assign(inst.num_syncs(), 0);
    std::vector<std::uint32_t> from(inst.num_qpus, 1);

    if (pinned_task >= 0) {
        std::uint32_t task = static_cast<std::uint32_t>(pinned_task);
        std::uint32_t slot = std::clamp<std::uint32_t>(pinned_slot, 1, inst.horizon);
        if (task < inst.num_mains()) {
            board.main_busy[inst.main_qpu[task]][slot] = 1;
            out.main_start[task] = slot;
        } else {
            const SyncTask& s = inst.sync_tasks[task - inst.num_mains()];
            ++board.sync_cnt[inst.main_qpu[s.main_a]][slot];
            ++board.sync_cnt[inst.main_qpu[s.main_b]][slot];
            out.sync_start[task - inst.num_mains()] = slot;
        }
    }

    for (const DispatchKey& k : keys) {
        if (pinned_task >= 0 && k.task == static_cast<std::uint32_t>(pinned_task)) continue;
        if (k.task < inst.num_mains()) {
            std::uint32_t q = inst.main_qpu[k.task];
            std::uint32_t t = board.place_main_earliest(q, from[q]);
            from[q] = t + 1;
            out.main_start[k.task] = t;
        } else {
            const SyncTask& s = inst.sync_tasks[k.task - inst.num_mains()];
            std::uint32_t t =
                board.place_sync_earliest(inst.main_qpu[s.main_a], inst.main_qpu[s.main_b]);
            out.sync_start[k.task - inst.num_mains()] = t;
        }
    }
    return out;
}

std::vector<DispatchKey> initial_keys(const LspInstance& inst) {
    std::vector<DispatchKey> keys;
    keys.reserve(inst.num_mains() + inst.num_syncs());
    for (std::uint32_t m = 0; m < inst.num_mains(); ++m)
        keys.push_back({2ll * inst.plan_index(m), 0, m});
    for (std::uint32_t k = 0; k < inst.num_syncs(); ++k) {
        const SyncTask& s = inst.sync_tasks[k];
        keys.push_back({static_cast<std::int64_t>(inst.plan_index(s.main_a)) +
                            inst.plan_index(s.main_b),
                        1, inst.num_mains() + k});
    }
    return keys;
}

std::vector<DispatchKey> keys_from_previous(const LspInstance& inst, const Schedule& prev) {
    std::vector<DispatchKey> keys;
    keys.reserve(inst.num_mains() + inst.num_syncs());
    for (std::uint32_t m = 0; m < inst.num_mains(); ++m)
        keys.push_back({2ll * prev.main_start[m], 0, m});
    for (std::uint32_t k = 0; k < inst.num_syncs(); ++k)
        keys.push_back({2ll * prev.sync_start[k], 1, inst.num_mains() + k});
    return keys;
}

double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Evaluates the bottleneck task's own lifetime contribution at candidate
/// slots, everything else frozen at the current schedule.
class BalanceScan {
public:
    BalanceScan(const LspInstance& inst, const LifetimeEvaluator& ev, const Schedule& cur,
                std::uint32_t task)
        : inst_(inst), ev_(ev), cur_(cur), task_(task) {
        if (task < inst.num_mains()) build_main_context();
    }

    std::int64_t cost_at(std::int64_t x) const {
        if (task_ >= inst_.num_mains()) {
            const SyncTask& s = inst_.sync_tasks[task_ - inst_.num_mains()];
            return std::max(std::abs(x - static_cast<std::int64_t>(cur_.main_start[s.main_a])),
                            std::abs(x - static_cast<std::int64_t>(cur_.main_start[s.main_b])));
        }
        return main_cost_at(x);
    }

private:
    void build_main_context() {
        // members in dependency order so local maxparent flows within the task
        members_ = inst_.main_tasks[task_].nodes;
        std::vector<std::uint32_t> rank(inst_.deps.num_nodes, 0);
        auto topo = ev_.topo_order();
        for (std::uint32_t i = 0; i < topo.size(); ++i) rank[topo[i]] = i;
        std::sort(members_.begin(), members_.end(),
                  [&](NodeId a, NodeId b) { return rank[a] < rank[b]; });
        local_slot_.assign(inst_.deps.num_nodes, -1);
        for (std::uint32_t i = 0; i < members_.size(); ++i)
            local_slot_[members_[i]] = static_cast<std::int32_t>(i);

        for (const auto& [u, v] : inst_.fusee_pairs) {
            bool iu = inst_.node_main[u] == static_cast<std::int32_t>(task_);
            bool iv = inst_.node_main[v] == static_cast<std::int32_t>(task_);
            if (iu == iv) continue; // both inside costs 0, both outside is frozen
            NodeId other = iu ? v : u;
            partner_net_.push_back(
                cur_.main_start[static_cast<std::uint32_t>(inst_.node_main[other])]);
        }
        for (std::uint32_t k = 0; k < inst_.num_syncs(); ++k) {
            const SyncTask& s = inst_.sync_tasks[k];
            if (s.main_a == task_ || s.main_b == task_)
                sync_net_.push_back(cur_.sync_start[k]);
        }
    }

    std::int64_t main_cost_at(std::int64_t x) const {
        std::int64_t cost = 0;
        for (std::int64_t p : partner_net_) cost = std::max(cost, std::abs(x - p));
        for (std::int64_t s : sync_net_) cost = std::max(cost, std::abs(x - s));

        auto mp_fix = ev_.maxparent_scratch();
        auto net = ev_.net_scratch();
        std::vector<std::int64_t> mp_local(members_.size());
        for (std::uint32_t i = 0; i < members_.size(); ++i) {
            NodeId u = members_[i];
            std::int64_t m = x + 1;
            for (std::uint32_t p : ev_.parents_of(u)) {
                std::int64_t pm = local_slot_[p] >= 0
                                      ? mp_local[static_cast<std::size_t>(local_slot_[p])]
                                      : mp_fix[p];
                m = std::max(m, pm + 1);
            }
            mp_local[i] = m;
            if (!inst_.deps.removee[u]) cost = std::max(cost, m - x);
        }
        // first-level children outside the task also shift with x; their
        // in-task parents are all final after the pass above
        for (std::uint32_t i = 0; i < members_.size(); ++i) {
            for (std::uint32_t w : ev_.children_of(members_[i])) {
                if (local_slot_[w] >= 0 || inst_.deps.removee[w]) continue;
                std::int64_t mw = net[w] + 1;
                for (std::uint32_t p : ev_.parents_of(w)) {
                    std::int64_t pm = local_slot_[p] >= 0
                                          ? mp_local[static_cast<std::size_t>(local_slot_[p])]
                                          : mp_fix[p];
                    mw = std::max(mw, pm + 1);
                }
                cost = std::max(cost, mw - net[w]);
            }
        }
        return cost;
    }

    const LspInstance& inst_;
    const LifetimeEvaluator& ev_;
    const Schedule& cur_;
    std::uint32_t task_;
    std::vector<NodeId> members_;
    std::vector<std::int32_t> local_slot_;
    std::vector<std::int64_t> partner_net_;
    std::vector<std::int64_t> sync_net_;
};

} // namespace

Schedule list_schedule(const LspInstance& inst) {
    return dispatch(inst, initial_keys(inst), -1, 0);
}

Schedule bdir(const LspInstance& inst, const Schedule& init, const BdirParams& params) {
    {
        auto v = validate(inst, init);
        if (!v.empty()) throw ValidationError("bdir: initial schedule invalid: " + v.front().what);
    }
    if (inst.num_mains() + inst.num_syncs() == 0) return init;

    LifetimeEvaluator ev(inst);
    std::mt19937_64 rng(params.seed);

    Schedule cur = init;
    std::int64_t c_cur = ev.cost(cur);
    Schedule best = cur;
    std::int64_t c_best = c_cur;
    double temp = params.t0;

    for (std::uint32_t it = 0; it < params.iters; ++it) {
        auto bn = ev.bottleneck(cur); // refreshes the evaluator scratch for `cur`
        std::int64_t span = std::max<std::int64_t>(bn.tau, 1);
        std::int64_t t_now = bn.task < inst.num_mains()
                                 ? cur.main_start[bn.task]
                                 : cur.sync_start[bn.task - inst.num_mains()];
        std::int64_t lo = std::max<std::int64_t>(1, t_now - span);
        std::int64_t hi = std::min<std::int64_t>(inst.horizon, t_now + span);

        BalanceScan scan(inst, ev, cur, bn.task);
        std::vector<std::int64_t> costs(static_cast<std::size_t>(hi - lo + 1));
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
        for (std::int64_t x = lo; x <= hi; ++x)
            costs[static_cast<std::size_t>(x - lo)] = scan.cost_at(x);
        std::int64_t x_best = lo;
        for (std::int64_t x = lo + 1; x <= hi; ++x)
            if (costs[static_cast<std::size_t>(x - lo)] <
                costs[static_cast<std::size_t>(x_best - lo)])
                x_best = x; // ties keep the earliest slot

        Schedule next = dispatch(inst, keys_from_previous(inst, cur),
                                 static_cast<std::int32_t>(bn.task),
                                 static_cast<std::uint32_t>(x_best));
        std::int64_t c_next = ev.cost(next);
        std::int64_t delta = c_next - c_cur;
        if (delta <= 0 || uniform01(rng) < std::exp(-static_cast<double>(delta) / temp)) {
            cur = std::move(next);
            c_cur = c_next;
        }
        if (c_cur < c_best) {
            best = cur;
            c_best = c_cur;
        }
        temp *= params.cooling;
    }
    return best;
}

namespace {

struct BruteState {
    const LspInstance& inst;
    const LifetimeEvaluator& ev;
    std::uint32_t t_cap;
    std::vector<std::vector<std::uint32_t>> mains_at, syncs_at;
    Schedule sched;
    std::vector<std::vector<std::uint32_t>> fusee_of_main; ///< partner main ids
    std::int64_t best_cost = std::numeric_limits<std::int64_t>::max();
    Schedule best_sched;
    std::int64_t measuree_floor = 0;

    explicit BruteState(const LspInstance& i, const LifetimeEvaluator& e, std::uint32_t cap)
        : inst(i), ev(e), t_cap(cap),
          mains_at(i.num_qpus, std::vector<std::uint32_t>(cap + 1, 0)),
          syncs_at(i.num_qpus, std::vector<std::uint32_t>(cap + 1, 0)) {
        sched.main_start.assign(i.num_mains(), 0);
        sched.sync_start.assign(i.num_syncs(), 0);
        fusee_of_main.resize(i.num_mains());
        for (const auto& [u, v] : i.fusee_pairs) {
            std::uint32_t mu = static_cast<std::uint32_t>(i.node_main[u]);
            std::uint32_t mv = static_cast<std::uint32_t>(i.node_main[v]);
            if (mu == mv) continue;
            fusee_of_main[mu].push_back(mv);
            fusee_of_main[mv].push_back(mu);
        }
        for (std::uint32_t m = 0; m < i.num_mains(); ++m)
            for (NodeId u : i.main_tasks[m].nodes)
                if (!i.deps.removee[u]) measuree_floor = 1;
    }

    void search(std::uint32_t level, std::int64_t bound) {
        if (bound >= best_cost) return;
        std::uint32_t num_mains = inst.num_mains();
        if (level == num_mains + inst.num_syncs()) {
            std::int64_t cost = ev.cost(sched);
            if (cost < best_cost) {
                best_cost = cost;
                best_sched = sched;
            }
            return;
        }
        if (level < num_mains) {
            std::uint32_t q = inst.main_qpu[level];
            for (std::uint32_t t = 1; t <= t_cap; ++t) {
                if (mains_at[q][t] || syncs_at[q][t]) continue;
                std::int64_t nb = bound;
                for (std::uint32_t other : fusee_of_main[level])
                    if (other < level)
                        nb = std::max(nb, std::abs(static_cast<std::int64_t>(t) -
                                                   static_cast<std::int64_t>(
                                                       sched.main_start[other])));
                if (nb >= best_cost) continue;
                mains_at[q][t] = 1;
                sched.main_start[level] = t;
                search(level + 1, nb);
                mains_at[q][t] = 0;
            }
        } else {
            const SyncTask& s = inst.sync_tasks[level - num_mains];
            std::uint32_t qa = inst.main_qpu[s.main_a], qb = inst.main_qpu[s.main_b];
            for (std::uint32_t t = 1; t <= t_cap; ++t) {
                if (mains_at[qa][t] || mains_at[qb][t]) continue;
                if (syncs_at[qa][t] >= inst.k_max || syncs_at[qb][t] >= inst.k_max) continue;
                std::int64_t nb = std::max(
                    bound,
                    std::max(std::abs(static_cast<std::int64_t>(t) - sched.main_start[s.main_a]),
                             std::abs(static_cast<std::int64_t>(t) - sched.main_start[s.main_b])));
                if (nb >= best_cost) continue;
                ++syncs_at[qa][t];
                ++syncs_at[qb][t];
                sched.sync_start[level - num_mains] = t;
                search(level + 1, nb);
                --syncs_at[qa][t];
                --syncs_at[qb][t];
            }
        }
    }
};

} // namespace

BruteResult brute_force(const LspInstance& inst, std::uint32_t t_cap) {
    std::uint32_t tasks = inst.num_mains() + inst.num_syncs();
    if (tasks > 10 || t_cap > 8 || t_cap < 1)
        throw ValidationError("brute force: instance too large (needs <= 10 tasks, t_cap <= 8)");
    if (t_cap > inst.horizon)
        throw ValidationError("brute force: t_cap exceeds the instance horizon");

    LifetimeEvaluator ev(inst);
    BruteState st(inst, ev, t_cap);
    st.search(0, st.measuree_floor);
    if (st.best_cost == std::numeric_limits<std::int64_t>::max())
        throw ValidationError("brute force: no feasible schedule within t_cap");
    return {st.best_sched, st.best_cost};
}

LspInstance gbp_reduce(const ComputationGraph& g) {
    LspInstance inst;
    inst.num_qpus = 1;
    inst.k_max = 1;
    inst.qpu_offset = {0, g.num_nodes};
    inst.node_main.resize(g.num_nodes);
    for (NodeId u = 0; u < g.num_nodes; ++u) {
        inst.main_tasks.push_back({{u}});
        inst.main_qpu.push_back(0);
        inst.node_main[u] = static_cast<std::int32_t>(u);
    }
    inst.fusee_pairs = g.edges;
    inst.deps.num_nodes = g.num_nodes;
    inst.deps.angles.assign(g.num_nodes, 0.0);
    inst.deps.removee.assign(g.num_nodes, 0);
    inst.horizon = 2 * g.num_nodes;
    return inst;
}

} // namespace dcmbqc
