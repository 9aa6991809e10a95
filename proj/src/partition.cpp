#include "dcmbqc/partition.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <queue>
#include <random>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace dcmbqc {

std::int64_t balance_cap(std::uint32_t n, std::uint32_t k, double alpha) {
    std::int64_t ideal = (static_cast<std::int64_t>(n) + k - 1) / k;
    return static_cast<std::int64_t>(std::floor(alpha * static_cast<double>(ideal) + 1e-9));
}

std::vector<Edge> cut_edges_of(const ComputationGraph& g,
                               std::span<const std::uint32_t> assignment) {
    std::vector<Edge> cut;
    for (const auto& e : g.edges)
        if (assignment[e.first] != assignment[e.second]) cut.push_back(e);
    return cut;
}

double modularity_serial(const ComputationGraph& g, std::span<const std::uint32_t> assignment) {
    std::int64_t m = static_cast<std::int64_t>(g.edges.size());
    if (m == 0) return 0.0;
    std::uint32_t k = 0;
    for (std::uint32_t p : assignment) k = std::max(k, p + 1);
    std::vector<std::int64_t> intra(k, 0), deg(k, 0);
    for (const auto& [u, v] : g.edges) {
        ++deg[assignment[u]];
        ++deg[assignment[v]];
        if (assignment[u] == assignment[v]) ++intra[assignment[u]];
    }
    double q = 0.0;
    double dm = static_cast<double>(m);
    for (std::uint32_t c = 0; c < k; ++c) {
        double frac = static_cast<double>(deg[c]) / (2.0 * dm);
        q += static_cast<double>(intra[c]) / dm - frac * frac;
    }
    return q;
}

double modularity(const ComputationGraph& g, std::span<const std::uint32_t> assignment) {
    std::int64_t m = static_cast<std::int64_t>(g.edges.size());
    if (m == 0) return 0.0;
    std::uint32_t k = 0;
    for (std::uint32_t p : assignment) k = std::max(k, p + 1);
    std::vector<std::int64_t> intra(k, 0), deg(k, 0);
#ifdef _OPENMP
#pragma omp parallel
    {
        std::vector<std::int64_t> li(k, 0), ld(k, 0);
#pragma omp for nowait
        for (std::int64_t i = 0; i < m; ++i) {
            const auto& [u, v] = g.edges[static_cast<std::size_t>(i)];
            ++ld[assignment[u]];
            ++ld[assignment[v]];
            if (assignment[u] == assignment[v]) ++li[assignment[u]];
        }
#pragma omp critical
        for (std::uint32_t c = 0; c < k; ++c) {
            intra[c] += li[c];
            deg[c] += ld[c];
        }
    }
#else
    for (const auto& [u, v] : g.edges) {
        ++deg[assignment[u]];
        ++deg[assignment[v]];
        if (assignment[u] == assignment[v]) ++intra[assignment[u]];
    }
#endif
    // integer tallies above are order independent; the float fold below runs
    // in one fixed order so Q is bit-identical for any thread count
    double q = 0.0;
    double dm = static_cast<double>(m);
    for (std::uint32_t c = 0; c < k; ++c) {
        double frac = static_cast<double>(deg[c]) / (2.0 * dm);
        q += static_cast<double>(intra[c]) / dm - frac * frac;
    }
    return q;
}

namespace {

constexpr std::uint32_t kCoarsenThreshold = 20000;
constexpr int kFmPasses = 10;
constexpr std::uint32_t kUnassigned = std::numeric_limits<std::uint32_t>::max();

struct WorkGraph {
    std::uint32_t n = 0;
    std::vector<std::uint32_t> xadj;
    std::vector<std::uint32_t> adj;
    std::vector<std::int32_t> ewgt;
    std::vector<std::int32_t> vwgt;
};

WorkGraph to_work(const ComputationGraph& g) {
    Csr csr = build_csr(g.num_nodes, g.edges);
    WorkGraph w;
    w.n = g.num_nodes;
    w.xadj = std::move(csr.xadj);
    w.adj = std::move(csr.adj);
    w.ewgt.assign(w.adj.size(), 1);
    w.vwgt.assign(w.n, 1);
    return w;
}

std::vector<std::uint32_t> hem_match(const WorkGraph& g, std::mt19937_64& rng,
                                     std::int32_t max_vwgt, std::uint32_t& coarse_n) {
    std::vector<std::uint32_t> order(g.n);
    std::iota(order.begin(), order.end(), 0);
    for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng() % i]);

    std::vector<std::uint32_t> cmap(g.n, kUnassigned);
    coarse_n = 0;
    for (std::uint32_t v : order) {
        if (cmap[v] != kUnassigned) continue;
        std::uint32_t best = kUnassigned;
        std::int32_t best_w = 0;
        for (std::uint32_t i = g.xadj[v]; i < g.xadj[v + 1]; ++i) {
            std::uint32_t u = g.adj[i];
            if (cmap[u] != kUnassigned) continue;
            if (g.vwgt[v] + g.vwgt[u] > max_vwgt) continue;
            if (g.ewgt[i] > best_w || (g.ewgt[i] == best_w && u < best)) {
                best_w = g.ewgt[i];
                best = u;
            }
        }
        std::uint32_t c = coarse_n++;
        cmap[v] = c;
        if (best != kUnassigned) cmap[best] = c;
    }
    return cmap;
}

WorkGraph contract(const WorkGraph& g, const std::vector<std::uint32_t>& cmap,
                   std::uint32_t coarse_n) {
    WorkGraph c;
    c.n = coarse_n;
    c.vwgt.assign(coarse_n, 0);
    for (std::uint32_t v = 0; v < g.n; ++v) c.vwgt[cmap[v]] += g.vwgt[v];

    std::vector<std::vector<std::uint32_t>> members(coarse_n);
    for (std::uint32_t v = 0; v < g.n; ++v) members[cmap[v]].push_back(v);

    c.xadj.push_back(0);
    std::vector<std::int32_t> where(coarse_n, -1);
    std::vector<std::pair<std::uint32_t, std::int32_t>> slice;
    for (std::uint32_t cc = 0; cc < coarse_n; ++cc) {
        slice.clear();
        for (std::uint32_t v : members[cc]) {
            for (std::uint32_t i = g.xadj[v]; i < g.xadj[v + 1]; ++i) {
                std::uint32_t cu = cmap[g.adj[i]];
                if (cu == cc) continue;
                if (where[cu] < 0) {
                    where[cu] = static_cast<std::int32_t>(slice.size());
                    slice.emplace_back(cu, g.ewgt[i]);
                } else {
                    slice[static_cast<std::size_t>(where[cu])].second += g.ewgt[i];
                }
            }
        }
        for (const auto& [cu, w] : slice) where[cu] = -1;
        std::sort(slice.begin(), slice.end());
        for (const auto& [cu, w] : slice) {
            c.adj.push_back(cu);
            c.ewgt.push_back(w);
        }
        c.xadj.push_back(static_cast<std::uint32_t>(c.adj.size()));
    }
    return c;
}

std::vector<std::uint32_t> initial_bfs_split(const WorkGraph& g, std::uint32_t k,
                                             std::int64_t cap) {
    std::vector<std::uint32_t> part(g.n, kUnassigned);
    std::int64_t remaining = 0;
    for (std::int32_t w : g.vwgt) remaining += w;
    std::uint32_t assigned = 0;
    std::uint32_t seed_scan = 0;
    std::queue<std::uint32_t> frontier; // carried across parts so regions stay contiguous

    for (std::uint32_t p = 0; p < k; ++p) {
        std::int64_t target = (remaining + (k - p) - 1) / (k - p);
        if (p + 1 == k) target = cap;
        target = std::min(target, cap);
        std::int64_t w = 0;
        while (w < target && assigned < g.n) {
            if (frontier.empty()) {
                while (seed_scan < g.n && part[seed_scan] != kUnassigned) ++seed_scan;
                if (seed_scan >= g.n) break;
                frontier.push(seed_scan);
            }
            std::uint32_t v = frontier.front();
            frontier.pop();
            if (part[v] != kUnassigned) continue;
            if (w + g.vwgt[v] > cap) continue; // too heavy for this part, retried later
            part[v] = p;
            w += g.vwgt[v];
            remaining -= g.vwgt[v];
            ++assigned;
            for (std::uint32_t i = g.xadj[v]; i < g.xadj[v + 1]; ++i)
                if (part[g.adj[i]] == kUnassigned) frontier.push(g.adj[i]);
        }
    }

    if (assigned < g.n) {
        std::vector<std::int64_t> pw(k, 0);
        for (std::uint32_t v = 0; v < g.n; ++v)
            if (part[v] != kUnassigned) pw[part[v]] += g.vwgt[v];
        for (std::uint32_t v = 0; v < g.n; ++v) {
            if (part[v] != kUnassigned) continue;
            std::uint32_t best = kUnassigned;
            for (std::uint32_t p = 0; p < k; ++p)
                if (pw[p] + g.vwgt[v] <= cap && (best == kUnassigned || pw[p] < pw[best]))
                    best = p;
            if (best == kUnassigned)
                throw InternalError("partition: could not place node within balance bound");
            part[v] = best;
            pw[best] += g.vwgt[v];
        }
    }
    return part;
}

/// Boundary Fiduccia-Mattheyses passes with rollback to the best prefix.
/// The balance bound is checked before every individual move.
class Refiner {
public:
    Refiner(const WorkGraph& g, std::uint32_t k, std::int64_t cap,
            std::vector<std::uint32_t>& part)
        : g_(g), k_(k), cap_(cap), part_(part) {
        conn_.assign(static_cast<std::size_t>(g.n) * k, 0);
        part_w_.assign(k, 0);
        cut_ = 0;
        for (std::uint32_t v = 0; v < g.n; ++v) {
            part_w_[part[v]] += g.vwgt[v];
            for (std::uint32_t i = g.xadj[v]; i < g.xadj[v + 1]; ++i) {
                conn_at(v, part[g.adj[i]]) += g.ewgt[i];
                if (part[g.adj[i]] != part[v] && g.adj[i] > v) cut_ += g.ewgt[i];
            }
        }
    }

    void refine() {
        for (int pass = 0; pass < kFmPasses; ++pass)
            if (!run_pass()) break;
    }

    std::int64_t cut() const { return cut_; }

private:
    std::int32_t& conn_at(std::uint32_t v, std::uint32_t p) {
        return conn_[static_cast<std::size_t>(v) * k_ + p];
    }

    // best destination for v: the adjacent part with the strongest connection
    bool best_move(std::uint32_t v, std::uint32_t& to, std::int32_t& gain) {
        std::uint32_t from = part_[v];
        to = kUnassigned;
        std::int32_t best_conn = -1;
        for (std::uint32_t p = 0; p < k_; ++p) {
            if (p == from) continue;
            std::int32_t c = conn_at(v, p);
            if (c > 0 && c > best_conn) {
                best_conn = c;
                to = p;
            }
        }
        if (to == kUnassigned) return false;
        gain = best_conn - conn_at(v, from);
        return true;
    }

    struct Entry {
        std::int32_t gain;
        std::uint32_t v;
        std::uint32_t stamp;
    };
    struct EntryLess {
        bool operator()(const Entry& a, const Entry& b) const {
            if (a.gain != b.gain) return a.gain < b.gain;
            return a.v > b.v; // lower id wins ties
        }
    };

    bool run_pass() {
        std::priority_queue<Entry, std::vector<Entry>, EntryLess> heap;
        std::vector<std::uint32_t> stamp(g_.n, 0);
        std::vector<std::uint8_t> locked(g_.n, 0);

        auto push_candidate = [&](std::uint32_t v) {
            std::uint32_t to;
            std::int32_t gain;
            if (best_move(v, to, gain)) heap.push({gain, v, stamp[v]});
        };
        for (std::uint32_t v = 0; v < g_.n; ++v) push_candidate(v);

        struct Move {
            std::uint32_t v, from, to;
        };
        std::vector<Move> log;
        std::int64_t start_cut = cut_;
        std::int64_t best_cut = cut_;
        std::size_t best_len = 0;

        while (!heap.empty()) {
            Entry e = heap.top();
            heap.pop();
            if (locked[e.v] || e.stamp != stamp[e.v]) continue;
            std::uint32_t to;
            std::int32_t gain;
            if (!best_move(e.v, to, gain)) continue;
            if (part_w_[to] + g_.vwgt[e.v] > cap_) continue; // would break balance
            std::uint32_t from = part_[e.v];
            apply_move(e.v, to);
            locked[e.v] = 1;
            log.push_back({e.v, from, to});
            cut_ -= gain;
            if (cut_ < best_cut) {
                best_cut = cut_;
                best_len = log.size();
            }
            for (std::uint32_t i = g_.xadj[e.v]; i < g_.xadj[e.v + 1]; ++i) {
                std::uint32_t u = g_.adj[i];
                if (!locked[u]) {
                    ++stamp[u];
                    push_candidate(u);
                }
            }
        }

        // roll back everything after the best prefix
        while (log.size() > best_len) {
            Move m = log.back();
            log.pop_back();
            apply_move(m.v, m.from);
        }
        cut_ = best_cut;
        return best_cut < start_cut;
    }

    void apply_move(std::uint32_t v, std::uint32_t to) {
        std::uint32_t from = part_[v];
        part_[v] = to;
        part_w_[from] -= g_.vwgt[v];
        part_w_[to] += g_.vwgt[v];
        if (part_w_[to] > cap_)
            throw InternalError("partition: balance bound violated by a refinement move");
        for (std::uint32_t i = g_.xadj[v]; i < g_.xadj[v + 1]; ++i) {
            std::uint32_t u = g_.adj[i];
            conn_at(u, from) -= g_.ewgt[i];
            conn_at(u, to) += g_.ewgt[i];
        }
    }

    const WorkGraph& g_;
    std::uint32_t k_;
    std::int64_t cap_;
    std::vector<std::uint32_t>& part_;
    std::vector<std::int32_t> conn_;
    std::vector<std::int64_t> part_w_;
    std::int64_t cut_ = 0;
};

} // namespace

PartitionResult kway_partition(const ComputationGraph& g, std::uint32_t k, double alpha,
                               std::uint64_t seed) {
    if (g.num_nodes == 0) throw ValidationError("partition: graph is empty");
    if (k == 0 || k > g.num_nodes) throw ValidationError("partition: k must be in 1..n");
    if (alpha < 1.0) throw ValidationError("partition: imbalance must be >= 1");
    std::int64_t cap = balance_cap(g.num_nodes, k, alpha);
    if (cap * k < g.num_nodes)
        throw InternalError("partition: balance bound infeasible"); // cannot occur for alpha >= 1

    std::vector<std::uint32_t> part;
    if (k == 1) {
        part.assign(g.num_nodes, 0);
    } else {
        std::mt19937_64 rng(seed);
        WorkGraph cur = to_work(g);
        std::vector<std::pair<WorkGraph, std::vector<std::uint32_t>>> levels;
        while (cur.n > kCoarsenThreshold) {
            std::int32_t max_vwgt =
                static_cast<std::int32_t>(std::max<std::int64_t>(2, cap / 8));
            std::uint32_t coarse_n = 0;
            auto cmap = hem_match(cur, rng, max_vwgt, coarse_n);
            if (coarse_n > cur.n * 95 / 100) break; // matching stalled
            WorkGraph coarse = contract(cur, cmap, coarse_n);
            levels.emplace_back(std::move(cur), std::move(cmap));
            cur = std::move(coarse);
        }

        part = initial_bfs_split(cur, k, cap);
        Refiner(cur, k, cap, part).refine();

        while (!levels.empty()) {
            auto& [fine, cmap] = levels.back();
            std::vector<std::uint32_t> fine_part(fine.n);
            for (std::uint32_t v = 0; v < fine.n; ++v) fine_part[v] = part[cmap[v]];
            part = std::move(fine_part);
            Refiner(fine, k, cap, part).refine();
            levels.pop_back();
        }
    }

    PartitionResult r;
    r.assignment = std::move(part);
    r.k = k;
    r.imbalance_used = alpha;
    r.cut_edges = cut_edges_of(g, r.assignment);
    r.modularity = modularity(g, r.assignment);
    return r;
}

PartitionResult adaptive_partition(const ComputationGraph& g, const PartitionConfig& cfg) {
    if (cfg.gamma <= 1.0) throw ValidationError("partition: gamma must be > 1");
    if (cfg.alpha_max < 1.0) throw ValidationError("partition: alpha_max must be >= 1");
    if (cfg.eps_q <= 0.0) throw ValidationError("partition: eps_q must be > 0");

    constexpr int kMaxIters = 1000; // guards eps-oscillation between the two branches
    double alpha = 1.0;
    double prev_q = -1.0;
    double best_q = -1.0;
    PartitionResult best;

    for (int iter = 0; iter < kMaxIters; ++iter) {
        PartitionResult p = kway_partition(g, cfg.k, alpha, cfg.seed);
        double q = p.modularity;
        if (q > best_q) {
            best_q = q;
            best = std::move(p);
        }
        double dq = q - prev_q;
        if (dq > cfg.eps_q && alpha < cfg.alpha_max)
            alpha = std::min(alpha * cfg.gamma, cfg.alpha_max);
        else if (dq < -cfg.eps_q)
            alpha = std::max(alpha / cfg.gamma, 1.0);
        else
            break;
        prev_q = q;
    }
    return best;
}

} // namespace dcmbqc
