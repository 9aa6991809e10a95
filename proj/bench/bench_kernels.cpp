// Timings for the parallel kernels against their serial references.
// Run after building: ./build/bench/dcmbqc_bench [scale]

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <random>
#include <vector>

#include "dcmbqc/frontend.hpp"
#include "dcmbqc/metrics.hpp"
#include "dcmbqc/model.hpp"
#include "dcmbqc/partition.hpp"
#include "dcmbqc/pipeline.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

using namespace dcmbqc;

namespace {

double now() {
    return std::chrono::duration<double>(std::chrono::steady_clock::now().time_since_epoch())
        .count();
}

template <typename F>
double time_best_of(int reps, F&& f) {
    double best = 1e300;
    for (int i = 0; i < reps; ++i) {
        double t0 = now();
        f();
        best = std::min(best, now() - t0);
    }
    return best;
}

ComputationGraph big_graph(std::uint32_t n, std::uint32_t avg_deg, std::mt19937_64& rng) {
    ComputationGraph g;
    g.num_nodes = n;
    g.roles.assign(n, NodeRole::Measuree);
    g.wires.assign(n, -1);
    g.edges.reserve(static_cast<std::size_t>(n) * avg_deg / 2);
    for (NodeId v = 1; v < n; ++v) g.edges.push_back({v - 1, v}); // backbone chain
    for (std::uint32_t i = 0; i < n / 2 * (avg_deg - 2); ++i) {
        NodeId u = static_cast<NodeId>(rng() % n);
        NodeId v = static_cast<NodeId>((u + 1 + rng() % 64) % n);
        if (u == v) continue;
        g.edges.push_back({std::min(u, v), std::max(u, v)});
    }
    std::sort(g.edges.begin(), g.edges.end());
    g.edges.erase(std::unique(g.edges.begin(), g.edges.end()), g.edges.end());
    return g;
}

} // namespace

int main(int argc, char** argv) {
    std::uint32_t scale = argc > 1 ? static_cast<std::uint32_t>(std::atoi(argv[1])) : 1;
    std::mt19937_64 rng(1);

#ifdef _OPENMP
    std::printf("openmp threads: %d\n", omp_get_max_threads());
#else
    std::printf("openmp: disabled\n");
#endif

    // modularity tallies: parallel per-edge accumulation vs single loop
    {
        std::uint32_t n = 400000 * scale;
        ComputationGraph g = big_graph(n, 8, rng);
        std::vector<std::uint32_t> assign(n);
        for (auto& a : assign) a = static_cast<std::uint32_t>(rng() % 8);
        double ts = time_best_of(3, [&] { (void)modularity_serial(g, assign); });
        double tp = time_best_of(3, [&] { (void)modularity(g, assign); });
        double dq = std::abs(modularity_serial(g, assign) - modularity(g, assign));
        std::printf("modularity   n=%-8u m=%-9zu serial %8.3f ms  parallel %8.3f ms  x%.2f  |dQ|=%g\n",
                    n, g.edges.size(), ts * 1e3, tp * 1e3, ts / tp, dq);
    }

    // fusee span: max-reduction over pairs
    {
        std::uint32_t n = 400000 * scale;
        ComputationGraph g = big_graph(n, 8, rng);
        std::vector<std::int64_t> net(n);
        for (auto& x : net) x = static_cast<std::int64_t>(rng() % 4096);
        double ts = time_best_of(3, [&] { (void)detail::fusee_span_serial(g.edges, net); });
        double tp = time_best_of(3, [&] { (void)detail::fusee_span_parallel(g.edges, net); });
        bool same =
            detail::fusee_span_serial(g.edges, net) == detail::fusee_span_parallel(g.edges, net);
        std::printf("fusee span   pairs=%-12zu serial %8.3f ms  parallel %8.3f ms  x%.2f  %s\n",
                    g.edges.size(), ts * 1e3, tp * 1e3, ts / tp, same ? "equal" : "MISMATCH");
    }

    // whole pipeline at a representative size (per-QPU assembly and the
    // refinement scan run parallel inside)
    {
        ProgramBundle b = translate(gen_benchmark(BenchmarkFamily::QFT, 64, 1), "qft64", 1, "bench");
        RunConfig cfg;
        cfg.qpus = 4;
        cfg.seed = 1;
        double t = time_best_of(1, [&] { (void)compile_bundle(b, cfg); });
        std::printf("compile      qft-64 nodes=%-7u full pipeline %8.3f ms\n", b.graph.num_nodes,
                    t * 1e3);
    }

    return 0;
}
