#include <doctest.h>

#include <algorithm>
#include <random>

#include "dcmbqc/frontend.hpp"
#include "dcmbqc/partition.hpp"
#include "test_support.hpp"

using namespace dcmbqc;

namespace {

ComputationGraph make_graph(std::uint32_t n, std::vector<Edge> edges) {
    ComputationGraph g;
    g.num_nodes = n;
    g.roles.assign(n, NodeRole::Measuree);
    g.wires.assign(n, -1);
    normalize_edges(edges, "test");
    g.edges = std::move(edges);
    return g;
}

ComputationGraph two_cliques(bool bridged) {
    std::vector<Edge> e;
    for (NodeId base : {0u, 4u})
        for (NodeId i = 0; i < 4; ++i)
            for (NodeId j = i + 1; j < 4; ++j) e.push_back({base + i, base + j});
    if (bridged) e.push_back({3, 4});
    return make_graph(8, std::move(e));
}

// independent per-edge accumulation
double modularity_oracle(const ComputationGraph& g, std::span<const std::uint32_t> a) {
    double m = static_cast<double>(g.edges.size());
    if (m == 0) return 0.0;
    double q = 0.0;
    for (const auto& [u, v] : g.edges)
        if (a[u] == a[v]) q += 1.0 / m;
    std::uint32_t k = *std::max_element(a.begin(), a.end()) + 1;
    std::vector<double> deg(k, 0.0);
    for (const auto& [u, v] : g.edges) {
        deg[a[u]] += 1.0;
        deg[a[v]] += 1.0;
    }
    for (std::uint32_t c = 0; c < k; ++c) q -= (deg[c] / (2.0 * m)) * (deg[c] / (2.0 * m));
    return q;
}

std::int64_t max_part_size(std::span<const std::uint32_t> a, std::uint32_t k) {
    std::vector<std::int64_t> w(k, 0);
    for (std::uint32_t p : a) ++w[p];
    return *std::max_element(w.begin(), w.end());
}

} // namespace

TEST_CASE("modularity of the whole graph as one part is zero") {
    ComputationGraph g = two_cliques(true);
    std::vector<std::uint32_t> a(8, 0);
    CHECK(modularity(g, a) == doctest::Approx(0.0));
}

TEST_CASE("modularity of two disjoint cliques split by clique is exactly 1/2") {
    ComputationGraph g = two_cliques(false);
    std::vector<std::uint32_t> a = {0, 0, 0, 0, 1, 1, 1, 1};
    CHECK(modularity(g, a) == 0.5);
    CHECK(modularity_serial(g, a) == 0.5);
}

TEST_CASE("modularity matches the per-edge oracle on random inputs") {
    std::mt19937_64 rng(17);
    for (int rep = 0; rep < 50; ++rep) {
        ComputationGraph g = test::random_connected_graph(rng, 4 + rng() % 30, rng() % 40);
        std::uint32_t k = 1 + rng() % 5;
        std::vector<std::uint32_t> a(g.num_nodes);
        for (auto& x : a) x = rng() % k;
        a[0] = k - 1; // make sure every label range is covered by max+1
        double q = modularity(g, a);
        CHECK(q == doctest::Approx(modularity_oracle(g, a)).epsilon(1e-12));
        CHECK(q == doctest::Approx(modularity_serial(g, a)).epsilon(1e-14));
        CHECK(q >= -0.5 - 1e-12);
        CHECK(q <= 1.0 + 1e-12);
    }
}

TEST_CASE("kway_partition separates two disjoint cliques at alpha = 1") {
    ComputationGraph g = two_cliques(false);
    PartitionResult p = kway_partition(g, 2, 1.0, 0);
    CHECK(p.cut_edges.empty());
    CHECK(max_part_size(p.assignment, 2) == 4);
}

TEST_CASE("kway_partition with k = 1 is a single part with no cut") {
    std::mt19937_64 rng(23);
    ComputationGraph g = test::random_connected_graph(rng, 20, 15);
    PartitionResult p = kway_partition(g, 1, 1.0, 0);
    CHECK(p.cut_edges.empty());
    CHECK(p.modularity == doctest::Approx(0.0));
    for (auto part : p.assignment) CHECK(part == 0);
}

TEST_CASE("kway_partition cut is within 2x of the exhaustive optimum") {
    std::mt19937_64 rng(31);
    ComputationGraph g = test::random_connected_graph(rng, 12, 10);
    std::uint32_t k = 3;
    double alpha = 1.2;
    std::int64_t cap = balance_cap(12, k, alpha); // floor(1.2 * 4) = 4

    std::int64_t best = std::numeric_limits<std::int64_t>::max();
    std::vector<std::uint32_t> a(12);
    for (std::uint32_t code = 0; code < 531441; ++code) { // 3^12 assignments
        std::uint32_t c = code;
        std::int64_t sizes[3] = {0, 0, 0};
        for (int i = 0; i < 12; ++i) {
            a[i] = c % 3;
            ++sizes[a[i]];
            c /= 3;
        }
        if (std::max({sizes[0], sizes[1], sizes[2]}) > cap) continue;
        std::int64_t cut = 0;
        for (const auto& [u, v] : g.edges) cut += a[u] != a[v];
        best = std::min(best, cut);
    }

    PartitionResult p = kway_partition(g, k, alpha, 0);
    CHECK(max_part_size(p.assignment, k) <= cap);
    CHECK(static_cast<std::int64_t>(p.cut_edges.size()) <= 2 * best);
}

TEST_CASE("kway_partition respects the balance bound on random graphs") {
    std::mt19937_64 rng(41);
    for (int rep = 0; rep < 30; ++rep) {
        std::uint32_t n = 8 + rng() % 60;
        ComputationGraph g = test::random_connected_graph(rng, n, rng() % 80);
        std::uint32_t k = 2 + rng() % 4;
        double alpha = 1.0 + 0.1 * (rng() % 6);
        PartitionResult p = kway_partition(g, k, alpha, rep);
        CHECK(max_part_size(p.assignment, k) <= balance_cap(n, k, alpha));
        CHECK(p.cut_edges == cut_edges_of(g, p.assignment));
        CHECK(p.modularity == doctest::Approx(modularity_serial(g, p.assignment)));
    }
}

TEST_CASE("adaptive_partition returns the alpha=1 result when Q is flat") {
    ComputationGraph g = two_cliques(false);
    PartitionConfig cfg{2, 0.01, 1.02, 1.5, 0};
    PartitionResult base = kway_partition(g, 2, 1.0, 0);
    PartitionResult p = adaptive_partition(g, cfg);
    CHECK(p.modularity == base.modularity);
    CHECK(p.cut_edges.empty());
}

TEST_CASE("adaptive_partition finds the clique split of a bridged pair") {
    ComputationGraph g = two_cliques(true);
    PartitionConfig cfg{2, 0.01, 1.02, 1.5, 0};
    PartitionResult p = adaptive_partition(g, cfg);
    CHECK(p.cut_edges.size() == 1);

    // exhaustive optimum over all two-part assignments within the bound
    double best_q = -1.0;
    std::int64_t cap = balance_cap(8, 2, 1.5);
    for (std::uint32_t mask = 0; mask < 256; ++mask) {
        std::vector<std::uint32_t> a(8);
        std::int64_t ones = 0;
        for (int i = 0; i < 8; ++i) {
            a[i] = (mask >> i) & 1;
            ones += a[i];
        }
        if (ones > cap || 8 - ones > cap) continue;
        best_q = std::max(best_q, modularity_serial(g, a));
    }
    CHECK(p.modularity == doctest::Approx(best_q));
}

TEST_CASE("adaptive_partition postconditions hold on a benchmark bundle") {
    ProgramBundle b = translate(gen_benchmark(BenchmarkFamily::QFT, 16, 1), "qft16", 1, "test");
    PartitionConfig cfg{4, 0.01, 1.02, 1.5, 1};
    PartitionResult p = adaptive_partition(b.graph, cfg);
    PartitionResult base = kway_partition(b.graph, 4, 1.0, 1);
    CHECK(p.modularity >= base.modularity);
    CHECK(max_part_size(p.assignment, 4) <= balance_cap(b.graph.num_nodes, 4, 1.5));
}

TEST_CASE("multilevel coarsening handles graphs past the direct threshold") {
    // ~30k nodes forces heavy-edge-matching levels before the initial split
    std::mt19937_64 rng(97);
    std::uint32_t n = 30000;
    ComputationGraph g;
    g.num_nodes = n;
    g.roles.assign(n, NodeRole::Measuree);
    g.wires.assign(n, -1);
    for (NodeId v = 1; v < n; ++v) g.edges.push_back({v - 1, v});
    for (std::uint32_t i = 0; i < 2 * n; ++i) {
        NodeId u = static_cast<NodeId>(rng() % n);
        NodeId v = static_cast<NodeId>((u + 1 + rng() % 40) % n);
        if (u != v) g.edges.push_back({std::min(u, v), std::max(u, v)});
    }
    std::sort(g.edges.begin(), g.edges.end());
    g.edges.erase(std::unique(g.edges.begin(), g.edges.end()), g.edges.end());

    for (std::uint32_t k : {4u, 7u}) {
        PartitionResult p = kway_partition(g, k, 1.3, 5);
        CHECK(p.assignment.size() == n);
        CHECK(max_part_size(p.assignment, k) <= balance_cap(n, k, 1.3));
        CHECK(p.cut_edges == cut_edges_of(g, p.assignment));
        // a chain-with-local-shortcuts graph splits far below a random cut
        CHECK(p.cut_edges.size() < g.edges.size() / 10);
        PartitionResult q = kway_partition(g, k, 1.3, 5);
        CHECK(q.assignment == p.assignment); // deterministic per seed
    }
}

TEST_CASE("kway_partition rejects bad arguments") {
    ComputationGraph g = two_cliques(false);
    CHECK_THROWS_AS(kway_partition(g, 9, 1.0, 0), ValidationError);
    CHECK_THROWS_AS(kway_partition(g, 0, 1.0, 0), ValidationError);
    CHECK_THROWS_AS(kway_partition(g, 2, 0.5, 0), ValidationError);
    ComputationGraph empty;
    CHECK_THROWS_AS(kway_partition(empty, 1, 1.0, 0), ValidationError);
}
