#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>

#include "dcmbqc/layout.hpp"
#include "dcmbqc/partition.hpp"
#include "test_support.hpp"

using namespace dcmbqc;

namespace {

SubgraphView whole_graph_view(const ComputationGraph& g) {
    SubgraphView v;
    for (NodeId i = 0; i < g.num_nodes; ++i) v.nodes.push_back(i);
    v.intra_edges = g.edges;
    return v;
}

ComputationGraph path_graph(std::uint32_t n) {
    ComputationGraph g;
    g.num_nodes = n;
    g.roles.assign(n, NodeRole::Measuree);
    g.wires.assign(n, -1);
    for (NodeId i = 0; i + 1 < n; ++i) g.edges.push_back({i, i + 1});
    return g;
}

std::uint32_t max_fusee_gap(const ExecutionPlan& p) {
    std::uint32_t m = 0;
    for (const auto& f : p.fusee_pairs)
        m = std::max(m, f.layer_u > f.layer_v ? f.layer_u - f.layer_v : f.layer_v - f.layer_u);
    return m;
}

} // namespace

TEST_CASE("default_grid reproduces the benchmark grid sides") {
    CHECK(default_grid(16).side == 7);
    CHECK(default_grid(36).side == 11);
    CHECK(default_grid(64).side == 15);
    CHECK(default_grid(81).side == 17);
    CHECK(default_grid(100).side == 19);
    CHECK(default_grid(121).side == 21);
    CHECK(default_grid(144).side == 23);
    CHECK(default_grid(196).side == 27);
    CHECK(default_grid(1).side == 1);
}

TEST_CASE("greedy packing fills layers by ceiling division") {
    ComputationGraph g = path_graph(5);
    ExecutionPlan p = assemble_layers(whole_graph_view(g), GridSpec{2, 0.5}, LayerOrdering::Bfs, 0,
                                      0, g.num_nodes);
    REQUIRE(p.layers.size() == 3);
    CHECK(p.layers[0].size() == 2);
    CHECK(p.layers[1].size() == 2);
    CHECK(p.layers[2].size() == 1);
}

TEST_CASE("cuthill_mckee keeps path edges within adjacent layers") {
    ComputationGraph g = path_graph(6);
    ExecutionPlan p = assemble_layers(whole_graph_view(g), GridSpec{2, 0.5},
                                      LayerOrdering::CuthillMckee, 0, 0, g.num_nodes);
    CHECK(max_fusee_gap(p) == 1);
}

TEST_CASE("bfs on a star puts the center in layer zero with gap two") {
    ComputationGraph g;
    g.num_nodes = 6;
    g.roles.assign(6, NodeRole::Measuree);
    g.wires.assign(6, -1);
    for (NodeId leaf = 1; leaf < 6; ++leaf) g.edges.push_back({0, leaf});
    ExecutionPlan p = assemble_layers(whole_graph_view(g), GridSpec{2, 0.5}, LayerOrdering::Bfs, 0,
                                      0, g.num_nodes);
    CHECK(p.node_layer[0] == 0);
    CHECK(max_fusee_gap(p) == 2);
}

TEST_CASE("cuthill_mckee never beats bfs on fusee gap for paths") {
    for (std::uint32_t n = 2; n <= 20; ++n) {
        ComputationGraph g = path_graph(n);
        ExecutionPlan rcm = assemble_layers(whole_graph_view(g), GridSpec{2, 0.5},
                                            LayerOrdering::CuthillMckee, 0, 0, g.num_nodes);
        ExecutionPlan bfs = assemble_layers(whole_graph_view(g), GridSpec{2, 0.5},
                                            LayerOrdering::Bfs, 0, 0, g.num_nodes);
        CHECK(max_fusee_gap(rcm) <= max_fusee_gap(bfs));
    }
}

TEST_CASE("plans partition the nodes and account for every edge") {
    std::mt19937_64 rng(13);
    for (int rep = 0; rep < 100; ++rep) {
        std::uint32_t n = 6 + rng() % 40;
        ComputationGraph g = test::random_connected_graph(rng, n, rng() % 50);
        std::uint32_t k = 1 + rng() % 3;
        PartitionResult part = kway_partition(g, k, 1.3, rep);
        auto views = split_parts(g, part.assignment, k);
        GridSpec grid{3, 0.5}; // capacity 4
        LayerOrdering ord = rep % 2 ? LayerOrdering::Bfs : LayerOrdering::CuthillMckee;

        std::set<NodeId> covered;
        std::set<Edge> accounted;
        for (std::uint32_t q = 0; q < k; ++q) {
            ExecutionPlan p = assemble_layers(views[q], grid, ord, 0, q, n);
            std::size_t placed = 0;
            CHECK(p.layers.size() ==
                  (views[q].nodes.size() + grid.capacity() - 1) /
                      static_cast<std::size_t>(grid.capacity()));
            for (std::uint32_t l = 0; l < p.layers.size(); ++l) {
                CHECK(static_cast<std::int64_t>(p.layers[l].size()) <= grid.capacity());
                for (NodeId u : p.layers[l]) {
                    ++placed;
                    CHECK(!covered.count(u));
                    covered.insert(u);
                    CHECK(p.node_layer[u] == static_cast<std::int32_t>(l));
                }
            }
            CHECK(placed == views[q].nodes.size());

            // every intra edge is same-layer or a fusee pair; every incident
            // cut edge appears exactly once as a connector
            std::set<Edge> fusees;
            for (const auto& f : p.fusee_pairs) fusees.insert({f.u, f.v});
            for (const auto& e : views[q].intra_edges) {
                if (p.node_layer[e.first] == p.node_layer[e.second])
                    CHECK(!fusees.count(e));
                else
                    CHECK(fusees.count(e));
                accounted.insert(e);
            }
            std::set<Edge> connectors;
            for (const auto& c : p.connectors) {
                CHECK(!connectors.count(c.edge));
                connectors.insert(c.edge);
                CHECK(p.node_layer[c.local] == static_cast<std::int32_t>(c.layer));
                accounted.insert(c.edge);
            }
            CHECK(connectors.size() == views[q].cut_incident.size());
        }
        CHECK(covered.size() == n);
        CHECK(accounted.size() == g.edges.size());
    }
}

TEST_CASE("grid capacity below one is rejected") {
    ComputationGraph g = path_graph(3);
    CHECK_THROWS_AS(
        assemble_layers(whole_graph_view(g), GridSpec{1, 0.5}, LayerOrdering::Bfs, 0, 0, 3),
        ValidationError);
}
