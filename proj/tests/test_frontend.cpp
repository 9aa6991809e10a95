#include <doctest.h>

#include <cmath>
#include <numbers>
#include <set>

#include "dcmbqc/frontend.hpp"
#include "dcmbqc/json_io.hpp"

using namespace dcmbqc;

namespace {
constexpr double kPi = std::numbers::pi;

std::size_t expected_nodes(const Circuit& c) {
    std::size_t j = 0;
    for (const Gate& g : c.gates) j += rewritten_j_count(g);
    return c.qubits + j;
}
std::size_t expected_edges(const Circuit& c) {
    std::size_t e = 0;
    for (const Gate& g : c.gates) e += rewritten_j_count(g) + rewritten_cz_count(g);
    return e;
}
} // namespace

TEST_CASE("absorb_correction folds byproducts into the angle") {
    CHECK(absorb_correction(kPi / 2, 0, 0) == doctest::Approx(kPi / 2));
    CHECK(absorb_correction(kPi / 4, 1, 0) == doctest::Approx(-kPi / 4));
    CHECK(absorb_correction(kPi / 4, 1, 1) == doctest::Approx(3 * kPi / 4));
}

TEST_CASE("absorb_correction normalizes to (-pi, pi]") {
    CHECK(absorb_correction(kPi / 2, 0, 1) == doctest::Approx(-kPi / 2));
    CHECK(absorb_correction(kPi, 1, 0) == doctest::Approx(kPi)); // -pi wraps to +pi
    for (double a : {-3.0, -1.0, 0.0, 0.5, 3.0})
        for (int s : {0, 1})
            for (int t : {0, 1}) {
                double r = absorb_correction(a, s, t);
                CHECK(r > -kPi - 1e-12);
                CHECK(r <= kPi + 1e-12);
            }
}

TEST_CASE("two-qubit gate counts match the closed forms") {
    CHECK(gen_benchmark(BenchmarkFamily::QFT, 16, 0).two_qubit_count() == 120);
    CHECK(gen_benchmark(BenchmarkFamily::QFT, 36, 0).two_qubit_count() == 630);
    CHECK(gen_benchmark(BenchmarkFamily::VQE, 16, 1).two_qubit_count() == 120);
    CHECK(gen_benchmark(BenchmarkFamily::VQE, 36, 1).two_qubit_count() == 630);
    for (std::uint32_t n : {16u, 36u, 81u, 100u, 144u}) {
        CHECK(gen_benchmark(BenchmarkFamily::QFT, n, 0).two_qubit_count() == n * (n - 1) / 2);
        CHECK(gen_benchmark(BenchmarkFamily::VQE, n, 0).two_qubit_count() == n * (n - 1) / 2);
    }
}

TEST_CASE("ripple-carry adder sizes") {
    CHECK(gen_benchmark(BenchmarkFamily::RCA, 16, 0).two_qubit_count() == 209);
    CHECK(gen_benchmark(BenchmarkFamily::RCA, 36, 0).two_qubit_count() == 529);
    CHECK(gen_benchmark(BenchmarkFamily::RCA, 81, 0).two_qubit_count() == 1249);
    CHECK(gen_benchmark(BenchmarkFamily::RCA, 16, 0).qubits == 2 * 13 + 2);
    CHECK_THROWS_AS(gen_benchmark(BenchmarkFamily::RCA, 3, 0), ValidationError);
}

TEST_CASE("qaoa picks half of all candidate edges") {
    for (std::uint64_t seed : {0ull, 1ull, 42ull}) {
        Circuit c = gen_benchmark(BenchmarkFamily::QAOA, 16, seed);
        // independent recount of the generated edge list
        std::set<Edge> edges;
        for (const Gate& g : c.gates)
            if (g.kind == GateKind::CP)
                edges.insert({std::min(g.q0, g.q1), std::max(g.q0, g.q1)});
        CHECK(edges.size() == 120 / 2);
        CHECK(c.two_qubit_count() == 60);
    }
}

TEST_CASE("gen_benchmark is a pure function of family, size and seed") {
    for (auto fam : {BenchmarkFamily::QFT, BenchmarkFamily::QAOA, BenchmarkFamily::VQE,
                     BenchmarkFamily::RCA}) {
        Json a = circuit_to_json(gen_benchmark(fam, 16, 9));
        Json b = circuit_to_json(gen_benchmark(fam, 16, 9));
        CHECK(a.dump() == b.dump());
    }
}

TEST_CASE("translate: single J builds a two-node chain") {
    Circuit c{1, {{GateKind::J, 0, 0, kPi / 2}}};
    ProgramBundle b = translate(c);
    CHECK(b.graph.num_nodes == 2);
    CHECK(b.graph.edges == std::vector<Edge>{{0, 1}});
    CHECK(b.deps.dep_edges == std::vector<Edge>{{0, 1}});
    CHECK(b.deps.angles[0] == doctest::Approx(-kPi / 2));
}

TEST_CASE("translate: a bare CZ adds an edge and no dependency") {
    Circuit c{2, {{GateKind::CZ, 0, 1, 0.0}}};
    ProgramBundle b = translate(c);
    CHECK(b.graph.num_nodes == 2);
    CHECK(b.graph.edges == std::vector<Edge>{{0, 1}});
    CHECK(b.deps.dep_edges.empty());
}

TEST_CASE("per-gate rewrite counts are what single-gate circuits produce") {
    auto nodes_added = [](Circuit c) {
        return translate(c).graph.num_nodes - c.qubits;
    };
    CHECK(nodes_added({1, {{GateKind::H, 0, 0, 0.0}}}) == rewritten_j_count({GateKind::H, 0, 0, 0.0}));
    CHECK(nodes_added({1, {{GateKind::RZ, 0, 0, 1.0}}}) == 0);
    CHECK(nodes_added({2, {{GateKind::CNOT, 0, 1, 0.0}}}) ==
          rewritten_j_count({GateKind::CNOT, 0, 1, 0.0}));
    CHECK(nodes_added({2, {{GateKind::CP, 0, 1, 0.5}}}) ==
          rewritten_j_count({GateKind::CP, 0, 1, 0.5}));
    CHECK(translate({2, {{GateKind::CP, 0, 1, 0.5}}}).graph.edges.size() ==
          rewritten_j_count({GateKind::CP, 0, 1, 0.5}) + rewritten_cz_count({GateKind::CP, 0, 1, 0.5}));
}

TEST_CASE("translate node and edge counts match independent recounts") {
    for (auto [fam, n] : std::vector<std::pair<BenchmarkFamily, std::uint32_t>>{
             {BenchmarkFamily::QFT, 16},
             {BenchmarkFamily::VQE, 12},
             {BenchmarkFamily::QAOA, 10},
             {BenchmarkFamily::RCA, 8}}) {
        Circuit c = gen_benchmark(fam, n, 5);
        ProgramBundle b = translate(c);
        CHECK(b.graph.num_nodes == expected_nodes(c));
        CHECK(b.graph.edges.size() == expected_edges(c));
        CHECK(b.deps.dep_edges.size() == b.graph.num_nodes - c.qubits); // one per J
        CHECK_NOTHROW(topo_sort(b.deps));
    }
}

TEST_CASE("qft-16 dependency DAG has one edge per rewritten J gate") {
    Circuit c = gen_benchmark(BenchmarkFamily::QFT, 16, 0);
    std::size_t j_total = 0;
    for (const Gate& g : c.gates) j_total += rewritten_j_count(g);
    ProgramBundle b = translate(c);
    CHECK(b.deps.dep_edges.size() == j_total);
}

TEST_CASE("translate rejects a duplicate entangling edge") {
    Circuit c{2, {{GateKind::CZ, 0, 1, 0.0}, {GateKind::CZ, 1, 0, 0.0}}};
    CHECK_THROWS_AS(translate(c), ValidationError);
}

TEST_CASE("circuit JSON round trip") {
    Circuit c = gen_benchmark(BenchmarkFamily::QAOA, 8, 3);
    Json j = circuit_to_json(c);
    Circuit back = circuit_from_json(j);
    CHECK(circuit_to_json(back).dump() == j.dump());
}
