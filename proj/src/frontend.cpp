#include "dcmbqc/frontend.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

namespace dcmbqc {

std::size_t Circuit::two_qubit_count() const {
    std::size_t c = 0;
    for (const auto& g : gates) c += g.is_two_qubit() ? 1 : 0;
    return c;
}

void validate_circuit(const Circuit& c) {
    for (std::size_t i = 0; i < c.gates.size(); ++i) {
        const Gate& g = c.gates[i];
        if (g.q0 >= c.qubits || (g.is_two_qubit() && g.q1 >= c.qubits)) {
            std::ostringstream os;
            os << "circuit: gate " << i << " operand out of range";
            throw ValidationError(os.str());
        }
        if (g.is_two_qubit() && g.q0 == g.q1) {
            std::ostringstream os;
            os << "circuit: gate " << i << " has identical operands " << g.q0;
            throw ValidationError(os.str());
        }
    }
}

BenchmarkFamily parse_family(const std::string& name) {
    std::string s;
    for (char ch : name) s.push_back(static_cast<char>(std::tolower(ch)));
    if (s == "qft") return BenchmarkFamily::QFT;
    if (s == "qaoa") return BenchmarkFamily::QAOA;
    if (s == "vqe") return BenchmarkFamily::VQE;
    if (s == "rca") return BenchmarkFamily::RCA;
    throw UsageError("unknown benchmark family: " + name);
}

std::string family_name(BenchmarkFamily f) {
    switch (f) {
        case BenchmarkFamily::QFT: return "qft";
        case BenchmarkFamily::QAOA: return "qaoa";
        case BenchmarkFamily::VQE: return "vqe";
        case BenchmarkFamily::RCA: return "rca";
    }
    return "?";
}

namespace {

constexpr double kPi = std::numbers::pi;

double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Portable Fisher-Yates; std::shuffle is not reproducible across libraries.
template <typename T>
void seeded_shuffle(std::vector<T>& v, std::mt19937_64& rng) {
    for (std::size_t i = v.size(); i > 1; --i)
        std::swap(v[i - 1], v[rng() % i]);
}

void h(Circuit& c, std::uint32_t q) { c.gates.push_back({GateKind::H, q, 0, 0.0}); }
void rz(Circuit& c, std::uint32_t q, double a) { c.gates.push_back({GateKind::RZ, q, 0, a}); }
void cnot(Circuit& c, std::uint32_t ctl, std::uint32_t tgt) {
    c.gates.push_back({GateKind::CNOT, ctl, tgt, 0.0});
}
void cp(Circuit& c, std::uint32_t a, std::uint32_t b, double angle) {
    c.gates.push_back({GateKind::CP, a, b, angle});
}

Circuit gen_qft(std::uint32_t n) {
    Circuit c{n, {}};
    for (std::uint32_t i = 0; i < n; ++i) {
        h(c, i);
        for (std::uint32_t j = i + 1; j < n; ++j)
            cp(c, i, j, std::ldexp(kPi, -static_cast<int>(j - i)));
    }
    return c;
}

Circuit gen_vqe(std::uint32_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    Circuit c{n, {}};
    auto rot_layer = [&] {
        for (std::uint32_t q = 0; q < n; ++q) {
            rz(c, q, 2.0 * kPi * uniform01(rng) - kPi);
            h(c, q);
            rz(c, q, 2.0 * kPi * uniform01(rng) - kPi);
            h(c, q);
        }
    };
    rot_layer();
    // one fully entangled layer: every qubit pair gets one CNOT
    for (std::uint32_t i = 0; i < n; ++i)
        for (std::uint32_t j = i + 1; j < n; ++j) cnot(c, i, j);
    rot_layer();
    return c;
}

Circuit gen_qaoa(std::uint32_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<Edge> pairs;
    pairs.reserve(static_cast<std::size_t>(n) * (n - 1) / 2);
    for (std::uint32_t i = 0; i < n; ++i)
        for (std::uint32_t j = i + 1; j < n; ++j) pairs.emplace_back(i, j);
    seeded_shuffle(pairs, rng);
    pairs.resize(pairs.size() / 2); // Max-Cut on half of all possible edges
    std::sort(pairs.begin(), pairs.end());

    double gamma = kPi * uniform01(rng);
    double beta = kPi * uniform01(rng);

    Circuit c{n, {}};
    for (std::uint32_t q = 0; q < n; ++q) h(c, q);
    for (const auto& [u, v] : pairs) {
        rz(c, u, gamma);
        rz(c, v, gamma);
        cp(c, u, v, -2.0 * gamma);
    }
    for (std::uint32_t q = 0; q < n; ++q) {
        h(c, q);
        rz(c, q, 2.0 * beta);
        h(c, q);
    }
    return c;
}

void toffoli(Circuit& c, std::uint32_t a, std::uint32_t b, std::uint32_t t) {
    const double kT = kPi / 4.0;
    h(c, t);
    cnot(c, b, t);
    rz(c, t, -kT);
    cnot(c, a, t);
    rz(c, t, kT);
    cnot(c, b, t);
    rz(c, t, -kT);
    cnot(c, a, t);
    rz(c, b, kT);
    rz(c, t, kT);
    h(c, t);
    cnot(c, a, b);
    rz(c, a, kT);
    rz(c, b, -kT);
    cnot(c, a, b);
}

void maj(Circuit& c, std::uint32_t carry, std::uint32_t b, std::uint32_t a) {
    cnot(c, a, b);
    cnot(c, a, carry);
    toffoli(c, carry, b, a);
}

void uma(Circuit& c, std::uint32_t carry, std::uint32_t b, std::uint32_t a) {
    toffoli(c, carry, b, a);
    cnot(c, a, carry);
    cnot(c, carry, b);
}

// Ripple-carry adder over two (size-3)-bit registers: carry-in on wire 0,
// addends on wires 1..w and w+1..2w, carry-out on wire 2w+1. Width w = size-3
// gives 16w+1 two-qubit gates.
Circuit gen_rca(std::uint32_t size) {
    if (size < 4) throw ValidationError("rca: needs size >= 4 (addend width size - 3)");
    std::uint32_t w = size - 3;
    Circuit c{2 * w + 2, {}};
    auto a = [&](std::uint32_t i) { return 1 + i; };
    auto b = [&](std::uint32_t i) { return 1 + w + i; };
    std::uint32_t z = 2 * w + 1;

    maj(c, 0, b(0), a(0));
    for (std::uint32_t i = 1; i < w; ++i) maj(c, a(i - 1), b(i), a(i));
    cnot(c, a(w - 1), z);
    for (std::uint32_t i = w; i-- > 1;) uma(c, a(i - 1), b(i), a(i));
    uma(c, 0, b(0), a(0));
    return c;
}

} // namespace

Circuit gen_benchmark(BenchmarkFamily family, std::uint32_t qubits, std::uint64_t seed) {
    if (qubits < 2) throw ValidationError("benchmark: needs at least 2 qubits");
    Circuit c;
    switch (family) {
        case BenchmarkFamily::QFT: c = gen_qft(qubits); break;
        case BenchmarkFamily::QAOA: c = gen_qaoa(qubits, seed); break;
        case BenchmarkFamily::VQE: c = gen_vqe(qubits, seed); break;
        case BenchmarkFamily::RCA: c = gen_rca(qubits); break;
    }
    validate_circuit(c);
    return c;
}

std::uint32_t rewritten_j_count(const Gate& g) {
    switch (g.kind) {
        case GateKind::J: return 1;
        case GateKind::H: return 1;
        case GateKind::RZ: return 0;
        case GateKind::CZ: return 0;
        case GateKind::CNOT: return 2; // H target, CZ, H target
        case GateKind::CP: return 4;   // two CNOTs on the second operand
    }
    return 0;
}

std::uint32_t rewritten_cz_count(const Gate& g) {
    switch (g.kind) {
        case GateKind::CZ: return 1;
        case GateKind::CNOT: return 1;
        case GateKind::CP: return 2;
        default: return 0;
    }
}

namespace {

struct Translator {
    Circuit const& circuit;
    std::vector<NodeId> head;       // current chain head per wire
    std::vector<double> pending;    // accumulated Z-rotation not yet folded into a J
    ProgramBundle out;

    explicit Translator(const Circuit& c) : circuit(c) {
        std::uint32_t n = c.qubits;
        head.resize(n);
        pending.assign(n, 0.0);
        for (std::uint32_t q = 0; q < n; ++q) {
            head[q] = q;
            out.graph.roles.push_back(NodeRole::Measuree);
            out.graph.wires.push_back(static_cast<std::int32_t>(q));
            out.deps.angles.push_back(0.0);
            out.deps.removee.push_back(0);
        }
        out.graph.num_nodes = n;
    }

    NodeId new_node(std::uint32_t wire) {
        NodeId id = out.graph.num_nodes++;
        out.graph.roles.push_back(NodeRole::Measuree);
        out.graph.wires.push_back(static_cast<std::int32_t>(wire));
        out.deps.angles.push_back(0.0);
        out.deps.removee.push_back(0);
        return id;
    }

    void emit_j(std::uint32_t wire, double angle) {
        double eff = angle + pending[wire];
        pending[wire] = 0.0;
        NodeId old = head[wire];
        NodeId fresh = new_node(wire);
        out.graph.edges.emplace_back(old, fresh);
        out.deps.dep_edges.emplace_back(old, fresh);
        out.deps.angles[old] = -eff;
        head[wire] = fresh;
    }

    void emit_cz(std::uint32_t wa, std::uint32_t wb) {
        out.graph.edges.emplace_back(head[wa], head[wb]);
    }

    void apply(const Gate& g) {
        switch (g.kind) {
            case GateKind::J: emit_j(g.q0, g.angle); break;
            case GateKind::H: emit_j(g.q0, 0.0); break;
            case GateKind::RZ: pending[g.q0] += g.angle; break;
            case GateKind::CZ: emit_cz(g.q0, g.q1); break;
            case GateKind::CNOT:
                apply({GateKind::H, g.q1, 0, 0.0});
                apply({GateKind::CZ, g.q0, g.q1, 0.0});
                apply({GateKind::H, g.q1, 0, 0.0});
                break;
            case GateKind::CP:
                apply({GateKind::RZ, g.q0, 0, g.angle / 2});
                apply({GateKind::RZ, g.q1, 0, g.angle / 2});
                apply({GateKind::CNOT, g.q0, g.q1, 0.0});
                apply({GateKind::RZ, g.q1, 0, -g.angle / 2});
                apply({GateKind::CNOT, g.q0, g.q1, 0.0});
                break;
        }
    }
};

} // namespace

ProgramBundle translate(const Circuit& circuit, const std::string& name, std::uint64_t seed,
                        const std::string& generator) {
    validate_circuit(circuit);
    Translator tr(circuit);
    for (const Gate& g : circuit.gates) tr.apply(g);
    // trailing Z-rotations act on unmeasured outputs and stay in the
    // classical output frame

    ProgramBundle b = std::move(tr.out);
    b.deps.num_nodes = b.graph.num_nodes;
    normalize_edges(b.graph.edges, "graph");
    std::sort(b.deps.dep_edges.begin(), b.deps.dep_edges.end());
    b.meta = {name, circuit.qubits, seed, generator};
    validate_bundle(b);
    return b;
}

double absorb_correction(double angle, int s, int t) {
    double r = (s ? -angle : angle) + (t ? kPi : 0.0);
    r = std::fmod(r, 2.0 * kPi);
    if (r > kPi)
        r -= 2.0 * kPi;
    else if (r <= -kPi)
        r += 2.0 * kPi;
    return r;
}

} // namespace dcmbqc
