#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dcmbqc/model.hpp"

namespace dcmbqc {

enum class GateKind : std::uint8_t { J, CZ, CNOT, H, RZ, CP };

struct Gate {
    GateKind kind;
    std::uint32_t q0 = 0;
    std::uint32_t q1 = 0; ///< second operand for CZ/CNOT/CP, unused otherwise
    double angle = 0.0;   ///< for J/RZ/CP

    bool is_two_qubit() const {
        return kind == GateKind::CZ || kind == GateKind::CNOT || kind == GateKind::CP;
    }
};

struct Circuit {
    std::uint32_t qubits = 0;
    std::vector<Gate> gates;

    std::size_t two_qubit_count() const;
};

void validate_circuit(const Circuit& c);

enum class BenchmarkFamily : std::uint8_t { QFT, QAOA, VQE, RCA };

BenchmarkFamily parse_family(const std::string& name);
std::string family_name(BenchmarkFamily f);

/// Deterministic benchmark circuit generator. `qubits` is the program size
/// label; for RCA the circuit spans 2*(qubits-3)+2 wires (carry-in, two
/// addend registers of width qubits-3, carry-out).
Circuit gen_benchmark(BenchmarkFamily family, std::uint32_t qubits, std::uint64_t seed);

/// Translates a circuit into a graph-state program. Each wire becomes a
/// chain of nodes: a J(a) appends one node to its wire's chain, sets angle
/// -a on the previous chain head and records one dependency edge old->new;
/// a CZ links the two current chain heads. H and RZ rewrite to J-form,
/// CNOT and CP to CZ plus single-qubit J's.
ProgramBundle translate(const Circuit& circuit, const std::string& name = "circuit",
                        std::uint64_t seed = 0, const std::string& generator = "translate");

/// Number of chain nodes the rewrite stage emits for one gate. Exposed so
/// tests can recount node totals without going through translate().
std::uint32_t rewritten_j_count(const Gate& g);
/// Number of CZ links the rewrite stage emits for one gate.
std::uint32_t rewritten_cz_count(const Gate& g);

/// Folds Pauli byproducts into the measurement angle:
/// returns (-1)^s * angle + t*pi, normalized to (-pi, pi].
double absorb_correction(double angle, int s, int t);

} // namespace dcmbqc
