#include "dcmbqc/json_io.hpp"
#include <limits>

#include <fstream>
#include <sstream>

namespace dcmbqc {

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw UsageError("cannot open " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw UsageError("cannot write " + path);
    out << text;
    if (!out) throw UsageError("write failed for " + path);
}

Json parse_json(const std::string& text, const std::string& what) {
    Json j = Json::parse(text, nullptr, false);
    if (j.is_discarded()) throw ParseError(what + ": malformed JSON");
    return j;
}

namespace {

const Json& require(const Json& j, const char* key, const std::string& what) {
    auto it = j.find(key);
    if (it == j.end()) throw ValidationError(what + ": missing field \"" + key + "\"");
    return *it;
}

bool is_node_id(const Json& v) {
    return v.is_number_integer() && v.get<std::int64_t>() >= 0 &&
           v.get<std::int64_t>() <= std::numeric_limits<NodeId>::max();
}

std::vector<Edge> edges_from_json(const Json& arr, const std::string& what) {
    if (!arr.is_array()) throw ValidationError(what + ": expected an array of pairs");
    std::vector<Edge> out;
    out.reserve(arr.size());
    for (const Json& e : arr) {
        if (!e.is_array() || e.size() != 2 || !is_node_id(e[0]) || !is_node_id(e[1]))
            throw ValidationError(what + ": each entry must be a pair of node ids");
        out.emplace_back(e[0].get<NodeId>(), e[1].get<NodeId>());
    }
    return out;
}

Json edges_to_json(std::span<const Edge> edges) {
    Json arr = Json::array();
    for (const auto& [u, v] : edges) arr.push_back(Json::array({u, v}));
    return arr;
}

} // namespace

Json bundle_to_json(const ProgramBundle& b) {
    Json j;
    j["version"] = 1;
    j["meta"] = {{"name", b.meta.name},
                 {"qubits", b.meta.qubits},
                 {"seed", b.meta.seed},
                 {"generator", b.meta.generator}};
    Json nodes = Json::array();
    for (NodeId i = 0; i < b.graph.num_nodes; ++i) {
        nodes.push_back({{"id", i},
                         {"role", b.graph.roles[i] == NodeRole::Removee ? "removee" : "measuree"},
                         {"angle", b.deps.angles[i]},
                         {"wire", b.graph.wires[i]}});
    }
    j["nodes"] = std::move(nodes);
    j["edges"] = edges_to_json(b.graph.edges);
    j["deps"] = edges_to_json(b.deps.dep_edges);
    return j;
}

ProgramBundle bundle_from_json(const Json& j) {
    const std::string what = "bundle";
    if (!j.is_object()) throw ValidationError(what + ": top level must be an object");
    if (require(j, "version", what) != 1)
        throw ValidationError(what + ": unsupported version");

    ProgramBundle b;
    const Json& meta = require(j, "meta", what);
    b.meta.name = require(meta, "name", what).get<std::string>();
    b.meta.qubits = require(meta, "qubits", what).get<std::uint32_t>();
    b.meta.seed = require(meta, "seed", what).get<std::uint64_t>();
    b.meta.generator = require(meta, "generator", what).get<std::string>();

    const Json& nodes = require(j, "nodes", what);
    if (!nodes.is_array()) throw ValidationError(what + ": \"nodes\" must be an array");
    b.graph.num_nodes = static_cast<std::uint32_t>(nodes.size());
    b.deps.num_nodes = b.graph.num_nodes;
    NodeId expect = 0;
    for (const Json& n : nodes) {
        NodeId id = require(n, "id", what).get<NodeId>();
        if (id != expect) {
            std::ostringstream os;
            os << what << ": node ids must be dense ascending, got " << id << " expecting "
               << expect;
            throw ValidationError(os.str());
        }
        ++expect;
        std::string role = require(n, "role", what).get<std::string>();
        if (role != "measuree" && role != "removee")
            throw ValidationError(what + ": node " + std::to_string(id) + " has unknown role \"" +
                                  role + "\"");
        b.graph.roles.push_back(role == "removee" ? NodeRole::Removee : NodeRole::Measuree);
        b.deps.removee.push_back(role == "removee" ? 1 : 0);
        b.deps.angles.push_back(require(n, "angle", what).get<double>());
        b.graph.wires.push_back(n.contains("wire") ? n["wire"].get<std::int32_t>() : -1);
    }

    b.graph.edges = edges_from_json(require(j, "edges", what), what + " edges");
    for (const auto& [u, v] : b.graph.edges)
        if (u >= b.graph.num_nodes || v >= b.graph.num_nodes) {
            std::ostringstream os;
            os << what << ": edge references undeclared node " << std::max(u, v);
            throw ValidationError(os.str());
        }
    b.deps.dep_edges = edges_from_json(require(j, "deps", what), what + " deps");

    validate_bundle(b);
    return b;
}

void save_bundle(const ProgramBundle& b, const std::string& path) {
    write_text_file(path, bundle_to_json(b).dump(1) + "\n");
}

ProgramBundle load_bundle(const std::string& path) {
    return bundle_from_json(parse_json(read_text_file(path), "bundle"));
}

namespace {

const char* kind_name(GateKind k) {
    switch (k) {
        case GateKind::J: return "j";
        case GateKind::CZ: return "cz";
        case GateKind::CNOT: return "cnot";
        case GateKind::H: return "h";
        case GateKind::RZ: return "rz";
        case GateKind::CP: return "cp";
    }
    return "?";
}

GateKind kind_from(const std::string& s) {
    if (s == "j") return GateKind::J;
    if (s == "cz") return GateKind::CZ;
    if (s == "cnot") return GateKind::CNOT;
    if (s == "h") return GateKind::H;
    if (s == "rz") return GateKind::RZ;
    if (s == "cp") return GateKind::CP;
    throw ValidationError("circuit: unknown gate kind \"" + s + "\"");
}

bool kind_has_angle(GateKind k) {
    return k == GateKind::J || k == GateKind::RZ || k == GateKind::CP;
}

} // namespace

Json circuit_to_json(const Circuit& c) {
    Json j;
    j["qubits"] = c.qubits;
    Json gates = Json::array();
    for (const Gate& g : c.gates) {
        Json e;
        e["kind"] = kind_name(g.kind);
        e["q"] = g.is_two_qubit() ? Json::array({g.q0, g.q1}) : Json::array({g.q0});
        if (kind_has_angle(g.kind)) e["angle"] = g.angle;
        gates.push_back(std::move(e));
    }
    j["gates"] = std::move(gates);
    return j;
}

Circuit circuit_from_json(const Json& j) {
    const std::string what = "circuit";
    Circuit c;
    c.qubits = require(j, "qubits", what).get<std::uint32_t>();
    const Json& gates = require(j, "gates", what);
    if (!gates.is_array()) throw ValidationError(what + ": \"gates\" must be an array");
    for (const Json& e : gates) {
        Gate g{};
        g.kind = kind_from(require(e, "kind", what).get<std::string>());
        const Json& q = require(e, "q", what);
        bool two = g.is_two_qubit();
        if (!q.is_array() || q.size() != (two ? 2u : 1u))
            throw ValidationError(what + ": operand arity does not match gate kind");
        g.q0 = q[0].get<std::uint32_t>();
        if (two) g.q1 = q[1].get<std::uint32_t>();
        if (kind_has_angle(g.kind)) g.angle = require(e, "angle", what).get<double>();
        c.gates.push_back(g);
    }
    validate_circuit(c);
    return c;
}

void save_circuit(const Circuit& c, const std::string& path) {
    write_text_file(path, circuit_to_json(c).dump(1) + "\n");
}

Circuit load_circuit(const std::string& path) {
    return circuit_from_json(parse_json(read_text_file(path), "circuit"));
}

Json partition_to_json(const PartitionResult& p) {
    Json j;
    j["k"] = p.k;
    j["assignment"] = p.assignment;
    j["cut"] = p.cut_edges.size();
    j["modularity"] = p.modularity;
    j["alpha_used"] = p.imbalance_used;
    return j;
}

PartitionResult partition_from_json(const Json& j, const ComputationGraph& g) {
    const std::string what = "partition";
    PartitionResult p;
    p.k = require(j, "k", what).get<std::uint32_t>();
    p.assignment = require(j, "assignment", what).get<std::vector<std::uint32_t>>();
    p.imbalance_used = require(j, "alpha_used", what).get<double>();
    if (p.assignment.size() != g.num_nodes)
        throw ValidationError(what + ": assignment does not cover the node set");
    for (std::uint32_t a : p.assignment)
        if (a >= p.k) throw ValidationError(what + ": assignment references part out of range");
    p.cut_edges = cut_edges_of(g, p.assignment);
    p.modularity = modularity(g, p.assignment);
    if (require(j, "cut", what).get<std::uint64_t>() != p.cut_edges.size())
        throw ValidationError(what + ": stored cut size disagrees with the assignment");
    double stored_q = require(j, "modularity", what).get<double>();
    if (std::abs(stored_q - p.modularity) > 1e-9)
        throw ValidationError(what + ": stored modularity disagrees with the assignment");
    return p;
}

Json plan_to_json(const ExecutionPlan& p) {
    Json j;
    j["qpu"] = p.qpu;
    Json layers = Json::array();
    for (const auto& layer : p.layers) layers.push_back(layer);
    j["layers"] = std::move(layers);
    Json fusees = Json::array();
    for (const auto& f : p.fusee_pairs)
        fusees.push_back(Json::array({f.u, f.v, f.layer_u, f.layer_v}));
    j["fusees"] = std::move(fusees);
    Json connectors = Json::array();
    for (const auto& c : p.connectors)
        connectors.push_back({{"edge", Json::array({c.edge.first, c.edge.second})},
                              {"local", c.local},
                              {"layer", c.layer}});
    j["connectors"] = std::move(connectors);
    return j;
}

Json schedule_to_json(const LspInstance& inst, const Schedule& s) {
    Json j;
    Json mains = Json::array();
    for (std::uint32_t m = 0; m < inst.num_mains(); ++m)
        mains.push_back({{"qpu", inst.main_qpu[m]},
                         {"index", inst.plan_index(m)},
                         {"t", s.main_start[m]}});
    j["main"] = std::move(mains);
    Json syncs = Json::array();
    for (std::uint32_t k = 0; k < inst.num_syncs(); ++k)
        syncs.push_back({{"id", k}, {"t", s.sync_start[k]}});
    j["sync"] = std::move(syncs);
    j["kmax"] = inst.k_max;
    return j;
}

} // namespace dcmbqc
