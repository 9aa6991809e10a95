#pragma once

#include <string>

#include <json.hpp>

#include "dcmbqc/frontend.hpp"
#include "dcmbqc/model.hpp"
#include "dcmbqc/partition.hpp"
#include "dcmbqc/layout.hpp"
#include "dcmbqc/schedule.hpp"

namespace dcmbqc {

using Json = nlohmann::ordered_json;

// Bundle files: {"version":1, "meta":{...}, "nodes":[...], "edges":[[u,v],...],
// "deps":[[u,v],...]}, all arrays sorted ascending and edges stored u < v so
// saves are byte stable.
Json bundle_to_json(const ProgramBundle& b);
ProgramBundle bundle_from_json(const Json& j);

void save_bundle(const ProgramBundle& b, const std::string& path);
ProgramBundle load_bundle(const std::string& path);

// Circuit files: {"qubits":n, "gates":[{"kind":"cp","q":[u,v],"angle":x},...]}.
Json circuit_to_json(const Circuit& c);
Circuit circuit_from_json(const Json& j);
void save_circuit(const Circuit& c, const std::string& path);
Circuit load_circuit(const std::string& path);

Json partition_to_json(const PartitionResult& p);
PartitionResult partition_from_json(const Json& j, const ComputationGraph& g);

Json plan_to_json(const ExecutionPlan& p);

Json schedule_to_json(const LspInstance& inst, const Schedule& s);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);
Json parse_json(const std::string& text, const std::string& what);

} // namespace dcmbqc
