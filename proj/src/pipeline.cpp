#include "dcmbqc/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace dcmbqc {

void RunConfig::validate() const {
    if (qpus < 1) throw ValidationError("config: qpus must be at least 1");
    if (kmax < 1) throw ValidationError("config: kmax must be at least 1");
    if (alpha_max < 1.0) throw ValidationError("config: alpha_max must be >= 1");
    if (eps_q <= 0.0) throw ValidationError("config: eps_q must be > 0");
    if (gamma <= 1.0) throw ValidationError("config: gamma must be > 1");
    if (!(fill_factor > 0.0 && fill_factor <= 1.0))
        throw ValidationError("config: fill_factor must be in (0, 1]");
    if (!(sa_cooling > 0.0 && sa_cooling <= 1.0))
        throw ValidationError("config: sa_cooling must be in (0, 1]");
    if (sa_t0 <= 0.0) throw ValidationError("config: sa_t0 must be > 0");
    if (!(clock_ns > 0.0)) throw ValidationError("config: clock_ns must be > 0");
    parse_ordering(ordering);
}

Json config_to_json(const RunConfig& cfg) {
    Json j;
    j["qpus"] = cfg.qpus;
    j["kmax"] = cfg.kmax;
    j["alpha_max"] = cfg.alpha_max;
    j["eps_q"] = cfg.eps_q;
    j["gamma"] = cfg.gamma;
    j["sa_t0"] = cfg.sa_t0;
    j["sa_cooling"] = cfg.sa_cooling;
    j["sa_iters"] = cfg.sa_iters;
    j["fill_factor"] = cfg.fill_factor;
    j["ordering"] = cfg.ordering;
    j["seed"] = cfg.seed;
    j["clock_ns"] = cfg.clock_ns;
    j["run_bdir"] = cfg.run_bdir;
    return j;
}

void apply_config_json(RunConfig& cfg, const Json& j) {
    if (!j.is_object()) throw ValidationError("config: top level must be an object");
    for (const auto& [key, value] : j.items()) {
        if (key == "qpus")
            cfg.qpus = value.get<std::uint32_t>();
        else if (key == "kmax")
            cfg.kmax = value.get<std::uint32_t>();
        else if (key == "alpha_max")
            cfg.alpha_max = value.get<double>();
        else if (key == "eps_q")
            cfg.eps_q = value.get<double>();
        else if (key == "gamma")
            cfg.gamma = value.get<double>();
        else if (key == "sa_t0")
            cfg.sa_t0 = value.get<double>();
        else if (key == "sa_cooling")
            cfg.sa_cooling = value.get<double>();
        else if (key == "sa_iters")
            cfg.sa_iters = value.get<std::uint32_t>();
        else if (key == "fill_factor")
            cfg.fill_factor = value.get<double>();
        else if (key == "ordering")
            cfg.ordering = value.get<std::string>();
        else if (key == "seed")
            cfg.seed = value.get<std::uint64_t>();
        else if (key == "clock_ns")
            cfg.clock_ns = value.get<double>();
        else if (key == "run_bdir")
            cfg.run_bdir = value.get<bool>();
        else
            throw ValidationError("config: unknown key \"" + key + "\"");
    }
}

CompileArm compile_arm(const ProgramBundle& bundle, const RunConfig& cfg, std::uint32_t qpus) {
    CompileArm arm;
    PartitionConfig pc{qpus, cfg.eps_q, cfg.gamma, cfg.alpha_max, cfg.seed};
    arm.partition = adaptive_partition(bundle.graph, pc);

    GridSpec grid = default_grid(bundle.meta.qubits, cfg.fill_factor);
    LayerOrdering ordering = parse_ordering(cfg.ordering);
    auto parts = split_parts(bundle.graph, arm.partition.assignment, qpus);
    arm.plans.resize(qpus);
    std::int64_t nq = static_cast<std::int64_t>(qpus);
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
    for (std::int64_t q = 0; q < nq; ++q)
        arm.plans[static_cast<std::size_t>(q)] =
            assemble_layers(parts[static_cast<std::size_t>(q)], grid, ordering, cfg.seed,
                            static_cast<std::uint32_t>(q), bundle.graph.num_nodes);

    arm.instance = build_instance(arm.plans, arm.partition, bundle.deps, cfg.kmax);
    arm.schedule_list = list_schedule(arm.instance);
    arm.lifetime_list =
        lifetime_distributed(arm.instance, arm.schedule_list, arm.instance.deps, cfg.clock_ns);
    if (cfg.run_bdir) {
        BdirParams bp{cfg.sa_t0, cfg.sa_cooling, cfg.sa_iters, cfg.seed};
        arm.schedule = bdir(arm.instance, arm.schedule_list, bp);
    } else {
        arm.schedule = arm.schedule_list;
    }
    arm.lifetime =
        lifetime_distributed(arm.instance, arm.schedule, arm.instance.deps, cfg.clock_ns);
    return arm;
}

namespace {

double ratio(std::int64_t base, std::int64_t ours) {
    if (ours == 0) return base == 0 ? 1.0 : 0.0;
    return static_cast<double>(base) / static_cast<double>(ours);
}

} // namespace

CompileResult compile_bundle(const ProgramBundle& bundle, const RunConfig& cfg) {
    cfg.validate();
    CompileResult r;
    r.config = cfg;
    r.ours = compile_arm(bundle, cfg, cfg.qpus);
    if (cfg.qpus == 1) {
        r.baseline = r.ours;
    } else {
        r.baseline = compile_arm(bundle, cfg, 1);
    }
    r.factor_exec = ratio(r.baseline.lifetime.exec_time, r.ours.lifetime.exec_time);
    r.factor_tau = ratio(r.baseline.lifetime.tau_photon, r.ours.lifetime.tau_photon);
    return r;
}

Json lifetime_to_json(const LifetimeReport& r) {
    Json j;
    j["tau_fusee"] = r.tau_fusee;
    j["tau_measuree"] = r.tau_measuree;
    j["tau_local"] = r.tau_local;
    j["tau_remote"] = r.tau_remote;
    j["tau_photon"] = r.tau_photon;
    j["exec_time"] = r.exec_time;
    j["clock_ns"] = r.clock_ns;
    j["loss_probability"] = r.loss_probability;
    return j;
}

namespace {

Json arm_to_json(const CompileArm& arm) {
    Json j;
    j["partition"] = {{"k", arm.partition.k},
                      {"cut", arm.partition.cut_edges.size()},
                      {"modularity", arm.partition.modularity},
                      {"alpha_used", arm.partition.imbalance_used}};
    j["schedule"] = {{"mains", arm.instance.num_mains()},
                     {"syncs", arm.instance.num_syncs()},
                     {"kmax", arm.instance.k_max}};
    j["lifetime_list"] = lifetime_to_json(arm.lifetime_list);
    j["lifetime"] = lifetime_to_json(arm.lifetime);
    return j;
}

} // namespace

Json compile_report(const ProgramBundle& bundle, const CompileResult& r) {
    Json j;
    j["config"] = config_to_json(r.config);
    j["bundle"] = {{"name", bundle.meta.name},
                   {"qubits", bundle.meta.qubits},
                   {"nodes", bundle.graph.num_nodes},
                   {"edges", bundle.graph.edges.size()}};
    j["distributed"] = arm_to_json(r.ours);
    j["baseline"] = arm_to_json(r.baseline);
    j["improvement"] = {{"exec_time", r.factor_exec}, {"tau_photon", r.factor_tau}};
    return j;
}

std::vector<SweepRow> sweep(const ProgramBundle& bundle, const RunConfig& cfg,
                            const std::string& param, const std::vector<double>& values) {
    if (values.empty()) throw UsageError("sweep: needs at least one value");
    if (param != "kmax" && param != "alpha_max")
        throw UsageError("sweep: parameter must be kmax or alpha_max");

    std::vector<SweepRow> rows;
    for (double value : values) {
        SweepRow row;
        row.value = value;
        try {
            RunConfig c = cfg;
            if (param == "kmax") {
                if (value < 1.0 || value != std::floor(value))
                    throw ValidationError("sweep: kmax values must be positive integers");
                c.kmax = static_cast<std::uint32_t>(value);
            } else {
                c.alpha_max = value;
            }
            CompileResult r = compile_bundle(bundle, c);
            row.ok = true;
            row.exec_time = r.ours.lifetime.exec_time;
            row.tau_photon = r.ours.lifetime.tau_photon;
            row.factor_exec = r.factor_exec;
            row.factor_tau = r.factor_tau;
            row.cut = r.ours.partition.cut_edges.size();
            row.modularity = r.ours.partition.modularity;
            row.alpha_used = r.ours.partition.imbalance_used;
        } catch (const std::exception& e) {
            row.ok = false;
            row.error = e.what();
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

namespace {

std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += "\"\"";
        else out += c;
    }
    out += "\"";
    return out;
}

std::string num(double x) { return Json(x).dump(); }

} // namespace

std::string sweep_to_csv(const std::vector<SweepRow>& rows) {
    std::ostringstream os;
    os << "value,exec_time,tau_photon,factor_exec,factor_tau,cut,modularity,alpha_used,status\r\n";
    for (const SweepRow& r : rows) {
        if (r.ok) {
            os << num(r.value) << ',' << r.exec_time << ',' << r.tau_photon << ','
               << num(r.factor_exec) << ',' << num(r.factor_tau) << ',' << r.cut << ','
               << num(r.modularity) << ',' << num(r.alpha_used) << ",ok\r\n";
        } else {
            os << num(r.value) << ",,,,,,,," << csv_escape("error: " + r.error) << "\r\n";
        }
    }
    return os.str();
}

} // namespace dcmbqc
