#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "dcmbqc/frontend.hpp"
#include "dcmbqc/json_io.hpp"
#include "dcmbqc/metrics.hpp"
#include "dcmbqc/pipeline.hpp"

using namespace dcmbqc;

namespace {

struct GlobalOpts {
    std::string config_path;
    std::string out;
    std::string format = "json";
    std::uint64_t seed = 0;
    CLI::Option* seed_opt = nullptr;
};

void emit(const GlobalOpts& g, const std::string& text, const std::string& default_name) {
    if (g.out.empty()) {
        std::cout << text;
        return;
    }
    std::filesystem::path p(g.out);
    if (std::filesystem::is_directory(p) || g.out.back() == '/') p /= default_name;
    write_text_file(p.string(), text);
}

/// Run options parsed from flags. Precedence: defaults < --config file <
/// explicitly passed flags.
struct RunFlags {
    RunConfig flags; // flag targets; starts at the defaults
    CLI::Option *qpus = nullptr, *kmax = nullptr, *alpha_max = nullptr, *eps_q = nullptr,
                *gamma = nullptr, *sa_t0 = nullptr, *sa_cooling = nullptr, *sa_iters = nullptr,
                *fill = nullptr, *ordering = nullptr, *clock = nullptr, *no_bdir = nullptr;

    void attach(CLI::App* cmd) {
        qpus = cmd->add_option("--qpus", flags.qpus, "QPU count");
        kmax = cmd->add_option("--kmax", flags.kmax, "per-slot connection capacity");
        alpha_max = cmd->add_option("--alpha-max", flags.alpha_max, "maximum imbalance factor");
        eps_q = cmd->add_option("--eps-q", flags.eps_q, "modularity improvement threshold");
        gamma = cmd->add_option("--gamma", flags.gamma, "imbalance step factor");
        sa_t0 = cmd->add_option("--sa-t0", flags.sa_t0, "annealing initial temperature");
        sa_cooling = cmd->add_option("--sa-cooling", flags.sa_cooling, "annealing cooling rate");
        sa_iters = cmd->add_option("--sa-iters", flags.sa_iters, "annealing iterations");
        fill = cmd->add_option("--fill-factor", flags.fill_factor,
                               "usable fraction of a grid layer");
        ordering =
            cmd->add_option("--ordering", flags.ordering, "layer ordering: bfs or cuthill_mckee");
        clock = cmd->add_option("--clock-ns", flags.clock_ns, "resource state clock period in ns");
        no_bdir = cmd->add_flag("--no-bdir", "skip the refinement pass");
    }

    RunConfig resolve(const GlobalOpts& g) const {
        RunConfig cfg;
        if (!g.config_path.empty())
            apply_config_json(cfg, parse_json(read_text_file(g.config_path), "config"));
        if (g.seed_opt && g.seed_opt->count()) cfg.seed = g.seed;
        if (qpus->count()) cfg.qpus = flags.qpus;
        if (kmax->count()) cfg.kmax = flags.kmax;
        if (alpha_max->count()) cfg.alpha_max = flags.alpha_max;
        if (eps_q->count()) cfg.eps_q = flags.eps_q;
        if (gamma->count()) cfg.gamma = flags.gamma;
        if (sa_t0->count()) cfg.sa_t0 = flags.sa_t0;
        if (sa_cooling->count()) cfg.sa_cooling = flags.sa_cooling;
        if (sa_iters->count()) cfg.sa_iters = flags.sa_iters;
        if (fill->count()) cfg.fill_factor = flags.fill_factor;
        if (ordering->count()) cfg.ordering = flags.ordering;
        if (clock->count()) cfg.clock_ns = flags.clock_ns;
        if (no_bdir->count()) cfg.run_bdir = false;
        cfg.validate();
        return cfg;
    }
};

std::vector<double> parse_values(const std::string& csv) {
    std::vector<double> out;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        try {
            out.push_back(std::stod(item));
        } catch (const std::exception&) {
            throw UsageError("bad numeric value in list: " + item);
        }
    }
    if (out.empty()) throw UsageError("expected a comma-separated list of values");
    return out;
}

std::vector<ExecutionPlan> assemble_all(const ProgramBundle& b, const PartitionResult& p,
                                        const RunConfig& cfg) {
    GridSpec grid = default_grid(b.meta.qubits, cfg.fill_factor);
    auto parts = split_parts(b.graph, p.assignment, p.k);
    std::vector<ExecutionPlan> plans(p.k);
    for (std::uint32_t q = 0; q < p.k; ++q)
        plans[q] = assemble_layers(parts[q], grid, parse_ordering(cfg.ordering), cfg.seed, q,
                                   b.graph.num_nodes);
    return plans;
}

int run(int argc, char** argv) {
    CLI::App app{"distributed graph-state program compiler"};
    app.require_subcommand(1);
    app.fallthrough();

    GlobalOpts g;
    app.add_option("--config", g.config_path, "JSON config file; keys mirror the run options");
    app.add_option("--out", g.out, "output file or directory (default stdout)");
    app.add_option("--format", g.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
    g.seed_opt = app.add_option("--seed", g.seed, "random seed");

    // gen
    auto* gen = app.add_subcommand("gen", "generate a benchmark circuit");
    std::string family;
    std::uint32_t qubits = 16;
    gen->add_option("--family", family, "qft, qaoa, vqe or rca")->required();
    gen->add_option("--qubits", qubits, "program size")->required();
    gen->callback([&] {
        Circuit c = gen_benchmark(parse_family(family), qubits, g.seed);
        emit(g, circuit_to_json(c).dump(1) + "\n", "circuit.json");
    });

    // translate
    auto* tr = app.add_subcommand("translate", "translate a circuit into a program bundle");
    std::string circuit_path, bundle_name;
    tr->add_option("--circuit", circuit_path, "circuit JSON file")->required();
    tr->add_option("--name", bundle_name, "bundle name (default: circuit file stem)");
    tr->callback([&] {
        Circuit c = load_circuit(circuit_path);
        std::string name = bundle_name.empty()
                               ? std::filesystem::path(circuit_path).stem().string()
                               : bundle_name;
        ProgramBundle b = translate(c, name, g.seed, "translate");
        emit(g, bundle_to_json(b).dump(1) + "\n", "bundle.json");
    });

    // partition
    auto* part_cmd = app.add_subcommand("partition", "adaptive graph partitioning");
    std::string part_bundle_path;
    RunFlags part_flags;
    part_cmd->add_option("--bundle", part_bundle_path, "bundle JSON file")->required();
    part_flags.attach(part_cmd);
    part_cmd->callback([&] {
        RunConfig cfg = part_flags.resolve(g);
        ProgramBundle b = load_bundle(part_bundle_path);
        PartitionConfig pc{cfg.qpus, cfg.eps_q, cfg.gamma, cfg.alpha_max, cfg.seed};
        PartitionResult p = adaptive_partition(b.graph, pc);
        emit(g, partition_to_json(p).dump(1) + "\n", "partition.json");
    });

    // compile
    auto* compile_cmd = app.add_subcommand("compile", "full pipeline with single-QPU baseline");
    std::string compile_bundle_path;
    RunFlags compile_flags;
    compile_cmd->add_option("--bundle", compile_bundle_path, "bundle JSON file")->required();
    compile_flags.attach(compile_cmd);
    compile_cmd->callback([&] {
        RunConfig cfg = compile_flags.resolve(g);
        ProgramBundle b = load_bundle(compile_bundle_path);
        CompileResult r = compile_bundle(b, cfg);
        emit(g, compile_report(b, r).dump(1) + "\n", "report.json");
    });

    // schedule
    auto* sched_cmd = app.add_subcommand("schedule", "layer scheduling for a partitioned bundle");
    std::string sched_bundle_path, sched_part_path;
    RunFlags sched_flags;
    sched_cmd->add_option("--bundle", sched_bundle_path, "bundle JSON file")->required();
    sched_cmd->add_option("--partition", sched_part_path, "partition JSON file")->required();
    sched_flags.attach(sched_cmd);
    sched_cmd->callback([&] {
        RunConfig cfg = sched_flags.resolve(g);
        ProgramBundle b = load_bundle(sched_bundle_path);
        PartitionResult p =
            partition_from_json(parse_json(read_text_file(sched_part_path), "partition"), b.graph);
        auto plans = assemble_all(b, p, cfg);
        LspInstance inst = build_instance(plans, p, b.deps, cfg.kmax);
        Schedule s = list_schedule(inst);
        if (cfg.run_bdir) s = bdir(inst, s, {cfg.sa_t0, cfg.sa_cooling, cfg.sa_iters, cfg.seed});
        LifetimeReport rep = lifetime_distributed(inst, s, inst.deps, cfg.clock_ns);
        Json out = schedule_to_json(inst, s);
        out["cost"] = lifetime_to_json(rep);
        emit(g, out.dump(1) + "\n", "schedule.json");
    });

    // report
    auto* rep_cmd = app.add_subcommand("report", "recompute the lifetime report for artifacts");
    std::string rep_bundle, rep_part, rep_sched;
    RunFlags rep_flags;
    rep_cmd->add_option("--bundle", rep_bundle, "bundle JSON file")->required();
    rep_cmd->add_option("--partition", rep_part, "partition JSON file")->required();
    rep_cmd->add_option("--schedule", rep_sched, "schedule JSON file")->required();
    rep_flags.attach(rep_cmd);
    rep_cmd->callback([&] {
        RunConfig cfg = rep_flags.resolve(g);
        ProgramBundle b = load_bundle(rep_bundle);
        PartitionResult p =
            partition_from_json(parse_json(read_text_file(rep_part), "partition"), b.graph);
        Json sj = parse_json(read_text_file(rep_sched), "schedule");
        cfg.kmax = sj.at("kmax").get<std::uint32_t>();
        auto plans = assemble_all(b, p, cfg);
        LspInstance inst = build_instance(plans, p, b.deps, cfg.kmax);
        Schedule s;
        s.main_start.assign(inst.num_mains(), 0);
        s.sync_start.assign(inst.num_syncs(), 0);
        for (const Json& m : sj.at("main")) {
            std::uint32_t q = m.at("qpu").get<std::uint32_t>();
            std::uint32_t index = m.at("index").get<std::uint32_t>();
            if (q >= inst.num_qpus || index < 1 ||
                inst.qpu_offset[q] + index - 1 >= inst.qpu_offset[q + 1])
                throw ValidationError("schedule: main task reference out of range");
            s.main_start[inst.qpu_offset[q] + index - 1] = m.at("t").get<std::uint32_t>();
        }
        for (const Json& k : sj.at("sync")) {
            std::uint32_t id = k.at("id").get<std::uint32_t>();
            if (id >= inst.num_syncs())
                throw ValidationError("schedule: sync task id out of range");
            s.sync_start[id] = k.at("t").get<std::uint32_t>();
        }
        LifetimeReport r = lifetime_distributed(inst, s, inst.deps, cfg.clock_ns);
        if (g.format == "csv") {
            std::ostringstream os;
            os << "tau_fusee,tau_measuree,tau_local,tau_remote,tau_photon,exec_time,clock_ns,"
                  "loss_probability\r\n"
               << r.tau_fusee << ',' << r.tau_measuree << ',' << r.tau_local << ',' << r.tau_remote
               << ',' << r.tau_photon << ',' << r.exec_time << ',' << Json(r.clock_ns).dump()
               << ',' << Json(r.loss_probability).dump() << "\r\n";
            emit(g, os.str(), "report.csv");
        } else {
            emit(g, lifetime_to_json(r).dump(1) + "\n", "report.json");
        }
    });

    // sweep
    auto* sweep_cmd = app.add_subcommand("sweep", "parameter sweep producing a CSV table");
    std::string sweep_bundle_path, sweep_param, sweep_values;
    RunFlags sweep_flags;
    sweep_cmd->add_option("--bundle", sweep_bundle_path, "bundle JSON file")->required();
    sweep_cmd->add_option("--param", sweep_param, "kmax or alpha_max")->required();
    sweep_cmd->add_option("--values", sweep_values, "comma-separated values")->required();
    sweep_flags.attach(sweep_cmd);
    sweep_cmd->callback([&] {
        RunConfig cfg = sweep_flags.resolve(g);
        ProgramBundle b = load_bundle(sweep_bundle_path);
        auto rows = sweep(b, cfg, sweep_param, parse_values(sweep_values));
        emit(g, sweep_to_csv(rows), "sweep.csv");
    });

    // loss
    auto* loss_cmd = app.add_subcommand("loss", "photon loss probability for a storage duration");
    std::int64_t cycles = 0;
    double clock_ns = 1.0;
    loss_cmd->add_option("--cycles", cycles, "storage duration in clock cycles")->required();
    loss_cmd->add_option("--clock-ns", clock_ns, "clock period in ns")->required();
    loss_cmd->callback([&] {
        emit(g, Json(loss_probability(cycles, clock_ns)).dump() + "\n", "loss.txt");
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const InternalError& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 3;
    }
}
