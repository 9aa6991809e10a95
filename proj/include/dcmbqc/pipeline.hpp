#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dcmbqc/json_io.hpp"
#include "dcmbqc/layout.hpp"
#include "dcmbqc/metrics.hpp"
#include "dcmbqc/model.hpp"
#include "dcmbqc/partition.hpp"
#include "dcmbqc/schedule.hpp"

namespace dcmbqc {

struct RunConfig {
    std::uint32_t qpus = 1;
    std::uint32_t kmax = 4;
    double alpha_max = 1.5;
    double eps_q = 0.01;
    double gamma = 1.02;
    double sa_t0 = 10.0;
    double sa_cooling = 0.95;
    std::uint32_t sa_iters = 20;
    double fill_factor = kDefaultFillFactor;
    std::string ordering = "cuthill_mckee";
    std::uint64_t seed = 0;
    double clock_ns = 1.0;
    bool run_bdir = true;

    void validate() const;
};

Json config_to_json(const RunConfig& cfg);
/// Applies keys present in `j` over `cfg`; keys mirror the field names.
void apply_config_json(RunConfig& cfg, const Json& j);

/// One compiled arm (distributed or the single-QPU baseline).
struct CompileArm {
    PartitionResult partition;
    std::vector<ExecutionPlan> plans;
    LspInstance instance;
    Schedule schedule_list;   ///< list-scheduler output
    Schedule schedule;        ///< after refinement (== schedule_list with --no-bdir)
    LifetimeReport lifetime_list;
    LifetimeReport lifetime;
};

struct CompileResult {
    RunConfig config;
    CompileArm ours;
    CompileArm baseline; ///< same pipeline at qpus = 1
    double factor_exec = 1.0;
    double factor_tau = 1.0;
};

/// Runs partition -> per-QPU layer assembly (concurrent) -> instance ->
/// list scheduling -> refinement -> lifetime, for the requested QPU count
/// and for the single-QPU baseline on the same bundle.
CompileResult compile_bundle(const ProgramBundle& bundle, const RunConfig& cfg);

/// One arm only (used by compile_bundle and the stage-level CLI commands).
CompileArm compile_arm(const ProgramBundle& bundle, const RunConfig& cfg, std::uint32_t qpus);

Json compile_report(const ProgramBundle& bundle, const CompileResult& r);
Json lifetime_to_json(const LifetimeReport& r);

struct SweepRow {
    double value = 0.0;
    bool ok = false;
    std::string error;
    std::int64_t exec_time = 0;
    std::int64_t tau_photon = 0;
    double factor_exec = 0.0;
    double factor_tau = 0.0;
    std::uint64_t cut = 0;
    double modularity = 0.0;
    double alpha_used = 0.0;
};

/// One pipeline run per value with the same seed; failures become rows and
/// the sweep continues.
std::vector<SweepRow> sweep(const ProgramBundle& bundle, const RunConfig& cfg,
                            const std::string& param, const std::vector<double>& values);

/// RFC 4180 CSV with a mandatory header row.
std::string sweep_to_csv(const std::vector<SweepRow>& rows);

} // namespace dcmbqc
