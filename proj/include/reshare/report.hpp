#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "reshare/engine.hpp"
#include "reshare/scenario.hpp"

namespace reshare {

// A full experiment description: scenario plus orchestration knobs. Loaded
// from JSON; command-line flags override individual fields afterwards.
struct ExperimentConfig {
    std::optional<Scenario> scenario;
    Algorithm algorithm = Algorithm::Dloe;
    RunParams run;
    long long horizon = 1000;
    int seeds = 10;
    std::uint64_t master_seed = 1;
    UnitCosts costs;
    std::vector<long long> checkpoints;  // empty: powers of 10 plus the horizon
    std::string out_dir;                 // empty: --out, $RESHARE_OUT, or "."
    bool dump_traces = false;

    void validate() const;  // config-level invariants (a,b,c >= 2, horizon >= N')
};

// base_dir resolves a relative "scenario_file" reference.
ExperimentConfig load_config(const std::string& json_text, const std::string& base_dir);

// Effective output directory: explicit beats config beats $RESHARE_OUT beats ".".
std::string resolve_out_dir(const std::string& cli_out, const ExperimentConfig* config);

// Multi-seed experiment: runs all episodes, writes regret.csv,
// percent_optimal.csv, channel_share_user0.csv, trace_summary.csv and
// report.json into the output directory. Returns a process exit code.
int cmd_run(const ExperimentConfig& config, const std::string& out_dir, std::ostream& log);

// Constants report (means, gap, exploration thresholds, settling bound,
// chain gaps) as a JSON document on `out`.
int cmd_analyze(const Scenario& scenario, std::ostream& out);

// Reads regret.csv from each run directory and emits plotdata.csv with
// regret-over-log-t series (both regret definitions plus the bound overlay).
int cmd_plotdata(const std::vector<std::string>& run_dirs, const std::string& out_dir,
                 std::ostream& log);

// 17-significant-digit decimal form used by every emitted file.
std::string format_double(double v);

// "--L 152" / "--L log" / "--L pow" and the config "L" field share this.
LSchedule schedule_from_text(const std::string& text);

}  // namespace reshare
