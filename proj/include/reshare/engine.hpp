#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "reshare/allocation.hpp"
#include "reshare/dloe.hpp"
#include "reshare/scenario.hpp"

namespace reshare {

enum class Algorithm { Dloe, Dlc, Oracle, Random };

Algorithm algorithm_from_name(const std::string& name);
std::string algorithm_name(Algorithm a);

struct UnitCosts {
    double cmp = 0;   // one allocation computation
    double swc = 0;   // one resource switch
    double com = 0;   // one estimate exchange, per user
    double init = 0;  // one-time setup exchange
};

struct CostEvent {
    long long t = 0;
    int user = -1;  // -1 for system-wide events
    enum class Kind { Computation, Switch, Communication, InitialSetup } kind;
};

// Timestamped event log; unit costs are applied at query time so one run can
// be re-priced without re-simulating.
class CostLedger {
public:
    explicit CostLedger(int users);

    void record(long long t, int user, CostEvent::Kind kind);
    long long count(CostEvent::Kind kind, long long up_to) const;
    long long count_user(CostEvent::Kind kind, int user, long long up_to) const;
    double cost(const UnitCosts& costs, long long up_to) const;
    const std::vector<CostEvent>& events() const { return events_; }
    int users() const { return users_; }

private:
    int users_;
    std::vector<CostEvent> events_;  // in nondecreasing t order
};

struct TraceStep {
    std::vector<int> actions;     // per user, 0-based resource
    std::vector<int> states;      // per resource state id
    std::vector<double> rewards;  // per user realized reward
    std::vector<int> congestion;  // per resource user count
    char phase = '-';             // 'O' explore, 'I' exploit, '-' unphased policy
};

struct Trace {
    int users = 0;
    int resources = 0;
    std::uint64_t seed = 0;  // derived episode seed recorded for replay
    std::vector<TraceStep> steps;

    long long horizon() const { return static_cast<long long>(steps.size()); }
};

// columnar round-trip-safe text form, one row per step
std::string trace_to_csv(const Trace& trace);
Trace trace_from_csv(const std::string& text);

struct RunParams {
    BlockParams block;
    bool update_during_exploit = true;  // DLOE estimate ablation switch
};

struct EpisodeResult {
    Trace trace;
    CostLedger ledger;
    long long plan_length = 0;
    std::uint64_t seed = 0;

    EpisodeResult(int users) : ledger(users) {}
};

// One lockstep episode: state advance, joint actions, congestion feedback,
// ledger events. Fully reproducible from (master_seed, episode_index).
EpisodeResult run_episode(const Scenario& scenario, Algorithm algorithm, long long horizon,
                          std::uint64_t master_seed, int episode_index, const RunParams& params);

// --- metrics -----------------------------------------------------------------

struct Curve {
    std::vector<long long> t;
    std::vector<double> value;
};

// powers of 10 up to the horizon, plus the horizon itself
std::vector<long long> default_checkpoints(long long horizon);

Curve regret_basic(const Trace& trace, double v_star, const std::vector<long long>& checkpoints);
Curve regret_with_costs(const Trace& trace, const CostLedger& ledger, const UnitCosts& costs,
                        double v_star, const std::vector<long long>& checkpoints);
Curve percent_optimal(const Trace& trace, const AllocationCount& n_star,
                      const std::vector<long long>& checkpoints);

// per-resource selection percentages for one user; rows sum to 100
struct ShareTable {
    std::vector<long long> t;
    std::vector<std::vector<double>> share;  // [resource][checkpoint]
};
ShareTable channel_share(const Trace& trace, int user, const std::vector<long long>& checkpoints);

// --- closed-form regret bound -------------------------------------------------

struct BoundInputs {
    int users = 0;
    int resources = 0;
    long long plan_length = 0;  // N'
    BlockParams block;          // a, b and the exploration requirement L
    double o_b = 1;             // worst-case settling factor (exploitation randomization)
    UnitCosts costs;
    bool dlc = false;
    bool markov = false;
    MarkovBoundParams markov_params;
};

double theoretical_bound(long long t, const BoundInputs& inputs);

// inputs assembled from a scenario (O_B from the optimum, Markov constants
// from the chains); plan_length must come from the plan actually used
BoundInputs bound_inputs_for(const Scenario& scenario, Algorithm algorithm,
                             const RunParams& params, const UnitCosts& costs,
                             long long plan_length);

// --- multi-seed aggregation ----------------------------------------------------

struct EpisodeSummary {
    std::uint64_t seed = 0;
    double regret = 0;             // basic definition, at the last checkpoint
    double regret_with_costs = 0;  // cost-augmented definition, at the last checkpoint
    long long cmp = 0, swc = 0, com = 0;
};

struct AggregateResult {
    std::vector<long long> checkpoints;
    std::vector<double> regret_mean, regret_se;
    std::vector<double> regret_cost_mean, regret_cost_se;
    std::vector<double> pct_optimal_mean, pct_optimal_se;
    std::vector<std::vector<double>> share_user0;  // [resource][checkpoint], mean
    std::vector<double> bound;                     // overlay at checkpoints
    std::vector<std::uint64_t> seeds;              // derived per-episode seeds
    std::vector<EpisodeSummary> episodes;
    double mean_cmp = 0, mean_swc = 0, mean_com = 0;  // events per episode, all users
    long long plan_length = 0;
};

// Runs `seeds` independent episodes (parallel, deterministic aggregation) and
// reduces the per-episode metrics to means and standard errors.
AggregateResult run_many(const Scenario& scenario, Algorithm algorithm, long long horizon,
                         int seeds, std::uint64_t master_seed, const RunParams& params,
                         const UnitCosts& costs, const std::vector<long long>& checkpoints);

}  // namespace reshare
