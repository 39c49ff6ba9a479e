#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "reshare/allocation.hpp"
#include "reshare/exploration.hpp"
#include "reshare/rng.hpp"

namespace reshare {

enum class Phase { Explore, Exploit };

// Exploration requirement L(t). Constant reproduces the known-gap setting;
// the growing schedules cover the unknown-gap variant.
struct LSchedule {
    enum class Kind { Constant, LogGrowth, PowGrowth };
    Kind kind = Kind::Constant;
    double value = 1;

    double at(long long t) const;

    static LSchedule constant(double L) { return {Kind::Constant, L}; }
    static LSchedule log_growth() { return {Kind::LogGrowth, 0}; }
    static LSchedule pow_growth() { return {Kind::PowGrowth, 0}; }
};

struct BlockParams {
    int a = 2;  // first exploitation block length
    int b = 4;  // exploitation growth
    int c = 4;  // exploration dwell growth
    LSchedule L = LSchedule::constant(1);

    void validate() const;
};

// Deterministic block state machine shared by both algorithms. Exploration
// block l holds each of the N' plan entries for c^(l-1) slots; exploitation
// block l runs a*b^(l-1) slots. A block type is decided only at boundaries:
// exploit when the per-entry exploration budget X_O already covers L(t) ln t.
class BlockScheduler {
public:
    BlockScheduler(int plan_length, BlockParams params);

    bool at_boundary() const { return eta_ == block_len_; }
    Phase decide(long long t);  // throws if called mid-block
    void advance();             // completes the current slot

    Phase phase() const;
    long long block_length() const { return block_len_; }
    long long slot_in_block() const { return eta_; }
    long long dwell() const { return dwell_; }
    int sequence_pos() const;  // exploration only: plan slot index
    long long explored_budget() const { return x_o_; }
    long long exploration_blocks() const { return l_o_; }
    long long exploitation_blocks() const { return l_i_; }
    long long exploration_slots() const { return t_o_; }

    std::string serialize() const;
    void restore(const std::string&);

private:
    BlockParams params_;
    int plan_length_;
    Phase phase_ = Phase::Explore;
    bool started_ = false;
    long long block_len_ = 0;  // eta_ == block_len_ means "awaiting decide"
    long long eta_ = 0;
    long long dwell_ = 1;
    long long l_o_ = 0;
    long long l_i_ = 0;
    long long x_o_ = 0;  // sum of dwells over completed exploration blocks
    long long t_o_ = 0;  // exploration slots completed
};

// Per-(resource, congestion) sample means, running-average recurrence.
class EstimatorBank {
public:
    EstimatorBank(int resources, int max_users);

    void observe(int k, int n, double reward);  // reward in [0,1]
    long long count(int k, int n) const;
    double mean(int k, int n) const;
    int resources() const { return resources_; }
    int max_users() const { return max_users_; }

    // every reachable (k,n) pair observed at least once
    bool covered() const;
    MeanRewardTable snapshot() const;

    std::string serialize() const;
    void restore(const std::string&);

private:
    std::size_t index(int k, int n) const;
    int resources_;
    int max_users_;
    std::vector<long long> counts_;
    std::vector<double> means_;
};

// Exploitation randomization: pick a used resource with probability
// n_hat_k / M; keep the current one unless it is over-congested.
int settle_draw(const AllocationCount& n_hat, int users, Rng& rng);
int settle_react(const AllocationCount& n_hat, int users, int current, int observed_congestion,
                 Rng& rng);

struct AgentEvent {
    long long t;
    enum class Kind { ExploreBlock, ExploitBlock, Computation } kind;
    long long detail;  // block index
};

// Decentralized learner: deterministic block schedule, plan-driven
// exploration, randomized settling toward its own estimated optimum.
class DloeAgent {
public:
    DloeAgent(int id, int users, std::shared_ptr<const ExplorationPlan> plan, BlockParams params,
              std::uint64_t seed, bool update_during_exploit = true);

    int id() const { return id_; }
    bool at_boundary() const { return scheduler_.at_boundary(); }

    // decide the next block type; at exploitation starts this refreshes the
    // target (one computation event) and draws the initial resource
    Phase decide_phase(long long t);

    int act(long long t);
    void observe(double reward, int observed_congestion);

    // argmax of the allocation value under current estimates; requires every
    // reachable pair to have been observed
    AllocationCount refresh_target();

    const EstimatorBank& bank() const { return bank_; }
    const BlockScheduler& scheduler() const { return scheduler_; }
    const AllocationCount& target() const;
    long long computations() const { return computations_; }
    const std::vector<AgentEvent>& events() const { return events_; }

    std::string serialize_state() const;
    void restore_state(const std::string&);

private:
    int id_;
    int users_;
    std::shared_ptr<const ExplorationPlan> plan_;
    BlockParams params_;
    bool update_during_exploit_;
    BlockScheduler scheduler_;
    EstimatorBank bank_;
    Rng rng_;
    AllocationCount target_;
    bool target_set_ = false;
    int current_ = -1;
    int last_congestion_ = 0;
    bool acted_ = false;  // act/observe must alternate
    long long computations_ = 0;
    std::vector<AgentEvent> events_;
};

}  // namespace reshare
