#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "reshare/allocation.hpp"
#include "reshare/dloe.hpp"
#include "reshare/exploration.hpp"

namespace reshare {

// 0-based id of the user who computes the joint assignment for the
// exploitation block with 0-based index l.
int leader_for(long long exploit_index, int users);

// In-simulation mailbox. Payloads are exact-decimal serializations so every
// receiver reconstructs bit-identical tables.
class CommChannel {
public:
    struct Message {
        int from = -1;
        long long t = 0;
        long long block = 0;
        std::string kind;
        std::string payload;
    };

    void post(Message m);
    std::vector<Message> take(const std::string& kind, long long block);
    long long delivered() const { return delivered_; }

private:
    std::vector<Message> queue_;
    long long delivered_ = 0;
};

// Communicating learner: same block schedule as DloeAgent, but per-user
// estimates, a leader-computed joint assignment at each exploitation start,
// and no feedback needed during exploitation.
class DlcAgent {
public:
    DlcAgent(int id, int users, std::shared_ptr<const ExplorationPlan> plan, BlockParams params);

    int id() const { return id_; }
    bool at_boundary() const { return scheduler_.at_boundary(); }
    Phase decide_phase(long long t);

    // exploitation-boundary exchange (driven by exchange_and_assign)
    std::string export_estimates(long long t);  // one communication event
    void import_estimates(int from, const std::string& payload);
    std::string merged_fingerprint();  // serialized merged table, built from the inbox
    Assignment compute_assignment();   // leader only: one computation event
    void receive_assignment(int resource);

    int act(long long t);
    void observe(double reward);  // congestion in exploration comes from the plan

    const EstimatorBank& bank() const { return bank_; }
    const BlockScheduler& scheduler() const { return scheduler_; }
    int assigned() const { return assigned_; }
    long long computations() const { return computations_; }
    long long communications() const { return communications_; }
    const std::vector<AgentEvent>& events() const { return events_; }

    std::string serialize_state() const;
    void restore_state(const std::string&);

private:
    int id_;
    int users_;
    std::shared_ptr<const ExplorationPlan> plan_;
    BlockScheduler scheduler_;
    EstimatorBank bank_;
    std::map<int, std::string> inbox_;  // user -> serialized estimates, this boundary
    std::optional<MeanRewardTable> merged_;
    int assigned_ = -1;
    bool acted_ = false;
    long long computations_ = 0;
    long long communications_ = 0;
    std::vector<AgentEvent> events_;
};

// Runs the full boundary exchange: every agent broadcasts its estimates, the
// rotating leader computes the joint assignment on the merged table and
// distributes it. Verifies that all merged tables agree byte-for-byte.
Assignment exchange_and_assign(std::vector<DlcAgent>& agents, CommChannel& channel, long long t);

}  // namespace reshare
