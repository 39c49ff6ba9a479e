#include "reshare/dlc.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace reshare {

int leader_for(long long exploit_index, int users) {
    if (users < 1) throw std::invalid_argument("leader_for: users < 1");
    if (exploit_index < 0) throw std::invalid_argument("leader_for: negative block index");
    return static_cast<int>(exploit_index % users);
}

void CommChannel::post(Message m) { queue_.push_back(std::move(m)); }

std::vector<CommChannel::Message> CommChannel::take(const std::string& kind, long long block) {
    std::vector<Message> out;
    std::vector<Message> rest;
    for (auto& m : queue_) {
        if (m.kind == kind && m.block == block)
            out.push_back(std::move(m));
        else
            rest.push_back(std::move(m));
    }
    queue_ = std::move(rest);
    // delivery is ordered within a boundary: stable by sender id
    std::stable_sort(out.begin(), out.end(),
                     [](const Message& a, const Message& b) { return a.from < b.from; });
    delivered_ += static_cast<long long>(out.size());
    return out;
}

DlcAgent::DlcAgent(int id, int users, std::shared_ptr<const ExplorationPlan> plan,
                   BlockParams params)
    : id_(id),
      users_(users),
      plan_(std::move(plan)),
      scheduler_(plan_ ? static_cast<int>(plan_->length()) : 0, params),
      bank_(plan_ ? plan_->resources : 1, users) {
    if (!plan_) throw std::invalid_argument("DlcAgent: null plan");
    if (id < 0 || id >= users) throw std::invalid_argument("DlcAgent: id out of range");
    if (plan_->users != users) throw std::invalid_argument("DlcAgent: plan is for a different M");
}

Phase DlcAgent::decide_phase(long long t) {
    Phase p = scheduler_.decide(t);
    if (p == Phase::Exploit) {
        // stale exchange state from the previous boundary must not leak in
        inbox_.clear();
        merged_.reset();
        assigned_ = -1;
        events_.push_back({t, AgentEvent::Kind::ExploitBlock, scheduler_.exploitation_blocks()});
    } else {
        events_.push_back({t, AgentEvent::Kind::ExploreBlock, scheduler_.exploration_blocks()});
    }
    return p;
}

std::string DlcAgent::export_estimates(long long t) {
    ++communications_;
    (void)t;
    return bank_.snapshot().serialize();
}

void DlcAgent::import_estimates(int from, const std::string& payload) {
    if (from < 0 || from >= users_) throw std::invalid_argument("import_estimates: bad sender");
    inbox_[from] = payload;
}

std::string DlcAgent::merged_fingerprint() {
    if (!merged_) {
        if (static_cast<int>(inbox_.size()) != users_)
            throw std::logic_error("DlcAgent: exchange incomplete, cannot merge");
        MeanRewardTable merged =
            MeanRewardTable::per_user(users_, bank_.resources(), bank_.max_users());
        for (const auto& [from, payload] : inbox_) {
            MeanRewardTable own = MeanRewardTable::deserialize(payload);
            if (own.user_specific() || own.resources() != bank_.resources() ||
                own.max_users() != bank_.max_users())
                throw std::invalid_argument("DlcAgent: malformed estimate payload");
            for (int k = 0; k < own.resources(); ++k)
                for (int n = 1; n <= own.max_users(); ++n) merged.set(from, k, n, own.at(k, n));
        }
        merged_ = std::move(merged);
    }
    return merged_->serialize();
}

Assignment DlcAgent::compute_assignment() {
    merged_fingerprint();  // ensure merged_ exists
    GapReport report = optimal_assignment(*merged_);
    ++computations_;
    events_.push_back({0, AgentEvent::Kind::Computation, scheduler_.exploitation_blocks()});
    if (report.best_assignments.empty()) throw std::logic_error("compute_assignment: no optimum");
    return report.best_assignments.front();
}

void DlcAgent::receive_assignment(int resource) {
    if (resource < 0 || resource >= bank_.resources())
        throw std::invalid_argument("receive_assignment: resource out of range");
    assigned_ = resource;
}

int DlcAgent::act(long long t) {
    (void)t;
    if (acted_) throw std::logic_error("DlcAgent::act called twice in a slot");
    if (at_boundary()) throw std::logic_error("DlcAgent::act before decide_phase");
    int choice;
    if (scheduler_.phase() == Phase::Explore) {
        choice = plan_->sequence[id_][static_cast<std::size_t>(scheduler_.sequence_pos())];
    } else {
        if (assigned_ < 0) throw std::logic_error("DlcAgent::act: no assignment received");
        choice = assigned_;
    }
    acted_ = true;
    return choice;
}

void DlcAgent::observe(double reward) {
    if (!acted_) throw std::logic_error("DlcAgent::observe without act");
    if (scheduler_.phase() == Phase::Explore) {
        std::size_t z = static_cast<std::size_t>(scheduler_.sequence_pos());
        int k = plan_->sequence[id_][z];
        int n = plan_->congestion[id_][z];
        bank_.observe(k, n, reward);
    }
    acted_ = false;
    scheduler_.advance();
}

std::string DlcAgent::serialize_state() const {
    std::ostringstream out;
    out << scheduler_.serialize() << '\n' << bank_.serialize() << '\n';
    out << assigned_ << ' ' << acted_ << ' ' << computations_ << ' ' << communications_;
    return out.str();
}

void DlcAgent::restore_state(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw std::invalid_argument("DlcAgent: bad state");
    scheduler_.restore(line);
    if (!std::getline(in, line)) throw std::invalid_argument("DlcAgent: bad state");
    bank_.restore(line);
    int acted = 0;
    if (!(in >> assigned_ >> acted >> computations_ >> communications_))
        throw std::invalid_argument("DlcAgent: bad state");
    acted_ = acted != 0;
    inbox_.clear();
    merged_.reset();
}

Assignment exchange_and_assign(std::vector<DlcAgent>& agents, CommChannel& channel, long long t) {
    if (agents.empty()) throw std::invalid_argument("exchange_and_assign: no agents");
    int users = static_cast<int>(agents.size());
    long long block = agents.front().scheduler().exploitation_blocks();
    for (const auto& a : agents)
        if (a.scheduler().exploitation_blocks() != block || a.scheduler().phase() != Phase::Exploit ||
            a.scheduler().slot_in_block() != 0)
            throw std::logic_error("exchange_and_assign: agents desynchronized at the boundary");
    long long index = block - 1;  // 0-based index of the block just decided

    for (auto& a : agents)
        channel.post({a.id(), t, index, "estimates/1", a.export_estimates(t)});
    std::vector<CommChannel::Message> msgs = channel.take("estimates/1", index);
    if (static_cast<int>(msgs.size()) != users)
        throw std::logic_error("exchange_and_assign: missing estimate messages");
    for (auto& a : agents)
        for (const auto& m : msgs) a.import_estimates(m.from, m.payload);

    std::string fingerprint = agents.front().merged_fingerprint();
    for (auto& a : agents)
        if (a.merged_fingerprint() != fingerprint)
            throw std::logic_error("exchange_and_assign: merged tables disagree");

    int leader = leader_for(index, users);
    Assignment assignment = agents[static_cast<std::size_t>(leader)].compute_assignment();
    if (static_cast<int>(assignment.size()) != users)
        throw std::logic_error("exchange_and_assign: assignment size mismatch");
    for (auto& a : agents) {
        channel.post({leader, t, index, "assignment/1",
                      std::to_string(assignment[static_cast<std::size_t>(a.id())])});
    }
    std::vector<CommChannel::Message> replies = channel.take("assignment/1", index);
    if (static_cast<int>(replies.size()) != users)
        throw std::logic_error("exchange_and_assign: missing assignment messages");
    for (int i = 0; i < users; ++i)
        agents[static_cast<std::size_t>(i)].receive_assignment(
            assignment[static_cast<std::size_t>(i)]);
    return assignment;
}

}  // namespace reshare
