#pragma once

#include <optional>
#include <string>
#include <vector>

#include "reshare/allocation.hpp"
#include "reshare/reward_models.hpp"

namespace reshare {

// One shared resource: a finite-state process. States are 0-based ids; the
// reward attached to a state lives in the owning Scenario.
struct ResourceProcess {
    enum class Kind { Iid, Markov };
    Kind kind = Kind::Iid;
    std::vector<double> state_probs;      // Iid: P(state = s)
    std::optional<MarkovResource> chain;  // Markov

    int states() const;
};

// A complete experiment instance: M users, K finite-state resources, and the
// reward r_k(s,n) (or r^i_k(s,n)) each user receives when n users share
// resource k in state s. Everything downstream (exact means, gaps, bounds,
// episodes) derives from this one object.
class Scenario {
public:
    Scenario(std::string name, int users, int resources, bool user_specific);

    void add_iid_resource(std::vector<double> state_probs);
    void add_markov_resource(MarkovResource chain);
    void set_reward(int k, int s, int n, double value);         // symmetric
    void set_reward(int i, int k, int s, int n, double value);  // user-specific

    // all processes attached, reward tables complete, values in [0,1],
    // every (user, resource, congestion) mean positive
    void validate() const;

    const std::string& name() const { return name_; }
    int users() const { return users_; }
    int resources() const { return resources_; }
    bool user_specific() const { return user_specific_; }
    bool has_markov() const;
    const ResourceProcess& process(int k) const;
    double reward(int i, int k, int s, int n) const;  // i ignored when symmetric

    MeanRewardTable exact_means() const;
    GapReport gap() const;
    double v_star() const;

    // Constants for the Markov exploration threshold and regret bound.
    // transient falls back to estimate_transient() when not configured.
    MarkovBoundParams markov_bounds() const;
    std::optional<double> configured_transient() const { return transient_; }
    void set_transient_constant(double c_p);
    double estimate_transient(int horizon = 10000) const;

private:
    void check_resource(int k) const;
    std::size_t reward_index(int i, int k, int s, int n) const;

    std::string name_;
    int users_;
    int resources_;
    bool user_specific_;
    std::vector<ResourceProcess> processes_;
    std::vector<int> state_counts_;
    // ragged (per-resource state count), indexed [i][k][s][n]
    std::vector<std::vector<double>> rewards_;  // rewards_[k][(i*S_k + s)*M + (n-1)]
    std::optional<double> transient_;
};

// The interference-limited spectrum scenario: per-channel idle probability
// theta_k, reward = idle ? rate(k,n)/rate_ceiling : 0.
Scenario make_osa_scenario(const OsaParams& params, int users, std::string name = "osa");

// JSON round trip (format documented in the README).
Scenario load_scenario(const std::string& json_text);
std::string scenario_json(const Scenario& s);

}  // namespace reshare
