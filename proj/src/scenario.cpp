#include "reshare/scenario.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace reshare {

using nlohmann::json;

int ResourceProcess::states() const {
    if (kind == Kind::Iid) return static_cast<int>(state_probs.size());
    if (!chain) throw std::logic_error("ResourceProcess: Markov process without a chain");
    return chain->num_states();
}

Scenario::Scenario(std::string name, int users, int resources, bool user_specific)
    : name_(std::move(name)), users_(users), resources_(resources), user_specific_(user_specific) {
    if (users < 1 || resources < 1)
        throw std::invalid_argument("Scenario: need at least one user and one resource");
    state_counts_.assign(static_cast<std::size_t>(resources), 0);
    rewards_.resize(static_cast<std::size_t>(resources));
}

void Scenario::add_iid_resource(std::vector<double> state_probs) {
    std::size_t k = processes_.size();
    if (static_cast<int>(k) >= resources_) throw std::logic_error("Scenario: all resources attached");
    if (state_probs.empty()) throw std::invalid_argument("Scenario: empty state distribution");
    double sum = 0;
    for (double p : state_probs) {
        if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("Scenario: bad state probability");
        sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-9)
        throw std::invalid_argument("Scenario: state probabilities must sum to 1");
    ResourceProcess proc;
    proc.kind = ResourceProcess::Kind::Iid;
    proc.state_probs = std::move(state_probs);
    int s = proc.states();
    processes_.push_back(std::move(proc));
    state_counts_[k] = s;
    int rows = user_specific_ ? users_ : 1;
    rewards_[k].assign(static_cast<std::size_t>(rows) * static_cast<std::size_t>(s) *
                           static_cast<std::size_t>(users_),
                       -1.0);
}

void Scenario::add_markov_resource(MarkovResource chain) {
    std::size_t k = processes_.size();
    if (static_cast<int>(k) >= resources_) throw std::logic_error("Scenario: all resources attached");
    ResourceProcess proc;
    proc.kind = ResourceProcess::Kind::Markov;
    proc.chain = std::move(chain);
    int s = proc.states();
    processes_.push_back(std::move(proc));
    state_counts_[k] = s;
    int rows = user_specific_ ? users_ : 1;
    rewards_[k].assign(static_cast<std::size_t>(rows) * static_cast<std::size_t>(s) *
                           static_cast<std::size_t>(users_),
                       -1.0);
}

void Scenario::check_resource(int k) const {
    if (k < 0 || k >= static_cast<int>(processes_.size()))
        throw std::out_of_range("Scenario: resource not attached yet");
}

std::size_t Scenario::reward_index(int i, int k, int s, int n) const {
    check_resource(k);
    int rows = user_specific_ ? users_ : 1;
    int row = user_specific_ ? i : 0;
    if (row < 0 || row >= rows) throw std::out_of_range("Scenario: user out of range");
    if (s < 0 || s >= state_counts_[static_cast<std::size_t>(k)])
        throw std::out_of_range("Scenario: state out of range");
    if (n < 1 || n > users_) throw std::out_of_range("Scenario: congestion out of range");
    return (static_cast<std::size_t>(row) * static_cast<std::size_t>(state_counts_[k]) +
            static_cast<std::size_t>(s)) *
               static_cast<std::size_t>(users_) +
           static_cast<std::size_t>(n - 1);
}

void Scenario::set_reward(int k, int s, int n, double value) {
    if (user_specific_)
        throw std::logic_error("Scenario: user-specific scenario needs the user overload");
    if (!(value >= 0.0 && value <= 1.0)) throw std::invalid_argument("Scenario: reward outside [0,1]");
    rewards_[static_cast<std::size_t>(k)][reward_index(0, k, s, n)] = value;
}

void Scenario::set_reward(int i, int k, int s, int n, double value) {
    if (!user_specific_) throw std::logic_error("Scenario: symmetric scenario takes no user id");
    if (!(value >= 0.0 && value <= 1.0)) throw std::invalid_argument("Scenario: reward outside [0,1]");
    rewards_[static_cast<std::size_t>(k)][reward_index(i, k, s, n)] = value;
}

double Scenario::reward(int i, int k, int s, int n) const {
    return rewards_[static_cast<std::size_t>(k)][reward_index(i, k, s, n)];
}

bool Scenario::has_markov() const {
    for (const auto& p : processes_)
        if (p.kind == ResourceProcess::Kind::Markov) return true;
    return false;
}

const ResourceProcess& Scenario::process(int k) const {
    check_resource(k);
    return processes_[static_cast<std::size_t>(k)];
}

void Scenario::validate() const {
    if (static_cast<int>(processes_.size()) != resources_)
        throw std::invalid_argument("Scenario: not every resource has a state process");
    for (int k = 0; k < resources_; ++k)
        for (double v : rewards_[static_cast<std::size_t>(k)])
            if (!(v >= 0.0 && v <= 1.0))
                throw std::invalid_argument("Scenario: incomplete reward table for resource " +
                                            std::to_string(k));
    MeanRewardTable means = exact_means();
    int rows = user_specific_ ? users_ : 1;
    for (int i = 0; i < rows; ++i)
        for (int k = 0; k < resources_; ++k)
            for (int n = 1; n <= users_; ++n) {
                double m = user_specific_ ? means.at(i, k, n) : means.at(k, n);
                if (!(m > 0.0 && m <= 1.0))
                    throw std::invalid_argument("Scenario: mean reward outside (0,1]");
            }
}

MeanRewardTable Scenario::exact_means() const {
    if (static_cast<int>(processes_.size()) != resources_)
        throw std::logic_error("Scenario: attach all resources before computing means");
    MeanRewardTable table = user_specific_ ? MeanRewardTable::per_user(users_, resources_, users_)
                                           : MeanRewardTable::symmetric(resources_, users_);
    int rows = user_specific_ ? users_ : 1;
    for (int k = 0; k < resources_; ++k) {
        const ResourceProcess& proc = processes_[static_cast<std::size_t>(k)];
        int S = proc.states();
        std::vector<double> weight(static_cast<std::size_t>(S));
        if (proc.kind == ResourceProcess::Kind::Iid) {
            weight = proc.state_probs;
        } else {
            const Eigen::VectorXd& pi = proc.chain->stationary();
            for (int s = 0; s < S; ++s) weight[static_cast<std::size_t>(s)] = pi(s);
        }
        for (int i = 0; i < rows; ++i)
            for (int n = 1; n <= users_; ++n) {
                double m = 0;
                for (int s = 0; s < S; ++s)
                    m += weight[static_cast<std::size_t>(s)] * reward(i, k, s, n);
                if (user_specific_)
                    table.set(i, k, n, m);
                else
                    table.set(k, n, m);
            }
    }
    return table;
}

GapReport Scenario::gap() const {
    MeanRewardTable means = exact_means();
    if (user_specific_) return optimal_assignment(means);
    return optimal_symmetric(means, users_);
}

double Scenario::v_star() const { return gap().v_star; }

void Scenario::set_transient_constant(double c_p) {
    if (!(c_p >= 0.0)) throw std::invalid_argument("Scenario: transient constant must be >= 0");
    transient_ = c_p;
}

double Scenario::estimate_transient(int horizon) const {
    double worst = 0;
    int rows = user_specific_ ? users_ : 1;
    for (int k = 0; k < resources_; ++k) {
        const ResourceProcess& proc = processes_[static_cast<std::size_t>(k)];
        if (proc.kind != ResourceProcess::Kind::Markov) continue;
        for (int i = 0; i < rows; ++i)
            for (int n = 1; n <= users_; ++n) {
                double c = estimate_transient_constant(
                    *proc.chain, [&](int s) { return reward(i, k, s, n); }, horizon);
                worst = std::max(worst, c);
            }
    }
    return worst;
}

MarkovBoundParams Scenario::markov_bounds() const {
    if (!has_markov()) throw std::logic_error("Scenario: no Markov resources");
    MarkovBoundParams out;
    out.pi_min = std::numeric_limits<double>::infinity();
    out.upsilon_min = std::numeric_limits<double>::infinity();
    out.r_sigma_min = std::numeric_limits<double>::infinity();
    int rows = user_specific_ ? users_ : 1;
    for (int k = 0; k < resources_; ++k) {
        const ResourceProcess& proc = processes_[static_cast<std::size_t>(k)];
        int S = proc.states();
        for (int i = 0; i < rows; ++i)
            for (int n = 1; n <= users_; ++n) {
                double sum = 0;
                for (int s = 0; s < S; ++s) sum += std::abs(reward(i, k, s, n));
                out.r_sigma_max = std::max(out.r_sigma_max, sum);
                out.r_sigma_min = std::min(out.r_sigma_min, sum);
            }
        if (proc.kind != ResourceProcess::Kind::Markov) continue;
        out.s_max = std::max(out.s_max, static_cast<double>(S));
        const Eigen::VectorXd& pi = proc.chain->stationary();
        for (int s = 0; s < S; ++s) out.pi_min = std::min(out.pi_min, pi(s));
        out.upsilon_min = std::min(out.upsilon_min, proc.chain->gap());
    }
    if (!(out.r_sigma_min > 0.0))
        throw std::logic_error("Scenario: a (resource, congestion) pair has zero total reward");
    out.transient = transient_ ? *transient_ : estimate_transient();
    return out;
}

Scenario make_osa_scenario(const OsaParams& params, int users, std::string name) {
    params.validate();
    if (users < 1) throw std::invalid_argument("make_osa_scenario: users < 1");
    int channels = params.channels();
    double ceiling = osa_rate_ceiling(params);
    Scenario s(std::move(name), users, channels, false);
    for (int k = 0; k < channels; ++k) {
        // state 0: primary user present, state 1: channel idle
        s.add_iid_resource({1.0 - params.theta[static_cast<std::size_t>(k)],
                            params.theta[static_cast<std::size_t>(k)]});
        for (int n = 1; n <= users; ++n) {
            s.set_reward(k, 0, n, 0.0);
            s.set_reward(k, 1, n, osa_rate(params, k, n) / ceiling);
        }
    }
    return s;
}

namespace {

Eigen::MatrixXd matrix_from_json(const json& rows) {
    if (!rows.is_array() || rows.empty())
        throw std::invalid_argument("scenario json: transition must be a non-empty array of rows");
    int n = static_cast<int>(rows.size());
    Eigen::MatrixXd P(n, n);
    for (int r = 0; r < n; ++r) {
        const json& row = rows[static_cast<std::size_t>(r)];
        if (!row.is_array() || static_cast<int>(row.size()) != n)
            throw std::invalid_argument("scenario json: transition matrix must be square");
        for (int c = 0; c < n; ++c) P(r, c) = row[static_cast<std::size_t>(c)].get<double>();
    }
    return P;
}

}  // namespace

Scenario load_scenario(const std::string& json_text) {
    json j = json::parse(json_text);
    if (j.contains("osa")) {
        const json& o = j.at("osa");
        OsaParams p;
        p.theta = o.at("theta").get<std::vector<double>>();
        p.h_hat = o.at("h_hat").get<std::vector<double>>();
        p.h_tilde = o.at("h_tilde").get<std::vector<double>>();
        p.power = o.at("power").get<std::vector<double>>();
        p.noise = o.value("noise", 1.0);
        p.gain = o.value("gain", 1.0);
        Scenario s = make_osa_scenario(p, j.at("users").get<int>(),
                                       j.value("name", std::string("osa")));
        if (j.contains("transient_constant"))
            s.set_transient_constant(j.at("transient_constant").get<double>());
        s.validate();
        return s;
    }

    int users = j.at("users").get<int>();
    const json& res = j.at("resources");
    if (!res.is_array() || res.empty())
        throw std::invalid_argument("scenario json: resources must be a non-empty array");
    bool user_specific = j.value("user_specific", false);
    Scenario s(j.value("name", std::string("scenario")), users, static_cast<int>(res.size()),
               user_specific);
    for (const json& r : res) {
        std::string kind = r.at("kind").get<std::string>();
        if (kind == "iid") {
            s.add_iid_resource(r.at("state_probs").get<std::vector<double>>());
        } else if (kind == "markov") {
            std::vector<double> initial;
            if (r.contains("initial")) initial = r.at("initial").get<std::vector<double>>();
            s.add_markov_resource(MarkovResource(matrix_from_json(r.at("transition")), initial));
        } else {
            throw std::invalid_argument("scenario json: unknown resource kind '" + kind + "'");
        }
    }
    // rewards[k][s][n-1] (symmetric) or rewards[i][k][s][n-1] (user-specific)
    const json& rw = j.at("rewards");
    if (user_specific) {
        for (int i = 0; i < users; ++i) {
            const json& per_user = rw.at(static_cast<std::size_t>(i));
            for (int k = 0; k < s.resources(); ++k) {
                const json& per_res = per_user.at(static_cast<std::size_t>(k));
                for (int st = 0; st < s.process(k).states(); ++st) {
                    const json& per_state = per_res.at(static_cast<std::size_t>(st));
                    for (int n = 1; n <= users; ++n)
                        s.set_reward(i, k, st, n,
                                     per_state.at(static_cast<std::size_t>(n - 1)).get<double>());
                }
            }
        }
    } else {
        for (int k = 0; k < s.resources(); ++k) {
            const json& per_res = rw.at(static_cast<std::size_t>(k));
            for (int st = 0; st < s.process(k).states(); ++st) {
                const json& per_state = per_res.at(static_cast<std::size_t>(st));
                for (int n = 1; n <= users; ++n)
                    s.set_reward(k, st, n,
                                 per_state.at(static_cast<std::size_t>(n - 1)).get<double>());
            }
        }
    }
    if (j.contains("transient_constant"))
        s.set_transient_constant(j.at("transient_constant").get<double>());
    s.validate();
    return s;
}

std::string scenario_json(const Scenario& s) {
    json j;
    j["name"] = s.name();
    j["users"] = s.users();
    j["user_specific"] = s.user_specific();
    json res = json::array();
    for (int k = 0; k < s.resources(); ++k) {
        const ResourceProcess& p = s.process(k);
        json r;
        if (p.kind == ResourceProcess::Kind::Iid) {
            r["kind"] = "iid";
            r["state_probs"] = p.state_probs;
        } else {
            r["kind"] = "markov";
            json rows = json::array();
            const Eigen::MatrixXd& P = p.chain->transition();
            for (int a = 0; a < P.rows(); ++a) {
                json row = json::array();
                for (int b = 0; b < P.cols(); ++b) row.push_back(P(a, b));
                rows.push_back(std::move(row));
            }
            r["transition"] = std::move(rows);
            json q0 = json::array();
            for (int a = 0; a < p.chain->initial().size(); ++a) q0.push_back(p.chain->initial()(a));
            r["initial"] = std::move(q0);
        }
        res.push_back(std::move(r));
    }
    j["resources"] = std::move(res);
    auto reward_row = [&](int i, int k, int st) {
        json row = json::array();
        for (int n = 1; n <= s.users(); ++n) row.push_back(s.reward(i, k, st, n));
        return row;
    };
    json rw = json::array();
    if (s.user_specific()) {
        for (int i = 0; i < s.users(); ++i) {
            json per_user = json::array();
            for (int k = 0; k < s.resources(); ++k) {
                json per_res = json::array();
                for (int st = 0; st < s.process(k).states(); ++st)
                    per_res.push_back(reward_row(i, k, st));
                per_user.push_back(std::move(per_res));
            }
            rw.push_back(std::move(per_user));
        }
    } else {
        for (int k = 0; k < s.resources(); ++k) {
            json per_res = json::array();
            for (int st = 0; st < s.process(k).states(); ++st)
                per_res.push_back(reward_row(0, k, st));
            rw.push_back(std::move(per_res));
        }
    }
    j["rewards"] = std::move(rw);
    if (s.configured_transient()) j["transient_constant"] = *s.configured_transient();
    return j.dump(2);
}

}  // namespace reshare
