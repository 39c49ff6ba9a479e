#pragma once

#include <Eigen/Dense>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "reshare/rng.hpp"

namespace reshare {

// --- resource state models -------------------------------------------------

struct DiscreteDistribution {
    std::vector<double> values;  // state values, each in [0,1]
    std::vector<double> probs;
};

// Continuous law given by its quantile (inverse CDF) on (0,1).
struct ContinuousDistribution {
    std::function<double(double)> quantile;
};

// Restless i.i.d. resource: a fresh state is drawn every slot.
class IIDResource {
public:
    explicit IIDResource(DiscreteDistribution d);
    explicit IIDResource(ContinuousDistribution c);

    bool discrete() const { return discrete_.has_value(); }
    const DiscreteDistribution& law() const;

    double sample(Rng& rng) const;

    // E[f(state)]: exact sum for discrete laws, adaptive Simpson on the
    // quantile transform to 1e-9 absolute tolerance otherwise.
    double expectation(const std::function<double(double)>& f) const;

private:
    std::optional<DiscreteDistribution> discrete_;
    std::optional<ContinuousDistribution> continuous_;
};

// Restless finite Markov resource. The chain must be irreducible and
// aperiodic; both are checked at construction. States are indices 0..S-1.
class MarkovResource {
public:
    // initial: empty means "start from the stationary distribution".
    MarkovResource(Eigen::MatrixXd transition, std::vector<double> initial = {});

    int num_states() const { return static_cast<int>(P_.rows()); }
    const Eigen::MatrixXd& transition() const { return P_; }
    const Eigen::VectorXd& stationary() const { return pi_; }
    const Eigen::VectorXd& initial() const { return q0_; }

    int initial_state(Rng& rng) const;
    int step(int state, Rng& rng) const;

    Eigen::MatrixXd symmetrization() const;  // multiplicative_symmetrization(P, pi)
    double gap() const;                      // eigenvalue_gap of the symmetrization

private:
    Eigen::MatrixXd P_;
    Eigen::VectorXd pi_;
    Eigen::VectorXd q0_;
};

// --- chain analysis --------------------------------------------------------

bool is_row_stochastic(const Eigen::MatrixXd& P, double tol = 1e-9);
bool is_irreducible(const Eigen::MatrixXd& P);
bool is_aperiodic(const Eigen::MatrixXd& P);

// Unique stationary distribution of an irreducible aperiodic row-stochastic
// matrix. Residual ||pi^T P - pi^T||_inf < 1e-10 is verified before returning.
Eigen::VectorXd stationary_distribution(const Eigen::MatrixXd& P);

// Multiplicative symmetrization P' P where p'_{xy} = pi_y p_{yx} / pi_x.
// The result is row stochastic and self-adjoint on l2(pi).
Eigen::MatrixXd multiplicative_symmetrization(const Eigen::MatrixXd& P, const Eigen::VectorXd& pi);

// 1 - (second largest eigenvalue) of a row-stochastic matrix that is
// self-adjoint on l2 of its own stationary distribution.
double eigenvalue_gap(const Eigen::MatrixXd& P_dot);

// l2(pi) norm of q/pi, the initial-distribution factor of the chain
// concentration bound: sqrt(sum_x q_x^2 / pi_x).
double initial_divergence(const Eigen::VectorXd& q, const Eigen::VectorXd& pi);

// --- mean rewards ----------------------------------------------------------

double mean_reward(const IIDResource& res, const std::function<double(double)>& reward_of_state);
double mean_reward(const MarkovResource& res, const std::function<double(int)>& reward_of_state);

// Worst-case (over initial states) absolute deviation of the expected partial
// reward sums from their stationary line, max_{s0} max_{T<=horizon}
// |sum_{t<=T} E r(X_t) - T mu|. Used as the default transient constant.
double estimate_transient_constant(const MarkovResource& res,
                                   const std::function<double(int)>& reward_of_state,
                                   int horizon = 10000);

// --- interference-limited rate scenario ------------------------------------

struct OsaParams {
    std::vector<double> theta;    // per-channel idle probability
    std::vector<double> h_hat;    // own-channel gain
    std::vector<double> h_tilde;  // cross-interference gain
    std::vector<double> power;
    double noise = 1.0;
    double gain = 1.0;

    int channels() const { return static_cast<int>(theta.size()); }
    void validate() const;
};

// Shannon-style rate of channel k shared by n users (natural log).
double osa_rate(const OsaParams& p, int k, int n);

// max_k osa_rate(k, 1); rewards are normalized by this so they stay in [0,1].
double osa_rate_ceiling(const OsaParams& p);

// Constants feeding the Markov exploration threshold and regret bound.
struct MarkovBoundParams {
    double s_max = 0;         // largest state-space size over resources
    double pi_min = 0;        // smallest stationary weight over resources/states
    double r_sigma_max = 0;   // max over (user,resource,n) of sum_s r(s,n)
    double r_sigma_min = 0;   // min over (user,resource,n) of sum_s r(s,n)
    double upsilon_min = 0;   // smallest eigenvalue gap over resources
    double transient = 0;     // C_P: worst-case partial-sum deviation
};

}  // namespace reshare
