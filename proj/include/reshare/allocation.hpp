#pragma once

#include <string>
#include <vector>

#include "reshare/reward_models.hpp"

namespace reshare {

// How many users sit on each resource; entries sum to the number of users.
using AllocationCount = std::vector<int>;

// Resource index (0-based) chosen by each user.
using Assignment = std::vector<int>;

// Mean rewards mu_{k,n} (symmetric across users) or mu^i_{k,n} (per user).
// n is the congestion level, 1..max_users.
class MeanRewardTable {
public:
    static MeanRewardTable symmetric(int resources, int max_users);
    static MeanRewardTable per_user(int users, int resources, int max_users);

    bool user_specific() const { return users_ > 0; }
    int users() const { return users_; }
    int resources() const { return resources_; }
    int max_users() const { return max_users_; }

    double at(int k, int n) const;
    double at(int i, int k, int n) const;
    void set(int k, int n, double v);
    void set(int i, int k, int n, double v);

    // true means: every entry in (0,1]. Estimator snapshots skip this.
    void validate() const;

    // exact decimal serialization (17 significant digits), round-trip safe
    std::string serialize() const;
    static MeanRewardTable deserialize(const std::string& text);

    bool operator==(const MeanRewardTable&) const = default;

private:
    MeanRewardTable(int users, int resources, int max_users);
    std::size_t index(int i, int k, int n) const;

    int users_ = 0;  // 0 for the symmetric form
    int resources_ = 0;
    int max_users_ = 0;
    std::vector<double> data_;
};

// Optimum summary produced by the allocation searches.
struct GapReport {
    double v_star = 0;
    std::vector<AllocationCount> best_allocations;  // symmetric search
    std::vector<Assignment> best_assignments;       // per-user search
    double delta_min = 0;  // +inf when every candidate is optimal
    double epsilon = 0;    // delta_min / (2 M)
    int users = 0;
};

// All ways to place M identical users on K resources, ascending
// lexicographic. Guarded to M, K <= 8.
std::vector<AllocationCount> enumerate_allocations(int M, int K);

// sum_k n_k mu_{k, n_k}
double allocation_value(const AllocationCount& alloc, const MeanRewardTable& table);

// sum_i mu^i_{a_i, congestion(a_i)}
double assignment_value(const Assignment& assignment, const MeanRewardTable& table);

AllocationCount congestion_of(const Assignment& assignment, int resources);

// Exhaustive searches. Ties within 1e-12 of the maximum are all reported.
GapReport optimal_symmetric(const MeanRewardTable& table, int users);
GapReport optimal_assignment(const MeanRewardTable& table);

// Smallest integer exploration constant satisfying the applicable bound.
// Inputs are treated as decimals with limited precision: values within 0.2%
// of an integer snap to it instead of being ceiled past it.
long long exploration_constant(double epsilon);
long long exploration_constant(double epsilon, const MarkovBoundParams& mp);

// Probability that one round of the exploitation randomization settles the
// remaining users, given m already-settled counts. n_star and m are
// componentwise counts; sum(n_star) = M.
double settle_probability(const std::vector<int>& m, const std::vector<int>& n_star);

// O_B: reciprocal of the worst settle probability over the partial-settle lattice.
double worst_case_hitting_bound(const std::vector<int>& n_star);

// max |estimate - truth| < delta_min / (2 M): estimate-based argmax matches truth's.
bool stability_check(const MeanRewardTable& estimates, const MeanRewardTable& truth,
                     double delta_min);

}  // namespace reshare
