#include "reshare/allocation.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace reshare {

namespace {

constexpr double kTieTolerance = 1e-12;

long long snap_ceil(double q) {
    // Gap constants arrive with 3-4 significant digits; a value within 0.2%
    // of an integer is that integer printed short, not a genuinely larger bound.
    double r = std::round(q);
    if (std::abs(q - r) <= 2e-3 * std::max(1.0, q)) return static_cast<long long>(r);
    return static_cast<long long>(std::ceil(q));
}

double factorial(int n) {
    double acc = 1;
    for (int i = 2; i <= n; ++i) acc *= i;
    return acc;
}

}  // namespace

// --- MeanRewardTable ---------------------------------------------------------

MeanRewardTable::MeanRewardTable(int users, int resources, int max_users)
    : users_(users), resources_(resources), max_users_(max_users) {
    if (resources < 1 || max_users < 1 || users < 0)
        throw std::invalid_argument("MeanRewardTable: bad dimensions");
    std::size_t rows = users == 0 ? 1 : static_cast<std::size_t>(users);
    data_.assign(rows * static_cast<std::size_t>(resources) * static_cast<std::size_t>(max_users), 0.0);
}

MeanRewardTable MeanRewardTable::symmetric(int resources, int max_users) {
    return MeanRewardTable(0, resources, max_users);
}

MeanRewardTable MeanRewardTable::per_user(int users, int resources, int max_users) {
    if (users < 1) throw std::invalid_argument("MeanRewardTable: need at least one user");
    return MeanRewardTable(users, resources, max_users);
}

std::size_t MeanRewardTable::index(int i, int k, int n) const {
    if (k < 0 || k >= resources_ || n < 1 || n > max_users_)
        throw std::out_of_range("MeanRewardTable: (k,n) out of range");
    if (users_ == 0) {
        if (i != 0) throw std::out_of_range("MeanRewardTable: symmetric table has no user axis");
    } else if (i < 0 || i >= users_) {
        throw std::out_of_range("MeanRewardTable: user out of range");
    }
    return (static_cast<std::size_t>(i) * static_cast<std::size_t>(resources_) +
            static_cast<std::size_t>(k)) *
               static_cast<std::size_t>(max_users_) +
           static_cast<std::size_t>(n - 1);
}

double MeanRewardTable::at(int k, int n) const { return data_[index(0, k, n)]; }
double MeanRewardTable::at(int i, int k, int n) const { return data_[index(i, k, n)]; }
void MeanRewardTable::set(int k, int n, double v) { data_[index(0, k, n)] = v; }
void MeanRewardTable::set(int i, int k, int n, double v) { data_[index(i, k, n)] = v; }

void MeanRewardTable::validate() const {
    for (double v : data_)
        if (!(v > 0.0) || v > 1.0)
            throw std::invalid_argument("MeanRewardTable: mean outside (0,1]");
}

std::string MeanRewardTable::serialize() const {
    std::ostringstream out;
    out << users_ << ' ' << resources_ << ' ' << max_users_;
    char buf[32];
    for (double v : data_) {
        std::snprintf(buf, sizeof buf, " %.17g", v);
        out << buf;
    }
    return out.str();
}

MeanRewardTable MeanRewardTable::deserialize(const std::string& text) {
    std::istringstream in(text);
    int users = 0, resources = 0, max_users = 0;
    if (!(in >> users >> resources >> max_users))
        throw std::invalid_argument("MeanRewardTable: bad header");
    MeanRewardTable t(users, resources, max_users);
    for (double& v : t.data_)
        if (!(in >> v)) throw std::invalid_argument("MeanRewardTable: truncated payload");
    return t;
}

// --- enumeration and values ----------------------------------------------------

std::vector<AllocationCount> enumerate_allocations(int M, int K) {
    if (M < 1 || K < 1) throw std::invalid_argument("enumerate_allocations: M,K must be positive");
    if (M > 8 || K > 8) throw std::invalid_argument("enumerate_allocations: guarded to M,K <= 8");
    std::vector<AllocationCount> out;
    AllocationCount cur(static_cast<std::size_t>(K), 0);
    // ascending lexicographic over count vectors
    auto rec = [&](auto&& self, int k, int left) -> void {
        if (k == K - 1) {
            cur[static_cast<std::size_t>(k)] = left;
            out.push_back(cur);
            return;
        }
        for (int n = 0; n <= left; ++n) {
            cur[static_cast<std::size_t>(k)] = n;
            self(self, k + 1, left - n);
        }
    };
    rec(rec, 0, M);
    return out;
}

double allocation_value(const AllocationCount& alloc, const MeanRewardTable& table) {
    if (table.user_specific())
        throw std::invalid_argument("allocation_value: needs a symmetric table");
    if (static_cast<int>(alloc.size()) != table.resources())
        throw std::invalid_argument("allocation_value: resource count mismatch");
    double v = 0;
    for (int k = 0; k < table.resources(); ++k) {
        int n = alloc[static_cast<std::size_t>(k)];
        if (n < 0) throw std::invalid_argument("allocation_value: negative count");
        if (n > 0) v += n * table.at(k, n);
    }
    return v;
}

AllocationCount congestion_of(const Assignment& assignment, int resources) {
    AllocationCount c(static_cast<std::size_t>(resources), 0);
    for (int a : assignment) {
        if (a < 0 || a >= resources) throw std::invalid_argument("congestion_of: resource out of range");
        ++c[static_cast<std::size_t>(a)];
    }
    return c;
}

double assignment_value(const Assignment& assignment, const MeanRewardTable& table) {
    AllocationCount cong = congestion_of(assignment, table.resources());
    double v = 0;
    for (std::size_t i = 0; i < assignment.size(); ++i) {
        int k = assignment[i];
        int n = cong[static_cast<std::size_t>(k)];
        v += table.user_specific() ? table.at(static_cast<int>(i), k, n) : table.at(k, n);
    }
    return v;
}

// --- optimum searches ----------------------------------------------------------

GapReport optimal_symmetric(const MeanRewardTable& table, int users) {
    if (users < 1) throw std::invalid_argument("optimal_symmetric: need at least one user");
    if (users > table.max_users())
        throw std::invalid_argument("optimal_symmetric: table does not cover this many users");
    auto allocations = enumerate_allocations(users, table.resources());
    GapReport report;
    report.users = users;
    double v_star = -std::numeric_limits<double>::infinity();
    std::vector<double> values(allocations.size());
    for (std::size_t i = 0; i < allocations.size(); ++i) {
        values[i] = allocation_value(allocations[i], table);
        v_star = std::max(v_star, values[i]);
    }
    double runner_up = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < allocations.size(); ++i) {
        if (values[i] >= v_star - kTieTolerance)
            report.best_allocations.push_back(allocations[i]);
        else
            runner_up = std::max(runner_up, values[i]);
    }
    report.v_star = v_star;
    report.delta_min = std::isinf(runner_up) ? std::numeric_limits<double>::infinity()
                                             : v_star - runner_up;
    report.epsilon = report.delta_min / (2.0 * users);
    return report;
}

GapReport optimal_assignment(const MeanRewardTable& table) {
    if (!table.user_specific())
        throw std::invalid_argument("optimal_assignment: needs a per-user table");
    const int M = table.users();
    const int K = table.resources();
    if (M > table.max_users())
        throw std::invalid_argument("optimal_assignment: table does not cover this many users");
    double total = std::pow(static_cast<double>(K), M);
    if (total > 1e7)
        throw std::invalid_argument("optimal_assignment: K^M exceeds the 1e7 search guard");

    GapReport report;
    report.users = M;
    double v_star = -std::numeric_limits<double>::infinity();
    double runner_up = -std::numeric_limits<double>::infinity();
    Assignment cur(static_cast<std::size_t>(M), 0);
    // two passes keep the tie set exact without storing every value
    for (int pass = 0; pass < 2; ++pass) {
        std::fill(cur.begin(), cur.end(), 0);
        bool done = false;
        while (!done) {
            double v = assignment_value(cur, table);
            if (pass == 0) {
                v_star = std::max(v_star, v);
            } else if (v >= v_star - kTieTolerance) {
                report.best_assignments.push_back(cur);
            } else {
                runner_up = std::max(runner_up, v);
            }
            // odometer, last user fastest: ascending lexicographic
            int pos = M - 1;
            while (pos >= 0) {
                if (++cur[static_cast<std::size_t>(pos)] < K) break;
                cur[static_cast<std::size_t>(pos)] = 0;
                --pos;
            }
            done = pos < 0;
        }
    }
    report.v_star = v_star;
    report.delta_min = std::isinf(runner_up) ? std::numeric_limits<double>::infinity()
                                             : v_star - runner_up;
    report.epsilon = report.delta_min / (2.0 * M);
    return report;
}

// --- exploration constants -------------------------------------------------------

long long exploration_constant(double epsilon) {
    if (std::isnan(epsilon) || epsilon <= 0)
        throw std::invalid_argument("exploration_constant: epsilon must be positive");
    if (std::isinf(epsilon)) return 1;  // every allocation optimal: any block length works
    return std::max<long long>(1, snap_ceil(1.0 / (epsilon * epsilon)));
}

long long exploration_constant(double epsilon, const MarkovBoundParams& mp) {
    long long iid = exploration_constant(epsilon);
    if (mp.s_max < 2 || mp.r_sigma_max <= 0 || mp.upsilon_min <= 0 || mp.upsilon_min > 1)
        throw std::invalid_argument("exploration_constant: bad Markov bound parameters");
    double mixing = 50.0 * mp.s_max * mp.s_max * mp.r_sigma_max * mp.r_sigma_max /
                    ((3.0 - 2.0 * std::sqrt(2.0)) * mp.upsilon_min);
    return std::max(iid, snap_ceil(mixing));
}

// --- settling ---------------------------------------------------------------------

double settle_probability(const std::vector<int>& m, const std::vector<int>& n_star) {
    if (m.size() != n_star.size())
        throw std::invalid_argument("settle_probability: size mismatch");
    int M = 0;
    for (int n : n_star) {
        if (n < 0) throw std::invalid_argument("settle_probability: negative target count");
        M += n;
    }
    if (M < 1) throw std::invalid_argument("settle_probability: empty target");
    int settled = 0;
    for (std::size_t k = 0; k < m.size(); ++k) {
        if (m[k] < 0 || m[k] > n_star[k])
            throw std::invalid_argument("settle_probability: m outside [0, n_star]");
        settled += m[k];
    }
    double p = factorial(M - settled);
    for (std::size_t k = 0; k < m.size(); ++k) {
        int rem = n_star[k] - m[k];
        p /= factorial(rem);
        p *= std::pow(static_cast<double>(n_star[k]) / M, rem);
    }
    return p;
}

double worst_case_hitting_bound(const std::vector<int>& n_star) {
    double worst = 1.0;
    std::vector<int> m(n_star.size(), 0);
    auto rec = [&](auto&& self, std::size_t k) -> void {
        if (k == n_star.size()) {
            worst = std::min(worst, settle_probability(m, n_star));
            return;
        }
        for (int v = 0; v <= n_star[k]; ++v) {
            m[k] = v;
            self(self, k + 1);
        }
        m[k] = 0;
    };
    rec(rec, 0);
    if (worst <= 0) throw std::runtime_error("worst_case_hitting_bound: degenerate probability");
    return 1.0 / worst;
}

// --- stability ---------------------------------------------------------------------

bool stability_check(const MeanRewardTable& estimates, const MeanRewardTable& truth,
                     double delta_min) {
    if (estimates.user_specific() != truth.user_specific() ||
        estimates.resources() != truth.resources() ||
        estimates.max_users() != truth.max_users() || estimates.users() != truth.users())
        throw std::invalid_argument("stability_check: table shapes differ");
    if (std::isinf(delta_min)) return true;
    const double bound = delta_min / (2.0 * truth.max_users());
    const int rows = truth.user_specific() ? truth.users() : 1;
    for (int i = 0; i < rows; ++i)
        for (int k = 0; k < truth.resources(); ++k)
            for (int n = 1; n <= truth.max_users(); ++n) {
                double e = truth.user_specific() ? estimates.at(i, k, n) : estimates.at(k, n);
                double t = truth.user_specific() ? truth.at(i, k, n) : truth.at(k, n);
                if (!(std::abs(e - t) < bound)) return false;
            }
    return true;
}

}  // namespace reshare
