#pragma once

#include <string>
#include <vector>

namespace reshare {

// Joint deterministic exploration schedule. All users walk the same slot
// index in lockstep, so the congestion each user sees at slot z is known at
// construction time and stored alongside the sequences.
struct ExplorationPlan {
    int users = 0;
    int resources = 0;
    // sequence[i][z]: resource (0-based) user i visits at plan slot z
    std::vector<std::vector<int>> sequence;
    // congestion[i][z]: number of users sharing that resource at slot z
    std::vector<std::vector<int>> congestion;

    int length() const { return sequence.empty() ? 0 : static_cast<int>(sequence[0].size()); }
};

struct CoverageReport {
    bool ok = false;
    // visits[i][k][n-1]: slots where user i sits on resource k with congestion n
    std::vector<std::vector<std::vector<int>>> visits;
    struct Missing {
        int user;
        int resource;
        int congestion;
    };
    std::vector<Missing> missing;
};

// A pair (k,n) is observable by some joint action unless K == 1, where only
// congestion M can occur.
bool pair_reachable(int K, int M, int n);

// One slot per joint assignment, K^M total (guarded to 1e6). Slot z maps
// user i to the i-th coordinate of the z-th assignment in ascending
// lexicographic order.
ExplorationPlan build_full_plan(int M, int K);

// Short covering plan built from rotating user chunks: for each congestion
// level n, users are tiled into groups of n which sweep all K resources.
// Verified against pair_reachable after construction; if the verification
// ever failed, or the full plan is no longer, the full plan is returned.
ExplorationPlan build_compact_plan(int M, int K);

CoverageReport verify_coverage(const ExplorationPlan& plan);

std::string serialize_plan(const ExplorationPlan& plan);
ExplorationPlan deserialize_plan(const std::string& text);

}  // namespace reshare
