#include "reshare/exploration.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace reshare {

namespace {

void check_dims(int M, int K) {
    if (M < 1 || K < 1) throw std::invalid_argument("exploration plan: M,K must be positive");
}

ExplorationPlan from_slots(int M, int K, const std::vector<std::vector<int>>& slots) {
    ExplorationPlan plan;
    plan.users = M;
    plan.resources = K;
    plan.sequence.assign(static_cast<std::size_t>(M), {});
    plan.congestion.assign(static_cast<std::size_t>(M), {});
    for (const auto& slot : slots) {
        std::vector<int> cong(static_cast<std::size_t>(K), 0);
        for (int a : slot) ++cong[static_cast<std::size_t>(a)];
        for (int i = 0; i < M; ++i) {
            int a = slot[static_cast<std::size_t>(i)];
            plan.sequence[static_cast<std::size_t>(i)].push_back(a);
            plan.congestion[static_cast<std::size_t>(i)].push_back(cong[static_cast<std::size_t>(a)]);
        }
    }
    return plan;
}

}  // namespace

bool pair_reachable(int K, int M, int n) {
    if (n < 1 || n > M) return false;
    return K > 1 ? true : n == M;
}

ExplorationPlan build_full_plan(int M, int K) {
    check_dims(M, K);
    double total = std::pow(static_cast<double>(K), M);
    if (total > 1e6) throw std::invalid_argument("build_full_plan: K^M exceeds the 1e6 guard");
    std::vector<std::vector<int>> slots;
    std::vector<int> cur(static_cast<std::size_t>(M), 0);
    bool done = false;
    while (!done) {
        slots.push_back(cur);
        int pos = M - 1;
        while (pos >= 0) {
            if (++cur[static_cast<std::size_t>(pos)] < K) break;
            cur[static_cast<std::size_t>(pos)] = 0;
            --pos;
        }
        done = pos < 0;
    }
    return from_slots(M, K, slots);
}

ExplorationPlan build_compact_plan(int M, int K) {
    check_dims(M, K);
    if (K == 1) {
        // only congestion M is reachable; hold everyone on the lone resource
        std::vector<std::vector<int>> slots(static_cast<std::size_t>(M),
                                            std::vector<int>(static_cast<std::size_t>(M), 0));
        return from_slots(M, K, slots);
    }

    std::vector<std::vector<int>> slots;
    for (int n = 1; n <= M; ++n) {
        const int q = M / n;
        const int rem = M % n;
        const int qn = q * n;
        const int passes = (M + qn - 1) / qn;
        for (int p = 0; p < passes; ++p) {
            const int offset = (p * qn) % M;
            // chunk id per user under this pass, -1 for the leftover tail
            std::vector<int> chunk(static_cast<std::size_t>(M), -1);
            for (int u = 0; u < M; ++u) {
                int up = (u - offset % M + M) % M;
                if (up < qn) chunk[static_cast<std::size_t>(u)] = up / n;
            }
            if (q <= K - 1 || (q == K && rem == 0)) {
                for (int r = 0; r < K; ++r) {
                    std::vector<int> slot(static_cast<std::size_t>(M));
                    for (int u = 0; u < M; ++u) {
                        int c = chunk[static_cast<std::size_t>(u)];
                        slot[static_cast<std::size_t>(u)] = c < 0 ? (q + r) % K : (c + r) % K;
                    }
                    slots.push_back(std::move(slot));
                }
            } else {
                // more groups than resources: activate K-1 chunks at a time,
                // everyone else parks on the one resource the sweep skips
                const int batches = (q + K - 2) / (K - 1);
                for (int b = 0; b < batches; ++b) {
                    const int lo = b * (K - 1);
                    const int hi = std::min(q, (b + 1) * (K - 1));
                    for (int r = 0; r < K; ++r) {
                        std::vector<int> slot(static_cast<std::size_t>(M));
                        for (int u = 0; u < M; ++u) {
                            int c = chunk[static_cast<std::size_t>(u)];
                            slot[static_cast<std::size_t>(u)] = (c >= lo && c < hi)
                                                                    ? (c - lo + r) % K
                                                                    : (K - 1 + r) % K;
                        }
                        slots.push_back(std::move(slot));
                    }
                }
            }
        }
    }

    ExplorationPlan compact = from_slots(M, K, slots);
    const double full_len = std::pow(static_cast<double>(K), M);
    if (!verify_coverage(compact).ok || (full_len <= 1e6 && full_len <= compact.length()))
        return build_full_plan(M, K);
    return compact;
}

CoverageReport verify_coverage(const ExplorationPlan& plan) {
    const int M = plan.users;
    const int K = plan.resources;
    if (M < 1 || K < 1 || plan.sequence.size() != static_cast<std::size_t>(M) ||
        plan.congestion.size() != static_cast<std::size_t>(M))
        throw std::invalid_argument("verify_coverage: malformed plan");
    CoverageReport report;
    report.visits.assign(
        static_cast<std::size_t>(M),
        std::vector<std::vector<int>>(static_cast<std::size_t>(K),
                                      std::vector<int>(static_cast<std::size_t>(M), 0)));
    const int N = plan.length();
    for (int z = 0; z < N; ++z) {
        std::vector<int> cong(static_cast<std::size_t>(K), 0);
        for (int i = 0; i < M; ++i) {
            int a = plan.sequence[static_cast<std::size_t>(i)][static_cast<std::size_t>(z)];
            if (a < 0 || a >= K) throw std::invalid_argument("verify_coverage: resource out of range");
            ++cong[static_cast<std::size_t>(a)];
        }
        for (int i = 0; i < M; ++i) {
            int a = plan.sequence[static_cast<std::size_t>(i)][static_cast<std::size_t>(z)];
            int n = cong[static_cast<std::size_t>(a)];
            if (plan.congestion[static_cast<std::size_t>(i)][static_cast<std::size_t>(z)] != n)
                throw std::invalid_argument("verify_coverage: stored congestion is inconsistent");
            ++report.visits[static_cast<std::size_t>(i)][static_cast<std::size_t>(a)]
                           [static_cast<std::size_t>(n - 1)];
        }
    }
    report.ok = true;
    for (int i = 0; i < M; ++i)
        for (int k = 0; k < K; ++k)
            for (int n = 1; n <= M; ++n)
                if (pair_reachable(K, M, n) &&
                    report.visits[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)]
                                 [static_cast<std::size_t>(n - 1)] == 0) {
                    report.ok = false;
                    report.missing.push_back({i, k, n});
                }
    return report;
}

std::string serialize_plan(const ExplorationPlan& plan) {
    std::ostringstream out;
    out << plan.users << ' ' << plan.resources << ' ' << plan.length() << '\n';
    for (int i = 0; i < plan.users; ++i) {
        for (int z = 0; z < plan.length(); ++z)
            out << plan.sequence[static_cast<std::size_t>(i)][static_cast<std::size_t>(z)]
                << (z + 1 == plan.length() ? '\n' : ' ');
    }
    return out.str();
}

ExplorationPlan deserialize_plan(const std::string& text) {
    std::istringstream in(text);
    int M = 0, K = 0, N = 0;
    if (!(in >> M >> K >> N)) throw std::invalid_argument("deserialize_plan: bad header");
    std::vector<std::vector<int>> slots(static_cast<std::size_t>(N),
                                        std::vector<int>(static_cast<std::size_t>(M), 0));
    for (int i = 0; i < M; ++i)
        for (int z = 0; z < N; ++z)
            if (!(in >> slots[static_cast<std::size_t>(z)][static_cast<std::size_t>(i)]))
                throw std::invalid_argument("deserialize_plan: truncated payload");
    return from_slots(M, K, slots);
}

}  // namespace reshare
