#include "reshare/engine.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <future>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "reshare/dlc.hpp"
#include "reshare/exploration.hpp"
#include "reshare/rng.hpp"

namespace reshare {

Algorithm algorithm_from_name(const std::string& name) {
    if (name == "dloe") return Algorithm::Dloe;
    if (name == "dlc") return Algorithm::Dlc;
    if (name == "oracle") return Algorithm::Oracle;
    if (name == "random") return Algorithm::Random;
    throw std::invalid_argument("unknown algorithm '" + name + "' (dloe|dlc|oracle|random)");
}

std::string algorithm_name(Algorithm a) {
    switch (a) {
        case Algorithm::Dloe: return "dloe";
        case Algorithm::Dlc: return "dlc";
        case Algorithm::Oracle: return "oracle";
        case Algorithm::Random: return "random";
    }
    throw std::logic_error("algorithm_name: bad enum");
}

// --- CostLedger ----------------------------------------------------------------

CostLedger::CostLedger(int users) : users_(users) {
    if (users < 1) throw std::invalid_argument("CostLedger: users < 1");
}

void CostLedger::record(long long t, int user, CostEvent::Kind kind) {
    if (t < 1) throw std::invalid_argument("CostLedger: t < 1");
    if (kind != CostEvent::Kind::InitialSetup && (user < 0 || user >= users_))
        throw std::invalid_argument("CostLedger: user out of range");
    if (!events_.empty() && events_.back().t > t)
        throw std::invalid_argument("CostLedger: events must arrive in time order");
    events_.push_back({t, kind == CostEvent::Kind::InitialSetup ? -1 : user, kind});
}

long long CostLedger::count(CostEvent::Kind kind, long long up_to) const {
    long long n = 0;
    for (const auto& e : events_) {
        if (e.t > up_to) break;
        if (e.kind == kind) ++n;
    }
    return n;
}

long long CostLedger::count_user(CostEvent::Kind kind, int user, long long up_to) const {
    long long n = 0;
    for (const auto& e : events_) {
        if (e.t > up_to) break;
        if (e.kind == kind && e.user == user) ++n;
    }
    return n;
}

double CostLedger::cost(const UnitCosts& costs, long long up_to) const {
    double total = 0;
    for (const auto& e : events_) {
        if (e.t > up_to) break;
        switch (e.kind) {
            case CostEvent::Kind::Computation: total += costs.cmp; break;
            case CostEvent::Kind::Switch: total += costs.swc; break;
            case CostEvent::Kind::Communication: total += costs.com; break;
            case CostEvent::Kind::InitialSetup: total += costs.init; break;
        }
    }
    return total;
}

// --- trace round trip ------------------------------------------------------------

namespace {

std::string format_g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

std::string trace_to_csv(const Trace& trace) {
    std::ostringstream out;
    out << "# trace users=" << trace.users << " resources=" << trace.resources
        << " seed=" << trace.seed << '\n';
    out << "t";
    for (int i = 0; i < trace.users; ++i) out << ",action_" << i;
    for (int k = 0; k < trace.resources; ++k) out << ",state_" << k;
    for (int i = 0; i < trace.users; ++i) out << ",reward_" << i;
    for (int k = 0; k < trace.resources; ++k) out << ",congestion_" << k;
    out << ",phase\n";
    for (std::size_t z = 0; z < trace.steps.size(); ++z) {
        const TraceStep& s = trace.steps[z];
        out << (z + 1);
        for (int a : s.actions) out << ',' << a;
        for (int st : s.states) out << ',' << st;
        for (double r : s.rewards) out << ',' << format_g17(r);
        for (int c : s.congestion) out << ',' << c;
        out << ',' << s.phase << '\n';
    }
    return out.str();
}

Trace trace_from_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw std::invalid_argument("trace csv: empty input");
    Trace trace;
    unsigned long long seed = 0;
    if (std::sscanf(line.c_str(), "# trace users=%d resources=%d seed=%llu", &trace.users,
                    &trace.resources, &seed) != 3)
        throw std::invalid_argument("trace csv: bad metadata line");
    trace.seed = seed;
    if (!std::getline(in, line)) throw std::invalid_argument("trace csv: missing column header");
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream row(line);
        std::string cell;
        auto next = [&]() {
            if (!std::getline(row, cell, ',')) throw std::invalid_argument("trace csv: short row");
            return cell;
        };
        next();  // t is implied by the row index; validated below
        long long t = std::stoll(cell);
        TraceStep s;
        for (int i = 0; i < trace.users; ++i) s.actions.push_back(std::stoi(next()));
        for (int k = 0; k < trace.resources; ++k) s.states.push_back(std::stoi(next()));
        for (int i = 0; i < trace.users; ++i) s.rewards.push_back(std::stod(next()));
        for (int k = 0; k < trace.resources; ++k) s.congestion.push_back(std::stoi(next()));
        std::string phase = next();
        if (phase.size() != 1) throw std::invalid_argument("trace csv: bad phase cell");
        s.phase = phase[0];
        if (t != static_cast<long long>(trace.steps.size()) + 1)
            throw std::invalid_argument("trace csv: rows out of order");
        trace.steps.push_back(std::move(s));
    }
    return trace;
}

// --- episode loop -----------------------------------------------------------------

EpisodeResult run_episode(const Scenario& scenario, Algorithm algorithm, long long horizon,
                          std::uint64_t master_seed, int episode_index, const RunParams& params) {
    scenario.validate();
    if (horizon < 1) throw std::invalid_argument("run_episode: horizon < 1");
    if (episode_index < 0) throw std::invalid_argument("run_episode: negative episode index");
    const int M = scenario.users();
    const int K = scenario.resources();
    const std::uint64_t ep = static_cast<std::uint64_t>(episode_index);

    EpisodeResult out(M);
    out.seed = derive_seed(master_seed, {ep});
    out.trace.users = M;
    out.trace.resources = K;
    out.trace.seed = out.seed;
    out.trace.steps.reserve(static_cast<std::size_t>(horizon));

    Rng env_rng = make_rng(master_seed, {ep, 0});

    std::shared_ptr<const ExplorationPlan> plan;
    std::vector<DloeAgent> dloe;
    std::vector<DlcAgent> dlc;
    CommChannel channel;
    Assignment oracle_assignment;
    std::vector<Rng> policy_rngs;

    if (algorithm == Algorithm::Dloe || algorithm == Algorithm::Dlc) {
        plan = std::make_shared<const ExplorationPlan>(build_compact_plan(M, K));
        out.plan_length = static_cast<long long>(plan->length());
    }
    switch (algorithm) {
        case Algorithm::Dloe:
            for (int i = 0; i < M; ++i)
                dloe.emplace_back(i, M, plan, params.block,
                                  derive_seed(master_seed, {ep, 100 + static_cast<std::uint64_t>(i)}),
                                  params.update_during_exploit);
            break;
        case Algorithm::Dlc:
            for (int i = 0; i < M; ++i) dlc.emplace_back(i, M, plan, params.block);
            // one-time setup exchange (sequences, parameters)
            out.ledger.record(1, -1, CostEvent::Kind::InitialSetup);
            break;
        case Algorithm::Oracle: {
            GapReport g = scenario.gap();
            if (scenario.user_specific()) {
                oracle_assignment = g.best_assignments.front();
            } else {
                const AllocationCount& counts = g.best_allocations.front();
                for (int k = 0; k < K; ++k)
                    for (int c = 0; c < counts[static_cast<std::size_t>(k)]; ++c)
                        oracle_assignment.push_back(k);
            }
            break;
        }
        case Algorithm::Random:
            for (int i = 0; i < M; ++i)
                policy_rngs.push_back(
                    make_rng(master_seed, {ep, 100 + static_cast<std::uint64_t>(i)}));
            break;
    }

    std::vector<int> states(static_cast<std::size_t>(K), 0);
    for (int k = 0; k < K; ++k) {
        const ResourceProcess& p = scenario.process(k);
        if (p.kind == ResourceProcess::Kind::Markov) states[static_cast<std::size_t>(k)] =
            p.chain->initial_state(env_rng);
    }

    std::vector<int> prev_action(static_cast<std::size_t>(M), -1);
    std::vector<long long> cmp_seen(static_cast<std::size_t>(M), 0);
    std::vector<long long> com_seen(static_cast<std::size_t>(M), 0);
    std::vector<int> actions(static_cast<std::size_t>(M), 0);

    for (long long t = 1; t <= horizon; ++t) {
        char phase = '-';
        if (algorithm == Algorithm::Dloe) {
            bool boundary = dloe[0].at_boundary();
            for (const auto& a : dloe)
                if (a.at_boundary() != boundary)
                    throw std::logic_error("run_episode: agents desynchronized");
            if (boundary) {
                Phase p0 = dloe[0].decide_phase(t);
                for (int i = 1; i < M; ++i)
                    if (dloe[static_cast<std::size_t>(i)].decide_phase(t) != p0)
                        throw std::logic_error("run_episode: block phase disagreement");
                for (int i = 0; i < M; ++i) {
                    auto& agent = dloe[static_cast<std::size_t>(i)];
                    while (cmp_seen[static_cast<std::size_t>(i)] < agent.computations()) {
                        out.ledger.record(t, i, CostEvent::Kind::Computation);
                        ++cmp_seen[static_cast<std::size_t>(i)];
                    }
                }
            }
            phase = dloe[0].scheduler().phase() == Phase::Explore ? 'O' : 'I';
            for (int i = 0; i < M; ++i)
                actions[static_cast<std::size_t>(i)] = dloe[static_cast<std::size_t>(i)].act(t);
        } else if (algorithm == Algorithm::Dlc) {
            bool boundary = dlc[0].at_boundary();
            for (const auto& a : dlc)
                if (a.at_boundary() != boundary)
                    throw std::logic_error("run_episode: agents desynchronized");
            if (boundary) {
                Phase p0 = dlc[0].decide_phase(t);
                for (int i = 1; i < M; ++i)
                    if (dlc[static_cast<std::size_t>(i)].decide_phase(t) != p0)
                        throw std::logic_error("run_episode: block phase disagreement");
                if (p0 == Phase::Exploit) exchange_and_assign(dlc, channel, t);
                for (int i = 0; i < M; ++i) {
                    auto& agent = dlc[static_cast<std::size_t>(i)];
                    while (com_seen[static_cast<std::size_t>(i)] < agent.communications()) {
                        out.ledger.record(t, i, CostEvent::Kind::Communication);
                        ++com_seen[static_cast<std::size_t>(i)];
                    }
                    while (cmp_seen[static_cast<std::size_t>(i)] < agent.computations()) {
                        out.ledger.record(t, i, CostEvent::Kind::Computation);
                        ++cmp_seen[static_cast<std::size_t>(i)];
                    }
                }
            }
            phase = dlc[0].scheduler().phase() == Phase::Explore ? 'O' : 'I';
            for (int i = 0; i < M; ++i)
                actions[static_cast<std::size_t>(i)] = dlc[static_cast<std::size_t>(i)].act(t);
        } else if (algorithm == Algorithm::Oracle) {
            actions = oracle_assignment;
        } else {
            for (int i = 0; i < M; ++i) {
                int k = static_cast<int>(uniform01(policy_rngs[static_cast<std::size_t>(i)]) * K);
                actions[static_cast<std::size_t>(i)] = std::min(k, K - 1);
            }
        }

        for (int k = 0; k < K; ++k) {
            const ResourceProcess& p = scenario.process(k);
            if (p.kind == ResourceProcess::Kind::Iid)
                states[static_cast<std::size_t>(k)] = sample_discrete(p.state_probs, env_rng);
        }

        std::vector<int> congestion(static_cast<std::size_t>(K), 0);
        for (int a : actions) ++congestion[static_cast<std::size_t>(a)];
        int total = 0;
        for (int c : congestion) total += c;
        if (total != M) throw std::logic_error("run_episode: congestion does not sum to M");

        std::vector<double> rewards(static_cast<std::size_t>(M), 0.0);
        for (int i = 0; i < M; ++i) {
            int a = actions[static_cast<std::size_t>(i)];
            rewards[static_cast<std::size_t>(i)] =
                scenario.reward(i, a, states[static_cast<std::size_t>(a)],
                                congestion[static_cast<std::size_t>(a)]);
        }

        if (t > 1)
            for (int i = 0; i < M; ++i)
                if (actions[static_cast<std::size_t>(i)] != prev_action[static_cast<std::size_t>(i)])
                    out.ledger.record(t, i, CostEvent::Kind::Switch);
        prev_action = actions;

        if (algorithm == Algorithm::Dloe) {
            for (int i = 0; i < M; ++i) {
                int a = actions[static_cast<std::size_t>(i)];
                dloe[static_cast<std::size_t>(i)].observe(rewards[static_cast<std::size_t>(i)],
                                                          congestion[static_cast<std::size_t>(a)]);
            }
        } else if (algorithm == Algorithm::Dlc) {
            for (int i = 0; i < M; ++i)
                dlc[static_cast<std::size_t>(i)].observe(rewards[static_cast<std::size_t>(i)]);
        }

        out.trace.steps.push_back({actions, states, rewards, congestion, phase});

        for (int k = 0; k < K; ++k) {
            const ResourceProcess& p = scenario.process(k);
            if (p.kind == ResourceProcess::Kind::Markov)
                states[static_cast<std::size_t>(k)] =
                    p.chain->step(states[static_cast<std::size_t>(k)], env_rng);
        }
    }
    return out;
}

// --- metrics ------------------------------------------------------------------------

std::vector<long long> default_checkpoints(long long horizon) {
    if (horizon < 1) throw std::invalid_argument("default_checkpoints: horizon < 1");
    std::vector<long long> cps;
    for (long long p = 10; p <= horizon && p > 0; p *= 10) cps.push_back(p);
    if (cps.empty() || cps.back() != horizon) cps.push_back(horizon);
    return cps;
}

namespace {

void check_checkpoints(const Trace& trace, const std::vector<long long>& checkpoints) {
    if (checkpoints.empty()) throw std::invalid_argument("metrics: empty checkpoint grid");
    long long prev = 0;
    for (long long cp : checkpoints) {
        if (cp <= prev) throw std::invalid_argument("metrics: checkpoints must increase");
        if (cp > trace.horizon())
            throw std::invalid_argument("metrics: checkpoint beyond the trace horizon");
        prev = cp;
    }
}

}  // namespace

Curve regret_basic(const Trace& trace, double v_star, const std::vector<long long>& checkpoints) {
    check_checkpoints(trace, checkpoints);
    Curve out;
    double cum = 0;
    std::size_t ci = 0;
    for (long long t = 1; t <= trace.horizon() && ci < checkpoints.size(); ++t) {
        for (double r : trace.steps[static_cast<std::size_t>(t - 1)].rewards) cum += r;
        if (t == checkpoints[ci]) {
            out.t.push_back(t);
            out.value.push_back(static_cast<double>(t) * v_star - cum);
            ++ci;
        }
    }
    return out;
}

Curve regret_with_costs(const Trace& trace, const CostLedger& ledger, const UnitCosts& costs,
                        double v_star, const std::vector<long long>& checkpoints) {
    Curve out = regret_basic(trace, v_star, checkpoints);
    for (std::size_t i = 0; i < out.t.size(); ++i) out.value[i] += ledger.cost(costs, out.t[i]);
    return out;
}

Curve percent_optimal(const Trace& trace, const AllocationCount& n_star,
                      const std::vector<long long>& checkpoints) {
    check_checkpoints(trace, checkpoints);
    if (static_cast<int>(n_star.size()) != trace.resources)
        throw std::invalid_argument("percent_optimal: allocation size mismatch");
    Curve out;
    long long hits = 0;
    std::size_t ci = 0;
    for (long long t = 1; t <= trace.horizon() && ci < checkpoints.size(); ++t) {
        const TraceStep& s = trace.steps[static_cast<std::size_t>(t - 1)];
        bool match = true;
        for (int k = 0; k < trace.resources; ++k)
            if (s.congestion[static_cast<std::size_t>(k)] != n_star[static_cast<std::size_t>(k)]) {
                match = false;
                break;
            }
        if (match) ++hits;
        if (t == checkpoints[ci]) {
            out.t.push_back(t);
            out.value.push_back(100.0 * static_cast<double>(hits) / static_cast<double>(t));
            ++ci;
        }
    }
    return out;
}

ShareTable channel_share(const Trace& trace, int user, const std::vector<long long>& checkpoints) {
    check_checkpoints(trace, checkpoints);
    if (user < 0 || user >= trace.users)
        throw std::invalid_argument("channel_share: user out of range");
    ShareTable out;
    out.share.assign(static_cast<std::size_t>(trace.resources), {});
    std::vector<long long> counts(static_cast<std::size_t>(trace.resources), 0);
    std::size_t ci = 0;
    for (long long t = 1; t <= trace.horizon() && ci < checkpoints.size(); ++t) {
        ++counts[static_cast<std::size_t>(
            trace.steps[static_cast<std::size_t>(t - 1)].actions[static_cast<std::size_t>(user)])];
        if (t == checkpoints[ci]) {
            out.t.push_back(t);
            for (int k = 0; k < trace.resources; ++k)
                out.share[static_cast<std::size_t>(k)].push_back(
                    100.0 * static_cast<double>(counts[static_cast<std::size_t>(k)]) /
                    static_cast<double>(t));
            ++ci;
        }
    }
    return out;
}

// --- closed-form bound -----------------------------------------------------------------

double theoretical_bound(long long t, const BoundInputs& in) {
    if (t < 1) throw std::invalid_argument("theoretical_bound: t < 1");
    if (in.users < 1 || in.resources < 1 || in.plan_length < 1)
        throw std::invalid_argument("theoretical_bound: incomplete inputs");
    if (!(in.o_b >= 1.0)) throw std::invalid_argument("theoretical_bound: O_B must be >= 1");
    const double M = in.users;
    const double K = in.resources;
    const double Np = static_cast<double>(in.plan_length);
    const double L = in.block.L.at(t);
    const double lnt = std::log(static_cast<double>(t));
    const double beta = std::numbers::pi * std::numbers::pi / 6.0;

    double q = 1.0;
    double transient = 0.0;
    if (in.markov) {
        const MarkovBoundParams& mp = in.markov_params;
        if (!(mp.s_max >= 1.0) || !(mp.pi_min > 0.0) || !(mp.r_sigma_min > 0.0) ||
            !(mp.upsilon_min > 0.0) || !(mp.transient >= 0.0))
            throw std::invalid_argument("theoretical_bound: missing chain constants");
        q = (1.0 / std::log(2.0) + std::sqrt(2.0 * L) / (10.0 * mp.r_sigma_min)) * mp.s_max /
            mp.pi_min;
        transient = mp.transient;
    }
    const double m3kq = M * M * M * K * q;

    double blocks = 0.0;
    if (t > in.plan_length) {
        double x = static_cast<double>(in.block.b - 1) / static_cast<double>(in.block.a) *
                   static_cast<double>(t - in.plan_length);
        if (x > 1.0) blocks = std::log(x) / std::log(static_cast<double>(in.block.b));
    }

    const UnitCosts& c = in.costs;
    if (in.dlc) {
        return (M * Np * L * (1.0 + c.swc) + m3kq) * lnt +
               (c.com + c.cmp + c.swc) * M * blocks + m3kq * (beta * transient + 1.0) + c.init;
    }
    return m3kq * (lnt + 1.0) * (1.0 + c.swc) + M * Np * L * lnt * (1.0 + c.swc) +
           M * blocks * (c.swc * in.o_b + c.cmp) + in.o_b * m3kq * beta + m3kq * beta * transient;
}

BoundInputs bound_inputs_for(const Scenario& scenario, Algorithm algorithm,
                             const RunParams& params, const UnitCosts& costs,
                             long long plan_length) {
    BoundInputs in;
    in.users = scenario.users();
    in.resources = scenario.resources();
    in.plan_length = plan_length;
    in.block = params.block;
    in.costs = costs;
    in.dlc = algorithm == Algorithm::Dlc;
    GapReport g = scenario.gap();
    AllocationCount n_star = scenario.user_specific()
                                 ? congestion_of(g.best_assignments.front(), scenario.resources())
                                 : g.best_allocations.front();
    in.o_b = worst_case_hitting_bound(n_star);
    in.markov = scenario.has_markov();
    if (in.markov) in.markov_params = scenario.markov_bounds();
    return in;
}

// --- aggregation ---------------------------------------------------------------------------

namespace {

void mean_se(const std::vector<std::vector<double>>& rows, std::vector<double>& mean,
             std::vector<double>& se) {
    if (rows.empty()) return;
    std::size_t n = rows.size();
    std::size_t cols = rows.front().size();
    mean.assign(cols, 0.0);
    se.assign(cols, 0.0);
    for (const auto& r : rows)
        for (std::size_t j = 0; j < cols; ++j) mean[j] += r[j];
    for (double& m : mean) m /= static_cast<double>(n);
    if (n < 2) return;
    for (const auto& r : rows)
        for (std::size_t j = 0; j < cols; ++j) {
            double d = r[j] - mean[j];
            se[j] += d * d;
        }
    for (double& s : se) s = std::sqrt(s / static_cast<double>(n - 1) / static_cast<double>(n));
}

}  // namespace

AggregateResult run_many(const Scenario& scenario, Algorithm algorithm, long long horizon,
                         int seeds, std::uint64_t master_seed, const RunParams& params,
                         const UnitCosts& costs, const std::vector<long long>& checkpoints) {
    if (seeds < 1) throw std::invalid_argument("run_many: seeds < 1");
    GapReport gap = scenario.gap();
    AllocationCount n_star = scenario.user_specific()
                                 ? congestion_of(gap.best_assignments.front(), scenario.resources())
                                 : gap.best_allocations.front();

    std::vector<EpisodeResult> episodes;
    episodes.reserve(static_cast<std::size_t>(seeds));
    unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    for (int base = 0; base < seeds; base += static_cast<int>(hw)) {
        int wave = std::min(seeds - base, static_cast<int>(hw));
        std::vector<std::future<EpisodeResult>> futs;
        futs.reserve(static_cast<std::size_t>(wave));
        for (int j = 0; j < wave; ++j)
            futs.push_back(std::async(std::launch::async, [&, idx = base + j]() {
                return run_episode(scenario, algorithm, horizon, master_seed, idx, params);
            }));
        for (auto& f : futs) episodes.push_back(f.get());
    }

    AggregateResult out;
    out.checkpoints = checkpoints;
    std::vector<std::vector<double>> regret_rows, cost_rows, pct_rows;
    std::vector<std::vector<std::vector<double>>> share_rows;  // [episode][resource][cp]
    for (const EpisodeResult& e : episodes) {
        out.seeds.push_back(e.seed);
        regret_rows.push_back(regret_basic(e.trace, gap.v_star, checkpoints).value);
        cost_rows.push_back(
            regret_with_costs(e.trace, e.ledger, costs, gap.v_star, checkpoints).value);
        pct_rows.push_back(percent_optimal(e.trace, n_star, checkpoints).value);
        share_rows.push_back(channel_share(e.trace, 0, checkpoints).share);
        EpisodeSummary summary;
        summary.seed = e.seed;
        summary.regret = regret_rows.back().back();
        summary.regret_with_costs = cost_rows.back().back();
        summary.cmp = e.ledger.count(CostEvent::Kind::Computation, horizon);
        summary.swc = e.ledger.count(CostEvent::Kind::Switch, horizon);
        summary.com = e.ledger.count(CostEvent::Kind::Communication, horizon);
        out.episodes.push_back(summary);
        out.mean_cmp += static_cast<double>(summary.cmp);
        out.mean_swc += static_cast<double>(summary.swc);
        out.mean_com += static_cast<double>(summary.com);
    }
    out.mean_cmp /= static_cast<double>(seeds);
    out.mean_swc /= static_cast<double>(seeds);
    out.mean_com /= static_cast<double>(seeds);
    out.plan_length = episodes.front().plan_length;

    mean_se(regret_rows, out.regret_mean, out.regret_se);
    mean_se(cost_rows, out.regret_cost_mean, out.regret_cost_se);
    mean_se(pct_rows, out.pct_optimal_mean, out.pct_optimal_se);

    out.share_user0.assign(static_cast<std::size_t>(scenario.resources()),
                           std::vector<double>(checkpoints.size(), 0.0));
    for (const auto& per_episode : share_rows)
        for (std::size_t k = 0; k < per_episode.size(); ++k)
            for (std::size_t j = 0; j < per_episode[k].size(); ++j)
                out.share_user0[k][j] += per_episode[k][j] / static_cast<double>(seeds);

    if (algorithm == Algorithm::Dloe || algorithm == Algorithm::Dlc) {
        BoundInputs bi = bound_inputs_for(scenario, algorithm, params, costs, out.plan_length);
        for (long long cp : checkpoints) out.bound.push_back(theoretical_bound(cp, bi));
    }
    return out;
}

}  // namespace reshare
