#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <memory>
#include <vector>

#include "oracles.hpp"
#include "reshare/dloe.hpp"
#include "reshare/exploration.hpp"
#include "reshare/rng.hpp"

using namespace reshare;

namespace {

// two users, two resources: sharing resource 1 beats splitting, so the
// optimal allocation is (0,2) with v* = 0.9 and gap 0.3
double true_mean(int k, int n) {
    if (k == 0) return 0.1;
    return n == 1 ? 0.5 : 0.45;
}

struct Pair {
    std::shared_ptr<const ExplorationPlan> plan;
    std::vector<DloeAgent> agents;

    explicit Pair(BlockParams params, bool update_during_exploit = true)
        : plan(std::make_shared<ExplorationPlan>(build_full_plan(2, 2))) {
        agents.emplace_back(0, 2, plan, params, 11, update_during_exploit);
        agents.emplace_back(1, 2, plan, params, 22, update_during_exploit);
    }

    // one deterministic-reward slot; returns the two actions
    std::pair<int, int> step(long long t) {
        if (agents[0].at_boundary()) {
            Phase p0 = agents[0].decide_phase(t);
            Phase p1 = agents[1].decide_phase(t);
            REQUIRE(p0 == p1);
        }
        int a0 = agents[0].act(t);
        int a1 = agents[1].act(t);
        int c0 = a0 == a1 ? 2 : 1;
        agents[0].observe(true_mean(a0, c0), c0);
        agents[1].observe(true_mean(a1, c0 == 2 ? 2 : 1), a0 == a1 ? 2 : 1);
        return {a0, a1};
    }
};

}  // namespace

TEST_CASE("exploration requirement schedules") {
    CHECK(LSchedule::constant(152).at(7) == 152.0);
    CHECK(LSchedule::log_growth().at(1) == 1.0);
    CHECK(LSchedule::log_growth().at(100) == 5.0);
    CHECK(LSchedule::pow_growth().at(1) == 1.0);
    CHECK(LSchedule::pow_growth().at(1000) == 2.0);
    CHECK_THROWS_AS(LSchedule::constant(1).at(0), std::invalid_argument);

    BlockParams bad;
    bad.a = 0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = BlockParams{};
    bad.b = 1;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = BlockParams{};
    bad.c = 1;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = BlockParams{};
    bad.L = LSchedule::constant(0.5);
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("block walk: plan length 4, L = 1") {
    BlockParams params;  // a=2, b=4, c=4
    params.L = LSchedule::constant(1);
    BlockScheduler sched(4, params);
    CHECK_THROWS_AS(sched.phase(), std::logic_error);
    CHECK_THROWS_AS(sched.advance(), std::logic_error);

    struct Decision {
        long long t;
        Phase phase;
        long long len;
    };
    std::vector<Decision> got;
    for (long long t = 1; t <= 255; ++t) {
        if (sched.at_boundary()) {
            Phase p = sched.decide(t);
            got.push_back({t, p, sched.block_length()});
            if (t == 1) {
                CHECK_THROWS_AS(sched.decide(t), std::logic_error);  // mid-block
            }
        }
        if (t == 255) break;
        if (sched.phase() == Phase::Explore) {
            // entries are held dwell slots each: pos = eta / dwell
            CHECK(sched.sequence_pos() ==
                  static_cast<int>(sched.slot_in_block() / sched.dwell()));
        } else {
            CHECK_THROWS_AS(sched.sequence_pos(), std::logic_error);
        }
        sched.advance();
        if (t == 4) {
            CHECK(sched.explored_budget() == 1);
            CHECK(sched.exploration_slots() == 4);
        }
        if (t == 20) CHECK(sched.explored_budget() == 5);
        if (t == 254) {
            CHECK(sched.explored_budget() == 21);
            CHECK(sched.exploration_slots() == 84);
        }
    }

    REQUIRE(got.size() == 8);
    const Decision expect[8] = {
        {1, Phase::Explore, 4},    {5, Phase::Explore, 16},  {21, Phase::Exploit, 2},
        {23, Phase::Exploit, 8},   {31, Phase::Exploit, 32}, {63, Phase::Exploit, 128},
        {191, Phase::Explore, 64}, {255, Phase::Exploit, 512},
    };
    for (int i = 0; i < 8; ++i) {
        CHECK(got[static_cast<std::size_t>(i)].t == expect[i].t);
        CHECK(got[static_cast<std::size_t>(i)].phase == expect[i].phase);
        CHECK(got[static_cast<std::size_t>(i)].len == expect[i].len);
    }
    CHECK(sched.exploration_blocks() == 3);
    CHECK(sched.exploitation_blocks() == 5);

    CHECK_THROWS_AS(BlockScheduler(0, params), std::invalid_argument);
    BlockScheduler fresh(4, params);
    CHECK_THROWS_AS(fresh.decide(0), std::invalid_argument);
}

TEST_CASE("scheduler serialization resumes the walk") {
    BlockParams params;
    BlockScheduler a(4, params);
    for (long long t = 1; t <= 150; ++t) {
        if (a.at_boundary()) a.decide(t);
        a.advance();
    }
    BlockScheduler b(4, params);
    b.restore(a.serialize());
    CHECK(b.serialize() == a.serialize());
    for (long long t = 151; t <= 400; ++t) {
        if (a.at_boundary()) {
            CHECK(b.at_boundary());
            CHECK(a.decide(t) == b.decide(t));
        }
        a.advance();
        b.advance();
        CHECK(a.slot_in_block() == b.slot_in_block());
    }
    CHECK(a.serialize() == b.serialize());
    CHECK_THROWS_AS(b.restore("not numbers"), std::invalid_argument);
}

TEST_CASE("estimator bank: running mean equals the batch mean") {
    EstimatorBank bank(2, 3);
    Rng rng = make_rng(5, {0});
    std::vector<double> obs;
    for (int i = 0; i < 10000; ++i) {
        double r = uniform01(rng);
        obs.push_back(r);
        bank.observe(1, 2, r);
    }
    double batch = 0;
    for (double r : obs) batch += r;
    batch /= static_cast<double>(obs.size());
    CHECK(std::abs(bank.mean(1, 2) - batch) < 1e-12);
    CHECK(bank.count(1, 2) == 10000);
    CHECK(bank.count(0, 1) == 0);
    CHECK(bank.mean(0, 1) == 0.0);
    CHECK_FALSE(bank.covered());

    CHECK_THROWS_AS(bank.observe(0, 1, 1.5), std::invalid_argument);
    CHECK_THROWS_AS(bank.observe(0, 1, -0.1), std::invalid_argument);
    CHECK_THROWS_AS(bank.observe(2, 1, 0.5), std::out_of_range);
    CHECK_THROWS_AS(bank.count(0, 4), std::out_of_range);

    // K = 1: only congestion M is reachable, one observation covers
    EstimatorBank lone(1, 3);
    CHECK_FALSE(lone.covered());
    lone.observe(0, 3, 0.4);
    CHECK(lone.covered());

    auto snap = bank.snapshot();
    CHECK(snap.resources() == 2);
    CHECK(snap.max_users() == 3);
    CHECK(snap.at(1, 2) == bank.mean(1, 2));

    EstimatorBank copy(2, 3);
    copy.restore(bank.serialize());
    CHECK(copy.mean(1, 2) == bank.mean(1, 2));
    CHECK(copy.count(1, 2) == 10000);
    EstimatorBank wrong(3, 3);
    CHECK_THROWS_AS(wrong.restore(bank.serialize()), std::invalid_argument);
}

TEST_CASE("settling draw follows the target proportions") {
    Rng rng = make_rng(5, {1});
    AllocationCount target{0, 2, 1};
    int counts[3] = {0, 0, 0};
    const int draws = 30000;
    for (int i = 0; i < draws; ++i) ++counts[settle_draw(target, 3, rng)];
    CHECK(counts[0] == 0);
    double f1 = static_cast<double>(counts[1]) / draws;
    double se = std::sqrt((2.0 / 3.0) * (1.0 / 3.0) / draws);
    CHECK(std::abs(f1 - 2.0 / 3.0) <= 3 * se);

    // mass below one: the tail collapses onto the last used resource
    for (int i = 0; i < 200; ++i) CHECK(settle_draw({1, 0}, 2, rng) == 0);

    CHECK_THROWS_AS(settle_draw({0, 0}, 2, rng), std::invalid_argument);
    CHECK_THROWS_AS(settle_draw({1, 1}, 0, rng), std::invalid_argument);
}

TEST_CASE("settling reaction keeps an uncongested spot") {
    Rng rng = make_rng(5, {2});
    AllocationCount target{0, 2, 1};
    CHECK(settle_react(target, 3, 1, 2, rng) == 1);
    CHECK(settle_react(target, 3, 1, 1, rng) == 1);
    CHECK(settle_react(target, 3, 2, 1, rng) == 2);
    int redraw_counts[3] = {0, 0, 0};
    for (int i = 0; i < 30000; ++i) ++redraw_counts[settle_react(target, 3, 1, 3, rng)];
    CHECK(redraw_counts[0] == 0);
    double f1 = static_cast<double>(redraw_counts[1]) / 30000;
    CHECK(std::abs(f1 - 2.0 / 3.0) <= 0.01);
    // an estimated-zero resource is always over-congested
    for (int i = 0; i < 200; ++i) CHECK(settle_react(target, 3, 0, 1, rng) != 0);
    CHECK_THROWS_AS(settle_react(target, 3, 5, 1, rng), std::invalid_argument);
}

TEST_CASE("agent walk on a deterministic two-user scenario") {
    BlockParams params;
    params.L = LSchedule::constant(1);
    Pair sim(params);

    std::vector<std::pair<int, int>> actions;
    for (long long t = 1; t <= 300; ++t) actions.push_back(sim.step(t));

    // exploration blocks follow the plan, entries held dwell slots
    const int seq0[4] = {0, 0, 1, 1};
    const int seq1[4] = {0, 1, 0, 1};
    for (long long t = 1; t <= 4; ++t) {
        CHECK(actions[static_cast<std::size_t>(t - 1)].first == seq0[t - 1]);
        CHECK(actions[static_cast<std::size_t>(t - 1)].second == seq1[t - 1]);
    }
    for (long long t = 5; t <= 20; ++t) {
        int z = static_cast<int>((t - 5) / 4);
        CHECK(actions[static_cast<std::size_t>(t - 1)].first == seq0[z]);
        CHECK(actions[static_cast<std::size_t>(t - 1)].second == seq1[z]);
    }
    // the means are learned exactly, so the first exploitation block already
    // targets (0,2): both users settle on resource 1 instantly
    for (long long t = 21; t <= 190; ++t) {
        CHECK(actions[static_cast<std::size_t>(t - 1)].first == 1);
        CHECK(actions[static_cast<std::size_t>(t - 1)].second == 1);
    }
    for (long long t = 255; t <= 300; ++t) {
        CHECK(actions[static_cast<std::size_t>(t - 1)].first == 1);
        CHECK(actions[static_cast<std::size_t>(t - 1)].second == 1);
    }

    const DloeAgent& a0 = sim.agents[0];
    CHECK(a0.target() == AllocationCount{0, 2});
    CHECK(std::abs(a0.bank().mean(0, 1) - 0.1) < 1e-12);
    CHECK(std::abs(a0.bank().mean(0, 2) - 0.1) < 1e-12);
    CHECK(std::abs(a0.bank().mean(1, 1) - 0.5) < 1e-12);
    CHECK(std::abs(a0.bank().mean(1, 2) - 0.45) < 1e-12);
    CHECK(a0.computations() == 5);        // one refresh per exploitation block

    // event log: explore starts at 1, 5, 191; exploit starts at 21, 23, 31, 63, 255
    std::vector<long long> explores, exploits;
    for (const auto& e : a0.events()) {
        if (e.kind == AgentEvent::Kind::ExploreBlock) explores.push_back(e.t);
        if (e.kind == AgentEvent::Kind::ExploitBlock) exploits.push_back(e.t);
    }
    CHECK(explores == std::vector<long long>{1, 5, 191});
    CHECK(exploits == std::vector<long long>{21, 23, 31, 63, 255});
}

TEST_CASE("agent guards: ordering, coverage, target access") {
    auto plan = std::make_shared<ExplorationPlan>(build_full_plan(2, 2));
    BlockParams params;
    DloeAgent agent(0, 2, plan, params, 3);
    CHECK_THROWS_AS(agent.target(), std::logic_error);
    CHECK_THROWS_AS(agent.refresh_target(), std::logic_error);  // nothing observed
    CHECK_THROWS_AS(agent.act(1), std::logic_error);            // block not decided
    agent.decide_phase(1);
    int a = agent.act(1);
    CHECK(a == 0);
    CHECK_THROWS_AS(agent.act(1), std::logic_error);  // already acted
    agent.observe(0.5, 1);
    CHECK_THROWS_AS(agent.observe(0.5, 1), std::logic_error);  // no action pending
    agent.act(2);
    CHECK_THROWS_AS(agent.observe(0.5, 0), std::invalid_argument);
    CHECK_THROWS_AS(agent.observe(0.5, 3), std::invalid_argument);

    CHECK_THROWS_AS(DloeAgent(0, 2, nullptr, params, 3), std::invalid_argument);
    CHECK_THROWS_AS(DloeAgent(2, 2, plan, params, 3), std::invalid_argument);
    CHECK_THROWS_AS(DloeAgent(0, 3, plan, params, 3), std::invalid_argument);
}

TEST_CASE("exploitation observations can be held out of the estimates") {
    BlockParams params;
    params.L = LSchedule::constant(1);
    Pair updating(params, true);
    Pair frozen(params, false);
    for (long long t = 1; t <= 100; ++t) {
        updating.step(t);
        frozen.step(t);
    }
    auto total = [](const EstimatorBank& bank) {
        long long n = 0;
        for (int k = 0; k < bank.resources(); ++k)
            for (int i = 1; i <= bank.max_users(); ++i) n += bank.count(k, i);
        return n;
    };
    // by t=100 the pair has explored 20 slots and exploited 80
    CHECK(total(updating.agents[0].bank()) == 100);
    CHECK(total(frozen.agents[0].bank()) == 20);
    CHECK(frozen.agents[0].scheduler().exploration_slots() == 20);
}

TEST_CASE("serialized agents continue identically") {
    BlockParams params;
    params.L = LSchedule::constant(1);
    Pair live(params);
    for (long long t = 1; t <= 150; ++t) live.step(t);

    Pair resumed(params);
    resumed.agents[0].restore_state(live.agents[0].serialize_state());
    resumed.agents[1].restore_state(live.agents[1].serialize_state());

    for (long long t = 151; t <= 400; ++t) {
        auto a = live.step(t);
        auto b = resumed.step(t);
        CHECK(a == b);
    }
    CHECK(live.agents[0].serialize_state() == resumed.agents[0].serialize_state());
    CHECK(live.agents[1].serialize_state() == resumed.agents[1].serialize_state());

    DloeAgent fresh(0, 2, live.plan, params, 1);
    CHECK_THROWS_AS(fresh.restore_state("garbage"), std::invalid_argument);
}

TEST_CASE("exploration time and block-count invariants hold along the walk") {
    BlockParams params;
    params.L = LSchedule::constant(1);
    Pair sim(params);
    const double c = 4, L = 1, Nprime = 4;
    for (long long t = 1; t <= 3000; ++t) {
        const auto& s0 = sim.agents[0].scheduler();
        const auto& s1 = sim.agents[1].scheduler();
        bool boundary = sim.agents[0].at_boundary();
        sim.step(t);
        if (boundary && s0.phase() == Phase::Exploit) {
            // blocks only start exploiting once the budget covers L ln t
            double lo = static_cast<double>(s0.exploration_blocks());
            double cap = std::log((c - 1) * L * std::log(static_cast<double>(t))) / std::log(c) + 1;
            CHECK(lo < cap);
        }
        if (s0.phase() == Phase::Exploit) {
            // exploitation never leaves the target's support
            const auto& target = sim.agents[0].target();
            // re-act is not possible here; recover the action from congestion
            // bookkeeping instead: both agents sit inside the support
            (void)target;
        }
        double t_o = static_cast<double>(s0.exploration_slots());
        double dwell_cap = std::pow(c, static_cast<double>(s0.exploration_blocks() - 1));
        CHECK(t_o <= Nprime * L * std::log(static_cast<double>(t + 1)) + Nprime * dwell_cap);
        // lockstep synchrony
        CHECK(s0.exploration_blocks() == s1.exploration_blocks());
        CHECK(s0.exploitation_blocks() == s1.exploitation_blocks());
        CHECK(s0.slot_in_block() == s1.slot_in_block());
        CHECK(s0.phase() == s1.phase());
    }
}

TEST_CASE("exploit actions stay inside the target support") {
    BlockParams params;
    params.L = LSchedule::constant(1);
    Pair sim(params);
    for (long long t = 1; t <= 2000; ++t) {
        bool boundary = sim.agents[0].at_boundary();
        if (boundary) {
            Phase p0 = sim.agents[0].decide_phase(t);
            sim.agents[1].decide_phase(t);
            (void)p0;
        }
        int a0 = sim.agents[0].act(t);
        int a1 = sim.agents[1].act(t);
        if (sim.agents[0].scheduler().phase() == Phase::Exploit) {
            CHECK(sim.agents[0].target()[static_cast<std::size_t>(a0)] > 0);
            CHECK(sim.agents[1].target()[static_cast<std::size_t>(a1)] > 0);
        }
        int c0 = a0 == a1 ? 2 : 1;
        sim.agents[0].observe(true_mean(a0, c0), c0);
        sim.agents[1].observe(true_mean(a1, c0), c0);
    }
}

TEST_CASE("randomized settling hits the target within the worst-case bound") {
    Rng rng = make_rng(5, {3});
    const int episodes = 10000;
    for (const auto& n_star : std::vector<std::vector<int>>{{1, 1}, {2, 1}, {0, 2, 1}}) {
        std::vector<double> times;
        times.reserve(episodes);
        for (int e = 0; e < episodes; ++e)
            times.push_back(static_cast<double>(oracles::settling_hitting_time(n_star, rng)));
        auto [mean, se] = oracles::mean_and_se(times);
        CHECK(mean <= worst_case_hitting_bound(n_star) + 3 * se);
    }
}
