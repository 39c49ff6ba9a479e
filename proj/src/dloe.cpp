#include "reshare/dloe.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace reshare {

// --- LSchedule ---------------------------------------------------------------

double LSchedule::at(long long t) const {
    if (t < 1) throw std::invalid_argument("LSchedule: t must be positive");
    switch (kind) {
        case Kind::Constant:
            return value;
        case Kind::LogGrowth:
            return std::ceil(std::log(1.0 + static_cast<double>(t)));
        case Kind::PowGrowth:
            return std::ceil(std::pow(static_cast<double>(t), 0.1));
    }
    throw std::logic_error("LSchedule: bad kind");
}

void BlockParams::validate() const {
    if (a < 1 || b < 2 || c < 2)
        throw std::invalid_argument("BlockParams: need a >= 1, b >= 2, c >= 2");
    if (L.kind == LSchedule::Kind::Constant && L.value < 1)
        throw std::invalid_argument("BlockParams: constant L must be >= 1");
}

// --- BlockScheduler ----------------------------------------------------------

BlockScheduler::BlockScheduler(int plan_length, BlockParams params)
    : params_(params), plan_length_(plan_length) {
    params_.validate();
    if (plan_length < 1) throw std::invalid_argument("BlockScheduler: empty plan");
}

Phase BlockScheduler::decide(long long t) {
    if (!at_boundary()) throw std::logic_error("BlockScheduler::decide: called mid-block");
    if (t < 1) throw std::invalid_argument("BlockScheduler::decide: t must be positive");
    const double need = params_.L.at(t) * std::log(static_cast<double>(t));
    // the budget test passes vacuously at t = 1; force the first traversal
    if (x_o_ > 0 && static_cast<double>(x_o_) >= need) {
        phase_ = Phase::Exploit;
        ++l_i_;
        block_len_ = params_.a;
        for (long long i = 1; i < l_i_; ++i) block_len_ *= params_.b;
    } else {
        phase_ = Phase::Explore;
        ++l_o_;
        dwell_ = 1;
        for (long long i = 1; i < l_o_; ++i) dwell_ *= params_.c;
        block_len_ = dwell_ * plan_length_;
    }
    eta_ = 0;
    started_ = true;
    return phase_;
}

Phase BlockScheduler::phase() const {
    if (!started_) throw std::logic_error("BlockScheduler: no block decided yet");
    return phase_;
}

int BlockScheduler::sequence_pos() const {
    if (phase() != Phase::Explore) throw std::logic_error("BlockScheduler: not exploring");
    if (at_boundary()) throw std::logic_error("BlockScheduler: block already complete");
    return static_cast<int>(eta_ / dwell_);
}

void BlockScheduler::advance() {
    if (!started_ || at_boundary()) throw std::logic_error("BlockScheduler::advance: no open block");
    ++eta_;
    if (phase_ == Phase::Explore) {
        ++t_o_;
        if (eta_ == block_len_) x_o_ += dwell_;
    }
}

std::string BlockScheduler::serialize() const {
    std::ostringstream out;
    out << started_ << ' ' << static_cast<int>(phase_) << ' ' << block_len_ << ' ' << eta_ << ' '
        << dwell_ << ' ' << l_o_ << ' ' << l_i_ << ' ' << x_o_ << ' ' << t_o_;
    return out.str();
}

void BlockScheduler::restore(const std::string& text) {
    std::istringstream in(text);
    int phase = 0;
    if (!(in >> started_ >> phase >> block_len_ >> eta_ >> dwell_ >> l_o_ >> l_i_ >> x_o_ >> t_o_))
        throw std::invalid_argument("BlockScheduler::restore: bad payload");
    phase_ = static_cast<Phase>(phase);
}

// --- EstimatorBank -----------------------------------------------------------

EstimatorBank::EstimatorBank(int resources, int max_users)
    : resources_(resources), max_users_(max_users) {
    if (resources < 1 || max_users < 1) throw std::invalid_argument("EstimatorBank: bad dimensions");
    counts_.assign(static_cast<std::size_t>(resources) * static_cast<std::size_t>(max_users), 0);
    means_.assign(counts_.size(), 0.0);
}

std::size_t EstimatorBank::index(int k, int n) const {
    if (k < 0 || k >= resources_ || n < 1 || n > max_users_)
        throw std::out_of_range("EstimatorBank: (k,n) out of range");
    return static_cast<std::size_t>(k) * static_cast<std::size_t>(max_users_) +
           static_cast<std::size_t>(n - 1);
}

void EstimatorBank::observe(int k, int n, double reward) {
    if (!(reward >= 0.0 && reward <= 1.0))
        throw std::invalid_argument("EstimatorBank::observe: reward outside [0,1]");
    std::size_t i = index(k, n);
    ++counts_[i];
    means_[i] = (static_cast<double>(counts_[i] - 1) * means_[i] + reward) /
                static_cast<double>(counts_[i]);
}

long long EstimatorBank::count(int k, int n) const { return counts_[index(k, n)]; }
double EstimatorBank::mean(int k, int n) const { return means_[index(k, n)]; }

bool EstimatorBank::covered() const {
    for (int k = 0; k < resources_; ++k)
        for (int n = 1; n <= max_users_; ++n)
            if (pair_reachable(resources_, max_users_, n) && count(k, n) == 0) return false;
    return true;
}

MeanRewardTable EstimatorBank::snapshot() const {
    MeanRewardTable t = MeanRewardTable::symmetric(resources_, max_users_);
    for (int k = 0; k < resources_; ++k)
        for (int n = 1; n <= max_users_; ++n) t.set(k, n, mean(k, n));
    return t;
}

std::string EstimatorBank::serialize() const {
    std::ostringstream out;
    out << resources_ << ' ' << max_users_;
    char buf[32];
    for (std::size_t i = 0; i < counts_.size(); ++i) {
        std::snprintf(buf, sizeof buf, " %lld %.17g", counts_[i], means_[i]);
        out << buf;
    }
    return out.str();
}

void EstimatorBank::restore(const std::string& text) {
    std::istringstream in(text);
    int k = 0, m = 0;
    if (!(in >> k >> m) || k != resources_ || m != max_users_)
        throw std::invalid_argument("EstimatorBank::restore: shape mismatch");
    for (std::size_t i = 0; i < counts_.size(); ++i)
        if (!(in >> counts_[i] >> means_[i]))
            throw std::invalid_argument("EstimatorBank::restore: truncated payload");
}

// --- settling randomization ----------------------------------------------------

int settle_draw(const AllocationCount& n_hat, int users, Rng& rng) {
    if (users < 1) throw std::invalid_argument("settle_draw: need users");
    double u = uniform01(rng);
    double acc = 0;
    int last_used = -1;
    for (std::size_t k = 0; k < n_hat.size(); ++k) {
        if (n_hat[k] <= 0) continue;
        last_used = static_cast<int>(k);
        acc += static_cast<double>(n_hat[k]) / users;
        if (u < acc) return static_cast<int>(k);
    }
    if (last_used < 0) throw std::invalid_argument("settle_draw: empty target");
    return last_used;
}

int settle_react(const AllocationCount& n_hat, int users, int current, int observed_congestion,
                 Rng& rng) {
    if (current < 0 || current >= static_cast<int>(n_hat.size()))
        throw std::invalid_argument("settle_react: current resource out of range");
    if (observed_congestion <= n_hat[static_cast<std::size_t>(current)]) return current;
    return settle_draw(n_hat, users, rng);
}

// --- DloeAgent -----------------------------------------------------------------

DloeAgent::DloeAgent(int id, int users, std::shared_ptr<const ExplorationPlan> plan,
                     BlockParams params, std::uint64_t seed, bool update_during_exploit)
    : id_(id),
      users_(users),
      plan_(std::move(plan)),
      params_(params),
      update_during_exploit_(update_during_exploit),
      scheduler_(plan_ ? plan_->length() : 0, params),
      bank_(plan_ ? plan_->resources : 0, users),
      rng_(seed) {
    if (!plan_) throw std::invalid_argument("DloeAgent: null plan");
    if (id < 0 || id >= plan_->users) throw std::invalid_argument("DloeAgent: id outside plan");
    if (users != plan_->users) throw std::invalid_argument("DloeAgent: user count mismatch");
}

Phase DloeAgent::decide_phase(long long t) {
    Phase ph = scheduler_.decide(t);
    if (ph == Phase::Exploit) {
        target_ = refresh_target();
        target_set_ = true;
        current_ = settle_draw(target_, users_, rng_);
        events_.push_back({t, AgentEvent::Kind::ExploitBlock, scheduler_.exploitation_blocks()});
    } else {
        events_.push_back({t, AgentEvent::Kind::ExploreBlock, scheduler_.exploration_blocks()});
    }
    return ph;
}

AllocationCount DloeAgent::refresh_target() {
    if (!bank_.covered())
        throw std::logic_error("DloeAgent::refresh_target: some reachable pair is unobserved");
    GapReport report = optimal_symmetric(bank_.snapshot(), users_);
    ++computations_;
    events_.push_back({0, AgentEvent::Kind::Computation, computations_});
    return report.best_allocations.front();  // lexicographically smallest on ties
}

int DloeAgent::act(long long t) {
    (void)t;
    if (acted_) throw std::logic_error("DloeAgent::act: already acted this slot");
    if (scheduler_.at_boundary()) throw std::logic_error("DloeAgent::act: block not decided");
    if (scheduler_.phase() == Phase::Explore) {
        current_ = plan_->sequence[static_cast<std::size_t>(id_)]
                                  [static_cast<std::size_t>(scheduler_.sequence_pos())];
    } else {
        // first exploitation slot keeps the draw made at decide time
        if (scheduler_.slot_in_block() > 0)
            current_ = settle_react(target_, users_, current_, last_congestion_, rng_);
    }
    acted_ = true;
    return current_;
}

void DloeAgent::observe(double reward, int observed_congestion) {
    if (!acted_) throw std::logic_error("DloeAgent::observe: no action pending");
    if (observed_congestion < 1 || observed_congestion > users_)
        throw std::invalid_argument("DloeAgent::observe: congestion out of range");
    if (scheduler_.phase() == Phase::Explore || update_during_exploit_)
        bank_.observe(current_, observed_congestion, reward);
    last_congestion_ = observed_congestion;
    acted_ = false;
    scheduler_.advance();
}

const AllocationCount& DloeAgent::target() const {
    if (!target_set_) throw std::logic_error("DloeAgent::target: no exploitation target yet");
    return target_;
}

std::string DloeAgent::serialize_state() const {
    std::ostringstream out;
    out << scheduler_.serialize() << '\n' << bank_.serialize() << '\n';
    out << rng_ << '\n';
    out << target_set_ << ' ' << current_ << ' ' << last_congestion_ << ' ' << acted_ << ' '
        << computations_;
    for (int v : target_) out << ' ' << v;
    return out.str();
}

void DloeAgent::restore_state(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw std::invalid_argument("DloeAgent::restore_state: bad payload");
    scheduler_.restore(line);
    if (!std::getline(in, line)) throw std::invalid_argument("DloeAgent::restore_state: bad payload");
    bank_.restore(line);
    if (!(in >> rng_)) throw std::invalid_argument("DloeAgent::restore_state: bad rng state");
    if (!(in >> target_set_ >> current_ >> last_congestion_ >> acted_ >> computations_))
        throw std::invalid_argument("DloeAgent::restore_state: bad fields");
    target_.assign(static_cast<std::size_t>(bank_.resources()), 0);
    if (target_set_)
        for (int& v : target_)
            if (!(in >> v)) throw std::invalid_argument("DloeAgent::restore_state: bad target");
}

}  // namespace reshare
