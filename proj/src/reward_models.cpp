#include "reshare/reward_models.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace reshare {

namespace {

void check_probability_vector(const std::vector<double>& p, const char* what) {
    if (p.empty()) throw std::invalid_argument(std::string(what) + ": empty");
    double sum = 0;
    for (double x : p) {
        if (x < 0) throw std::invalid_argument(std::string(what) + ": negative entry");
        sum += x;
    }
    if (std::abs(sum - 1.0) > 1e-9)
        throw std::invalid_argument(std::string(what) + ": entries do not sum to 1");
}

double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double fa, double fm, double fb, double whole, double tol, int depth) {
    double m = 0.5 * (a + b);
    double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    double flm = f(lm), frm = f(rm);
    double left = (m - a) / 6.0 * (fa + 4 * flm + fm);
    double right = (b - m) / 6.0 * (fm + 4 * frm + fb);
    if (depth <= 0 || std::abs(left + right - whole) < 15 * tol)
        return left + right + (left + right - whole) / 15.0;
    return adaptive_simpson(f, a, m, fa, flm, fm, left, tol / 2, depth - 1) +
           adaptive_simpson(f, m, b, fm, frm, fb, right, tol / 2, depth - 1);
}

double integrate01(const std::function<double(double)>& f, double tol) {
    // quantiles may be unbounded at the endpoints; nudge inward
    const double a = 1e-12, b = 1.0 - 1e-12;
    double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    double whole = (b - a) / 6.0 * (fa + 4 * fm + fb);
    return adaptive_simpson(f, a, b, fa, fm, fb, whole, tol, 48);
}

}  // namespace

// --- IIDResource -------------------------------------------------------------

IIDResource::IIDResource(DiscreteDistribution d) {
    if (d.values.size() != d.probs.size())
        throw std::invalid_argument("IIDResource: values/probs size mismatch");
    check_probability_vector(d.probs, "IIDResource probs");
    for (double v : d.values)
        if (v < 0.0 || v > 1.0)
            throw std::invalid_argument("IIDResource: state values must lie in [0,1]");
    discrete_ = std::move(d);
}

IIDResource::IIDResource(ContinuousDistribution c) {
    if (!c.quantile) throw std::invalid_argument("IIDResource: null quantile");
    continuous_ = std::move(c);
}

const DiscreteDistribution& IIDResource::law() const {
    if (!discrete_) throw std::logic_error("IIDResource: continuous law has no table");
    return *discrete_;
}

double IIDResource::sample(Rng& rng) const {
    if (discrete_) {
        int i = sample_discrete(discrete_->probs, rng);
        return discrete_->values[static_cast<std::size_t>(i)];
    }
    return continuous_->quantile(uniform01(rng));
}

double IIDResource::expectation(const std::function<double(double)>& f) const {
    if (discrete_) {
        double acc = 0;
        for (std::size_t i = 0; i < discrete_->values.size(); ++i)
            acc += discrete_->probs[i] * f(discrete_->values[i]);
        return acc;
    }
    return integrate01([&](double u) { return f(continuous_->quantile(u)); }, 1e-9);
}

// --- chain analysis ----------------------------------------------------------

bool is_row_stochastic(const Eigen::MatrixXd& P, double tol) {
    if (P.rows() != P.cols() || P.rows() == 0) return false;
    for (Eigen::Index i = 0; i < P.rows(); ++i) {
        double sum = 0;
        for (Eigen::Index j = 0; j < P.cols(); ++j) {
            if (P(i, j) < -tol) return false;
            sum += P(i, j);
        }
        if (std::abs(sum - 1.0) > tol) return false;
    }
    return true;
}

namespace {

// reachability over the positive-entry pattern
std::vector<bool> reachable_from(const Eigen::MatrixXd& P, int start) {
    int n = static_cast<int>(P.rows());
    std::vector<bool> seen(n, false);
    std::vector<int> stack{start};
    seen[static_cast<std::size_t>(start)] = true;
    while (!stack.empty()) {
        int u = stack.back();
        stack.pop_back();
        for (int v = 0; v < n; ++v)
            if (P(u, v) > 0 && !seen[static_cast<std::size_t>(v)]) {
                seen[static_cast<std::size_t>(v)] = true;
                stack.push_back(v);
            }
    }
    return seen;
}

}  // namespace

bool is_irreducible(const Eigen::MatrixXd& P) {
    int n = static_cast<int>(P.rows());
    for (int s = 0; s < n; ++s) {
        auto seen = reachable_from(P, s);
        for (bool b : seen)
            if (!b) return false;
    }
    return true;
}

bool is_aperiodic(const Eigen::MatrixXd& P) {
    // period = gcd over edges (u,v) of depth(u) + 1 - depth(v), depths from a BFS;
    // valid for irreducible chains, which is checked separately
    int n = static_cast<int>(P.rows());
    std::vector<int> depth(static_cast<std::size_t>(n), -1);
    std::vector<int> queue{0};
    depth[0] = 0;
    std::size_t head = 0;
    int g = 0;
    while (head < queue.size()) {
        int u = queue[head++];
        for (int v = 0; v < n; ++v) {
            if (P(u, v) <= 0) continue;
            if (depth[static_cast<std::size_t>(v)] < 0) {
                depth[static_cast<std::size_t>(v)] = depth[static_cast<std::size_t>(u)] + 1;
                queue.push_back(v);
            } else {
                g = std::gcd(g, std::abs(depth[static_cast<std::size_t>(u)] + 1 -
                                         depth[static_cast<std::size_t>(v)]));
            }
        }
    }
    return g == 1;
}

Eigen::VectorXd stationary_distribution(const Eigen::MatrixXd& P) {
    if (!is_row_stochastic(P)) throw std::invalid_argument("stationary_distribution: not row stochastic");
    if (!is_irreducible(P)) throw std::invalid_argument("stationary_distribution: chain is reducible");
    if (!is_aperiodic(P)) throw std::invalid_argument("stationary_distribution: chain is periodic");
    const Eigen::Index n = P.rows();
    // solve pi^T (P - I) = 0 with the last equation replaced by sum(pi) = 1
    Eigen::MatrixXd A = (P.transpose() - Eigen::MatrixXd::Identity(n, n));
    A.row(n - 1).setOnes();
    Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
    b(n - 1) = 1.0;
    Eigen::VectorXd pi = A.fullPivLu().solve(b);
    double residual = (pi.transpose() * P - pi.transpose()).cwiseAbs().maxCoeff();
    if (residual > 1e-10)
        throw std::runtime_error("stationary_distribution: solver residual exceeds 1e-10");
    for (Eigen::Index i = 0; i < n; ++i)
        if (pi(i) <= 0) throw std::runtime_error("stationary_distribution: nonpositive weight");
    return pi;
}

Eigen::MatrixXd multiplicative_symmetrization(const Eigen::MatrixXd& P, const Eigen::VectorXd& pi) {
    if (!is_row_stochastic(P)) throw std::invalid_argument("multiplicative_symmetrization: not row stochastic");
    if (pi.size() != P.rows()) throw std::invalid_argument("multiplicative_symmetrization: pi size mismatch");
    double residual = (pi.transpose() * P - pi.transpose()).cwiseAbs().maxCoeff();
    if (residual > 1e-9)
        throw std::invalid_argument("multiplicative_symmetrization: pi is not stationary for P");
    const Eigen::Index n = P.rows();
    Eigen::MatrixXd adjoint(n, n);
    for (Eigen::Index x = 0; x < n; ++x)
        for (Eigen::Index y = 0; y < n; ++y) adjoint(x, y) = pi(y) * P(y, x) / pi(x);
    Eigen::MatrixXd result = adjoint * P;
    for (Eigen::Index i = 0; i < n; ++i) {
        double sum = result.row(i).sum();
        if (std::abs(sum - 1.0) > 1e-12) result.row(i) /= sum;  // strip accumulated roundoff
    }
    return result;
}

double eigenvalue_gap(const Eigen::MatrixXd& P_dot) {
    if (!is_row_stochastic(P_dot)) throw std::invalid_argument("eigenvalue_gap: not row stochastic");
    if (P_dot.rows() < 2) throw std::invalid_argument("eigenvalue_gap: need at least two states");
    if (!is_irreducible(P_dot)) throw std::invalid_argument("eigenvalue_gap: chain is reducible");
    const Eigen::Index n = P_dot.rows();
    Eigen::VectorXd pi = stationary_distribution(P_dot);
    // D^{1/2} P D^{-1/2} is symmetric when P is self-adjoint on l2(pi)
    Eigen::MatrixXd S(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j)
            S(i, j) = std::sqrt(pi(i)) * P_dot(i, j) / std::sqrt(pi(j));
    if ((S - S.transpose()).cwiseAbs().maxCoeff() > 1e-8)
        throw std::invalid_argument("eigenvalue_gap: matrix is not self-adjoint on l2(pi)");
    S = 0.5 * (S + S.transpose().eval());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(S);
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("eigenvalue_gap: eigensolver failed");
    const auto& ev = solver.eigenvalues();  // ascending
    if (std::abs(ev(n - 1) - 1.0) > 1e-9)
        throw std::runtime_error("eigenvalue_gap: leading eigenvalue is not 1");
    return 1.0 - ev(n - 2);
}

double initial_divergence(const Eigen::VectorXd& q, const Eigen::VectorXd& pi) {
    if (q.size() != pi.size()) throw std::invalid_argument("initial_divergence: size mismatch");
    double acc = 0;
    for (Eigen::Index i = 0; i < q.size(); ++i) {
        if (pi(i) <= 0) throw std::invalid_argument("initial_divergence: nonpositive pi");
        acc += q(i) * q(i) / pi(i);
    }
    return std::sqrt(acc);
}

// --- MarkovResource ----------------------------------------------------------

MarkovResource::MarkovResource(Eigen::MatrixXd transition, std::vector<double> initial)
    : P_(std::move(transition)) {
    if (P_.rows() < 2) throw std::invalid_argument("MarkovResource: need at least two states");
    pi_ = stationary_distribution(P_);  // validates stochastic/irreducible/aperiodic
    if (initial.empty()) {
        q0_ = pi_;
    } else {
        if (static_cast<Eigen::Index>(initial.size()) != P_.rows())
            throw std::invalid_argument("MarkovResource: initial distribution size mismatch");
        check_probability_vector(initial, "MarkovResource initial");
        q0_ = Eigen::Map<Eigen::VectorXd>(initial.data(), static_cast<Eigen::Index>(initial.size()));
    }
}

int MarkovResource::initial_state(Rng& rng) const {
    std::vector<double> p(q0_.data(), q0_.data() + q0_.size());
    return sample_discrete(p, rng);
}

int MarkovResource::step(int state, Rng& rng) const {
    if (state < 0 || state >= num_states())
        throw std::invalid_argument("MarkovResource::step: state out of range");
    std::vector<double> row(num_states());
    for (int j = 0; j < num_states(); ++j) row[static_cast<std::size_t>(j)] = P_(state, j);
    return sample_discrete(row, rng);
}

Eigen::MatrixXd MarkovResource::symmetrization() const { return multiplicative_symmetrization(P_, pi_); }

double MarkovResource::gap() const { return eigenvalue_gap(symmetrization()); }

// --- mean rewards ------------------------------------------------------------

double mean_reward(const IIDResource& res, const std::function<double(double)>& reward_of_state) {
    return res.expectation(reward_of_state);
}

double mean_reward(const MarkovResource& res, const std::function<double(int)>& reward_of_state) {
    double acc = 0;
    for (int s = 0; s < res.num_states(); ++s) acc += res.stationary()(s) * reward_of_state(s);
    return acc;
}

double estimate_transient_constant(const MarkovResource& res,
                                   const std::function<double(int)>& reward_of_state,
                                   int horizon) {
    const int n = res.num_states();
    Eigen::VectorXd r(n);
    for (int s = 0; s < n; ++s) r(s) = reward_of_state(s);
    const double mu = res.stationary().dot(r);
    double worst = 0;
    for (int s0 = 0; s0 < n; ++s0) {
        Eigen::RowVectorXd q = Eigen::RowVectorXd::Zero(n);
        q(s0) = 1.0;
        double partial = 0;
        for (int t = 1; t <= horizon; ++t) {
            q = q * res.transition();
            partial += q.dot(r) - mu;
            worst = std::max(worst, std::abs(partial));
        }
    }
    return worst;
}

// --- rate scenario -----------------------------------------------------------

void OsaParams::validate() const {
    const std::size_t k = theta.size();
    if (k == 0) throw std::invalid_argument("OsaParams: no channels");
    if (h_hat.size() != k || h_tilde.size() != k || power.size() != k)
        throw std::invalid_argument("OsaParams: per-channel vectors must have equal length");
    for (double t : theta)
        if (t <= 0 || t > 1) throw std::invalid_argument("OsaParams: theta outside (0,1]");
    for (double h : h_hat)
        if (h < 0) throw std::invalid_argument("OsaParams: negative gain");
    for (double h : h_tilde)
        if (h < 0) throw std::invalid_argument("OsaParams: negative interference gain");
    for (double p : power)
        if (p <= 0) throw std::invalid_argument("OsaParams: nonpositive power");
    if (noise <= 0) throw std::invalid_argument("OsaParams: nonpositive noise");
    if (gain <= 0) throw std::invalid_argument("OsaParams: nonpositive gain");
}

double osa_rate(const OsaParams& p, int k, int n) {
    p.validate();
    if (k < 0 || k >= p.channels()) throw std::invalid_argument("osa_rate: channel out of range");
    if (n < 1) throw std::invalid_argument("osa_rate: need at least one user");
    const auto ku = static_cast<std::size_t>(k);
    double sinr = p.gain * p.h_hat[ku] * p.power[ku] / (p.noise + (n - 1) * p.h_tilde[ku] * p.power[ku]);
    return std::log(1.0 + sinr);
}

double osa_rate_ceiling(const OsaParams& p) {
    double best = 0;
    for (int k = 0; k < p.channels(); ++k) best = std::max(best, osa_rate(p, k, 1));
    return best;
}

}  // namespace reshare
