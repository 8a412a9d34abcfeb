#include "mdp.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace mdprl {

namespace {
constexpr double kRowSumTol = 1e-12;
constexpr int kDenseSolveLimit = 2000;
}  // namespace

void TabularMdp::finalize() {
    const int sa = num_pairs();
    transition_cdf.resize(sa, num_states);
    for (int i = 0; i < sa; ++i) {
        // transition is column-major, so copy the row into contiguous storage
        // before accumulating.
        Eigen::RowVectorXd row = transition.row(i);
        cumulative_row(row.data(), num_states, transition_cdf.row(i).data());
    }
    initial_cdf.resize(num_states);
    cumulative_row(initial.data(), num_states, initial_cdf.data());
}

Policy Policy::deterministic(int num_states, int num_actions,
                             const std::vector<int>& actions) {
    Policy pi;
    pi.probs = MatrixXd::Zero(num_states, num_actions);
    for (int s = 0; s < num_states; ++s) pi.probs(s, actions.at(s)) = 1.0;
    return pi;
}

std::vector<std::string> validate(const TabularMdp& mdp) {
    std::vector<std::string> out;
    auto report = [&out](const std::string& msg) { out.push_back(msg); };
    std::ostringstream ss;

    if (mdp.num_states < 1) report("num_states must be positive");
    if (mdp.num_actions < 1) report("num_actions must be positive");
    if (mdp.gamma < 0.0 || mdp.gamma >= 1.0) report("gamma must lie in [0,1)");
    if (!out.empty()) return out;

    const int sa = mdp.num_pairs();
    if (mdp.transition.rows() != sa || mdp.transition.cols() != mdp.num_states)
        report("transition must have shape (S*A) x S");
    if (mdp.reward.size() != sa) report("reward must have length S*A");
    if (mdp.initial.size() != mdp.num_states) report("initial must have length S");
    if (!out.empty()) return out;

    for (int i = 0; i < sa; ++i) {
        double sum = 0.0;
        for (int j = 0; j < mdp.num_states; ++j) {
            const double p = mdp.transition(i, j);
            if (p < 0.0) {
                ss.str("");
                ss << "transition row " << i << " entry " << j << " is negative";
                report(ss.str());
            }
            sum += p;
        }
        if (std::abs(sum - 1.0) > kRowSumTol) {
            ss.str("");
            ss << "transition row " << i << " sums to " << sum;
            report(ss.str());
        }
    }
    for (int i = 0; i < sa; ++i) {
        if (mdp.reward(i) < 0.0 || mdp.reward(i) > 1.0) {
            ss.str("");
            ss << "reward entry " << i << " = " << mdp.reward(i) << " outside [0,1]";
            report(ss.str());
        }
    }
    double psum = 0.0;
    for (int s = 0; s < mdp.num_states; ++s) {
        if (mdp.initial(s) < 0.0) {
            ss.str("");
            ss << "initial entry " << s << " is negative";
            report(ss.str());
        }
        psum += mdp.initial(s);
    }
    if (std::abs(psum - 1.0) > kRowSumTol) {
        ss.str("");
        ss << "initial sums to " << psum;
        report(ss.str());
    }
    return out;
}

std::vector<std::string> validate_policy(const TabularMdp& mdp, const Policy& pi) {
    std::vector<std::string> out;
    std::ostringstream ss;
    if (pi.probs.rows() != mdp.num_states || pi.probs.cols() != mdp.num_actions) {
        out.push_back("policy must have shape S x A");
        return out;
    }
    for (int s = 0; s < mdp.num_states; ++s) {
        double sum = 0.0;
        for (int a = 0; a < mdp.num_actions; ++a) {
            if (pi.probs(s, a) < 0.0) {
                ss.str("");
                ss << "policy row " << s << " entry " << a << " is negative";
                out.push_back(ss.str());
            }
            sum += pi.probs(s, a);
        }
        if (std::abs(sum - 1.0) > kRowSumTol) {
            ss.str("");
            ss << "policy row " << s << " sums to " << sum;
            out.push_back(ss.str());
        }
    }
    return out;
}

std::pair<MatrixXd, VectorXd> policy_matrices(const TabularMdp& mdp, const Policy& pi) {
    if (pi.probs.rows() != mdp.num_states || pi.probs.cols() != mdp.num_actions)
        throw std::invalid_argument("policy_matrices: shape mismatch");
    MatrixXd p_pi = MatrixXd::Zero(mdp.num_states, mdp.num_states);
    VectorXd r_pi = VectorXd::Zero(mdp.num_states);
    for (int s = 0; s < mdp.num_states; ++s) {
        for (int a = 0; a < mdp.num_actions; ++a) {
            const double w = pi.probs(s, a);
            if (w == 0.0) continue;
            p_pi.row(s) += w * mdp.transition.row(mdp.index(s, a));
            r_pi(s) += w * mdp.reward(mdp.index(s, a));
        }
    }
    return {p_pi, r_pi};
}

namespace {

// Solves (I - gamma * M) x = b. Direct LU for small systems, fixed-point
// iteration above kDenseSolveLimit (the system is a gamma-contraction).
VectorXd discounted_solve(const MatrixXd& m, const VectorXd& b, double gamma) {
    const int n = static_cast<int>(b.size());
    if (n <= kDenseSolveLimit) {
        MatrixXd sys = MatrixXd::Identity(n, n) - gamma * m;
        return sys.partialPivLu().solve(b);
    }
    VectorXd x = VectorXd::Zero(n);
    for (int it = 0; it < 100000; ++it) {
        VectorXd next = b + gamma * (m * x);
        const double delta = (next - x).lpNorm<Eigen::Infinity>();
        x = std::move(next);
        if (delta * gamma / (1.0 - gamma) <= 1e-12) break;
    }
    return x;
}

}  // namespace

VectorXd value_of_policy(const TabularMdp& mdp, const Policy& pi) {
    auto [p_pi, r_pi] = policy_matrices(mdp, pi);
    VectorXd v = discounted_solve(p_pi, (1.0 - mdp.gamma) * r_pi, mdp.gamma);
    const double resid =
        (v - (1.0 - mdp.gamma) * r_pi - mdp.gamma * (p_pi * v)).lpNorm<Eigen::Infinity>();
    if (!(resid <= 1e-10) || !v.allFinite())
        throw std::runtime_error("value_of_policy: linear solve failed");
    return v;
}

std::pair<VectorXd, Policy> optimal_value_and_policy(const TabularMdp& mdp, double tol) {
    if (!(tol > 0.0)) throw std::invalid_argument("optimal_value_and_policy: tol must be > 0");
    const int S = mdp.num_states;
    const int A = mdp.num_actions;
    VectorXd v = VectorXd::Zero(S);
    VectorXd tv(S);
    for (int it = 0; it < 10000000; ++it) {
        VectorXd pv = mdp.transition * v;  // (S*A)
        for (int s = 0; s < S; ++s) {
            double best = -1.0;
            for (int a = 0; a < A; ++a) {
                const int i = mdp.index(s, a);
                const double q = (1.0 - mdp.gamma) * mdp.reward(i) + mdp.gamma * pv(i);
                if (q > best) best = q;
            }
            tv(s) = best;
        }
        const double resid = (tv - v).lpNorm<Eigen::Infinity>();
        v = tv;
        if (resid * mdp.gamma / std::max(1e-300, 1.0 - mdp.gamma) <= tol || resid == 0.0)
            break;
    }
    // Greedy extraction, lowest action index on ties.
    VectorXd pv = mdp.transition * v;
    std::vector<int> greedy(S, 0);
    for (int s = 0; s < S; ++s) {
        double best = -1.0;
        for (int a = 0; a < A; ++a) {
            const int i = mdp.index(s, a);
            const double q = (1.0 - mdp.gamma) * mdp.reward(i) + mdp.gamma * pv(i);
            if (q > best + 1e-13) {
                best = q;
                greedy[s] = a;
            }
        }
    }
    return {v, Policy::deterministic(S, A, greedy)};
}

VectorXd stationary_state_distribution(const TabularMdp& mdp, const Policy& pi) {
    auto [p_pi, r_pi] = policy_matrices(mdp, pi);
    (void)r_pi;
    VectorXd d = discounted_solve(p_pi.transpose(), (1.0 - mdp.gamma) * mdp.initial,
                                  mdp.gamma);
    if (!d.allFinite() || std::abs(d.sum() - 1.0) > 1e-10)
        throw std::runtime_error("stationary_state_distribution: solve failed");
    // Clamp the tiny negatives a factorization can produce.
    for (int s = 0; s < mdp.num_states; ++s)
        if (d(s) < 0.0 && d(s) > -1e-12) d(s) = 0.0;
    return d;
}

VectorXd occupancy_of_policy(const TabularMdp& mdp, const Policy& pi) {
    VectorXd d = stationary_state_distribution(mdp, pi);
    VectorXd mu(mdp.num_pairs());
    for (int s = 0; s < mdp.num_states; ++s)
        for (int a = 0; a < mdp.num_actions; ++a)
            mu(mdp.index(s, a)) = d(s) * pi.probs(s, a);
    return mu;
}

void cumulative_row(const double* probs, int n, double* cdf) {
    double acc = 0.0;
    for (int j = 0; j < n; ++j) {
        acc += probs[j];
        cdf[j] = acc;
    }
    cdf[n - 1] = 1.0;  // close the row against rounding
}

int categorical_from_cdf(const double* cdf, int n, double u) {
    int lo = 0, hi = n - 1;
    while (lo < hi) {
        const int mid = (lo + hi) / 2;
        if (u < cdf[mid])
            hi = mid;
        else
            lo = mid + 1;
    }
    return lo;
}

int sample_initial(const TabularMdp& mdp, RandomSequence& rng) {
    return categorical_from_cdf(mdp.initial_cdf.data(), mdp.num_states, rng.next());
}

TransitionSample sample_transition(const TabularMdp& mdp, int s, int a,
                                   RandomSequence& rng) {
    if (s < 0 || s >= mdp.num_states || a < 0 || a >= mdp.num_actions)
        throw std::out_of_range("sample_transition: index out of range");
    const int i = mdp.index(s, a);
    TransitionSample t;
    t.state = s;
    t.action = a;
    t.next_state =
        categorical_from_cdf(mdp.transition_cdf.row(i).data(), mdp.num_states, rng.next());
    t.reward_value = mdp.reward(i);
    return t;
}

std::pair<VectorXd, Policy> brute_force_optimal(const TabularMdp& mdp) {
    const int S = mdp.num_states;
    const int A = mdp.num_actions;
    double count = std::pow(static_cast<double>(A), S);
    if (count > 1e6)
        throw std::invalid_argument("brute_force_optimal: A^S exceeds 10^6");

    std::vector<int> actions(S, 0);
    std::vector<int> best_actions = actions;
    double best_obj = -1.0;
    VectorXd best_v;
    while (true) {
        Policy pi = Policy::deterministic(S, A, actions);
        VectorXd v = value_of_policy(mdp, pi);
        const double obj = mdp.initial.dot(v);
        // Strict improvement keeps the lexicographically smallest maximizer,
        // since enumeration runs in lexicographic order.
        if (obj > best_obj) {
            best_obj = obj;
            best_actions = actions;
            best_v = v;
        }
        int pos = S - 1;
        while (pos >= 0 && actions[pos] == A - 1) actions[pos--] = 0;
        if (pos < 0) break;
        ++actions[pos];
    }
    return {best_v, Policy::deterministic(S, A, best_actions)};
}

}  // namespace mdprl
