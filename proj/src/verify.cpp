#include "verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace mdprl {

namespace {

VectorXd random_unit_box(int n, RandomSequence& rng) {
    VectorXd v(n);
    for (int i = 0; i < n; ++i) v(i) = rng.next();
    return v;
}

VectorXd random_simplex(int n, RandomSequence& rng) {
    VectorXd w(n);
    for (int i = 0; i < n; ++i) w(i) = -std::log(1.0 - rng.next());
    return w / w.sum();
}

Policy random_policy(int num_states, int num_actions, RandomSequence& rng) {
    Policy pi;
    pi.probs.resize(num_states, num_actions);
    for (int s = 0; s < num_states; ++s)
        pi.probs.row(s) = random_simplex(num_actions, rng).transpose();
    return pi;
}

struct Accumulator {
    double max_dev = 0.0;
    void fold(double d) { max_dev = std::max(max_dev, std::abs(d)); }
    void fold_excess(double d) { max_dev = std::max(max_dev, d); }
};

CheckResult make_check(const std::string& name, double dev, double tol,
                       const std::string& detail = "") {
    return {name, dev, tol, dev <= tol, detail};
}

// All identity accumulators for one MDP; folded across instances by the
// standard suite.
struct IdentityDevs {
    Accumulator perf_diff, residual, residual_shifted, clever, skew, norm_a,
        norm_b, rough;
};

void fold_identities(const TabularMdp& mdp, int num_points, RandomSequence& rng,
                     IdentityDevs& acc) {
    const int S = mdp.num_states;
    const int SA = mdp.num_pairs();
    const double kappa = 1.0 / (1.0 - mdp.gamma);

    for (int t = 0; t < num_points; ++t) {
        const PrimalDualPoint x{random_unit_box(S, rng), random_simplex(SA, rng)};

        // Performance difference: p^T (v^pi - v') = (mu^pi)^T a_{v'}.
        Policy pi = random_policy(S, mdp.num_actions, rng);
        VectorXd v_pi = value_of_policy(mdp, pi);
        VectorXd mu_pi = occupancy_of_policy(mdp, pi);
        acc.perf_diff.fold(mdp.initial.dot(v_pi - x.v) -
                           mu_pi.dot(advantage(mdp, x.v)));

        // Residual against an exact comparator x' = (v^{pi'}, mu^{pi'}):
        // r_ep(x; x') = -mu^T a_{v^{pi'}}.
        Policy pi2 = random_policy(S, mdp.num_actions, rng);
        VectorXd v_pi2 = value_of_policy(mdp, pi2);
        VectorXd mu_pi2 = occupancy_of_policy(mdp, pi2);
        const double a_term = x.mu.dot(advantage(mdp, v_pi2));
        acc.residual.fold(relative_residual(mdp, x, {v_pi2, mu_pi2}) + a_term);

        // Shifted comparator v' = v^{pi'} + u': extra -b_mu^T u' term.
        VectorXd u = random_unit_box(S, rng) * 0.5;
        acc.residual_shifted.fold(
            relative_residual(mdp, x, {v_pi2 + u, mu_pi2}) + a_term +
            balance(mdp, x.mu).dot(u));

        // Clever comparator equals the policy performance gap.
        acc.clever.fold(gap_certificate(mdp, x).mismatch);

        // Skew-symmetry of the bifunction.
        const PrimalDualPoint x2{random_unit_box(S, rng), random_simplex(SA, rng)};
        acc.skew.fold(bifunction(mdp, x, x2) + bifunction(mdp, x2, x));
        acc.skew.fold(bifunction(mdp, x, x));

        // Norm bounds on the loss gradients.
        acc.norm_a.fold_excess(
            advantage(mdp, x.v).lpNorm<Eigen::Infinity>() - kappa);
        acc.norm_b.fold_excess(balance(mdp, x.mu).lpNorm<1>() - 2.0 * kappa);

        // Rough lower bound on feasible points (policy occupancies satisfy
        // E^T mu >= (1-gamma) p).
        const ClassicResidualCheck classic =
            classic_residual_check(mdp, {x.v, mu_pi});
        if (classic.applicable) acc.rough.fold_excess(classic.rhs - classic.lhs);
    }
}

std::vector<CheckResult> identity_checks(const IdentityDevs& acc, double tol) {
    return {
        make_check("performance-difference identity", acc.perf_diff.max_dev, tol),
        make_check("residual identity (exact comparator)", acc.residual.max_dev, tol),
        make_check("residual identity (shifted comparator)",
                   acc.residual_shifted.max_dev, tol),
        make_check("clever-comparator gap identity", acc.clever.max_dev, tol),
        make_check("bifunction skew-symmetry", acc.skew.max_dev, tol),
        make_check("advantage sup-norm bound", acc.norm_a.max_dev, tol),
        make_check("balance l1-norm bound", acc.norm_b.max_dev, tol),
        make_check("rough residual lower bound", acc.rough.max_dev, tol),
    };
}

}  // namespace

bool VerifyReport::all_pass() const {
    return std::all_of(checks.begin(), checks.end(),
                       [](const CheckResult& c) { return c.pass; });
}

std::string VerifyReport::to_text() const {
    std::ostringstream os;
    for (const auto& c : checks) {
        os << c.name << ": " << (c.pass ? "pass" : "FAIL")
           << "  max_dev=" << c.max_deviation << "  tol=" << c.tolerance;
        if (!c.detail.empty()) os << "  (" << c.detail << ")";
        os << '\n';
    }
    return os.str();
}

VerifyReport verify_mdp(const TabularMdp& mdp, double tol, int num_points,
                        std::uint64_t seed) {
    RandomSequence rng{RandomStream(seed).split(1)};
    IdentityDevs acc;
    fold_identities(mdp, num_points, rng, acc);
    return {identity_checks(acc, tol)};
}

VerifyReport verify_counterexample(double gamma, double tol) {
    const CounterexampleArtifacts art = gen_counterexample(gamma);
    const TabularMdp& mdp = art.mdp;
    VerifyReport rep;

    auto [v_star, pi_star] = optimal_value_and_policy(mdp, 1e-13);
    rep.checks.push_back(make_check(
        "counterexample v* = [1, 1, 1]",
        (v_star - VectorXd::Ones(3)).lpNorm<Eigen::Infinity>(), tol));

    Policy pi_mu = policy_from_occupancy(mdp, art.adversarial_point.mu);
    VectorXd v_pi_mu = value_of_policy(mdp, pi_mu);
    VectorXd expected(3);
    expected << 1.0 - gamma, 0.0, 1.0;
    rep.checks.push_back(make_check(
        "counterexample v^{pi_mu} = [1-gamma, 0, 1]",
        (v_pi_mu - expected).lpNorm<Eigen::Infinity>(), tol));

    // Stay at the middle state: a_{v*} = r - 1 = -1.
    rep.checks.push_back(
        make_check("counterexample stay advantage = -1",
                   std::abs(advantage(mdp, v_star)(mdp.index(1, 2)) + 1.0), tol));

    const ClassicResidualCheck classic =
        classic_residual_check(mdp, art.adversarial_point);
    std::ostringstream detail;
    detail << "lhs=" << classic.lhs << " rhs=" << classic.rhs
           << " expected=" << art.expected_residual;
    const double dev =
        classic.applicable
            ? std::max(std::abs(classic.lhs - classic.rhs),
                       std::abs(classic.lhs - art.expected_residual))
            : std::numeric_limits<double>::infinity();
    rep.checks.push_back(make_check("counterexample classic bound equality", dev,
                                    tol, detail.str()));
    return rep;
}

VerifyReport verify_standard(double tol, int num_mdps, std::uint64_t seed) {
    const double gammas[] = {0.5, 0.9, 0.99};
    RandomSequence rng{RandomStream(seed).split(2)};
    IdentityDevs acc;
    for (int i = 0; i < num_mdps; ++i) {
        const int S = 2 + static_cast<int>(rng.next() * 7);   // 2..8
        const int A = 2 + static_cast<int>(rng.next() * 3);   // 2..4
        const int branching = 1 + static_cast<int>(rng.next() * S);
        const double gamma = gammas[i % 3];
        const TabularMdp mdp =
            gen_random_mdp(S, A, std::min(branching, S), seed * 1000003 + i, gamma);
        fold_identities(mdp, 3, rng, acc);
    }
    VerifyReport rep{identity_checks(acc, tol)};
    for (auto& c : verify_counterexample(0.9, std::min(tol, 1e-10)).checks)
        rep.checks.push_back(std::move(c));
    return rep;
}

}  // namespace mdprl
