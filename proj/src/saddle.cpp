#include "saddle.hpp"

#include <stdexcept>

namespace mdprl {

VectorXd advantage(const TabularMdp& mdp, const VectorXd& v) {
    if (v.size() != mdp.num_states)
        throw std::invalid_argument("advantage: dimension mismatch");
    const double inv = 1.0 / (1.0 - mdp.gamma);
    VectorXd pv = mdp.transition * v;  // S*A
    VectorXd a(mdp.num_pairs());
    for (int s = 0; s < mdp.num_states; ++s)
        for (int act = 0; act < mdp.num_actions; ++act) {
            const int i = mdp.index(s, act);
            a(i) = mdp.reward(i) + inv * (mdp.gamma * pv(i) - v(s));
        }
    return a;
}

VectorXd balance(const TabularMdp& mdp, const VectorXd& mu) {
    if (mu.size() != mdp.num_pairs())
        throw std::invalid_argument("balance: dimension mismatch");
    const double inv = 1.0 / (1.0 - mdp.gamma);
    VectorXd b = mdp.initial + inv * mdp.gamma * (mdp.transition.transpose() * mu);
    for (int s = 0; s < mdp.num_states; ++s) {
        double mass = 0.0;
        for (int a = 0; a < mdp.num_actions; ++a) mass += mu(mdp.index(s, a));
        b(s) -= inv * mass;
    }
    return b;
}

double lagrangian(const TabularMdp& mdp, const PrimalDualPoint& x) {
    return mdp.initial.dot(x.v) + x.mu.dot(advantage(mdp, x.v));
}

double bifunction(const TabularMdp& mdp, const PrimalDualPoint& x,
                  const PrimalDualPoint& x2) {
    const PrimalDualPoint cross1{x2.v, x.mu};
    const PrimalDualPoint cross2{x.v, x2.mu};
    return lagrangian(mdp, cross1) - lagrangian(mdp, cross2);
}

double per_round_loss(const TabularMdp& mdp, const PrimalDualPoint& x,
                      const PrimalDualPoint& x_n) {
    return bifunction(mdp, x_n, x);
}

double shifted_loss(const TabularMdp& mdp, const PrimalDualPoint& x,
                    const PrimalDualPoint& x_n) {
    auto [g_v, g_mu] = shifted_loss_gradient(mdp, x_n);
    return g_v.dot(x.v) + g_mu.dot(x.mu);
}

std::pair<VectorXd, VectorXd> shifted_loss_gradient(const TabularMdp& mdp,
                                                    const PrimalDualPoint& x_n) {
    const double kappa = 1.0 / (1.0 - mdp.gamma);
    VectorXd g_v = balance(mdp, x_n.mu);
    VectorXd g_mu = (kappa * VectorXd::Ones(mdp.num_pairs()) - advantage(mdp, x_n.v));
    return {std::move(g_v), std::move(g_mu)};
}

Policy policy_from_occupancy(const TabularMdp& mdp, const VectorXd& mu) {
    Policy pi;
    pi.probs.resize(mdp.num_states, mdp.num_actions);
    const double uniform = 1.0 / mdp.num_actions;
    for (int s = 0; s < mdp.num_states; ++s) {
        double mass = 0.0;
        for (int a = 0; a < mdp.num_actions; ++a) mass += mu(mdp.index(s, a));
        if (mass < 1e-12) {
            for (int a = 0; a < mdp.num_actions; ++a) pi.probs(s, a) = uniform;
        } else {
            for (int a = 0; a < mdp.num_actions; ++a)
                pi.probs(s, a) = mu(mdp.index(s, a)) / mass;
        }
    }
    return pi;
}

double relative_residual(const TabularMdp& mdp, const PrimalDualPoint& x,
                         const PrimalDualPoint& x2) {
    return -bifunction(mdp, x, x2);
}

GapCertificate gap_certificate(const TabularMdp& mdp, const PrimalDualPoint& x) {
    auto [v_star, pi_star] = optimal_value_and_policy(mdp, 1e-12);
    VectorXd mu_star = occupancy_of_policy(mdp, pi_star);
    Policy pi_mu = policy_from_occupancy(mdp, x.mu);
    VectorXd v_pi_mu = value_of_policy(mdp, pi_mu);

    GapCertificate cert;
    cert.gap = mdp.initial.dot(v_star - v_pi_mu);
    const PrimalDualPoint clever{v_pi_mu, mu_star};
    cert.residual_at_clever_comparator = relative_residual(mdp, x, clever);
    cert.mismatch = std::abs(cert.gap - cert.residual_at_clever_comparator);
    return cert;
}

ClassicResidualCheck classic_residual_check(const TabularMdp& mdp,
                                            const PrimalDualPoint& x) {
    ClassicResidualCheck out;
    // Feasibility condition E^T mu >= (1-gamma) p.
    for (int s = 0; s < mdp.num_states; ++s) {
        double mass = 0.0;
        for (int a = 0; a < mdp.num_actions; ++a) mass += x.mu(mdp.index(s, a));
        if (mass < (1.0 - mdp.gamma) * mdp.initial(s) - 1e-12) return out;
    }
    out.applicable = true;

    auto [v_star, pi_star] = optimal_value_and_policy(mdp, 1e-12);
    VectorXd mu_star = occupancy_of_policy(mdp, pi_star);
    Policy pi_mu = policy_from_occupancy(mdp, x.mu);
    VectorXd v_pi_mu = value_of_policy(mdp, pi_mu);

    const PrimalDualPoint x_star{v_star, mu_star};
    out.lhs = relative_residual(mdp, x, x_star);
    out.rhs = (1.0 - mdp.gamma) * mdp.initial.minCoeff() *
              (v_star - v_pi_mu).lpNorm<Eigen::Infinity>();
    return out;
}

double approximation_bias_bound(const TabularMdp& mdp, const PrimalDualPoint& x_hat,
                                const std::vector<PrimalDualPoint>& candidates) {
    if (candidates.empty())
        throw std::invalid_argument("approximation_bias_bound: empty candidate list");
    auto [v_star, pi_star] = optimal_value_and_policy(mdp, 1e-12);
    VectorXd mu_star = occupancy_of_policy(mdp, pi_star);
    Policy pi_hat = policy_from_occupancy(mdp, x_hat.mu);
    VectorXd v_pi_hat = value_of_policy(mdp, pi_hat);

    const double inv = 1.0 / (1.0 - mdp.gamma);
    double best = std::numeric_limits<double>::infinity();
    for (const auto& c : candidates) {
        const double bound = inv * (c.mu - mu_star).lpNorm<1>() +
                             2.0 * inv * (c.v - v_pi_hat).lpNorm<Eigen::Infinity>();
        best = std::min(best, bound);
    }
    return best;
}

double approximation_bias_exact(const TabularMdp& mdp, const PrimalDualPoint& x_hat,
                                const std::vector<PrimalDualPoint>& candidates) {
    if (candidates.empty())
        throw std::invalid_argument("approximation_bias_exact: empty candidate list");
    auto [v_star, pi_star] = optimal_value_and_policy(mdp, 1e-12);
    VectorXd mu_star = occupancy_of_policy(mdp, pi_star);
    Policy pi_hat = policy_from_occupancy(mdp, x_hat.mu);
    VectorXd v_pi_hat = value_of_policy(mdp, pi_hat);

    const PrimalDualPoint y_star{v_pi_hat, mu_star};
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& c : candidates)
        best = std::max(best, relative_residual(mdp, x_hat, c));
    return relative_residual(mdp, x_hat, y_star) - best;
}

}  // namespace mdprl
