#pragma once

#include "mdp.hpp"

namespace mdprl {

// A pair x = (v, mu) with v in V = {v >= 0, ||v||_inf <= 1} and mu on the
// simplex over state-action pairs.
struct PrimalDualPoint {
    VectorXd v;   // length S
    VectorXd mu;  // length S*A
};

// a_v = r + (gamma P - E) v / (1 - gamma). ||a_v||_inf <= 1/(1-gamma) on V.
VectorXd advantage(const TabularMdp& mdp, const VectorXd& v);

// b_mu = p + (gamma P - E)^T mu / (1 - gamma). Vanishes exactly on occupancy
// measures of policies; ||b_mu||_1 <= 2/(1-gamma) on M.
VectorXd balance(const TabularMdp& mdp, const VectorXd& mu);

// L(v, mu) = p^T v + mu^T a_v.
double lagrangian(const TabularMdp& mdp, const PrimalDualPoint& x);

// F(x, x') = L(v', mu) - L(v, mu'); skew-symmetric with F(x, x) = 0.
double bifunction(const TabularMdp& mdp, const PrimalDualPoint& x,
                  const PrimalDualPoint& x2);

// l_n(x) = F(x_n, x).
double per_round_loss(const TabularMdp& mdp, const PrimalDualPoint& x,
                      const PrimalDualPoint& x_n);

// h_n(x) = b_{mu_n}^T v + mu^T (kappa 1 - a_{v_n}), kappa = 1/(1-gamma).
// Differs from l_n by a constant on ||mu||_1 = const slices, and its
// mu-gradient is entrywise nonnegative.
double shifted_loss(const TabularMdp& mdp, const PrimalDualPoint& x,
                    const PrimalDualPoint& x_n);

// Exact gradient pair (b_{mu_n}, kappa 1 - a_{v_n}).
std::pair<VectorXd, VectorXd> shifted_loss_gradient(const TabularMdp& mdp,
                                                    const PrimalDualPoint& x_n);

// pi_mu(a|s) proportional to mu(s,a); zero-mass states get a uniform row.
Policy policy_from_occupancy(const TabularMdp& mdp, const VectorXd& mu);

// r_ep(x; x') = -F(x, x').
double relative_residual(const TabularMdp& mdp, const PrimalDualPoint& x,
                         const PrimalDualPoint& x2);

// Certificate that the residual at the comparator y_x* = (v^{pi_mu}, mu*)
// equals the policy performance gap V*(p) - V^{pi_mu}(p).
struct GapCertificate {
    double gap = 0.0;
    double residual_at_clever_comparator = 0.0;
    double mismatch = 0.0;
};
GapCertificate gap_certificate(const TabularMdp& mdp, const PrimalDualPoint& x);

// r_ep(x; x*) >= (1-gamma) min_s p(s) ||v* - v^{pi_mu}||_inf whenever
// E^T mu >= (1-gamma) p.
struct ClassicResidualCheck {
    bool applicable = false;
    double lhs = 0.0;
    double rhs = 0.0;
};
ClassicResidualCheck classic_residual_check(const TabularMdp& mdp,
                                            const PrimalDualPoint& x);

// Upper bound on the approximation bias: min over candidates of
// ||mu_c - mu*||_1 / (1-gamma) + 2 ||v_c - v^{pi_hat}||_inf / (1-gamma).
double approximation_bias_bound(const TabularMdp& mdp, const PrimalDualPoint& x_hat,
                                const std::vector<PrimalDualPoint>& candidates);

// Exact bias: r_ep(x_hat; y*) - max over candidates of r_ep(x_hat; x_c).
double approximation_bias_exact(const TabularMdp& mdp, const PrimalDualPoint& x_hat,
                                const std::vector<PrimalDualPoint>& candidates);

}  // namespace mdprl
