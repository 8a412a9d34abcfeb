#pragma once

#include "solver.hpp"

namespace mdprl {

// Linear bases: phi columns are bounded value features, psi columns are
// state-action distributions that can be sampled.
struct FeatureBasis {
    MatrixXd phi;      // S x d_v, per-column inf-norm <= 1
    MatrixXd psi;      // (S*A) x d_mu, per-column probability vectors
    MatrixXd psi_cdf;  // column-wise cumulative sums; filled by finalize()

    int d_v() const { return static_cast<int>(phi.cols()); }
    int d_mu() const { return static_cast<int>(psi.cols()); }

    void finalize();
};

struct ThetaPoint {
    VectorXd theta_v;   // ||theta_v||_2 <= c_v / sqrt(d_v)
    VectorXd theta_mu;  // simplex over columns of psi
};

struct FeatureConfig {
    double c_v = 1.0;
    long long steps = 1000;
    double eta = 0.0;
    bool eta_auto = true;  // eta = (1-gamma) / sqrt(N (c_v^2 + d_mu))
    std::uint64_t seed = 0;
    std::vector<long long> checkpoints;
    bool eval_with_oracle = true;
};

// Dense v-block, single-entry mu-block over basis columns.
struct FeatureGradient {
    VectorXd v_block;  // length d_v
    int mu_index = 0;
    double mu_weight = 0.0;
};

std::vector<std::string> validate_basis(const FeatureBasis& basis);

// (Phi theta_v, Psi theta_mu). The mu part lands on the simplex exactly up
// to rounding; the v part is bounded by c_v but need not lie in V.
PrimalDualPoint realize(const FeatureBasis& basis, const ThetaPoint& theta);

// Lazy v(s) = phi.row(s) . theta_v.
double value_feature_eval(const FeatureBasis& basis, const VectorXd& theta_v, int s);

double auto_step_size_features(const TabularMdp& mdp, const FeatureBasis& basis,
                               double c_v, long long steps);

// Parameter-space estimator. Uses the same slotted counters as the tabular
// estimator; with a tabular basis and a shared stream the mu-block draw
// (column index, weight) matches the tabular (pair index, weight) exactly.
FeatureGradient sample_gradient_theta(const TabularMdp& mdp, const FeatureBasis& basis,
                                      const ThetaPoint& theta_n,
                                      const RandomStream& stream, std::uint64_t round);

// Bregman step under (d_v/(2 c_v^2)) ||d theta_v||^2 + KL(theta_mu'||theta_mu):
// Euclidean step with rate eta*c_v^2/d_v, radial projection onto the l2 ball,
// exponentiated gradient on theta_mu.
ThetaPoint md_update_theta(const ThetaPoint& theta, const FeatureGradient& g,
                           double eta, double c_v);

RunMetrics run_features(const TabularMdp& mdp, const FeatureBasis& basis,
                        const FeatureConfig& cfg);

// Policy row pi(.|s) proportional to sum_k theta_mu(k) psi[(s,.),k], without
// materializing the full occupancy vector.
VectorXd policy_row_from_theta(const TabularMdp& mdp, const FeatureBasis& basis,
                               const VectorXd& theta_mu, int s);

// Phi = I_S, Psi = I_{S*A} (delta distributions).
FeatureBasis tabular_basis(int num_states, int num_actions);

// k state blocks; phi columns are block indicators, psi columns are uniform
// distributions over (block, action) cells. d_v = k, d_mu = k * A.
FeatureBasis state_aggregation_basis(int num_states, int num_actions, int k);

}  // namespace mdprl
