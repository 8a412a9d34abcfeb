#pragma once

#include <Eigen/Dense>
#include <string>
#include <utility>
#include <vector>

#include "rng.hpp"

namespace mdprl {

using Eigen::MatrixXd;
using Eigen::VectorXd;
// Cumulative sampling tables are read row-by-row through raw pointers, so
// they need contiguous rows.
using RowMajorMatrixXd =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Finite gamma-discounted MDP with deterministic rewards in [0,1].
// State-action pairs use the flat index s * num_actions + a, so the S*A
// coordinates are contiguous in actions.
struct TabularMdp {
    int num_states = 0;
    int num_actions = 0;
    MatrixXd transition;  // (S*A) x S, row index(s,a) holds P(.|s,a)
    VectorXd reward;      // S*A
    VectorXd initial;     // S
    double gamma = 0.0;

    // Cumulative rows for inverse-CDF sampling; filled by finalize().
    RowMajorMatrixXd transition_cdf;
    VectorXd initial_cdf;

    int index(int s, int a) const { return s * num_actions + a; }
    int num_pairs() const { return num_states * num_actions; }

    // Precomputes the sampling tables. Call after the fields are set.
    void finalize();
};

// Row-stochastic conditional distribution pi(a|s).
struct Policy {
    MatrixXd probs;  // S x A

    static Policy deterministic(int num_states, int num_actions,
                                const std::vector<int>& actions);
};

struct TransitionSample {
    int state = 0;
    int action = 0;
    int next_state = 0;
    double reward_value = 0.0;
};

// Reports every invariant violation with its location; empty means valid.
std::vector<std::string> validate(const TabularMdp& mdp);

std::vector<std::string> validate_policy(const TabularMdp& mdp, const Policy& pi);

// P_pi(s,s') = sum_a pi(a|s) P(s'|s,a), r_pi(s) = sum_a pi(a|s) r(s,a).
std::pair<MatrixXd, VectorXd> policy_matrices(const TabularMdp& mdp, const Policy& pi);

// Solves v = (1-gamma) r_pi + gamma P_pi v. Normalized values lie in [0,1].
VectorXd value_of_policy(const TabularMdp& mdp, const Policy& pi);

// Value iteration on the normalized Bellman operator; greedy policy breaks
// ties toward the lowest action index.
std::pair<VectorXd, Policy> optimal_value_and_policy(const TabularMdp& mdp, double tol);

// Solves d = (1-gamma) p + gamma P_pi^T d.
VectorXd stationary_state_distribution(const TabularMdp& mdp, const Policy& pi);

// mu(s,a) = d^pi(s) pi(a|s), flattened in index(s,a) order.
VectorXd occupancy_of_policy(const TabularMdp& mdp, const Policy& pi);

int sample_initial(const TabularMdp& mdp, RandomSequence& rng);
TransitionSample sample_transition(const TabularMdp& mdp, int s, int a, RandomSequence& rng);

// Inverse-CDF draw from a cumulative row; used by the samplers above and by
// the solver's slotted draws.
int categorical_from_cdf(const double* cdf, int n, double u);

// Builds a cumulative row in place from probabilities.
void cumulative_row(const double* probs, int n, double* cdf);

// Exhaustive enumeration of deterministic policies. Guard: A^S <= 10^6.
// Ties on p^T v resolve to the lexicographically smallest action assignment.
std::pair<VectorXd, Policy> brute_force_optimal(const TabularMdp& mdp);

}  // namespace mdprl
