#pragma once

#include "bench.hpp"

namespace mdprl {

struct CheckResult {
    std::string name;
    double max_deviation = 0.0;
    double tolerance = 0.0;
    bool pass = false;
    std::string detail;  // extra numbers worth printing (lhs/rhs etc.)
};

struct VerifyReport {
    std::vector<CheckResult> checks;

    bool all_pass() const;
    // One "name: pass|FAIL  max_dev=... (detail)" line per check.
    std::string to_text() const;
};

// Identity certificates on one MDP over `num_points` random feasible points:
// performance difference, residual lemma (exact and shifted comparator),
// clever-comparator gap identity, skew-symmetry, norm bounds, and the rough
// residual lower bound on policy occupancies.
VerifyReport verify_mdp(const TabularMdp& mdp, double tol, int num_points,
                        std::uint64_t seed);

// Closed-form checks on the three-state chain: v*, v^{pi_mu}, the stay
// advantage, and lhs = rhs = (1-gamma)/3 for the classic bound.
VerifyReport verify_counterexample(double gamma, double tol);

// Random-MDP sweep (num_mdps instances, S <= 8, A <= 4,
// gamma in {0.5, 0.9, 0.99}) merged with the counterexample checks.
VerifyReport verify_standard(double tol, int num_mdps = 200,
                             std::uint64_t seed = 2024);

}  // namespace mdprl
