#pragma once

#include "features.hpp"

namespace mdprl {

// Three-state chain whose adversarial occupancy makes the classic residual
// bound tight: lhs = rhs = (1-gamma)/3.
struct CounterexampleArtifacts {
    TabularMdp mdp;
    PrimalDualPoint adversarial_point;
    double expected_residual = 0.0;   // (1-gamma)/3
    double expected_bound_rhs = 0.0;  // matches expected_residual by design
};

CounterexampleArtifacts gen_counterexample(double gamma);

// Each (s,a) row is supported on `branching` distinct states with flat-
// Dirichlet weights; rewards uniform on [0,1]; uniform initial distribution.
TabularMdp gen_random_mdp(int num_states, int num_actions, int branching,
                          std::uint64_t seed, double gamma);

// 4-action grid (up/down/left/right), walls clamp, slip probability split
// between the two lateral moves, absorbing goal at the last cell with
// reward 1 on entry or stay.
TabularMdp gen_gridworld(int width, int height, double slip, double gamma);

struct SweepSpec {
    std::string generator;  // "counterexample" | "random" | "gridworld"
    double gamma = 0.9;
    int num_states = 3;
    int num_actions = 3;
    int branching = 2;
    int width = 2;
    int height = 2;
    double slip = 0.0;
    std::vector<long long> steps_list;
    std::vector<std::uint64_t> seeds;
    bool use_features = false;
    double c_v = 1.0;
    int workers = 1;
    std::string output_path;  // empty: in-memory only
};

struct SweepRecord {
    std::uint64_t run_id = 0;
    std::uint64_t seed = 0;
    long long n = 0;
    double eta = 0.0;
    double value_gap = 0.0;
    double residual_cert = 0.0;
    long long queries = 0;
    double elapsed_ms = 0.0;
};

TabularMdp instantiate(const SweepSpec& spec, std::uint64_t seed);

// One record per (N, seed), sorted by (N, seed); content is a pure function
// of the spec no matter how many workers ran it.
std::vector<SweepRecord> run_sweep(const SweepSpec& spec);

struct RateFit {
    double slope = 0.0;
    double stderr_slope = 0.0;
    double intercept = 0.0;
    int num_groups = 0;
};

// Least-squares slope of log(mean gap) vs log(N). Needs >= 3 distinct N and
// >= 10 seeds per N.
RateFit rate_fit(const std::vector<SweepRecord>& table);

}  // namespace mdprl
