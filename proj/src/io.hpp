#pragma once

#include <stdexcept>

#include "bench.hpp"

namespace mdprl {

// File cannot be opened / written: maps to exit code 4.
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// File opened but its content is malformed or fails validation: exit code 3.
struct InvalidInputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// MDP document: num_states, num_actions, gamma, initial (length S),
// reward (length S*A), transition (flat length S*A*S, row index s*A + a).
TabularMdp load_mdp(const std::string& path);
void save_mdp(const std::string& path, const TabularMdp& mdp);

// Basis document: d_v, d_mu, phi (flat S x d_v row-major), psi either a flat
// S*A x d_mu row-major array or the generator strings "tabular" /
// "state-aggregation:k".
FeatureBasis load_basis(const std::string& path, int num_states, int num_actions);
void save_basis(const std::string& path, const FeatureBasis& basis);

// Sweep document: generator + its parameters, steps list, seeds list,
// features flag, c_v, workers.
SweepSpec load_sweep_spec(const std::string& path);

// Fixed schema: run_id,seed,n,eta,value_gap,residual_cert,queries,elapsed_ms
// with 17 significant digits. elapsed_ms is written as 0 so outputs are
// byte-identical across runs; wall time stays in the in-memory records.
// A nonempty comment becomes a leading `# ...` line.
void write_metrics_csv(const std::string& path,
                       const std::vector<SweepRecord>& records,
                       const std::string& comment = "");

std::string format_metrics_csv(const std::vector<SweepRecord>& records,
                               const std::string& comment = "");

// S rows of A probabilities, space-separated, 17 significant digits.
void write_policy(const std::string& path, const Policy& policy);

}  // namespace mdprl
