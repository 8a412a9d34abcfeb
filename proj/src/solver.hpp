#pragma once

#include <functional>
#include <optional>

#include "saddle.hpp"

namespace mdprl {

// One slotted block of counter positions per round, so the tabular and the
// feature-space estimators can share a stream and stay aligned.
inline constexpr std::uint64_t kDrawsPerRound = 8;
enum DrawSlot : std::uint64_t {
    kSlotInitialState = 0,
    kSlotOccupancyDraw = 1,   // (s,a) ~ mu_n, or basis column ~ theta_mu
    kSlotNextStateQ1 = 2,
    kSlotUniformDraw = 3,     // uniform (s,a), or uniform basis column
    kSlotNextStateQ2 = 4,
    kSlotColumnPairQ1 = 5,    // (s,a) within the sampled column (features)
    kSlotColumnPairQ2 = 6,
};

struct SolverConfig {
    long long steps = 1000;
    double eta = 0.0;          // ignored when eta_auto
    bool eta_auto = true;      // eta = (1-gamma) (S A N)^{-1/2}
    std::uint64_t seed = 0;
    std::vector<long long> checkpoints;  // empty: powers of two up to N, plus N
    bool eval_with_oracle = true;
    bool accumulate_regret = false;
    // Called with every iterate x_n before its update; used by diagnostics.
    std::function<void(const PrimalDualPoint&)> iterate_hook;
};

// Two-query estimate of grad h_n with at most 4 nonzero entries.
struct SparseGradient {
    struct Entry {
        int index = 0;
        double weight = 0.0;
    };
    Entry v_entries[3];
    int v_count = 0;
    Entry mu_entry;
};

struct RunState {
    VectorXd v;       // in [0,1]^S
    VectorXd log_mu;  // log of simplex weights
    long long step = 0;
    VectorXd sum_v;
    VectorXd sum_mu;

    VectorXd mu() const;  // exp-normalized
};

struct CheckpointRecord {
    long long n = 0;
    double eta = 0.0;
    double value_gap = 0.0;      // NaN without oracle evaluation
    double residual_cert = 0.0;  // NaN without oracle evaluation
    long long queries = 0;
    double elapsed_ms = 0.0;
};

struct RunMetrics {
    double resolved_eta = 0.0;
    std::vector<CheckpointRecord> checkpoints;
    PrimalDualPoint averaged;
    Policy policy;
    double final_gap = 0.0;

    // Parameter-space average; only filled by the feature-basis runner.
    VectorXd theta_v_averaged;
    VectorXd theta_mu_averaged;

    // Exact-gradient regret accumulators over the iterates, filled when
    // SolverConfig::accumulate_regret is set.
    long long regret_rounds = 0;
    double sum_shifted_loss_at_iterates = 0.0;
    VectorXd sum_balance;
    VectorXd sum_kappa_minus_advantage;

    // (1/N) [sum_n h_n(x_n) - sum_n h_n(y)] from the accumulators.
    double average_regret_vs(const PrimalDualPoint& y) const;
};

double auto_step_size(const TabularMdp& mdp, long long steps);

// Draws the two generative queries for round `round` from the stream's
// slotted counters. Query 1 feeds the v-block, query 2 the mu-block.
SparseGradient sample_gradient(const TabularMdp& mdp, const PrimalDualPoint& x_n,
                               const RandomStream& stream, std::uint64_t round);

// Mirror descent step under the composite divergence
// (1/(2S)) ||dv||^2 + KL(mu'||mu): clipped Euclidean step on v with
// effective rate eta*S, exponentiated-gradient step on mu in log space.
void md_update(RunState& state, const SparseGradient& g, double eta, int num_states);

// Dense convenience wrapper for tests.
PrimalDualPoint md_update(const PrimalDualPoint& x, const SparseGradient& g,
                          double eta, int num_states);

RunMetrics run(const TabularMdp& mdp, const SolverConfig& cfg);

// Index of the snapshot with the smallest oracle gap certificate.
std::size_t best_iterate_diagnostic(const TabularMdp& mdp,
                                    const std::vector<PrimalDualPoint>& snapshots);

// (1/N) sum_n [h_n(x_n) - h_n(y)] with exact (noise-free) gradients.
double empirical_average_regret(const TabularMdp& mdp,
                                const std::vector<PrimalDualPoint>& trajectory,
                                const PrimalDualPoint& y);

std::vector<long long> resolve_checkpoints(const std::vector<long long>& requested,
                                           long long steps);

}  // namespace mdprl
