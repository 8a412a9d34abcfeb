#include "solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace mdprl {

namespace {

int categorical_linear(const VectorXd& probs, double u) {
    const int n = static_cast<int>(probs.size());
    double acc = 0.0;
    for (int i = 0; i < n; ++i) {
        acc += probs(i);
        if (u < acc) return i;
    }
    return n - 1;
}

int uniform_index(double u, int n) {
    const int i = static_cast<int>(u * n);
    return std::min(i, n - 1);
}

SparseGradient sample_gradient_impl(const TabularMdp& mdp, const VectorXd& v,
                                    const VectorXd& mu, const RandomStream& stream,
                                    std::uint64_t round) {
    const double inv = 1.0 / (1.0 - mdp.gamma);
    const std::uint64_t base = round * kDrawsPerRound;
    SparseGradient g;

    // Query 1: s0 ~ p, (s,a) ~ mu_n, s' ~ P(.|s,a).
    const int s0 = categorical_from_cdf(mdp.initial_cdf.data(), mdp.num_states,
                                        stream.u01(base + kSlotInitialState));
    const int pair = categorical_linear(mu, stream.u01(base + kSlotOccupancyDraw));
    const int s = pair / mdp.num_actions;
    const int s_next = categorical_from_cdf(mdp.transition_cdf.row(pair).data(),
                                            mdp.num_states,
                                            stream.u01(base + kSlotNextStateQ1));
    g.v_entries[0] = {s0, 1.0};
    g.v_entries[1] = {s, -inv};
    g.v_entries[2] = {s_next, mdp.gamma * inv};
    g.v_count = 3;

    // Query 2: uniform (s,a), read r, s' ~ P(.|s,a).
    const int sa = mdp.num_pairs();
    const int upair = uniform_index(stream.u01(base + kSlotUniformDraw), sa);
    const int us = upair / mdp.num_actions;
    const int us_next = categorical_from_cdf(mdp.transition_cdf.row(upair).data(),
                                             mdp.num_states,
                                             stream.u01(base + kSlotNextStateQ2));
    const double w = sa * (inv - mdp.reward(upair) -
                           inv * (mdp.gamma * v(us_next) - v(us)));
    g.mu_entry = {upair, w};
    return g;
}

double log_sum_exp(const VectorXd& x) {
    const double m = x.maxCoeff();
    double acc = 0.0;
    for (int i = 0; i < x.size(); ++i) acc += std::exp(x(i) - m);
    return m + std::log(acc);
}

}  // namespace

VectorXd RunState::mu() const {
    VectorXd out(log_mu.size());
    for (int i = 0; i < log_mu.size(); ++i) out(i) = std::exp(log_mu(i));
    const double sum = out.sum();
    out /= sum;
    return out;
}

double auto_step_size(const TabularMdp& mdp, long long steps) {
    return (1.0 - mdp.gamma) /
           std::sqrt(static_cast<double>(mdp.num_pairs()) * static_cast<double>(steps));
}

SparseGradient sample_gradient(const TabularMdp& mdp, const PrimalDualPoint& x_n,
                               const RandomStream& stream, std::uint64_t round) {
    return sample_gradient_impl(mdp, x_n.v, x_n.mu, stream, round);
}

void md_update(RunState& state, const SparseGradient& g, double eta, int num_states) {
    const double scale = eta * num_states;
    for (int k = 0; k < g.v_count; ++k)
        state.v(g.v_entries[k].index) -= scale * g.v_entries[k].weight;
    for (int k = 0; k < g.v_count; ++k) {
        double& x = state.v(g.v_entries[k].index);
        x = std::clamp(x, 0.0, 1.0);
    }
    state.log_mu(g.mu_entry.index) -= eta * g.mu_entry.weight;
    state.log_mu.array() -= log_sum_exp(state.log_mu);
    ++state.step;
}

PrimalDualPoint md_update(const PrimalDualPoint& x, const SparseGradient& g,
                          double eta, int num_states) {
    RunState st;
    st.v = x.v;
    st.log_mu = x.mu.array().max(1e-300).log();
    md_update(st, g, eta, num_states);
    return {st.v, st.mu()};
}

std::vector<long long> resolve_checkpoints(const std::vector<long long>& requested,
                                           long long steps) {
    std::vector<long long> cps;
    if (requested.empty()) {
        for (long long c = 1; c < steps; c *= 2) cps.push_back(c);
    } else {
        for (long long c : requested)
            if (c >= 1 && c < steps) cps.push_back(c);
    }
    cps.push_back(steps);
    std::sort(cps.begin(), cps.end());
    cps.erase(std::unique(cps.begin(), cps.end()), cps.end());
    return cps;
}

RunMetrics run(const TabularMdp& mdp, const SolverConfig& cfg) {
    if (cfg.steps < 1) throw std::invalid_argument("run: steps must be >= 1");
    const int S = mdp.num_states;
    const int SA = mdp.num_pairs();
    const double eta = cfg.eta_auto ? auto_step_size(mdp, cfg.steps) : cfg.eta;
    if (!(eta > 0.0)) throw std::invalid_argument("run: step size must be > 0");

    RunMetrics metrics;
    metrics.resolved_eta = eta;

    // Exact comparators for checkpoint evaluation.
    VectorXd mu_star;
    double vstar_p = std::numeric_limits<double>::quiet_NaN();
    if (cfg.eval_with_oracle) {
        auto [v_star, pi_star] = optimal_value_and_policy(mdp, 1e-12);
        mu_star = occupancy_of_policy(mdp, pi_star);
        vstar_p = mdp.initial.dot(v_star);
    }

    RunState st;
    st.v = VectorXd::Constant(S, 0.5);
    st.log_mu = VectorXd::Constant(SA, -std::log(static_cast<double>(SA)));
    st.sum_v = VectorXd::Zero(S);
    st.sum_mu = VectorXd::Zero(SA);
    if (cfg.accumulate_regret) {
        metrics.sum_balance = VectorXd::Zero(S);
        metrics.sum_kappa_minus_advantage = VectorXd::Zero(SA);
    }

    const RandomStream stream(cfg.seed);
    const auto cps = resolve_checkpoints(cfg.checkpoints, cfg.steps);
    std::size_t next_cp = 0;
    const auto t0 = std::chrono::steady_clock::now();

    for (long long n = 1; n <= cfg.steps; ++n) {
        const VectorXd mu_n = st.mu();
        st.sum_v += st.v;
        st.sum_mu += mu_n;
        if (cfg.iterate_hook) cfg.iterate_hook({st.v, mu_n});
        if (cfg.accumulate_regret) {
            auto [g_v, g_mu] = shifted_loss_gradient(mdp, {st.v, mu_n});
            metrics.sum_shifted_loss_at_iterates += g_v.dot(st.v) + g_mu.dot(mu_n);
            metrics.sum_balance += g_v;
            metrics.sum_kappa_minus_advantage += g_mu;
            ++metrics.regret_rounds;
        }

        const SparseGradient g = sample_gradient_impl(
            mdp, st.v, mu_n, stream, static_cast<std::uint64_t>(n - 1));
        md_update(st, g, eta, S);

        if (next_cp < cps.size() && n == cps[next_cp]) {
            ++next_cp;
            CheckpointRecord rec;
            rec.n = n;
            rec.eta = eta;
            rec.queries = 2 * n;
            rec.elapsed_ms = std::chrono::duration<double, std::milli>(
                                 std::chrono::steady_clock::now() - t0)
                                 .count();
            VectorXd avg_v = st.sum_v / static_cast<double>(n);
            VectorXd avg_mu = st.sum_mu / st.sum_mu.sum();  // absorb 1e-10 drift
            if (cfg.eval_with_oracle) {
                Policy pi_hat = policy_from_occupancy(mdp, avg_mu);
                VectorXd v_pi_hat = value_of_policy(mdp, pi_hat);
                rec.value_gap = vstar_p - mdp.initial.dot(v_pi_hat);
                rec.residual_cert = relative_residual(mdp, {avg_v, avg_mu},
                                                      {v_pi_hat, mu_star});
            } else {
                rec.value_gap = std::numeric_limits<double>::quiet_NaN();
                rec.residual_cert = std::numeric_limits<double>::quiet_NaN();
            }
            metrics.checkpoints.push_back(rec);
            if (n == cfg.steps) {
                metrics.averaged = {avg_v, avg_mu};
                metrics.policy = policy_from_occupancy(mdp, avg_mu);
                metrics.final_gap = rec.value_gap;
            }
        }
    }
    return metrics;
}

double RunMetrics::average_regret_vs(const PrimalDualPoint& y) const {
    if (regret_rounds == 0)
        throw std::logic_error("average_regret_vs: regret accumulation was off");
    const double sum_h_y =
        sum_balance.dot(y.v) + sum_kappa_minus_advantage.dot(y.mu);
    return (sum_shifted_loss_at_iterates - sum_h_y) / static_cast<double>(regret_rounds);
}

std::size_t best_iterate_diagnostic(const TabularMdp& mdp,
                                    const std::vector<PrimalDualPoint>& snapshots) {
    if (snapshots.empty())
        throw std::invalid_argument("best_iterate_diagnostic: empty snapshot list");
    auto [v_star, pi_star] = optimal_value_and_policy(mdp, 1e-12);
    const double vstar_p = mdp.initial.dot(v_star);
    std::size_t best = 0;
    double best_gap = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < snapshots.size(); ++i) {
        Policy pi_mu = policy_from_occupancy(mdp, snapshots[i].mu);
        const double gap = vstar_p - mdp.initial.dot(value_of_policy(mdp, pi_mu));
        if (gap < best_gap) {
            best_gap = gap;
            best = i;
        }
    }
    return best;
}

double empirical_average_regret(const TabularMdp& mdp,
                                const std::vector<PrimalDualPoint>& trajectory,
                                const PrimalDualPoint& y) {
    if (trajectory.empty())
        throw std::invalid_argument("empirical_average_regret: empty trajectory");
    double total = 0.0;
    for (const auto& x_n : trajectory) {
        auto [g_v, g_mu] = shifted_loss_gradient(mdp, x_n);
        total += g_v.dot(x_n.v) + g_mu.dot(x_n.mu);
        total -= g_v.dot(y.v) + g_mu.dot(y.mu);
    }
    return total / static_cast<double>(trajectory.size());
}

}  // namespace mdprl
