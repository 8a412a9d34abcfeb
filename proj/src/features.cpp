#include "features.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>
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
    return std::min(static_cast<int>(u * n), n - 1);
}

double log_sum_exp(const VectorXd& x) {
    const double m = x.maxCoeff();
    double acc = 0.0;
    for (int i = 0; i < x.size(); ++i) acc += std::exp(x(i) - m);
    return m + std::log(acc);
}

VectorXd exp_normalized(const VectorXd& log_w) {
    VectorXd out(log_w.size());
    for (int i = 0; i < log_w.size(); ++i) out(i) = std::exp(log_w(i));
    out /= out.sum();
    return out;
}

}  // namespace

void FeatureBasis::finalize() {
    psi_cdf.resize(psi.rows(), psi.cols());
    for (int k = 0; k < psi.cols(); ++k) {
        double acc = 0.0;
        for (int i = 0; i < psi.rows(); ++i) {
            acc += psi(i, k);
            psi_cdf(i, k) = acc;
        }
        if (psi.rows() > 0) psi_cdf(psi.rows() - 1, k) = 1.0;
    }
}

std::vector<std::string> validate_basis(const FeatureBasis& basis) {
    std::vector<std::string> out;
    for (int j = 0; j < basis.phi.cols(); ++j) {
        const double m = basis.phi.col(j).cwiseAbs().maxCoeff();
        if (m > 1.0 + 1e-12) {
            std::ostringstream os;
            os << "phi column " << j << ": max |entry| = " << m << " exceeds 1";
            out.push_back(os.str());
        }
    }
    for (int k = 0; k < basis.psi.cols(); ++k) {
        double sum = 0.0;
        bool neg = false;
        for (int i = 0; i < basis.psi.rows(); ++i) {
            if (basis.psi(i, k) < 0.0) neg = true;
            sum += basis.psi(i, k);
        }
        if (neg) {
            std::ostringstream os;
            os << "psi column " << k << ": negative entry";
            out.push_back(os.str());
        }
        if (std::abs(sum - 1.0) > 1e-10) {
            std::ostringstream os;
            os << "psi column " << k << ": sums to " << sum;
            out.push_back(os.str());
        }
    }
    return out;
}

PrimalDualPoint realize(const FeatureBasis& basis, const ThetaPoint& theta) {
    if (theta.theta_v.size() != basis.phi.cols() ||
        theta.theta_mu.size() != basis.psi.cols())
        throw std::invalid_argument("realize: dimension mismatch");
    return {basis.phi * theta.theta_v, basis.psi * theta.theta_mu};
}

double value_feature_eval(const FeatureBasis& basis, const VectorXd& theta_v, int s) {
    return basis.phi.row(s).dot(theta_v);
}

double auto_step_size_features(const TabularMdp& mdp, const FeatureBasis& basis,
                               double c_v, long long steps) {
    return (1.0 - mdp.gamma) /
           std::sqrt(static_cast<double>(steps) * (c_v * c_v + basis.d_mu()));
}

FeatureGradient sample_gradient_theta(const TabularMdp& mdp, const FeatureBasis& basis,
                                      const ThetaPoint& theta_n,
                                      const RandomStream& stream, std::uint64_t round) {
    const double inv = 1.0 / (1.0 - mdp.gamma);
    const std::uint64_t base = round * kDrawsPerRound;
    FeatureGradient g;

    // Query 1: s0 ~ p; (s,a) ~ Psi theta_mu via column-then-pair; s' ~ P.
    const int s0 = categorical_from_cdf(mdp.initial_cdf.data(), mdp.num_states,
                                        stream.u01(base + kSlotInitialState));
    const int col1 = categorical_linear(theta_n.theta_mu,
                                        stream.u01(base + kSlotOccupancyDraw));
    const int pair = categorical_from_cdf(basis.psi_cdf.col(col1).data(),
                                          static_cast<int>(basis.psi_cdf.rows()),
                                          stream.u01(base + kSlotColumnPairQ1));
    const int s = pair / mdp.num_actions;
    const int s_next = categorical_from_cdf(mdp.transition_cdf.row(pair).data(),
                                            mdp.num_states,
                                            stream.u01(base + kSlotNextStateQ1));
    g.v_block = basis.phi.row(s0).transpose() - inv * basis.phi.row(s).transpose() +
                (mdp.gamma * inv) * basis.phi.row(s_next).transpose();

    // Query 2: uniform column k; (s,a) ~ psi[:,k]; s' ~ P; weight carries the
    // d_mu importance factor.
    const int d_mu = basis.d_mu();
    const int col2 = uniform_index(stream.u01(base + kSlotUniformDraw), d_mu);
    const int upair = categorical_from_cdf(basis.psi_cdf.col(col2).data(),
                                           static_cast<int>(basis.psi_cdf.rows()),
                                           stream.u01(base + kSlotColumnPairQ2));
    const int us = upair / mdp.num_actions;
    const int us_next = categorical_from_cdf(mdp.transition_cdf.row(upair).data(),
                                             mdp.num_states,
                                             stream.u01(base + kSlotNextStateQ2));
    const double vn_s = value_feature_eval(basis, theta_n.theta_v, us);
    const double vn_next = value_feature_eval(basis, theta_n.theta_v, us_next);
    g.mu_index = col2;
    g.mu_weight = d_mu * (inv - mdp.reward(upair) -
                          inv * (mdp.gamma * vn_next - vn_s));
    return g;
}

ThetaPoint md_update_theta(const ThetaPoint& theta, const FeatureGradient& g,
                           double eta, double c_v) {
    const int d_v = static_cast<int>(theta.theta_v.size());
    ThetaPoint next;
    next.theta_v = theta.theta_v - (eta * c_v * c_v / d_v) * g.v_block;
    const double radius = c_v / std::sqrt(static_cast<double>(d_v));
    const double norm = next.theta_v.norm();
    if (norm > radius) next.theta_v *= radius / norm;

    VectorXd log_mu = theta.theta_mu.array().max(1e-300).log();
    log_mu(g.mu_index) -= eta * g.mu_weight;
    log_mu.array() -= log_sum_exp(log_mu);
    next.theta_mu = exp_normalized(log_mu);
    return next;
}

RunMetrics run_features(const TabularMdp& mdp, const FeatureBasis& basis,
                        const FeatureConfig& cfg) {
    if (cfg.steps < 1) throw std::invalid_argument("run_features: steps must be >= 1");
    {
        auto bad = validate_basis(basis);
        if (!bad.empty())
            throw std::invalid_argument("run_features: invalid basis: " + bad.front());
    }
    const int d_v = basis.d_v();
    const int d_mu = basis.d_mu();
    const double eta = cfg.eta_auto
                           ? auto_step_size_features(mdp, basis, cfg.c_v, cfg.steps)
                           : cfg.eta;
    if (!(eta > 0.0))
        throw std::invalid_argument("run_features: step size must be > 0");

    RunMetrics metrics;
    metrics.resolved_eta = eta;

    VectorXd mu_star;
    double vstar_p = std::numeric_limits<double>::quiet_NaN();
    if (cfg.eval_with_oracle) {
        auto [v_star, pi_star] = optimal_value_and_policy(mdp, 1e-12);
        mu_star = occupancy_of_policy(mdp, pi_star);
        vstar_p = mdp.initial.dot(v_star);
    }

    VectorXd theta_v = VectorXd::Zero(d_v);
    VectorXd log_theta_mu =
        VectorXd::Constant(d_mu, -std::log(static_cast<double>(d_mu)));
    VectorXd sum_theta_v = VectorXd::Zero(d_v);
    VectorXd sum_theta_mu = VectorXd::Zero(d_mu);

    const double radius = cfg.c_v / std::sqrt(static_cast<double>(d_v));
    const double v_scale = eta * cfg.c_v * cfg.c_v / d_v;

    const RandomStream stream(cfg.seed);
    const auto cps = resolve_checkpoints(cfg.checkpoints, cfg.steps);
    std::size_t next_cp = 0;
    const auto t0 = std::chrono::steady_clock::now();

    for (long long n = 1; n <= cfg.steps; ++n) {
        ThetaPoint theta_n{theta_v, exp_normalized(log_theta_mu)};
        sum_theta_v += theta_n.theta_v;
        sum_theta_mu += theta_n.theta_mu;

        const FeatureGradient g = sample_gradient_theta(
            mdp, basis, theta_n, stream, static_cast<std::uint64_t>(n - 1));
        theta_v -= v_scale * g.v_block;
        const double norm = theta_v.norm();
        if (norm > radius) theta_v *= radius / norm;
        log_theta_mu(g.mu_index) -= eta * g.mu_weight;
        log_theta_mu.array() -= log_sum_exp(log_theta_mu);

        if (next_cp < cps.size() && n == cps[next_cp]) {
            ++next_cp;
            CheckpointRecord rec;
            rec.n = n;
            rec.eta = eta;
            rec.queries = 2 * n;
            rec.elapsed_ms = std::chrono::duration<double, std::milli>(
                                 std::chrono::steady_clock::now() - t0)
                                 .count();
            ThetaPoint theta_hat{sum_theta_v / static_cast<double>(n),
                                 sum_theta_mu / sum_theta_mu.sum()};
            PrimalDualPoint x_hat = realize(basis, theta_hat);
            if (cfg.eval_with_oracle) {
                Policy pi_hat = policy_from_occupancy(mdp, x_hat.mu);
                VectorXd v_pi_hat = value_of_policy(mdp, pi_hat);
                rec.value_gap = vstar_p - mdp.initial.dot(v_pi_hat);
                rec.residual_cert = relative_residual(mdp, x_hat, {v_pi_hat, mu_star});
            } else {
                rec.value_gap = std::numeric_limits<double>::quiet_NaN();
                rec.residual_cert = std::numeric_limits<double>::quiet_NaN();
            }
            metrics.checkpoints.push_back(rec);
            if (n == cfg.steps) {
                metrics.averaged = x_hat;
                metrics.theta_v_averaged = theta_hat.theta_v;
                metrics.theta_mu_averaged = theta_hat.theta_mu;
                metrics.policy = policy_from_occupancy(mdp, x_hat.mu);
                metrics.final_gap = rec.value_gap;
            }
        }
    }
    return metrics;
}

VectorXd policy_row_from_theta(const TabularMdp& mdp, const FeatureBasis& basis,
                               const VectorXd& theta_mu, int s) {
    VectorXd row = VectorXd::Zero(mdp.num_actions);
    for (int a = 0; a < mdp.num_actions; ++a) {
        const int i = mdp.index(s, a);
        for (int k = 0; k < basis.psi.cols(); ++k)
            row(a) += theta_mu(k) * basis.psi(i, k);
    }
    const double mass = row.sum();
    if (mass < 1e-12) return VectorXd::Constant(mdp.num_actions, 1.0 / mdp.num_actions);
    return row / mass;
}

FeatureBasis tabular_basis(int num_states, int num_actions) {
    FeatureBasis b;
    b.phi = MatrixXd::Identity(num_states, num_states);
    b.psi = MatrixXd::Identity(num_states * num_actions, num_states * num_actions);
    b.finalize();
    return b;
}

FeatureBasis state_aggregation_basis(int num_states, int num_actions, int k) {
    if (k < 1 || k > num_states)
        throw std::invalid_argument("state_aggregation_basis: need 1 <= k <= S");
    const int block_size = (num_states + k - 1) / k;
    FeatureBasis b;
    b.phi = MatrixXd::Zero(num_states, k);
    std::vector<int> block_count(k, 0);
    for (int s = 0; s < num_states; ++s) {
        const int blk = std::min(s / block_size, k - 1);
        b.phi(s, blk) = 1.0;
        ++block_count[blk];
    }
    b.psi = MatrixXd::Zero(num_states * num_actions, k * num_actions);
    for (int s = 0; s < num_states; ++s) {
        const int blk = std::min(s / block_size, k - 1);
        for (int a = 0; a < num_actions; ++a)
            b.psi(s * num_actions + a, blk * num_actions + a) =
                1.0 / block_count[blk];
    }
    b.finalize();
    return b;
}

}  // namespace mdprl
