// Acceptance suite: one pass/fail line per criterion, nonzero exit when any
// criterion fails.  Everything here is checked against independent oracles
// (exact solvers, closed forms, brute force) rather than against the code
// under test.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "io.hpp"
#include "mdprl.h"
#include "verify.hpp"

using namespace mdprl;

namespace {

int g_failures = 0;

void report(int criterion, bool pass, const std::string& text) {
    std::printf("criterion %d: %s — %s\n", criterion, pass ? "PASS" : "FAIL",
                text.c_str());
    std::fflush(stdout);
    if (!pass) ++g_failures;
}

std::string fmt(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.3g", x);
    return buf;
}

double median(std::vector<double> xs) {
    std::sort(xs.begin(), xs.end());
    const std::size_t n = xs.size();
    return n % 2 ? xs[n / 2] : 0.5 * (xs[n / 2 - 1] + xs[n / 2]);
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

// ---- criterion 1: three-state chain closed forms at 1e-10 ----

void criterion_1() {
    const VerifyReport rep = verify_counterexample(0.9, 1e-10);
    double max_dev = 0.0;
    for (const auto& c : rep.checks) max_dev = std::max(max_dev, c.max_deviation);
    std::ostringstream os;
    os << "three-state chain closed forms (max dev " << fmt(max_dev)
       << ", tol 1e-10, " << rep.checks.size() << " checks)";
    if (!rep.all_pass())
        for (const auto& c : rep.checks)
            if (!c.pass) os << "; failing: " << c.name;
    report(1, rep.all_pass(), os.str());
}

// ---- criterion 2: identity certificates on 200 random MDPs at 1e-8 ----

void criterion_2() {
    const VerifyReport rep = verify_standard(1e-8, 200, 2024);
    double max_dev = 0.0;
    for (const auto& c : rep.checks) max_dev = std::max(max_dev, c.max_deviation);
    std::ostringstream os;
    os << "identity certificates over 200 random MDPs (max dev " << fmt(max_dev)
       << ", tol 1e-8)";
    if (!rep.all_pass())
        for (const auto& c : rep.checks)
            if (!c.pass) os << "; failing: " << c.name;
    report(2, rep.all_pass(), os.str());
}

// ---- criterion 3: value iteration vs brute-force enumeration ----

void criterion_3() {
    RandomSequence rng(333);
    double max_dev = 0.0;
    for (int i = 0; i < 100; ++i) {
        const int S = 2 + static_cast<int>(rng.next() * 3);   // 2..4
        const int A = 2 + static_cast<int>(rng.next() * 2);   // 2..3
        const int branching = 1 + static_cast<int>(rng.next() * S);
        const double gamma = (i % 3 == 0) ? 0.5 : (i % 3 == 1 ? 0.9 : 0.99);
        const TabularMdp m = gen_random_mdp(S, A, std::min(branching, S),
                                            1000 + i, gamma);
        auto [v_vi, pi_vi] = optimal_value_and_policy(m, 1e-13);
        auto [v_bf, pi_bf] = brute_force_optimal(m);
        max_dev = std::max(max_dev,
                           (v_vi - v_bf).lpNorm<Eigen::Infinity>());
    }
    std::ostringstream os;
    os << "value iteration matches brute force on 100 MDPs (max dev "
       << fmt(max_dev) << ", tol 1e-9)";
    report(3, max_dev <= 1e-9, os.str());
}

// ---- criterion 4: estimator unbiasedness, tabular and feature forms ----

double max_z_tabular(const TabularMdp& m, const PrimalDualPoint& x,
                     std::uint64_t seed, int draws) {
    const int S = m.num_states, SA = m.num_pairs();
    const VectorXd ev = balance(m, x.mu);
    const VectorXd emu =
        VectorXd::Constant(SA, 1.0 / (1.0 - m.gamma)) - advantage(m, x.v);
    MatrixXd v_samples = MatrixXd::Zero(draws, S);
    MatrixXd mu_samples = MatrixXd::Zero(draws, SA);
    const RandomStream stream(seed);
    for (int i = 0; i < draws; ++i) {
        const SparseGradient g = sample_gradient(m, x, stream, i);
        for (int k = 0; k < g.v_count; ++k)
            v_samples(i, g.v_entries[k].index) += g.v_entries[k].weight;
        mu_samples(i, g.mu_entry.index) = g.mu_entry.weight;
    }
    double worst = 0.0;
    auto scan = [&](const MatrixXd& samples, const VectorXd& exact) {
        for (int j = 0; j < exact.size(); ++j) {
            const double mean = samples.col(j).mean();
            const double var =
                (samples.col(j).array() - mean).square().sum() / (draws - 1);
            const double se = std::sqrt(var / draws) + 1e-15;
            worst = std::max(worst, std::abs(mean - exact(j)) / se);
        }
    };
    scan(v_samples, ev);
    scan(mu_samples, emu);
    return worst;
}

double max_z_features(const TabularMdp& m, const FeatureBasis& basis,
                      const ThetaPoint& theta, std::uint64_t seed, int draws) {
    const PrimalDualPoint x = realize(basis, theta);
    const VectorXd ev = basis.phi.transpose() * balance(m, x.mu);
    const VectorXd emu =
        VectorXd::Constant(basis.d_mu(), 1.0 / (1.0 - m.gamma)) -
        basis.psi.transpose() * advantage(m, x.v);
    MatrixXd v_samples(draws, basis.d_v());
    MatrixXd mu_samples = MatrixXd::Zero(draws, basis.d_mu());
    const RandomStream stream(seed);
    for (int i = 0; i < draws; ++i) {
        const FeatureGradient g = sample_gradient_theta(m, basis, theta, stream, i);
        v_samples.row(i) = g.v_block.transpose();
        mu_samples(i, g.mu_index) = g.mu_weight;
    }
    double worst = 0.0;
    auto scan = [&](const MatrixXd& samples, const VectorXd& exact) {
        for (int j = 0; j < exact.size(); ++j) {
            const double mean = samples.col(j).mean();
            const double var =
                (samples.col(j).array() - mean).square().sum() / (draws - 1);
            const double se = std::sqrt(var / draws) + 1e-15;
            worst = std::max(worst, std::abs(mean - exact(j)) / se);
        }
    };
    scan(v_samples, ev);
    scan(mu_samples, emu);
    return worst;
}

void criterion_4() {
    const int draws = 100000;
    const TabularMdp m = gen_random_mdp(3, 2, 3, 414, 0.8);

    RandomSequence rng(44);
    VectorXd v(3);
    for (int s = 0; s < 3; ++s) v(s) = rng.next();
    VectorXd mu(6);
    for (int i = 0; i < 6; ++i) mu(i) = -std::log(1.0 - rng.next());
    mu /= mu.sum();
    const double z_tab = max_z_tabular(m, {v, mu}, 440, draws);

    FeatureBasis basis;
    basis.phi.resize(3, 2);
    basis.phi << 1.0, 0.2, 0.4, -0.5, -0.3, 1.0;
    basis.psi.resize(6, 2);
    VectorXd col(6);
    for (int i = 0; i < 6; ++i) col(i) = -std::log(1.0 - rng.next());
    basis.psi.col(0) = col / col.sum();
    for (int i = 0; i < 6; ++i) col(i) = -std::log(1.0 - rng.next());
    basis.psi.col(1) = col / col.sum();
    basis.finalize();
    ThetaPoint theta;
    theta.theta_v.resize(2);
    theta.theta_v << 0.5, -0.4;
    theta.theta_mu.resize(2);
    theta.theta_mu << 0.3, 0.7;
    const double z_feat = max_z_features(m, basis, theta, 441, draws);

    std::ostringstream os;
    os << "gradient estimators unbiased over " << draws
       << " draws (max |z| tabular " << fmt(z_tab) << ", features "
       << fmt(z_feat) << ", bound 4 SE)";
    report(4, z_tab <= 4.0 && z_feat <= 4.0, os.str());
}

// ---- criterion 5: convergence medians and the empirical rate ----

std::vector<SweepRecord> counterexample_sweep(const std::vector<long long>& steps,
                                              int num_seeds) {
    SweepSpec spec;
    spec.generator = "counterexample";
    spec.gamma = 0.9;
    spec.steps_list = steps;
    for (int s = 1; s <= num_seeds; ++s) spec.seeds.push_back(s);
    spec.workers = 2;
    return run_sweep(spec);
}

void criterion_5() {
    const auto med_records = counterexample_sweep({250000, 1000000}, 20);
    std::vector<double> gaps_250k, gaps_1m;
    for (const auto& r : med_records)
        (r.n == 250000 ? gaps_250k : gaps_1m).push_back(r.value_gap);
    const double med_250k = median(gaps_250k);
    const double med_1m = median(gaps_1m);

    std::vector<long long> grid;
    for (long long n = 16000; n < 1000000; n *= 2) grid.push_back(n);
    grid.push_back(1000000);
    const auto rate_records = counterexample_sweep(grid, 10);
    const RateFit fit = rate_fit(rate_records);

    const bool pass_250k = med_250k <= 0.10;
    const bool pass_1m = med_1m <= 0.05;
    const bool pass_rate = fit.slope >= -0.65 && fit.slope <= -0.35;
    std::ostringstream os;
    os << "auto-eta convergence: median gap " << fmt(med_250k)
       << " at N=250000 (need <= 0.10), " << fmt(med_1m)
       << " at N=1000000 (need <= 0.05), log-log slope " << fmt(fit.slope)
       << " +/- " << fmt(fit.stderr_slope) << " (need [-0.65, -0.35])";
    report(5, pass_250k && pass_1m && pass_rate, os.str());
}

// ---- criterion 6: gap bounded by the average regret at the comparator ----

void criterion_6() {
    const TabularMdp m = gen_counterexample(0.9).mdp;
    auto [v_star, pi_star] = optimal_value_and_policy(m, 1e-12);
    const VectorXd mu_star = occupancy_of_policy(m, pi_star);
    const double vstar_p = m.initial.dot(v_star);

    double worst_slack = -1e300;
    bool all_bounded = true;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        SolverConfig cfg;
        cfg.steps = 250000;
        cfg.seed = seed;
        cfg.checkpoints = {cfg.steps};
        cfg.accumulate_regret = true;
        const RunMetrics metrics = run(m, cfg);
        const Policy pi_hat = policy_from_occupancy(m, metrics.averaged.mu);
        const VectorXd v_pi_hat = value_of_policy(m, pi_hat);
        const double gap = vstar_p - m.initial.dot(v_pi_hat);
        const double regret =
            metrics.average_regret_vs({v_pi_hat, mu_star});
        worst_slack = std::max(worst_slack, gap - regret);
        if (gap > regret + 1e-6) all_bounded = false;
    }

    // Cross-check the O(S + SA) accumulators against a stored trajectory.
    std::vector<PrimalDualPoint> trajectory;
    SolverConfig small;
    small.steps = 2000;
    small.seed = 3;
    small.checkpoints = {small.steps};
    small.accumulate_regret = true;
    small.iterate_hook = [&](const PrimalDualPoint& x) { trajectory.push_back(x); };
    const RunMetrics sm = run(m, small);
    const PrimalDualPoint y{value_of_policy(m, policy_from_occupancy(
                                                   m, sm.averaged.mu)),
                            mu_star};
    const double from_acc = sm.average_regret_vs(y);
    const double from_traj = empirical_average_regret(m, trajectory, y);
    const bool acc_ok = std::abs(from_acc - from_traj) <= 1e-9;

    std::ostringstream os;
    os << "policy gap bounded by average regret on 5 runs at N=250000 (worst "
          "gap-minus-regret "
       << fmt(worst_slack) << ", tol 1e-6; accumulator vs trajectory dev "
       << fmt(std::abs(from_acc - from_traj)) << ")";
    report(6, all_bounded && acc_ok, os.str());
}

// ---- criterion 7: feature path reproduces the tabular estimator ----

void criterion_7() {
    const TabularMdp m = gen_counterexample(0.9).mdp;
    const FeatureBasis tab = tabular_basis(3, 3);
    const RandomStream stream(777);
    RandomSequence rng(77);
    long long mismatches = 0;
    for (int round = 0; round < 10000; ++round) {
        VectorXd v(3);
        for (int s = 0; s < 3; ++s) v(s) = rng.next();
        VectorXd mu(9);
        for (int i = 0; i < 9; ++i) mu(i) = -std::log(1.0 - rng.next());
        mu /= mu.sum();
        const SparseGradient g_tab = sample_gradient(m, {v, mu}, stream, round);
        const FeatureGradient g_feat =
            sample_gradient_theta(m, tab, {v, mu}, stream, round);
        if (g_feat.mu_index != g_tab.mu_entry.index ||
            g_feat.mu_weight != g_tab.mu_entry.weight)
            ++mismatches;
        VectorXd scattered = VectorXd::Zero(3);
        for (int k = 0; k < g_tab.v_count; ++k)
            scattered(g_tab.v_entries[k].index) += g_tab.v_entries[k].weight;
        if ((scattered - g_feat.v_block).lpNorm<Eigen::Infinity>() != 0.0)
            ++mismatches;
    }

    FeatureConfig cfg;
    cfg.c_v = 3.0;
    cfg.steps = 1000000;
    cfg.seed = 1;
    cfg.checkpoints = {cfg.steps};
    const RunMetrics metrics = run_features(m, tab, cfg);

    std::ostringstream os;
    os << "tabular-basis feature path: " << mismatches
       << " estimator mismatches over 10000 rounds (need 0); gap "
       << fmt(metrics.final_gap) << " at N=1000000 (need <= 0.1)";
    report(7, mismatches == 0 && metrics.final_gap <= 0.1, os.str());
}

// ---- criterion 8: byte-identical artifacts across reruns and workers ----

void criterion_8() {
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path();
    const std::string a = (dir / "mdprl_acc_a.csv").string();
    const std::string b = (dir / "mdprl_acc_b.csv").string();
    bool ok = true;
    std::ostringstream os;

    mdprl_mdp* mdp = nullptr;
    ok = ok && mdprl_gen_counterexample(0.9, &mdp) == MDPRL_OK;
    mdprl_solve_options opts;
    mdprl_solve_options_init(&opts);
    opts.steps = 20000;
    opts.seed = 12;
    ok = ok && mdprl_solve(mdp, &opts, a.c_str(), nullptr, nullptr) == MDPRL_OK;
    ok = ok && mdprl_solve(mdp, &opts, b.c_str(), nullptr, nullptr) == MDPRL_OK;
    const bool rerun_identical = ok && read_file(a) == read_file(b);
    mdprl_mdp_free(mdp);

    const std::string spec_path = (dir / "mdprl_acc_spec.json").string();
    {
        std::ofstream out(spec_path);
        out << "{\"generator\":\"random\",\"num_states\":4,\"num_actions\":2,"
            << "\"branching\":2,\"gamma\":0.9,\"steps\":[1000,4000],"
            << "\"seeds\":[1,2,3,4]}";
    }
    ok = ok && mdprl_sweep(spec_path.c_str(), 1, a.c_str()) == MDPRL_OK;
    ok = ok && mdprl_sweep(spec_path.c_str(), 4, b.c_str()) == MDPRL_OK;
    const bool workers_identical = ok && read_file(a) == read_file(b);

    fs::remove(a);
    fs::remove(b);
    fs::remove(spec_path);

    os << "byte-identical CSVs: rerun "
       << (rerun_identical ? "identical" : "DIFFERS") << ", workers 1 vs 4 "
       << (workers_identical ? "identical" : "DIFFERS");
    report(8, ok && rerun_identical && workers_identical, os.str());
}

}  // namespace

int main() {
    criterion_1();
    criterion_2();
    criterion_3();
    criterion_4();
    criterion_5();
    criterion_6();
    criterion_7();
    criterion_8();
    if (g_failures) {
        std::printf("acceptance: %d criterion(s) failed\n", g_failures);
        return 1;
    }
    std::printf("acceptance: all criteria passed\n");
    return 0;
}
