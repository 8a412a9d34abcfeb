#include "bench.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <thread>

#include "io.hpp"

namespace mdprl {

CounterexampleArtifacts gen_counterexample(double gamma) {
    if (gamma < 0.0 || gamma >= 1.0)
        throw std::invalid_argument("gen_counterexample: need 0 <= gamma < 1");
    constexpr int S = 3;
    constexpr int A = 3;  // left, right, stay
    constexpr int kLeft = 0, kRight = 1, kStay = 2;

    TabularMdp mdp;
    mdp.num_states = S;
    mdp.num_actions = A;
    mdp.gamma = gamma;
    mdp.transition = MatrixXd::Zero(S * A, S);
    mdp.reward = VectorXd::Zero(S * A);
    mdp.initial = VectorXd::Constant(S, 1.0 / S);
    for (int s = 0; s < S; ++s) {
        mdp.transition(mdp.index(s, kLeft), std::max(s - 1, 0)) = 1.0;
        mdp.transition(mdp.index(s, kRight), std::min(s + 1, S - 1)) = 1.0;
        mdp.transition(mdp.index(s, kStay), s) = 1.0;
        mdp.reward(mdp.index(s, kRight)) = 1.0;
    }
    mdp.finalize();

    // Occupancy of the right/stay/right policy under the skewed state
    // distribution d = (1-gamma) p + gamma e_0; paired with v = 0 it attains
    // the classic bound with equality.
    VectorXd d = (1.0 - gamma) * mdp.initial;
    d(0) += gamma;
    VectorXd mu = VectorXd::Zero(S * A);
    mu(mdp.index(0, kRight)) = d(0);
    mu(mdp.index(1, kStay)) = d(1);
    mu(mdp.index(2, kRight)) = d(2);

    CounterexampleArtifacts out;
    out.mdp = std::move(mdp);
    out.adversarial_point = {VectorXd::Zero(S), std::move(mu)};
    out.expected_residual = (1.0 - gamma) / 3.0;
    out.expected_bound_rhs = out.expected_residual;
    return out;
}

TabularMdp gen_random_mdp(int num_states, int num_actions, int branching,
                          std::uint64_t seed, double gamma) {
    if (num_states < 1 || num_actions < 1)
        throw std::invalid_argument("gen_random_mdp: need S, A >= 1");
    if (branching < 1 || branching > num_states)
        throw std::invalid_argument("gen_random_mdp: need 1 <= branching <= S");
    if (gamma < 0.0 || gamma >= 1.0)
        throw std::invalid_argument("gen_random_mdp: need 0 <= gamma < 1");

    RandomSequence rng(seed);
    TabularMdp mdp;
    mdp.num_states = num_states;
    mdp.num_actions = num_actions;
    mdp.gamma = gamma;
    mdp.transition = MatrixXd::Zero(num_states * num_actions, num_states);
    mdp.reward = VectorXd::Zero(num_states * num_actions);
    mdp.initial = VectorXd::Constant(num_states, 1.0 / num_states);

    std::vector<int> pool(num_states);
    for (int row = 0; row < num_states * num_actions; ++row) {
        // Partial Fisher-Yates picks `branching` distinct support states.
        std::iota(pool.begin(), pool.end(), 0);
        double weight_sum = 0.0;
        std::vector<std::pair<int, double>> support(branching);
        for (int j = 0; j < branching; ++j) {
            const int pick =
                j + std::min(static_cast<int>(rng.next() * (num_states - j)),
                             num_states - j - 1);
            std::swap(pool[j], pool[pick]);
            // Exponential weights give flat-Dirichlet proportions.
            const double w = -std::log(1.0 - rng.next());
            support[j] = {pool[j], w};
            weight_sum += w;
        }
        for (const auto& [s_next, w] : support)
            mdp.transition(row, s_next) = w / weight_sum;
        mdp.reward(row) = rng.next();
    }
    mdp.finalize();
    return mdp;
}

TabularMdp gen_gridworld(int width, int height, double slip, double gamma) {
    if (width < 1 || height < 1)
        throw std::invalid_argument("gen_gridworld: need width, height >= 1");
    if (slip < 0.0 || slip >= 1.0)
        throw std::invalid_argument("gen_gridworld: need slip in [0,1)");
    if (gamma < 0.0 || gamma >= 1.0)
        throw std::invalid_argument("gen_gridworld: need 0 <= gamma < 1");

    const int S = width * height;
    constexpr int A = 4;  // up, down, left, right
    const int goal = S - 1;
    const int dx[A] = {0, 0, -1, 1};
    const int dy[A] = {-1, 1, 0, 0};

    TabularMdp mdp;
    mdp.num_states = S;
    mdp.num_actions = A;
    mdp.gamma = gamma;
    mdp.transition = MatrixXd::Zero(S * A, S);
    mdp.reward = VectorXd::Zero(S * A);
    mdp.initial = VectorXd::Constant(S, 1.0 / S);

    auto moved = [&](int s, int a) {
        const int x = s % width, y = s / width;
        const int nx = std::clamp(x + dx[a], 0, width - 1);
        const int ny = std::clamp(y + dy[a], 0, height - 1);
        return ny * width + nx;
    };
    for (int s = 0; s < S; ++s)
        for (int a = 0; a < A; ++a) {
            const int row = mdp.index(s, a);
            if (s == goal) {  // absorbing
                mdp.transition(row, goal) = 1.0;
                mdp.reward(row) = 1.0;
                continue;
            }
            mdp.transition(row, moved(s, a)) += 1.0 - slip;
            // Lateral slip: the two moves perpendicular to the intent.
            const int lat0 = a < 2 ? 2 : 0;
            mdp.transition(row, moved(s, lat0)) += slip / 2.0;
            mdp.transition(row, moved(s, lat0 + 1)) += slip / 2.0;
        }
    mdp.finalize();
    return mdp;
}

TabularMdp instantiate(const SweepSpec& spec, std::uint64_t seed) {
    if (spec.generator == "counterexample")
        return gen_counterexample(spec.gamma).mdp;
    if (spec.generator == "random")
        return gen_random_mdp(spec.num_states, spec.num_actions, spec.branching,
                              seed, spec.gamma);
    if (spec.generator == "gridworld")
        return gen_gridworld(spec.width, spec.height, spec.slip, spec.gamma);
    throw std::invalid_argument("instantiate: unknown generator '" +
                                spec.generator + "'");
}

std::vector<SweepRecord> run_sweep(const SweepSpec& spec) {
    if (spec.steps_list.empty())
        throw std::invalid_argument("run_sweep: empty steps list");
    {
        auto sorted = spec.seeds;
        std::sort(sorted.begin(), sorted.end());
        if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
            throw std::invalid_argument("run_sweep: duplicate seeds");
    }
    if (spec.seeds.empty()) throw std::invalid_argument("run_sweep: no seeds");

    struct Task {
        long long n;
        std::uint64_t seed;
    };
    std::vector<Task> tasks;
    auto steps_sorted = spec.steps_list;
    std::sort(steps_sorted.begin(), steps_sorted.end());
    steps_sorted.erase(std::unique(steps_sorted.begin(), steps_sorted.end()),
                       steps_sorted.end());
    auto seeds_sorted = spec.seeds;
    std::sort(seeds_sorted.begin(), seeds_sorted.end());
    for (long long n : steps_sorted)
        for (std::uint64_t seed : seeds_sorted) tasks.push_back({n, seed});

    std::vector<SweepRecord> records(tasks.size());
    std::atomic<std::size_t> cursor{0};
    auto worker = [&] {
        for (;;) {
            const std::size_t i = cursor.fetch_add(1);
            if (i >= tasks.size()) return;
            const Task& t = tasks[i];
            const TabularMdp mdp = instantiate(spec, t.seed);
            SweepRecord rec;
            rec.run_id = i;
            rec.seed = t.seed;
            rec.n = t.n;
            rec.queries = 2 * t.n;
            if (spec.use_features) {
                FeatureConfig cfg;
                cfg.c_v = spec.c_v;
                cfg.steps = t.n;
                cfg.seed = t.seed;
                cfg.checkpoints = {t.n};
                const FeatureBasis basis =
                    tabular_basis(mdp.num_states, mdp.num_actions);
                RunMetrics m = run_features(mdp, basis, cfg);
                rec.eta = m.resolved_eta;
                rec.value_gap = m.checkpoints.back().value_gap;
                rec.residual_cert = m.checkpoints.back().residual_cert;
                rec.elapsed_ms = m.checkpoints.back().elapsed_ms;
            } else {
                SolverConfig cfg;
                cfg.steps = t.n;
                cfg.seed = t.seed;
                cfg.checkpoints = {t.n};
                RunMetrics m = run(mdp, cfg);
                rec.eta = m.resolved_eta;
                rec.value_gap = m.checkpoints.back().value_gap;
                rec.residual_cert = m.checkpoints.back().residual_cert;
                rec.elapsed_ms = m.checkpoints.back().elapsed_ms;
            }
            records[i] = rec;
        }
    };
    const int workers = std::max(1, spec.workers);
    if (workers == 1) {
        worker();
    } else {
        std::vector<std::thread> threads;
        for (int w = 0; w < workers; ++w) threads.emplace_back(worker);
        for (auto& th : threads) th.join();
    }

    if (!spec.output_path.empty()) write_metrics_csv(spec.output_path, records);
    return records;
}

RateFit rate_fit(const std::vector<SweepRecord>& table) {
    std::vector<long long> ns;
    for (const auto& r : table) ns.push_back(r.n);
    std::sort(ns.begin(), ns.end());
    ns.erase(std::unique(ns.begin(), ns.end()), ns.end());
    if (ns.size() < 3)
        throw std::invalid_argument("rate_fit: need >= 3 distinct step counts");

    std::vector<double> xs, ys;
    for (long long n : ns) {
        double sum = 0.0;
        int count = 0;
        for (const auto& r : table)
            if (r.n == n) {
                sum += r.value_gap;
                ++count;
            }
        if (count < 10)
            throw std::invalid_argument("rate_fit: need >= 10 seeds per step count");
        xs.push_back(std::log(static_cast<double>(n)));
        ys.push_back(std::log(std::max(sum / count, 1e-300)));
    }

    const int k = static_cast<int>(xs.size());
    const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / k;
    const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / k;
    double sxx = 0.0, sxy = 0.0;
    for (int i = 0; i < k; ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
    }
    RateFit fit;
    fit.num_groups = k;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double ssr = 0.0;
    for (int i = 0; i < k; ++i) {
        const double e = ys[i] - (fit.intercept + fit.slope * xs[i]);
        ssr += e * e;
    }
    fit.stderr_slope = k > 2 ? std::sqrt(ssr / (k - 2) / sxx) : 0.0;
    return fit;
}

}  // namespace mdprl
