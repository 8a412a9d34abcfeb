#include <doctest.h>

#include <cmath>

#include "bench.hpp"
#include "mdp.hpp"

using namespace mdprl;

namespace {

TabularMdp two_state_chain(double gamma = 0.5) {
    TabularMdp mdp;
    mdp.num_states = 2;
    mdp.num_actions = 2;
    mdp.gamma = gamma;
    mdp.transition.resize(4, 2);
    mdp.transition << 1, 0,  // (0, stay)
        0, 1,                // (0, go)
        1, 0,                // (1, back)
        0, 1;                // (1, stay)
    mdp.reward.resize(4);
    mdp.reward << 0.0, 0.2, 0.0, 1.0;
    mdp.initial.resize(2);
    mdp.initial << 0.7, 0.3;
    mdp.finalize();
    return mdp;
}

TabularMdp single_state(double gamma, double r) {
    TabularMdp mdp;
    mdp.num_states = 1;
    mdp.num_actions = 1;
    mdp.gamma = gamma;
    mdp.transition = MatrixXd::Ones(1, 1);
    mdp.reward = VectorXd::Constant(1, r);
    mdp.initial = VectorXd::Ones(1);
    mdp.finalize();
    return mdp;
}

}  // namespace

TEST_CASE("validate accepts a well-formed MDP and locates violations") {
    TabularMdp mdp = two_state_chain();
    CHECK(validate(mdp).empty());

    TabularMdp bad_row = mdp;
    bad_row.transition(2, 0) = 0.9;
    bad_row.transition(2, 1) = 0.0;
    auto v = validate(bad_row);
    REQUIRE(v.size() == 1);
    CHECK(v[0].find("row 2") != std::string::npos);

    TabularMdp bad_reward = mdp;
    bad_reward.reward(1) = 1.5;
    v = validate(bad_reward);
    REQUIRE(v.size() == 1);
    CHECK(v[0].find("entry 1") != std::string::npos);

    TabularMdp neg = mdp;
    neg.transition(0, 0) = -0.1;
    neg.transition(0, 1) = 1.1;
    v = validate(neg);
    REQUIRE(v.size() == 1);
    CHECK(v[0].find("negative") != std::string::npos);
}

TEST_CASE("policy_matrices composes transitions and rewards") {
    TabularMdp mdp = two_state_chain();

    Policy det = Policy::deterministic(2, 2, {1, 0});
    auto [p_det, r_det] = policy_matrices(mdp, det);
    CHECK(p_det(0, 1) == 1.0);
    CHECK(p_det(1, 0) == 1.0);
    CHECK(r_det(0) == doctest::Approx(0.2).epsilon(1e-14));

    Policy uni;
    uni.probs = MatrixXd::Constant(2, 2, 0.5);
    auto [p_uni, r_uni] = policy_matrices(mdp, uni);
    CHECK(p_uni(0, 0) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(r_uni(1) == doctest::Approx(0.5).epsilon(1e-14));

    // Three-state chain, always-right: 0 -> 1 -> 2 -> 2.
    TabularMdp ce = gen_counterexample(0.9).mdp;
    Policy right = Policy::deterministic(3, 3, {1, 1, 1});
    auto [p_right, r_right] = policy_matrices(ce, right);
    CHECK(p_right(0, 1) == 1.0);
    CHECK(p_right(1, 2) == 1.0);
    CHECK(p_right(2, 2) == 1.0);
    CHECK(r_right.minCoeff() == 1.0);
}

TEST_CASE("value_of_policy solves the normalized evaluation equation") {
    const double gamma = 0.9;
    TabularMdp ce = gen_counterexample(gamma).mdp;

    Policy pi_mu = Policy::deterministic(3, 3, {1, 2, 1});  // right/stay/right
    VectorXd v = value_of_policy(ce, pi_mu);
    CHECK(v(0) == doctest::Approx(1.0 - gamma).epsilon(1e-12));
    CHECK(v(1) == doctest::Approx(0.0).scale(1).epsilon(1e-12));
    CHECK(v(2) == doctest::Approx(1.0).epsilon(1e-12));

    Policy right = Policy::deterministic(3, 3, {1, 1, 1});
    VectorXd v_star = value_of_policy(ce, right);
    for (int s = 0; s < 3; ++s) CHECK(v_star(s) == doctest::Approx(1.0).epsilon(1e-12));

    for (double g : {0.0, 0.5, 0.99}) {
        TabularMdp one = single_state(g, 1.0);
        Policy pi;
        pi.probs = MatrixXd::Ones(1, 1);
        CHECK(value_of_policy(one, pi)(0) == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("optimal_value_and_policy matches closed-form values and zero rewards") {
    TabularMdp ce = gen_counterexample(0.9).mdp;
    auto [v_star, pi_star] = optimal_value_and_policy(ce, 1e-12);
    for (int s = 0; s < 3; ++s) {
        CHECK(v_star(s) == doctest::Approx(1.0).epsilon(1e-10));
        CHECK(pi_star.probs(s, 1) == 1.0);  // always right
    }

    TabularMdp zero = two_state_chain();
    zero.reward.setZero();
    auto [v0, pi0] = optimal_value_and_policy(zero, 1e-12);
    CHECK(v0.lpNorm<Eigen::Infinity>() <= 1e-12);
    (void)pi0;
}

TEST_CASE("value iteration agrees with brute-force enumeration") {
    for (int i = 0; i < 30; ++i) {
        TabularMdp mdp = gen_random_mdp(3, 2, 2, 900 + i, 0.9);
        auto [v_vi, pi_vi] = optimal_value_and_policy(mdp, 1e-12);
        auto [v_bf, pi_bf] = brute_force_optimal(mdp);
        CHECK(std::abs(mdp.initial.dot(v_vi) - mdp.initial.dot(v_bf)) <= 1e-9);
    }
}

TEST_CASE("stationary distribution and occupancy") {
    TabularMdp mdp = gen_random_mdp(4, 3, 3, 42, 0.0);
    RandomSequence rng(7);
    Policy pi;
    pi.probs.resize(4, 3);
    for (int s = 0; s < 4; ++s) {
        VectorXd w(3);
        for (int a = 0; a < 3; ++a) w(a) = 0.1 + rng.next();
        pi.probs.row(s) = (w / w.sum()).transpose();
    }

    // gamma = 0: d = p.
    VectorXd d0 = stationary_state_distribution(mdp, pi);
    CHECK((d0 - mdp.initial).lpNorm<Eigen::Infinity>() <= 1e-12);

    // gamma = 0, uniform policy: mu(s,a) = p(s)/A.
    Policy uni;
    uni.probs = MatrixXd::Constant(4, 3, 1.0 / 3.0);
    VectorXd mu0 = occupancy_of_policy(mdp, uni);
    for (int s = 0; s < 4; ++s)
        for (int a = 0; a < 3; ++a)
            CHECK(mu0(mdp.index(s, a)) ==
                  doctest::Approx(mdp.initial(s) / 3.0).epsilon(1e-12));

    TabularMdp one = single_state(0.7, 0.3);
    Policy pone;
    pone.probs = MatrixXd::Ones(1, 1);
    CHECK(stationary_state_distribution(one, pone)(0) == doctest::Approx(1.0));
    CHECK(occupancy_of_policy(one, pone)(0) == doctest::Approx(1.0));

    // Power-series oracle: d = (1-gamma) sum_t gamma^t (P_pi^T)^t p.
    TabularMdp m4 = gen_random_mdp(4, 2, 4, 5, 0.9);
    Policy pi4;
    pi4.probs = MatrixXd::Constant(4, 2, 0.5);
    auto [p4, r4] = policy_matrices(m4, pi4);
    (void)r4;
    const int T = static_cast<int>(std::ceil(std::log(1e-10) / std::log(0.9)));
    VectorXd series = VectorXd::Zero(4);
    VectorXd term = m4.initial;
    for (int t = 0; t <= T; ++t) {
        series += (1.0 - m4.gamma) * std::pow(m4.gamma, t) * term;
        term = p4.transpose() * term;
    }
    VectorXd d4 = stationary_state_distribution(m4, pi4);
    CHECK((d4 - series).lpNorm<Eigen::Infinity>() <= 1e-8);

    // Flow constraint (1-gamma) p + gamma P^T mu = E^T mu, and objective
    // consistency r^T mu = p^T v.
    VectorXd mu4 = occupancy_of_policy(m4, pi4);
    VectorXd lhs = (1.0 - m4.gamma) * m4.initial + m4.gamma * (m4.transition.transpose() * mu4);
    for (int s = 0; s < 4; ++s) {
        double mass = 0.0;
        for (int a = 0; a < 2; ++a) mass += mu4(m4.index(s, a));
        CHECK(std::abs(lhs(s) - mass) <= 1e-10);
    }
    CHECK(std::abs(mu4.dot(m4.reward) - m4.initial.dot(value_of_policy(m4, pi4))) <=
          1e-8);
}

TEST_CASE("optimal value dominates random policies") {
    TabularMdp mdp = gen_random_mdp(5, 3, 3, 11, 0.9);
    auto [v_star, pi_star] = optimal_value_and_policy(mdp, 1e-12);
    RandomSequence rng(3);
    for (int i = 0; i < 100; ++i) {
        Policy pi;
        pi.probs.resize(5, 3);
        for (int s = 0; s < 5; ++s) {
            VectorXd w(3);
            for (int a = 0; a < 3; ++a) w(a) = 0.05 + rng.next();
            pi.probs.row(s) = (w / w.sum()).transpose();
        }
        VectorXd v = value_of_policy(mdp, pi);
        CHECK((v_star - v).minCoeff() >= -1e-8);
    }
}

TEST_CASE("categorical sampling: exactness, frequencies, reproducibility") {
    TabularMdp ce = gen_counterexample(0.9).mdp;

    // Deterministic rows always return their support.
    RandomSequence rng(5);
    for (int i = 0; i < 100; ++i) {
        TransitionSample t = sample_transition(ce, 1, 2, rng);  // middle, stay
        CHECK(t.next_state == 1);
        CHECK(t.reward_value == 0.0);
    }
    CHECK_THROWS_AS(sample_transition(ce, 3, 0, rng), std::out_of_range);

    // Binomial concentration on a random row.
    TabularMdp m = gen_random_mdp(5, 2, 5, 77, 0.9);
    const int draws = 1000000;
    RandomSequence r2(99);
    std::vector<int> counts(5, 0);
    for (int i = 0; i < draws; ++i) ++counts[sample_transition(m, 2, 1, r2).next_state];
    for (int s = 0; s < 5; ++s) {
        const double q = m.transition(m.index(2, 1), s);
        const double se = std::sqrt(q * (1.0 - q) / draws);
        CHECK(std::abs(counts[s] / double(draws) - q) <= 4.0 * se + 1e-9);
    }

    // Same seed, same sequence.
    RandomSequence a(123), b(123);
    for (int i = 0; i < 1000; ++i)
        CHECK(sample_transition(m, 1, 0, a).next_state ==
              sample_transition(m, 1, 0, b).next_state);

    // Initial-state sampling hits every support state of a uniform p.
    RandomSequence r3(1);
    std::vector<int> seen(5, 0);
    for (int i = 0; i < 1000; ++i) ++seen[sample_initial(m, r3)];
    for (int s = 0; s < 5; ++s) CHECK(seen[s] > 0);
}

TEST_CASE("brute force enumeration basics") {
    TabularMdp ce = gen_counterexample(0.9).mdp;
    auto [v, pi] = brute_force_optimal(ce);
    for (int s = 0; s < 3; ++s) CHECK(pi.probs(s, 1) == 1.0);

    TabularMdp one;
    one.num_states = 1;
    one.num_actions = 3;
    one.gamma = 0.5;
    one.transition = MatrixXd::Ones(3, 1);
    one.reward.resize(3);
    one.reward << 0.2, 0.9, 0.4;
    one.initial = VectorXd::Ones(1);
    one.finalize();
    auto [v1, pi1] = brute_force_optimal(one);
    CHECK(pi1.probs(0, 1) == 1.0);
    CHECK(v1(0) == doctest::Approx(0.9).epsilon(1e-12));

    TabularMdp big = gen_random_mdp(30, 2, 2, 1, 0.9);
    CHECK_THROWS_AS(brute_force_optimal(big), std::invalid_argument);
}

TEST_CASE("deterministic policy helper validates") {
    TabularMdp mdp = two_state_chain();
    Policy pi = Policy::deterministic(2, 2, {0, 1});
    CHECK(validate_policy(mdp, pi).empty());
    Policy bad;
    bad.probs = MatrixXd::Constant(2, 2, 0.4);
    CHECK(!validate_policy(mdp, bad).empty());
}
