#include <cstdio>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mdprl.h"

namespace {

int fail(int code) {
    std::fprintf(stderr, "error: %s\n", mdprl_last_error());
    return code;
}

struct EtaFlag {
    std::string text = "auto";

    // Returns false (usage error) when the value is neither "auto" nor a
    // number.
    bool apply(mdprl_solve_options& opts) const {
        if (text == "auto") {
            opts.eta_auto = 1;
            return true;
        }
        try {
            std::size_t used = 0;
            opts.eta = std::stod(text, &used);
            if (used != text.size() || !(opts.eta > 0.0)) return false;
        } catch (const std::exception&) {
            return false;
        }
        opts.eta_auto = 0;
        return true;
    }
};

bool parse_checkpoints(const std::string& text, std::vector<long long>& out) {
    if (text == "pow2") return true;  // empty list selects the default schedule
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t used = 0;
        try {
            out.push_back(std::stoll(text.substr(pos), &used));
        } catch (const std::exception&) {
            return false;
        }
        pos += used;
        if (pos < text.size()) {
            if (text[pos] != ',') return false;
            ++pos;
        }
    }
    return !out.empty();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Saddle-point mirror-descent solver for discounted MDPs"};
    app.require_subcommand(1);

    // solve
    auto* solve = app.add_subcommand("solve", "Run the tabular solver");
    std::string solve_mdp, solve_out, solve_policy, solve_cps = "pow2";
    EtaFlag solve_eta;
    long long solve_steps = 1000;
    unsigned long long solve_seed = 0;
    bool solve_oracle = true;
    solve->add_option("--mdp", solve_mdp, "MDP document path")->required();
    solve->add_option("--steps", solve_steps, "Number of rounds N");
    solve->add_option("--eta", solve_eta.text, "Step size, or 'auto'");
    solve->add_option("--seed", solve_seed, "Random stream seed");
    solve->add_option("--checkpoints", solve_cps,
                      "'pow2' or comma-separated round indices");
    solve->add_option("--oracle-eval", solve_oracle,
                      "Evaluate gap/residual columns with exact solvers");
    solve->add_option("--out", solve_out, "Metrics CSV path")->required();
    solve->add_option("--policy", solve_policy,
                      "Policy document path (default: OUT.policy)");

    // features
    auto* feat = app.add_subcommand("features", "Run the linear-basis solver");
    std::string feat_mdp, feat_basis = "tabular", feat_out, feat_policy,
                feat_cps = "pow2";
    EtaFlag feat_eta;
    double feat_cv = 1.0;
    long long feat_steps = 1000;
    unsigned long long feat_seed = 0;
    bool feat_oracle = true;
    feat->add_option("--mdp", feat_mdp, "MDP document path")->required();
    feat->add_option("--basis", feat_basis, "Basis document path, or 'tabular'");
    feat->add_option("--cv", feat_cv, "Value-parameter norm budget C_v");
    feat->add_option("--steps", feat_steps, "Number of rounds N");
    feat->add_option("--eta", feat_eta.text, "Step size, or 'auto'");
    feat->add_option("--seed", feat_seed, "Random stream seed");
    feat->add_option("--checkpoints", feat_cps,
                     "'pow2' or comma-separated round indices");
    feat->add_option("--oracle-eval", feat_oracle,
                     "Evaluate gap/residual columns with exact solvers");
    feat->add_option("--out", feat_out, "Metrics CSV path")->required();
    feat->add_option("--policy", feat_policy,
                     "Policy document path (default: OUT.policy)");

    // verify
    auto* verify = app.add_subcommand("verify", "Run identity-certificate suites");
    std::string verify_mdp, verify_suite;
    double verify_tol = 1e-8;
    verify->add_option("--mdp", verify_mdp, "MDP document path");
    verify->add_option("--suite", verify_suite, "'standard'");
    verify->add_option("--tol", verify_tol, "Deviation tolerance");

    // bench
    auto* bench = app.add_subcommand("bench", "Run a sweep document");
    std::string bench_spec, bench_out;
    int bench_workers = 0;
    bench->add_option("--spec", bench_spec, "Sweep document path")->required();
    bench->add_option("--workers", bench_workers, "Worker thread count");
    bench->add_option("--out", bench_out, "Metrics CSV path")->required();

    // gen
    auto* gen = app.add_subcommand("gen", "Generate an MDP document");
    std::string gen_kind, gen_out;
    double gen_gamma = 0.9, gen_slip = 0.0;
    int gen_states = 3, gen_actions = 2, gen_branching = 2, gen_width = 2,
        gen_height = 2;
    unsigned long long gen_seed = 0;
    gen->add_option("--kind", gen_kind, "counterexample|random|gridworld")
        ->required()
        ->check(CLI::IsMember({"counterexample", "random", "gridworld"}));
    gen->add_option("--gamma", gen_gamma, "Discount factor");
    gen->add_option("--states", gen_states, "States (random)");
    gen->add_option("--actions", gen_actions, "Actions (random)");
    gen->add_option("--branching", gen_branching, "Support size per row (random)");
    gen->add_option("--seed", gen_seed, "Generator seed (random)");
    gen->add_option("--width", gen_width, "Grid width (gridworld)");
    gen->add_option("--height", gen_height, "Grid height (gridworld)");
    gen->add_option("--slip", gen_slip, "Lateral slip probability (gridworld)");
    gen->add_option("--out", gen_out, "Output path")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return MDPRL_BAD_ARGS;
    }

    if (solve->parsed() || feat->parsed()) {
        const bool features = feat->parsed();
        mdprl_solve_options opts;
        mdprl_solve_options_init(&opts);
        opts.steps = features ? feat_steps : solve_steps;
        opts.seed = features ? feat_seed : solve_seed;
        opts.oracle_eval = (features ? feat_oracle : solve_oracle) ? 1 : 0;
        if (!(features ? feat_eta : solve_eta).apply(opts)) {
            std::fprintf(stderr, "error: --eta expects 'auto' or a positive number\n");
            return MDPRL_BAD_ARGS;
        }
        std::vector<long long> cps;
        if (!parse_checkpoints(features ? feat_cps : solve_cps, cps)) {
            std::fprintf(stderr,
                         "error: --checkpoints expects 'pow2' or a comma list\n");
            return MDPRL_BAD_ARGS;
        }
        if (!cps.empty()) {
            opts.checkpoints = cps.data();
            opts.num_checkpoints = static_cast<int>(cps.size());
        }
        const std::string mdp_path = features ? feat_mdp : solve_mdp;
        const std::string out = features ? feat_out : solve_out;
        std::string policy = features ? feat_policy : solve_policy;
        if (policy.empty()) policy = out + ".policy";

        mdprl_mdp* mdp = nullptr;
        int rc = mdprl_mdp_load(mdp_path.c_str(), &mdp);
        if (rc != MDPRL_OK) return fail(rc);
        double final_gap = 0.0;
        rc = features ? mdprl_solve_features(mdp, &opts, feat_basis.c_str(),
                                             feat_cv, out.c_str(),
                                             policy.c_str(), &final_gap)
                      : mdprl_solve(mdp, &opts, out.c_str(), policy.c_str(),
                                    &final_gap);
        mdprl_mdp_free(mdp);
        if (rc != MDPRL_OK) return fail(rc);
        if (opts.oracle_eval) std::printf("final_gap %.17g\n", final_gap);
        return MDPRL_OK;
    }

    if (verify->parsed()) {
        if (verify_mdp.empty() == verify_suite.empty()) {
            std::fprintf(stderr,
                         "error: verify needs exactly one of --mdp or --suite\n");
            return MDPRL_BAD_ARGS;
        }
        char* report = nullptr;
        int rc;
        if (!verify_suite.empty()) {
            if (verify_suite != "standard") {
                std::fprintf(stderr, "error: unknown suite '%s'\n",
                             verify_suite.c_str());
                return MDPRL_BAD_ARGS;
            }
            rc = mdprl_verify_standard(verify_tol, &report);
        } else {
            mdprl_mdp* mdp = nullptr;
            rc = mdprl_mdp_load(verify_mdp.c_str(), &mdp);
            if (rc != MDPRL_OK) return fail(rc);
            rc = mdprl_verify_mdp(mdp, verify_tol, &report);
            mdprl_mdp_free(mdp);
        }
        if (report) {
            std::fputs(report, stdout);
            mdprl_string_free(report);
        }
        if (rc != MDPRL_OK && rc != MDPRL_VERIFY_FAIL) return fail(rc);
        return rc;
    }

    if (bench->parsed()) {
        const int rc =
            mdprl_sweep(bench_spec.c_str(), bench_workers, bench_out.c_str());
        if (rc != MDPRL_OK) return fail(rc);
        return MDPRL_OK;
    }

    if (gen->parsed()) {
        mdprl_mdp* mdp = nullptr;
        int rc;
        if (gen_kind == "counterexample") {
            rc = mdprl_gen_counterexample(gen_gamma, &mdp);
        } else if (gen_kind == "random") {
            rc = mdprl_gen_random(gen_states, gen_actions, gen_branching,
                                  gen_seed, gen_gamma, &mdp);
        } else {
            rc = mdprl_gen_gridworld(gen_width, gen_height, gen_slip, gen_gamma,
                                     &mdp);
        }
        if (rc != MDPRL_OK) return fail(rc);
        rc = mdprl_mdp_save(mdp, gen_out.c_str());
        mdprl_mdp_free(mdp);
        if (rc != MDPRL_OK) return fail(rc);
        return MDPRL_OK;
    }

    return MDPRL_BAD_ARGS;
}
