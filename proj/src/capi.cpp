#include "mdprl.h"

#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <exception>
#include <string>

#include "io.hpp"
#include "verify.hpp"

namespace {

thread_local std::string g_last_error;

char* dup_string(const std::string& s) {
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (out) std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

int set_error(int code, const std::string& msg) {
    g_last_error = msg;
    return code;
}

// Maps the library's exception taxonomy onto status codes.
template <typename Fn>
int guarded(Fn&& fn) {
    try {
        return fn();
    } catch (const mdprl::IoError& e) {
        return set_error(MDPRL_IO_ERROR, e.what());
    } catch (const mdprl::InvalidInputError& e) {
        return set_error(MDPRL_INVALID_INPUT, e.what());
    } catch (const std::invalid_argument& e) {
        return set_error(MDPRL_BAD_ARGS, e.what());
    } catch (const std::exception& e) {
        return set_error(MDPRL_INVALID_INPUT, e.what());
    }
}

mdprl::SolverConfig to_config(const mdprl_solve_options& opts) {
    mdprl::SolverConfig cfg;
    cfg.steps = opts.steps;
    cfg.eta = opts.eta;
    cfg.eta_auto = opts.eta_auto != 0;
    cfg.seed = opts.seed;
    cfg.eval_with_oracle = opts.oracle_eval != 0;
    for (int i = 0; i < opts.num_checkpoints; ++i)
        cfg.checkpoints.push_back(opts.checkpoints[i]);
    return cfg;
}

std::vector<mdprl::SweepRecord> checkpoint_records(const mdprl::RunMetrics& m,
                                                   unsigned long long seed) {
    std::vector<mdprl::SweepRecord> recs;
    for (std::size_t i = 0; i < m.checkpoints.size(); ++i) {
        const auto& c = m.checkpoints[i];
        recs.push_back({i, seed, c.n, c.eta, c.value_gap, c.residual_cert,
                        c.queries, c.elapsed_ms});
    }
    return recs;
}

}  // namespace

struct mdprl_mdp {
    mdprl::TabularMdp impl;
};

extern "C" {

const char* mdprl_last_error(void) { return g_last_error.c_str(); }

void mdprl_string_free(char* s) { std::free(s); }

int mdprl_mdp_load(const char* path, mdprl_mdp** out) {
    if (!path || !out) return set_error(MDPRL_BAD_ARGS, "null argument");
    return guarded([&] {
        *out = new mdprl_mdp{mdprl::load_mdp(path)};
        return MDPRL_OK;
    });
}

int mdprl_mdp_save(const mdprl_mdp* mdp, const char* path) {
    if (!mdp || !path) return set_error(MDPRL_BAD_ARGS, "null argument");
    return guarded([&] {
        mdprl::save_mdp(path, mdp->impl);
        return MDPRL_OK;
    });
}

int mdprl_mdp_validate(const mdprl_mdp* mdp, char** report) {
    if (!mdp) return set_error(MDPRL_BAD_ARGS, "null argument");
    return guarded([&] {
        const auto bad = mdprl::validate(mdp->impl);
        if (report) {
            if (bad.empty()) {
                *report = nullptr;
            } else {
                std::string text;
                for (const auto& line : bad) text += line + "\n";
                *report = dup_string(text);
            }
        }
        return bad.empty() ? MDPRL_OK : MDPRL_INVALID_INPUT;
    });
}

int mdprl_mdp_dims(const mdprl_mdp* mdp, int* num_states, int* num_actions,
                   double* gamma) {
    if (!mdp) return set_error(MDPRL_BAD_ARGS, "null argument");
    if (num_states) *num_states = mdp->impl.num_states;
    if (num_actions) *num_actions = mdp->impl.num_actions;
    if (gamma) *gamma = mdp->impl.gamma;
    return MDPRL_OK;
}

void mdprl_mdp_free(mdprl_mdp* mdp) { delete mdp; }

int mdprl_gen_counterexample(double gamma, mdprl_mdp** out) {
    if (!out) return set_error(MDPRL_BAD_ARGS, "null argument");
    return guarded([&] {
        *out = new mdprl_mdp{mdprl::gen_counterexample(gamma).mdp};
        return MDPRL_OK;
    });
}

int mdprl_gen_random(int num_states, int num_actions, int branching,
                     unsigned long long seed, double gamma, mdprl_mdp** out) {
    if (!out) return set_error(MDPRL_BAD_ARGS, "null argument");
    return guarded([&] {
        *out = new mdprl_mdp{
            mdprl::gen_random_mdp(num_states, num_actions, branching, seed, gamma)};
        return MDPRL_OK;
    });
}

int mdprl_gen_gridworld(int width, int height, double slip, double gamma,
                        mdprl_mdp** out) {
    if (!out) return set_error(MDPRL_BAD_ARGS, "null argument");
    return guarded([&] {
        *out = new mdprl_mdp{mdprl::gen_gridworld(width, height, slip, gamma)};
        return MDPRL_OK;
    });
}

void mdprl_solve_options_init(mdprl_solve_options* opts) {
    if (!opts) return;
    opts->steps = 1000;
    opts->eta = 0.0;
    opts->eta_auto = 1;
    opts->seed = 0;
    opts->oracle_eval = 1;
    opts->checkpoints = nullptr;
    opts->num_checkpoints = 0;
}

int mdprl_solve(const mdprl_mdp* mdp, const mdprl_solve_options* opts,
                const char* metrics_csv_path, const char* policy_path,
                double* final_gap) {
    if (!mdp || !opts) return set_error(MDPRL_BAD_ARGS, "null argument");
    return guarded([&] {
        const mdprl::RunMetrics m = mdprl::run(mdp->impl, to_config(*opts));
        if (metrics_csv_path) {
            char comment[64];
            std::snprintf(comment, sizeof(comment), "eta=%.17g", m.resolved_eta);
            mdprl::write_metrics_csv(metrics_csv_path,
                                     checkpoint_records(m, opts->seed), comment);
        }
        if (policy_path) mdprl::write_policy(policy_path, m.policy);
        if (final_gap) *final_gap = m.final_gap;
        return MDPRL_OK;
    });
}

int mdprl_solve_features(const mdprl_mdp* mdp, const mdprl_solve_options* opts,
                         const char* basis_path, double c_v,
                         const char* metrics_csv_path, const char* policy_path,
                         double* final_gap) {
    if (!mdp || !opts || !basis_path)
        return set_error(MDPRL_BAD_ARGS, "null argument");
    return guarded([&] {
        const mdprl::TabularMdp& m = mdp->impl;
        mdprl::FeatureBasis basis =
            std::string(basis_path) == "tabular"
                ? mdprl::tabular_basis(m.num_states, m.num_actions)
                : mdprl::load_basis(basis_path, m.num_states, m.num_actions);
        mdprl::FeatureConfig cfg;
        cfg.c_v = c_v;
        cfg.steps = opts->steps;
        cfg.eta = opts->eta;
        cfg.eta_auto = opts->eta_auto != 0;
        cfg.seed = opts->seed;
        cfg.eval_with_oracle = opts->oracle_eval != 0;
        for (int i = 0; i < opts->num_checkpoints; ++i)
            cfg.checkpoints.push_back(opts->checkpoints[i]);
        const mdprl::RunMetrics metrics = mdprl::run_features(m, basis, cfg);
        if (metrics_csv_path) {
            char comment[64];
            std::snprintf(comment, sizeof(comment), "eta=%.17g",
                          metrics.resolved_eta);
            mdprl::write_metrics_csv(metrics_csv_path,
                                     checkpoint_records(metrics, opts->seed),
                                     comment);
        }
        if (policy_path) mdprl::write_policy(policy_path, metrics.policy);
        if (final_gap) *final_gap = metrics.final_gap;
        return MDPRL_OK;
    });
}

int mdprl_verify_mdp(const mdprl_mdp* mdp, double tol, char** report) {
    if (!mdp) return set_error(MDPRL_BAD_ARGS, "null argument");
    return guarded([&] {
        const mdprl::VerifyReport rep = mdprl::verify_mdp(mdp->impl, tol, 50, 7);
        if (report) *report = dup_string(rep.to_text());
        return rep.all_pass() ? MDPRL_OK : MDPRL_VERIFY_FAIL;
    });
}

int mdprl_verify_standard(double tol, char** report) {
    return guarded([&] {
        const mdprl::VerifyReport rep = mdprl::verify_standard(tol);
        if (report) *report = dup_string(rep.to_text());
        return rep.all_pass() ? MDPRL_OK : MDPRL_VERIFY_FAIL;
    });
}

int mdprl_sweep(const char* spec_path, int workers, const char* out_csv_path) {
    if (!spec_path) return set_error(MDPRL_BAD_ARGS, "null argument");
    return guarded([&] {
        mdprl::SweepSpec spec = mdprl::load_sweep_spec(spec_path);
        if (workers > 0) spec.workers = workers;
        if (out_csv_path) spec.output_path = out_csv_path;
        mdprl::run_sweep(spec);
        return MDPRL_OK;
    });
}

}  // extern "C"
