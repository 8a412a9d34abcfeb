#ifndef MDPRL_H
#define MDPRL_H

/* C interface to the discounted-MDP saddle-point solver.  All functions
 * return a status code; details for failures are available from
 * mdprl_last_error().  Strings returned through char** out-parameters are
 * owned by the caller and released with mdprl_string_free(). */

#ifdef __cplusplus
extern "C" {
#endif

enum mdprl_status {
    MDPRL_OK = 0,
    MDPRL_VERIFY_FAIL = 1,
    MDPRL_BAD_ARGS = 2,
    MDPRL_INVALID_INPUT = 3,
    MDPRL_IO_ERROR = 4
};

typedef struct mdprl_mdp mdprl_mdp;

/* Thread-local message for the most recent failure. */
const char* mdprl_last_error(void);
void mdprl_string_free(char* s);

/* ---- MDP lifecycle ---- */

int mdprl_mdp_load(const char* path, mdprl_mdp** out);
int mdprl_mdp_save(const mdprl_mdp* mdp, const char* path);
/* *report receives a newline-separated violation list, or NULL when valid. */
int mdprl_mdp_validate(const mdprl_mdp* mdp, char** report);
int mdprl_mdp_dims(const mdprl_mdp* mdp, int* num_states, int* num_actions,
                   double* gamma);
void mdprl_mdp_free(mdprl_mdp* mdp);

/* ---- Generators ---- */

int mdprl_gen_counterexample(double gamma, mdprl_mdp** out);
int mdprl_gen_random(int num_states, int num_actions, int branching,
                     unsigned long long seed, double gamma, mdprl_mdp** out);
int mdprl_gen_gridworld(int width, int height, double slip, double gamma,
                        mdprl_mdp** out);

/* ---- Solvers ---- */

typedef struct {
    long long steps;
    double eta;        /* ignored when eta_auto != 0 */
    int eta_auto;
    unsigned long long seed;
    int oracle_eval;   /* fill gap/residual columns via exact solvers */
    const long long* checkpoints; /* NULL/0: powers of two plus the final step */
    int num_checkpoints;
} mdprl_solve_options;

/* Fills *opts with the defaults (auto eta, seed 0, oracle on). */
void mdprl_solve_options_init(mdprl_solve_options* opts);

/* Runs mirror descent.  metrics_csv_path and policy_path may be NULL to skip
 * the corresponding output; final_gap may be NULL. */
int mdprl_solve(const mdprl_mdp* mdp, const mdprl_solve_options* opts,
                const char* metrics_csv_path, const char* policy_path,
                double* final_gap);

/* Linear-basis variant.  basis_path may be "tabular" for the identity basis
 * or a path to a basis document. */
int mdprl_solve_features(const mdprl_mdp* mdp, const mdprl_solve_options* opts,
                         const char* basis_path, double c_v,
                         const char* metrics_csv_path, const char* policy_path,
                         double* final_gap);

/* ---- Verification ---- */

/* Identity-certificate suites.  *report receives the per-check text.
 * Returns MDPRL_VERIFY_FAIL when any check exceeds tol. */
int mdprl_verify_mdp(const mdprl_mdp* mdp, double tol, char** report);
int mdprl_verify_standard(double tol, char** report);

/* ---- Sweeps ---- */

/* Runs the sweep described by the spec document and writes the metrics CSV
 * to out_csv_path (may be NULL when the spec carries its own output path).
 * workers <= 0 keeps the value from the spec document. */
int mdprl_sweep(const char* spec_path, int workers, const char* out_csv_path);

#ifdef __cplusplus
}
#endif

#endif /* MDPRL_H */
