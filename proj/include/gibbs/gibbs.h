/* C interface to the Gibbs-state library.
 *
 * All objects are opaque handles owned by the caller and released with the
 * matching *_free function (NULL is accepted). Functions return a status
 * code; on failure gibbs_last_error() describes the problem for the calling
 * thread. Infinite values (e.g. entropy endpoints) are reported as IEEE inf.
 */
#ifndef GIBBS_GIBBS_H
#define GIBBS_GIBBS_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define GIBBS_API __declspec(dllexport)
#else
#define GIBBS_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum gibbs_status {
    GIBBS_OK = 0,
    GIBBS_ERR_INVALID_ARGUMENT = 1, /* malformed input or violated precondition */
    GIBBS_ERR_OUT_OF_RANGE = 2,     /* beyond the trusted spectrum, or infeasible target */
    GIBBS_ERR_SOLVER = 3,           /* no convergence or uncertified result */
    GIBBS_ERR_IO = 4,
    GIBBS_ERR_INTERNAL = 5
} gibbs_status;

typedef struct gibbs_model gibbs_model;
typedef struct gibbs_spectrum gibbs_spectrum;
typedef struct gibbs_state gibbs_state;

/* Cutoff rank encoding in gibbs_thermo.rank */
#define GIBBS_RANK_EMPTY (-1)
#define GIBBS_RANK_UNBOUNDED (-2)

typedef struct gibbs_thermo {
    double T;
    double mu;
    double energy;
    double entropy;
    double free_energy;
    int64_t rank; /* last occupied level, or GIBBS_RANK_EMPTY / GIBBS_RANK_UNBOUNDED */
    int rank_one; /* 1 on the pinned branch below the critical temperature */
    double tail_bound;
} gibbs_thermo;

GIBBS_API const char* gibbs_version(void);
GIBBS_API const char* gibbs_last_error(void);

/* ---- entropy models ---- */

/* name: boltzmann, fermi_dirac, bose_einstein or tsallis. Pass NaN for q or
 * gamma to use the defaults (q is required for tsallis). */
GIBBS_API gibbs_status gibbs_model_create(const char* name, double n_bar, double q, double gamma, gibbs_model** out);
GIBBS_API void gibbs_model_free(gibbs_model* model);
/* Copy of the model with the domain cap replaced. */
GIBBS_API gibbs_status gibbs_model_with_n_bar(const gibbs_model* model, double n_bar, gibbs_model** out);
GIBBS_API gibbs_status gibbs_model_name(const gibbs_model* model, char* buffer, size_t capacity);
GIBBS_API gibbs_status gibbs_model_beta(const gibbs_model* model, double x, double* out);
GIBBS_API gibbs_status gibbs_model_xi(const gibbs_model* model, double t, double* out);
GIBBS_API gibbs_status gibbs_model_xi_T(const gibbs_model* model, double T, double x, double* out);
GIBBS_API gibbs_status gibbs_model_endpoints(const gibbs_model* model, double* beta_minus, double* beta_plus);
GIBBS_API gibbs_status gibbs_model_validate_growth(const gibbs_model* model, int samples, int dimension,
                                                   int* accepted);

/* ---- spectra ---- */

/* Lowest K eigenpairs of -Laplacian + 1 + |x|^theta on (-L, L)^d with N
 * interior points per axis. */
GIBBS_API gibbs_status gibbs_spectrum_solve(int dimension, double half_width, int points, double theta, size_t K,
                                            int eigenvectors, gibbs_spectrum** out);
/* Spectrum given in closed form, without eigenvectors. */
GIBBS_API gibbs_status gibbs_spectrum_from_eigenvalues(const double* eigenvalues, size_t count, int dimension,
                                                       double theta, gibbs_spectrum** out);
GIBBS_API void gibbs_spectrum_free(gibbs_spectrum* spectrum);
GIBBS_API gibbs_status gibbs_spectrum_count(const gibbs_spectrum* spectrum, size_t* out);
/* Copies min(count, capacity) eigenvalues. */
GIBBS_API gibbs_status gibbs_spectrum_eigenvalues(const gibbs_spectrum* spectrum, double* out, size_t capacity);
GIBBS_API gibbs_status gibbs_spectrum_trusted_cap(const gibbs_spectrum* spectrum, double* out);
GIBBS_API gibbs_status gibbs_counting_function(const gibbs_spectrum* spectrum, double E, size_t* out);
GIBBS_API gibbs_status gibbs_riesz_mean(const gibbs_spectrum* spectrum, double E, double s, double* out);

/* ---- Gibbs states ---- */

GIBBS_API gibbs_status gibbs_partition_function(const gibbs_model* model, const gibbs_spectrum* spectrum, double T,
                                                double mu, double* out);
GIBBS_API gibbs_status gibbs_solve_mu(const gibbs_model* model, const gibbs_spectrum* spectrum, double T,
                                      double n_bar, double* out);
GIBBS_API gibbs_status gibbs_critical_temperature(const gibbs_model* model, const gibbs_spectrum* spectrum,
                                                  double* out);
GIBBS_API gibbs_status gibbs_state_build(const gibbs_model* model, const gibbs_spectrum* spectrum, double T,
                                         double n_bar, gibbs_state** out);
GIBBS_API void gibbs_state_free(gibbs_state* state);
GIBBS_API gibbs_status gibbs_state_thermo(const gibbs_state* state, gibbs_thermo* out);
/* Writes up to capacity occupations; *count receives the full length. */
GIBBS_API gibbs_status gibbs_state_occupations(const gibbs_state* state, double* out, size_t capacity,
                                               size_t* count);

/* Relative residual of F(T2) - F(T1) against the entropy integral. */
GIBBS_API gibbs_status gibbs_eqf_check(const gibbs_model* model, const gibbs_spectrum* spectrum, double n_bar,
                                       double T1, double T2, double* residual);
GIBBS_API gibbs_status gibbs_mu_derivative_check(const gibbs_model* model, const gibbs_spectrum* spectrum,
                                                 double n_bar, double T, double* mu_relative_error,
                                                 double* entropy_relative_residual);
/* Entropy minimizer under trace a0, current b0 (dimension values) and energy c.
 * The state lives on the cap a0; *gauge receives b = b0 / a0. */
GIBBS_API gibbs_status gibbs_min_entropy_global(const gibbs_model* model, const gibbs_spectrum* spectrum, double a0,
                                                const double* b0, size_t dimension, double c, gibbs_state** out,
                                                double* gauge);
/* Integrals of n, u (dimension values) and e for the state, optionally
 * transformed by e^{i b.x} (b may be NULL). *admissible is 1 when the
 * pointwise and integrated admissibility bounds hold. Needs eigenvectors. */
GIBBS_API gibbs_status gibbs_state_field_integrals(const gibbs_spectrum* spectrum, const gibbs_state* state,
                                                   const double* b, size_t dimension, double* int_n, double* int_u,
                                                   double* int_e, int* admissible);

/* ---- semiclassical constants ---- */

GIBBS_API gibbs_status gibbs_weyl_constant(double s, int dimension, double* out);
GIBBS_API gibbs_status gibbs_phase_space_volume(double E, double s, int dimension, double theta, double* out);
GIBBS_API gibbs_status gibbs_kappa(double s, int dimension, double theta, double* out);
GIBBS_API gibbs_status gibbs_predicted_scaling_exponent(double s, int dimension, double theta, double* out);

/* ---- batch commands ---- */

/* Runs a report command (spectrum, solve, sweep, eqf, global-min, weyl, fit,
 * check) on an INI config, writing reports into out_dir. *exit_status gets
 * 0 (ok), 1 (check violations), 2 (config or precondition error) or 3
 * (solver failure); diagnostics go to stderr. */
GIBBS_API gibbs_status gibbs_run_command(const char* command, const char* config_path, const char* out_dir,
                                         int* exit_status);

#ifdef __cplusplus
}
#endif

#endif
