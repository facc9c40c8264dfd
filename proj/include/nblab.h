/* C interface of the nblab numerical library.
 *
 * Every function returns an nblab_status. On failure the message of the last
 * error on the calling thread is available from nblab_last_error(). Objects
 * are opaque handles released with their *_free function; passing NULL to a
 * *_free function is a no-op. Output pointers are only written on success.
 */
#ifndef NBLAB_H
#define NBLAB_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define NBLAB_API __declspec(dllexport)
#else
#define NBLAB_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum {
  NBLAB_OK = 0,
  NBLAB_ERR_DOMAIN = 1,
  NBLAB_ERR_RESOURCE = 2,
  NBLAB_ERR_CAPABILITY = 3,
  NBLAB_ERR_DATA = 4,
  NBLAB_ERR_CONTRACT = 5,
  NBLAB_ERR_RANGE = 6,
  NBLAB_ERR_POLE = 7,
  NBLAB_ERR_IO = 8,
  NBLAB_ERR_INVALID_ARGUMENT = 9,
  NBLAB_ERR_INTERNAL = 10
} nblab_status;

typedef enum { NBLAB_PSI_CLOSED_FORM = 0, NBLAB_PSI_MUNTZ_SERIES = 1, NBLAB_PSI_MONTE_CARLO = 2, NBLAB_PSI_AUTOMATIC = 3 } nblab_psi_method;

typedef enum { NBLAB_MODE_DETERMINISTIC = 0, NBLAB_MODE_GNB = 1, NBLAB_MODE_PNB = 2 } nblab_mode;

typedef struct nblab_distribution nblab_distribution;
typedef struct nblab_basis nblab_basis;
typedef struct nblab_gram nblab_gram;
typedef struct nblab_report nblab_report;
typedef struct nblab_grid nblab_grid;

/* ---- errors and constants ---------------------------------------------- */

NBLAB_API const char* nblab_version(void);
NBLAB_API const char* nblab_status_name(nblab_status status);
/* Message of the last failed call on this thread ("" if none). */
NBLAB_API const char* nblab_last_error(void);
/* Tightest tolerance reachable within budget, for NBLAB_ERR_RESOURCE; 0 otherwise. */
NBLAB_API double nblab_last_error_achievable(void);

NBLAB_API nblab_status nblab_constants(double* euler_gamma, double* k_value, double* k_err);
NBLAB_API nblab_status nblab_burnol_constant(double* out);

/* ---- fractional-part dilations ----------------------------------------- */

NBLAB_API nblab_status nblab_rho_eval(double theta, double t, double* out);
NBLAB_API nblab_status nblab_inner_rho_rho(double a, double b, double tol, double* value, double* err);
NBLAB_API nblab_status nblab_inner_chi_rho(double theta, double tol, double* value, double* err);
NBLAB_API nblab_status nblab_norm_rho_sq(double theta, double* value, double* err);

/* ---- distributions ------------------------------------------------------ */

/* Literal grammar: pointmass:T, exp:L, gamma:B:L, sqgamma:B:L, scaled:C:<literal>. */
NBLAB_API nblab_status nblab_distribution_parse(const char* literal, nblab_distribution** out);
NBLAB_API nblab_status nblab_distribution_clone(const nblab_distribution* d, nblab_distribution** out);
NBLAB_API void nblab_distribution_free(nblab_distribution* d);
/* Writes at most cap bytes including the terminator; *needed gets the full length + 1. */
NBLAB_API nblab_status nblab_distribution_to_string(const nblab_distribution* d, char* buf, size_t cap, size_t* needed);
NBLAB_API nblab_status nblab_distribution_moment(const nblab_distribution* d, double alpha, double* out);
NBLAB_API nblab_status nblab_distribution_mean(const nblab_distribution* d, double* out);
NBLAB_API nblab_status nblab_distribution_survival(const nblab_distribution* d, double x, double* out);
NBLAB_API nblab_status nblab_distribution_cdf(const nblab_distribution* d, double x, double* out);
NBLAB_API nblab_status nblab_distribution_density_variation(const nblab_distribution* d, double* out);
NBLAB_API nblab_status nblab_distribution_sample(const nblab_distribution* d, uint64_t seed, uint64_t stream,
                                                 size_t count, uint64_t first_index, double* out);
NBLAB_API nblab_status nblab_mean_beurling(const nblab_distribution* d, double t, nblab_psi_method method,
                                           size_t mc_count, uint64_t seed, unsigned threads, double* value,
                                           double* std_error);
NBLAB_API nblab_status nblab_mean_rho_norm_sq(const nblab_distribution* d, double* out);

/* ---- bases -------------------------------------------------------------- */

NBLAB_API nblab_status nblab_basis_create(nblab_mode mode, nblab_basis** out);
/* Named family (bd, exp-dilated, gamma-kn, concentrated). scale <= 0 selects the
 * preset default; mode < 0 selects the preset's default mode. */
NBLAB_API nblab_status nblab_basis_preset(const char* name, int n, double scale, double vartheta, int mode,
                                          nblab_basis** out);
NBLAB_API void nblab_basis_free(nblab_basis* b);
NBLAB_API nblab_status nblab_basis_add(nblab_basis* b, const nblab_distribution* d);
NBLAB_API nblab_status nblab_basis_add_literal(nblab_basis* b, const char* literal);
NBLAB_API nblab_status nblab_basis_set_mode(nblab_basis* b, nblab_mode mode);
NBLAB_API nblab_status nblab_basis_get_mode(const nblab_basis* b, nblab_mode* out);
NBLAB_API nblab_status nblab_basis_set_independence(nblab_basis* b, int independent);
NBLAB_API nblab_status nblab_basis_set_target_chi(nblab_basis* b);
NBLAB_API nblab_status nblab_basis_set_target_survival(nblab_basis* b, const nblab_distribution* d);
NBLAB_API nblab_status nblab_basis_size(const nblab_basis* b, size_t* out);
NBLAB_API nblab_status nblab_basis_element(const nblab_basis* b, size_t index, nblab_distribution** out);
NBLAB_API nblab_status nblab_basis_target_to_string(const nblab_basis* b, char* buf, size_t cap, size_t* needed);

/* ---- Gram systems and distances ---------------------------------------- */

NBLAB_API nblab_status nblab_gram_deterministic(const double* thetas, size_t n, double tol, unsigned threads,
                                                nblab_gram** out);
/* Gram system of a basis in any mode. */
NBLAB_API nblab_status nblab_gram_assemble(const nblab_basis* b, double tol, unsigned threads, nblab_gram** out);
/* Leading n x n subsystem. */
NBLAB_API nblab_status nblab_gram_leading(const nblab_gram* g, size_t n, nblab_gram** out);
NBLAB_API void nblab_gram_free(nblab_gram* g);
NBLAB_API nblab_status nblab_gram_size(const nblab_gram* g, size_t* out);
NBLAB_API nblab_status nblab_gram_entry(const nblab_gram* g, size_t k, size_t l, double* value, double* err);
NBLAB_API nblab_status nblab_gram_rhs(const nblab_gram* g, size_t k, double* value, double* err);
NBLAB_API nblab_status nblab_gram_target_norm_sq(const nblab_gram* g, double* value, double* err);

NBLAB_API nblab_status nblab_solve(const nblab_gram* g, double cutoff, nblab_report** out);
/* coeffs may be NULL for the optimal projection. */
NBLAB_API nblab_status nblab_gnb_distance(const nblab_basis* b, const double* coeffs, size_t n, double tol,
                                          unsigned threads, nblab_report** out);
NBLAB_API nblab_status nblab_pnb_distance(const nblab_basis* b, const double* coeffs, size_t n, double tol,
                                          unsigned threads, nblab_report** out);
NBLAB_API nblab_status nblab_residual(const nblab_gram* g, const double* coeffs, size_t n, double* value,
                                      double* slack);
NBLAB_API void nblab_report_free(nblab_report* r);
NBLAB_API nblab_status nblab_report_distance_sq(const nblab_report* r, double* out);
NBLAB_API nblab_status nblab_report_raw_distance_sq(const nblab_report* r, double* out);
NBLAB_API nblab_status nblab_report_slack(const nblab_report* r, double* out);
NBLAB_API nblab_status nblab_report_condition(const nblab_report* r, double* out);
NBLAB_API nblab_status nblab_report_dropped_modes(const nblab_report* r, size_t* out);
NBLAB_API nblab_status nblab_report_reg_cutoff(const nblab_report* r, double* out);
NBLAB_API nblab_status nblab_report_clamped(const nblab_report* r, int* out);
/* Copies min(cap, n) coefficients; *n_out gets n. */
NBLAB_API nblab_status nblab_report_coeffs(const nblab_report* r, double* out, size_t cap, size_t* n_out);

/* ---- criteria ----------------------------------------------------------- */

NBLAB_API nblab_status nblab_mobius(int n, int* out);
NBLAB_API nblab_status nblab_mobius_coefficients(int n, double epsilon, double* out);
NBLAB_API nblab_status nblab_nu_eval(int n, double epsilon, double tol, unsigned threads, double* value,
                                     double* slack);
/* nu from a deterministic system with thetas 1/k. */
NBLAB_API nblab_status nblab_nu_from_gram(const nblab_gram* g, int n, double epsilon, double* value, double* slack);
NBLAB_API nblab_status nblab_assumption_p(const nblab_basis* b, double* out);
NBLAB_API nblab_status nblab_suffi_bound(const nblab_basis* b, size_t mc_count, uint64_t seed, unsigned threads,
                                         double* value, double* mean_abs_log_min, double* std_error);
/* coeffs holds count vectors back to back; lengths[i] is the length of vector i. */
NBLAB_API nblab_status nblab_condition_c(const double* coeffs, const size_t* lengths, size_t count, double beta,
                                         double* value, int* growing);
/* Family is the basis elements Z_1..Z_n. */
NBLAB_API nblab_status nblab_moment_growth(const nblab_basis* family, double alpha, double* sup, int* argmax,
                                           int* violation);
/* target NULL means chi. */
NBLAB_API nblab_status nblab_t2_check(const nblab_distribution* target, double m, double* value, double* err);
NBLAB_API nblab_status nblab_gamma_kn_tail_term(int n, double beta, double m, double* out);

/* ---- Muntz transform ---------------------------------------------------- */

NBLAB_API nblab_status nblab_muntz_transform(const nblab_distribution* d, double t, double tol, double* out);
NBLAB_API nblab_status nblab_muntz_transform_sampled(const double* x, const double* f, size_t n, double t, double tol,
                                                     double* out);
NBLAB_API nblab_status nblab_muntz_transform_csv(const char* path, double t, double tol, double* out);
/* Each output array has nt entries; any of them may be NULL. */
NBLAB_API nblab_status nblab_identity_gap(const nblab_distribution* d, const double* t, size_t nt, size_t mc_count,
                                          uint64_t seed, unsigned threads, double* gap, double* std_error,
                                          double* mc_mean, double* transform);

/* ---- zeta and the critical line ---------------------------------------- */

NBLAB_API nblab_status nblab_zeta(double re, double im, double* out_re, double* out_im, double* method_gap,
                                  int* degraded);
NBLAB_API nblab_status nblab_log_gamma(double re, double im, double* out_re, double* out_im);
NBLAB_API nblab_status nblab_hardy_z(double t, double* out);
NBLAB_API nblab_status nblab_bracket_zero(double lo, double hi, double tol, double* out);

NBLAB_API nblab_status nblab_grid_build(double t_max, double step, double fine_step, double fine_until,
                                        unsigned threads, nblab_grid** out);
/* Loads path when it matches the parameters, otherwise builds and writes it. */
NBLAB_API nblab_status nblab_grid_cached(const char* path, double t_max, double step, double fine_step,
                                         double fine_until, unsigned threads, nblab_grid** out);
NBLAB_API nblab_status nblab_grid_load(const char* path, nblab_grid** out);
NBLAB_API nblab_status nblab_grid_save(const nblab_grid* g, const char* path);
NBLAB_API void nblab_grid_free(nblab_grid* g);
NBLAB_API nblab_status nblab_grid_info(const nblab_grid* g, size_t* points, double* t_max, double* max_method_gap);

NBLAB_API nblab_status nblab_plancherel(const nblab_basis* b, const double* coeffs, size_t n, const nblab_grid* g,
                                        double* value, double* tail_bound);
/* Output arrays have nt entries; any of them may be NULL. */
NBLAB_API nblab_status nblab_vn_profile(const nblab_basis* family, double epsilon, const double* t, size_t nt,
                                        size_t mc_count, uint64_t seed, unsigned threads, double* mean,
                                        double* std_error, double* bound, double* bound_mc);

#ifdef __cplusplus
}
#endif

#endif
