/*
 * sgstab: stochastic Galerkin projection of parametric ODEs with a
 * Lyapunov/Cholesky transformation that preserves asymptotic stability.
 *
 * C interface. Every function returning sgs_status leaves a description of
 * the last failure in a thread-local buffer readable with
 * sgs_last_error_message(). Matrices are dense row-major arrays of double.
 * Basis indices are 1-based. Handles are opaque and owned by the caller,
 * who releases them with the matching *_destroy function (NULL is accepted).
 */
#ifndef SGSTAB_H
#define SGSTAB_H

#include <stddef.h>

#if defined(SGS_BUILDING_LIBRARY)
#define SGS_API __attribute__((visibility("default")))
#else
#define SGS_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

#define SGS_API_VERSION 1u

typedef enum sgs_status {
  SGS_OK = 0,
  SGS_ERR_USAGE = 1,
  SGS_ERR_PARAMETER_DOMAIN = 2,
  SGS_ERR_SINGULAR = 3,
  SGS_ERR_NOT_POSITIVE_DEFINITE = 4,
  SGS_ERR_NON_CONVERGENCE = 5,
  SGS_ERR_NO_UNIQUE_SOLUTION = 6,
  SGS_ERR_INSUFFICIENT_QUADRATURE = 7,
  SGS_ERR_INTEGRATION = 8,
  SGS_ERR_CONFIG = 9,
  SGS_ERR_IO = 10,
  SGS_ERR_INTERNAL = 11
} sgs_status;

typedef enum sgs_density_kind {
  SGS_DENSITY_UNIFORM = 0,
  SGS_DENSITY_BETA = 1
} sgs_density_kind;

typedef enum sgs_variant {
  SGS_VARIANT_ORIGINAL = 0,
  SGS_VARIANT_SHIFTED = 1,
  SGS_VARIANT_STABILIZED = 2
} sgs_variant;

typedef struct sgs_basis sgs_basis;
typedef struct sgs_quadrature sgs_quadrature;
typedef struct sgs_system sgs_system;
typedef struct sgs_nonlinear_galerkin sgs_nonlinear_galerkin;
typedef struct sgs_trajectory sgs_trajectory;
typedef struct sgs_config sgs_config;

SGS_API unsigned sgs_api_version(void);
SGS_API const char *sgs_status_name(sgs_status status);
SGS_API const char *sgs_last_error_message(void);

/* Dense kernels ---------------------------------------------------------- */

/* Solves A X = B for n x n A and n x k B. */
SGS_API sgs_status sgs_lu_solve(const double *a, size_t n, const double *b, size_t k, double *x);
/* Lower-triangular L with M = L L^T. */
SGS_API sgs_status sgs_cholesky(const double *m, size_t n, double *l);
/* n eigenvalues, descending real part, ties by ascending imaginary part. */
SGS_API sgs_status sgs_eigenvalues(const double *a, size_t n, double *re, double *im);
SGS_API sgs_status sgs_spectral_abscissa(const double *a, size_t n, double *abscissa);
/* Solves A^T M + M A + Q = 0. */
SGS_API sgs_status sgs_lyapunov_solve(const double *a, const double *q, size_t n, double *m);
/* M from the Lyapunov equation, its Cholesky factor L and B = L^T A L^-T.
 * Any output pointer may be NULL. */
SGS_API sgs_status sgs_stabilize_point(const double *a, const double *q, size_t n, double *m,
                                       double *l, double *b);

/* Orthonormal bases and Gauss rules -------------------------------------- */

/* alpha and beta are ignored for the uniform density. */
SGS_API sgs_status sgs_basis_create(sgs_density_kind kind, double alpha, double beta, size_t size,
                                    sgs_basis **out);
SGS_API void sgs_basis_destroy(sgs_basis *basis);
SGS_API size_t sgs_basis_size(const sgs_basis *basis);
SGS_API sgs_status sgs_basis_evaluate(const sgs_basis *basis, size_t index, double p, double *value);

SGS_API sgs_status sgs_quadrature_create(sgs_density_kind kind, double alpha, double beta,
                                         size_t nodes, sgs_quadrature **out);
SGS_API void sgs_quadrature_destroy(sgs_quadrature *rule);
SGS_API size_t sgs_quadrature_size(const sgs_quadrature *rule);
/* Copies sgs_quadrature_size() nodes and weights; either pointer may be NULL. */
SGS_API sgs_status sgs_quadrature_get(const sgs_quadrature *rule, double *nodes, double *weights);

/* Built-in systems: "paper-linear" (3x3 linear) and "paper-quadratic" (2-D). */

SGS_API sgs_status sgs_system_create_builtin(const char *name, sgs_system **out);
SGS_API void sgs_system_destroy(sgs_system *system);
SGS_API size_t sgs_system_dimension(const sgs_system *system);
SGS_API int sgs_system_is_linear(const sgs_system *system);
/* Linear systems: A(p). Nonlinear systems: Jacobian at the equilibrium x*(p). */
SGS_API sgs_status sgs_system_matrix(const sgs_system *system, double p, double *a);

/* Galerkin projection ---------------------------------------------------- */

/* Writes the (mn) x (mn) projected matrix. stabilized != 0 projects
 * B(p) = L(p)^T A(p) L(p)^-T with Q = I instead of A(p). The system must be
 * linear. */
SGS_API sgs_status sgs_galerkin_assemble_linear(const sgs_system *system, const sgs_basis *basis,
                                                const sgs_quadrature *rule, int stabilized,
                                                double *out);

/* Projected right-hand side of the original, shifted or stabilized system
 * (Q = I). Linear systems are treated as f(x, p) = A(p) x. */
SGS_API sgs_status sgs_nonlinear_galerkin_create(const sgs_system *system, const sgs_basis *basis,
                                                 const sgs_quadrature *rule, sgs_variant variant,
                                                 sgs_nonlinear_galerkin **out);
SGS_API void sgs_nonlinear_galerkin_destroy(sgs_nonlinear_galerkin *galerkin);
SGS_API size_t sgs_nonlinear_galerkin_dimension(const sgs_nonlinear_galerkin *galerkin);
SGS_API sgs_status sgs_nonlinear_galerkin_rhs(const sgs_nonlinear_galerkin *galerkin,
                                              const double *v, double *out);
SGS_API sgs_status sgs_nonlinear_galerkin_jacobian(const sgs_nonlinear_galerkin *galerkin,
                                                   const double *v, double *out);
/* Newton iteration for F(v) = 0. guess == NULL starts from the projection of
 * x*(p) (original variant) or from zero (shifted/stabilized). The root is
 * written even when SGS_ERR_NON_CONVERGENCE is returned; iterations and
 * residual may be NULL. */
SGS_API sgs_status sgs_nonlinear_galerkin_equilibrium(const sgs_nonlinear_galerkin *galerkin,
                                                      const double *guess, double tolerance,
                                                      size_t max_iterations, double *root,
                                                      size_t *iterations, double *residual);
/* Trapezoidal rule over [0, t_end] with step h. */
SGS_API sgs_status sgs_nonlinear_galerkin_integrate(const sgs_nonlinear_galerkin *galerkin,
                                                    const double *x0, double t_end, double h,
                                                    sgs_trajectory **out);

/* x(p) = sum_j v_j Phi_j(p); len must be a multiple of the basis size and
 * out receives len / size entries. */
SGS_API sgs_status sgs_reconstruct(const double *v, size_t len, const sgs_basis *basis, double p,
                                   double *out);

SGS_API void sgs_trajectory_destroy(sgs_trajectory *trajectory);
SGS_API size_t sgs_trajectory_length(const sgs_trajectory *trajectory);
SGS_API size_t sgs_trajectory_state_dimension(const sgs_trajectory *trajectory);
SGS_API sgs_status sgs_trajectory_time(const sgs_trajectory *trajectory, size_t index, double *t);
SGS_API sgs_status sgs_trajectory_state(const sgs_trajectory *trajectory, size_t index,
                                        double *state);

/* Experiment harness ----------------------------------------------------- */

SGS_API sgs_status sgs_config_load(const char *path, sgs_config **out);
SGS_API sgs_status sgs_config_parse(const char *json_text, sgs_config **out);
SGS_API void sgs_config_destroy(sgs_config *config);
SGS_API sgs_status sgs_config_set_output_dir(sgs_config *config, const char *dir);

/* abscissa_sweep.csv */
SGS_API sgs_status sgs_run_abscissa_sweep(const sgs_config *config);
/* eigs.csv */
SGS_API sgs_status sgs_run_eigenvalue_dump(const sgs_config *config);
/* equilibrium_curves.csv and equilibrium_abscissae.csv */
SGS_API sgs_status sgs_run_equilibrium_study(const sgs_config *config);
/* ivp.csv */
SGS_API sgs_status sgs_run_ivp(const sgs_config *config);

#ifdef __cplusplus
}
#endif

#endif /* SGSTAB_H */
