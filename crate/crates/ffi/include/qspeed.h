/* C interface to qspeed: maximal quantum evolution speed at fixed purity. */

#ifndef QSPEED_H
#define QSPEED_H

/* Generated by cbindgen; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes returned by every fallible call.
 */
typedef enum QspStatus {
  QSP_STATUS_OK = 0,
  QSP_STATUS_NULL_POINTER = 1,
  QSP_STATUS_INVALID_ARGUMENT = 2,
  QSP_STATUS_NOT_HERMITIAN = 3,
  QSP_STATUS_TRACE_NOT_ONE = 4,
  QSP_STATUS_NOT_POSITIVE_SEMIDEFINITE = 5,
  QSP_STATUS_BAD_FACTORIZATION = 6,
  QSP_STATUS_DIMENSION_MISMATCH = 7,
  QSP_STATUS_DEGENERATE_SPECTRUM = 8,
  QSP_STATUS_PURITY_OUT_OF_RANGE = 9,
  QSP_STATUS_NO_CONVERGENCE = 10,
  QSP_STATUS_INTERNAL_ERROR = 11,
} QspStatus;

/**
 * Purity regime of a maximal-speed state.
 */
typedef enum QspRegime {
  QSP_REGIME_LOW_PURITY = 0,
  QSP_REGIME_GAMMA1_GE2 = 1,
  QSP_REGIME_MID_BAND = 2,
  QSP_REGIME_TOP_BAND = 3,
  QSP_REGIME_NUMERIC_FALLBACK = 4,
} QspRegime;

/**
 * Opaque density-matrix handle.
 */
typedef struct QspDensityMatrix QspDensityMatrix;

/**
 * Opaque Hamiltonian handle.
 */
typedef struct QspHamiltonian QspHamiltonian;

/**
 * Opaque maximal-speed-state handle.
 */
typedef struct QspOptimalState QspOptimalState;

/**
 * All speed quantities for one state.
 */
typedef struct QspSpeedReport {
  double euclid_sq;
  double euclid_sq_commutator;
  double euclid_sq_bloch;
  double wy_sq;
  double variance_bound;
  double purity;
} QspSpeedReport;

/**
 * Spectrum-derived purity thresholds. `gamma1` and `x0` are meaningful
 * only when the matching `has_` flag is nonzero.
 */
typedef struct QspRegimeParams {
  double kappa0;
  double kappa1;
  double kappa2;
  double gamma1;
  double x0;
  uint8_t has_gamma1;
  uint8_t has_x0;
} QspRegimeParams;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Human-readable description of a status code (static storage).
 */
const char *qsp_status_message(enum QspStatus status);

/**
 * Build a Hamiltonian from `dim` nondecreasing energies (ħ = 1).
 *
 * # Safety
 * `energies` must point to `dim` doubles; `out` must be a valid pointer.
 */
enum QspStatus qsp_hamiltonian_new(const double *energies, size_t dim, struct QspHamiltonian **out);

/**
 * # Safety
 * `h` must come from `qsp_hamiltonian_new` and not have been freed.
 */
void qsp_hamiltonian_free(struct QspHamiltonian *h);

/**
 * # Safety
 * `h` must be a live Hamiltonian handle.
 */
size_t qsp_hamiltonian_dim(const struct QspHamiltonian *h);

/**
 * Validate a row-major `dim*dim` complex matrix (separate real and
 * imaginary parts) as a density matrix.
 *
 * # Safety
 * `re` and `im` must each point to `dim*dim` doubles; `out` must be valid.
 */
enum QspStatus qsp_density_new(size_t dim,
                               const double *re,
                               const double *im,
                               struct QspDensityMatrix **out);

/**
 * # Safety
 * `rho` must come from this library and not have been freed.
 */
void qsp_density_free(struct QspDensityMatrix *rho);

/**
 * # Safety
 * `rho` must be a live density-matrix handle.
 */
size_t qsp_density_dim(const struct QspDensityMatrix *rho);

/**
 * Copy the matrix out as row-major real and imaginary parts.
 *
 * # Safety
 * `re` and `im` must each have room for `dim*dim` doubles.
 */
enum QspStatus qsp_density_get(const struct QspDensityMatrix *rho, double *re, double *im);

/**
 * # Safety
 * `rho` must be a live density-matrix handle.
 */
double qsp_density_purity(const struct QspDensityMatrix *rho);

/**
 * Evaluate every speed quantity of a state under a Hamiltonian.
 *
 * # Safety
 * All handles must be live; `out` must be valid.
 */
enum QspStatus qsp_speed_report(const struct QspHamiltonian *h,
                                const struct QspDensityMatrix *rho,
                                struct QspSpeedReport *out);

/**
 * Purity thresholds κ₀, κ₁, κ₂ and the ratio γ₁ for a spectrum.
 *
 * # Safety
 * `h` must be live; `out` must be valid.
 */
enum QspStatus qsp_regime_params(const struct QspHamiltonian *h, struct QspRegimeParams *out);

/**
 * Construct the maximal-speed state at purity `kappa` with coherence
 * phases `theta1`, `theta2`.
 *
 * # Safety
 * `h` must be live; `out` must be valid.
 */
enum QspStatus qsp_optimal_state_new(const struct QspHamiltonian *h,
                                     double kappa,
                                     double theta1,
                                     double theta2,
                                     struct QspOptimalState **out);

/**
 * # Safety
 * `opt` must come from `qsp_optimal_state_new` and not have been freed.
 */
void qsp_optimal_state_free(struct QspOptimalState *opt);

/**
 * # Safety
 * `opt` must be a live optimal-state handle.
 */
enum QspRegime qsp_optimal_state_regime(const struct QspOptimalState *opt);

/**
 * Copy of the underlying density matrix.
 *
 * # Safety
 * `opt` must be live; `out` must be valid.
 */
enum QspStatus qsp_optimal_state_density(const struct QspOptimalState *opt,
                                         struct QspDensityMatrix **out);

/**
 * Maximal squared speed at purity `kappa` from the band closed forms.
 *
 * # Safety
 * `h` must be live; `out` must be valid.
 */
enum QspStatus qsp_optimal_speed(const struct QspHamiltonian *h, double kappa, double *out);

/**
 * l₁-norm of coherence Σ_{i≠j} |ϱ_ij|.
 *
 * # Safety
 * `rho` must be a live density-matrix handle.
 */
double qsp_l1_coherence(const struct QspDensityMatrix *rho);

/**
 * Negativity for a d₁ × (dim/d₁) split.
 *
 * # Safety
 * `rho` must be live; `out` must be valid.
 */
enum QspStatus qsp_negativity(const struct QspDensityMatrix *rho, size_t d1, double *out);

/**
 * Wootters concurrence of a two-qubit state.
 *
 * # Safety
 * `rho` must be live; `out` must be valid.
 */
enum QspStatus qsp_concurrence_two_qubit(const struct QspDensityMatrix *rho, double *out);

/**
 * Deterministic uniform random state: draw `index` of the stream defined
 * by `(dim, seed, n_diag, n_unitary)`; identical inputs give bit-identical
 * states on any platform and thread count.
 *
 * # Safety
 * `out` must be valid.
 */
enum QspStatus qsp_sample_density(size_t dim,
                                  uint64_t seed,
                                  uint64_t n_diag,
                                  uint64_t n_unitary,
                                  uint64_t index,
                                  struct QspDensityMatrix **out);

/**
 * Projected-ascent maximum of the squared speed at fixed purity;
 * `persym_x` nonzero restricts the search to persymmetric X states.
 *
 * # Safety
 * `h` must be live; `out_speed` must be valid; `out_state` may be null
 * when the argmax is not wanted.
 */
enum QspStatus qsp_max_speed_bruteforce(const struct QspHamiltonian *h,
                                        double kappa,
                                        uint32_t restarts,
                                        uint64_t seed,
                                        int32_t persym_x,
                                        double *out_speed,
                                        struct QspDensityMatrix **out_state);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* QSPEED_H */
