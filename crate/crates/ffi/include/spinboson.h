#ifndef SPINBOSON_H
#define SPINBOSON_H

/* Generated by cbindgen from spinboson-ffi; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Channel selectors for `sb_contraction_matrix_new`.
#define SB_CHANNEL_DEPHASING_Z 0

#define SB_CHANNEL_BITFLIP_Z 1

#define SB_CHANNEL_BITFLIP_Y 2

// Status codes returned by every API function.
typedef enum SbStatus {
  SB_STATUS_OK = 0,
  SB_STATUS_NULL_POINTER = 1,
  SB_STATUS_INVALID_ARGUMENT = 2,
  SB_STATUS_INTEGRATION_FAILED = 3,
  SB_STATUS_CAPACITY_EXCEEDED = 4,
  SB_STATUS_DIMENSION_MISMATCH = 5,
  SB_STATUS_UNDEFINED_RATIO = 6,
  SB_STATUS_INTERNAL_ERROR = 7,
} SbStatus;

// Opaque bath parameter set.
typedef struct SbBath SbBath;

// Opaque qubit layout.
typedef struct SbLayout SbLayout;

// Opaque contraction matrix.
typedef struct SbMatrix SbMatrix;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Human-readable description of a status code (static storage).
const char *sb_status_message(enum SbStatus status);

// Library version (static storage).
const char *sb_version(void);

// Create a bath handle. `abs_tol`/`rel_tol` <= 0 select the defaults.
//
// # Safety
// `out` must be a valid pointer.
enum SbStatus sb_bath_new(double coupling_strength,
                          double spectral_exponent,
                          double cutoff,
                          double sound_speed,
                          double temperature,
                          double abs_tol,
                          double rel_tol,
                          struct SbBath **out);

// # Safety
// `bath` must come from `sb_bath_new` and not be freed twice.
void sb_bath_free(struct SbBath *bath);

// Create a layout handle from `n` positions stored as 3 doubles each.
//
// # Safety
// `positions` must point to `3 * n` doubles; `out` must be valid.
enum SbStatus sb_layout_new(const double *positions,
                            size_t n,
                            double splitting,
                            struct SbLayout **out);

// # Safety
// `layout` must come from `sb_layout_new` and not be freed twice.
void sb_layout_free(struct SbLayout *layout);

// coth(omega / 2T); exactly 1 at T = 0.
//
// # Safety
// `out` must be a valid pointer.
enum SbStatus sb_thermal_factor(double omega, double temperature, double *out);

// Equal-time dephasing kernel C(R, t). `out_error` may be NULL.
//
// # Safety
// Pointer arguments must be valid or NULL where documented.
enum SbStatus sb_dephasing_kernel(const struct SbBath *bath,
                                  double separation,
                                  double time,
                                  double *out_value,
                                  double *out_error);

// Equal-time bit-flip kernel. `out_error` / `out_resonance_dominated`
// may be NULL.
//
// # Safety
// Pointer arguments must be valid or NULL where documented.
enum SbStatus sb_bitflip_kernel(const struct SbBath *bath,
                                double separation,
                                double time,
                                double splitting,
                                double *out_value,
                                double *out_error,
                                int *out_resonance_dominated);

// Bath-mediated ZZ coupling constant (principal value for splitting > 0).
//
// # Safety
// Pointer arguments must be valid or NULL where documented.
enum SbStatus sb_effective_zz_coupling(const struct SbBath *bath,
                                       double separation,
                                       double splitting,
                                       double *out_value,
                                       double *out_error);

// Build the contraction matrix of a layout at time `t`. `channel` is
// one of the SB_CHANNEL_* constants.
//
// # Safety
// Handles must be valid; `out` must be a valid pointer.
enum SbStatus sb_contraction_matrix_new(const struct SbBath *bath,
                                        const struct SbLayout *layout,
                                        double time,
                                        int channel,
                                        struct SbMatrix **out);

// # Safety
// `matrix` must come from `sb_contraction_matrix_new` and not be freed
// twice.
void sb_contraction_matrix_free(struct SbMatrix *matrix);

// Number of qubits of the matrix.
//
// # Safety
// `matrix` must be a valid handle.
size_t sb_contraction_matrix_dim(const struct SbMatrix *matrix);

// Entry (j, m) split into real and imaginary parts.
//
// # Safety
// Pointer arguments must be valid; `out_im` may be NULL.
enum SbStatus sb_contraction_matrix_get(const struct SbMatrix *matrix,
                                        size_t j,
                                        size_t m,
                                        double *out_re,
                                        double *out_im);

// `C[j][m] / sqrt(C[j][j] C[m][m])`.
//
// # Safety
// Pointer arguments must be valid.
enum SbStatus sb_correlation_ratio(const struct SbMatrix *matrix, size_t j, size_t m, double *out);

// Squared amplitude A_n^2 of the error pattern `qubits[0..n]`.
//
// # Safety
// `qubits` must point to `n` indices; `out` must be valid.
enum SbStatus sb_gaussian_moment(const struct SbMatrix *matrix,
                                 const size_t *qubits,
                                 size_t n,
                                 double *out);

// (2n-1)!! perfect matchings of n error slots.
//
// # Safety
// `out` must be a valid pointer.
enum SbStatus sb_matching_count(size_t n, uint64_t *out);

// P_fail = P_th (P_1/P_th)^n for independent noise.
//
// # Safety
// `out` must be a valid pointer.
enum SbStatus sb_independent_pfail(double p1, double p_th, uint64_t weight, double *out);

// Correlation-enhanced failure rate; `exact_prefactor` != 0 selects the
// (2n-1)!! combinatorial prefactor instead of sqrt(2)(2n/e)^n.
//
// # Safety
// `out` must be a valid pointer.
enum SbStatus sb_correlated_pfail(double p1,
                                  double p_th,
                                  uint64_t weight,
                                  int exact_prefactor,
                                  double *out);

// Concatenation breakdown point (e / 2n) P_th.
//
// # Safety
// `out` must be a valid pointer.
enum SbStatus sb_breakdown_point(double p_th, uint64_t weight, double *out);

// || (sum_j Z_j) |psi> || for a state given as interleaved re/im
// amplitudes (2^n_qubits pairs).
//
// # Safety
// `amplitudes` must point to `2^(n_qubits+1)` doubles; `out` must be
// valid.
enum SbStatus sb_collective_z_residual(const double *amplitudes, size_t n_qubits, double *out);

// Second-moment decoherence exponent of a state under a contraction
// matrix.
//
// # Safety
// As [`sb_collective_z_residual`]; `matrix` must be a valid handle.
enum SbStatus sb_dfs_decoupling_check(const struct SbMatrix *matrix,
                                      const double *amplitudes,
                                      size_t n_qubits,
                                      double *out);

// Validate a TOML run configuration file; returns InvalidArgument with
// no further detail if it does not parse or validate.
//
// # Safety
// `path` must be a NUL-terminated UTF-8 string.
enum SbStatus sb_config_check(const char *path);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SPINBOSON_H */
