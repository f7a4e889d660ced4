#ifndef FRESNEL_TOMO_H
#define FRESNEL_TOMO_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Status codes returned by every function.
typedef enum FtStatus {
  FT_STATUS_OK = 0,
  FT_STATUS_INVALID_ARGUMENT = 1,
  FT_STATUS_NULL_POINTER = 2,
  FT_STATUS_DEGENERATE = 3,
  FT_STATUS_DOMAIN = 4,
  FT_STATUS_MISSING_ANCHOR = 5,
  FT_STATUS_NODE_AT_ORIGIN = 6,
  FT_STATUS_UNSUPPORTED = 7,
  FT_STATUS_CALLBACK_FAILED = 8,
  FT_STATUS_BUFFER_TOO_SMALL = 9,
  FT_STATUS_PANIC = 10,
} FtStatus;

// Reconstructed density matrix.
typedef struct FtDensityMatrix FtDensityMatrix;

// Sampled one-mode wavefunction.
typedef struct FtWavefunction FtWavefunction;

// Discretisation of the inversion integrals; see `ft_config_default`.
// A step of zero or less means "derive from the window".
typedef struct FtInversionConfig {
  double mu_window;
  double taper_fraction;
  double x_window;
  size_t samples_per_axis;
  double x_taper_fraction;
  double mu_step;
  double x_step;
  double anchor_floor;
} FtInversionConfig;

// Tomogram supplied by the caller: writes `w(x, mu, nu)` to `*out` and
// returns 0, or returns non-zero to abort the computation.
typedef int (*FtTomogramCallback)(double x, double mu, double nu, void *user_data, double *out);

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the last failure on this thread; empty after a success.
// The pointer stays valid until the next call into this library on the
// same thread.
const char *ft_last_error_message(void);

// Library version as a static NUL-terminated string.
const char *ft_version(void);

// # Safety
// `out` must be valid for writes.
enum FtStatus ft_config_default(struct FtInversionConfig *out);

// Copies `count` samples starting at `start` with spacing `step`.
//
// # Safety
// `re` and `im` must each point to `count` doubles; `out` must be valid
// for writes.
enum FtStatus ft_wavefunction_new(double start,
                                  double step,
                                  size_t count,
                                  const double *re,
                                  const double *im,
                                  struct FtWavefunction **out);

// Chirped Gaussian of width `sigma` and chirp `alpha` sampled on the grid.
//
// # Safety
// `out` must be valid for writes.
enum FtStatus ft_wavefunction_gcf(double sigma,
                                  double alpha,
                                  double start,
                                  double step,
                                  size_t count,
                                  struct FtWavefunction **out);

// # Safety
// `psi` must be null or a pointer returned by this library and not yet freed.
void ft_wavefunction_free(struct FtWavefunction *psi);

// # Safety
// `psi` must be a live wavefunction handle; `out` must be valid for writes.
enum FtStatus ft_wavefunction_count(const struct FtWavefunction *psi, size_t *out);

// Copies the samples into `re` and `im`, each of length `len`.
//
// # Safety
// `psi` must be a live handle; `re` and `im` must each hold `len` doubles.
enum FtStatus ft_wavefunction_copy(const struct FtWavefunction *psi,
                                   double *re,
                                   double *im,
                                   size_t len);

// Symplectic tomogram `w(x, mu, nu)` of a sampled wavefunction.
//
// # Safety
// `psi` must be a live handle; `out` must be valid for writes.
enum FtStatus ft_symplectic_tomogram(const struct FtWavefunction *psi,
                                     double x,
                                     double mu,
                                     double nu,
                                     double *out);

// Fresnel tomogram `w_F(x, nu)`.
//
// # Safety
// `psi` must be a live handle; `out` must be valid for writes.
enum FtStatus ft_fresnel_tomogram(const struct FtWavefunction *psi,
                                  double x,
                                  double nu,
                                  double *out);

// Optical tomogram `w(x, theta)`.
//
// # Safety
// `psi` must be a live handle; `out` must be valid for writes.
enum FtStatus ft_optical_tomogram(const struct FtWavefunction *psi,
                                  double x,
                                  double theta,
                                  double *out);

// Closed-form chirped Gaussian tomogram.
//
// # Safety
// `out` must be valid for writes.
enum FtStatus ft_gcf_tomogram(double sigma,
                              double alpha,
                              double x,
                              double mu,
                              double nu,
                              double *out);

// Density matrix on the grid `start + k step`, `k < count`, from a
// tomogram callback. A null `cfg` selects the defaults.
//
// # Safety
// `callback` must be safe to call with `user_data`; `cfg` must be null or
// valid; `out` must be valid for writes.
enum FtStatus ft_reconstruct_density_matrix(FtTomogramCallback callback,
                                            void *user_data,
                                            double start,
                                            double step,
                                            size_t count,
                                            const struct FtInversionConfig *cfg,
                                            struct FtDensityMatrix **out);

// Wavefunction on the `nu` grid `start + k step` (which must contain 0)
// from a tomogram callback, with `psi(0)` real and positive.
//
// # Safety
// As for [`ft_reconstruct_density_matrix`].
enum FtStatus ft_reconstruct_psi(FtTomogramCallback callback,
                                 void *user_data,
                                 double start,
                                 double step,
                                 size_t count,
                                 const struct FtInversionConfig *cfg,
                                 struct FtWavefunction **out);

// # Safety
// `rho` must be null or a pointer returned by this library and not yet freed.
void ft_density_matrix_free(struct FtDensityMatrix *rho);

// Side length of the matrix.
//
// # Safety
// `rho` must be a live handle; `out` must be valid for writes.
enum FtStatus ft_density_matrix_size(const struct FtDensityMatrix *rho, size_t *out);

// Entry `rho(x_i, x_j)`.
//
// # Safety
// `rho` must be a live handle; `re` and `im` must be valid for writes.
enum FtStatus ft_density_matrix_get(const struct FtDensityMatrix *rho,
                                    size_t i,
                                    size_t j,
                                    double *re,
                                    double *im);

// Largest `|rho - rho^dagger|` entry before symmetrisation.
//
// # Safety
// `rho` must be a live handle; `out` must be valid for writes.
enum FtStatus ft_density_matrix_asymmetry(const struct FtDensityMatrix *rho, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* FRESNEL_TOMO_H */
