#ifndef CRANKED_H
#define CRANKED_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum CrankedInitialKind {
  // `α_μ = √k_μ`; the alpha arguments are ignored.
  CRANKED_INITIAL_KIND_GROUND_STATE_OF_H0 = 0,
  // `α_x = α_y = alpha_x`.
  CRANKED_INITIAL_KIND_ISOTROPIC = 1,
  CRANKED_INITIAL_KIND_ANISOTROPIC = 2,
} CrankedInitialKind;

typedef enum CrankedRegime {
  CRANKED_REGIME_SECTOR_A = 0,
  CRANKED_REGIME_SECTOR_B,
  CRANKED_REGIME_SECTOR_C,
  CRANKED_REGIME_SECTOR_D,
  CRANKED_REGIME_SECTOR_E,
  CRANKED_REGIME_BORDER_AD,
  CRANKED_REGIME_BORDER_BD,
  CRANKED_REGIME_BORDER_CD,
  CRANKED_REGIME_BORDER_BE,
  CRANKED_REGIME_BORDER_CE,
  CRANKED_REGIME_POINT_L,
  CRANKED_REGIME_POINT_LANDAU,
  CRANKED_REGIME_ISOTROPIC_LINE,
} CrankedRegime;

typedef enum CrankedStatus {
  CRANKED_STATUS_OK = 0,
  CRANKED_STATUS_NULL_POINTER = 1,
  CRANKED_STATUS_INVALID_PARAMETER = 2,
  CRANKED_STATUS_NO_GROUND_STATE = 3,
  CRANKED_STATUS_NON_FINITE = 4,
  CRANKED_STATUS_UNPHYSICAL = 5,
  CRANKED_STATUS_PRECONDITION = 6,
  CRANKED_STATUS_REALITY_CHECK = 7,
  // A Rust panic was caught at the boundary.
  CRANKED_STATUS_INTERNAL = 8,
} CrankedStatus;

// Opaque canonical evolution matrix.
typedef struct CrankedPropagator CrankedPropagator;

// Opaque Gaussian state.
typedef struct CrankedState CrankedState;

// Spectral quantities of a parameter point.
typedef struct CrankedSpectral {
  double eps_plus;
  double eps_minus;
  double delta_sq;
  double lambda_plus_re;
  double lambda_plus_im;
  double lambda_minus_re;
  double lambda_minus_im;
} CrankedSpectral;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the most recent failure on this thread, or NULL. The pointer
// stays valid until the next call into this library from the same thread.
const char *cranked_last_error_message(void);

// Static, NUL-terminated name of a regime tag.
const char *cranked_regime_name(enum CrankedRegime regime);

// Regime of `(k_x, k_y, omega)` with borders thickened by `rel_tol`.
//
// # Safety
// `out` must be NULL or point to writable memory for one `CrankedRegime`.
enum CrankedStatus cranked_classify(double k_x,
                                    double k_y,
                                    double omega,
                                    double rel_tol,
                                    enum CrankedRegime *out);

// # Safety
// `out` must be NULL or point to writable memory for one `CrankedSpectral`.
enum CrankedStatus cranked_spectral(double k_x,
                                    double k_y,
                                    double omega,
                                    struct CrankedSpectral *out);

// Closed-form evolution over time `t`.
//
// # Safety
// `out` must be NULL or point to writable memory for one pointer.
enum CrankedStatus cranked_propagate(double k_x,
                                     double k_y,
                                     double omega,
                                     double t,
                                     struct CrankedPropagator **out);

// Evolution by `first`, then by `second`, as a new handle.
//
// # Safety
// `first` and `second` must be live handles; `out` must be writable.
enum CrankedStatus cranked_propagator_compose(const struct CrankedPropagator *first,
                                              const struct CrankedPropagator *second,
                                              struct CrankedPropagator **out);

// Copies the 4×4 matrix, row-major over `(q_x, q_y, p_x, p_y)`.
//
// # Safety
// `p` must be a live handle; `out` must have room for 16 doubles.
enum CrankedStatus cranked_propagator_matrix(const struct CrankedPropagator *p, double *out);

// # Safety
// `p` must be NULL or a handle not yet freed.
void cranked_propagator_free(struct CrankedPropagator *p);

// Separable initial state. `alpha_x` and `alpha_y` are read according to `kind`.
//
// # Safety
// `out` must be NULL or point to writable memory for one pointer.
enum CrankedStatus cranked_state_new(enum CrankedInitialKind kind,
                                     double alpha_x,
                                     double alpha_y,
                                     double k_x,
                                     double k_y,
                                     struct CrankedState **out);

// `𝒰𝒞𝒰ᵗ` as a new state handle.
//
// # Safety
// `state` and `p` must be live handles; `out` must be writable.
enum CrankedStatus cranked_state_evolve(const struct CrankedState *state,
                                        const struct CrankedPropagator *p,
                                        struct CrankedState **out);

// Copies the covariance matrix, row-major over `(q_x, q_y, p_x, p_y)`.
//
// # Safety
// `state` must be a live handle; `out` must have room for 16 doubles.
enum CrankedStatus cranked_state_matrix(const struct CrankedState *state, double *out);

// Mode occupation `f`.
//
// # Safety
// `state` must be a live handle; `out` must be writable.
enum CrankedStatus cranked_state_occupation(const struct CrankedState *state, double *out);

// Mean angular momentum `⟨l_z⟩`.
//
// # Safety
// `state` must be a live handle; `out` must be writable.
enum CrankedStatus cranked_state_lz(const struct CrankedState *state, double *out);

// # Safety
// `state` must be NULL or a handle not yet freed.
void cranked_state_free(struct CrankedState *state);

// Von Neumann entropy in nats for occupation `f`.
//
// # Safety
// `out` must be NULL or writable.
enum CrankedStatus cranked_entropy_vn(double f, double *out);

// Rényi entropy of index `alpha` (positive, not 1).
//
// # Safety
// `out` must be NULL or writable.
enum CrankedStatus cranked_entropy_renyi(double f, double alpha, double *out);

// Linear entropy `1 − Tr ρ²`.
//
// # Safety
// `out` must be NULL or writable.
enum CrankedStatus cranked_linear_entropy(double f, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CRANKED_H */
