#ifndef INFPOT_H
#define INFPOT_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum InfpotStatus {
  INFPOT_STATUS_OK = 0,
  INFPOT_STATUS_NULL_POINTER = 1,
  // Point or argument outside its domain.
  INFPOT_STATUS_DOMAIN = 2,
  // Tolerance or policy rejected.
  INFPOT_STATUS_POLICY = 3,
  // Series truncation failed or a corner singularity was hit.
  INFPOT_STATUS_SERIES = 4,
  // A root solve or quadrature did not converge.
  INFPOT_STATUS_NO_CONVERGENCE = 5,
  // Gradient or Hessian undefined at the point.
  INFPOT_STATUS_UNDEFINED = 6,
  INFPOT_STATUS_PANIC = 7,
  INFPOT_STATUS_OTHER = 8,
} InfpotStatus;

typedef enum InfpotRegion {
  INFPOT_REGION_INTERIOR_OFF_DIAGONAL = 0,
  INFPOT_REGION_DIAGONAL = 1,
  INFPOT_REGION_MEDIAN = 2,
  INFPOT_REGION_BOUNDARY = 3,
  INFPOT_REGION_CENTER = 4,
} InfpotRegion;

// Opaque handle; create with [`infpot_context_new`], release with
// [`infpot_context_free`].
typedef struct InfpotContext InfpotContext;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// A context with the default tolerances, or null if allocation panicked.
struct InfpotContext *infpot_context_new(void);

// # Safety
// `ctx` must be null or a pointer from [`infpot_context_new`] not yet freed.
void infpot_context_free(struct InfpotContext *ctx);

// Absolute truncation tolerance of every series (default `1e-15`).
//
// # Safety
// `ctx` must be null or a live context.
enum InfpotStatus infpot_context_set_abs_tol(struct InfpotContext *ctx, double abs_tol);

// Residual tolerance of the root solves (default `1e-13`).
//
// # Safety
// `ctx` must be null or a live context.
enum InfpotStatus infpot_context_set_root_tol(struct InfpotContext *ctx, double root_tol);

// `u(x, y)` on `[0, 2]²`.
//
// # Safety
// `ctx` must be null or a live context; `out` must point to one double.
enum InfpotStatus infpot_eval_u(struct InfpotContext *ctx, double x, double y, double *out);

// `∇u(x, y)` as `(u_x, u_y)`.
//
// # Safety
// `ctx` must be null or a live context; `out` must point to two doubles.
enum InfpotStatus infpot_eval_grad(struct InfpotContext *ctx, double x, double y, double *out);

// `ℋu(x, y)` row-major as `(u_xx, u_xy, u_yx, u_yy)`.
//
// # Safety
// `ctx` must be null or a live context; `out` must point to four doubles.
enum InfpotStatus infpot_eval_hessian(struct InfpotContext *ctx, double x, double y, double *out);

// Region tag of a point.
//
// # Safety
// `ctx` must be null or a live context; `out` must point to one region.
enum InfpotStatus infpot_region(struct InfpotContext *ctx,
                                double x,
                                double y,
                                enum InfpotRegion *out);

// The series `W(r, θ)` on `0 <= r <= 1`, `0 <= θ <= π/2`.
//
// # Safety
// `ctx` must be null or a live context; `out` must point to one double.
enum InfpotStatus infpot_w(struct InfpotContext *ctx, double r, double theta, double *out);

// Jacobi `ϑ₂(z, q)`, `0 <= q < 1`, in the form chosen for `q`.
//
// # Safety
// `ctx` must be null or a live context; `out` must point to one double.
enum InfpotStatus infpot_theta2(struct InfpotContext *ctx, double z, double q, double *out);

// Message of the last failed call on `ctx`, empty after a success. Valid
// until the next call on the same context; null for a null context.
//
// # Safety
// `ctx` must be null or a live context.
const char *infpot_last_error(const struct InfpotContext *ctx);

// Static description of a status code.
const char *infpot_status_message(enum InfpotStatus status);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* INFPOT_H */
