#ifndef AITAX_H
#define AITAX_H

#pragma once

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

enum AitaxStatus
#if defined(__cplusplus) || __STDC_VERSION__ >= 202311L
  : int32_t
#endif // defined(__cplusplus) || __STDC_VERSION__ >= 202311L
 {
  AITAX_STATUS_OK = 0,
  AITAX_STATUS_NULL_POINTER = 1,
  AITAX_STATUS_INVALID_STRING = 2,
  AITAX_STATUS_INVALID_CONFIG = 3,
  AITAX_STATUS_SOLVER_FAILURE = 4,
  AITAX_STATUS_INVALID_ARGUMENT = 5,
  AITAX_STATUS_PANIC = 6,
};
#ifndef __cplusplus
#if __STDC_VERSION__ >= 202311L
typedef enum AitaxStatus AitaxStatus;
#else
typedef int32_t AitaxStatus;
#endif // __STDC_VERSION__ >= 202311L
#endif // __cplusplus

/**
 * Built-in economies.
 */
enum AitaxDesk
#if defined(__cplusplus) || __STDC_VERSION__ >= 202311L
  : int32_t
#endif // defined(__cplusplus) || __STDC_VERSION__ >= 202311L
 {
  AITAX_DESK_SYMMETRIC = 0,
  AITAX_DESK_COGNITIVE_BINDING = 1,
  AITAX_DESK_MANUAL_BINDING = 2,
  AITAX_DESK_THRESHOLD = 3,
  AITAX_DESK_SYMMETRIC_COBB_DOUGLAS = 4,
};
#ifndef __cplusplus
#if __STDC_VERSION__ >= 202311L
typedef enum AitaxDesk AitaxDesk;
#else
typedef int32_t AitaxDesk;
#endif // __STDC_VERSION__ >= 202311L
#endif // __cplusplus

enum AitaxRegime
#if defined(__cplusplus) || __STDC_VERSION__ >= 202311L
  : int32_t
#endif // defined(__cplusplus) || __STDC_VERSION__ >= 202311L
 {
  AITAX_REGIME_NONE_BIND = 0,
  AITAX_REGIME_COGNITIVE_BINDS = 1,
  AITAX_REGIME_MANUAL_BINDS = 2,
  AITAX_REGIME_BOTH_BIND = 3,
};
#ifndef __cplusplus
#if __STDC_VERSION__ >= 202311L
typedef enum AitaxRegime AitaxRegime;
#else
typedef int32_t AitaxRegime;
#endif // __STDC_VERSION__ >= 202311L
#endif // __cplusplus

/**
 * Opaque economy configuration.
 */
typedef struct AitaxConfig AitaxConfig;

/**
 * Opaque planner solution.
 */
typedef struct AitaxSolution AitaxSolution;

/**
 * Period-0 summary of a solution. Capital wedges use the multiplier form.
 */
typedef struct AitaxSummary {
  /**
   * An [`AitaxRegime`] value.
   */
  int32_t regime;
  double tau_k;
  double tau_ai;
  double tau_y_c;
  double tau_y_m;
  double mu_c;
  double mu_m;
  double objective;
  double foc_residual;
  /**
   * Number of periods in the allocation.
   */
  size_t periods;
} AitaxSummary;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread; empty after a success.
 * The pointer stays valid until the next call on the same thread.
 */
const char *aitax_last_error(void);

/**
 * Library version, static storage.
 */
const char *aitax_version(void);

/**
 * Parses and validates a TOML economy description.
 *
 * # Safety
 * `toml` must be a NUL-terminated string; `out` must be writable.
 */
AitaxStatus aitax_config_from_toml(const char *toml, struct AitaxConfig **out);

/**
 * One of the built-in economies; `desk` takes an [`AitaxDesk`] value.
 *
 * # Safety
 * `out` must be writable.
 */
AitaxStatus aitax_config_desk(int32_t desk, struct AitaxConfig **out);

/**
 * Sets one sweepable parameter (`a_ai`, `z_c`, `z_m`, `mu_top`, `theta_m`, `delta_ai`).
 * The config is unchanged when the new value fails validation.
 *
 * # Safety
 * `config` must come from this library; `name` must be NUL-terminated.
 */
AitaxStatus aitax_config_set(struct AitaxConfig *config, const char *name, double value);

/**
 * Reads one sweepable parameter.
 *
 * # Safety
 * `config` must come from this library; `name` must be NUL-terminated; `out` writable.
 */
AitaxStatus aitax_config_get(const struct AitaxConfig *config, const char *name, double *out);

/**
 * # Safety
 * `config` must come from this library or be null; it must not be used afterwards.
 */
void aitax_config_free(struct AitaxConfig *config);

/**
 * Solves in the config's mode (steady state or finite horizon).
 *
 * # Safety
 * `config` must come from this library; `out` must be writable.
 */
AitaxStatus aitax_solve(const struct AitaxConfig *config, struct AitaxSolution **out);

/**
 * # Safety
 * `solution` must come from this library; `out` must be writable.
 */
AitaxStatus aitax_solution_summary(const struct AitaxSolution *solution, struct AitaxSummary *out);

/**
 * Full solution and wedge report as JSON; free with [`aitax_string_free`].
 *
 * # Safety
 * `solution` must come from this library; `out` must be writable.
 */
AitaxStatus aitax_solution_to_json(const struct AitaxSolution *solution, char **out);

/**
 * # Safety
 * `solution` must come from this library or be null; it must not be used afterwards.
 */
void aitax_solution_free(struct AitaxSolution *solution);

/**
 * Brackets the steady-state regime flip of `name` in `[lo, hi]` to width `tol`.
 *
 * # Safety
 * `config` must come from this library; `name` NUL-terminated; outputs writable.
 */
AitaxStatus aitax_find_threshold(const struct AitaxConfig *config,
                                 const char *name,
                                 double lo,
                                 double hi,
                                 double tol,
                                 double *bracket_lo,
                                 double *bracket_hi);

/**
 * Whether the technology passes all wage-premium checks on the default grid.
 *
 * # Safety
 * `config` must come from this library; `passes` must be writable.
 */
AitaxStatus aitax_check_assumptions(const struct AitaxConfig *config, bool *passes);

/**
 * # Safety
 * `s` must come from this library or be null.
 */
void aitax_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* AITAX_H */
