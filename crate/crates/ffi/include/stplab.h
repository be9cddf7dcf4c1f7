#ifndef STPLAB_H
#define STPLAB_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes returned by every fallible call.
 */
typedef enum {
  STP_STATUS_OK = 0,
  STP_STATUS_NULL_POINTER = 1,
  STP_STATUS_INVALID_ARGUMENT = 2,
  STP_STATUS_UTF8 = 3,
  STP_STATUS_PRECISION_EXHAUSTED = 4,
  STP_STATUS_BUDGET_EXHAUSTED = 5,
  STP_STATUS_NOT_INVERTIBLE = 6,
  STP_STATUS_NOT_IN_SUPPORT = 7,
  STP_STATUS_AMBIGUOUS = 8,
  STP_STATUS_BUFFER_TOO_SMALL = 9,
} StpStatus;

/**
 * How a support point is approached (see `stp_measure_classify`).
 */
typedef enum {
  STP_SUPPORT_KIND_BOTH_SIDES = 0,
  STP_SUPPORT_KIND_ISOLATED_LEFT = 1,
  STP_SUPPORT_KIND_ISOLATED_RIGHT = 2,
} StpSupportKind;

/**
 * A Borel probability measure on the circle (opaque).
 */
typedef struct StpMeasure StpMeasure;

/**
 * A measure-preserving system (opaque).
 */
typedef struct StpSystem StpSystem;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the most recent failure on this thread (empty when none).
 * The pointer stays valid until the next failing call on the thread.
 */
const char *stp_last_error_message(void);

/**
 * Lebesgue (Haar) measure on the circle.
 *
 * # Safety
 * `out` must be a valid pointer; the handle must be released with
 * `stp_measure_free`.
 */
StpStatus stp_measure_lebesgue(StpMeasure **out);

/**
 * The middle-thirds Cantor (devil's staircase) measure at the given digit
 * depth (pass 0 for the default depth).
 *
 * # Safety
 * `out` must be a valid pointer.
 */
StpStatus stp_measure_cantor(uint32_t depth, StpMeasure **out);

/**
 * The invariant measure of a Denjoy system handle.
 *
 * # Safety
 * `system` must be a valid Denjoy handle from `stp_system_denjoy`.
 */
StpStatus stp_measure_denjoy_invariant(const StpSystem *system, StpMeasure **out);

/**
 * # Safety
 * `m` must come from a measure constructor and not be freed twice.
 */
void stp_measure_free(StpMeasure *m);

/**
 * Measure of the counterclockwise open interval `(a, b)`, as `f64`.
 *
 * # Safety
 * `m`, `a`, `b`, `out` must be valid.
 */
StpStatus stp_measure_interval(const StpMeasure *m, const char *a, const char *b, double *out);

/**
 * `t_n = inf { r : nu(B(x, r)) >= 1/n }` as an exact rational string.
 *
 * # Safety
 * Pointers must be valid; `buf` must hold `cap` writable bytes.
 */
StpStatus stp_measure_t_sequence(const StpMeasure *m,
                                 const char *x,
                                 uint64_t n,
                                 const char *tol,
                                 char *buf,
                                 uintptr_t cap,
                                 uintptr_t *needed);

/**
 * Classify a support point: the side kind plus the gap partner `y` and gap
 * length `s_x` as exact rational strings (empty when approached from both
 * sides).
 *
 * # Safety
 * Pointers must be valid; the two buffers must each hold `cap` bytes.
 */
StpStatus stp_measure_classify(const StpMeasure *m,
                               const char *x,
                               const char *tol,
                               StpSupportKind *kind,
                               char *partner_buf,
                               char *gap_buf,
                               uintptr_t cap);

/**
 * Circle distance `min(|x - y|, 1 - |x - y|)` as an exact rational string.
 *
 * # Safety
 * Pointers must be valid.
 */
StpStatus stp_circle_dist(const char *x,
                          const char *y,
                          char *buf,
                          uintptr_t cap,
                          uintptr_t *needed);

/**
 * Exact Lebesgue measure of a union of open balls, given parallel arrays
 * of centers and radii (rational strings), as a rational string.
 *
 * # Safety
 * `centers` and `radii` must point to `count` valid strings.
 */
StpStatus stp_union_measure(const char *const *centers,
                            const char *const *radii,
                            uintptr_t count,
                            char *buf,
                            uintptr_t cap,
                            uintptr_t *needed);

/**
 * Rigid rotation by a rational angle.
 *
 * # Safety
 * Pointers must be valid; release with `stp_system_free`.
 */
StpStatus stp_system_rotation(const char *theta, StpSystem **out);

/**
 * Rigid rotation by the golden mean at the given fixed-point bit budget.
 *
 * # Safety
 * `out` must be valid.
 */
StpStatus stp_system_rotation_golden(uint32_t bits, StpSystem **out);

/**
 * Truncated Denjoy homeomorphism over the golden rotation: geometric gap
 * lengths `c * lambda^|n|` for `|n| <= n_max`, untracked tail below `tol`.
 *
 * # Safety
 * Pointers must be valid; release with `stp_system_free`.
 */
StpStatus stp_system_denjoy_golden(uint32_t bits,
                                   const char *gap_scale,
                                   const char *gap_ratio,
                                   uint32_t n_max,
                                   const char *tol,
                                   StpSystem **out);

/**
 * # Safety
 * `s` must come from a system constructor and not be freed twice.
 */
void stp_system_free(StpSystem *s);

/**
 * Rotation-number estimate from `iterations` averaged lift displacements.
 *
 * # Safety
 * Pointers must be valid.
 */
StpStatus stp_system_rotation_number(const StpSystem *s, uint64_t iterations, double *out);

/**
 * First best-return times of the inverse map at `x`: `n` is recorded when
 * `d(f^{-n}(x), x)` beats every earlier distance. Writes up to `capacity`
 * times and distances; `found` reports how many were written. Returns
 * `STP_STATUS_BUDGET_EXHAUSTED` when the scan budget ran out first (the
 * partial results are still written).
 *
 * # Safety
 * `times`/`distances` must hold `capacity` elements.
 */
StpStatus stp_recurrence_times(const StpSystem *s,
                               const char *x,
                               uintptr_t capacity,
                               uint64_t budget,
                               uint64_t *times,
                               double *distances,
                               uintptr_t *found);

/**
 * Hit count of the multiplicative expanding map: the number of `k <= h`
 * with `k alpha mod 1` inside `B(x, scale / k)`.
 *
 * # Safety
 * Pointers must be valid.
 */
StpStatus stp_hit_count_expanding_harmonic(const char *alpha,
                                           const char *x,
                                           const char *scale,
                                           uint64_t horizon,
                                           uint64_t *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* STPLAB_H */
