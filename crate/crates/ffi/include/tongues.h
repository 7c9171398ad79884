#ifndef TONGUES_H
#define TONGUES_H

/* Generated by cbindgen from src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

// Result codes.
typedef enum TonguesStatus {
  TONGUES_STATUS_OK = 0,
  TONGUES_STATUS_NULL_POINTER = 1,
  TONGUES_STATUS_PARSE = 2,
  TONGUES_STATUS_UNRESOLVED = 3,
  TONGUES_STATUS_INVALID = 4,
  TONGUES_STATUS_COMPUTE = 5,
  TONGUES_STATUS_PANIC = 6,
} TonguesStatus;

// Opaque forcing handle.
typedef struct TonguesForcing TonguesForcing;

// Opaque handle for an exact PL circle-map lift.
typedef struct TonguesPlMap TonguesPlMap;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the last failed call on this thread; empty after success.
// The pointer stays valid until the next library call on this thread.
const char *tongues_last_error(void);

// Releases a string returned by the library. Null is ignored.
//
// # Safety
// `s` must come from this library and not have been freed.
void tongues_string_free(char *s);

// Parses `sine`, `triangle:<rat>` or `pl:w=<rat,...>;l=<rat,...>`.
//
// # Safety
// `spec` must be a NUL-terminated string; `out` must be writable.
enum TonguesStatus tongues_forcing_parse(const char *spec, struct TonguesForcing **out);

// # Safety
// `f` must be null or a handle from [`tongues_forcing_parse`].
void tongues_forcing_free(struct TonguesForcing *f);

// Canonical spec string of a forcing.
//
// # Safety
// `f` must be a valid handle; `out` must be writable.
enum TonguesStatus tongues_forcing_spec(const struct TonguesForcing *f, char **out);

// Compares the rotation number of `f_{b,ω}` with `p/q`: writes -1 (below),
// 0 (locked) or 1 (above).
//
// # Safety
// Pointers must be valid; strings NUL-terminated.
enum TonguesStatus tongues_mode_lock(const struct TonguesForcing *f,
                                     const char *b,
                                     const char *omega,
                                     int64_t p,
                                     uint32_t q,
                                     int32_t *out);

// The exact lift `x ↦ x + ω + b·φ(x)` of a PL forcing.
//
// # Safety
// Pointers must be valid; strings NUL-terminated.
enum TonguesStatus tongues_pl_map_new(const struct TonguesForcing *f,
                                      const char *b,
                                      const char *omega,
                                      struct TonguesPlMap **out);

// # Safety
// `m` must be null or a handle from this library.
void tongues_pl_map_free(struct TonguesPlMap *m);

// `m^q` as a new handle.
//
// # Safety
// `m` must be valid; `out` writable.
enum TonguesStatus tongues_pl_map_power(const struct TonguesPlMap *m,
                                        uint32_t q,
                                        struct TonguesPlMap **out);

// Writes 1 when the lift is exactly `x ↦ x + p`, else 0.
//
// # Safety
// `m` must be valid; `out` writable.
enum TonguesStatus tongues_pl_map_is_translation(const struct TonguesPlMap *m,
                                                 int64_t p,
                                                 int32_t *out);

// Exact value of the lift at `x`, as `"a/b"`.
//
// # Safety
// `m` must be valid; `x` NUL-terminated; `out` writable.
enum TonguesStatus tongues_pl_map_eval(const struct TonguesPlMap *m, const char *x, char **out);

// JSON form `{"breakpoints":[…],"slopes":[…],"anchor":"a/b"}`.
//
// # Safety
// `m` must be valid; `out` writable.
enum TonguesStatus tongues_pl_map_to_json(const struct TonguesPlMap *m, char **out);

// Tongue sweep as CSV (`b = i/b_steps`, `1 ≤ i ≤ b_steps`). `tol` may be
// null for the default `2^-40`.
//
// # Safety
// `f` must be valid; `tol` null or NUL-terminated; `out` writable.
enum TonguesStatus tongues_scan_csv(const struct TonguesForcing *f,
                                    uint32_t q_max,
                                    uint32_t b_steps,
                                    const char *tol,
                                    char **out);

// JSON pinch report for a two-break forcing, all `p/q` with `q ≤ q_max`.
//
// # Safety
// `f` must be valid; `out` writable.
enum TonguesStatus tongues_pinch_json(const struct TonguesForcing *f, uint32_t q_max, char **out);

// Enclosure `[lo, hi]` of the pinch coupling `b_{q,j,w}` as floats rounded
// outward.
//
// # Safety
// `w` NUL-terminated; `lo`, `hi` writable.
enum TonguesStatus tongues_pinch_b(uint32_t q, uint32_t j, const char *w, double *lo, double *hi);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* TONGUES_H */
