#ifndef REGACTS_H
#define REGACTS_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status of every fallible call.
 */
typedef enum RaStatus {
  RA_STATUS_OK = 0,
  RA_STATUS_NULL_POINTER = 1,
  RA_STATUS_INVALID_UTF8 = 2,
  /**
   * The input text does not parse or violates the axioms.
   */
  RA_STATUS_PARSE = 3,
  /**
   * Well-formed input that the operation rejects.
   */
  RA_STATUS_REJECTED = 4,
  RA_STATUS_PANIC = 5,
} RaStatus;

/**
 * A finite left act.
 */
typedef struct RaAct RaAct;

/**
 * A finite monoid.
 */
typedef struct RaMonoid RaMonoid;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failure on this thread; empty after a success. The
 * pointer stays valid until the next call on the same thread.
 */
const char *ra_last_error(void);

/**
 * Library version as a static string.
 */
const char *ra_version(void);

/**
 * Releases a string returned by this library.
 *
 * # Safety
 * `s` is null or came from this library and was not freed before.
 */
void ra_string_free(char *s);

/**
 * Parses a monoid in the table format.
 *
 * # Safety
 * `src` is a nul-terminated string; `out` is writable.
 */
enum RaStatus ra_monoid_parse(const char *src, struct RaMonoid **out);

/**
 * # Safety
 * `m` is null or an unfreed handle from `ra_monoid_parse`.
 */
void ra_monoid_free(struct RaMonoid *m);

/**
 * Number of elements; 0 for a null handle.
 *
 * # Safety
 * `m` is null or a live handle.
 */
size_t ra_monoid_order(const struct RaMonoid *m);

/**
 * Class-level verdict. `code` receives 0 (primitive normal),
 * 1 (not primitive normal) or 2 (inapplicable); `json` the full decision.
 *
 * # Safety
 * `m` is a live handle; `code` and `json` are writable.
 */
enum RaStatus ra_monoid_decide(const struct RaMonoid *m, int32_t *code, char **json);

/**
 * Parses an act. A `monoid-file:` line is resolved against `base_dir`,
 * which may be null for acts with an inline monoid.
 *
 * # Safety
 * `src` is a nul-terminated string, `base_dir` null or one; `out` writable.
 */
enum RaStatus ra_act_parse(const char *src, const char *base_dir, struct RaAct **out);

/**
 * # Safety
 * `a` is null or an unfreed act handle.
 */
void ra_act_free(struct RaAct *a);

/**
 * Number of points; 0 for a null handle.
 *
 * # Safety
 * `a` is null or a live handle.
 */
size_t ra_act_size(const struct RaAct *a);

/**
 * Whether every point is act-regular.
 *
 * # Safety
 * `a` is null or a live handle.
 */
bool ra_act_is_regular(const struct RaAct *a);

/**
 * The act in the text format, with its monoid inline.
 *
 * # Safety
 * `a` is a live handle; `out` writable.
 */
enum RaStatus ra_act_write(const struct RaAct *a, char **out);

/**
 * Per-act primitive normality. `holds` receives the verdict; `json` the
 * witness triple and the necessity formula when it fails, or `null`.
 *
 * # Safety
 * `a` is a live handle; `holds` and `json` are writable.
 */
enum RaStatus ra_act_check(const struct RaAct *a, bool *holds, char **json);

/**
 * Glued counterexample from element names `a`, `b`, `c`. On success `act`
 * receives a new handle and `json` the construction details.
 *
 * # Safety
 * `m` is a live handle; the names are nul-terminated; outputs writable.
 */
enum RaStatus ra_counterexample(const struct RaMonoid *m,
                                const char *a,
                                const char *b,
                                const char *c,
                                struct RaAct **act,
                                char **json);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* REGACTS_H */
