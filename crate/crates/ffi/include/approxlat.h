#ifndef APPROXLAT_H
#define APPROXLAT_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum ApxStatus {
  APX_STATUS_OK = 0,
  APX_STATUS_NULL_POINTER = 1,
  /**
   * Bad argument or violated precondition.
   */
  APX_STATUS_INVALID_ARGUMENT = 2,
  APX_STATUS_CAPACITY = 3,
  APX_STATUS_OUT_OF_RANGE = 4,
  APX_STATUS_VERIFICATION = 5,
  APX_STATUS_IO = 6,
  APX_STATUS_PANIC = 7,
} ApxStatus;

/**
 * Points of a model set inside a region, in canonical order.
 */
typedef struct ApxPointSet ApxPointSet;

/**
 * A cut-and-project scheme (quadratic or p-adic).
 */
typedef struct ApxScheme ApxScheme;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failure on this thread, or null. Valid until the
 * next failing call on the same thread.
 */
const char *apx_last_error(void);

/**
 * Library version, a static string.
 */
const char *apx_version(void);

/**
 * # Safety
 * `s` must come from this library, or be null.
 */
void apx_string_free(char *s);

/**
 * Scheme with lattice `Z[sqrt d]` and window `[-w, w]` (open unless
 * `closed`), `w` given as `"a"` or `"a/b"`.
 *
 * # Safety
 * `window` must be a valid C string and `out` a valid pointer.
 */
enum ApxStatus apx_scheme_quadratic_new(uint64_t d,
                                        const char *window,
                                        bool closed,
                                        struct ApxScheme **out);

/**
 * Scheme with lattice `Z[1/p]` diagonally in `Q_p x R`.
 *
 * # Safety
 * As [`apx_scheme_quadratic_new`].
 */
enum ApxStatus apx_scheme_padic_new(uint64_t p,
                                    const char *window,
                                    bool closed,
                                    struct ApxScheme **out);

/**
 * # Safety
 * `s` must come from a scheme constructor, or be null.
 */
void apx_scheme_free(struct ApxScheme *s);

/**
 * Whether the point with coordinates `(a, b)` (`a + b sqrt d`, or
 * `a / p^b`) lies in the model set.
 *
 * # Safety
 * `s` must be a live scheme and `out` a valid pointer.
 */
enum ApxStatus apx_scheme_contains(const struct ApxScheme *s, int64_t a, int64_t b, bool *out);

/**
 * All model-set points in the ball around `(center_a, center_b)`:
 * half-width `extent` (`"a"` or `"a/b"`) for the quadratic scheme, ball
 * level `extent` for the p-adic one. Refuses when the estimated count
 * exceeds `cap`.
 *
 * # Safety
 * `s` must be a live scheme, `extent` a valid C string, `out` valid.
 */
enum ApxStatus apx_enumerate(const struct ApxScheme *s,
                             int64_t center_a,
                             int64_t center_b,
                             const char *extent,
                             uint64_t cap,
                             struct ApxPointSet **out);

/**
 * # Safety
 * `set` must come from [`apx_enumerate`], or be null.
 */
void apx_pointset_free(struct ApxPointSet *set);

/**
 * Number of points; 0 for a null handle.
 *
 * # Safety
 * `set` must be a live point set or null.
 */
size_t apx_pointset_len(const struct ApxPointSet *set);

/**
 * Coordinates of the `index`-th point.
 *
 * # Safety
 * `set` must be a live point set; `a` and `b` valid pointers.
 */
enum ApxStatus apx_pointset_coords(const struct ApxPointSet *set,
                                   size_t index,
                                   int64_t *a,
                                   int64_t *b);

/**
 * The point set as CSV text; free with [`apx_string_free`].
 *
 * # Safety
 * `set` must be a live point set; `out` a valid pointer.
 */
enum ApxStatus apx_pointset_csv(const struct ApxPointSet *set, char **out);

/**
 * Runs a command-line subcommand (`"generate"`, `"axioms"`, ...) on a
 * TOML config text, writing its reports and manifest into `out_dir`.
 *
 * # Safety
 * All pointers must be valid C strings.
 */
enum ApxStatus apx_run(const char *command, const char *config, const char *out_dir, bool recheck);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* APPROXLAT_H */
