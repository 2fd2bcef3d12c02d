#ifndef GEOCURRENTS_H
#define GEOCURRENTS_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum GcStatus {
  GC_STATUS_OK = 0,
  GC_STATUS_INVALID_INPUT = 1,
  GC_STATUS_INVALID_CHART = 2,
  GC_STATUS_RANK_MISMATCH = 3,
  GC_STATUS_UNSUPPORTED = 4,
  GC_STATUS_ZERO_CURRENT = 5,
  GC_STATUS_NOT_REALIZABLE = 6,
  GC_STATUS_CHART_MISMATCH = 7,
  GC_STATUS_NOT_INJECTIVE = 8,
  GC_STATUS_WINDOW_EXHAUSTED = 9,
  GC_STATUS_LEVEL_TOO_LOW = 10,
  GC_STATUS_IO = 11,
  GC_STATUS_NULL_POINTER = 12,
  GC_STATUS_PANIC = 13,
} GcStatus;

/**
 * A graph with a marking.
 */
typedef struct GcChart GcChart;

/**
 * An endomorphism of a free group of finite rank.
 */
typedef struct GcEndomorphism GcEndomorphism;

/**
 * A finite-level coordinate vector of a current.
 */
typedef struct GcLevelVector GcLevelVector;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or NULL. The pointer is
 * valid until the next call into this library on the same thread.
 */
const char *gc_last_error(void);

/**
 * Releases a string returned by this library. NULL is ignored.
 *
 * # Safety
 * `s` must come from this library and not have been freed.
 */
void gc_string_free(char *s);

/**
 * Built-in chart: `bouquetK`, `theta` or `dumbbell`.
 *
 * # Safety
 * `name` must be a valid C string and `out` writable.
 */
enum GcStatus gc_chart_builtin(const char *name, struct GcChart **out);

/**
 * Chart from its JSON description.
 *
 * # Safety
 * `json` must be a valid C string and `out` writable.
 */
enum GcStatus gc_chart_from_json(const char *json, struct GcChart **out);

/**
 * # Safety
 * `chart` must be a live handle and `out` writable.
 */
enum GcStatus gc_chart_rank(const struct GcChart *chart, uintptr_t *out);

/**
 * # Safety
 * `chart` must be NULL or a handle that has not been freed.
 */
void gc_chart_free(struct GcChart *chart);

/**
 * Parses an endomorphism expression (`tau`, `phi*sigma^-1`, `a=>ab; b=>b`).
 *
 * # Safety
 * `expr` must be a valid C string and `out` writable.
 */
enum GcStatus gc_endo_parse(const char *expr, uintptr_t rank, struct GcEndomorphism **out);

/**
 * Image of a word; a leading `~` marks a cyclic word.
 *
 * # Safety
 * `endo` must be a live handle, `word` a valid C string and `out` writable.
 */
enum GcStatus gc_endo_apply(const struct GcEndomorphism *endo, const char *word, char **out);

/**
 * # Safety
 * `endo` must be a live handle and `out` writable.
 */
enum GcStatus gc_endo_is_injective(const struct GcEndomorphism *endo, bool *out);

/**
 * # Safety
 * `endo` must be NULL or a handle that has not been freed.
 */
void gc_endo_free(struct GcEndomorphism *endo);

/**
 * `⟨v, w⟩` for a word `v` and a cyclic word `w` of the given rank.
 *
 * # Safety
 * `v` and `w` must be valid C strings and `out` writable.
 */
enum GcStatus gc_count_occurrences(const char *v, const char *w, uintptr_t rank, uint64_t *out);

/**
 * Level-`level` coordinates of the rational current of a cyclic word.
 *
 * # Safety
 * `chart` must be a live handle, `word` a valid C string and `out` writable.
 */
enum GcStatus gc_current_rational(const struct GcChart *chart,
                                  const char *word,
                                  uintptr_t level,
                                  struct GcLevelVector **out);

/**
 * Level-`level` coordinates of the uniform current on a bouquet.
 *
 * # Safety
 * `chart` must be a live handle and `out` writable.
 */
enum GcStatus gc_current_uniform(const struct GcChart *chart,
                                 uintptr_t level,
                                 struct GcLevelVector **out);

/**
 * # Safety
 * `json` must be a valid C string and `out` writable.
 */
enum GcStatus gc_current_from_json(const char *json, struct GcLevelVector **out);

/**
 * # Safety
 * `x` must be a live handle and `out` writable.
 */
enum GcStatus gc_current_to_json(const struct GcLevelVector *x, char **out);

/**
 * Cyclic word whose current equals an integral point.
 *
 * # Safety
 * `x` must be a live handle and `out` writable.
 */
enum GcStatus gc_current_realize(const struct GcLevelVector *x, char **out);

/**
 * # Safety
 * `x` must be NULL or a handle that has not been freed.
 */
void gc_current_free(struct GcLevelVector *x);

/**
 * `I(ℓ, x)` as `"p/q"`, with `ℓ` given as a JSON metric on the current's
 * chart; NULL means simplicial.
 *
 * # Safety
 * `x` must be a live handle, `metric_json` NULL or a valid C string, and
 * `out` writable.
 */
enum GcStatus gc_intersection_form(const struct GcLevelVector *x,
                                   const char *metric_json,
                                   char **out);

/**
 * Exact generic stretching factor of `ℓ_A ∘ f` as `"p/q"`.
 *
 * # Safety
 * `endo` must be a live handle and `out` writable.
 */
enum GcStatus gc_stretch_exact(const struct GcEndomorphism *endo, char **out);

/**
 * Closed-form generic stretch of `φ = στ²` at rank `k`, as `"p/q"`.
 *
 * # Safety
 * `out` must be writable.
 */
enum GcStatus gc_closed_form_phi(uintptr_t k, char **out);

/**
 * Closed-form generic stretch of `φ⁻¹` at rank `k`, as `"p/q"`. With
 * `corrected` false this is the proposed form, which disagrees with the
 * exact value.
 *
 * # Safety
 * `out` must be writable.
 */
enum GcStatus gc_closed_form_phi_inverse(uintptr_t k, bool corrected, char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* GEOCURRENTS_H */
