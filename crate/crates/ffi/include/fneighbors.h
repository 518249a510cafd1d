#ifndef FNEIGHBORS_H
#define FNEIGHBORS_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum FnCoverClass {
  FN_COVER_CLASS_NON_NULL_HOMOTOPIC = 0,
  FN_COVER_CLASS_NULL_HOMOTOPIC = 1,
  FN_COVER_CLASS_INCONCLUSIVE = 2,
} FnCoverClass;

typedef enum FnStatus {
  FN_STATUS_OK = 0,
  FN_STATUS_NULL_ARGUMENT = 1,
  FN_STATUS_INVALID_ARGUMENT = 2,
  FN_STATUS_OUT_OF_RANGE = 3,
  FN_STATUS_DEGENERATE = 4,
  FN_STATUS_COVER_DEGENERATE = 5,
  FN_STATUS_UNDERSAMPLED = 6,
  FN_STATUS_NO_WITNESS = 7,
  FN_STATUS_INTERNAL = 8,
  FN_STATUS_PANIC = 9,
} FnStatus;

typedef enum FnVerdict {
  FN_VERDICT_YES = 0,
  FN_VERDICT_NO = 1,
  FN_VERDICT_UNCERTAIN = 2,
} FnVerdict;

/**
 * A sampled domain.
 */
typedef struct FnDomain FnDomain;

/**
 * Certified neighbor sets of an image set.
 */
typedef struct FnGraph FnGraph;

/**
 * Images of a domain's samples under a map.
 */
typedef struct FnImages FnImages;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *fn_version(void);

/**
 * Message for the last failed call on this thread, or NULL. Valid until the
 * next failing call on the same thread.
 */
const char *fn_last_error(void);

/**
 * √((n+2)/n).
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum FnStatus fn_thm2_bound(size_t n, double *out);

/**
 * Quasi-uniform sample of Sⁿ with `samples` points.
 *
 * # Safety
 * `out` must be valid for writes; the handle is released with `fn_domain_free`.
 */
enum FnStatus fn_domain_sphere(size_t n, size_t samples, uint64_t seed, struct FnDomain **out);

/**
 * Lattice sample of ∂[0,1]ᵐ with at least `samples` points.
 *
 * # Safety
 * As for `fn_domain_sphere`.
 */
enum FnStatus fn_domain_cube(size_t m, size_t samples, struct FnDomain **out);

/**
 * # Safety
 * `domain` must be a live handle or NULL.
 */
size_t fn_domain_len(const struct FnDomain *domain);

/**
 * Ambient dimension of the samples.
 *
 * # Safety
 * `domain` must be a live handle or NULL.
 */
size_t fn_domain_dim(const struct FnDomain *domain);

/**
 * Copy sample `index` into `coords` (capacity `cap` ≥ dimension).
 *
 * # Safety
 * `domain` must be a live handle, `coords` valid for `cap` writes.
 */
enum FnStatus fn_domain_sample(const struct FnDomain *domain,
                               size_t index,
                               double *coords,
                               size_t cap);

/**
 * # Safety
 * `domain` must come from a constructor and not be used afterwards; NULL is
 * ignored.
 */
void fn_domain_free(struct FnDomain *domain);

/**
 * Evaluate a map given as JSON (`{"family": …, "m_out": …, "params": […]}`).
 *
 * # Safety
 * `domain` must be a live handle, `map_json` a NUL-terminated string and
 * `out` valid for writes.
 */
enum FnStatus fn_images_evaluate(const struct FnDomain *domain,
                                 const char *map_json,
                                 struct FnImages **out);

/**
 * Image set from `count` row-major points of dimension `dim`.
 *
 * # Safety
 * `data` must be valid for `count · dim` reads and `out` for writes.
 */
enum FnStatus fn_images_from_flat(const double *data,
                                  size_t count,
                                  size_t dim,
                                  struct FnImages **out);

/**
 * # Safety
 * `images` must be a live handle or NULL.
 */
size_t fn_images_len(const struct FnImages *images);

/**
 * # Safety
 * `images` must be a live handle or NULL.
 */
size_t fn_images_dim(const struct FnImages *images);

/**
 * # Safety
 * As for `fn_domain_free`.
 */
void fn_images_free(struct FnImages *images);

/**
 * Whether samples `a` and `b` are neighbors, with default tolerances.
 *
 * # Safety
 * `images` must be a live handle and `out` valid for writes.
 */
enum FnStatus fn_pair_is_neighbor(const struct FnImages *images,
                                  size_t a,
                                  size_t b,
                                  enum FnVerdict *out);

/**
 * Certified neighbor sets of `images` (which must be aligned with `domain`).
 *
 * # Safety
 * Both handles must be live and `out` valid for writes; release the graph
 * with `fn_graph_free`.
 */
enum FnStatus fn_graph_build(const struct FnImages *images,
                             const struct FnDomain *domain,
                             struct FnGraph **out);

/**
 * Number of certificates.
 *
 * # Safety
 * `graph` must be a live handle or NULL.
 */
size_t fn_graph_len(const struct FnGraph *graph);

/**
 * Largest intrinsic distance between certified neighbors.
 *
 * # Safety
 * `graph` must be a live handle and `out` valid for writes.
 */
enum FnStatus fn_graph_df(const struct FnGraph *graph, double *out);

/**
 * Sample indices of certificate `k`: writes up to `cap` of them to
 * `indices` and the full count to `count`.
 *
 * # Safety
 * `graph` must be live, `indices` valid for `cap` writes (may be NULL when
 * `cap` is 0), `count` valid for writes.
 */
enum FnStatus fn_graph_certificate(const struct FnGraph *graph,
                                   size_t k,
                                   size_t *indices,
                                   size_t cap,
                                   size_t *count);

/**
 * # Safety
 * As for `fn_domain_free`.
 */
void fn_graph_free(struct FnGraph *graph);

/**
 * Classify the domain's standard cover (regular triangulation on spheres,
 * facets on simplex and cube boundaries) by the degree of its
 * partition-of-unity map. `degree` is meaningful unless the class is
 * inconclusive.
 *
 * # Safety
 * `domain` must be live; the out-pointers valid for writes.
 */
enum FnStatus fn_cover_degree(const struct FnDomain *domain,
                              enum FnCoverClass *class_,
                              int64_t *degree,
                              double *confidence);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* FNEIGHBORS_H */
