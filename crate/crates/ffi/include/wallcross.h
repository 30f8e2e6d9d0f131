#ifndef WALLCROSS_H
#define WALLCROSS_H

#include <stdint.h>
#include <stddef.h>

typedef enum WcStatus {
  WC_STATUS_OK = 0,
  WC_STATUS_NULL_POINTER = 1,
  WC_STATUS_INVALID_INPUT = 2,
  WC_STATUS_ON_CENTER = 3,
  WC_STATUS_WALL_POINT = 4,
  WC_STATUS_NOT_ORIENTABLE = 5,
  /*
   The numerics could not certify a result.
   */
  WC_STATUS_CERTIFICATION = 6,
  WC_STATUS_NON_TRANSVERSAL = 7,
  WC_STATUS_COMMON_FACTOR = 8,
  WC_STATUS_PANIC = 9,
  WC_STATUS_OTHER = 10,
} WcStatus;

/*
 Opaque submanifold handle.
 */
typedef struct WcManifold WcManifold;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Hyperquadric `x0² = x1² + … + xn²` in `P^n`.
 */
enum WcStatus wc_manifold_hyperquadric(size_t n, struct WcManifold **out);

/*
 Rational normal curve of degree `n` in `P^n`.
 */
enum WcStatus wc_manifold_veronese(size_t n, struct WcManifold **out);

/*
 Grassmannian of `q`-planes in `R^(p+q)` in its Plücker embedding.
 */
enum WcStatus wc_manifold_plucker(size_t p, size_t q, struct WcManifold **out);

/*
 Releases a handle. Null is ignored.

 # Safety
 `m` must come from a `wc_manifold_*` constructor and not be freed twice.
 */
void wc_manifold_free(struct WcManifold *m);

/*
 Dimension of the ambient vector space and of the manifold. Maps on `m`
 are `(dim + 1) × ambient` matrices.

 # Safety
 `m` must be a live handle; the outputs must be writable.
 */
enum WcStatus wc_manifold_dims(const struct WcManifold *m, size_t *ambient, size_t *dim);

/*
 Degree of `[f]_X`, certified by agreement over several regular targets.

 # Safety
 `f` points to `(dim + 1) * ambient` doubles, row-major.
 */
enum WcStatus wc_degree(const struct WcManifold *m, const double *f, uint64_t seed, int64_t *out);

/*
 Whether `P(ker f)` meets `X`. `regular` is 1 for a regular wall point, 0
 otherwise; `min_indicator` is the smallest wall indicator found.

 # Safety
 `f` as in [`wc_degree`]; the outputs must be writable.
 */
enum WcStatus wc_locate_wall(const struct WcManifold *m,
                             const double *f,
                             int *on_wall,
                             int *regular,
                             double *min_indicator);

/*
 Tracks the straight path `from → to`. Writes the degree change, the number
 of crossings, and up to `cap` crossing parameters and signs (0 when a sign
 is undefined).

 # Safety
 `from`, `to` as in [`wc_degree`]; `t_buf` and `sign_buf` hold `cap` entries
 or are null when `cap` is 0.
 */
enum WcStatus wc_track(const struct WcManifold *m,
                       const double *from,
                       const double *to,
                       uint64_t seed,
                       int64_t *delta,
                       size_t *n_crossings,
                       double *t_buf,
                       int *sign_buf,
                       size_t cap);

/*
 Brockett degree of `p/q` for monic `p`, `q` of degree `n` given by their
 lower coefficients `a_0..a_{n-1}`.

 # Safety
 `p` and `q` each point to `n` integers.
 */
enum WcStatus wc_brockett_degree(size_t n, const int64_t *p, const int64_t *q, int64_t *out);

/*
 Decimal string of the real Wronski degree for `(p, q)`. Free the result
 with [`wc_string_free`].

 # Safety
 `out` must be writable.
 */
enum WcStatus wc_eg_count(size_t p, size_t q, char **out);

/*
 # Safety
 `s` must come from this library and not be freed twice. Null is ignored.
 */
void wc_string_free(char *s);

/*
 Message of the last failed call on this thread, or null. Valid until the
 next call on the same thread.
 */
const char *wc_last_error_message(void);

/*
 Library version as a static string.
 */
const char *wc_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* WALLCROSS_H */
