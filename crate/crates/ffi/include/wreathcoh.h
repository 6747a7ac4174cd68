#ifndef WREATHCOH_H
#define WREATHCOH_H

#include <stdint.h>
#include <stddef.h>

typedef enum WcStatus {
  WC_STATUS_OK = 0,
  WC_STATUS_NULL_POINTER = 1,
  WC_STATUS_MALFORMED = 2,
  WC_STATUS_PRECONDITION = 3,
  WC_STATUS_UNSUPPORTED = 4,
  WC_STATUS_INSUFFICIENT_PADDING = 5,
  WC_STATUS_OVERFLOW = 6,
  WC_STATUS_INTERNAL = 7,
} WcStatus;

/**
 * Opaque graded abelian group.
 */
typedef struct WcGraded WcGraded;

/**
 * Message of the last failed call on this thread; empty if none.
 * Valid until the next call on the same thread.
 */
const char *wc_last_error(void);

/**
 * # Safety
 * `s` must come from this library or be null.
 */
void wc_string_free(char *s);

/**
 * # Safety
 * `h` must come from this library or be null.
 */
void wc_graded_free(struct WcGraded *h);

/**
 * Parses GradedAbelianGroup JSON.
 *
 * # Safety
 * `json` must be a NUL-terminated string; `out` a valid pointer.
 */
enum WcStatus wc_graded_from_json(const char *json, struct WcGraded **out);

/**
 * # Safety
 * `h` must be a live handle; `out` a valid pointer.
 */
enum WcStatus wc_graded_to_json(const struct WcGraded *h, char **out);

/**
 * Writes up to `cap` orders of the summands in `degree` (0 = Z) into `buf`
 * and their total number into `count`.
 *
 * # Safety
 * `buf` must hold `cap` values (or be null with `cap` = 0); `count` valid.
 */
enum WcStatus wc_graded_orders_at(const struct WcGraded *h,
                                  int64_t degree,
                                  uint64_t *buf,
                                  size_t cap,
                                  size_t *count);

/**
 * Closed-form cohomology of the wreath product with C_p, exact through `max_degree`.
 *
 * # Safety
 * `h` must be a live handle; `out` a valid pointer.
 */
enum WcStatus wc_predict(const struct WcGraded *h,
                         uint64_t p,
                         int64_t max_degree,
                         struct WcGraded **out);

/**
 * Brute-force cohomology on [lo, hi] for the minimal model of `h`.
 *
 * # Safety
 * `h` must be a live handle; `out` a valid pointer.
 */
enum WcStatus wc_bruteforce(const struct WcGraded *h,
                            uint64_t p,
                            int64_t lo,
                            int64_t hi,
                            struct WcGraded **out);

/**
 * Brute-force cohomology on [lo, hi] for D(n, d).
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum WcStatus wc_bruteforce_cyclic(uint64_t p,
                                   uint64_t n,
                                   int64_t d,
                                   int64_t lo,
                                   int64_t hi,
                                   struct WcGraded **out);

/**
 * Detection kernel; `symmetric` nonzero selects the symmetric group on p letters.
 *
 * # Safety
 * `h` must be a live handle; `out` a valid pointer.
 */
enum WcStatus wc_detection_kernel(const struct WcGraded *h,
                                  uint64_t p,
                                  int64_t max_degree,
                                  int symmetric,
                                  struct WcGraded **out);

/**
 * Exponent JSON for a tower such as "C:9 wr C_3".
 *
 * # Safety
 * `tower` must be NUL-terminated; `out` a valid pointer.
 */
enum WcStatus wc_exponents(const char *tower, char **out);

/**
 * Compares brute force with prediction for D(n, d); `matches` gets 1 or 0.
 *
 * # Safety
 * `matches` must be a valid pointer.
 */
enum WcStatus wc_verify(uint64_t p, uint64_t n, int64_t d, int64_t lo, int64_t hi, int *matches);

#endif  /* WREATHCOH_H */
