#ifndef TELESIGMA_H
#define TELESIGMA_H

#include <stddef.h>
#include <stdint.h>

// Result codes. `TS_STATUS_OK` is zero; everything else is an error.
typedef enum ts_status {
  TS_STATUS_OK = 0,
  TS_STATUS_NULL_POINTER = 1,
  TS_STATUS_INVALID_UTF8 = 2,
  // Malformed spec, non-telescopic sequence, inadmissible parameter, wrong length.
  TS_STATUS_INVALID_INPUT = 3,
  // Outside the supported scope (e.g. periods for `a_1 != 2`).
  TS_STATUS_UNSUPPORTED = 4,
  // The curve is singular or its cycle geometry degenerates.
  TS_STATUS_SINGULAR = 5,
  // A numeric or algebraic step failed.
  TS_STATUS_NUMERIC = 6,
  // A panic was caught at the boundary.
  TS_STATUS_PANIC = 7,
} ts_status;

// A curve: its spec and canonical equations.
typedef struct ts_curve ts_curve;

// A sigma function of a hyperelliptic curve.
typedef struct ts_sigma ts_sigma;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the last failing call on this thread; empty after a success.
// The pointer stays valid until the next `ts_*` call on the same thread.
const char *ts_last_error_message(void);

// Parse a curve spec JSON document.
//
// # Safety
// `json` must be a NUL-terminated string and `out` a valid pointer.
enum ts_status ts_curve_from_json(const char *json, struct ts_curve **out);

// A curve from a bare sequence; omitted parameters are symbolic when
// `symbolic` is nonzero and zero otherwise.
//
// # Safety
// `a` must point to `len` integers and `out` must be valid.
enum ts_status ts_curve_from_sequence(const uint32_t *a,
                                      size_t len,
                                      int32_t symbolic,
                                      struct ts_curve **out);

// # Safety
// `curve` must come from a `ts_curve_*` constructor (or be null) and not be used afterwards.
void ts_curve_free(struct ts_curve *curve);

// # Safety
// `curve` and `out` must be valid pointers.
enum ts_status ts_curve_genus(const struct ts_curve *curve, uint32_t *out);

// The canonical equations, one per line, in the polynomial text format.
//
// # Safety
// `curve` and `out` must be valid; release `*out` with [`ts_string_free`].
enum ts_status ts_curve_equations(const struct ts_curve *curve, char **out);

// q-table, c-table and second-kind differentials as JSON.
//
// # Safety
// `curve` and `out` must be valid; release `*out` with [`ts_string_free`].
enum ts_status ts_curve_fundform_json(const struct ts_curve *curve, char **out);

// The verification report as JSON, with default settings.
//
// # Safety
// `curve` and `out` must be valid; release `*out` with [`ts_string_free`].
enum ts_status ts_curve_verify_json(const struct ts_curve *curve, char **out);

// Periods and sigma for a concrete hyperelliptic curve.
//
// # Safety
// `curve` and `out` must be valid.
enum ts_status ts_sigma_new(const struct ts_curve *curve, struct ts_sigma **out);

// # Safety
// `sigma` must come from [`ts_sigma_new`] (or be null) and not be used afterwards.
void ts_sigma_free(struct ts_sigma *sigma);

// # Safety
// `sigma` and `out` must be valid.
enum ts_status ts_sigma_genus(const struct ts_sigma *sigma, uint32_t *out);

// Evaluate sigma at `u = (u_re[k] + i u_im[k])`, `k < len`, where `len`
// must equal the genus.
//
// # Safety
// `u_re` and `u_im` must point to `len` doubles; `out_re`, `out_im` must be valid.
enum ts_status ts_sigma_eval(const struct ts_sigma *sigma,
                             const double *u_re,
                             const double *u_im,
                             size_t len,
                             double *out_re,
                             double *out_im);

// # Safety
// `s` must be a string returned by this library (or null) and not be used afterwards.
void ts_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* TELESIGMA_H */
