#ifndef ODX_H
#define ODX_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum OdxStatus {
  ODX_STATUS_OK = 0,
  ODX_STATUS_NULL_POINTER = 1,
  ODX_STATUS_INVALID_ARGUMENT = 2,
  ODX_STATUS_PARSE_ERROR = 3,
  ODX_STATUS_DIMENSION_MISMATCH = 4,
  ODX_STATUS_NUMERICAL = 5,
  ODX_STATUS_UNSUPPORTED = 6,
  ODX_STATUS_BUFFER_TOO_SMALL = 7,
  ODX_STATUS_CHECK_FAILED = 8,
  ODX_STATUS_PANIC = 9,
} OdxStatus;

// Hypothesis family: functions plus priors.
typedef struct OdxFamily OdxFamily;

// Normalized probe state.
typedef struct OdxProbe OdxProbe;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Library version as a static NUL-terminated string.
const char *odx_version(void);

// Copies the calling thread's last error message into `buf` (truncated,
// always NUL-terminated when `len > 0`). Returns the full message length
// including the terminator, so a too-small buffer can be retried.
//
// # Safety
// `buf` must be null or point to `len` writable bytes.
size_t odx_last_error_message(char *buf, size_t len);

// The four one-bit functions with uniform priors.
//
// # Safety
// `out` must be a valid pointer to write the handle to.
enum OdxStatus odx_family_canonical(struct OdxFamily **out);

// Parses a family file (one `n=.. m=.. table=..` line per function,
// uniform priors).
//
// # Safety
// `text` must be a NUL-terminated string; `out` must be writable.
enum OdxStatus odx_family_parse(const char *text, struct OdxFamily **out);

// Number of functions in the family (0 for a null handle).
//
// # Safety
// `fam` must be null or a live handle.
size_t odx_family_len(const struct OdxFamily *fam);

// # Safety
// `fam` must be null or a handle not yet freed.
void odx_family_free(struct OdxFamily *fam);

// The closed-form optimal two-qubit probe.
//
// # Safety
// `out` must be writable.
enum OdxStatus odx_probe_closed_form(struct OdxProbe **out);

// Probe from `count` interleaved amplitudes (`2 * count` doubles);
// `count` must be a power of two. The state is normalized.
//
// # Safety
// `re_im` must point to `2 * count` readable doubles; `out` must be writable.
enum OdxStatus odx_probe_from_amplitudes(const double *re_im, size_t count, struct OdxProbe **out);

// Number of amplitudes (0 for a null handle).
//
// # Safety
// `probe` must be null or a live handle.
size_t odx_probe_dim(const struct OdxProbe *probe);

// Writes `2 * dim` interleaved doubles.
//
// # Safety
// `probe` must be a live handle; `out` must hold `capacity` doubles.
enum OdxStatus odx_probe_amplitudes(const struct OdxProbe *probe, double *out, size_t capacity);

// # Safety
// `probe` must be null or a handle not yet freed.
void odx_probe_free(struct OdxProbe *probe);

// Gram matrix of the post-oracle states, `K x K` complex row-major
// (`2 K^2` doubles). `out_dim` receives `K`.
//
// # Safety
// Handles must be live; `out` must hold `capacity` doubles; `out_dim` must
// be writable.
enum OdxStatus odx_gram(const struct OdxFamily *fam,
                        const struct OdxProbe *probe,
                        double *out,
                        size_t capacity,
                        size_t *out_dim);

// Square-root-measurement success. `per_hypothesis` may be null; otherwise
// it receives one value per family member.
//
// # Safety
// Handles must be live; `average` writable; `per_hypothesis` null or
// holding `capacity` doubles.
enum OdxStatus odx_srm_success(const struct OdxFamily *fam,
                               const struct OdxProbe *probe,
                               double *average,
                               double *per_hypothesis,
                               size_t capacity);

// Simplex search over probes. `best_probe` may be null; otherwise it
// receives a new handle the caller must free.
//
// # Safety
// `fam` must be live; `best_value` writable; `best_probe` null or writable.
enum OdxStatus odx_optimize_probe(const struct OdxFamily *fam,
                                  size_t restarts,
                                  uint64_t seed,
                                  double tol,
                                  double *best_value,
                                  struct OdxProbe **best_probe);

// Best SRM success over `trials` random probes.
//
// # Safety
// `fam` must be live; `best` writable.
enum OdxStatus odx_random_probe_scan(const struct OdxFamily *fam,
                                     size_t trials,
                                     uint64_t seed,
                                     double *best);

// Monte Carlo of the closed-form protocol with a uniformly random hidden
// function per shot.
//
// # Safety
// `successes` and `frequency` must be writable.
enum OdxStatus odx_run_shots(uint64_t shots, uint64_t seed, uint64_t *successes, double *frequency);

// Best deterministic single-query classical strategy (one-bit families).
//
// # Safety
// `fam` must be live; `out` writable.
enum OdxStatus odx_classical_best(const struct OdxFamily *fam, double *out);

// Readout distribution (4 doubles) of the closed-form protocol when the
// hidden function is canonical member `index` (0..4).
//
// # Safety
// `out` must hold `capacity` doubles.
enum OdxStatus odx_protocol_distribution(size_t index, double *out, size_t capacity);

// Runs the verification battery. Writes the pass/total counts and returns
// `ODX_STATUS_CHECK_FAILED` (naming the first failure in the error message)
// unless every check passes. `report_json` may be null; otherwise it
// receives a string to release with [`odx_string_free`].
//
// # Safety
// `passed` and `total` must be writable; `report_json` null or writable.
enum OdxStatus odx_verify(double perturb_theta1,
                          double perturb_probe,
                          size_t *passed,
                          size_t *total,
                          char **report_json);

// Releases a string returned by this library.
//
// # Safety
// `s` must be null or a string from this library not yet freed.
void odx_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ODX_H */
