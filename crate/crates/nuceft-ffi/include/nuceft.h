#ifndef NUCEFT_H
#define NUCEFT_H

/* Generated by cbindgen from nuceft-ffi. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum NuceftStatus {
  NUCEFT_STATUS_OK = 0,
  NUCEFT_STATUS_NULL_POINTER = 1,
  NUCEFT_STATUS_INVALID_UTF8 = 2,
  NUCEFT_STATUS_CONFIG = 3,
  NUCEFT_STATUS_DOMAIN = 4,
  NUCEFT_STATUS_UNSUPPORTED = 5,
  NUCEFT_STATUS_INTERNAL = 6,
  NUCEFT_STATUS_UNKNOWN_FIELD = 7,
} NuceftStatus;

/**
 * A finished cost report.
 */
typedef struct NuceftReport NuceftReport;

/**
 * A task specification.
 */
typedef struct NuceftSpec NuceftSpec;

/**
 * Scalar summary of a report. Absent quantities are NaN (T count under
 * the near-term convention) or 0 (register widths).
 */
typedef struct NuceftSummary {
  double r;
  double total_steps;
  double depth;
  double rz;
  double t_count;
  uint64_t qubits;
  uint64_t step_depth;
  uint64_t ell;
  uint32_t n_b;
} NuceftSummary;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread. Valid until the next
 * failing call on the same thread; never null.
 */
const char *nuceft_last_error(void);

/**
 * Library version, static storage.
 */
const char *nuceft_version(void);

/**
 * Parse a JSON task specification (the same shape the report echoes).
 *
 * # Safety
 * `json` must be a NUL-terminated string and `out` a valid pointer.
 */
enum NuceftStatus nuceft_spec_from_json(const char *json, struct NuceftSpec **out);

/**
 * The crossing-time reference specification for `model` ("pionless",
 * "ope", "dynpi"), `encoding` ("vc", "compact", "jw") and `convention`
 * ("near-term", "fault-tolerant").
 *
 * # Safety
 * String arguments must be NUL-terminated and `out` a valid pointer.
 */
enum NuceftStatus nuceft_spec_reference(const char *model,
                                        const char *encoding,
                                        const char *convention,
                                        struct NuceftSpec **out);

/**
 * Set a numeric field: "eta", "eps", "a_fm", "L", "order", "e_kin",
 * "delta_e", "e_max", "success_prob", "ell" or "n_b".
 *
 * # Safety
 * `spec` must come from this library; `field` must be NUL-terminated.
 */
enum NuceftStatus nuceft_spec_set(struct NuceftSpec *spec, const char *field, double value);

/**
 * # Safety
 * `spec` must come from this library (or be null) and not be used after.
 */
void nuceft_spec_free(struct NuceftSpec *spec);

/**
 * Run the estimator.
 *
 * # Safety
 * `spec` must come from this library and `out` be a valid pointer.
 */
enum NuceftStatus nuceft_estimate(const struct NuceftSpec *spec, struct NuceftReport **out);

/**
 * # Safety
 * `report` must come from this library and `out` be a valid pointer.
 */
enum NuceftStatus nuceft_report_summary(const struct NuceftReport *report,
                                        struct NuceftSummary *out);

/**
 * The full report as JSON; release with [`nuceft_string_free`].
 *
 * # Safety
 * `report` must come from this library and `out` be a valid pointer.
 */
enum NuceftStatus nuceft_report_json(const struct NuceftReport *report, char **out);

/**
 * # Safety
 * `report` must come from this library (or be null) and not be used after.
 */
void nuceft_report_free(struct NuceftReport *report);

/**
 * # Safety
 * `s` must be a string returned by this library (or null).
 */
void nuceft_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* NUCEFT_H */
