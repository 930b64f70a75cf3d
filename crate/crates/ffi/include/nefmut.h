#ifndef NEFMUT_H
#define NEFMUT_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes returned by every entry point.
 */
typedef enum NefmutStatus {
  /**
   * Success.
   */
  NefmutStatus_Ok = 0,
  /**
   * Malformed or invalid input (parse errors, validation failures,
   * unknown names, wrong model for a certificate).
   */
  NefmutStatus_InvalidInput = 1,
  /**
   * An exact identity failed verification.
   */
  NefmutStatus_VerificationFailed = 2,
  /**
   * Internal consistency error.
   */
  NefmutStatus_Internal = 3,
  /**
   * A required pointer argument was null.
   */
  NefmutStatus_NullPointer = 4,
  /**
   * A panic was caught at the boundary.
   */
  NefmutStatus_Panic = 5,
} NefmutStatus;

/**
 * Opaque handle to a parsed and validated model file.
 */
typedef struct NefmutModel {
  uint8_t _private[0];
} NefmutModel;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Copy the most recent error message into `buf` (truncated to `cap`
 * bytes including the terminator). Returns the full message length.
 *
 * # Safety
 * `buf` must point to at least `cap` writable bytes, or be null.
 */
uintptr_t nefmut_last_error(char *buf, uintptr_t cap);

/**
 * Parse and validate a model-file JSON document into a handle.
 *
 * # Safety
 * `json` must be a valid nul-terminated string; `out` must be a valid
 * pointer to receive the handle.
 */
enum NefmutStatus nefmut_model_parse(const char *json, struct NefmutModel **out);

/**
 * Release a model handle.
 *
 * # Safety
 * `model` must have come from `nefmut_model_parse` and not be freed twice.
 */
void nefmut_model_free(struct NefmutModel *model);

/**
 * Release a string returned by this library.
 *
 * # Safety
 * `s` must have been returned through an out-parameter of this library
 * and not be freed twice.
 */
void nefmut_string_free(char *s);

/**
 * Emit a built-in model as JSON, e.g. spec = "pn 3" or "product p1 p1".
 *
 * # Safety
 * `spec` must be a valid nul-terminated string; `out_json` receives an
 * owned string on success.
 */
enum NefmutStatus nefmut_model_generate(const char *spec, char **out_json);

/**
 * Build and verify the map between two named partitions and return the
 * certificate JSON.
 *
 * # Safety
 * All pointer arguments must be valid; `out_cert` receives an owned
 * string on success.
 */
enum NefmutStatus nefmut_equivalence(const struct NefmutModel *model,
                                     const char *first,
                                     const char *second,
                                     uint64_t seed,
                                     char **out_cert);

/**
 * Extract a Laurent mirror; returns a JSON payload with the mirror in
 * canonical text form, the adapted basis, and the chain.
 *
 * # Safety
 * All pointer arguments must be valid; `out_json` receives an owned
 * string on success.
 */
enum NefmutStatus nefmut_mirror(const struct NefmutModel *model,
                                const char *partition,
                                const char *amenable,
                                uint64_t seed,
                                char **out_json);

/**
 * Build and verify a mirror-equivalence certificate between two
 * partitions with amenable data.
 *
 * # Safety
 * All pointer arguments must be valid; `out_cert` receives an owned
 * string on success.
 */
enum NefmutStatus nefmut_mirror_equivalence(const struct NefmutModel *model,
                                            const char *first_partition,
                                            const char *first_amenable,
                                            const char *second_partition,
                                            const char *second_amenable,
                                            uint64_t seed,
                                            char **out_cert);

/**
 * Independently replay a certificate (either kind) against a model.
 * Returns Ok only when every recomputed identity holds; a report is
 * written to `out_report` when non-null.
 *
 * # Safety
 * All pointer arguments must be valid (`out_report` may be null).
 */
enum NefmutStatus nefmut_certify(const struct NefmutModel *model,
                                 const char *cert_json,
                                 char **out_report);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* NEFMUT_H */
