#ifndef TWISTEE_H
#define TWISTEE_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

/**
 * Result codes. Zero is success.
 */
typedef enum TwisteeStatus {
  TWISTEE_STATUS_OK = 0,
  TWISTEE_STATUS_NULL_POINTER = 1,
  TWISTEE_STATUS_INVALID_UTF8 = 2,
  TWISTEE_STATUS_CONFIG = 3,
  TWISTEE_STATUS_LATTICE = 4,
  TWISTEE_STATUS_GEOMETRY = 5,
  TWISTEE_STATUS_LOGICAL = 6,
  TWISTEE_STATUS_ORACLE = 7,
  TWISTEE_STATUS_FUSION_TABLE = 8,
  TWISTEE_STATUS_OUT_OF_RANGE = 9,
  TWISTEE_STATUS_INTERNAL = 10,
  TWISTEE_STATUS_PANIC = 11,
} TwisteeStatus;

/**
 * A prepared pure stabilizer state together with its lattice. Opaque to C.
 */
typedef struct TwisteeState TwisteeState;

/**
 * One row of a fusion table.
 */
typedef struct TwisteeFusionOutcome {
  double probability;
  double d_inner;
  double d_outer;
} TwisteeFusionOutcome;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Builds the state of experiment `index` in a TOML config, anyon strings
 * applied. Free the handle with [`twistee_state_free`].
 *
 * # Safety
 * `config_toml` must be a NUL-terminated string and `out` a valid pointer.
 */
enum TwisteeStatus twistee_state_from_toml(const char *config_toml,
                                           size_t index,
                                           struct TwisteeState **out);

/**
 * Releases a handle. Null is ignored.
 *
 * # Safety
 * `state` must come from [`twistee_state_from_toml`] and not be freed twice.
 */
void twistee_state_free(struct TwisteeState *state);

/**
 * Physical qubits of the lattice, or 0 for a null handle.
 *
 * # Safety
 * `state` must be null or a live handle.
 */
size_t twistee_state_num_qubits(const struct TwisteeState *state);

/**
 * Logical qubits encoded by the local terms, or 0 for a null handle.
 *
 * # Safety
 * `state` must be null or a live handle.
 */
size_t twistee_state_logical_qubits(const struct TwisteeState *state);

/**
 * Entropy in bits of the qubits inside an axis-aligned rectangle (wrapping
 * around the torus).
 *
 * # Safety
 * `state` must be a live handle and `out` a valid pointer.
 */
enum TwisteeStatus twistee_rect_entropy(const struct TwisteeState *state,
                                        size_t x,
                                        size_t y,
                                        size_t width,
                                        size_t height,
                                        size_t *out);

/**
 * Entropy in bits of an arbitrary set of qubit indices.
 *
 * # Safety
 * `qubits` must point to `len` readable values (or be null with `len == 0`);
 * `state` must be a live handle and `out` a valid pointer.
 */
enum TwisteeStatus twistee_region_entropy(const struct TwisteeState *state,
                                          const size_t *qubits,
                                          size_t len,
                                          size_t *out);

/**
 * Runs every experiment of a TOML config and returns the JSON report.
 * Free the string with [`twistee_string_free`].
 *
 * # Safety
 * `config_toml` must be a NUL-terminated string and `out` a valid pointer.
 */
enum TwisteeStatus twistee_run_config_json(const char *config_toml,
                                           size_t oracle_cap,
                                           bool cross_check,
                                           char **out);

/**
 * Releases a string returned by this library. Null is ignored.
 *
 * # Safety
 * `s` must come from this library and not be freed twice.
 */
void twistee_string_free(char *s);

/**
 * Annular entropy predicted by a fusion table.
 *
 * # Safety
 * `table` must point to `len` readable rows and `out` must be valid.
 */
enum TwisteeStatus twistee_predict_s_ann(const struct TwisteeFusionOutcome *table,
                                         size_t len,
                                         double total_dimension,
                                         double *out);

/**
 * Quantum dimension `d = D · 2^(s_ann / 2)`.
 */
double twistee_extract_dimension(double s_ann, double total_dimension);

/**
 * Message of the last failed call on this thread, or null. The pointer stays
 * valid until the next call into the library from the same thread.
 */
const char *twistee_last_error_message(void);

/**
 * Library version as a static string.
 */
const char *twistee_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* TWISTEE_H */
