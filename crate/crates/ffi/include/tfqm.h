/* C ABI for the tfqm time-frequency quantum metrology toolkit. */

#ifndef TFQM_H
#define TFQM_H

/* Generated by cbindgen from tfqm-ffi; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/*
 Result of every FFI call.
 */
typedef enum TfqmStatus {
  /*
   Success.
   */
  TFQM_OK = 0,
  /*
   A pointer argument was null.
   */
  TFQM_NULL_POINTER = 1,
  /*
   The state definition failed to parse or validate.
   */
  TFQM_PARSE_ERROR = 2,
  /*
   Arguments were structurally valid but out of range.
   */
  TFQM_INVALID_ARGUMENT = 3,
  /*
   The computation rejected the state (see the error message).
   */
  TFQM_COMPUTE_ERROR = 4,
  /*
   A panic was caught at the boundary; this indicates a bug.
   */
  TFQM_INTERNAL_ERROR = 5,
} TfqmStatus;

/*
 Opaque state handle: a validated definition plus its sign vector.
 */
typedef struct TfqmState TfqmState;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Message describing the most recent failure on this thread. The pointer
 stays valid until the next failing tfqm call on the same thread. Never
 null.
 */
const char *tfqm_last_error_message(void);

/*
 Parse a JSON state definition (NUL-terminated UTF-8) into a new state
 handle. On success writes the handle to `out_state`; the caller frees
 it with [`tfqm_state_free`].

 # Safety
 `json` must point to a valid NUL-terminated string and `out_state` to
 writable memory for one pointer.
 */
enum TfqmStatus tfqm_state_from_json(const char *json, struct TfqmState **out_state);

/*
 Free a state handle. Null is a no-op.

 # Safety
 `state` must be null or a pointer previously returned by
 [`tfqm_state_from_json`] that has not been freed.
 */
void tfqm_state_free(struct TfqmState *state);

/*
 Number of photons of the state.

 # Safety
 `state` must be a live handle; `out_count` must be writable.
 */
enum TfqmStatus tfqm_state_photon_count(const struct TfqmState *state, size_t *out_count);

/*
 Variance of the collective generator Σ α_i ω̂_i in the state.

 # Safety
 `state` must be a live handle; `out_variance` must be writable.
 */
enum TfqmStatus tfqm_collective_variance(const struct TfqmState *state, double *out_variance);

/*
 Generator variance, quantum Fisher information (4 × variance) and the
 Cramér–Rao bound 1/√(ν·QFI) for ν repetitions. Any out-pointer may be
 null to skip that value.

 # Safety
 `state` must be a live handle; non-null out-pointers must be writable.
 */
enum TfqmStatus tfqm_qfi(const struct TfqmState *state,
                         uint64_t nu,
                         double *out_variance,
                         double *out_qfi,
                         double *out_crb);

/*
 Quantum Fisher information by the finite-difference overlap route on
 the grid representation. `dtheta <= 0` selects the default step
 0.01/ΔΩ. Requires a two-photon state.

 # Safety
 `state` must be a live handle; `out_qfi` must be writable.
 */
enum TfqmStatus tfqm_overlap_qfi(const struct TfqmState *state, double dtheta, double *out_qfi);

/*
 Schmidt entanglement measures of a two-photon state: entropy in bits
 and the participation ratio (Schmidt number). Either out-pointer may be
 null.

 # Safety
 `state` must be a live handle; non-null out-pointers must be writable.
 */
enum TfqmStatus tfqm_schmidt_entropy(const struct TfqmState *state,
                                     double *out_entropy_bits,
                                     double *out_schmidt_number);

/*
 Collective variance of the correlated n-photon family at correlation
 `eta` for each entry of `n_values`, written to `out_variances`
 (same length). `out_transition_n` (nullable) receives η/(1−η), or
 +inf at η = 1.

 # Safety
 `n_values` must point to `len` readable u64 values, `out_variances` to
 `len` writable doubles.
 */
enum TfqmStatus tfqm_scaling_sweep(double eta,
                                   double delta_omega,
                                   const uint64_t *n_values,
                                   size_t len,
                                   double *out_variances,
                                   double *out_transition_n);

/*
 Library version as a static NUL-terminated string.
 */
const char *tfqm_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* TFQM_H */
