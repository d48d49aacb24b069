#ifndef DQLS_H
#define DQLS_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result of every fallible call.
typedef enum DqlsStatus {
  DQLS_STATUS_OK = 0,
  // A required pointer argument was null.
  DQLS_STATUS_NULL_POINTER = 1,
  // Malformed dimensions, neighborhoods, edges or amplitudes.
  DQLS_STATUS_INVALID_INPUT = 2,
  // The target is not stabilizable and the call needs it to be.
  DQLS_STATUS_NOT_DQLS = 3,
  // The dense Liouvillian would exceed the requested cap.
  DQLS_STATUS_DIMENSION_CAP = 4,
  // A numerical routine failed (eigensolver, integrator).
  DQLS_STATUS_NUMERICAL = 5,
  // The caller's output buffer is too small.
  DQLS_STATUS_BUFFER_TOO_SMALL = 6,
  // A Rust panic was caught at the boundary.
  DQLS_STATUS_PANIC = 7,
  DQLS_STATUS_OTHER = 8,
} DqlsStatus;

// Gain policy for synthesized noise operators.
typedef enum DqlsGains {
  DQLS_GAINS_UNIFORM = 0,
  DQLS_GAINS_GRADED = 1,
} DqlsGains;

// Opaque result of a stabilizability check.
typedef struct DqlsCheckReport DqlsCheckReport;

// Opaque locality pattern.
typedef struct DqlsPattern DqlsPattern;

// Opaque set of synthesized noise operators together with their space.
typedef struct DqlsStabilizers DqlsStabilizers;

// Opaque pure state.
typedef struct DqlsState DqlsState;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failed call on this thread, or null if none.
//
// The pointer stays valid until the next failing call on the same thread.
const char *dqls_last_error(void);

// Default relative support threshold used when a tolerance argument is 0.
double dqls_default_tolerance(void);

// GHZ state on `n` qubits.
//
// # Safety
// `out` must be a valid pointer to a writable handle slot.
enum DqlsStatus dqls_state_ghz(size_t n, struct DqlsState **out);

// W state on `n` qubits.
//
// # Safety
// `out` must be a valid pointer to a writable handle slot.
enum DqlsStatus dqls_state_w(size_t n, struct DqlsState **out);

// The four-qubit state that is stabilizable on two overlapping triples
// but not a graph state of that pattern.
//
// # Safety
// `out` must be a valid pointer to a writable handle slot.
enum DqlsStatus dqls_state_psi_t(struct DqlsState **out);

// Graph state on `n` qubits; `edges` holds `num_edges` pairs laid out flat.
//
// # Safety
// `edges` must be valid for `2 * num_edges` reads and `out` must be writable.
enum DqlsStatus dqls_state_graph(size_t n,
                                 const size_t *edges,
                                 size_t num_edges,
                                 struct DqlsState **out);

// State from explicit amplitudes on subsystems of dimensions `dims`.
// The vector is normalized; `len` must equal the product of `dims`.
//
// # Safety
// `dims` must be valid for `num_dims` reads, `re` and `im` for `len` reads,
// and `out` must be writable.
enum DqlsStatus dqls_state_from_amplitudes(const size_t *dims,
                                           size_t num_dims,
                                           const double *re,
                                           const double *im,
                                           size_t len,
                                           struct DqlsState **out);

// Total Hilbert-space dimension of the state, or 0 for a null handle.
//
// # Safety
// `state` must be null or a live handle.
size_t dqls_state_dim(const struct DqlsState *state);

// Copies the amplitudes into `re` and `im`, each of capacity `cap`.
//
// # Safety
// `state` must be a live handle; `re` and `im` must be writable for `cap` values.
enum DqlsStatus dqls_state_amplitudes(const struct DqlsState *state,
                                      double *re,
                                      double *im,
                                      size_t cap);

// # Safety
// `state` must be null or a handle not yet freed.
void dqls_state_free(struct DqlsState *state);

// Locality pattern in CSR layout: neighborhood `k` is
// `indices[offsets[k] .. offsets[k + 1]]`, so `offsets` has
// `num_neighborhoods + 1` entries.
//
// # Safety
// `dims` must be valid for `num_dims` reads, `offsets` for
// `num_neighborhoods + 1` reads, `indices` for `offsets[num_neighborhoods]`
// reads, and `out` must be writable.
enum DqlsStatus dqls_pattern_new(const size_t *dims,
                                 size_t num_dims,
                                 const size_t *indices,
                                 const size_t *offsets,
                                 size_t num_neighborhoods,
                                 struct DqlsPattern **out);

// # Safety
// `pattern` must be null or a live handle.
size_t dqls_pattern_len(const struct DqlsPattern *pattern);

// # Safety
// `pattern` must be null or a handle not yet freed.
void dqls_pattern_free(struct DqlsPattern *pattern);

// Decides stabilizability of `state` under `pattern`. `rel_tol` of 0 picks
// the default support threshold.
//
// # Safety
// `state` and `pattern` must be live handles and `out` writable.
enum DqlsStatus dqls_check(const struct DqlsState *state,
                           const struct DqlsPattern *pattern,
                           double rel_tol,
                           struct DqlsCheckReport **out);

// 1 if stabilizable, 0 otherwise (including a null handle).
//
// # Safety
// `report` must be null or a live handle.
int32_t dqls_report_verdict(const struct DqlsCheckReport *report);

// 1 if a rank decision fell inside the borderline band and the verdict was
// forced to 0.
//
// # Safety
// `report` must be null or a live handle.
int32_t dqls_report_indeterminate(const struct DqlsCheckReport *report);

// # Safety
// `report` must be null or a live handle.
size_t dqls_report_intersection_dim(const struct DqlsCheckReport *report);

// Distance between the intersection and the span of the target, or NaN
// for a null handle.
//
// # Safety
// `report` must be null or a live handle.
double dqls_report_target_distance(const struct DqlsCheckReport *report);

// Copies the orthonormal intersection basis, a `D x k` column-major matrix,
// into `re` and `im` of capacity `cap` each.
//
// # Safety
// `report` must be a live handle; `re` and `im` must be writable for `cap` values.
enum DqlsStatus dqls_report_intersection_basis(const struct DqlsCheckReport *report,
                                               double *re,
                                               double *im,
                                               size_t cap);

// # Safety
// `report` must be null or a handle not yet freed.
void dqls_report_free(struct DqlsCheckReport *report);

// Builds the parent Hamiltonian and reports its kernel dimension and
// whether the target minimizes every term.
//
// # Safety
// `state` and `pattern` must be live handles; both outputs must be writable.
enum DqlsStatus dqls_parent_hamiltonian(const struct DqlsState *state,
                                        const struct DqlsPattern *pattern,
                                        double rel_tol,
                                        size_t *kernel_dim,
                                        int32_t *frustration_free);

// Synthesizes one noise operator per neighborhood. Returns
// [`DqlsStatus::NotDqls`] for a non-stabilizable target unless `force` is
// nonzero.
//
// # Safety
// `state` and `pattern` must be live handles and `out` writable.
enum DqlsStatus dqls_synthesize(const struct DqlsState *state,
                                const struct DqlsPattern *pattern,
                                enum DqlsGains gains,
                                double rel_tol,
                                int32_t force,
                                struct DqlsStabilizers **out);

// Number of synthesized operators, or 0 for a null handle.
//
// # Safety
// `stabilizers` must be null or a live handle.
size_t dqls_stabilizers_len(const struct DqlsStabilizers *stabilizers);

// Copies operator `index`, embedded in the full space, as a `D x D`
// column-major matrix into `re` and `im` of capacity `cap` each.
//
// # Safety
// `stabilizers` must be a live handle; `re` and `im` must be writable for `cap` values.
enum DqlsStatus dqls_stabilizers_operator(const struct DqlsStabilizers *stabilizers,
                                          size_t index,
                                          double *re,
                                          double *im,
                                          size_t cap);

// Spectral certificate of the synthesized dynamics. Fails with
// [`DqlsStatus::DimensionCap`] when the state dimension exceeds `dim_cap`.
//
// # Safety
// `stabilizers` and `target` must be live handles; every output must be writable.
enum DqlsStatus dqls_certify(const struct DqlsStabilizers *stabilizers,
                             const struct DqlsState *target,
                             size_t dim_cap,
                             int32_t *certified,
                             double *gap,
                             size_t *kernel_dim);

// # Safety
// `stabilizers` must be null or a handle not yet freed.
void dqls_stabilizers_free(struct DqlsStabilizers *stabilizers);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* DQLS_H */
