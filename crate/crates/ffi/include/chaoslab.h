#ifndef CHAOSLAB_H
#define CHAOSLAB_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stddef.h>
#include <stdint.h>
#include <stdbool.h>

typedef enum ChlStatus {
  CHL_STATUS_OK = 0,
  CHL_STATUS_NULL_POINTER = 1,
  CHL_STATUS_INVALID_INPUT = 2,
  CHL_STATUS_DOMAIN = 3,
  CHL_STATUS_NOT_CONVERGED = 4,
  CHL_STATUS_CANNOT_MEASURE = 5,
  CHL_STATUS_NO_OVERLAP = 6,
  CHL_STATUS_ZERO_SEPARATION = 7,
  CHL_STATUS_BUFFER_TOO_SMALL = 8,
  CHL_STATUS_INTERNAL = 9,
} ChlStatus;

typedef enum ChlSystem {
  CHL_SYSTEM_STANDARD = 0,
  CHL_SYSTEM_NORMAL_FORM = 1,
  CHL_SYSTEM_LINEARIZED_AXIS = 2,
} ChlSystem;

typedef enum ChlMethod {
  CHL_METHOD_EULER = 0,
  CHL_METHOD_AB2 = 1,
  CHL_METHOD_AB3 = 2,
  CHL_METHOD_AB4 = 3,
  CHL_METHOD_AB5 = 4,
  CHL_METHOD_RK2 = 5,
  CHL_METHOD_RK4 = 6,
  CHL_METHOD_CRANK_NICOLSON = 7,
  CHL_METHOD_ADAPTIVE_RK = 8,
} ChlMethod;

typedef enum ChlComponent {
  CHL_COMPONENT_X = 0,
  CHL_COMPONENT_Y = 1,
  CHL_COMPONENT_Z = 2,
  CHL_COMPONENT_EUCLIDEAN = 3,
} ChlComponent;

// Opaque list of jump events.
typedef struct ChlJumpList ChlJumpList;

// Opaque sampled trajectory.
typedef struct ChlTrajectory ChlTrajectory;

// Parameters of the standard system. A null pointer means s = 10, r = 28, b = 8/3.
typedef struct ChlParams {
  double s;
  double r;
  double b;
} ChlParams;

typedef struct ChlState {
  double x;
  double y;
  double z;
} ChlState;

typedef struct ChlJumpEvent {
  double t;
  struct ChlState before;
  struct ChlState after;
  double u_before;
  double u_after;
  uint8_t sector_before;
  uint8_t sector_after;
} ChlJumpEvent;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Library version as a static NUL-terminated string.
const char *chl_version(void);

// Message for the last failure on this thread. Valid until the next failing
// call on the same thread; empty if nothing has failed.
const char *chl_last_error_message(void);

// Evaluates the vector field of `system` at `state`.
//
// # Safety
// `params` may be null; `out_rate` must be valid for writes.
enum ChlStatus chl_eval(enum ChlSystem system,
                        const struct ChlParams *params,
                        struct ChlState state,
                        struct ChlState *out_rate);

// Writes the equilibria (origin first) into `out_points`, which must hold
// `capacity` states. `out_count` receives the number of equilibria even when
// the buffer is too small.
//
// # Safety
// `out_points` must be valid for `capacity` writes; `out_count` must be valid.
enum ChlStatus chl_equilibria(enum ChlSystem system,
                              const struct ChlParams *params,
                              struct ChlState *out_points,
                              uintptr_t capacity,
                              uintptr_t *out_count);

// Slopes of the local stable and unstable directions at height `z`.
//
// # Safety
// Both out pointers must be valid for writes.
enum ChlStatus chl_slopes(double z, double *out_a_minus, double *out_a_plus);

// Signed offset of `state` from the local stable surface.
//
// # Safety
// `out_u` must be valid for writes.
enum ChlStatus chl_stable_offset(struct ChlState state, double *out_u);

// Sector 1 to 4 of `state` relative to the local stable and unstable surfaces.
//
// # Safety
// `out_sector` must be valid for writes.
enum ChlStatus chl_classify_sector(struct ChlState state, uint8_t *out_sector);

// Integrates from `initial` to `t_end`, recording every `stride` steps.
// For the adaptive method, `dt * stride` is the output spacing.
//
// # Safety
// `params` may be null; `out_traj` must be valid for writes. The handle must
// be released with `chl_trajectory_free`.
enum ChlStatus chl_integrate(enum ChlSystem system,
                             const struct ChlParams *params,
                             struct ChlState initial,
                             enum ChlMethod method,
                             double dt,
                             double t_end,
                             uint64_t stride,
                             struct ChlTrajectory **out_traj);

// Number of samples, or 0 for a null handle.
//
// # Safety
// `traj` must be null or a live handle.
uintptr_t chl_trajectory_len(const struct ChlTrajectory *traj);

// # Safety
// `traj` must be a live handle; out pointers must be valid for writes.
enum ChlStatus chl_trajectory_sample(const struct ChlTrajectory *traj,
                                     uintptr_t index,
                                     double *out_t,
                                     struct ChlState *out_state);

// Reports whether the run was truncated by a blow-up and, if so, when.
//
// # Safety
// `traj` must be a live handle; out pointers must be valid for writes.
enum ChlStatus chl_trajectory_blow_up(const struct ChlTrajectory *traj,
                                      bool *out_blew_up,
                                      double *out_t);

// # Safety
// `traj` must be null or a handle not yet freed.
void chl_trajectory_free(struct ChlTrajectory *traj);

// Earliest common time at which `component` of the two runs differs by more
// than `threshold`. `out_found` is false if they never do.
//
// # Safety
// Handles must be live; out pointers must be valid for writes.
enum ChlStatus chl_divergence_time(const struct ChlTrajectory *a,
                                   const struct ChlTrajectory *b,
                                   enum ChlComponent component,
                                   double threshold,
                                   bool *out_found,
                                   double *out_t_div);

// Running time average of x^2. Writes one (t, value) pair per sample after
// the first into the two buffers; `out_count` always receives the length.
//
// # Safety
// Buffers must be valid for `capacity` writes; `out_count` must be valid.
enum ChlStatus chl_running_e(const struct ChlTrajectory *traj,
                             double *out_times,
                             double *out_values,
                             uintptr_t capacity,
                             uintptr_t *out_count);

// Stable-surface crossings between consecutive samples inside the zone of
// `radius` around the z-axis, up to height `z_max`.
//
// # Safety
// `traj` must be live; `out_list` must be valid for writes. Release the list
// with `chl_jump_list_free`.
enum ChlStatus chl_detect_jumps(const struct ChlTrajectory *traj,
                                double radius,
                                double z_max,
                                struct ChlJumpList **out_list);

// # Safety
// `list` must be null or a live handle.
uintptr_t chl_jump_list_len(const struct ChlJumpList *list);

// # Safety
// `list` must be live; `out_event` must be valid for writes.
enum ChlStatus chl_jump_list_get(const struct ChlJumpList *list,
                                 uintptr_t index,
                                 struct ChlJumpEvent *out_event);

// # Safety
// `list` must be null or a handle not yet freed.
void chl_jump_list_free(struct ChlJumpList *list);

// Empirical convergence order of a fixed-step method from at least three
// step sizes in geometric progression.
//
// # Safety
// `dts` must point to `n` doubles; `out_order` must be valid for writes.
enum ChlStatus chl_measure_order(enum ChlMethod method,
                                 const double *dts,
                                 uintptr_t n,
                                 double *out_order);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CHAOSLAB_H */
