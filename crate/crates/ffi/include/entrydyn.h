#ifndef ENTRYDYN_H
#define ENTRYDYN_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes returned by every fallible call.
 */
typedef enum EdStatus {
  ED_STATUS_OK = 0,
  ED_STATUS_NULL_POINTER = 1,
  ED_STATUS_INVALID_PARAMETER = 2,
  ED_STATUS_DOMAIN = 3,
  ED_STATUS_DEGENERATE_EQUILIBRIUM = 4,
  ED_STATUS_NO_CONVERGENCE = 5,
  ED_STATUS_SINGULAR = 6,
  ED_STATUS_OUT_OF_RANGE = 7,
  ED_STATUS_PANIC = 8,
  ED_STATUS_OTHER = 9,
} EdStatus;

/**
 * Opaque linear market `p_i = a − x_i − b·Σ x_j`, cost `c·x + f`.
 */
typedef struct EdMarket EdMarket;

/**
 * Opaque simulated path.
 */
typedef struct EdTrajectory EdTrajectory;

typedef struct EdSolverConfig {
  double tol_residual;
  double tol_step;
  size_t max_iter;
  double damping;
  size_t max_backtracks;
  double fd_step;
  size_t continuation_steps;
} EdSolverConfig;

typedef struct EdSimulationConfig {
  double s;
  double n0;
  double horizon;
  double dt;
  /**
   * Entry driven by per-firm instead of total profit.
   */
  bool average_profit;
  double rate_tol;
} EdSimulationConfig;

typedef struct EdStaticResult {
  double x;
  double n;
  double price;
  double residual_norm;
  size_t iterations;
  bool assumptions_ok;
} EdStaticResult;

/**
 * A dynamic steady state. `dxi_dn` and `delta` are NaN for the open loop.
 */
typedef struct EdSteadyState {
  double x;
  double n;
  double lambda_s;
  double residual_norm;
  size_t iterations;
  double soc_value;
  bool soc_ok;
  double dxi_dn;
  double delta;
} EdSteadyState;

typedef struct EdSample {
  double t;
  double n;
  double x;
  double per_firm_profit;
  double total_profit;
} EdSample;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Creates a market handle. On success `*out` owns the handle.
 *
 * # Safety
 * `out` must be null or valid for writes.
 */
enum EdStatus ed_market_new(double a, double b, double c, double f, struct EdMarket **out);

/**
 * Releases a market handle. Null is ignored.
 *
 * # Safety
 * `market` must be null or a handle from [`ed_market_new`] not yet freed.
 */
void ed_market_free(struct EdMarket *market);

struct EdSolverConfig ed_solver_config_default(void);

struct EdSimulationConfig ed_simulation_config_default(void);

/**
 * Static free-entry equilibrium. `cfg` may be null for defaults.
 *
 * # Safety
 * `market` must be a live handle; `cfg` null or valid; `out` valid for writes.
 */
enum EdStatus ed_solve_static(const struct EdMarket *market,
                              const struct EdSolverConfig *cfg,
                              struct EdStaticResult *out);

/**
 * Open-loop steady state at rates `(s, rho)`.
 *
 * # Safety
 * Same as [`ed_solve_static`].
 */
enum EdStatus ed_solve_open_loop(const struct EdMarket *market,
                                 double s,
                                 double rho,
                                 const struct EdSolverConfig *cfg,
                                 struct EdSteadyState *out);

/**
 * Closed-loop steady state at rates `(s, rho)`. A nonzero
 * `suppress_feedback` drops the `∂x_i/∂n` term.
 *
 * # Safety
 * Same as [`ed_solve_static`].
 */
enum EdStatus ed_solve_closed_loop(const struct EdMarket *market,
                                   double s,
                                   double rho,
                                   bool suppress_feedback,
                                   const struct EdSolverConfig *cfg,
                                   struct EdSteadyState *out);

/**
 * Runs the entry simulator. On success `*out` owns a trajectory handle.
 * `cfg` may be null for defaults.
 *
 * # Safety
 * `market` must be a live handle; `cfg` null or valid; `out` valid for writes.
 */
enum EdStatus ed_simulate(const struct EdMarket *market,
                          const struct EdSimulationConfig *cfg,
                          struct EdTrajectory **out);

/**
 * Number of samples, or 0 for null.
 *
 * # Safety
 * `traj` must be null or a live handle.
 */
size_t ed_trajectory_len(const struct EdTrajectory *traj);

/**
 * Copies sample `index` into `*out`.
 *
 * # Safety
 * `traj` must be a live handle and `out` valid for writes.
 */
enum EdStatus ed_trajectory_get(const struct EdTrajectory *traj,
                                size_t index,
                                struct EdSample *out);

/**
 * Whether `|dn/dt|` at the horizon fell below the rate tolerance.
 *
 * # Safety
 * `traj` must be null or a live handle.
 */
bool ed_trajectory_converged(const struct EdTrajectory *traj);

/**
 * Releases a trajectory handle. Null is ignored.
 *
 * # Safety
 * `traj` must be null or a handle from [`ed_simulate`] not yet freed.
 */
void ed_trajectory_free(struct EdTrajectory *traj);

/**
 * Static, NUL-terminated description of a status code.
 */
const char *ed_status_message(enum EdStatus status);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ENTRYDYN_H */
