//! C ABI over the `entrydyn` solvers.
//!
//! Markets and trajectories are opaque heap handles created by `ed_*_new` or
//! `ed_simulate` and released with the matching `ed_*_free`. Every fallible
//! call returns an [`EdStatus`]; results go to caller-provided out-pointers,
//! which are left untouched on failure. Panics never cross the boundary.

use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};

use entrydyn::{
    simulate_entry, solve_closedloop_from, solve_openloop_from, solve_static, Error, FeedbackMode, LinearMarket,
    ProfitMode, SimulationConfig, SolverConfig, SteadyState, Trajectory,
};

/// Status codes returned by every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EdStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidParameter = 2,
    Domain = 3,
    DegenerateEquilibrium = 4,
    NoConvergence = 5,
    Singular = 6,
    OutOfRange = 7,
    Panic = 8,
    Other = 9,
}

impl From<&Error> for EdStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::InvalidParameter(_) | Error::Config(_) => EdStatus::InvalidParameter,
            Error::Domain { .. } | Error::NoPositiveOutput { .. } => EdStatus::Domain,
            Error::DegenerateEquilibrium { .. } => EdStatus::DegenerateEquilibrium,
            Error::Solve(_) | Error::StepFailure { .. } => EdStatus::NoConvergence,
            Error::Singular(_) | Error::DivisionByZero(_) => EdStatus::Singular,
            _ => EdStatus::Other,
        }
    }
}

/// Opaque linear market `p_i = a − x_i − b·Σ x_j`, cost `c·x + f`.
pub struct EdMarket {
    inner: LinearMarket,
}

/// Opaque simulated path.
pub struct EdTrajectory {
    inner: Trajectory,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdSolverConfig {
    pub tol_residual: f64,
    pub tol_step: f64,
    pub max_iter: usize,
    pub damping: f64,
    pub max_backtracks: usize,
    pub fd_step: f64,
    pub continuation_steps: usize,
}

impl From<SolverConfig> for EdSolverConfig {
    fn from(c: SolverConfig) -> Self {
        EdSolverConfig {
            tol_residual: c.tol_residual,
            tol_step: c.tol_step,
            max_iter: c.max_iter,
            damping: c.damping,
            max_backtracks: c.max_backtracks,
            fd_step: c.fd_step,
            continuation_steps: c.continuation_steps,
        }
    }
}

impl From<EdSolverConfig> for SolverConfig {
    fn from(c: EdSolverConfig) -> Self {
        SolverConfig {
            tol_residual: c.tol_residual,
            tol_step: c.tol_step,
            max_iter: c.max_iter,
            damping: c.damping,
            max_backtracks: c.max_backtracks,
            fd_step: c.fd_step,
            continuation_steps: c.continuation_steps,
        }
    }
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdStaticResult {
    pub x: f64,
    pub n: f64,
    pub price: f64,
    pub residual_norm: f64,
    pub iterations: usize,
    pub assumptions_ok: bool,
}

/// A dynamic steady state. `dxi_dn` and `delta` are NaN for the open loop.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdSteadyState {
    pub x: f64,
    pub n: f64,
    pub lambda_s: f64,
    pub residual_norm: f64,
    pub iterations: usize,
    pub soc_value: f64,
    pub soc_ok: bool,
    pub dxi_dn: f64,
    pub delta: f64,
}

impl From<&SteadyState> for EdSteadyState {
    fn from(st: &SteadyState) -> Self {
        EdSteadyState {
            x: st.x,
            n: st.n,
            lambda_s: st.lambda_s,
            residual_norm: st.residual_norm,
            iterations: st.iterations,
            soc_value: st.soc_value,
            soc_ok: st.soc_ok,
            dxi_dn: st.feedback.map_or(f64::NAN, |f| f.dxi_dn),
            delta: st.feedback.map_or(f64::NAN, |f| f.delta),
        }
    }
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdSimulationConfig {
    pub s: f64,
    pub n0: f64,
    pub horizon: f64,
    pub dt: f64,
    /// Entry driven by per-firm instead of total profit.
    pub average_profit: bool,
    pub rate_tol: f64,
}

impl From<EdSimulationConfig> for SimulationConfig {
    fn from(c: EdSimulationConfig) -> Self {
        SimulationConfig {
            s: c.s,
            n0: c.n0,
            horizon: c.horizon,
            dt: c.dt,
            mode: if c.average_profit {
                ProfitMode::Average
            } else {
                ProfitMode::Total
            },
            rate_tol: c.rate_tol,
        }
    }
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdSample {
    pub t: f64,
    pub n: f64,
    pub x: f64,
    pub per_firm_profit: f64,
    pub total_profit: f64,
}

fn guard(f: impl FnOnce() -> EdStatus) -> EdStatus {
    catch_unwind(AssertUnwindSafe(f)).unwrap_or(EdStatus::Panic)
}

fn solver_config(cfg: *const EdSolverConfig) -> Result<SolverConfig, EdStatus> {
    // SAFETY: the caller passes null or a pointer to a valid config.
    let cfg = match unsafe { cfg.as_ref() } {
        Some(c) => SolverConfig::from(*c),
        None => SolverConfig::default(),
    };
    cfg.validate().map_err(|_| EdStatus::InvalidParameter)?;
    Ok(cfg)
}

/// Creates a market handle. On success `*out` owns the handle.
///
/// # Safety
/// `out` must be null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ed_market_new(a: f64, b: f64, c: f64, f: f64, out: *mut *mut EdMarket) -> EdStatus {
    guard(|| {
        if out.is_null() {
            return EdStatus::NullPointer;
        }
        match LinearMarket::new(a, b, c, f) {
            Ok(m) => {
                // SAFETY: checked non-null above.
                unsafe { *out = Box::into_raw(Box::new(EdMarket { inner: m })) };
                EdStatus::Ok
            }
            Err(e) => EdStatus::from(&e),
        }
    })
}

/// Releases a market handle. Null is ignored.
///
/// # Safety
/// `market` must be null or a handle from [`ed_market_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ed_market_free(market: *mut EdMarket) {
    if !market.is_null() {
        // SAFETY: ownership returns from the caller.
        drop(unsafe { Box::from_raw(market) });
    }
}

#[no_mangle]
pub extern "C" fn ed_solver_config_default() -> EdSolverConfig {
    SolverConfig::default().into()
}

#[no_mangle]
pub extern "C" fn ed_simulation_config_default() -> EdSimulationConfig {
    let c = SimulationConfig::default();
    EdSimulationConfig {
        s: c.s,
        n0: c.n0,
        horizon: c.horizon,
        dt: c.dt,
        average_profit: c.mode == ProfitMode::Average,
        rate_tol: c.rate_tol,
    }
}

/// Static free-entry equilibrium. `cfg` may be null for defaults.
///
/// # Safety
/// `market` must be a live handle; `cfg` null or valid; `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ed_solve_static(
    market: *const EdMarket,
    cfg: *const EdSolverConfig,
    out: *mut EdStaticResult,
) -> EdStatus {
    guard(|| {
        // SAFETY: per the contract above.
        let (Some(m), false) = (unsafe { market.as_ref() }, out.is_null()) else {
            return EdStatus::NullPointer;
        };
        let cfg = match solver_config(cfg) {
            Ok(c) => c,
            Err(s) => return s,
        };
        match solve_static(&m.inner.demand(), &m.inner.cost(), &cfg) {
            Ok(eq) => {
                // SAFETY: checked non-null above.
                unsafe {
                    *out = EdStaticResult {
                        x: eq.x_tilde,
                        n: eq.n_tilde,
                        price: eq.price,
                        residual_norm: eq.residual_norm,
                        iterations: eq.iterations,
                        assumptions_ok: eq.audit.all_ok(),
                    }
                };
                EdStatus::Ok
            }
            Err(e) => EdStatus::from(&e),
        }
    })
}

unsafe fn solve_dynamic(
    market: *const EdMarket,
    s: f64,
    rho: f64,
    cfg: *const EdSolverConfig,
    out: *mut EdSteadyState,
    closed: Option<FeedbackMode>,
) -> EdStatus {
    guard(|| {
        // SAFETY: per the contract of the public wrappers.
        let (Some(m), false) = (unsafe { market.as_ref() }, out.is_null()) else {
            return EdStatus::NullPointer;
        };
        let cfg = match solver_config(cfg) {
            Ok(c) => c,
            Err(s) => return s,
        };
        let (d, c) = (m.inner.demand(), m.inner.cost());
        let solved = solve_static(&d, &c, &cfg).and_then(|base| match closed {
            None => solve_openloop_from(&d, &c, &base, s, rho, &cfg),
            Some(mode) => solve_closedloop_from(&d, &c, &base, s, rho, mode, &cfg),
        });
        match solved {
            Ok(st) => {
                // SAFETY: checked non-null above.
                unsafe { *out = EdSteadyState::from(&st) };
                EdStatus::Ok
            }
            Err(e) => EdStatus::from(&e),
        }
    })
}

/// Open-loop steady state at rates `(s, rho)`.
///
/// # Safety
/// Same as [`ed_solve_static`].
#[no_mangle]
pub unsafe extern "C" fn ed_solve_open_loop(
    market: *const EdMarket,
    s: f64,
    rho: f64,
    cfg: *const EdSolverConfig,
    out: *mut EdSteadyState,
) -> EdStatus {
    unsafe { solve_dynamic(market, s, rho, cfg, out, None) }
}

/// Closed-loop steady state at rates `(s, rho)`. A nonzero
/// `suppress_feedback` drops the `∂x_i/∂n` term.
///
/// # Safety
/// Same as [`ed_solve_static`].
#[no_mangle]
pub unsafe extern "C" fn ed_solve_closed_loop(
    market: *const EdMarket,
    s: f64,
    rho: f64,
    suppress_feedback: bool,
    cfg: *const EdSolverConfig,
    out: *mut EdSteadyState,
) -> EdStatus {
    let mode = if suppress_feedback {
        FeedbackMode::Suppressed
    } else {
        FeedbackMode::Full
    };
    unsafe { solve_dynamic(market, s, rho, cfg, out, Some(mode)) }
}

/// Runs the entry simulator. On success `*out` owns a trajectory handle.
/// `cfg` may be null for defaults.
///
/// # Safety
/// `market` must be a live handle; `cfg` null or valid; `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ed_simulate(
    market: *const EdMarket,
    cfg: *const EdSimulationConfig,
    out: *mut *mut EdTrajectory,
) -> EdStatus {
    guard(|| {
        // SAFETY: per the contract above.
        let (Some(m), false) = (unsafe { market.as_ref() }, out.is_null()) else {
            return EdStatus::NullPointer;
        };
        // SAFETY: null or valid.
        let cfg = unsafe { cfg.as_ref() }.map_or_else(SimulationConfig::default, |c| (*c).into());
        match simulate_entry(&m.inner.demand(), &m.inner.cost(), &cfg) {
            Ok(t) => {
                // SAFETY: checked non-null above.
                unsafe { *out = Box::into_raw(Box::new(EdTrajectory { inner: t })) };
                EdStatus::Ok
            }
            Err(e) => EdStatus::from(&e),
        }
    })
}

/// Number of samples, or 0 for null.
///
/// # Safety
/// `traj` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ed_trajectory_len(traj: *const EdTrajectory) -> usize {
    // SAFETY: null or live.
    unsafe { traj.as_ref() }.map_or(0, |t| t.inner.len())
}

/// Copies sample `index` into `*out`.
///
/// # Safety
/// `traj` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ed_trajectory_get(traj: *const EdTrajectory, index: usize, out: *mut EdSample) -> EdStatus {
    guard(|| {
        // SAFETY: per the contract above.
        let (Some(t), false) = (unsafe { traj.as_ref() }, out.is_null()) else {
            return EdStatus::NullPointer;
        };
        let t = &t.inner;
        if index >= t.len() {
            return EdStatus::OutOfRange;
        }
        // SAFETY: checked non-null above.
        unsafe {
            *out = EdSample {
                t: t.t[index],
                n: t.n[index],
                x: t.x[index],
                per_firm_profit: t.per_firm_profit[index],
                total_profit: t.total_profit[index],
            }
        };
        EdStatus::Ok
    })
}

/// Whether `|dn/dt|` at the horizon fell below the rate tolerance.
///
/// # Safety
/// `traj` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ed_trajectory_converged(traj: *const EdTrajectory) -> bool {
    // SAFETY: null or live.
    unsafe { traj.as_ref() }.is_some_and(|t| t.inner.converged)
}

/// Releases a trajectory handle. Null is ignored.
///
/// # Safety
/// `traj` must be null or a handle from [`ed_simulate`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ed_trajectory_free(traj: *mut EdTrajectory) {
    if !traj.is_null() {
        // SAFETY: ownership returns from the caller.
        drop(unsafe { Box::from_raw(traj) });
    }
}

/// Static, NUL-terminated description of a status code.
#[no_mangle]
pub extern "C" fn ed_status_message(status: EdStatus) -> *const c_char {
    let msg: &'static CStr = match status {
        EdStatus::Ok => c"ok",
        EdStatus::NullPointer => c"null pointer argument",
        EdStatus::InvalidParameter => c"invalid parameter",
        EdStatus::Domain => c"argument outside the model's domain",
        EdStatus::DegenerateEquilibrium => c"static equilibrium has no more than one firm",
        EdStatus::NoConvergence => c"solver did not converge",
        EdStatus::Singular => c"singular feedback or zero divisor",
        EdStatus::OutOfRange => c"index out of range",
        EdStatus::Panic => c"internal panic",
        EdStatus::Other => c"other error",
    };
    msg.as_ptr()
}
