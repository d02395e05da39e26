//! Two-dimensional damped Newton with a finite-difference Jacobian, natural
//! and adaptive parameter continuation, and a safeguarded scalar root finder.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Solver knobs. Deserialized from the `"solver"` section of a run config.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverConfig {
    /// Infinity-norm residual threshold.
    pub tol_residual: f64,
    /// Newton steps smaller than this (infinity norm) count as stagnation.
    pub tol_step: f64,
    pub max_iter: usize,
    /// Backtracking shrink factor, in `(0, 1)`.
    pub damping: f64,
    pub max_backtracks: usize,
    /// Relative finite-difference step; the absolute floor is `1e-9`.
    pub fd_step: f64,
    /// Grid count for homotopy in `s` (and for `continue_in_parameter`).
    pub continuation_steps: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            tol_residual: 1e-10,
            tol_step: 1e-12,
            max_iter: 200,
            damping: 0.5,
            max_backtracks: 40,
            fd_step: 1e-7,
            continuation_steps: 20,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<(), String> {
        let positive = [
            ("tol_residual", self.tol_residual),
            ("tol_step", self.tol_step),
            ("fd_step", self.fd_step),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(format!("solver.{name} must be positive, got {v}"));
            }
        }
        if !(self.damping > 0.0 && self.damping < 1.0) {
            return Err(format!("solver.damping must lie in (0, 1), got {}", self.damping));
        }
        if self.max_iter < 1 || self.max_backtracks < 1 || self.continuation_steps < 1 {
            return Err("solver iteration caps must be >= 1".into());
        }
        Ok(())
    }
}

const FD_FLOOR: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolveOutcome {
    pub solution: [f64; 2],
    pub residual_norm: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Residual infinity norm at the guess and after every accepted step.
    pub trail: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum StallReason {
    IterationCap,
    BacktrackingExhausted,
    SingularJacobian,
    Stagnation,
    /// Adaptive continuation could not shrink its step any further.
    ContinuationStepUnderflow,
}

#[derive(Debug, Clone, Error)]
pub enum SolveError {
    #[error("no convergence ({reason:?}) after {} iterations, residual {:.3e}", outcome.iterations, outcome.residual_norm)]
    NonConvergence {
        reason: StallReason,
        outcome: Box<SolveOutcome>,
    },
    #[error("residual is not finite at ({}, {})", at[0], at[1])]
    NonFinite { at: [f64; 2] },
}

fn inf_norm(r: [f64; 2]) -> f64 {
    r[0].abs().max(r[1].abs())
}

fn is_finite2(r: [f64; 2]) -> bool {
    r[0].is_finite() && r[1].is_finite()
}

/// Central-difference Jacobian `J[i][j] = ∂r_i/∂u_j`.
pub fn fd_jacobian<F>(residual: &F, u: [f64; 2], fd_step: f64) -> [[f64; 2]; 2]
where
    F: Fn(f64, f64) -> [f64; 2],
{
    let mut jac = [[0.0; 2]; 2];
    for j in 0..2 {
        let h = (fd_step * u[j].abs()).max(FD_FLOOR);
        let mut up = u;
        let mut dn = u;
        up[j] += h;
        dn[j] -= h;
        let rp = residual(up[0], up[1]);
        let rm = residual(dn[0], dn[1]);
        for i in 0..2 {
            jac[i][j] = (rp[i] - rm[i]) / (2.0 * h);
        }
    }
    jac
}

fn newton_direction(jac: [[f64; 2]; 2], r: [f64; 2]) -> Option<[f64; 2]> {
    let det = jac[0][0] * jac[1][1] - jac[0][1] * jac[1][0];
    let scale = jac.iter().flatten().fold(0.0_f64, |m, v| m.max(v.abs()));
    if !det.is_finite() || det.abs() <= f64::EPSILON * scale * scale {
        return None;
    }
    let du = -(jac[1][1] * r[0] - jac[0][1] * r[1]) / det;
    let dv = -(-jac[1][0] * r[0] + jac[0][0] * r[1]) / det;
    Some([du, dv])
}

/// Damped Newton on a two-equation system.
///
/// A trial step is accepted only if the residual is finite there and its
/// infinity norm strictly decreases; otherwise the step is shrunk by
/// `cfg.damping`, at most `cfg.max_backtracks` times.
pub fn solve_2d<F>(residual: F, guess: [f64; 2], cfg: &SolverConfig) -> Result<SolveOutcome, SolveError>
where
    F: Fn(f64, f64) -> [f64; 2],
{
    let mut u = guess;
    let mut r = residual(u[0], u[1]);
    if !is_finite2(r) {
        return Err(SolveError::NonFinite { at: u });
    }
    let mut norm = inf_norm(r);
    let mut trail = vec![norm];
    let mut iterations = 0;

    let stall = |reason, u: [f64; 2], norm, iterations, trail: Vec<f64>| SolveError::NonConvergence {
        reason,
        outcome: Box::new(SolveOutcome {
            solution: u,
            residual_norm: norm,
            iterations,
            converged: false,
            trail,
        }),
    };

    loop {
        if norm <= cfg.tol_residual {
            return Ok(SolveOutcome {
                solution: u,
                residual_norm: norm,
                iterations,
                converged: true,
                trail,
            });
        }
        if iterations >= cfg.max_iter {
            return Err(stall(StallReason::IterationCap, u, norm, iterations, trail));
        }
        iterations += 1;

        let jac = fd_jacobian(&residual, u, cfg.fd_step);
        let Some(dir) = newton_direction(jac, r) else {
            return Err(stall(StallReason::SingularJacobian, u, norm, iterations, trail));
        };

        let mut t = 1.0;
        let mut accepted = None;
        for _ in 0..=cfg.max_backtracks {
            let trial = [u[0] + t * dir[0], u[1] + t * dir[1]];
            let rt = residual(trial[0], trial[1]);
            if is_finite2(rt) && inf_norm(rt) < norm {
                accepted = Some((trial, rt));
                break;
            }
            t *= cfg.damping;
        }
        let Some((next, rn)) = accepted else {
            return Err(stall(StallReason::BacktrackingExhausted, u, norm, iterations, trail));
        };

        let step = (next[0] - u[0]).abs().max((next[1] - u[1]).abs());
        u = next;
        r = rn;
        norm = inf_norm(r);
        trail.push(norm);
        if step <= cfg.tol_step && norm > cfg.tol_residual {
            return Err(stall(StallReason::Stagnation, u, norm, iterations, trail));
        }
    }
}

/// One grid point of a continuation run.
#[derive(Debug, Clone)]
pub struct ContinuationPoint {
    pub theta: f64,
    pub result: Result<SolveOutcome, SolveError>,
}

/// Natural continuation over an explicit grid. Each point is warm-started
/// from the last converged solution (the seed before any has converged).
/// Failures are recorded in place.
pub fn continue_along<F>(family: F, grid: &[f64], seed: [f64; 2], cfg: &SolverConfig) -> Vec<ContinuationPoint>
where
    F: Fn(f64, f64, f64) -> [f64; 2],
{
    let mut warm = seed;
    grid.iter()
        .map(|&theta| {
            let result = solve_2d(|u, v| family(theta, u, v), warm, cfg);
            if let Ok(out) = &result {
                warm = out.solution;
            }
            ContinuationPoint { theta, result }
        })
        .collect()
}

/// `steps` evenly spaced points from `from` to `to`, endpoints exact.
pub fn linear_grid(from: f64, to: f64, steps: usize) -> Vec<f64> {
    match steps {
        0 => vec![],
        1 => vec![from],
        _ => (0..steps)
            .map(|i| {
                if i + 1 == steps {
                    to
                } else {
                    from + (to - from) * i as f64 / (steps - 1) as f64
                }
            })
            .collect(),
    }
}

/// `steps` log-spaced points from `from` to `to` (both positive).
pub fn log_grid(from: f64, to: f64, steps: usize) -> Vec<f64> {
    linear_grid(from.ln(), to.ln(), steps)
        .into_iter()
        .enumerate()
        .map(|(i, l)| match i {
            0 => from,
            _ if i + 1 == steps => to,
            _ => l.exp(),
        })
        .collect()
}

/// Natural continuation on `cfg.continuation_steps` evenly spaced values of
/// the parameter between `theta_from` and `theta_to`.
pub fn continue_in_parameter<F>(
    family: F,
    theta_from: f64,
    theta_to: f64,
    seed: [f64; 2],
    cfg: &SolverConfig,
) -> Vec<ContinuationPoint>
where
    F: Fn(f64, f64, f64) -> [f64; 2],
{
    let grid = linear_grid(theta_from, theta_to, cfg.continuation_steps.max(2));
    continue_along(family, &grid, seed, cfg)
}

/// Largest relative move of either coordinate accepted in one homotopy step.
const MAX_RELATIVE_JUMP: f64 = 0.25;
const MAX_HALVINGS: u32 = 30;

/// Tracks the root branch through `seed` (a root at `theta_from`) up to
/// `theta_to` with adaptive step control.
///
/// Starts with `cfg.continuation_steps` equal steps; a step is halved when
/// Newton fails or when the solution jumps by more than 25% in either
/// coordinate, which keeps the tracker on the branch it started from.
pub fn track_branch<F>(
    family: F,
    theta_from: f64,
    theta_to: f64,
    seed: [f64; 2],
    cfg: &SolverConfig,
) -> Result<SolveOutcome, SolveError>
where
    F: Fn(f64, f64, f64) -> [f64; 2],
{
    if theta_from == theta_to {
        return solve_2d(|u, v| family(theta_to, u, v), seed, cfg);
    }
    let base = (theta_to - theta_from) / cfg.continuation_steps as f64;
    let min_step = base.abs() * 0.5_f64.powi(MAX_HALVINGS as i32);
    let mut theta = theta_from;
    let mut current = seed;
    let mut h = base;
    let mut total_iterations = 0;
    let mut last: Option<SolveOutcome> = None;

    while last.is_none() || theta != theta_to {
        let remaining = theta_to - theta;
        let (target, is_final) = if h.abs() >= remaining.abs() {
            (theta_to, true)
        } else {
            (theta + h, false)
        };
        let attempt = solve_2d(|u, v| family(target, u, v), current, cfg);
        let ok = match &attempt {
            Ok(out) => {
                let jump = (0..2)
                    .map(|k| (out.solution[k] - current[k]).abs() / current[k].abs().max(1e-3))
                    .fold(0.0, f64::max);
                jump <= MAX_RELATIVE_JUMP
            }
            Err(_) => false,
        };
        if ok {
            let out = attempt.expect("checked above");
            total_iterations += out.iterations;
            current = out.solution;
            theta = if is_final { theta_to } else { target };
            last = Some(out);
            if h.abs() < base.abs() {
                h *= 2.0;
            }
        } else {
            h *= 0.5;
            if h.abs() < min_step {
                return Err(match attempt {
                    Err(e @ SolveError::NonFinite { .. }) => e,
                    Err(SolveError::NonConvergence { outcome, .. }) => SolveError::NonConvergence {
                        reason: StallReason::ContinuationStepUnderflow,
                        outcome,
                    },
                    Ok(out) => SolveError::NonConvergence {
                        reason: StallReason::ContinuationStepUnderflow,
                        outcome: Box::new(SolveOutcome {
                            converged: false,
                            ..out
                        }),
                    },
                });
            }
        }
    }
    let mut out = last.expect("loop runs at least once");
    out.iterations = total_iterations;
    Ok(out)
}

/// Root of a scalar function on `[lo, hi]` where `f(lo)` and `f(hi)` have
/// opposite signs: Newton steps (derivative by finite differences) kept
/// inside the shrinking bracket, with bisection as the fallback.
pub fn solve_bracketed<F>(f: F, mut lo: f64, mut hi: f64, tol: f64, max_iter: usize) -> Option<f64>
where
    F: Fn(f64) -> f64,
{
    let mut flo = f(lo);
    let fhi = f(hi);
    if !(flo.is_finite() && fhi.is_finite()) || flo * fhi > 0.0 {
        return None;
    }
    if flo == 0.0 {
        return Some(lo);
    }
    if fhi == 0.0 {
        return Some(hi);
    }
    let mut x = 0.5 * (lo + hi);
    for _ in 0..max_iter {
        let fx = f(x);
        if fx == 0.0 {
            return Some(x);
        }
        if fx.signum() == flo.signum() {
            lo = x;
            flo = fx;
        } else {
            hi = x;
        }
        if (hi - lo).abs() <= tol * (1.0 + x.abs()) {
            return Some(0.5 * (lo + hi));
        }
        let h = (1e-7 * x.abs()).max(FD_FLOOR);
        let slope = (f(x + h) - f(x - h)) / (2.0 * h);
        let newton = x - fx / slope;
        x = if newton.is_finite() && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn affine_system_converges_immediately() {
        let out = solve_2d(|u, v| [u - 2.0, v - 4.75], [1.0, 1.0], &SolverConfig::default()).unwrap();
        assert!(out.converged);
        assert!(out.iterations <= 2);
        assert_relative_eq!(out.solution[0], 2.0, epsilon = 1e-12);
        assert_relative_eq!(out.solution[1], 4.75, epsilon = 1e-12);
    }

    #[test]
    fn no_real_root_reports_nonconvergence() {
        for guess in [[1.0, 1.0], [-3.0, 2.0], [0.0, 0.0], [10.0, -5.0]] {
            let err = solve_2d(|u, v| [u * u + 1.0, v], guess, &SolverConfig::default()).unwrap_err();
            match err {
                SolveError::NonConvergence { outcome, .. } => {
                    assert!(!outcome.converged);
                    assert!(!outcome.trail.is_empty());
                }
                other => panic!("unexpected {other:?}"),
            }
        }
    }

    #[test]
    fn nonfinite_guess_is_reported() {
        let err = solve_2d(|u, v| [u.ln(), v], [-1.0, 0.0], &SolverConfig::default()).unwrap_err();
        assert!(matches!(err, SolveError::NonFinite { .. }));
    }

    #[test]
    fn trail_is_strictly_decreasing() {
        let out = solve_2d(
            |u, v| [u * u + v * v - 4.0, u - v * v * v],
            [3.0, 0.2],
            &SolverConfig::default(),
        )
        .unwrap();
        assert!(out.trail.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn fd_jacobian_of_quadratic() {
        let r = |u: f64, v: f64| [u * u + 3.0 * u * v, 2.0 * v * v - u];
        for (u, v) in [(1.0, 2.0), (-0.7, 0.3), (5.0, -4.0)] {
            let j = fd_jacobian(&r, [u, v], 1e-7);
            let exact = [[2.0 * u + 3.0 * v, 3.0 * u], [-1.0, 4.0 * v]];
            for i in 0..2 {
                for k in 0..2 {
                    assert_relative_eq!(j[i][k], exact[i][k], max_relative = 1e-5);
                }
            }
        }
    }

    #[test]
    fn analytic_family_continuation() {
        let cfg = SolverConfig {
            continuation_steps: 3,
            ..SolverConfig::default()
        };
        let pts = continue_in_parameter(|t, u, v| [u - t, v - t * t], 1.0, 2.0, [1.0, 1.0], &cfg);
        let expected = [(1.0, 1.0, 1.0), (1.5, 1.5, 2.25), (2.0, 2.0, 4.0)];
        assert_eq!(pts.len(), 3);
        for (p, (t, u, v)) in pts.iter().zip(expected) {
            assert_eq!(p.theta, t);
            let s = p.result.as_ref().unwrap().solution;
            assert_relative_eq!(s[0], u, epsilon = 1e-12);
            assert_relative_eq!(s[1], v, epsilon = 1e-12);
        }
    }

    #[test]
    fn constant_family_gives_constant_solution() {
        let pts = continue_in_parameter(
            |_t, u, v| [u * u - 2.0, v + u],
            0.0,
            5.0,
            [1.0, 0.0],
            &SolverConfig::default(),
        );
        let first = pts[0].result.as_ref().unwrap().solution;
        for p in &pts {
            let s = p.result.as_ref().unwrap().solution;
            assert_relative_eq!(s[0], first[0], epsilon = 1e-12);
            assert_relative_eq!(s[1], first[1], epsilon = 1e-12);
        }
    }

    #[test]
    fn failed_points_are_recorded_not_dropped() {
        // No real root for t > 1.
        let pts = continue_in_parameter(
            |t, u, v| [u * u - (1.0 - t), v],
            0.0,
            2.0,
            [1.0, 0.0],
            &SolverConfig {
                continuation_steps: 5,
                ..SolverConfig::default()
            },
        );
        assert_eq!(pts.len(), 5);
        assert!(pts[0].result.is_ok());
        assert!(pts[4].result.is_err());
    }

    #[test]
    fn reversed_continuation_agrees() {
        let fam = |t: f64, u: f64, v: f64| [u * u * u + u - t, v - u * t];
        let cfg = SolverConfig::default();
        let fwd = continue_in_parameter(fam, 0.5, 3.0, [0.5, 0.2], &cfg);
        let rev_seed = fwd.last().unwrap().result.as_ref().unwrap().solution;
        let rev = continue_in_parameter(fam, 3.0, 0.5, rev_seed, &cfg);
        for (a, b) in fwd.iter().zip(rev.iter().rev()) {
            assert_relative_eq!(a.theta, b.theta, epsilon = 1e-12);
            let sa = a.result.as_ref().unwrap().solution;
            let sb = b.result.as_ref().unwrap().solution;
            assert!((sa[0] - sb[0]).abs() < 1e-8 && (sa[1] - sb[1]).abs() < 1e-8);
        }
    }

    #[test]
    fn branch_tracking_stays_on_starting_branch() {
        // Roots u = ±sqrt(1 + t); start on the negative branch.
        let out = track_branch(
            |t, u, v| [u * u - 1.0 - t, v],
            0.0,
            8.0,
            [-1.0, 0.0],
            &SolverConfig::default(),
        )
        .unwrap();
        assert_relative_eq!(out.solution[0], -3.0, epsilon = 1e-10);
    }

    #[test]
    fn branch_tracking_fails_at_fold() {
        // u² = 1 − t has no real root past t = 1.
        let err = track_branch(
            |t, u, v| [u * u - 1.0 + t, v],
            0.0,
            2.0,
            [1.0, 0.0],
            &SolverConfig::default(),
        );
        assert!(err.is_err());
    }

    #[test]
    fn grids() {
        assert_eq!(linear_grid(0.0, 1.0, 2), vec![0.0, 1.0]);
        let g = log_grid(0.1, 10.0, 3);
        assert_eq!(g[0], 0.1);
        assert_relative_eq!(g[1], 1.0, epsilon = 1e-12);
        assert_eq!(g[2], 10.0);
    }

    #[test]
    fn bracketed_root() {
        let r = solve_bracketed(|x| x * x - 2.0, 0.0, 2.0, 1e-15, 200).unwrap();
        assert_relative_eq!(r, 2f64.sqrt(), epsilon = 1e-13);
        assert!(solve_bracketed(|x| x * x + 1.0, -1.0, 1.0, 1e-12, 100).is_none());
    }

    #[test]
    fn config_validation() {
        assert!(SolverConfig::default().validate().is_ok());
        assert!(SolverConfig {
            damping: 1.0,
            ..Default::default()
        }
        .validate()
        .is_err());
        assert!(SolverConfig {
            tol_residual: 0.0,
            ..Default::default()
        }
        .validate()
        .is_err());
        assert!(SolverConfig {
            max_iter: 0,
            ..Default::default()
        }
        .validate()
        .is_err());
        let parsed: SolverConfig = serde_json::from_str(r#"{"tol_residual": 1e-8}"#).unwrap();
        assert_eq!(parsed.tol_residual, 1e-8);
        assert_eq!(parsed.max_iter, 200);
        assert!(serde_json::from_str::<SolverConfig>(r#"{"tolerance": 1}"#).is_err());
    }
}
