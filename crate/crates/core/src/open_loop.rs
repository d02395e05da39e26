//! Open-loop steady state `(x*, n*, λ*s)`.
//!
//! Firms commit to output paths, so the costate on the firm count only
//! carries the direct price effect of entry. At a steady state it reduces to
//! `λ*s = s·∂p_i/∂x_j·x² / (ρ − n·s·∂p_i/∂x_j·x²)`, which is negative, and
//! the first-order condition gains a wedge `λ*s × (monopoly-bundle bracket)`.

use serde::Serialize;

use crate::closed_loop::FeedbackParts;
use crate::error::{require_positive, Error, Result};
use crate::market::{audit_with_costate, AssumptionReport, CostSpec, SymmetricDemand, SymmetricPoint};
use crate::numerics::{track_branch, SolveOutcome, SolverConfig};
use crate::static_eq::{guarded, solve_static, StaticEquilibrium};

/// Half-width of the band inside which a dynamic solution is considered to
/// coincide with the static one.
pub const LIMIT_BAND: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Concept {
    OpenLoop,
    ClosedLoop,
}

/// A steady state of one dynamic solution concept.
#[derive(Debug, Clone, Serialize)]
pub struct SteadyState {
    pub concept: Concept,
    pub x: f64,
    pub n: f64,
    /// The product `λ·s`, never `λ` alone.
    pub lambda_s: f64,
    pub s: f64,
    pub rho: f64,
    pub residual_norm: f64,
    pub iterations: usize,
    pub soc_value: f64,
    pub soc_ok: bool,
    pub audit: AssumptionReport,
    /// Closed loop only.
    pub feedback: Option<FeedbackParts>,
    /// Closed loop only: `∂x_i/∂n < 0` at the solution.
    pub feedback_sign_ok: Option<bool>,
}

pub(crate) fn check_rates(s: f64, rho: f64) -> Result<()> {
    require_positive("s", s)?;
    require_positive("rho", rho)
}

pub(crate) fn costate_ratio(pt: &SymmetricPoint, numerator: f64, s: f64, rho: f64) -> Result<f64> {
    let denom = pt.costate_denominator(s, rho);
    if !(denom > 0.0) {
        return Err(Error::Domain {
            what: "rho - n*s*dp_cross*x^2",
            value: denom,
            requirement: "costate denominator must be > 0",
        });
    }
    Ok(numerator / denom)
}

fn lambda_s_at(pt: &SymmetricPoint, s: f64, rho: f64) -> Result<f64> {
    costate_ratio(pt, pt.entry_sensitivity(s), s, rho)
}

/// Steady-state open-loop costate-speed product `λ*s`.
pub fn lambda_s_openloop(
    d: &dyn SymmetricDemand,
    cost: &dyn CostSpec,
    x: f64,
    n: f64,
    s: f64,
    rho: f64,
) -> Result<f64> {
    check_rates(s, rho)?;
    let pt = SymmetricPoint::evaluate(d, cost, x, n)?;
    lambda_s_at(&pt, s, rho)
}

fn residual_at(pt: &SymmetricPoint, s: f64, rho: f64) -> Result<(f64, f64)> {
    let lambda_s = lambda_s_at(pt, s, rho)?;
    Ok((pt.own_foc() + lambda_s * pt.bundle_foc(), pt.profit_per_firm()))
}

/// `(FOC with the open-loop wedge, free-entry residual)`.
pub fn openloop_residual(
    d: &dyn SymmetricDemand,
    cost: &dyn CostSpec,
    x: f64,
    n: f64,
    s: f64,
    rho: f64,
) -> Result<(f64, f64)> {
    check_rates(s, rho)?;
    let pt = SymmetricPoint::evaluate(d, cost, x, n)?;
    residual_at(&pt, s, rho)
}

/// Solves the open-loop steady state, computing the static equilibrium
/// first as the starting point.
pub fn solve_openloop(
    d: &dyn SymmetricDemand,
    cost: &dyn CostSpec,
    s: f64,
    rho: f64,
    cfg: &SolverConfig,
) -> Result<SteadyState> {
    let base = solve_static(d, cost, cfg)?;
    solve_openloop_from(d, cost, &base, s, rho, cfg)
}

/// Solves the open-loop steady state by following the root from the static
/// equilibrium (the `s = 0` solution) as the adjustment speed grows to `s`.
pub fn solve_openloop_from(
    d: &dyn SymmetricDemand,
    cost: &dyn CostSpec,
    base: &StaticEquilibrium,
    s: f64,
    rho: f64,
    cfg: &SolverConfig,
) -> Result<SteadyState> {
    check_rates(s, rho)?;
    let out = track_rates(
        d,
        cost,
        residual_at,
        [base.x_tilde, base.n_tilde],
        (0.0, rho),
        (s, rho),
        cfg,
    )?;
    openloop_state(d, cost, &out, s, rho)
}

/// Moves an open-loop steady state to new rates `(s, rho)` by tracking its
/// branch along the straight path between the two rate pairs.
pub fn continue_openloop(
    d: &dyn SymmetricDemand,
    cost: &dyn CostSpec,
    from: &SteadyState,
    s: f64,
    rho: f64,
    cfg: &SolverConfig,
) -> Result<SteadyState> {
    check_rates(s, rho)?;
    let out = track_rates(
        d,
        cost,
        residual_at,
        [from.x, from.n],
        (from.s, from.rho),
        (s, rho),
        cfg,
    )?;
    openloop_state(d, cost, &out, s, rho)
}

/// Follows a root of `residual` from `start` (a root at rates `from`) to
/// rates `to`, interpolating `(s, rho)` linearly.
pub(crate) fn track_rates<R>(
    d: &dyn SymmetricDemand,
    cost: &dyn CostSpec,
    residual: R,
    start: [f64; 2],
    from: (f64, f64),
    to: (f64, f64),
    cfg: &SolverConfig,
) -> Result<SolveOutcome>
where
    R: Fn(&SymmetricPoint, f64, f64) -> Result<(f64, f64)>,
{
    let lerp = |a: f64, b: f64, t: f64| if t == 1.0 { b } else { a + (b - a) * t };
    let out = track_branch(
        |t, x, n| {
            guarded(x, n, |x, n| {
                residual(
                    &SymmetricPoint::evaluate_unchecked(d, cost, x, n),
                    lerp(from.0, to.0, t),
                    lerp(from.1, to.1, t),
                )
            })
        },
        0.0,
        1.0,
        start,
        cfg,
    )?;
    Ok(out)
}

fn openloop_state(
    d: &dyn SymmetricDemand,
    cost: &dyn CostSpec,
    out: &SolveOutcome,
    s: f64,
    rho: f64,
) -> Result<SteadyState> {
    let [x, n] = out.solution;
    let pt = SymmetricPoint::evaluate(d, cost, x, n)?;
    let lambda_s = lambda_s_at(&pt, s, rho)?;
    let soc_value = pt.second_order(lambda_s);
    Ok(SteadyState {
        concept: Concept::OpenLoop,
        x,
        n,
        lambda_s,
        s,
        rho,
        residual_norm: out.residual_norm,
        iterations: out.iterations,
        soc_value,
        soc_ok: soc_value < 0.0,
        audit: audit_with_costate(d, cost, x, n, lambda_s)?,
        feedback: None,
        feedback_sign_ok: None,
    })
}

/// Static versus open-loop comparison.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Proposition1Report {
    pub x_static: f64,
    pub n_static: f64,
    pub x_open_loop: f64,
    pub n_open_loop: f64,
    /// `x* > x̃`
    pub output_above_static: bool,
    /// `n* < ñ`
    pub firms_below_static: bool,
    /// Both differences are within [`LIMIT_BAND`], where the strict
    /// comparisons carry no information.
    pub within_limit_band: bool,
    pub audits_pass: bool,
}

impl Proposition1Report {
    pub fn holds(&self) -> bool {
        (self.output_above_static && self.firms_below_static) || self.within_limit_band
    }
}

pub fn proposition1_check(
    d: &dyn SymmetricDemand,
    cost: &dyn CostSpec,
    s: f64,
    rho: f64,
    cfg: &SolverConfig,
) -> Result<Proposition1Report> {
    let base = solve_static(d, cost, cfg)?;
    let ol = solve_openloop_from(d, cost, &base, s, rho, cfg)?;
    Ok(proposition1_report(&base, &ol))
}

pub fn proposition1_report(base: &StaticEquilibrium, ol: &SteadyState) -> Proposition1Report {
    let dx = ol.x - base.x_tilde;
    let dn = ol.n - base.n_tilde;
    Proposition1Report {
        x_static: base.x_tilde,
        n_static: base.n_tilde,
        x_open_loop: ol.x,
        n_open_loop: ol.n,
        output_above_static: dx > 0.0,
        firms_below_static: dn < 0.0,
        within_limit_band: dx.abs() <= LIMIT_BAND && dn.abs() <= LIMIT_BAND,
        audits_pass: base.audit.all_ok() && ol.audit.all_ok(),
    }
}
