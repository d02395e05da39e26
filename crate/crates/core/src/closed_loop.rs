//! Memoryless closed-loop steady state `(x**, n**, λ**s)`.
//!
//! Rivals' outputs now respond to the firm count, so the adjoint picks up the
//! feedback sensitivity `∂x_i/∂n`. The chain implemented here is:
//!
//! 1. the costate identities from the first-order condition,
//!    `λs = −F/B` and `1 + λs = (n−1)·∂p_i/∂x_j·x / B`, where
//!    `F = p + ∂p_i/∂x_i·x − c′` and `B` is the monopoly-bundle bracket;
//! 2. the second-order term `Δ = own_curvature + λs·bundle_curvature`;
//! 3. `Γ = Δ·B` and the feedback sensitivity
//!    `∂x_i/∂n = {−(n−1)·p_j·x·(p_j + p_ij·x)·x + F·(p_j + (n−1)·p_jk·x)·x} / Γ`
//!    with `p_j = ∂p_i/∂x_j`, `p_ij = ∂²p_i/∂x_i∂x_j`, `p_jk = ∂²p_i/∂x_j∂x_k`;
//! 4. the steady-state costate
//!    `λ**s = [s·p_j·x² − (n−1)·s·M·∂x_i/∂n] / (ρ − n·s·p_j·x²)` with
//!    `M = p + (∂p_i/∂x_i − ∂p_i/∂x_j)·x − c′`;
//! 5. the residual `F + λ**s·B` together with free entry.
//!
//! Setting the feedback term to zero recovers the open-loop system exactly.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::market::{audit_with_costate, CostSpec, SymmetricDemand, SymmetricPoint};
use crate::numerics::{SolveOutcome, SolverConfig};
use crate::open_loop::{
    check_rates, costate_ratio, solve_openloop_from, track_rates, Concept, SteadyState, LIMIT_BAND,
};
use crate::static_eq::{solve_static, StaticEquilibrium};

/// Whether the adjoint includes the `∂x_i/∂n` feedback term.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub enum FeedbackMode {
    #[default]
    Full,
    /// Feedback forced to zero; the system collapses to the open loop.
    Suppressed,
}

/// Feedback sensitivity and its ingredients at one point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Feedback {
    pub dxi_dn: f64,
    pub delta: f64,
    pub gamma: f64,
    /// `λs` from the first-order condition, used inside `Δ`.
    pub lambda_s_from_foc: f64,
}

/// Everything attached to a closed-loop steady state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FeedbackParts {
    pub dxi_dn: f64,
    pub delta: f64,
    pub gamma: f64,
    /// `λ**s` from the adjoint (costate formula).
    pub lambda_s: f64,
    /// `λs` from the first-order condition; equals `lambda_s` at a root.
    pub lambda_s_from_foc: f64,
    /// `s·p_j·x² − (n−1)·s·M·∂x_i/∂n`; positive implies more firms than the
    /// static equilibrium.
    pub wedge_numerator: f64,
}

fn identities_at(pt: &SymmetricPoint) -> Result<(f64, f64)> {
    let bracket = pt.bundle_foc();
    if bracket == 0.0 {
        return Err(Error::DivisionByZero("monopoly-bundle first-order bracket vanishes"));
    }
    Ok((-pt.own_foc() / bracket, (pt.n - 1.0) * pt.d_cross * pt.x / bracket))
}

/// `(λs, 1 + λs)` implied by the first-order condition at `(x, n)`, each
/// computed from its own closed form.
pub fn lambda_s_identities(d: &dyn SymmetricDemand, cost: &dyn CostSpec, x: f64, n: f64) -> Result<(f64, f64)> {
    identities_at(&SymmetricPoint::evaluate(d, cost, x, n)?)
}

fn feedback_at(pt: &SymmetricPoint) -> Result<Feedback> {
    let (lambda_s, _) = identities_at(pt)?;
    let delta = pt.second_order(lambda_s);
    let gamma = delta * pt.bundle_foc();
    let (x, n) = (pt.x, pt.n);
    let rival_term = -(n - 1.0) * pt.d_cross * x * (pt.d_cross + pt.d2_owncross * x) * x;
    let own_term = pt.own_foc() * (pt.d_cross + (n - 1.0) * pt.d2_crosscross * x) * x;
    let braces = rival_term + own_term;
    // Without any cross effects rivals do not respond to entry.
    let dxi_dn = if braces == 0.0 {
        0.0
    } else if gamma == 0.0 || !gamma.is_finite() {
        return Err(Error::Singular("Γ = Δ·B is zero"));
    } else {
        braces / gamma
    };
    Ok(Feedback {
        dxi_dn,
        delta,
        gamma,
        lambda_s_from_foc: lambda_s,
    })
}

/// Feedback sensitivity `∂x_i/∂n` at `(x, n)`.
pub fn dxi_dn(d: &dyn SymmetricDemand, cost: &dyn CostSpec, x: f64, n: f64) -> Result<(f64, Feedback)> {
    let fb = feedback_at(&SymmetricPoint::evaluate(d, cost, x, n)?)?;
    Ok((fb.dxi_dn, fb))
}

fn wedge_numerator(pt: &SymmetricPoint, feedback: f64, s: f64) -> f64 {
    pt.entry_sensitivity(s) - (pt.n - 1.0) * s * pt.bertrand_margin() * feedback
}

fn costate_at(pt: &SymmetricPoint, s: f64, rho: f64, mode: FeedbackMode) -> Result<(f64, Option<Feedback>)> {
    let fb = match mode {
        FeedbackMode::Full => Some(feedback_at(pt)?),
        FeedbackMode::Suppressed => None,
    };
    let sensitivity = fb.map_or(0.0, |f| f.dxi_dn);
    let lambda_s = costate_ratio(pt, wedge_numerator(pt, sensitivity, s), s, rho)?;
    Ok((lambda_s, fb))
}

/// Steady-state closed-loop costate-speed product `λ**s`.
pub fn lambda_s_closedloop(
    d: &dyn SymmetricDemand,
    cost: &dyn CostSpec,
    x: f64,
    n: f64,
    s: f64,
    rho: f64,
) -> Result<f64> {
    lambda_s_closedloop_with(d, cost, x, n, s, rho, FeedbackMode::Full)
}

pub fn lambda_s_closedloop_with(
    d: &dyn SymmetricDemand,
    cost: &dyn CostSpec,
    x: f64,
    n: f64,
    s: f64,
    rho: f64,
    mode: FeedbackMode,
) -> Result<f64> {
    check_rates(s, rho)?;
    let pt = SymmetricPoint::evaluate(d, cost, x, n)?;
    Ok(costate_at(&pt, s, rho, mode)?.0)
}

fn residual_at(pt: &SymmetricPoint, s: f64, rho: f64, mode: FeedbackMode) -> Result<(f64, f64)> {
    let (lambda_s, _) = costate_at(pt, s, rho, mode)?;
    Ok((pt.own_foc() + lambda_s * pt.bundle_foc(), pt.profit_per_firm()))
}

/// `(FOC with the closed-loop wedge, free-entry residual)`.
pub fn closedloop_residual(
    d: &dyn SymmetricDemand,
    cost: &dyn CostSpec,
    x: f64,
    n: f64,
    s: f64,
    rho: f64,
) -> Result<(f64, f64)> {
    closedloop_residual_with(d, cost, x, n, s, rho, FeedbackMode::Full)
}

pub fn closedloop_residual_with(
    d: &dyn SymmetricDemand,
    cost: &dyn CostSpec,
    x: f64,
    n: f64,
    s: f64,
    rho: f64,
    mode: FeedbackMode,
) -> Result<(f64, f64)> {
    check_rates(s, rho)?;
    let pt = SymmetricPoint::evaluate(d, cost, x, n)?;
    residual_at(&pt, s, rho, mode)
}

pub fn solve_closedloop(
    d: &dyn SymmetricDemand,
    cost: &dyn CostSpec,
    s: f64,
    rho: f64,
    cfg: &SolverConfig,
) -> Result<SteadyState> {
    let base = solve_static(d, cost, cfg)?;
    solve_closedloop_from(d, cost, &base, s, rho, FeedbackMode::Full, cfg)
}

/// Solves the closed-loop steady state by following the root from the
/// static equilibrium as the adjustment speed grows from zero to `s`.
///
/// For large `s/ρ` the system has several roots; this always returns the
/// one on the branch that starts at the static equilibrium.
pub fn solve_closedloop_from(
    d: &dyn SymmetricDemand,
    cost: &dyn CostSpec,
    base: &StaticEquilibrium,
    s: f64,
    rho: f64,
    mode: FeedbackMode,
    cfg: &SolverConfig,
) -> Result<SteadyState> {
    check_rates(s, rho)?;
    let residual = |pt: &SymmetricPoint, s, rho| residual_at(pt, s, rho, mode);
    let out = track_rates(
        d,
        cost,
        residual,
        [base.x_tilde, base.n_tilde],
        (0.0, rho),
        (s, rho),
        cfg,
    )?;
    closedloop_state(d, cost, &out, s, rho, mode)
}

/// Moves a closed-loop steady state to new rates, staying on its branch.
pub fn continue_closedloop(
    d: &dyn SymmetricDemand,
    cost: &dyn CostSpec,
    from: &SteadyState,
    s: f64,
    rho: f64,
    mode: FeedbackMode,
    cfg: &SolverConfig,
) -> Result<SteadyState> {
    check_rates(s, rho)?;
    let residual = |pt: &SymmetricPoint, s, rho| residual_at(pt, s, rho, mode);
    let out = track_rates(d, cost, residual, [from.x, from.n], (from.s, from.rho), (s, rho), cfg)?;
    closedloop_state(d, cost, &out, s, rho, mode)
}

fn closedloop_state(
    d: &dyn SymmetricDemand,
    cost: &dyn CostSpec,
    out: &SolveOutcome,
    s: f64,
    rho: f64,
    mode: FeedbackMode,
) -> Result<SteadyState> {
    let [x, n] = out.solution;
    let pt = SymmetricPoint::evaluate(d, cost, x, n)?;
    let (lambda_s, fb) = costate_at(&pt, s, rho, mode)?;
    let soc_value = pt.second_order(lambda_s);
    let feedback = fb.map(|f| FeedbackParts {
        dxi_dn: f.dxi_dn,
        delta: f.delta,
        gamma: f.gamma,
        lambda_s,
        lambda_s_from_foc: f.lambda_s_from_foc,
        wedge_numerator: wedge_numerator(&pt, f.dxi_dn, s),
    });
    Ok(SteadyState {
        concept: Concept::ClosedLoop,
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
        feedback_sign_ok: feedback.map(|f| f.dxi_dn < 0.0),
        feedback,
    })
}

/// Static, open-loop and closed-loop firm counts side by side.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Proposition2Report {
    pub n_static: f64,
    pub n_open_loop: f64,
    pub n_closed_loop: f64,
    pub x_open_loop: f64,
    pub x_closed_loop: f64,
    /// `n** > n*`
    pub firms_above_open_loop: bool,
    /// `x** < x*`
    pub output_below_open_loop: bool,
    /// `n** > ñ`; not implied in general.
    pub firms_above_static: bool,
    /// Sign test of the wedge numerator at the closed-loop solution.
    pub wedge_numerator_positive: bool,
    pub within_limit_band: bool,
}

impl Proposition2Report {
    pub fn holds(&self) -> bool {
        (self.firms_above_open_loop && self.output_below_open_loop) || self.within_limit_band
    }
}

pub fn proposition2_check(
    d: &dyn SymmetricDemand,
    cost: &dyn CostSpec,
    s: f64,
    rho: f64,
    cfg: &SolverConfig,
) -> Result<Proposition2Report> {
    let base = solve_static(d, cost, cfg)?;
    let ol = solve_openloop_from(d, cost, &base, s, rho, cfg)?;
    let cl = solve_closedloop_from(d, cost, &base, s, rho, FeedbackMode::Full, cfg)?;
    Ok(proposition2_report(&base, &ol, &cl))
}

pub fn proposition2_report(base: &StaticEquilibrium, ol: &SteadyState, cl: &SteadyState) -> Proposition2Report {
    let wedge = cl.feedback.map_or(f64::NAN, |f| f.wedge_numerator);
    Proposition2Report {
        n_static: base.n_tilde,
        n_open_loop: ol.n,
        n_closed_loop: cl.n,
        x_open_loop: ol.x,
        x_closed_loop: cl.x,
        firms_above_open_loop: cl.n > ol.n,
        output_below_open_loop: cl.x < ol.x,
        firms_above_static: cl.n > base.n_tilde,
        wedge_numerator_positive: wedge > 0.0,
        within_limit_band: (cl.n - ol.n).abs() <= LIMIT_BAND && (cl.x - ol.x).abs() <= LIMIT_BAND,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::market::LinearMarket;
    use crate::open_loop::{lambda_s_openloop, openloop_residual, solve_openloop};
    use crate::static_eq::static_residual;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn p0() -> LinearMarket {
        LinearMarket::default()
    }

    #[test]
    fn identity_examples() {
        let m = p0();
        let (d, c) = (m.demand(), m.cost());
        let (l, one_plus) = lambda_s_identities(&d, &c, 2.0, 4.75).unwrap();
        assert!(l.abs() < 1e-14);
        assert_relative_eq!(one_plus, 1.0, epsilon = 1e-14);
        let (l, one_plus) = lambda_s_identities(&d, &c, 2.5, 4.0).unwrap();
        assert_relative_eq!(l, -1.0 / 7.0, epsilon = 1e-14);
        assert_relative_eq!(l + 1.0, one_plus, epsilon = 1e-14);
    }

    #[test]
    fn identities_fail_on_vanishing_bracket() {
        let m = p0();
        let x = 2.0;
        let n = 1.0 + (11.0 - 4.0 - 1.0) / (2.0 * 0.8 * x);
        let err = lambda_s_identities(&m.demand(), &m.cost(), x, n);
        // B is zero only up to rounding here; either an exact error or a huge value.
        if let Ok((l, _)) = err {
            assert!(l.abs() > 1e10);
        }
    }

    #[test]
    fn feedback_at_static_point() {
        let m = p0();
        let (v, fb) = dxi_dn(&m.demand(), &m.cost(), 2.0, 4.75).unwrap();
        assert_relative_eq!(fb.delta, -2.0, epsilon = 1e-13);
        assert_relative_eq!(fb.gamma, 12.0, epsilon = 1e-12);
        assert_relative_eq!(v, -0.8, epsilon = 1e-13);
    }

    #[test]
    fn feedback_vanishes_for_independent_goods() {
        let m = LinearMarket::new(11.0, 0.0, 1.0, 4.0).unwrap();
        let (v, _) = dxi_dn(&m.demand(), &m.cost(), 2.0, 4.0).unwrap();
        assert_eq!(v, 0.0);
    }

    #[test]
    fn feedback_is_singular_for_a_single_firm() {
        // With n = 1 the identities force 1 + λs = 0, so Δ = 0 and Γ = 0.
        let m = p0();
        let err = dxi_dn(&m.demand(), &m.cost(), 2.0, 1.0).unwrap_err();
        assert!(matches!(err, Error::Singular(_)));
    }

    #[test]
    fn costate_examples() {
        let m = p0();
        let (d, c) = (m.demand(), m.cost());
        assert_relative_eq!(
            lambda_s_closedloop(&d, &c, 2.0, 4.75, 0.1, 0.5).unwrap(),
            0.16 / 2.02,
            epsilon = 1e-13
        );
        assert!(lambda_s_closedloop(&d, &c, 2.0, 4.75, 1e-14, 0.5).unwrap().abs() < 1e-13);
        let indep = LinearMarket::new(11.0, 0.0, 1.0, 4.0).unwrap();
        assert_eq!(
            lambda_s_closedloop(&indep.demand(), &indep.cost(), 2.0, 4.0, 0.1, 0.5).unwrap(),
            0.0
        );
    }

    #[test]
    fn residual_examples() {
        let m = p0();
        let (d, c) = (m.demand(), m.cost());
        let (foc, entry) = closedloop_residual(&d, &c, 2.0, 4.75, 0.1, 0.5).unwrap();
        assert_relative_eq!(foc, -0.96 / 2.02, epsilon = 1e-12);
        assert!(entry.abs() < 1e-14);
        let (foc, _) = closedloop_residual(&d, &c, 2.0, 4.75, 1e-12, 0.5).unwrap();
        assert!(foc.abs() < 1e-10);
    }

    #[test]
    fn independent_goods_residual_is_static() {
        let m = LinearMarket::new(11.0, 0.0, 1.0, 4.0).unwrap();
        let (d, c) = (m.demand(), m.cost());
        for (x, n) in [(1.0, 2.0), (2.0, 4.0), (3.5, 7.0)] {
            let cl = closedloop_residual(&d, &c, x, n, 0.3, 0.5).unwrap();
            let st = static_residual(&d, &c, x, n).unwrap();
            assert_eq!(cl, st);
        }
    }

    #[test]
    fn solve_reference_point() {
        let m = p0();
        let cfg = SolverConfig::default();
        let ol = solve_openloop(&m.demand(), &m.cost(), 0.1, 0.5, &cfg).unwrap();
        let cl = solve_closedloop(&m.demand(), &m.cost(), 0.1, 0.5, &cfg).unwrap();
        assert!(cl.x < ol.x && cl.n > ol.n);
        assert!(cl.residual_norm < 1e-10);
        assert_eq!(cl.feedback_sign_ok, Some(true));
        let fb = cl.feedback.unwrap();
        assert!(fb.delta < 0.0);
        assert!((fb.lambda_s - fb.lambda_s_from_foc).abs() < 1e-8);
        assert!(cl.audit.monopoly_value < 0.0);
    }

    #[test]
    fn reference_point_exceeds_static_firm_count() {
        let m = p0();
        let r = proposition2_check(&m.demand(), &m.cost(), 0.1, 0.5, &SolverConfig::default()).unwrap();
        assert!(r.firms_above_open_loop && r.output_below_open_loop);
        assert!(r.firms_above_static);
        assert_eq!(r.firms_above_static, r.wedge_numerator_positive);
    }

    #[test]
    fn limits_collapse_to_static() {
        let m = p0();
        let cfg = SolverConfig::default();
        let slow = solve_closedloop(&m.demand(), &m.cost(), 1e-10, 0.5, &cfg).unwrap();
        assert!((slow.x - 2.0).abs() < 1e-6 && (slow.n - 4.75).abs() < 1e-6);
        let impatient = solve_closedloop(&m.demand(), &m.cost(), 0.1, 1e6, &cfg).unwrap();
        assert!((impatient.x - 2.0).abs() < 1e-3 && (impatient.n - 4.75).abs() < 1e-3);
    }

    #[test]
    fn suppressed_feedback_reproduces_open_loop() {
        let m = p0();
        let (d, c) = (m.demand(), m.cost());
        let cfg = SolverConfig::default();
        let base = solve_static(&d, &c, &cfg).unwrap();
        for (s, rho) in [(0.1, 0.5), (1.0, 0.1), (0.01, 10.0)] {
            let ol = solve_openloop_from(&d, &c, &base, s, rho, &cfg).unwrap();
            let nested = solve_closedloop_from(&d, &c, &base, s, rho, FeedbackMode::Suppressed, &cfg).unwrap();
            assert!((ol.x - nested.x).abs() < 1e-9 && (ol.n - nested.n).abs() < 1e-9);
            assert!(nested.feedback.is_none());
        }
    }

    proptest! {
        #[test]
        fn identities_differ_by_one(x in 0.2f64..6.0, n in 1.0f64..12.0) {
            let m = p0();
            if let Ok((l, one_plus)) = lambda_s_identities(&m.demand(), &m.cost(), x, n) {
                prop_assert!(((l + 1.0) - one_plus).abs() <= 1e-12 * (1.0 + one_plus.abs()));
            }
        }

        #[test]
        fn suppressed_costate_equals_open_loop(x in 0.2f64..6.0, n in 1.0f64..12.0, s in 1e-3f64..3.0, rho in 1e-2f64..20.0) {
            let m = p0();
            let (d, c) = (m.demand(), m.cost());
            let a = lambda_s_closedloop_with(&d, &c, x, n, s, rho, FeedbackMode::Suppressed).unwrap();
            let b = lambda_s_openloop(&d, &c, x, n, s, rho).unwrap();
            prop_assert_eq!(a, b);
            let ra = closedloop_residual_with(&d, &c, x, n, s, rho, FeedbackMode::Suppressed).unwrap();
            let rb = openloop_residual(&d, &c, x, n, s, rho).unwrap();
            prop_assert_eq!(ra, rb);
        }
    }
}
