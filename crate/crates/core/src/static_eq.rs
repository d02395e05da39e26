//! Static free-entry equilibrium `(x̃, ñ)`: each firm sets marginal profit to
//! zero taking rivals' outputs as given, and entry drives per-firm profit to
//! zero.

use serde::Serialize;

use crate::error::{require_firm_count, require_positive, Error, Result};
use crate::market::{audit_assumptions, AssumptionReport, CostSpec, SymmetricDemand, SymmetricPoint};
use crate::numerics::{solve_2d, SolverConfig};

/// Firm counts within this distance of one are treated as degenerate.
pub const DEGENERATE_BAND: f64 = 1e-9;

const GENERIC_SEED: (f64, f64) = (1.0, 2.0);

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StaticEquilibrium {
    pub x_tilde: f64,
    pub n_tilde: f64,
    pub price: f64,
    pub residual_norm: f64,
    pub iterations: usize,
    pub audit: AssumptionReport,
}

/// `(p + ∂p_i/∂x_i·x − c′(x), p·x − c(x) − f)` at the symmetric point.
pub fn static_residual(d: &dyn SymmetricDemand, cost: &dyn CostSpec, x: f64, n: f64) -> Result<(f64, f64)> {
    let pt = SymmetricPoint::evaluate(d, cost, x, n)?;
    Ok((pt.own_foc(), pt.profit_per_firm()))
}

/// Residual adapter for the Newton solver: out-of-domain points map to NaN
/// so that line search rejects them.
pub(crate) fn guarded<F>(x: f64, n: f64, eval: F) -> [f64; 2]
where
    F: FnOnce(f64, f64) -> Result<(f64, f64)>,
{
    if !(x > 0.0 && n >= 1.0) {
        return [f64::NAN; 2];
    }
    match eval(x, n) {
        Ok((a, b)) => [a, b],
        Err(_) => [f64::NAN; 2],
    }
}

/// Solves the static equilibrium, seeding Newton with the demand's closed
/// form when it has one and with `(1, 2)` otherwise.
pub fn solve_static(d: &dyn SymmetricDemand, cost: &dyn CostSpec, cfg: &SolverConfig) -> Result<StaticEquilibrium> {
    let seed = d.static_seed(cost).unwrap_or(GENERIC_SEED);
    solve_static_from(d, cost, seed, cfg)
}

/// Solves the static equilibrium from an explicit seed `(x0, n0)`.
pub fn solve_static_from(
    d: &dyn SymmetricDemand,
    cost: &dyn CostSpec,
    seed: (f64, f64),
    cfg: &SolverConfig,
) -> Result<StaticEquilibrium> {
    let out = solve_2d(
        |x, n| guarded(x, n, |x, n| static_residual(d, cost, x, n)),
        [seed.0, seed.1],
        cfg,
    )?;
    let [x, n] = out.solution;
    if n <= 1.0 + DEGENERATE_BAND {
        return Err(Error::DegenerateEquilibrium { x_tilde: x, n_tilde: n });
    }
    Ok(StaticEquilibrium {
        x_tilde: x,
        n_tilde: n,
        price: d.price(x, n),
        residual_norm: out.residual_norm,
        iterations: out.iterations,
        audit: audit_assumptions(d, cost, x, n)?,
    })
}

/// Slope of the free-entry locus,
/// `dn/dx = −[p + ∂p_i/∂x_i·x + (n−1)·∂p_i/∂x_j·x − c′(x)] / (∂p_i/∂x_j·x²)`.
pub fn entry_slope_dn_dx(d: &dyn SymmetricDemand, cost: &dyn CostSpec, x: f64, n: f64) -> Result<f64> {
    require_positive("x", x)?;
    require_firm_count(n)?;
    let pt = SymmetricPoint::evaluate(d, cost, x, n)?;
    let denom = pt.d_cross * x * x;
    if denom == 0.0 {
        return Err(Error::DivisionByZero(
            "cross-price derivative is zero (independent goods)",
        ));
    }
    Ok(-pt.bundle_foc() / denom)
}
