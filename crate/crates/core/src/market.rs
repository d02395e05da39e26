//! Demand and cost abstractions evaluated at symmetric output profiles.
//!
//! Every firm produces the same output `x` and there are `n` firms, with `n`
//! treated as a continuous real `>= 1`. A [`SymmetricDemand`] exposes the
//! price of one firm's good together with its first and second partials with
//! respect to own and rival outputs at that symmetric point. [`CostSpec`]
//! carries the variable cost `c(x)` and its derivatives plus a separate fixed
//! cost `f`, so per-firm profit is always `p·x − c(x) − f`.

use serde::{Deserialize, Serialize};

use crate::error::{require_firm_count, require_positive, Error, Result};

/// Inverse demand of one firm and its partials at the point where all `n`
/// firms produce `x`.
///
/// Implementations must accept any `x >= 0` and real `n >= 1`. Symmetry of
/// the cross partials (`∂p_i/∂x_j = ∂p_j/∂x_i = ∂p_j/∂x_k`) is assumed, so a
/// single `d_cross` stands for all of them.
pub trait SymmetricDemand: Send + Sync {
    fn price(&self, x: f64, n: f64) -> f64;
    /// `∂p_i/∂x_i`
    fn d_own(&self, x: f64, n: f64) -> f64;
    /// `∂p_i/∂x_j`, `j ≠ i`
    fn d_cross(&self, x: f64, n: f64) -> f64;
    /// `∂²p_i/∂x_i²`
    fn d2_own(&self, x: f64, n: f64) -> f64;
    /// `∂²p_i/∂x_i∂x_j`, `j ≠ i`
    fn d2_owncross(&self, x: f64, n: f64) -> f64;
    /// `∂²p_i/∂x_j∂x_k`, `j ≠ i`, `k ≠ i, j`
    fn d2_crosscross(&self, x: f64, n: f64) -> f64;

    /// `∂p_i/∂n = (∂p_i/∂x_j)·x_j`
    fn d_n(&self, x: f64, n: f64) -> f64 {
        self.d_cross(x, n) * x
    }

    /// Closed-form static equilibrium `(x̃, ñ)` when one exists for this
    /// demand paired with `cost`. Used only as a Newton seed.
    fn static_seed(&self, _cost: &dyn CostSpec) -> Option<(f64, f64)> {
        None
    }
}

/// Variable cost `c(x)` with derivatives, plus the per-period fixed cost.
pub trait CostSpec: Send + Sync {
    fn variable(&self, x: f64) -> f64;
    fn marginal(&self, x: f64) -> f64;
    fn marginal_slope(&self, x: f64) -> f64;
    fn fixed(&self) -> f64;

    /// `Some(c)` when `c(x) = c·x` exactly.
    fn constant_marginal(&self) -> Option<f64> {
        None
    }
}

/// Linear inverse demand `p_i = a − x_i − b·Σ_{j≠i} x_j`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearDemand {
    pub a: f64,
    pub b: f64,
}

impl SymmetricDemand for LinearDemand {
    fn price(&self, x: f64, n: f64) -> f64 {
        self.a - x - (n - 1.0) * self.b * x
    }
    fn d_own(&self, _x: f64, _n: f64) -> f64 {
        -1.0
    }
    fn d_cross(&self, _x: f64, _n: f64) -> f64 {
        -self.b
    }
    fn d2_own(&self, _x: f64, _n: f64) -> f64 {
        0.0
    }
    fn d2_owncross(&self, _x: f64, _n: f64) -> f64 {
        0.0
    }
    fn d2_crosscross(&self, _x: f64, _n: f64) -> f64 {
        0.0
    }

    fn static_seed(&self, cost: &dyn CostSpec) -> Option<(f64, f64)> {
        let c = cost.constant_marginal()?;
        let f = cost.fixed();
        if self.b <= 0.0 || f <= 0.0 {
            return None;
        }
        let x = f.sqrt();
        Some((x, 1.0 + (self.a - c - 2.0 * x) / (self.b * x)))
    }
}

/// Constant marginal cost `c` with fixed cost `f`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearCost {
    pub c: f64,
    pub f: f64,
}

impl CostSpec for LinearCost {
    fn variable(&self, x: f64) -> f64 {
        self.c * x
    }
    fn marginal(&self, _x: f64) -> f64 {
        self.c
    }
    fn marginal_slope(&self, _x: f64) -> f64 {
        0.0
    }
    fn fixed(&self) -> f64 {
        self.f
    }
    fn constant_marginal(&self) -> Option<f64> {
        Some(self.c)
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct LinearMarketFields {
    a: f64,
    b: f64,
    c: f64,
    f: f64,
}

/// The linear market: linear demand with intercept `a` and substitutability
/// `b`, constant marginal cost `c`, fixed cost `f`.
///
/// `b = 0` (independent goods) is accepted as a boundary case; the firm
/// count is then not pinned down by the static equilibrium.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "LinearMarketFields")]
pub struct LinearMarket {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub f: f64,
}

impl TryFrom<LinearMarketFields> for LinearMarket {
    type Error = Error;

    fn try_from(v: LinearMarketFields) -> Result<Self> {
        LinearMarket::new(v.a, v.b, v.c, v.f)
    }
}

impl Default for LinearMarket {
    fn default() -> Self {
        LinearMarket {
            a: 11.0,
            b: 0.8,
            c: 1.0,
            f: 4.0,
        }
    }
}

impl LinearMarket {
    pub fn new(a: f64, b: f64, c: f64, f: f64) -> Result<Self> {
        let all_finite = [a, b, c, f].iter().all(|v| v.is_finite());
        if !all_finite {
            return Err(Error::InvalidParameter("market parameters must be finite".into()));
        }
        if !(0.0..1.0).contains(&b) {
            return Err(Error::InvalidParameter(format!(
                "substitutability b = {b} must lie in [0, 1)"
            )));
        }
        if a <= 0.0 || c <= 0.0 || f <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "a = {a}, c = {c}, f = {f} must all be positive"
            )));
        }
        if a <= c {
            return Err(Error::InvalidParameter(format!(
                "intercept a = {a} must exceed marginal cost c = {c}"
            )));
        }
        Ok(LinearMarket { a, b, c, f })
    }

    pub fn from_json(text: &str) -> std::result::Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    pub fn demand(&self) -> LinearDemand {
        LinearDemand { a: self.a, b: self.b }
    }

    pub fn cost(&self) -> LinearCost {
        LinearCost { c: self.c, f: self.f }
    }

    /// `(√f, 1 + (a − c − 2√f)/(b√f))`, or `None` for independent goods.
    pub fn closed_form_static(&self) -> Option<(f64, f64)> {
        self.demand().static_seed(&self.cost())
    }
}

/// Price `p_i(x, …, x)` with `n` symmetric firms.
pub fn symmetric_price(d: &dyn SymmetricDemand, x: f64, n: f64) -> Result<f64> {
    if !(x >= 0.0 && x.is_finite()) {
        return Err(Error::Domain {
            what: "x",
            value: x,
            requirement: "output must be finite and >= 0",
        });
    }
    require_firm_count(n)?;
    Ok(d.price(x, n))
}

/// All demand and cost quantities at one symmetric point, with the recurring
/// brackets of the first-order conditions as methods.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymmetricPoint {
    pub x: f64,
    pub n: f64,
    pub price: f64,
    pub d_own: f64,
    pub d_cross: f64,
    pub d2_own: f64,
    pub d2_owncross: f64,
    pub d2_crosscross: f64,
    pub variable_cost: f64,
    pub marginal_cost: f64,
    pub marginal_cost_slope: f64,
    pub fixed_cost: f64,
}

impl SymmetricPoint {
    /// Evaluates everything at `(x, n)`; requires `x > 0` and `n >= 1`.
    pub fn evaluate(d: &dyn SymmetricDemand, cost: &dyn CostSpec, x: f64, n: f64) -> Result<Self> {
        require_positive("x", x)?;
        require_firm_count(n)?;
        Ok(Self::evaluate_unchecked(d, cost, x, n))
    }

    pub(crate) fn evaluate_unchecked(d: &dyn SymmetricDemand, cost: &dyn CostSpec, x: f64, n: f64) -> Self {
        SymmetricPoint {
            x,
            n,
            price: d.price(x, n),
            d_own: d.d_own(x, n),
            d_cross: d.d_cross(x, n),
            d2_own: d.d2_own(x, n),
            d2_owncross: d.d2_owncross(x, n),
            d2_crosscross: d.d2_crosscross(x, n),
            variable_cost: cost.variable(x),
            marginal_cost: cost.marginal(x),
            marginal_cost_slope: cost.marginal_slope(x),
            fixed_cost: cost.fixed(),
        }
    }

    /// `p + ∂p_i/∂x_i·x − c′(x)`: the static (Cournot) marginal profit.
    pub fn own_foc(&self) -> f64 {
        self.price + self.d_own * self.x - self.marginal_cost
    }

    /// `p + ∂p_i/∂x_i·x + (n−1)·∂p_i/∂x_j·x − c′(x)`: marginal profit of a
    /// monopolist owning all `n` goods.
    pub fn bundle_foc(&self) -> f64 {
        self.own_foc() + (self.n - 1.0) * self.d_cross * self.x
    }

    /// `p + (∂p_i/∂x_i − ∂p_i/∂x_j)·x − c′(x)`.
    pub fn bertrand_margin(&self) -> f64 {
        self.price + (self.d_own - self.d_cross) * self.x - self.marginal_cost
    }

    pub fn markup(&self) -> f64 {
        self.price - self.marginal_cost
    }

    /// `p·x − c(x) − f`
    pub fn profit_per_firm(&self) -> f64 {
        self.price * self.x - self.variable_cost - self.fixed_cost
    }

    /// `2·∂p_i/∂x_i + ∂²p_i/∂x_i²·x − c″(x)`
    pub fn own_curvature(&self) -> f64 {
        2.0 * self.d_own + self.d2_own * self.x - self.marginal_cost_slope
    }

    /// Curvature of the costate-weighted bracket:
    /// `own_curvature + (n−1)·∂²p_i/∂x_i∂x_j·x`.
    pub fn bundle_curvature(&self) -> f64 {
        self.own_curvature() + (self.n - 1.0) * self.d2_owncross * self.x
    }

    /// Second-order expression of the current-value Hamiltonian for a given
    /// costate-speed product `λ·s`.
    pub fn second_order(&self, lambda_s: f64) -> f64 {
        self.own_curvature() + lambda_s * self.bundle_curvature()
    }

    /// `s·∂p_i/∂x_j·x²`, the common numerator of both costate formulas.
    pub fn entry_sensitivity(&self, s: f64) -> f64 {
        s * self.d_cross * self.x * self.x
    }

    /// `ρ − n·s·∂p_i/∂x_j·x²`, the common costate denominator.
    pub fn costate_denominator(&self, s: f64, rho: f64) -> f64 {
        rho - self.n * self.entry_sensitivity(s)
    }
}

/// Sign tests of the standing assumptions at one symmetric point, with the
/// evaluated left-hand sides.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AssumptionReport {
    pub x: f64,
    pub n: f64,
    pub lambda_s: f64,
    /// `∂p_i/∂x_i < 0`, `∂p_i/∂x_j < 0` and `|∂p_i/∂x_j| < |∂p_i/∂x_i|`.
    pub signs_ok: bool,
    pub d_own: f64,
    pub d_cross: f64,
    /// Strategic substitutes: `∂p_i/∂x_j + ∂²p_i/∂x_i∂x_j·x < 0`.
    pub sub1_ok: bool,
    pub sub1_value: f64,
    /// `∂p_i/∂x_j + ∂²p_i/∂x_j∂x_k·x < 0`.
    pub sub2_ok: bool,
    pub sub2_value: f64,
    /// `|sub1_value| >= |sub2_value|`.
    pub sub3_ok: bool,
    /// `p − c′(x) > 0`.
    pub markup_ok: bool,
    pub markup_value: f64,
    /// `p + (∂p_i/∂x_i − ∂p_i/∂x_j)·x − c′(x) > 0`.
    pub bertrand_bound_ok: bool,
    pub bertrand_value: f64,
    /// `p + ∂p_i/∂x_i·x + (n−1)·∂p_i/∂x_j·x − c′(x) < 0`.
    pub monopoly_bound_ok: bool,
    pub monopoly_value: f64,
    /// Second-order expression at `lambda_s` (static part only when zero).
    pub soc_value: f64,
}

impl AssumptionReport {
    pub fn all_ok(&self) -> bool {
        self.signs_ok
            && self.sub1_ok
            && self.sub2_ok
            && self.sub3_ok
            && self.markup_ok
            && self.bertrand_bound_ok
            && self.monopoly_bound_ok
    }

    fn from_point(pt: &SymmetricPoint, lambda_s: f64) -> Self {
        let sub1_value = pt.d_cross + pt.d2_owncross * pt.x;
        let sub2_value = pt.d_cross + pt.d2_crosscross * pt.x;
        let markup_value = pt.markup();
        let bertrand_value = pt.bertrand_margin();
        let monopoly_value = pt.bundle_foc();
        AssumptionReport {
            x: pt.x,
            n: pt.n,
            lambda_s,
            signs_ok: pt.d_own < 0.0 && pt.d_cross < 0.0 && pt.d_cross.abs() < pt.d_own.abs(),
            d_own: pt.d_own,
            d_cross: pt.d_cross,
            sub1_ok: sub1_value < 0.0,
            sub1_value,
            sub2_ok: sub2_value < 0.0,
            sub2_value,
            sub3_ok: sub1_value.abs() >= sub2_value.abs(),
            markup_ok: markup_value > 0.0,
            markup_value,
            bertrand_bound_ok: bertrand_value > 0.0,
            bertrand_value,
            monopoly_bound_ok: monopoly_value < 0.0,
            monopoly_value,
            soc_value: pt.second_order(lambda_s),
        }
    }
}

/// Audits the standing assumptions at `(x, n)` with the static second-order
/// expression.
pub fn audit_assumptions(d: &dyn SymmetricDemand, cost: &dyn CostSpec, x: f64, n: f64) -> Result<AssumptionReport> {
    audit_with_costate(d, cost, x, n, 0.0)
}

/// Same as [`audit_assumptions`] but evaluates the second-order expression
/// with the costate-speed product `lambda_s` of a dynamic solution.
pub fn audit_with_costate(
    d: &dyn SymmetricDemand,
    cost: &dyn CostSpec,
    x: f64,
    n: f64,
    lambda_s: f64,
) -> Result<AssumptionReport> {
    let pt = SymmetricPoint::evaluate(d, cost, x, n)?;
    Ok(AssumptionReport::from_point(&pt, lambda_s))
}
