//! Forward simulation of the firm count under `dn/dt = s·Π(n)`.
//!
//! Outputs along the path follow the myopic policy: at every instant each
//! firm plays the static best response for the current `n`. The rest point
//! of this system is the static equilibrium.

use serde::{Deserialize, Serialize};

use crate::error::{require_firm_count, require_positive, Error, Result};
use crate::market::{CostSpec, SymmetricDemand, SymmetricPoint};
use crate::numerics::solve_bracketed;

/// What drives entry: industry-wide or per-firm profit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum ProfitMode {
    #[default]
    Total,
    Average,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimulationConfig {
    pub s: f64,
    pub n0: f64,
    pub horizon: f64,
    pub dt: f64,
    pub mode: ProfitMode,
    /// `|dn/dt|` at the horizon below this counts as converged.
    pub rate_tol: f64,
}

impl Default for SimulationConfig {
    fn default() -> Self {
        SimulationConfig {
            s: 0.1,
            n0: 2.0,
            horizon: 200.0,
            dt: 0.01,
            mode: ProfitMode::Total,
            rate_tol: 1e-8,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Trajectory {
    pub t: Vec<f64>,
    pub n: Vec<f64>,
    pub x: Vec<f64>,
    pub per_firm_profit: Vec<f64>,
    pub total_profit: Vec<f64>,
    /// Times at which the firm count was clamped back to one.
    pub clamp_events: Vec<f64>,
    /// `dn/dt` at the final sample.
    pub terminal_rate: f64,
    pub converged: bool,
}

impl Trajectory {
    pub fn terminal_n(&self) -> f64 {
        *self.n.last().expect("trajectory has at least one sample")
    }

    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }
}

const OUTPUT_TOL: f64 = 1e-15;
const MAX_BRACKET_DOUBLINGS: usize = 64;

/// Symmetric output solving `p + ∂p_i/∂x_i·x − c′(x) = 0` at firm count `n`.
pub fn myopic_output(d: &dyn SymmetricDemand, cost: &dyn CostSpec, n: f64) -> Result<f64> {
    require_firm_count(n)?;
    let foc = |x: f64| SymmetricPoint::evaluate_unchecked(d, cost, x, n).own_foc();
    let lo = 0.0;
    if !(foc(lo) > 0.0) {
        return Err(Error::NoPositiveOutput { n });
    }
    let mut hi = 1.0;
    let mut doublings = 0;
    while foc(hi) > 0.0 {
        hi *= 2.0;
        doublings += 1;
        if doublings > MAX_BRACKET_DOUBLINGS {
            return Err(Error::NoPositiveOutput { n });
        }
    }
    solve_bracketed(foc, lo, hi, OUTPUT_TOL, 200)
        .filter(|x| *x > 0.0)
        .ok_or(Error::NoPositiveOutput { n })
}

struct Sample {
    x: f64,
    per_firm: f64,
    rate: f64,
}

fn sample(d: &dyn SymmetricDemand, cost: &dyn CostSpec, s: f64, n: f64, mode: ProfitMode) -> Result<Sample> {
    let n = n.max(1.0);
    let x = myopic_output(d, cost, n)?;
    let per_firm = SymmetricPoint::evaluate_unchecked(d, cost, x, n).profit_per_firm();
    let driver = match mode {
        ProfitMode::Total => n * per_firm,
        ProfitMode::Average => per_firm,
    };
    Ok(Sample {
        x,
        per_firm,
        rate: s * driver,
    })
}

/// Integrates the firm count with classical fixed-step RK4, storing every
/// step. The number of steps is `round(horizon / dt)`.
pub fn simulate_entry(d: &dyn SymmetricDemand, cost: &dyn CostSpec, cfg: &SimulationConfig) -> Result<Trajectory> {
    require_positive("s", cfg.s)?;
    require_positive("dt", cfg.dt)?;
    require_positive("horizon", cfg.horizon)?;
    require_firm_count(cfg.n0)?;

    let steps = (cfg.horizon / cfg.dt).round().max(1.0) as usize;
    let mut traj = Trajectory {
        t: Vec::with_capacity(steps + 1),
        n: Vec::with_capacity(steps + 1),
        x: Vec::with_capacity(steps + 1),
        per_firm_profit: Vec::with_capacity(steps + 1),
        total_profit: Vec::with_capacity(steps + 1),
        clamp_events: Vec::new(),
        terminal_rate: f64::NAN,
        converged: false,
    };
    let rate = |n: f64| sample(d, cost, cfg.s, n, cfg.mode).map(|smp| smp.rate);

    let mut n = cfg.n0;
    for k in 0..=steps {
        let t = k as f64 * cfg.dt;
        let here = sample(d, cost, cfg.s, n, cfg.mode)?;
        traj.t.push(t);
        traj.n.push(n);
        traj.x.push(here.x);
        traj.per_firm_profit.push(here.per_firm);
        traj.total_profit.push(n * here.per_firm);
        traj.terminal_rate = here.rate;
        if k == steps {
            break;
        }

        let h = cfg.dt;
        let k1 = here.rate;
        let k2 = rate(n + 0.5 * h * k1)?;
        let k3 = rate(n + 0.5 * h * k2)?;
        let k4 = rate(n + h * k3)?;
        let mut next = n + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if !next.is_finite() {
            return Err(Error::StepFailure { t: t + h });
        }
        if next < 1.0 {
            next = 1.0;
            traj.clamp_events.push(t + h);
        }
        n = next;
    }
    traj.converged = traj.terminal_rate.abs() < cfg.rate_tol;
    Ok(traj)
}
