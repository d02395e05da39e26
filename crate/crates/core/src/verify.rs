//! Property suite behind `entrydyn verify`: the orderings of the three
//! solution concepts on a rate grid, both limits, costate identities,
//! open-loop nesting, a bisection oracle and the entry simulator.

use std::fmt::Write as _;

use serde::Serialize;

use crate::closed_loop::{closedloop_residual, dxi_dn, solve_closedloop_from, FeedbackMode};
use crate::dynamics::{simulate_entry, SimulationConfig};
use crate::error::{Error, Result};
use crate::fmt::sig6;
use crate::market::{CostSpec, SymmetricDemand, SymmetricPoint};
use crate::numerics::SolverConfig;
use crate::open_loop::{openloop_residual, solve_openloop_from, SteadyState, LIMIT_BAND};
use crate::static_eq::{solve_static, static_residual, StaticEquilibrium};
use crate::sweep::RunConfig;

pub const GRID_S: [f64; 5] = [0.01, 0.05, 0.1, 0.5, 1.0];
pub const GRID_RHO: [f64; 5] = [0.1, 0.5, 1.0, 5.0, 10.0];
/// Strict orderings must clear this margin outside the limit band.
pub const ORDER_MARGIN: f64 = 1e-6;
pub const COSTATE_TOL: f64 = 1e-8;
pub const NESTING_TOL: f64 = 1e-9;
pub const ORACLE_TOL: f64 = 1e-6;
pub const ORACLE_POINTS: [(f64, f64); 3] = [(0.1, 0.5), (0.05, 1.0), (0.5, 1.0)];
pub const NESTING_POINTS: [(f64, f64); 5] = [(0.01, 0.1), (0.1, 0.5), (0.5, 1.0), (1.0, 5.0), (0.05, 10.0)];
pub const SIM_TERMINAL_TOL: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckStatus {
    Pass,
    Fail,
    Skip,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub status: CheckStatus,
    pub detail: String,
}

impl Check {
    fn judged(name: &'static str, ok: bool, detail: String) -> Self {
        Check {
            name,
            status: if ok { CheckStatus::Pass } else { CheckStatus::Fail },
            detail,
        }
    }

    fn skipped(name: &'static str, why: &str) -> Self {
        Check {
            name,
            status: CheckStatus::Skip,
            detail: why.to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub checks: Vec<Check>,
}

impl VerifyReport {
    /// No check failed.
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.status != CheckStatus::Fail)
    }

    pub fn get(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            let tag = match c.status {
                CheckStatus::Pass => "PASS",
                CheckStatus::Fail => "FAIL",
                CheckStatus::Skip => "SKIP",
            };
            let _ = writeln!(out, "[{tag}] {}: {}", c.name, c.detail);
        }
        let _ = writeln!(
            out,
            "{}",
            if self.passed() {
                "all checks passed"
            } else {
                "verification FAILED"
            }
        );
        out
    }
}

const STRATEGIC: [&str; 9] = [
    "wedge signs",
    "open loop below static",
    "closed loop below open loop",
    "limits",
    "costate consistency",
    "open-loop nesting",
    "oracle spot checks",
    "simulator",
    "static residual",
];

pub fn run_verify(cfg: &RunConfig) -> VerifyReport {
    let mut checks = Vec::new();
    if let Err(e) = cfg.validate() {
        checks.push(Check::judged("configuration", false, e.to_string()));
        return VerifyReport { checks };
    }
    let (demand, cost) = (cfg.market.demand(), cfg.market.cost());
    let (d, c): (&dyn SymmetricDemand, &dyn CostSpec) = (&demand, &cost);
    let solver = &cfg.solver;

    if cfg.market.b == 0.0 {
        checks.push(Check::skipped(
            "static equilibrium",
            "independent goods: the free-entry firm count is indeterminate",
        ));
        checks.push(independent_goods(d, c, cfg));
        for name in STRATEGIC {
            checks.push(Check::skipped(name, "independent goods: all three concepts coincide"));
        }
        return VerifyReport { checks };
    }

    let base = match solve_static(d, c, solver) {
        Ok(b) => b,
        Err(e) => {
            let detail = match e {
                Error::DegenerateEquilibrium { x_tilde, n_tilde } => format!(
                    "DegenerateEquilibrium: x̃ = {}, ñ = {} (no room for a second firm)",
                    sig6(x_tilde),
                    sig6(n_tilde)
                ),
                other => other.to_string(),
            };
            checks.push(Check::judged("static equilibrium", false, detail));
            for name in STRATEGIC {
                checks.push(Check::skipped(name, "no static equilibrium"));
            }
            return VerifyReport { checks };
        }
    };

    checks.push(static_check(cfg, &base));
    checks.push(wedge_signs(d, c, &base, cfg));
    let grid = solve_grid(d, c, &base, solver);
    checks.push(proposition1_grid(&base, &grid));
    checks.push(proposition2_grid(&grid));
    checks.push(limits(d, c, &base, cfg));
    checks.push(costate_consistency(&grid));
    checks.push(nesting(d, c, &base, solver));
    checks.push(oracle_spot_checks(d, c, &base, solver));
    checks.push(simulator(d, c, &base, cfg));
    checks.push(static_residual_check(d, c, &base));
    VerifyReport { checks }
}

fn static_check(cfg: &RunConfig, base: &StaticEquilibrium) -> Check {
    let mut detail = format!(
        "x̃ = {}, ñ = {}, residual {:.1e}",
        sig6(base.x_tilde),
        sig6(base.n_tilde),
        base.residual_norm
    );
    let mut ok = base.audit.all_ok();
    if !ok {
        detail.push_str(", assumption audit failed");
    }
    if let Some((x, n)) = cfg.market.closed_form_static() {
        let err = (base.x_tilde - x).abs().max((base.n_tilde - n).abs());
        let _ = write!(detail, ", closed form ({}, {}) off by {err:.1e}", sig6(x), sig6(n));
        ok &= err < 1e-9;
    }
    Check::judged("static equilibrium", ok, detail)
}

fn static_residual_check(d: &dyn SymmetricDemand, c: &dyn CostSpec, base: &StaticEquilibrium) -> Check {
    match static_residual(d, c, base.x_tilde, base.n_tilde) {
        Ok((foc, entry)) => Check::judged(
            "static residual",
            foc.abs().max(entry.abs()) < 1e-9,
            format!("FOC {foc:.2e}, entry {entry:.2e}"),
        ),
        Err(e) => Check::judged("static residual", false, e.to_string()),
    }
}

fn wedge_signs(d: &dyn SymmetricDemand, c: &dyn CostSpec, base: &StaticEquilibrium, cfg: &RunConfig) -> Check {
    let (s, rho) = (cfg.dynamics.s, cfg.dynamics.rho);
    let (x, n) = (base.x_tilde, base.n_tilde);
    let eval = || -> Result<(f64, f64)> {
        Ok((
            openloop_residual(d, c, x, n, s, rho)?.0,
            closedloop_residual(d, c, x, n, s, rho)?.0,
        ))
    };
    match eval() {
        Ok((ol, cl)) => Check::judged(
            "wedge signs",
            ol > 0.0 && cl < ol,
            format!(
                "at the static point with s = {}, ρ = {}: open-loop FOC {} (> 0), closed-loop FOC {} (< open-loop)",
                sig6(s),
                sig6(rho),
                sig6(ol),
                sig6(cl)
            ),
        ),
        Err(e) => Check::judged("wedge signs", false, e.to_string()),
    }
}

struct GridPoint {
    s: f64,
    rho: f64,
    ol: Result<SteadyState>,
    cl: Result<SteadyState>,
}

fn solve_grid(
    d: &dyn SymmetricDemand,
    c: &dyn CostSpec,
    base: &StaticEquilibrium,
    cfg: &SolverConfig,
) -> Vec<GridPoint> {
    let mut out = Vec::new();
    for &s in &GRID_S {
        for &rho in &GRID_RHO {
            out.push(GridPoint {
                s,
                rho,
                ol: solve_openloop_from(d, c, base, s, rho, cfg),
                cl: solve_closedloop_from(d, c, base, s, rho, FeedbackMode::Full, cfg),
            });
        }
    }
    out
}

fn at(p: &GridPoint) -> String {
    format!("(s = {}, ρ = {})", sig6(p.s), sig6(p.rho))
}

fn proposition1_grid(base: &StaticEquilibrium, grid: &[GridPoint]) -> Check {
    let mut problems = Vec::new();
    let mut worst = f64::INFINITY;
    for p in grid {
        match &p.ol {
            Ok(ol) => {
                let dx = ol.x - base.x_tilde;
                let dn = base.n_tilde - ol.n;
                let band = dx.abs() <= LIMIT_BAND && dn.abs() <= LIMIT_BAND;
                if !band {
                    worst = worst.min(dx.min(dn));
                    if !(dx > ORDER_MARGIN && dn > ORDER_MARGIN) {
                        problems.push(format!("{}: x* − x̃ = {dx:.3e}, ñ − n* = {dn:.3e}", at(p)));
                    }
                }
            }
            Err(e) => problems.push(format!("{}: {e}", at(p))),
        }
    }
    let detail = if problems.is_empty() {
        format!("{} points, x* > x̃ and n* < ñ, smallest margin {worst:.3e}", grid.len())
    } else {
        problems.join("; ")
    };
    Check::judged("open loop below static", problems.is_empty(), detail)
}

fn proposition2_grid(grid: &[GridPoint]) -> Check {
    let mut problems = Vec::new();
    let mut worst = f64::INFINITY;
    for p in grid {
        match (&p.ol, &p.cl) {
            (Ok(ol), Ok(cl)) => {
                let dn = cl.n - ol.n;
                let dx = ol.x - cl.x;
                let band = dx.abs() <= LIMIT_BAND && dn.abs() <= LIMIT_BAND;
                let fb = cl.feedback.expect("closed loop carries feedback");
                if !band {
                    worst = worst.min(dx.min(dn));
                    if !(dn > ORDER_MARGIN && dx > ORDER_MARGIN) {
                        problems.push(format!("{}: n** − n* = {dn:.3e}, x* − x** = {dx:.3e}", at(p)));
                    }
                }
                if !(fb.dxi_dn < 0.0 && fb.delta < 0.0) {
                    problems.push(format!(
                        "{}: ∂x_i/∂n = {}, Δ = {}",
                        at(p),
                        sig6(fb.dxi_dn),
                        sig6(fb.delta)
                    ));
                }
            }
            (Err(e), _) | (_, Err(e)) => problems.push(format!("{}: {e}", at(p))),
        }
    }
    let detail = if problems.is_empty() {
        format!(
            "{} points, n** > n*, x** < x*, ∂x_i/∂n < 0, Δ < 0, smallest margin {worst:.3e}",
            grid.len()
        )
    } else {
        problems.join("; ")
    };
    Check::judged("closed loop below open loop", problems.is_empty(), detail)
}

fn costate_consistency(grid: &[GridPoint]) -> Check {
    let mut problems = Vec::new();
    let mut worst_gap: f64 = 0.0;
    for p in grid {
        match &p.ol {
            Ok(ol) if ol.lambda_s >= 0.0 => problems.push(format!("{}: λ*s = {}", at(p), sig6(ol.lambda_s))),
            Ok(_) => {}
            Err(e) => problems.push(format!("{}: {e}", at(p))),
        }
        match &p.cl {
            Ok(cl) => {
                let fb = cl.feedback.expect("closed loop carries feedback");
                let gap = (fb.lambda_s - fb.lambda_s_from_foc).abs();
                worst_gap = worst_gap.max(gap);
                if !(gap <= COSTATE_TOL) {
                    problems.push(format!("{}: costate formula vs identity gap {gap:.3e}", at(p)));
                }
            }
            Err(e) => problems.push(format!("{}: {e}", at(p))),
        }
    }
    let detail = if problems.is_empty() {
        format!("λ*s < 0 everywhere, largest closed-loop costate gap {worst_gap:.3e} (tol {COSTATE_TOL:.0e})")
    } else {
        problems.join("; ")
    };
    Check::judged("costate consistency", problems.is_empty(), detail)
}

fn limits(d: &dyn SymmetricDemand, c: &dyn CostSpec, base: &StaticEquilibrium, cfg: &RunConfig) -> Check {
    let solver = &cfg.solver;
    let cases = [
        ("ρ = 1e6", cfg.dynamics.s, 1e6, 1e-3),
        ("s = 1e-10", 1e-10, cfg.dynamics.rho, 1e-6),
    ];
    let mut parts = Vec::new();
    let mut ok = true;
    for (label, s, rho, tol) in cases {
        let ol = solve_openloop_from(d, c, base, s, rho, solver);
        let cl = solve_closedloop_from(d, c, base, s, rho, FeedbackMode::Full, solver);
        match (ol, cl) {
            (Ok(ol), Ok(cl)) => {
                let (e1, e2) = ((ol.n - base.n_tilde).abs(), (cl.n - base.n_tilde).abs());
                ok &= e1 < tol && e2 < tol;
                parts.push(format!(
                    "{label}: |n* − ñ| = {e1:.2e}, |n** − ñ| = {e2:.2e} (tol {tol:.0e})"
                ));
            }
            (Err(e), _) | (_, Err(e)) => {
                ok = false;
                parts.push(format!("{label}: {e}"));
            }
        }
    }
    Check::judged("limits", ok, parts.join("; "))
}

fn nesting(d: &dyn SymmetricDemand, c: &dyn CostSpec, base: &StaticEquilibrium, cfg: &SolverConfig) -> Check {
    let mut worst: f64 = 0.0;
    let mut problems = Vec::new();
    for (s, rho) in NESTING_POINTS {
        let ol = solve_openloop_from(d, c, base, s, rho, cfg);
        let sup = solve_closedloop_from(d, c, base, s, rho, FeedbackMode::Suppressed, cfg);
        match (ol, sup) {
            (Ok(ol), Ok(sup)) => {
                let gap = (ol.x - sup.x).abs().max((ol.n - sup.n).abs());
                worst = worst.max(gap);
                if !(gap <= NESTING_TOL) {
                    problems.push(format!("(s = {s}, ρ = {rho}): gap {gap:.3e}"));
                }
            }
            (Err(e), _) | (_, Err(e)) => problems.push(format!("(s = {s}, ρ = {rho}): {e}")),
        }
    }
    let detail = if problems.is_empty() {
        format!(
            "closed loop without feedback equals open loop at {} points, largest gap {worst:.2e}",
            NESTING_POINTS.len()
        )
    } else {
        problems.join("; ")
    };
    Check::judged("open-loop nesting", problems.is_empty(), detail)
}

const ORACLE_SAMPLES: usize = 4000;
const BISECT_ITERS: usize = 200;

fn bisect(mut lo: f64, mut hi: f64, g: impl Fn(f64) -> f64) -> f64 {
    let mut g_lo = g(lo);
    for _ in 0..BISECT_ITERS {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let g_mid = g(mid);
        if g_mid == 0.0 {
            return mid;
        }
        if (g_mid > 0.0) == (g_lo > 0.0) {
            lo = mid;
            g_lo = g_mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Firm count at which per-firm profit vanishes for output `x`, when entry
/// is profitable for a monopolist at that output.
pub fn entry_locus(d: &dyn SymmetricDemand, c: &dyn CostSpec, x: f64) -> Option<f64> {
    let profit = |n: f64| SymmetricPoint::evaluate_unchecked(d, c, x, n).profit_per_firm();
    if !(profit(1.0) > 0.0) {
        return None;
    }
    let mut hi = 2.0;
    while profit(hi) > 0.0 {
        hi *= 2.0;
        if hi > 1e12 {
            return None;
        }
    }
    Some(bisect(1.0, hi, profit))
}

/// Every root of `foc(x, n)` along the free-entry locus for `x` in
/// `[x_lo, x_hi]`: a dense scan for sign changes refined by bisection.
/// Sign changes across poles are discarded.
pub fn oracle_roots<F>(d: &dyn SymmetricDemand, c: &dyn CostSpec, x_lo: f64, x_hi: f64, foc: F) -> Vec<(f64, f64)>
where
    F: Fn(f64, f64) -> Result<f64>,
{
    let g = |x: f64| -> Option<f64> {
        let n = entry_locus(d, c, x)?;
        foc(x, n).ok().filter(|v| v.is_finite())
    };
    let mut roots = Vec::new();
    let mut prev: Option<(f64, f64)> = None;
    for k in 0..=ORACLE_SAMPLES {
        let x = x_lo + (x_hi - x_lo) * k as f64 / ORACLE_SAMPLES as f64;
        let here = g(x).map(|v| (x, v));
        if let (Some((xa, ga)), Some((xb, gb))) = (prev, here) {
            if (ga > 0.0) != (gb > 0.0) {
                let root = bisect(xa, xb, |x| g(x).unwrap_or(f64::NAN));
                if let (Some(n), Some(v)) = (entry_locus(d, c, root), g(root)) {
                    let scale = ga.abs().max(gb.abs()).max(1.0);
                    if v.abs() < 1e-8 * scale {
                        roots.push((root, n));
                    }
                }
            }
        }
        prev = here;
    }
    roots
}

fn oracle_spot_checks(
    d: &dyn SymmetricDemand,
    c: &dyn CostSpec,
    base: &StaticEquilibrium,
    cfg: &SolverConfig,
) -> Check {
    let (x_lo, x_hi) = (base.x_tilde / 20.0, base.x_tilde * 5.0);
    let mut parts = Vec::new();
    let mut ok = true;
    for (s, rho) in ORACLE_POINTS {
        let ol = solve_openloop_from(d, c, base, s, rho, cfg);
        let cl = solve_closedloop_from(d, c, base, s, rho, FeedbackMode::Full, cfg);
        let ol_roots = oracle_roots(d, c, x_lo, x_hi, |x, n| Ok(openloop_residual(d, c, x, n, s, rho)?.0));
        let cl_roots = oracle_roots(d, c, x_lo, x_hi, |x, n| Ok(closedloop_residual(d, c, x, n, s, rho)?.0));
        for (label, solved, roots) in [("open", ol, ol_roots), ("closed", cl, cl_roots)] {
            match solved {
                Ok(st) => {
                    let gap = roots
                        .iter()
                        .map(|&(x, n)| (x - st.x).abs().max((n - st.n).abs()))
                        .fold(f64::INFINITY, f64::min);
                    ok &= gap < ORACLE_TOL;
                    parts.push(format!(
                        "{label} loop (s = {s}, ρ = {rho}): {} oracle root(s), gap {gap:.1e}",
                        roots.len()
                    ));
                }
                Err(e) => {
                    ok = false;
                    parts.push(format!("{label} loop (s = {s}, ρ = {rho}): {e}"));
                }
            }
        }
    }
    Check::judged("oracle spot checks", ok, parts.join("; "))
}

fn simulator(d: &dyn SymmetricDemand, c: &dyn CostSpec, base: &StaticEquilibrium, cfg: &RunConfig) -> Check {
    let sim = cfg.simulation();
    let run = || -> Result<String> {
        let traj = simulate_entry(d, c, &sim)?;
        let terminal = (traj.terminal_n() - base.n_tilde).abs();
        let slope = {
            let x0 = traj.x[0];
            let pt = SymmetricPoint::evaluate(d, c, x0, sim.n0)?;
            match sim.mode {
                crate::dynamics::ProfitMode::Total => sim.s * sim.n0 * pt.profit_per_firm(),
                crate::dynamics::ProfitMode::Average => sim.s * pt.profit_per_firm(),
            }
        };
        let rest = simulate_entry(
            d,
            c,
            &SimulationConfig {
                n0: base.n_tilde,
                horizon: 10.0,
                ..sim
            },
        )?;
        let drift = rest.n.iter().map(|n| (n - base.n_tilde).abs()).fold(0.0, f64::max);
        let short = SimulationConfig { horizon: 5.0, ..sim };
        let coarse = simulate_entry(d, c, &short)?.terminal_n();
        let fine = simulate_entry(
            d,
            c,
            &SimulationConfig {
                dt: sim.dt / 2.0,
                ..short
            },
        )?
        .terminal_n();
        let halving = (coarse - fine).abs();
        let detail = format!(
            "n(T) = {}, |n(T) − ñ| = {terminal:.2e}, initial slope {}, fixed-point drift {drift:.1e}, dt-halving gap {halving:.1e}",
            sig6(traj.terminal_n()),
            sig6(slope)
        );
        if terminal < SIM_TERMINAL_TOL && drift < 1e-9 && halving < 1e-8 {
            Ok(detail)
        } else {
            Err(Error::Config(detail))
        }
    };
    match run() {
        Ok(detail) => Check::judged("simulator", true, detail),
        Err(Error::Config(detail)) => Check::judged("simulator", false, detail),
        Err(e) => Check::judged("simulator", false, e.to_string()),
    }
}

fn independent_goods(d: &dyn SymmetricDemand, c: &dyn CostSpec, cfg: &RunConfig) -> Check {
    let (s, rho) = (cfg.dynamics.s, cfg.dynamics.rho);
    let points = [(1.0, 2.0), (2.0, 4.75), (4.0, 10.0)];
    let run = || -> Result<f64> {
        let mut worst: f64 = 0.0;
        for (x, n) in points {
            let st = static_residual(d, c, x, n)?.0;
            let ol = openloop_residual(d, c, x, n, s, rho)?.0;
            let cl = closedloop_residual(d, c, x, n, s, rho)?.0;
            let fb = dxi_dn(d, c, x, n)?.0;
            worst = worst.max((ol - st).abs()).max((cl - st).abs()).max(fb.abs());
        }
        Ok(worst)
    };
    match run() {
        Ok(worst) => Check::judged(
            "independent goods",
            worst == 0.0,
            format!("wedges and feedback vanish, largest deviation {worst:.1e}"),
        ),
        Err(e) => Check::judged("independent goods", false, e.to_string()),
    }
}
