//! Run configuration, parameter sweeps over `ρ` or `s`, and their CSV and SVG
//! artifacts.

use std::fmt::Write as _;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::closed_loop::{continue_closedloop, solve_closedloop_from, FeedbackMode};
use crate::dynamics::{ProfitMode, SimulationConfig};
use crate::error::{Error, Result};
use crate::market::{CostSpec, LinearMarket, SymmetricDemand};
use crate::numerics::{linear_grid, log_grid, SolverConfig};
use crate::open_loop::{continue_openloop, solve_openloop_from, SteadyState};
use crate::static_eq::{solve_static, StaticEquilibrium};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum SweepParam {
    Rho,
    S,
}

impl SweepParam {
    pub fn name(self) -> &'static str {
        match self {
            SweepParam::Rho => "rho",
            SweepParam::S => "s",
        }
    }
}

impl FromStr for SweepParam {
    type Err = Error;

    fn from_str(v: &str) -> Result<Self> {
        match v {
            "rho" => Ok(SweepParam::Rho),
            "s" => Ok(SweepParam::S),
            other => Err(Error::Config(format!("unknown sweep parameter {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Spacing {
    Log,
    Linear,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepSpec {
    pub param: SweepParam,
    pub from: f64,
    pub to: f64,
    pub steps: usize,
    pub spacing: Spacing,
}

impl Default for SweepSpec {
    fn default() -> Self {
        SweepSpec::preset(SweepParam::Rho)
    }
}

impl SweepSpec {
    /// `ρ ∈ [0.1, 10]` log-spaced, or `s ∈ [0.01, 1]` linear, 40 points each.
    pub fn preset(param: SweepParam) -> Self {
        match param {
            SweepParam::Rho => SweepSpec {
                param,
                from: 0.1,
                to: 10.0,
                steps: 40,
                spacing: Spacing::Log,
            },
            SweepParam::S => SweepSpec {
                param,
                from: 0.01,
                to: 1.0,
                steps: 40,
                spacing: Spacing::Linear,
            },
        }
    }

    pub fn grid(&self) -> Vec<f64> {
        match self.spacing {
            Spacing::Log => log_grid(self.from, self.to, self.steps),
            Spacing::Linear => linear_grid(self.from, self.to, self.steps),
        }
    }
}

/// Fixed rates and simulator settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DynamicsSection {
    pub s: f64,
    pub rho: f64,
    pub n0: f64,
    pub horizon: f64,
    pub dt: f64,
    pub mode: ProfitMode,
    pub rate_tol: f64,
}

impl Default for DynamicsSection {
    fn default() -> Self {
        let sim = SimulationConfig::default();
        DynamicsSection {
            s: sim.s,
            rho: 0.5,
            n0: sim.n0,
            horizon: sim.horizon,
            dt: sim.dt,
            mode: sim.mode,
            rate_tol: sim.rate_tol,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSection {
    pub csv: Option<PathBuf>,
    pub svg: Option<PathBuf>,
}

/// Whole-run configuration, read from JSON. Every section is optional.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub market: LinearMarket,
    pub solver: SolverConfig,
    pub sweep: SweepSpec,
    pub dynamics: DynamicsSection,
    pub output: OutputSection,
}

fn check_positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::Config(format!("{name} must be positive and finite, got {v}")))
    }
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: RunConfig = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        RunConfig::from_json(&std::fs::read_to_string(path)?)
    }

    /// The sweep over `s` at `ρ = 0.5`.
    pub fn fig_s() -> Self {
        RunConfig {
            sweep: SweepSpec::preset(SweepParam::S),
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.solver.validate().map_err(Error::Config)?;
        let sw = &self.sweep;
        check_positive("sweep.from", sw.from)?;
        check_positive("sweep.to", sw.to)?;
        if !(sw.from < sw.to) {
            return Err(Error::Config(format!(
                "sweep.from = {} must be below sweep.to = {}",
                sw.from, sw.to
            )));
        }
        if sw.steps < 2 {
            return Err(Error::Config(format!("sweep.steps = {} must be >= 2", sw.steps)));
        }
        check_positive("dynamics.s", self.dynamics.s)?;
        check_positive("dynamics.rho", self.dynamics.rho)?;
        check_positive("dynamics.horizon", self.dynamics.horizon)?;
        check_positive("dynamics.dt", self.dynamics.dt)?;
        if !(self.dynamics.n0 >= 1.0 && self.dynamics.n0.is_finite()) {
            return Err(Error::Config(format!(
                "dynamics.n0 = {} must be >= 1",
                self.dynamics.n0
            )));
        }
        Ok(())
    }

    pub fn simulation(&self) -> SimulationConfig {
        let d = &self.dynamics;
        SimulationConfig {
            s: d.s,
            n0: d.n0,
            horizon: d.horizon,
            dt: d.dt,
            mode: d.mode,
            rate_tol: d.rate_tol,
        }
    }

    /// `(s, ρ)` at a grid value of the swept parameter.
    pub fn rates_at(&self, value: f64) -> (f64, f64) {
        match self.sweep.param {
            SweepParam::Rho => (self.dynamics.s, value),
            SweepParam::S => (value, self.dynamics.rho),
        }
    }
}

/// One grid point of a sweep. Fields of a failed solve are `None`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub param_name: SweepParam,
    pub param_value: f64,
    pub x_static: f64,
    pub n_static: f64,
    pub x_ol: Option<f64>,
    pub n_ol: Option<f64>,
    pub lambda_s_ol: Option<f64>,
    pub x_cl: Option<f64>,
    pub n_cl: Option<f64>,
    pub lambda_s_cl: Option<f64>,
    pub dxi_dn: Option<f64>,
    pub soc_ol_ok: Option<bool>,
    pub soc_cl_ok: Option<bool>,
    pub converged_ol: bool,
    pub converged_cl: bool,
}

pub const CSV_HEADER: [&str; 15] = [
    "param_name",
    "param_value",
    "x_static",
    "n_static",
    "x_ol",
    "n_ol",
    "lambda_s_ol",
    "x_cl",
    "n_cl",
    "lambda_s_cl",
    "dxi_dn",
    "soc_ol_ok",
    "soc_cl_ok",
    "converged_ol",
    "converged_cl",
];

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub config: RunConfig,
    pub base: StaticEquilibrium,
    pub rows: Vec<SweepRow>,
}

fn follow_curve<S, C>(grid: &[f64], rates: impl Fn(f64) -> (f64, f64), start: S, cont: C) -> Vec<Option<SteadyState>>
where
    S: Fn(f64, f64) -> Result<SteadyState>,
    C: Fn(&SteadyState, f64, f64) -> Result<SteadyState>,
{
    let mut prev: Option<SteadyState> = None;
    grid.iter()
        .map(|&v| {
            let (s, rho) = rates(v);
            let solved = match &prev {
                Some(p) => cont(p, s, rho).or_else(|_| start(s, rho)),
                None => start(s, rho),
            };
            match solved {
                Ok(st) => {
                    prev = Some(st.clone());
                    Some(st)
                }
                Err(_) => None,
            }
        })
        .collect()
}

/// Sweeps the configured parameter. The first point of each curve is reached
/// from the static equilibrium; later points continue from their neighbour,
/// falling back to a fresh start when that fails. The open-loop and
/// closed-loop curves run on separate threads.
pub fn run_sweep(cfg: &RunConfig) -> Result<SweepResult> {
    cfg.validate()?;
    let (demand, cost) = (cfg.market.demand(), cfg.market.cost());
    let (d, c): (&dyn SymmetricDemand, &dyn CostSpec) = (&demand, &cost);
    let solver = &cfg.solver;
    let base = solve_static(d, c, solver)?;
    let grid = cfg.sweep.grid();
    let rates = |v: f64| cfg.rates_at(v);

    let (ol, cl) = std::thread::scope(|scope| {
        let ol = scope.spawn(|| {
            follow_curve(
                &grid,
                rates,
                |s, rho| solve_openloop_from(d, c, &base, s, rho, solver),
                |p, s, rho| continue_openloop(d, c, p, s, rho, solver),
            )
        });
        let cl = follow_curve(
            &grid,
            rates,
            |s, rho| solve_closedloop_from(d, c, &base, s, rho, FeedbackMode::Full, solver),
            |p, s, rho| continue_closedloop(d, c, p, s, rho, FeedbackMode::Full, solver),
        );
        (ol.join().expect("open-loop sweep thread panicked"), cl)
    });

    let rows = grid
        .iter()
        .zip(ol.iter().zip(cl.iter()))
        .map(|(&v, (o, k))| SweepRow {
            param_name: cfg.sweep.param,
            param_value: v,
            x_static: base.x_tilde,
            n_static: base.n_tilde,
            x_ol: o.as_ref().map(|st| st.x),
            n_ol: o.as_ref().map(|st| st.n),
            lambda_s_ol: o.as_ref().map(|st| st.lambda_s),
            x_cl: k.as_ref().map(|st| st.x),
            n_cl: k.as_ref().map(|st| st.n),
            lambda_s_cl: k.as_ref().map(|st| st.lambda_s),
            dxi_dn: k.as_ref().and_then(|st| st.feedback).map(|f| f.dxi_dn),
            soc_ol_ok: o.as_ref().map(|st| st.soc_ok),
            soc_cl_ok: k.as_ref().map(|st| st.soc_ok),
            converged_ol: o.is_some(),
            converged_cl: k.is_some(),
        })
        .collect();
    Ok(SweepResult {
        config: cfg.clone(),
        base,
        rows,
    })
}

/// 17 significant digits, enough to round-trip any `f64`.
pub fn fmt_full(v: f64) -> String {
    format!("{v:.16e}")
}

fn opt_num(v: Option<f64>) -> String {
    v.map(fmt_full).unwrap_or_default()
}

fn opt_bool(v: Option<bool>) -> String {
    v.map(|b| b.to_string()).unwrap_or_default()
}

pub fn write_csv<W: Write>(rows: &[SweepRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in rows {
        w.write_record([
            r.param_name.name().to_string(),
            fmt_full(r.param_value),
            fmt_full(r.x_static),
            fmt_full(r.n_static),
            opt_num(r.x_ol),
            opt_num(r.n_ol),
            opt_num(r.lambda_s_ol),
            opt_num(r.x_cl),
            opt_num(r.n_cl),
            opt_num(r.lambda_s_cl),
            opt_num(r.dxi_dn),
            opt_bool(r.soc_ol_ok),
            opt_bool(r.soc_cl_ok),
            r.converged_ol.to_string(),
            r.converged_cl.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn csv_string(rows: &[SweepRow]) -> Result<String> {
    let mut buf = Vec::new();
    write_csv(rows, &mut buf)?;
    Ok(String::from_utf8(buf).expect("csv output is utf-8"))
}

fn parse_num(field: &str, name: &str) -> Result<f64> {
    field
        .parse()
        .map_err(|_| Error::Config(format!("bad number {field:?} in column {name}")))
}

fn parse_opt_num(field: &str, name: &str) -> Result<Option<f64>> {
    if field.is_empty() {
        Ok(None)
    } else {
        parse_num(field, name).map(Some)
    }
}

fn parse_bool(field: &str, name: &str) -> Result<bool> {
    field
        .parse()
        .map_err(|_| Error::Config(format!("bad boolean {field:?} in column {name}")))
}

fn parse_opt_bool(field: &str, name: &str) -> Result<Option<bool>> {
    if field.is_empty() {
        Ok(None)
    } else {
        parse_bool(field, name).map(Some)
    }
}

pub fn read_csv<R: Read>(input: R) -> Result<Vec<SweepRow>> {
    let mut rdr = csv::Reader::from_reader(input);
    let header: Vec<String> = rdr.headers()?.iter().map(String::from).collect();
    if header != CSV_HEADER {
        return Err(Error::Config(format!("unexpected csv header {header:?}")));
    }
    let mut rows = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        let f = |i: usize| rec.get(i).unwrap_or("");
        rows.push(SweepRow {
            param_name: f(0).parse()?,
            param_value: parse_num(f(1), CSV_HEADER[1])?,
            x_static: parse_num(f(2), CSV_HEADER[2])?,
            n_static: parse_num(f(3), CSV_HEADER[3])?,
            x_ol: parse_opt_num(f(4), CSV_HEADER[4])?,
            n_ol: parse_opt_num(f(5), CSV_HEADER[5])?,
            lambda_s_ol: parse_opt_num(f(6), CSV_HEADER[6])?,
            x_cl: parse_opt_num(f(7), CSV_HEADER[7])?,
            n_cl: parse_opt_num(f(8), CSV_HEADER[8])?,
            lambda_s_cl: parse_opt_num(f(9), CSV_HEADER[9])?,
            dxi_dn: parse_opt_num(f(10), CSV_HEADER[10])?,
            soc_ol_ok: parse_opt_bool(f(11), CSV_HEADER[11])?,
            soc_cl_ok: parse_opt_bool(f(12), CSV_HEADER[12])?,
            converged_ol: parse_bool(f(13), CSV_HEADER[13])?,
            converged_cl: parse_bool(f(14), CSV_HEADER[14])?,
        });
    }
    Ok(rows)
}

const SVG_W: f64 = 640.0;
const SVG_H: f64 = 420.0;
const MARGIN_L: f64 = 60.0;
const MARGIN_R: f64 = 150.0;
const MARGIN_T: f64 = 20.0;
const MARGIN_B: f64 = 50.0;

/// Line chart of `n_static`, `n_ol` and `n_cl` against the swept parameter.
/// A log-spaced sweep gets a log x axis. Failed rows break the line.
pub fn render_svg(rows: &[SweepRow], spacing: Spacing) -> String {
    let tx = |v: f64| match spacing {
        Spacing::Log => v.ln(),
        Spacing::Linear => v,
    };
    let xs: Vec<f64> = rows.iter().map(|r| tx(r.param_value)).collect();
    let (x_lo, x_hi) = min_max(xs.iter().copied());
    let ys = rows.iter().flat_map(|r| [Some(r.n_static), r.n_ol, r.n_cl]).flatten();
    let (mut y_lo, mut y_hi) = min_max(ys);
    let pad = 0.05 * (y_hi - y_lo).max(1e-6);
    y_lo -= pad;
    y_hi += pad;
    let x_span = (x_hi - x_lo).max(1e-12);
    let px = |v: f64| MARGIN_L + (v - x_lo) / x_span * (SVG_W - MARGIN_L - MARGIN_R);
    let py = |v: f64| SVG_H - MARGIN_B - (v - y_lo) / (y_hi - y_lo) * (SVG_H - MARGIN_T - MARGIN_B);

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SVG_W}" height="{SVG_H}" viewBox="0 0 {SVG_W} {SVG_H}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let (x0, x1) = (MARGIN_L, SVG_W - MARGIN_R);
    let (y0, y1) = (SVG_H - MARGIN_B, MARGIN_T);
    let _ = writeln!(
        svg,
        r#"<path d="M{x0} {y1} L{x0} {y0} L{x1} {y0}" fill="none" stroke="black"/>"#
    );
    for i in 0..=4 {
        let frac = i as f64 / 4.0;
        let xv = x_lo + frac * (x_hi - x_lo);
        let label = match spacing {
            Spacing::Log => xv.exp(),
            Spacing::Linear => xv,
        };
        let (gx, gy) = (px(xv), py(y_lo + frac * (y_hi - y_lo)));
        let _ = writeln!(
            svg,
            r#"<text x="{gx:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            y0 + 18.0,
            crate::fmt::sig6(label)
        );
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#,
            x0 - 6.0,
            gy + 4.0,
            crate::fmt::sig6(y_lo + frac * (y_hi - y_lo))
        );
    }
    let param = rows.first().map_or("", |r| r.param_name.name());
    let _ = writeln!(
        svg,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{param}</text>"#,
        (x0 + x1) / 2.0,
        SVG_H - 10.0
    );
    let _ = writeln!(
        svg,
        r#"<text x="14" y="{:.2}" text-anchor="middle" transform="rotate(-90 14 {:.2})">n</text>"#,
        (y0 + y1) / 2.0,
        (y0 + y1) / 2.0
    );

    let series: [(&str, &str, Vec<Option<f64>>); 3] = [
        ("static", "#555555", rows.iter().map(|r| Some(r.n_static)).collect()),
        ("open loop", "#1f77b4", rows.iter().map(|r| r.n_ol).collect()),
        ("closed loop", "#d62728", rows.iter().map(|r| r.n_cl).collect()),
    ];
    for (k, (label, color, ys)) in series.iter().enumerate() {
        let mut d = String::new();
        let mut pen_down = false;
        for (x, y) in xs.iter().zip(ys) {
            match y {
                Some(y) => {
                    let _ = write!(d, "{}{:.2} {:.2} ", if pen_down { "L" } else { "M" }, px(*x), py(*y));
                    pen_down = true;
                }
                None => pen_down = false,
            }
        }
        let dash = if k == 0 { r#" stroke-dasharray="6 4""# } else { "" };
        let _ = writeln!(
            svg,
            r#"<path d="{}" fill="none" stroke="{color}" stroke-width="2"{dash}/>"#,
            d.trim_end()
        );
        let ly = MARGIN_T + 20.0 + 20.0 * k as f64;
        let lx = SVG_W - MARGIN_R + 15.0;
        let _ = writeln!(
            svg,
            r#"<line x1="{lx}" y1="{ly}" x2="{}" y2="{ly}" stroke="{color}" stroke-width="2"{dash}/>"#,
            lx + 25.0
        );
        let _ = writeln!(svg, r#"<text x="{}" y="{}">{label}</text>"#, lx + 32.0, ly + 4.0);
    }
    svg.push_str("</svg>\n");
    svg
}

fn min_max(vals: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = vals.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
    if lo.is_finite() {
        (lo, hi)
    } else {
        (0.0, 1.0)
    }
}

/// Writes the CSV and, when configured, the SVG of a finished sweep.
pub fn write_outputs(result: &SweepResult, csv: Option<&Path>, svg: Option<&Path>) -> Result<()> {
    if let Some(path) = csv {
        write_csv(&result.rows, std::fs::File::create(path)?)?;
    }
    if let Some(path) = svg {
        std::fs::write(path, render_svg(&result.rows, result.config.sweep.spacing))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(param: SweepParam, steps: usize) -> RunConfig {
        RunConfig {
            sweep: SweepSpec {
                steps,
                ..SweepSpec::preset(param)
            },
            ..Default::default()
        }
    }

    #[test]
    fn defaults_mirror_reference_market() {
        let cfg = RunConfig::default();
        assert_eq!(cfg.market, LinearMarket::default());
        assert_eq!(cfg.sweep.param, SweepParam::Rho);
        assert_eq!((cfg.dynamics.s, cfg.dynamics.rho), (0.1, 0.5));
        let s = RunConfig::fig_s();
        assert_eq!(s.sweep.spacing, Spacing::Linear);
        assert_eq!((s.sweep.from, s.sweep.to), (0.01, 1.0));
    }

    #[test]
    fn config_json_sections() {
        let cfg = RunConfig::from_json(
            r#"{"market": {"a": 11, "b": 0.8, "c": 1, "f": 9},
                "sweep": {"param": "s", "from": 0.1, "to": 0.2, "steps": 3, "spacing": "linear"},
                "dynamics": {"rho": 2.0}}"#,
        )
        .unwrap();
        assert_eq!(cfg.market.f, 9.0);
        assert_eq!(cfg.sweep.param, SweepParam::S);
        assert_eq!(cfg.dynamics.rho, 2.0);
        assert_eq!(cfg.dynamics.s, 0.1);
        assert_eq!(cfg.rates_at(0.15), (0.15, 2.0));
    }

    #[test]
    fn config_validation() {
        for bad in [
            r#"{"sweep": {"from": 2, "to": 1}}"#,
            r#"{"sweep": {"steps": 1}}"#,
            r#"{"dynamics": {"s": 0}}"#,
            r#"{"dynamics": {"rho": -1}}"#,
            r#"{"market": {"a": 11, "b": 1.5, "c": 1, "f": 4}}"#,
            r#"{"solver": {"damping": 2}}"#,
            r#"{"unknown": 1}"#,
        ] {
            assert!(RunConfig::from_json(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn two_step_sweep() {
        for param in [SweepParam::Rho, SweepParam::S] {
            let res = run_sweep(&small(param, 2)).unwrap();
            assert_eq!(res.rows.len(), 2);
            assert!(res.rows.iter().all(|r| r.converged_ol && r.converged_cl));
            let text = csv_string(&res.rows).unwrap();
            assert_eq!(text.lines().count(), 3);
            assert_eq!(text.lines().next().unwrap(), CSV_HEADER.join(","));
        }
    }

    #[test]
    fn csv_round_trip_with_gaps() {
        let row = SweepRow {
            param_name: SweepParam::S,
            param_value: 0.1,
            x_static: 2.0,
            n_static: 4.75,
            x_ol: Some(std::f64::consts::PI),
            n_ol: None,
            lambda_s_ol: Some(-1e-300),
            x_cl: None,
            n_cl: None,
            lambda_s_cl: None,
            dxi_dn: Some(-0.8),
            soc_ol_ok: Some(true),
            soc_cl_ok: None,
            converged_ol: true,
            converged_cl: false,
        };
        let text = csv_string(std::slice::from_ref(&row)).unwrap();
        assert_eq!(read_csv(text.as_bytes()).unwrap(), vec![row]);
    }

    #[test]
    fn svg_has_three_series() {
        let res = run_sweep(&small(SweepParam::Rho, 4)).unwrap();
        let svg = render_svg(&res.rows, Spacing::Log);
        assert!(svg.starts_with("<svg"));
        assert_eq!(svg.matches("<path d=\"M").count(), 4);
        for label in ["static", "open loop", "closed loop"] {
            assert!(svg.contains(label));
        }
    }

    #[test]
    fn degenerate_market_aborts_before_rows() {
        let mut cfg = small(SweepParam::Rho, 3);
        cfg.market.f = 25.0;
        assert!(matches!(run_sweep(&cfg), Err(Error::DegenerateEquilibrium { .. })));
    }
}
