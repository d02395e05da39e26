use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use entrydyn::sweep::{run_sweep, write_outputs, RunConfig, Spacing, SweepParam, SweepSpec};
use entrydyn::verify::run_verify;
use entrydyn::{
    sig6, simulate_entry, solve_closedloop_from, solve_openloop_from, solve_static, Error, FeedbackMode, ProfitMode,
    Result, SteadyState, Trajectory,
};

/// Static, open-loop and closed-loop steady states of a free-entry oligopoly
/// with sluggish entry.
#[derive(Debug, Parser)]
#[command(name = "entrydyn", version)]
struct Cli {
    /// JSON config with optional sections "market", "solver", "sweep",
    /// "dynamics" and "output".
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Parameter to sweep.
    #[arg(long, global = true, value_enum)]
    param: Option<SweepParam>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    from: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    to: Option<f64>,
    #[arg(long, global = true)]
    steps: Option<usize>,
    #[arg(long, global = true, value_enum)]
    spacing: Option<Spacing>,
    /// Adjustment speed `s` (overrides the config).
    #[arg(long, global = true, allow_negative_numbers = true)]
    s: Option<f64>,
    /// Discount rate `ρ` (overrides the config).
    #[arg(long, global = true, allow_negative_numbers = true)]
    rho: Option<f64>,
    /// Profit measure driving entry in `simulate`.
    #[arg(long, global = true, value_enum)]
    mode: Option<ProfitMode>,
    #[arg(long, global = true)]
    csv: Option<PathBuf>,
    #[arg(long, global = true)]
    svg: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Static free-entry equilibrium.
    Static,
    /// Open-loop steady state at the configured `(s, ρ)`.
    OpenLoop,
    /// Memoryless closed-loop steady state at the configured `(s, ρ)`.
    ClosedLoop,
    /// Entry/exit dynamics under myopic outputs.
    Simulate,
    /// Sweep `ρ` or `s` and write CSV (and optionally SVG).
    Sweep,
    /// Run the verification suite; exits nonzero on any failure.
    Verify,
}

fn build_config(cli: &Cli) -> Result<RunConfig> {
    let mut cfg = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(param) = cli.param {
        if param != cfg.sweep.param {
            cfg.sweep = SweepSpec::preset(param);
        }
    }
    let sw = &mut cfg.sweep;
    sw.from = cli.from.unwrap_or(sw.from);
    sw.to = cli.to.unwrap_or(sw.to);
    sw.steps = cli.steps.unwrap_or(sw.steps);
    sw.spacing = cli.spacing.unwrap_or(sw.spacing);
    let dy = &mut cfg.dynamics;
    dy.s = cli.s.unwrap_or(dy.s);
    dy.rho = cli.rho.unwrap_or(dy.rho);
    dy.mode = cli.mode.unwrap_or(dy.mode);
    if cli.csv.is_some() {
        cfg.output.csv = cli.csv.clone();
    }
    if cli.svg.is_some() {
        cfg.output.svg = cli.svg.clone();
    }
    cfg.validate()?;
    Ok(cfg)
}

fn print_steady(label: &str, st: &SteadyState) {
    println!("{label} steady state (s = {}, rho = {})", sig6(st.s), sig6(st.rho));
    println!("  x        = {}", sig6(st.x));
    println!("  n        = {}", sig6(st.n));
    println!("  lambda*s = {}", sig6(st.lambda_s));
    if let Some(fb) = st.feedback {
        println!("  dxi/dn   = {}", sig6(fb.dxi_dn));
        println!("  Delta    = {}", sig6(fb.delta));
    }
    println!(
        "  SOC      = {} ({})",
        sig6(st.soc_value),
        if st.soc_ok { "ok" } else { "violated" }
    );
    println!(
        "  residual = {:.3e} after {} iterations",
        st.residual_norm, st.iterations
    );
    println!("  assumptions hold: {}", st.audit.all_ok());
}

fn write_trajectory(traj: &Trajectory, path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["t", "n", "x", "per_firm_profit", "total_profit"])?;
    for i in 0..traj.len() {
        w.write_record(
            [
                traj.t[i],
                traj.n[i],
                traj.x[i],
                traj.per_firm_profit[i],
                traj.total_profit[i],
            ]
            .map(entrydyn::sweep::fmt_full),
        )?;
    }
    w.flush()?;
    Ok(())
}

fn run(cli: &Cli) -> Result<ExitCode> {
    let cfg = build_config(cli)?;
    let (d, c) = (cfg.market.demand(), cfg.market.cost());
    let solver = &cfg.solver;
    let (s, rho) = (cfg.dynamics.s, cfg.dynamics.rho);
    match cli.command {
        Command::Static => {
            let st = solve_static(&d, &c, solver)?;
            println!("static equilibrium");
            println!("  x~       = {}", sig6(st.x_tilde));
            println!("  n~       = {}", sig6(st.n_tilde));
            println!("  price    = {}", sig6(st.price));
            println!(
                "  residual = {:.3e} after {} iterations",
                st.residual_norm, st.iterations
            );
            println!("  assumptions hold: {}", st.audit.all_ok());
        }
        Command::OpenLoop => {
            let base = solve_static(&d, &c, solver)?;
            print_steady("open-loop", &solve_openloop_from(&d, &c, &base, s, rho, solver)?);
        }
        Command::ClosedLoop => {
            let base = solve_static(&d, &c, solver)?;
            let st = solve_closedloop_from(&d, &c, &base, s, rho, FeedbackMode::Full, solver)?;
            print_steady("closed-loop", &st);
        }
        Command::Simulate => {
            let sim = cfg.simulation();
            let traj = simulate_entry(&d, &c, &sim)?;
            println!(
                "simulated {} steps of dt = {} from n0 = {}",
                traj.len() - 1,
                sig6(sim.dt),
                sig6(sim.n0)
            );
            println!("  n(T)      = {}", sig6(traj.terminal_n()));
            println!("  x(T)      = {}", sig6(*traj.x.last().expect("non-empty trajectory")));
            println!("  dn/dt(T)  = {:.3e}", traj.terminal_rate);
            println!("  converged = {}", traj.converged);
            println!("  clamps    = {}", traj.clamp_events.len());
            if let Some(path) = &cfg.output.csv {
                write_trajectory(&traj, path)?;
            }
        }
        Command::Sweep => {
            let res = run_sweep(&cfg)?;
            println!(
                "{:>10} {:>10} {:>10} {:>10} {:>10} {:>10}",
                res.config.sweep.param.name(),
                "n_static",
                "n_ol",
                "n_cl",
                "x_ol",
                "x_cl"
            );
            let show = |v: Option<f64>| v.map(sig6).unwrap_or_else(|| "-".into());
            for r in &res.rows {
                println!(
                    "{:>10} {:>10} {:>10} {:>10} {:>10} {:>10}",
                    sig6(r.param_value),
                    sig6(r.n_static),
                    show(r.n_ol),
                    show(r.n_cl),
                    show(r.x_ol),
                    show(r.x_cl)
                );
            }
            write_outputs(&res, cfg.output.csv.as_deref(), cfg.output.svg.as_deref())?;
        }
        Command::Verify => {
            let report = run_verify(&cfg);
            print!("{}", report.render());
            if !report.passed() {
                return Ok(ExitCode::FAILURE);
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            if let Error::Config(_) | Error::InvalidParameter(_) | Error::Json(_) = e {
                ExitCode::from(2)
            } else {
                ExitCode::FAILURE
            }
        }
    }
}
