use entrydyn::{myopic_output, simulate_entry, LinearMarket, ProfitMode, SimulationConfig};
use proptest::prelude::*;

/// `dn/dt` at `n` from the linear closed form `x = (a − c)/(2 + (n−1)b)`.
fn linear_rate(m: &LinearMarket, s: f64, n: f64) -> f64 {
    let x = (m.a - m.c) / (2.0 + (n - 1.0) * m.b);
    s * n * (x * x - m.f)
}

#[test]
fn initial_slope_matches_closed_form() {
    let m = LinearMarket::default();
    let traj = simulate_entry(&m.demand(), &m.cost(), &SimulationConfig::default()).unwrap();
    let slope = 0.1 * traj.n[0] * traj.per_firm_profit[0];
    let expected = linear_rate(&m, 0.1, 2.0);
    assert!((expected - 1.7510204081632653).abs() < 1e-15);
    assert!((slope - expected).abs() < 1e-12);
}

#[test]
fn reaches_static_firm_count() {
    let m = LinearMarket::default();
    let traj = simulate_entry(&m.demand(), &m.cost(), &SimulationConfig::default()).unwrap();
    assert!((traj.terminal_n() - 4.75).abs() < 1e-4);
    assert!(traj.converged);
    assert!(traj.n.windows(2).all(|w| w[1] >= w[0]));
}

#[test]
fn static_firm_count_is_a_fixed_point() {
    let m = LinearMarket::default();
    let cfg = SimulationConfig {
        n0: 4.75,
        horizon: 20.0,
        ..Default::default()
    };
    let traj = simulate_entry(&m.demand(), &m.cost(), &cfg).unwrap();
    assert!(traj.n.iter().all(|n| (n - 4.75).abs() < 1e-12));
}

#[test]
fn halving_dt_changes_little() {
    let m = LinearMarket::default();
    let run = |dt: f64| {
        let cfg = SimulationConfig {
            horizon: 5.0,
            dt,
            ..Default::default()
        };
        simulate_entry(&m.demand(), &m.cost(), &cfg).unwrap().terminal_n()
    };
    let (coarse, fine, finer) = (run(0.04), run(0.02), run(0.01));
    assert!((coarse - fine).abs() < 1e-6);
    // fourth-order convergence: error ratio near 16
    let ratio = (coarse - fine) / (fine - finer);
    assert!(ratio > 10.0 && ratio < 22.0, "ratio {ratio}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn myopic_output_is_linear_best_response(n in 1.0f64..30.0) {
        let m = LinearMarket::default();
        let x = myopic_output(&m.demand(), &m.cost(), n).unwrap();
        prop_assert!((x - (m.a - m.c) / (2.0 + (n - 1.0) * m.b)).abs() < 1e-12);
    }

    #[test]
    fn modes_share_the_rest_point(n0 in 1.0f64..12.0) {
        let m = LinearMarket::default();
        for mode in [ProfitMode::Total, ProfitMode::Average] {
            let cfg = SimulationConfig { n0, mode, horizon: 400.0, dt: 0.1, ..Default::default() };
            let traj = simulate_entry(&m.demand(), &m.cost(), &cfg).unwrap();
            prop_assert!((traj.terminal_n() - 4.75).abs() < 1e-4);
        }
    }
}
