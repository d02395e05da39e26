use entrydyn::sweep::{csv_string, read_csv, run_sweep, RunConfig, SweepParam, SweepRow};
use proptest::prelude::*;

fn any_f64() -> impl Strategy<Value = f64> {
    prop_oneof![
        proptest::num::f64::NORMAL | proptest::num::f64::SUBNORMAL | proptest::num::f64::ZERO,
        Just(1.0 / 3.0),
        Just(f64::MAX),
        Just(f64::MIN_POSITIVE),
    ]
}

fn any_row() -> impl Strategy<Value = SweepRow> {
    (
        prop_oneof![Just(SweepParam::Rho), Just(SweepParam::S)],
        any_f64(),
        any_f64(),
        any_f64(),
        proptest::collection::vec(proptest::option::of(any_f64()), 7),
        proptest::option::of(any::<bool>()),
        proptest::option::of(any::<bool>()),
        any::<bool>(),
        any::<bool>(),
    )
        .prop_map(
            |(param_name, v, xs, ns, o, soc_ol_ok, soc_cl_ok, converged_ol, converged_cl)| SweepRow {
                param_name,
                param_value: v,
                x_static: xs,
                n_static: ns,
                x_ol: o[0],
                n_ol: o[1],
                lambda_s_ol: o[2],
                x_cl: o[3],
                n_cl: o[4],
                lambda_s_cl: o[5],
                dxi_dn: o[6],
                soc_ol_ok,
                soc_cl_ok,
                converged_ol,
                converged_cl,
            },
        )
}

proptest! {
    #[test]
    fn csv_round_trip_is_exact(rows in proptest::collection::vec(any_row(), 0..8)) {
        let text = csv_string(&rows).unwrap();
        let back = read_csv(text.as_bytes()).unwrap();
        prop_assert_eq!(back.len(), rows.len());
        for (a, b) in rows.iter().zip(&back) {
            // Compare bit patterns so signed zeros also count.
            let bits = |r: &SweepRow| {
                [Some(r.param_value), Some(r.x_static), Some(r.n_static), r.x_ol, r.n_ol,
                 r.lambda_s_ol, r.x_cl, r.n_cl, r.lambda_s_cl, r.dxi_dn]
                    .map(|v| v.map(f64::to_bits))
            };
            prop_assert_eq!(bits(a), bits(b));
            prop_assert_eq!(
                (a.param_name, a.soc_ol_ok, a.soc_cl_ok, a.converged_ol, a.converged_cl),
                (b.param_name, b.soc_ol_ok, b.soc_cl_ok, b.converged_ol, b.converged_cl)
            );
        }
    }
}

#[test]
fn identical_config_gives_identical_csv() {
    let cfg = RunConfig::default();
    let first = csv_string(&run_sweep(&cfg).unwrap().rows).unwrap();
    let second = csv_string(&run_sweep(&cfg).unwrap().rows).unwrap();
    assert_eq!(first.as_bytes(), second.as_bytes());
}

#[test]
fn rho_preset_shapes() {
    let res = run_sweep(&RunConfig::default()).unwrap();
    assert_eq!(res.rows.len(), 40);
    assert!(res.rows.iter().all(|r| r.converged_ol && r.converged_cl));
    assert!(res.rows.windows(2).all(|w| w[1].n_ol.unwrap() > w[0].n_ol.unwrap()));
    assert!(res.rows.iter().all(|r| r.n_cl.unwrap() > r.n_ol.unwrap()));
    assert!(res.rows.iter().all(|r| r.n_ol.unwrap() < r.n_static));
    assert!(res.rows.iter().all(|r| r.n_static == 4.75));
    let gap = |r: &SweepRow| 4.75 - r.n_ol.unwrap();
    assert!(gap(res.rows.last().unwrap()) < 0.25 * gap(&res.rows[0]));
    assert!(res
        .rows
        .iter()
        .all(|r| r.soc_ol_ok == Some(true) && r.soc_cl_ok == Some(true)));
}

#[test]
fn s_preset_shapes() {
    let res = run_sweep(&RunConfig::fig_s()).unwrap();
    assert_eq!(res.rows.len(), 40);
    assert!(res.rows.iter().all(|r| r.converged_ol && r.converged_cl));
    assert!(res.rows.windows(2).all(|w| w[1].n_ol.unwrap() < w[0].n_ol.unwrap()));
    assert!(res.rows.iter().all(|r| r.n_cl.unwrap() > r.n_ol.unwrap()));
    assert!(res.rows.iter().all(|r| r.n_static == 4.75));
    assert!(res.rows.iter().all(|r| r.dxi_dn.unwrap() < 0.0));
}
