use std::f64::consts::PI;
use std::fs;
use std::time::{Duration, Instant};

use anyon_core::sweep::{self, read_csv, run, AxisSpec, Metadata, RunConfig, SweepParam, Task};
use anyon_core::Error;

fn theta_axis(count: usize) -> AxisSpec {
    AxisSpec { name: SweepParam::Theta, start: 0.0, stop: PI, count }
}

#[test]
fn fig1_endpoints_and_monotone() {
    let mut cfg = RunConfig { task: Task::Fig1, ..Default::default() };
    cfg.axes.push(theta_axis(201));
    let t = run(&cfg).unwrap().artifacts.remove(0).table;
    let stat = t.column("gamma_stat").unwrap();
    let nf = 1.0 / (1f64.exp() + 1.0);
    assert_eq!(stat[0], 0.0);
    assert!((stat[200] - 0.1 * nf).abs() < 1e-12);
    assert!(stat.windows(2).all(|w| w[1] >= w[0]));
}

#[test]
fn fig2_rows() {
    let mut cfg = RunConfig { task: Task::Fig2, ..Default::default() };
    cfg.axes.push(theta_axis(61));
    cfg.fig2.xis = vec![0.0, 0.7, -0.7];
    let t = run(&cfg).unwrap().artifacts.remove(0).table;
    assert_eq!(t.rows.len(), 183);
    let xi = t.column("xi").unwrap();
    let rp = t.column("re_lambda_plus").unwrap();
    let rm = t.column("re_lambda_minus").unwrap();
    let ip = t.column("im_lambda_plus").unwrap();
    let im = t.column("im_lambda_minus").unwrap();
    let xi = &xi;
    let rows = |x: f64| (0..t.rows.len()).filter(move |&k| xi[k] == x).collect::<Vec<_>>();
    for k in rows(0.0) {
        assert!((rp[k] - rm[k]).abs() < 1e-14);
    }
    for (a, b) in rows(0.7).into_iter().zip(rows(-0.7)) {
        let d = |p: (f64, f64), q: (f64, f64)| (p.0 - q.0).hypot(p.1 - q.1);
        let (x0, x1) = ((rp[a], ip[a]), (rm[a], im[a]));
        let (y0, y1) = ((rp[b], ip[b]), (rm[b], im[b]));
        let best = d(x0, y0).max(d(x1, y1)).min(d(x0, y1).max(d(x1, y0)));
        assert!(best < 1e-12, "theta row {a}: {best:e}");
    }
}

#[test]
fn sweep_rows_are_product_of_axes() {
    let mut cfg = RunConfig { task: Task::Sweep, ..Default::default() };
    cfg.axes = vec![
        theta_axis(7),
        AxisSpec { name: SweepParam::Xi, start: -1.0, stop: 1.0, count: 5 },
        AxisSpec { name: SweepParam::Beta, start: 0.5, stop: 2.0, count: 3 },
    ];
    let t = run(&cfg).unwrap().artifacts.remove(0).table;
    assert_eq!(t.rows.len(), 105);
    // last axis varies fastest
    let beta = t.column("beta").unwrap();
    assert_eq!(&beta[..3], &[0.5, 1.25, 2.0]);
    t.validate().unwrap();
}

#[test]
fn sweep_time_scales_linearly() {
    let time = |n_theta: usize| {
        let mut cfg = RunConfig { task: Task::Sweep, ..Default::default() };
        cfg.compute.threads = 1;
        cfg.axes = vec![theta_axis(n_theta), AxisSpec { name: SweepParam::Xi, start: -1.0, stop: 1.0, count: 100 }];
        (0..3)
            .map(|_| {
                let start = Instant::now();
                let out = run(&cfg).unwrap();
                assert_eq!(out.primary().rows.len(), n_theta * 100);
                start.elapsed()
            })
            .min()
            .unwrap_or(Duration::ZERO)
    };
    let small = time(200).as_secs_f64() / 2e4;
    let large = time(1000).as_secs_f64() / 1e5;
    let ratio = large / small;
    assert!((0.8..=1.2).contains(&ratio), "per-row cost ratio {ratio:.3}");
}

#[test]
fn validation_errors() {
    let bad = [
        r#"{"task":"fig1","params":{"theta":4.0}}"#,
        r#"{"task":"fig1","params":{"thetta":1.0}}"#,
        r#"{"task":"sweep","axes":[{"name":"theta","start":0,"stop":1,"count":1}]}"#,
        r#"{"task":"sweep","axes":[{"name":"kappa","start":0,"stop":1,"count":3}]}"#,
        r#"{"task":"spectrum","compute":{"cutoff":1}}"#,
        r#"{"task":"fig2","params":{"beta":0.0}}"#,
    ];
    for text in bad {
        let err = RunConfig::from_json(text).and_then(|c| c.validate().map(|_| c)).unwrap_err();
        assert!(err.is_validation(), "{text}: {err}");
    }
}

#[test]
fn fig3_artifacts() {
    let mut cfg = RunConfig { task: Task::Fig3, ..Default::default() };
    cfg.spectrum.grid = 16;
    cfg.spectrum.slice_thetas = 5;
    let out = run(&cfg).unwrap();
    let metrics = out.primary();
    assert_eq!(metrics.rows.len(), cfg.spectrum.thetas.len() * cfg.spectrum.xis.len());
    let slices = out.artifacts.iter().find(|a| a.suffix.ends_with("_slices")).unwrap();
    assert_eq!(slices.table.rows.len(), cfg.spectrum.xis.len() * 5 * 16);
    assert!(out.artifacts.iter().filter(|a| a.heatmap.is_some()).count() >= 4);
}

#[test]
fn metadata_regenerates_outputs() {
    let mut cfg = RunConfig { task: Task::Spectrum, ..Default::default() };
    cfg.spectrum.grid = 12;
    cfg.params.theta = 1.1;
    cfg.params.xi = -0.3;
    cfg.output.svg = true;
    let dir = tempfile::tempdir().unwrap();
    let files = sweep::write_outputs(&run(&cfg).unwrap(), &cfg, dir.path()).unwrap();
    let json = files.iter().find(|p| p.extension().is_some_and(|e| e == "json")).unwrap();
    let csv = files.iter().find(|p| p.extension().is_some_and(|e| e == "csv")).unwrap();
    assert!(files.iter().any(|p| p.extension().is_some_and(|e| e == "svg")));

    let meta: Metadata = serde_json::from_str(&fs::read_to_string(json).unwrap()).unwrap();
    let again: RunConfig = serde_json::from_value(meta.config.clone()).unwrap();
    assert_eq!(meta.config_sha256, sweep::output::config_hash(&again));
    let dir2 = tempfile::tempdir().unwrap();
    let files2 = sweep::write_outputs(&run(&again).unwrap(), &again, dir2.path()).unwrap();
    let csv2 = files2.iter().find(|p| p.extension().is_some_and(|e| e == "csv")).unwrap();
    assert_eq!(fs::read(csv).unwrap(), fs::read(csv2).unwrap());

    let table = read_csv(csv).unwrap();
    assert_eq!(table.rows.len(), 144);
    assert_eq!(table.headers.len(), meta.columns.len());
    let text = fs::read_to_string(csv).unwrap();
    assert!(text.lines().next().unwrap().contains("jump_basis=deformed"));
}

#[test]
fn unwritable_directory_reports_path() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("plain");
    fs::write(&file, "x").unwrap();
    let cfg = RunConfig { task: Task::Fig1, ..Default::default() };
    match sweep::write_outputs(&run(&cfg).unwrap(), &cfg, &file) {
        Err(Error::Io { path, .. }) => assert_eq!(path, file),
        other => panic!("unexpected {other:?}"),
    }
}
