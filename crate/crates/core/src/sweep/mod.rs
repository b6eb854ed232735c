//! Parameter sweeps and figure-data generation behind one run configuration.
//!
//! Every engine evaluates rows on the rayon pool and gathers them in index
//! order, so results do not depend on the thread count.

pub mod config;
pub mod output;
pub mod svg;

use std::collections::BTreeMap;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::dimer::{build_weff, continuity_labels, find_exceptional_point, DimerError, EffectiveMatrix};
use crate::error::Error;
use crate::spectra::{
    bright_mode_overlay, diagonal_slice, lineshape_metrics, rephasing_response, Axis, ResponseEngine,
    SpectrumGrid,
};
use crate::statistics::{gamma_full_single, gamma_stat, phase_average, thermal_occupation};

pub use config::{
    parse_bounds, parse_number, parse_range, AxisSpec, ComputeConfig, Conventions, Fig2Config,
    OutputConfig, Regime, RunConfig, SpectrumConfig, SweepParam, Task,
};
pub use output::{read_csv, write_outputs, CsvTable, Metadata};
pub use svg::{render_heatmap, Heatmap, Polyline};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ColumnKind {
    Real,
    /// 0 or 1.
    Flag,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Column {
    pub name: String,
    pub unit: String,
    pub kind: ColumnKind,
}

impl Column {
    pub fn real(name: &str, unit: &str) -> Self {
        Self { name: name.into(), unit: unit.into(), kind: ColumnKind::Real }
    }

    pub fn flag(name: &str) -> Self {
        Self { name: name.into(), unit: "1".into(), kind: ColumnKind::Flag }
    }

    /// `name [unit]` as written to CSV headers.
    pub fn header(&self) -> String {
        format!("{} [{}]", self.name, self.unit)
    }
}

/// A rectangular table of results.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub columns: Vec<Column>,
    pub rows: Vec<Vec<f64>>,
    /// Extra metadata copied into the JSON sidecar.
    pub notes: BTreeMap<String, Value>,
}

impl SweepResult {
    pub fn new(columns: Vec<Column>) -> Self {
        Self { columns, rows: Vec::new(), notes: BTreeMap::new() }
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let k = self.columns.iter().position(|c| c.name == name)?;
        Some(self.rows.iter().map(|r| r[k]).collect())
    }

    /// Row widths match the header and every value is finite.
    pub fn validate(&self) -> Result<(), Error> {
        for (r, row) in self.rows.iter().enumerate() {
            if row.len() != self.columns.len() {
                return Err(Error::Config(format!(
                    "row {r} has {} values for {} columns",
                    row.len(),
                    self.columns.len()
                )));
            }
            for (c, v) in row.iter().enumerate() {
                if !v.is_finite() {
                    return Err(Error::NonFinite { column: self.columns[c].name.clone(), row: r });
                }
            }
        }
        Ok(())
    }
}

/// One output table with an optional heatmap rendering.
#[derive(Debug, Clone)]
pub struct Artifact {
    /// Appended to the file stem (empty for the primary table).
    pub suffix: String,
    pub table: SweepResult,
    pub heatmap: Option<Heatmap>,
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    /// The first artifact is the primary table printed to stdout when no
    /// output directory is configured.
    pub artifacts: Vec<Artifact>,
}

impl RunOutput {
    fn single(table: SweepResult) -> Self {
        Self { artifacts: vec![Artifact { suffix: String::new(), table, heatmap: None }] }
    }

    pub fn primary(&self) -> &SweepResult {
        &self.artifacts[0].table
    }
}

/// Run `f` on a pool with `threads` workers (0 = rayon default).
pub fn with_threads<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> Result<T, Error> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::ThreadPool(e.to_string()))?;
    Ok(pool.install(f))
}

/// Validate the configuration and execute its task.
pub fn run(config: &RunConfig) -> Result<RunOutput, Error> {
    config.validate()?;
    let out = with_threads(config.compute.threads, || execute(config))??;
    for a in &out.artifacts {
        a.table.validate()?;
    }
    Ok(out)
}

fn execute(config: &RunConfig) -> Result<RunOutput, Error> {
    match config.task {
        Task::Fig1 => run_fig1(config).map(RunOutput::single),
        Task::Fig2 => run_fig2(config).map(RunOutput::single),
        Task::Fig3 => run_fig3(config),
        Task::Sweep => run_sweep(config).map(RunOutput::single),
        Task::SingleRates => single_rates(config).map(RunOutput::single),
        Task::DimerRates => dimer_rates(config).map(RunOutput::single),
        Task::EpLocate => ep_locate(config).map(RunOutput::single),
        Task::Spectrum => run_spectrum(config),
    }
}

/// θ, Γ_stat, Re Γ_full, Im Γ_full over the θ axis (200 points by default).
pub fn run_fig1(config: &RunConfig) -> Result<SweepResult, Error> {
    let p = config.params;
    let rows = config
        .theta_values(200)
        .par_iter()
        .map(|&theta| {
            let q = p.with_theta(theta);
            let full = gamma_full_single(&q)?;
            Ok(vec![theta, gamma_stat(theta, q.z(), q.gamma), full.decay(), full.shift()])
        })
        .collect::<Result<Vec<_>, Error>>()?;
    let mut result = SweepResult::new(vec![
        Column::real("theta", "rad"),
        Column::real("gamma_stat", "omega"),
        Column::real("gamma_full_re", "omega"),
        Column::real("gamma_full_im", "omega"),
    ]);
    result.rows = rows;
    Ok(result)
}

fn fig2_columns() -> Vec<Column> {
    vec![
        Column::real("theta", "rad"),
        Column::real("xi", "1"),
        Column::real("re_lambda_plus", "omega"),
        Column::real("re_lambda_minus", "omega"),
        Column::real("im_lambda_plus", "omega"),
        Column::real("im_lambda_minus", "omega"),
        Column::real("gap", "omega"),
        Column::flag("ep"),
    ]
}

/// Branch-continuous W_eff eigenvalues over θ for each ξ, with the grid
/// point nearest a located exceptional point flagged.
pub fn run_fig2(config: &RunConfig) -> Result<SweepResult, Error> {
    let mut base = config.params;
    if config.fig2.regime == Regime::High {
        base.beta = config.fig2.high_temperature_beta;
    }
    let opts = config.conventions.weff();
    let thetas = config.theta_values(200);
    let xis = match config.axis(SweepParam::Xi) {
        Some(a) => a.values(),
        None => config.fig2.xis.clone(),
    };
    let mut result = SweepResult::new(fig2_columns());
    let mut ep_thetas = Vec::new();
    for &xi in &xis {
        let p = base.with_xi(xi);
        let mats = thetas
            .par_iter()
            .map(|&t| build_weff(&p.with_theta(t), &opts))
            .collect::<Result<Vec<EffectiveMatrix>, _>>()?;
        let pairs: Vec<[Complex64; 2]> = mats.iter().map(|m| m.eigenvalues).collect();
        let swaps = continuity_labels(&pairs);
        let ep = match find_exceptional_point(&p, (thetas[0], thetas[thetas.len() - 1]), &opts) {
            Ok(ep) => Some(ep.theta),
            Err(DimerError::NoExceptionalPoint { .. }) => None,
            Err(e) => return Err(e.into()),
        };
        ep_thetas.push(json!({ "xi": xi, "theta": ep }));
        let nearest = ep.map(|t| {
            (0..thetas.len())
                .min_by(|&a, &b| (thetas[a] - t).abs().total_cmp(&(thetas[b] - t).abs()))
                .unwrap_or(0)
        });
        let mut flipped = false;
        for (k, (m, swap)) in mats.iter().zip(swaps).enumerate() {
            flipped ^= swap;
            let (a, b) = if flipped { (1, 0) } else { (0, 1) };
            let (la, lb) = (m.eigenvalues[a], m.eigenvalues[b]);
            result.rows.push(vec![
                thetas[k],
                xi,
                la.re,
                lb.re,
                la.im,
                lb.im,
                m.gap(),
                if nearest == Some(k) { 1.0 } else { 0.0 },
            ]);
        }
    }
    result.notes.insert("beta".into(), json!(base.beta));
    result.notes.insert("regime".into(), json!(config.fig2.regime));
    result.notes.insert("exceptional_points".into(), Value::Array(ep_thetas));
    Ok(result)
}

const CLOSED_FORM_OUTPUTS: [(&str, &str); 8] = [
    ("gamma_stat", "omega"),
    ("gamma_full_re", "omega"),
    ("gamma_full_im", "omega"),
    ("re_lambda_plus", "omega"),
    ("re_lambda_minus", "omega"),
    ("im_lambda_plus", "omega"),
    ("im_lambda_minus", "omega"),
    ("gap", "omega"),
];

/// Cartesian product of the configured axes (last axis fastest) with the
/// closed-form single-mode rates and W_eff eigenvalues per row.
pub fn run_sweep(config: &RunConfig) -> Result<SweepResult, Error> {
    if config.axes.is_empty() {
        return Err(Error::Config("sweep needs at least one axis".into()));
    }
    let values: Vec<Vec<f64>> = config.axes.iter().map(|a| a.values()).collect();
    let total: usize = values.iter().map(Vec::len).product();
    let opts = config.conventions.weff();
    let rows = (0..total)
        .into_par_iter()
        .map(|index| {
            let mut rem = index;
            let mut coords = vec![0.0; values.len()];
            let mut p = config.params;
            for (k, axis) in values.iter().enumerate().rev() {
                coords[k] = axis[rem % axis.len()];
                rem /= axis.len();
                config.axes[k].name.set(&mut p, coords[k]);
            }
            let full = gamma_full_single(&p)?;
            let w = build_weff(&p, &opts)?;
            coords.extend([
                gamma_stat(p.theta, p.z(), p.gamma),
                full.decay(),
                full.shift(),
                w.eigenvalues[0].re,
                w.eigenvalues[1].re,
                w.eigenvalues[0].im,
                w.eigenvalues[1].im,
                w.gap(),
            ]);
            Ok(coords)
        })
        .collect::<Result<Vec<_>, Error>>()?;
    let mut columns: Vec<Column> =
        config.axes.iter().map(|a| Column::real(a.name.as_str(), a.name.unit())).collect();
    columns.extend(CLOSED_FORM_OUTPUTS.iter().map(|(n, u)| Column::real(n, u)));
    let mut result = SweepResult::new(columns);
    result.rows = rows;
    Ok(result)
}

/// Closed-form single-oscillator quantities at the configured point.
pub fn single_rates(config: &RunConfig) -> Result<SweepResult, Error> {
    let p = config.params;
    let n = thermal_occupation(p.theta, p.beta, p.omega)?;
    let avg = phase_average(p.theta, p.z());
    let full = gamma_full_single(&p)?;
    let mut result = SweepResult::new(vec![
        Column::real("theta", "rad"),
        Column::real("beta_omega", "1"),
        Column::real("gamma", "omega"),
        Column::real("occupation_re", "1"),
        Column::real("occupation_im", "1"),
        Column::real("phase_average_re", "1"),
        Column::real("phase_average_im", "1"),
        Column::real("gamma_stat", "omega"),
        Column::real("gamma_full_re", "omega"),
        Column::real("gamma_full_im", "omega"),
    ]);
    result.rows.push(vec![
        p.theta,
        p.beta_omega(),
        p.gamma,
        n.re,
        n.im,
        avg.re,
        avg.im,
        gamma_stat(p.theta, p.z(), p.gamma),
        full.decay(),
        full.shift(),
    ]);
    Ok(result)
}

/// W_eff at the configured point: frequencies, eigenvalues, decay rates and
/// conditioning.
pub fn dimer_rates(config: &RunConfig) -> Result<SweepResult, Error> {
    let p = config.params;
    let w = build_weff(&p, &config.conventions.weff())?;
    let mut result = SweepResult::new(vec![
        Column::real("theta", "rad"),
        Column::real("xi", "1"),
        Column::real("omega_plus", "omega"),
        Column::real("omega_minus", "omega"),
        Column::real("re_lambda_plus", "omega"),
        Column::real("im_lambda_plus", "omega"),
        Column::real("re_lambda_minus", "omega"),
        Column::real("im_lambda_minus", "omega"),
        Column::real("decay_plus", "omega"),
        Column::real("decay_minus", "omega"),
        Column::real("gap", "omega"),
        Column::real("inverse_condition", "1"),
        Column::flag("near_defective"),
    ]);
    let [lp, lm] = w.eigenvalues;
    result.rows.push(vec![
        p.theta,
        p.xi,
        w.omega_plus,
        w.omega_minus,
        lp.re,
        lp.im,
        lm.re,
        lm.im,
        -lp.re,
        -lm.re,
        w.gap(),
        if w.condition.is_finite() { 1.0 / w.condition } else { 0.0 },
        if w.near_defective() { 1.0 } else { 0.0 },
    ]);
    Ok(result)
}

/// Exceptional-point search over θ for each ξ of the ξ axis (or the
/// configured ξ). The θ bracket comes from the θ axis, default [0, π].
pub fn ep_locate(config: &RunConfig) -> Result<SweepResult, Error> {
    let xis = match config.axis(SweepParam::Xi) {
        Some(a) => a.values(),
        None => vec![config.params.xi],
    };
    let bracket = match config.axis(SweepParam::Theta) {
        Some(a) => (a.start, a.stop),
        None => (0.0, std::f64::consts::PI),
    };
    let opts = config.conventions.weff();
    let rows = xis
        .par_iter()
        .map(|&xi| {
            match find_exceptional_point(&config.params.with_xi(xi), bracket, &opts) {
                Ok(ep) => Ok(vec![xi, ep.theta, ep.gap, 1.0]),
                Err(DimerError::NoExceptionalPoint { theta, gap, .. }) => Ok(vec![xi, theta, gap, 0.0]),
                Err(e) => Err(Error::from(e)),
            }
        })
        .collect::<Result<Vec<_>, Error>>()?;
    let mut result = SweepResult::new(vec![
        Column::real("xi", "1"),
        Column::real("theta_min_gap", "rad"),
        Column::real("gap", "omega"),
        Column::flag("found"),
    ]);
    result.rows = rows;
    result.notes.insert("gap_threshold".into(), json!(crate::dimer::EP_GAP_FACTOR * config.params.gamma));
    Ok(result)
}

fn grid_table(grid: &SpectrumGrid) -> SweepResult {
    let scale = grid.max_abs();
    let mut result = SweepResult::new(vec![
        Column::real("omega_tau", "omega"),
        Column::real("omega_t", "omega"),
        Column::real("response_re", "arb"),
        Column::real("response_im", "arb"),
        Column::real("response_abs", "arb"),
        Column::real("response_re_normalized", "1"),
    ]);
    for (i, &tau) in grid.omega_tau.iter().enumerate() {
        for (j, &t) in grid.omega_t.iter().enumerate() {
            let v = grid.values[(i, j)];
            let norm = if scale > 0.0 { v.re / scale } else { 0.0 };
            result.rows.push(vec![tau, t, v.re, v.im, v.norm(), norm]);
        }
    }
    result.notes.insert("theta".into(), json!(grid.params.theta));
    result.notes.insert("xi".into(), json!(grid.params.xi));
    result.notes.insert("t2".into(), json!(grid.t2));
    result.notes.insert("max_abs".into(), json!(scale));
    result.notes.insert("cutoff".into(), json!(grid.options.cutoff));
    result.notes.insert("initial_state".into(), json!(grid.options.initial));
    result.notes.insert(
        "axes".into(),
        json!({
            "rows": "omega_tau: first (conjugate) interval, detuning from omega",
            "columns": "omega_t: last interval, detuning from omega",
        }),
    );
    result
}

fn grid_heatmap(grid: &SpectrumGrid, overlay: Option<[f64; 2]>) -> Heatmap {
    let scale = grid.max_abs();
    let values = (0..grid.omega_tau.len())
        .map(|i| {
            (0..grid.omega_t.len())
                .map(|j| if scale > 0.0 { grid.values[(i, j)].re / scale } else { 0.0 })
                .collect()
        })
        .collect();
    let lo = grid.omega_t[0];
    let hi = grid.omega_t[grid.omega_t.len() - 1];
    let mut overlays = vec![Polyline { label: "diagonal".into(), points: vec![(lo, lo), (hi, hi)] }];
    if let Some(branches) = overlay {
        for (k, d) in branches.iter().enumerate() {
            overlays.push(Polyline {
                label: format!("branch {k}"),
                points: vec![(*d, grid.omega_tau[0]), (*d, grid.omega_tau[grid.omega_tau.len() - 1])],
            });
        }
    }
    Heatmap {
        title: format!(
            "Re R  theta={:.4} xi={:.3} t2={}",
            grid.params.theta, grid.params.xi, grid.t2
        ),
        x_label: "omega_t - omega".into(),
        y_label: "omega_tau - omega".into(),
        x: grid.omega_t.clone(),
        y: grid.omega_tau.clone(),
        values,
        overlays,
    }
}

/// Single 2D spectrum at the configured parameters.
pub fn run_spectrum(config: &RunConfig) -> Result<RunOutput, Error> {
    let grid = rephasing_response(&config.params, &config.spectrum_options(), &config.spectrum.grid_spec())?;
    let overlay = bright_mode_overlay(&[config.params.theta], &config.params, &config.conventions.weff())?;
    let mut table = grid_table(&grid);
    table.notes.insert("bright_detuning".into(), json!(overlay[0].bright_detuning()));
    Ok(RunOutput {
        artifacts: vec![Artifact {
            suffix: String::new(),
            heatmap: Some(grid_heatmap(&grid, Some(overlay[0].detunings))),
            table,
        }],
    })
}

/// 2D grids per (θ, ξ) panel, lineshape metrics, stacked diagonal slices
/// over θ for each ξ, and the bright-mode overlay.
pub fn run_fig3(config: &RunConfig) -> Result<RunOutput, Error> {
    let sc = &config.spectrum;
    let opts = config.spectrum_options();
    let weff_opts = config.conventions.weff();
    let spec = sc.grid_spec();
    let mut metrics = SweepResult::new(vec![
        Column::real("theta", "rad"),
        Column::real("xi", "1"),
        Column::real("peak_detuning", "omega"),
        Column::real("asymmetry", "1"),
        Column::real("dispersiveness", "1"),
        Column::real("bright_detuning", "omega"),
    ]);
    let mut artifacts = Vec::new();
    let mut panel = 0;
    for &xi in &sc.xis {
        for &theta in &sc.thetas {
            let p = config.params.with_theta(theta).with_xi(xi);
            let grid = rephasing_response(&p, &opts, &spec)?;
            let m = lineshape_metrics(&diagonal_slice(&grid)?)?;
            let overlay = bright_mode_overlay(&[theta], &p, &weff_opts)?;
            metrics.rows.push(vec![
                theta,
                xi,
                m.peak_detuning,
                m.asymmetry,
                m.dispersiveness,
                overlay[0].bright_detuning(),
            ]);
            artifacts.push(Artifact {
                suffix: format!("_grid{panel}"),
                heatmap: Some(grid_heatmap(&grid, Some(overlay[0].detunings))),
                table: grid_table(&grid),
            });
            panel += 1;
        }
    }

    let axis = spec.omega_tau.values();
    let slice_thetas = Axis { start: 0.0, stop: std::f64::consts::PI, count: sc.slice_thetas }.values();
    let mut slices = SweepResult::new(vec![
        Column::real("xi", "1"),
        Column::real("theta", "rad"),
        Column::real("detuning", "omega"),
        Column::real("response_re", "arb"),
        Column::real("response_im", "arb"),
        Column::real("response_abs", "arb"),
    ]);
    let mut overlay_table = SweepResult::new(vec![
        Column::real("xi", "1"),
        Column::real("theta", "rad"),
        Column::real("branch_a_detuning", "omega"),
        Column::real("branch_b_detuning", "omega"),
        Column::real("bright_detuning", "omega"),
        Column::flag("bright_is_a"),
    ]);
    let mut stack_maps = Vec::new();
    for (k, &xi) in sc.xis.iter().enumerate() {
        let p = config.params.with_xi(xi);
        let stack = slice_thetas
            .iter()
            .map(|&theta| {
                let engine = ResponseEngine::new(&p.with_theta(theta), &opts)?;
                engine.evaluate_diagonal(&axis, spec.t2)
            })
            .collect::<Result<Vec<_>, _>>()?;
        let overlay = bright_mode_overlay(&slice_thetas, &p, &weff_opts)?;
        let scale = stack
            .iter()
            .flat_map(|row| row.iter().map(|z| z.norm()))
            .fold(0.0, f64::max);
        for (theta, row) in slice_thetas.iter().zip(&stack) {
            for (d, v) in axis.iter().zip(row) {
                slices.rows.push(vec![xi, *theta, *d, v.re, v.im, v.norm()]);
            }
        }
        for pt in &overlay {
            overlay_table.rows.push(vec![
                xi,
                pt.theta,
                pt.detunings[0],
                pt.detunings[1],
                pt.bright_detuning(),
                if pt.bright == 0 { 1.0 } else { 0.0 },
            ]);
        }
        let branch = |b: usize| Polyline {
            label: format!("branch {b}"),
            points: overlay.iter().map(|pt| (pt.detunings[b], pt.theta)).collect(),
        };
        stack_maps.push(Artifact {
            suffix: format!("_slices{k}"),
            table: SweepResult::new(Vec::new()),
            heatmap: Some(Heatmap {
                title: format!("Re R on the diagonal, xi={xi:.3}"),
                x_label: "detuning".into(),
                y_label: "theta".into(),
                x: axis.clone(),
                y: slice_thetas.clone(),
                values: stack
                    .iter()
                    .map(|row| row.iter().map(|z| if scale > 0.0 { z.re / scale } else { 0.0 }).collect())
                    .collect(),
                overlays: vec![branch(0), branch(1)],
            }),
        });
    }

    let mut out = vec![Artifact { suffix: String::new(), table: metrics, heatmap: None }];
    out.push(Artifact { suffix: "_slices".into(), table: slices, heatmap: None });
    out.push(Artifact { suffix: "_overlay".into(), table: overlay_table, heatmap: None });
    out.extend(artifacts);
    out.extend(stack_maps);
    Ok(RunOutput { artifacts: out })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn cfg(task: Task) -> RunConfig {
        RunConfig { task, ..Default::default() }
    }

    #[test]
    fn fig1_shape_and_endpoints() {
        let r = run(&cfg(Task::Fig1)).unwrap();
        let t = r.primary();
        assert_eq!(t.rows.len(), 200);
        let stat = t.column("gamma_stat").unwrap();
        assert_eq!(stat[0], 0.0);
        let nf = 1.0 / (1f64.exp() + 1.0);
        assert!((stat[199] - 0.1 * nf).abs() < 1e-15);
        assert!(stat.windows(2).all(|w| w[1] >= w[0]));
    }

    #[test]
    fn fig2_structure() {
        let mut c = cfg(Task::Fig2);
        c.fig2.xis = vec![0.0, 1.0, 0.7, -0.7];
        let t = run(&c).unwrap().artifacts.remove(0).table;
        assert_eq!(t.rows.len(), 800);
        for row in t.rows.iter().filter(|r| r[1] == 0.0) {
            assert!((row[2] - row[3]).abs() < 1e-15);
        }
        let flagged: Vec<&Vec<f64>> = t.rows.iter().filter(|r| r[7] == 1.0).collect();
        // every ξ ≠ 0 meets g|ξ| = J cos(θ/2) somewhere below π
        assert_eq!(flagged.len(), 3);
        assert!(flagged.iter().all(|r| r[1] != 0.0 && r[0] > 2.0));
        let plus: Vec<&Vec<f64>> = t.rows.iter().filter(|r| r[1] == 0.7).collect();
        let minus: Vec<&Vec<f64>> = t.rows.iter().filter(|r| r[1] == -0.7).collect();
        for (a, b) in plus.iter().zip(&minus) {
            let mut ea = [a[2], a[3]];
            let mut eb = [b[2], b[3]];
            ea.sort_by(f64::total_cmp);
            eb.sort_by(f64::total_cmp);
            assert!((ea[0] - eb[0]).abs() < 1e-12 && (ea[1] - eb[1]).abs() < 1e-12);
        }
    }

    #[test]
    fn fig2_high_temperature_uses_its_beta() {
        let mut c = cfg(Task::Fig2);
        c.fig2.regime = Regime::High;
        c.fig2.xis = vec![0.0];
        let t = run(&c).unwrap();
        assert_eq!(t.primary().notes["beta"], json!(0.1));
    }

    #[test]
    fn sweep_row_count_and_order() {
        let mut c = cfg(Task::Sweep);
        c.axes = vec![
            AxisSpec { name: SweepParam::Theta, start: 0.0, stop: PI, count: 4 },
            AxisSpec { name: SweepParam::Xi, start: -1.0, stop: 1.0, count: 3 },
        ];
        let t = run(&c).unwrap().artifacts.remove(0).table;
        assert_eq!(t.rows.len(), 12);
        assert_eq!(t.rows[1][0], 0.0);
        assert_eq!(t.rows[1][1], 0.0);
        assert_eq!(t.rows[3][0], PI / 3.0);
        assert!(run(&cfg(Task::Sweep)).is_err());
    }

    #[test]
    fn single_point_tasks() {
        let t = run(&cfg(Task::SingleRates)).unwrap();
        assert!((t.primary().column("gamma_full_re").unwrap()[0] - 0.108_197_670_686_932_64).abs() < 1e-15);
        let mut c = cfg(Task::DimerRates);
        c.params = c.params.with_theta(PI).with_xi(1.0);
        let t = run(&c).unwrap();
        assert!(t.primary().rows[0].iter().all(|v| v.is_finite()));
        let mut c = cfg(Task::EpLocate);
        c.params.xi = 1.0;
        let t = run(&c).unwrap();
        assert_eq!(t.primary().column("found").unwrap(), vec![1.0]);
    }

    #[test]
    fn non_finite_rejected() {
        let mut t = SweepResult::new(vec![Column::real("x", "1")]);
        t.rows.push(vec![f64::NAN]);
        assert!(matches!(t.validate(), Err(Error::NonFinite { .. })));
    }

    #[test]
    fn small_fig3() {
        let mut c = cfg(Task::Fig3);
        c.spectrum.grid = 16;
        c.spectrum.slice_thetas = 3;
        let out = run(&c).unwrap();
        // metrics, slices, overlay, 4 grids, 2 stacks
        assert_eq!(out.artifacts.len(), 9);
        assert_eq!(out.primary().rows.len(), 4);
        assert_eq!(out.artifacts[1].table.rows.len(), 2 * 3 * 16);
        assert_eq!(out.artifacts[3].table.rows.len(), 256);
    }
}
