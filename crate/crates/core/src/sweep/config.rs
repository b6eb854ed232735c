//! Run configuration: JSON schema, defaults and the range grammar.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::dimer::WeffOptions;
use crate::error::Error;
use crate::fock::{AbsorptionOperator, GeneratorOptions};
use crate::params::{AnyonParams, Conjugation, FrequencyConvention, JumpBasis};
use crate::spectra::{Axis, GridSpec, InitialState, SpectrumOptions};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Task {
    #[default]
    Fig1,
    Fig2,
    Fig3,
    Sweep,
    SingleRates,
    DimerRates,
    EpLocate,
    Spectrum,
}

impl Task {
    pub fn as_str(self) -> &'static str {
        match self {
            Task::Fig1 => "fig1",
            Task::Fig2 => "fig2",
            Task::Fig3 => "fig3",
            Task::Sweep => "sweep",
            Task::SingleRates => "single-rates",
            Task::DimerRates => "dimer-rates",
            Task::EpLocate => "ep-locate",
            Task::Spectrum => "spectrum",
        }
    }
}

/// Sweepable parameter names.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepParam {
    Theta,
    Omega,
    Coupling,
    Gamma,
    Beta,
    Xi,
}

impl SweepParam {
    pub fn as_str(self) -> &'static str {
        match self {
            SweepParam::Theta => "theta",
            SweepParam::Omega => "omega",
            SweepParam::Coupling => "coupling",
            SweepParam::Gamma => "gamma",
            SweepParam::Beta => "beta",
            SweepParam::Xi => "xi",
        }
    }

    pub fn unit(self) -> &'static str {
        match self {
            SweepParam::Theta => "rad",
            SweepParam::Beta => "1/omega",
            SweepParam::Xi => "1",
            _ => "omega",
        }
    }

    pub fn set(self, params: &mut AnyonParams, value: f64) {
        match self {
            SweepParam::Theta => params.theta = value,
            SweepParam::Omega => params.omega = value,
            SweepParam::Coupling => params.coupling_j = value,
            SweepParam::Gamma => params.gamma = value,
            SweepParam::Beta => params.beta = value,
            SweepParam::Xi => params.xi = value,
        }
    }
}

/// One swept parameter with inclusive `start:stop:count` sampling.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AxisSpec {
    pub name: SweepParam,
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

impl AxisSpec {
    pub fn values(&self) -> Vec<f64> {
        Axis { start: self.start, stop: self.stop, count: self.count }.values()
    }

    fn validate(&self) -> Result<(), Error> {
        if self.count < 2 {
            return Err(Error::Config(format!(
                "axis `{}` needs count >= 2, got {}",
                self.name.as_str(),
                self.count
            )));
        }
        if !(self.start.is_finite() && self.stop.is_finite() && self.start < self.stop) {
            return Err(Error::Config(format!(
                "axis `{}` needs finite start < stop, got {}:{}",
                self.name.as_str(),
                self.start,
                self.stop
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Conventions {
    pub frequency: FrequencyConvention,
    pub conjugation: Conjugation,
    pub jump_basis: JumpBasis,
    pub stat_dephasing: bool,
    pub absorption: AbsorptionOperator,
}

impl Conventions {
    pub fn weff(&self) -> WeffOptions {
        WeffOptions {
            frequency: self.frequency,
            conjugation: self.conjugation,
            stat_dephasing: self.stat_dephasing,
        }
    }

    pub fn generator(&self) -> GeneratorOptions {
        GeneratorOptions {
            basis: self.jump_basis,
            frequency: self.frequency,
            conjugation: self.conjugation,
            absorption: self.absorption,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Regime {
    /// β taken from `params`.
    #[default]
    Low,
    /// β replaced by `fig2.high_temperature_beta`.
    High,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Fig2Config {
    pub regime: Regime,
    pub high_temperature_beta: f64,
    pub xis: Vec<f64>,
}

impl Default for Fig2Config {
    fn default() -> Self {
        Self { regime: Regime::Low, high_temperature_beta: 0.1, xis: vec![0.0, 0.5, 1.0] }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SpectrumConfig {
    /// Points per detuning axis.
    pub grid: usize,
    /// Detuning range [lo, hi] in units of ω.
    pub range: [f64; 2],
    pub t2: f64,
    pub initial: InitialState,
    /// (θ, ξ) panels for full 2D grids.
    pub thetas: Vec<f64>,
    pub xis: Vec<f64>,
    /// θ sampling of the stacked diagonal slices.
    pub slice_thetas: usize,
}

impl Default for SpectrumConfig {
    fn default() -> Self {
        Self {
            grid: 256,
            range: [-0.5, 0.5],
            t2: 0.0,
            initial: InitialState::Vacuum,
            thetas: vec![0.0, std::f64::consts::FRAC_PI_2],
            xis: vec![0.0, 1.0],
            slice_thetas: 33,
        }
    }
}

impl SpectrumConfig {
    pub fn grid_spec(&self) -> GridSpec {
        let mut g = GridSpec::square(self.range[0], self.range[1], self.grid);
        g.t2 = self.t2;
        g
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputConfig {
    /// Target directory; `None` prints the primary table to stdout.
    pub dir: Option<PathBuf>,
    /// File stem; defaults to the task name.
    pub stem: Option<String>,
    pub svg: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ComputeConfig {
    /// Worker threads; 0 uses all cores. Not part of the output metadata.
    pub threads: usize,
    pub cutoff: usize,
}

impl Default for ComputeConfig {
    fn default() -> Self {
        Self { threads: 0, cutoff: 2 }
    }
}

/// Full description of one run.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub task: Task,
    pub params: AnyonParams,
    pub axes: Vec<AxisSpec>,
    pub conventions: Conventions,
    pub fig2: Fig2Config,
    pub spectrum: SpectrumConfig,
    pub output: OutputConfig,
    pub compute: ComputeConfig,
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self, Error> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), Error> {
        self.params.validate()?;
        let mut seen = Vec::new();
        for axis in &self.axes {
            axis.validate()?;
            if seen.contains(&axis.name) {
                return Err(Error::Config(format!("axis `{}` given twice", axis.name.as_str())));
            }
            seen.push(axis.name);
            for v in [axis.start, axis.stop] {
                let mut p = self.params;
                axis.name.set(&mut p, v);
                p.validate()?;
            }
        }
        for &xi in &self.fig2.xis {
            self.params.with_xi(xi).validate()?;
        }
        if !(self.fig2.high_temperature_beta > 0.0) {
            return Err(Error::Config("fig2.high_temperature_beta must be > 0".into()));
        }
        let s = &self.spectrum;
        s.grid_spec().omega_tau.validate()?;
        if !(s.t2 >= 0.0 && s.t2.is_finite()) {
            return Err(Error::Config(format!("spectrum.t2 must be >= 0, got {}", s.t2)));
        }
        if s.slice_thetas < 2 {
            return Err(Error::Config("spectrum.slice_thetas must be >= 2".into()));
        }
        for &t in &s.thetas {
            self.params.with_theta(t).validate()?;
        }
        for &xi in &s.xis {
            self.params.with_xi(xi).validate()?;
        }
        let min_cutoff = match self.task {
            Task::Spectrum | Task::Fig3 => crate::spectra::MIN_SPECTRUM_CUTOFF,
            _ => 1,
        };
        if self.compute.cutoff < min_cutoff {
            return Err(Error::Config(format!(
                "compute.cutoff must be >= {min_cutoff} for {}",
                self.task.as_str()
            )));
        }
        if let Some(stem) = &self.output.stem {
            if stem.is_empty() || stem.contains(['/', '\\']) {
                return Err(Error::Config(format!("output.stem `{stem}` is not a plain file stem")));
            }
        }
        Ok(())
    }

    pub fn stem(&self) -> String {
        self.output.stem.clone().unwrap_or_else(|| self.task.as_str().to_string())
    }

    pub fn axis(&self, name: SweepParam) -> Option<&AxisSpec> {
        self.axes.iter().find(|a| a.name == name)
    }

    /// θ axis from the config, or `default_count` points over [0, π].
    pub fn theta_values(&self, default_count: usize) -> Vec<f64> {
        match self.axis(SweepParam::Theta) {
            Some(a) => a.values(),
            None => Axis { start: 0.0, stop: std::f64::consts::PI, count: default_count }.values(),
        }
    }

    pub fn spectrum_options(&self) -> SpectrumOptions {
        SpectrumOptions {
            cutoff: self.compute.cutoff,
            generator: self.conventions.generator(),
            initial: self.spectrum.initial,
        }
    }
}

/// Parse a number, also accepting `pi`, `k*pi`, `pi/k` and `k*pi/m`.
pub fn parse_number(text: &str) -> Result<f64, Error> {
    let t = text.trim();
    let bad = || Error::Config(format!("cannot parse number `{text}`"));
    if let Ok(v) = t.parse::<f64>() {
        return Ok(v);
    }
    let (num, den) = match t.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim().parse::<f64>().map_err(|_| bad())?),
        None => (t, 1.0),
    };
    let coef = match num.strip_suffix("pi") {
        Some("") => 1.0,
        Some("-") => -1.0,
        Some(c) => c.trim_end_matches('*').trim().parse::<f64>().map_err(|_| bad())?,
        None => return Err(bad()),
    };
    Ok(coef * std::f64::consts::PI / den)
}

/// `start:stop:count` with inclusive endpoints.
pub fn parse_range(text: &str) -> Result<(f64, f64, usize), Error> {
    let parts: Vec<&str> = text.split(':').collect();
    match parts.as_slice() {
        [a, b, n] => {
            let count = n
                .trim()
                .parse::<usize>()
                .map_err(|_| Error::Config(format!("bad count in range `{text}`")))?;
            if count < 2 {
                return Err(Error::Config(format!("range `{text}` needs count >= 2")));
            }
            Ok((parse_number(a)?, parse_number(b)?, count))
        }
        _ => Err(Error::Config(format!("range `{text}` is not start:stop:count"))),
    }
}

/// `lo:hi` bounds.
pub fn parse_bounds(text: &str) -> Result<(f64, f64), Error> {
    match text.split_once(':') {
        Some((a, b)) if !b.contains(':') => Ok((parse_number(a)?, parse_number(b)?)),
        _ => Err(Error::Config(format!("range `{text}` is not lo:hi"))),
    }
}
