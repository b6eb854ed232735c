use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyon_core::sweep::{
    self, output::to_csv, parse_bounds, parse_number, parse_range, AxisSpec, Regime, RunConfig, RunOutput,
    SweepParam, Task,
};
use anyon_core::{Conjugation, Error, FrequencyConvention, JumpBasis};
use clap::{Args, Parser, Subcommand, ValueEnum};

/// Open-system dynamics of anyonic oscillators: relaxation rates, dimer
/// normal modes, exceptional points and 2D rephasing spectra.
#[derive(Parser, Debug)]
#[command(name = "anyon", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Closed-form single-oscillator occupation and relaxation rates.
    SingleRates(Flags),
    /// Effective dimer matrix: normal modes, eigenvalues, conditioning.
    DimerRates(Flags),
    /// Locate the exceptional point in theta for each --xi.
    EpLocate(Flags),
    /// One 2D rephasing spectrum.
    Spectrum(Flags),
    /// Statistical and total coherence relaxation rates over theta.
    Fig1(Flags),
    /// Dimer mode relaxation rates over theta for several xi.
    Fig2(Flags),
    /// 2D spectra panels, stacked diagonal slices and bright-mode overlay.
    Fig3(Flags),
    /// Run a JSON configuration file.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        threads: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        svg: bool,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum OnOff {
    On,
    Off,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum RegimeArg {
    Low,
    High,
}

#[derive(Args, Debug, Default)]
struct Flags {
    /// Statistical angle(s); accepts `pi`, `pi/2`, `3*pi/4`. Comma separated
    /// lists are used by fig3.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    theta: Vec<String>,
    /// Bath correlation(s) in [-1, 1]; lists are used by fig2, fig3 and ep-locate.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    xi: Vec<String>,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long)]
    coupling: Option<f64>,
    #[arg(long)]
    omega: Option<f64>,
    /// Fock cutoff per mode.
    #[arg(long)]
    cutoff: Option<usize>,
    /// Points per axis (theta axis for fig1/fig2, detuning axes for spectra).
    #[arg(long)]
    grid: Option<usize>,
    /// `lo:hi` (or `lo:hi:count`) for the swept axis.
    #[arg(long, allow_hyphen_values = true)]
    range: Option<String>,
    #[arg(long, value_enum)]
    convention: Option<ConventionArg>,
    #[arg(long, value_enum)]
    conjugation: Option<ConjugationArg>,
    #[arg(long, value_enum)]
    jump_basis: Option<BasisArg>,
    #[arg(long, value_enum)]
    stat_dephasing: Option<OnOff>,
    /// fig2 temperature regime.
    #[arg(long, value_enum)]
    regime: Option<RegimeArg>,
    /// Waiting time for spectra.
    #[arg(long)]
    t2: Option<f64>,
    /// theta samples in the fig3 slice stack.
    #[arg(long)]
    slice_thetas: Option<usize>,
    #[arg(long)]
    threads: Option<usize>,
    /// Output directory; without it the primary table goes to stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write SVG heatmaps (needs --out).
    #[arg(long)]
    svg: bool,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ConventionArg {
    Appendix,
    Maintext,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ConjugationArg {
    Analytic,
    Modulus,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum BasisArg {
    Site,
    Deformed,
}

fn numbers(list: &[String]) -> Result<Vec<f64>, Error> {
    list.iter().map(|s| parse_number(s)).collect()
}

/// (lo, hi, optional count) from `lo:hi` or `lo:hi:count`.
fn bounds(text: &str) -> Result<(f64, f64, Option<usize>), Error> {
    if text.matches(':').count() == 2 {
        let (a, b, n) = parse_range(text)?;
        Ok((a, b, Some(n)))
    } else {
        let (a, b) = parse_bounds(text)?;
        Ok((a, b, None))
    }
}

fn build_config(task: Task, f: &Flags) -> Result<RunConfig, Error> {
    let mut c = RunConfig { task, ..Default::default() };
    let thetas = numbers(&f.theta)?;
    let xis = numbers(&f.xi)?;
    let p = &mut c.params;
    if let Some(&t) = thetas.first() {
        p.theta = t;
    }
    if let Some(&x) = xis.first() {
        p.xi = x;
    }
    if let Some(v) = f.beta {
        p.beta = v;
    }
    if let Some(v) = f.gamma {
        p.gamma = v;
    }
    if let Some(v) = f.coupling {
        p.coupling_j = v;
    }
    if let Some(v) = f.omega {
        p.omega = v;
    }
    if let Some(v) = f.cutoff {
        c.compute.cutoff = v;
    }
    if let Some(v) = f.threads {
        c.compute.threads = v;
    }
    if let Some(v) = f.convention {
        c.conventions.frequency = match v {
            ConventionArg::Appendix => FrequencyConvention::Appendix,
            ConventionArg::Maintext => FrequencyConvention::Maintext,
        };
    }
    if let Some(v) = f.conjugation {
        c.conventions.conjugation = match v {
            ConjugationArg::Analytic => Conjugation::Analytic,
            ConjugationArg::Modulus => Conjugation::Modulus,
        };
    }
    if let Some(v) = f.jump_basis {
        c.conventions.jump_basis = match v {
            BasisArg::Site => JumpBasis::Site,
            BasisArg::Deformed => JumpBasis::Deformed,
        };
    }
    if let Some(v) = f.stat_dephasing {
        c.conventions.stat_dephasing = matches!(v, OnOff::On);
    }
    if let Some(v) = f.regime {
        c.fig2.regime = match v {
            RegimeArg::Low => Regime::Low,
            RegimeArg::High => Regime::High,
        };
    }
    if let Some(v) = f.t2 {
        c.spectrum.t2 = v;
    }
    if let Some(v) = f.slice_thetas {
        c.spectrum.slice_thetas = v;
    }
    let range = f.range.as_deref().map(bounds).transpose()?;
    match task {
        Task::Fig1 | Task::Fig2 | Task::EpLocate => {
            if range.is_some() || f.grid.is_some() {
                let (start, stop, n) = range.unwrap_or((0.0, std::f64::consts::PI, None));
                let count = n.or(f.grid).unwrap_or(200);
                c.axes.push(AxisSpec { name: SweepParam::Theta, start, stop, count });
            }
            if task == Task::Fig2 && !xis.is_empty() {
                c.fig2.xis = xis;
            }
        }
        Task::Fig3 | Task::Spectrum => {
            if let Some((lo, hi, n)) = range {
                c.spectrum.range = [lo, hi];
                if let Some(n) = n {
                    c.spectrum.grid = n;
                }
            }
            if let Some(n) = f.grid {
                c.spectrum.grid = n;
            }
            if task == Task::Fig3 {
                if !thetas.is_empty() {
                    c.spectrum.thetas = thetas;
                }
                if !xis.is_empty() {
                    c.spectrum.xis = xis;
                }
            }
        }
        _ => {}
    }
    c.output.dir = f.out.clone();
    c.output.svg = f.svg;
    c.validate()?;
    Ok(c)
}

fn emit(output: &RunOutput, config: &RunConfig) -> Result<(), Error> {
    match &config.output.dir {
        Some(dir) => {
            for path in sweep::write_outputs(output, config, dir)? {
                eprintln!("wrote {}", path.display());
            }
        }
        None => {
            let bytes = to_csv(output.primary(), &config.conventions).map_err(|source| Error::Csv {
                path: "<stdout>".into(),
                source,
            })?;
            std::io::stdout()
                .write_all(&bytes)
                .map_err(|source| Error::Io { path: "<stdout>".into(), source })?;
        }
    }
    Ok(())
}

fn run_task(task: Task, flags: &Flags) -> Result<(), Error> {
    let config = build_config(task, flags)?;
    if task == Task::EpLocate && flags.xi.len() > 1 {
        // one search per requested ξ, rows concatenated in argument order
        let mut merged: Option<RunOutput> = None;
        for xi in numbers(&flags.xi)? {
            let mut c = config.clone();
            c.params.xi = xi;
            let out = sweep::run(&c)?;
            match merged.as_mut() {
                None => merged = Some(out),
                Some(m) => m.artifacts[0].table.rows.extend(out.artifacts[0].table.rows.iter().cloned()),
            }
        }
        if let Some(out) = merged {
            return emit(&out, &config);
        }
    }
    let out = sweep::run(&config)?;
    emit(&out, &config)
}

fn run_config_file(path: &PathBuf, threads: Option<usize>, out: Option<PathBuf>, svg: bool) -> Result<(), Error> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io { path: path.clone(), source })?;
    let mut config = RunConfig::from_json(&text)?;
    if let Some(t) = threads {
        config.compute.threads = t;
    }
    if out.is_some() {
        config.output.dir = out;
    }
    config.output.svg |= svg;
    let output = sweep::run(&config)?;
    emit(&output, &config)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match &cli.command {
        Command::SingleRates(f) => run_task(Task::SingleRates, f),
        Command::DimerRates(f) => run_task(Task::DimerRates, f),
        Command::EpLocate(f) => run_task(Task::EpLocate, f),
        Command::Spectrum(f) => run_task(Task::Spectrum, f),
        Command::Fig1(f) => run_task(Task::Fig1, f),
        Command::Fig2(f) => run_task(Task::Fig2, f),
        Command::Fig3(f) => run_task(Task::Fig3, f),
        Command::Sweep { config, threads, out, svg } => run_config_file(config, *threads, out.clone(), *svg),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_validation() { 1 } else { 2 })
        }
    }
}
