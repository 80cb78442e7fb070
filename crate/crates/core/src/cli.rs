//! The `ccl` command line.
//!
//! Settings resolve in the order: command-line flag, `CCL_*` environment
//! variable, TOML config file (`--config` or `CCL_CONFIG`), built-in default.
//! A config file holds any of the keys
//!
//! ```toml
//! format = "json"
//! grid = [0.01, 0.02, 0.04]
//! samples = 500000
//! batch = 100000
//! seed = 2026
//! lambda = 0.5
//! p0 = 0.625
//! experiment = "small-noise"
//! bind = "127.0.0.1:8080"
//! sample_cap = 1000000
//! ```

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::bounds::{bound_report, BoundReport};
use crate::catalog::catalog_get;
use crate::descriptors::{report, screen, Candidate, PowerReference, ReliabilityReport, ScreenResult};
use crate::detector::{sweep, McConfig, SweepPoint};
use crate::error::Error;
use crate::geometry::Constellation;
use crate::io::{fmt_f64, load_constellation, to_json_string};
use crate::reproduce::{reproduce, Experiment};
use crate::server::{self, ServerConfig, DEFAULT_BIND, DEFAULT_SAMPLE_CAP};

pub const DEFAULT_REPRODUCE_DIR: &str = "ccl-reproduce";

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Usage(#[from] clap::Error),
    #[error(transparent)]
    Lib(#[from] Error),
    #[error("config file {path}: {message}")]
    Config { path: PathBuf, message: String },
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Table,
    Csv,
    Json,
}

#[derive(Debug, Parser)]
#[command(name = "ccl", version, about = "Constellation reliability under isotropic Cauchy noise")]
pub struct Cli {
    /// TOML file supplying defaults for any flag.
    #[arg(long, global = true, env = "CCL_CONFIG")]
    pub config: Option<PathBuf>,
    #[arg(long, global = true, env = "CCL_FORMAT", value_enum)]
    pub format: Option<Format>,
    /// Output file; for `reproduce`, the directory receiving the CSV files.
    #[arg(long, global = true, env = "CCL_OUT")]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Angular robustness, burdens, and collapse flags.
    Analyze {
        /// Catalog name or constellation file.
        constellation: String,
    },
    /// Union bound and small-noise asymptote over a noise grid.
    Bound {
        constellation: String,
        #[command(flatten)]
        grid: GridArgs,
    },
    /// Monte Carlo error probabilities with 95% Wilson intervals.
    Mc {
        constellation: String,
        #[command(flatten)]
        grid: GridArgs,
        #[command(flatten)]
        mc: McArgs,
    },
    /// Reject collapsing candidates and rank the rest by the joint objective.
    Screen {
        #[arg(required = true)]
        candidates: Vec<String>,
        #[arg(long, env = "CCL_LAMBDA")]
        lambda: Option<f64>,
        /// Common reference power; each candidate's own power if unset.
        #[arg(long, env = "CCL_P0")]
        p0: Option<f64>,
    },
    /// Regenerate the validation and comparison CSV tables.
    Reproduce {
        /// One of small-noise, large-noise, pentagon-cross, rect-kite; all if unset.
        #[arg(long, env = "CCL_EXPERIMENT")]
        experiment: Option<Experiment>,
        #[command(flatten)]
        mc: McArgs,
    },
    /// Run the HTTP analysis service.
    Serve {
        #[arg(long, env = "CCL_BIND")]
        bind: Option<String>,
        #[arg(long, env = "CCL_SAMPLE_CAP")]
        sample_cap: Option<usize>,
    },
}

#[derive(Debug, Args)]
pub struct GridArgs {
    /// Noise scale, or comma-separated increasing grid.
    #[arg(long = "gamma", visible_alias = "grid", env = "CCL_GRID", value_delimiter = ',')]
    pub gamma: Option<Vec<f64>>,
}

#[derive(Debug, Args)]
pub struct McArgs {
    #[arg(long, env = "CCL_SAMPLES")]
    pub samples: Option<usize>,
    #[arg(long, env = "CCL_BATCH")]
    pub batch: Option<usize>,
    #[arg(long, env = "CCL_SEED")]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub format: Option<Format>,
    pub out: Option<PathBuf>,
    pub grid: Option<Vec<f64>>,
    pub samples: Option<usize>,
    pub batch: Option<usize>,
    pub seed: Option<u64>,
    pub lambda: Option<f64>,
    pub p0: Option<f64>,
    pub experiment: Option<Experiment>,
    pub bind: Option<String>,
    pub sample_cap: Option<usize>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config { path: path.to_path_buf(), message: e.to_string() })?;
        toml::from_str(&text).map_err(|e| CliError::Config { path: path.to_path_buf(), message: e.to_string() })
    }
}

/// Fully resolved inputs of one command.
#[derive(Debug, Clone, PartialEq)]
pub struct RunSpec {
    pub format: Format,
    pub out: Option<PathBuf>,
    pub grid: Vec<f64>,
    pub mc: McConfig,
    pub lambda: f64,
    pub p0: Option<f64>,
    pub experiments: Vec<Experiment>,
    pub bind: String,
    pub sample_cap: usize,
}

impl RunSpec {
    fn resolve(cli: &Cli, file: &FileConfig) -> Result<Self, CliError> {
        let d = McConfig::default();
        let (grid, mc, lambda, p0, experiment, bind, sample_cap) = match &cli.command {
            Command::Bound { grid, .. } => (grid.gamma.clone(), None, None, None, None, None, None),
            Command::Mc { grid, mc, .. } => (grid.gamma.clone(), Some(mc), None, None, None, None, None),
            Command::Screen { lambda, p0, .. } => (None, None, *lambda, *p0, None, None, None),
            Command::Reproduce { experiment, mc } => (None, Some(mc), None, None, *experiment, None, None),
            Command::Serve { bind, sample_cap } => (None, None, None, None, None, bind.clone(), *sample_cap),
            Command::Analyze { .. } => (None, None, None, None, None, None, None),
        };
        let mc = McConfig {
            n_samples: mc.and_then(|m| m.samples).or(file.samples).unwrap_or(d.n_samples),
            batch_size: mc.and_then(|m| m.batch).or(file.batch).unwrap_or(d.batch_size),
            seed: mc.and_then(|m| m.seed).or(file.seed).unwrap_or(d.seed),
            priors: None,
        };
        let grid = grid.or_else(|| file.grid.clone()).unwrap_or_default();
        let spec = Self {
            format: cli.format.or(file.format).unwrap_or_default(),
            out: cli.out.clone().or_else(|| file.out.clone()),
            grid,
            mc,
            lambda: lambda.or(file.lambda).unwrap_or(0.5),
            p0: p0.or(file.p0),
            experiments: match experiment.or(file.experiment) {
                Some(e) => vec![e],
                None => Experiment::ALL.to_vec(),
            },
            bind: bind.or_else(|| file.bind.clone()).unwrap_or_else(|| DEFAULT_BIND.to_string()),
            sample_cap: sample_cap.or(file.sample_cap).unwrap_or(DEFAULT_SAMPLE_CAP),
        };
        if matches!(cli.command, Command::Bound { .. } | Command::Mc { .. }) {
            check_grid(&spec.grid)?;
        }
        if matches!(cli.command, Command::Mc { .. } | Command::Reproduce { .. }) {
            spec.mc.validate()?;
        }
        Ok(spec)
    }
}

/// Grid values must be positive, finite, and strictly increasing.
pub fn check_grid(grid: &[f64]) -> Result<(), Error> {
    if grid.is_empty() {
        return Err(Error::EmptyGrid);
    }
    if grid.iter().any(|g| !(g.is_finite() && *g > 0.0)) || grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidGrid);
    }
    Ok(())
}

/// Looks `arg` up in the catalog, then as a file path.
pub fn resolve_constellation(arg: &str) -> Result<(String, Constellation), Error> {
    if let Ok(e) = catalog_get(arg) {
        return Ok((e.name.to_string(), e.constellation));
    }
    let path = Path::new(arg);
    if path.exists() {
        let (name, c) = load_constellation(path)?;
        let id = name
            .unwrap_or_else(|| path.file_stem().map_or_else(|| arg.to_string(), |s| s.to_string_lossy().into_owned()));
        return Ok((id, c));
    }
    Err(Error::UnknownName(arg.to_string()))
}

/// Parses `args` (program name first) and runs the command, writing results to
/// `stdout` unless `--out` is given.
pub fn run<I, T>(args: I, stdout: &mut dyn Write) -> Result<(), CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = Cli::try_parse_from(args)?;
    let file = match &cli.config {
        Some(p) => FileConfig::load(p)?,
        None => FileConfig::default(),
    };
    let spec = RunSpec::resolve(&cli, &file)?;
    match &cli.command {
        Command::Analyze { constellation } => {
            let (_, c) = resolve_constellation(constellation)?;
            emit(&spec, stdout, &analyze_output(&c, spec.format)?)
        }
        Command::Bound { constellation, .. } => {
            let (_, c) = resolve_constellation(constellation)?;
            emit(&spec, stdout, &bound_output(&c, &spec.grid, spec.format)?)
        }
        Command::Mc { constellation, .. } => {
            let (_, c) = resolve_constellation(constellation)?;
            let points = sweep(&c, &spec.grid, &spec.mc)?;
            emit(&spec, stdout, &mc_output(&c, &points, spec.format))
        }
        Command::Screen { candidates, .. } => {
            let cands = candidates
                .iter()
                .map(|a| resolve_constellation(a).map(|(id, c)| Candidate::new(id, c)))
                .collect::<Result<Vec<_>, _>>()?;
            let p0 = spec.p0.map_or(PowerReference::Own, PowerReference::Common);
            let r = screen(&cands, spec.lambda, &p0)?;
            emit(&spec, stdout, &screen_output(&r, spec.format))
        }
        Command::Reproduce { .. } => {
            let dir = spec.out.clone().unwrap_or_else(|| PathBuf::from(DEFAULT_REPRODUCE_DIR));
            let mut written = Vec::new();
            for e in &spec.experiments {
                written.extend(reproduce(*e, &spec.mc)?.write_csv(&dir)?);
            }
            let names: Vec<String> = written.iter().map(|p| p.display().to_string()).collect();
            let text = match spec.format {
                Format::Json => to_json_string(&names),
                _ => names.iter().map(|n| format!("{n}\n")).collect(),
            };
            stdout.write_all(text.as_bytes())?;
            Ok(())
        }
        Command::Serve { .. } => {
            let rt = tokio::runtime::Runtime::new()?;
            writeln!(stdout, "listening on {}", spec.bind)?;
            stdout.flush()?;
            rt.block_on(server::serve(&spec.bind, ServerConfig { sample_cap: spec.sample_cap }))?;
            Ok(())
        }
    }
}

/// Entry point of the `ccl` binary.
pub fn main_entry() -> ExitCode {
    let mut stdout = std::io::stdout().lock();
    match run(std::env::args_os(), &mut stdout) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(e)) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            ExitCode::from(code)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn emit(spec: &RunSpec, stdout: &mut dyn Write, text: &str) -> Result<(), CliError> {
    match &spec.out {
        Some(path) => std::fs::write(path, text)?,
        None => stdout.write_all(text.as_bytes())?,
    }
    Ok(())
}

/// Rows of strings rendered as aligned columns or CSV.
struct Table {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Table {
    fn new(header: Vec<String>) -> Self {
        Self { header, rows: Vec::new() }
    }

    fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => {
                let mut out = String::new();
                for r in std::iter::once(&self.header).chain(&self.rows) {
                    out.push_str(&r.join(","));
                    out.push('\n');
                }
                out
            }
            _ => {
                let widths: Vec<usize> = (0..self.header.len())
                    .map(|k| std::iter::once(&self.header).chain(&self.rows).map(|r| r[k].len()).max().unwrap_or(0))
                    .collect();
                let mut out = String::new();
                for r in std::iter::once(&self.header).chain(&self.rows) {
                    let line: Vec<String> = r.iter().zip(&widths).map(|(s, w)| format!("{s:<w$}")).collect();
                    out.push_str(line.join("  ").trim_end());
                    out.push('\n');
                }
                out
            }
        }
    }
}

fn f(x: f64) -> String {
    fmt_f64(x)
}

fn header(names: &[&str]) -> Vec<String> {
    names.iter().map(|s| s.to_string()).collect()
}

pub fn analyze_output(c: &Constellation, format: Format) -> Result<String, Error> {
    let r: ReliabilityReport = report(c)?;
    if format == Format::Json {
        return Ok(to_json_string(&r));
    }
    let mut t = Table::new(header(&["label", "a_i", "a_std_error", "b_i", "collapse", "large_noise_error_limit"]));
    for i in 0..r.len() {
        t.rows.push(vec![
            r.labels[i].clone(),
            f(r.a_i[i]),
            f(r.a_std_error[i]),
            f(r.b_i[i]),
            r.collapse[i].to_string(),
            f(r.large_noise_error_limit[i]),
        ]);
    }
    let mut out = t.render(format);
    if format == Format::Table {
        for (k, v) in [
            ("a_min", r.a_min),
            ("b_max", r.b_max),
            ("normalized_b_max", r.normalized_b_max),
            ("avg_large_noise_correct_limit", r.avg_large_noise_correct_limit),
            ("power", r.power),
            ("d_min", r.d_min),
        ] {
            out.push_str(&format!("{k} = {}\n", f(v)));
        }
    }
    Ok(out)
}

pub fn bound_output(c: &Constellation, grid: &[f64], format: Format) -> Result<String, Error> {
    let reports = grid.iter().map(|&g| bound_report(c, g)).collect::<Result<Vec<BoundReport>, _>>()?;
    if format == Format::Json {
        return Ok(to_json_string(&reports));
    }
    let mut h = header(&["gamma", "avg_union_bound", "avg_asymptotic"]);
    for i in 0..c.len() {
        let l = c.label(i);
        h.push(format!("union_bound_{l}"));
        h.push(format!("asymptotic_{l}"));
    }
    let mut t = Table::new(h);
    for r in &reports {
        let mut row = vec![f(r.gamma), f(r.avg_exact_bound), f(r.avg_asymptotic.value)];
        for (b, a) in r.per_symbol_exact_bound.iter().zip(&r.per_symbol_asymptotic) {
            row.push(f(*b));
            row.push(f(a.value));
        }
        t.rows.push(row);
    }
    Ok(t.render(format))
}

pub fn mc_output(c: &Constellation, points: &[SweepPoint], format: Format) -> String {
    if format == Format::Json {
        return to_json_string(points);
    }
    let mut h = header(&["gamma", "avg_error", "ci_lower", "ci_upper", "ci"]);
    for i in 0..c.len() {
        let l = c.label(i);
        h.push(format!("error_{l}"));
        h.push(format!("ci_{l}"));
    }
    let mut t = Table::new(h);
    for p in points {
        let e = &p.estimate;
        let mut row =
            vec![f(p.gamma), f(e.avg_error), f(e.avg_error_ci.lower), f(e.avg_error_ci.upper), f(e.ci95_halfwidth.avg)];
        for (err, ci) in e.per_symbol_error.iter().zip(&e.ci95_halfwidth.per_symbol) {
            row.push(f(*err));
            row.push(f(*ci));
        }
        t.rows.push(row);
    }
    t.render(format)
}

pub fn screen_output(r: &ScreenResult, format: Format) -> String {
    if format == Format::Json {
        return to_json_string(r);
    }
    let mut t = Table::new(header(&["rank", "id", "status", "j_lambda", "a_min", "b_max", "p0", "reason"]));
    for (k, c) in r.ranked.iter().enumerate() {
        t.rows.push(vec![
            (k + 1).to_string(),
            c.id.clone(),
            "ranked".into(),
            f(c.j_lambda),
            f(c.report.a_min),
            f(c.report.b_max),
            f(c.p0),
            String::new(),
        ]);
    }
    for c in &r.rejected {
        t.rows.push(vec![
            String::new(),
            c.id.clone(),
            "rejected".into(),
            String::new(),
            f(c.a_min),
            String::new(),
            String::new(),
            c.reason.clone(),
        ]);
    }
    let mut out = t.render(format);
    if format == Format::Table {
        out.push_str(&format!("lambda = {}\n", f(r.lambda)));
        if r.unequal_power_warning {
            out.push_str("warning: candidate average powers differ; pass --p0 to compare at a common power\n");
        }
    }
    out
}
