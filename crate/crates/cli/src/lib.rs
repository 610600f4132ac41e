//! Command-line front end: graph and spectrum exports, field sampling and
//! lab experiments, each run described by a reproducible manifest.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use gasket_fgf::constants::CONSTANTS;
use gasket_fgf::fields::{sample_dfgf, TestFunction};
use gasket_fgf::gasket::{build_graph_capped, interior_count, DEFAULT_LEVEL_CAP};
use gasket_fgf::io;
use gasket_fgf::lab::{self, ConvergenceReport, Level, LevelSweep, Regime, Tolerances};
use gasket_fgf::rng::member_seed;
use gasket_fgf::spectral::{assemble_dirichlet_laplacian, eigendecompose};

/// Environment variable naming the default output directory.
pub const OUT_ENV: &str = "GASKET_FGF_OUT";
pub const MANIFEST: &str = "manifest.json";

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] gasket_fgf::Error),
    #[error("{path}: {source}")]
    File { path: PathBuf, source: std::io::Error },
    #[error("config line {line}: {message}")]
    Config { line: usize, message: String },
    #[error("{0}")]
    Usage(String),
    #[error("manifest: {0}")]
    Manifest(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, CliError>;

#[derive(Debug, Parser)]
#[command(name = "gasket-fgf", version, about = "Fractional Gaussian fields on the Sierpinski gasket")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct GlobalArgs {
    /// Output root; each run writes into its own subdirectory.
    #[arg(long, global = true, env = OUT_ENV)]
    pub out: Option<PathBuf>,
    /// Config file of `key = value` lines (cap, offset, seed, out, tolerance names).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Largest level that may be built.
    #[arg(long, global = true)]
    pub cap: Option<usize>,
    /// Tolerance override `name=value`, repeatable.
    #[arg(long = "tol", global = true, value_name = "NAME=VALUE")]
    pub tolerances: Vec<String>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write vertex and edge CSVs of G_m.
    Graph {
        #[arg(long)]
        m: usize,
    },
    /// Write the Dirichlet spectrum of level m.
    Spectrum {
        #[arg(long)]
        m: usize,
        /// Also write the eigenvector matrix.
        #[arg(long)]
        eigenvectors: bool,
    },
    /// Sample fields X_s^m; field k uses seed + k.
    Sample {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        s: f64,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value_t = 1)]
        n: usize,
        /// One ensemble CSV instead of one file per field.
        #[arg(long)]
        ensemble: bool,
    },
    /// Run a lab experiment and write its report.
    Lab(LabArgs),
    /// Re-run the command recorded in a manifest.
    Replay { manifest: PathBuf },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    Weyl,
    RieszRegime,
    Semigroup,
    Quadform,
    Integral,
    Characteristic,
    Holder,
    Logcorr,
    Sobolev,
    Supnorm,
    Lipschitz,
    Eigsweep,
    Voronoi,
}

impl Experiment {
    /// Runs over a range of levels.
    pub fn uses_sweep(self) -> bool {
        !matches!(self, Experiment::Weyl | Experiment::Holder | Experiment::Sobolev | Experiment::Lipschitz)
    }

    /// Needs a test function on a reference level.
    pub fn uses_test_function(self) -> bool {
        matches!(
            self,
            Experiment::Semigroup
                | Experiment::Quadform
                | Experiment::Integral
                | Experiment::Characteristic
                | Experiment::Voronoi
        )
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.to_possible_value().unwrap().get_name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum FunctionKind {
    /// Ground state of the reference level.
    Ground,
    /// Torsion function of the reference level.
    Torsion,
}

/// Inclusive level range `lo..hi`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelRange {
    pub lo: usize,
    pub hi: usize,
}

impl FromStr for LevelRange {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let (a, b) = s.split_once("..").ok_or_else(|| format!("expected lo..hi, got {s}"))?;
        let lo = a.trim().parse().map_err(|e| format!("{e}"))?;
        let hi = b.trim().parse().map_err(|e| format!("{e}"))?;
        if hi < lo {
            return Err(format!("empty range {s}"));
        }
        Ok(LevelRange { lo, hi })
    }
}

impl LevelRange {
    pub fn levels(&self) -> Vec<usize> {
        (self.lo..=self.hi).collect()
    }
}

#[derive(Debug, Clone, Args)]
pub struct LabArgs {
    pub experiment: Experiment,
    /// Level of single-level experiments.
    #[arg(long)]
    pub m: Option<usize>,
    /// Field or kernel parameter.
    #[arg(long)]
    pub s: Option<f64>,
    /// Base seed of sampled experiments.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Number of field samples.
    #[arg(long)]
    pub n: Option<usize>,
    /// Heat time of the semigroup experiment.
    #[arg(long)]
    pub t: Option<f64>,
    /// Levels of a sweep, `lo..hi`.
    #[arg(long)]
    pub levels: Option<LevelRange>,
    /// Reference level of the test function.
    #[arg(long)]
    pub reference: Option<usize>,
    /// Offset `M - m` of the Voronoi reference level.
    #[arg(long)]
    pub offset: Option<usize>,
    #[arg(long, value_enum)]
    pub function: Option<FunctionKind>,
    /// Comma-separated Sobolev exponents.
    #[arg(long, value_delimiter = ',')]
    pub alpha: Option<Vec<f64>>,
    /// Number of eigenvalues tracked by eigsweep.
    #[arg(long)]
    pub j: Option<usize>,
}

/// Everything that determines a run's outputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum RunConfig {
    Graph { m: usize, cap: usize },
    Spectrum { m: usize, cap: usize, eigenvectors: bool },
    Sample { m: usize, cap: usize, s: f64, seed: u64, n: usize, ensemble: bool },
    Lab(LabConfig),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabConfig {
    pub experiment: Experiment,
    pub cap: usize,
    pub m: usize,
    pub s: f64,
    pub seed: u64,
    pub n: usize,
    pub t: f64,
    pub levels: LevelRange,
    pub reference: usize,
    pub offset: usize,
    pub function: FunctionKind,
    pub alpha: Vec<f64>,
    pub j: usize,
    pub tolerances: Tolerances,
}

impl RunConfig {
    /// Name of the run's output subdirectory.
    pub fn run_name(&self) -> String {
        match self {
            RunConfig::Graph { m, .. } => format!("graph_m{m}"),
            RunConfig::Spectrum { m, .. } => format!("spectrum_m{m}"),
            RunConfig::Sample { m, s, seed, .. } => format!("sample_m{m}_s{s}_seed{seed}"),
            RunConfig::Lab(c) => format!("lab_{}", c.experiment),
        }
    }
}

/// Settings read from a config file.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct FileSettings {
    pub cap: Option<usize>,
    pub offset: Option<usize>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub tolerances: BTreeMap<String, f64>,
}

/// Parses `key = value` lines; `#` starts a comment. Tolerance keys may carry a `tol.` prefix.
pub fn parse_config(text: &str) -> Result<FileSettings> {
    let mut s = FileSettings::default();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap().trim();
        if line.is_empty() {
            continue;
        }
        let err = |message: String| CliError::Config { line: i + 1, message };
        let (k, v) = line.split_once('=').ok_or_else(|| err(format!("expected key = value, got {line:?}")))?;
        let (k, v) = (k.trim(), v.trim());
        let bad = |e: &dyn fmt::Display| err(format!("{k}: {e}"));
        match k {
            "cap" => s.cap = Some(v.parse().map_err(|e| bad(&e))?),
            "offset" => s.offset = Some(v.parse().map_err(|e| bad(&e))?),
            "seed" => s.seed = Some(v.parse().map_err(|e| bad(&e))?),
            "out" => s.out = Some(PathBuf::from(v)),
            _ => {
                let name = k.strip_prefix("tol.").unwrap_or(k);
                if !Tolerances::KEYS.contains(&name) {
                    return Err(err(format!("unknown key {k}")));
                }
                s.tolerances.insert(name.to_string(), v.parse().map_err(|e| bad(&e))?);
            }
        }
    }
    Ok(s)
}

pub const DEFAULT_SEED: u64 = 20240601;
pub const DEFAULT_OFFSET: usize = 4;

/// Merges flags over config-file settings into a run configuration.
pub fn resolve(global: &GlobalArgs, command: &Command) -> Result<RunConfig> {
    let file = match &global.config {
        Some(p) => parse_config(&read_text(p)?)?,
        None => FileSettings::default(),
    };
    let cap = global.cap.or(file.cap).unwrap_or(DEFAULT_LEVEL_CAP);
    let check_m = |m: usize| -> Result<usize> {
        if m > cap {
            return Err(gasket_fgf::Error::LevelCap { level: m, cap }.into());
        }
        Ok(m)
    };
    let mut tolerances = Tolerances::default();
    for (k, v) in &file.tolerances {
        tolerances.set(k, *v)?;
    }
    for t in &global.tolerances {
        let (k, v) = t.split_once('=').ok_or_else(|| CliError::Usage(format!("--tol expects name=value, got {t}")))?;
        let v: f64 = v.trim().parse().map_err(|e| CliError::Usage(format!("--tol {k}: {e}")))?;
        tolerances.set(k.trim(), v)?;
    }
    Ok(match command {
        Command::Graph { m } => RunConfig::Graph { m: check_m(*m)?, cap },
        Command::Spectrum { m, eigenvectors } => RunConfig::Spectrum { m: check_m(*m)?, cap, eigenvectors: *eigenvectors },
        Command::Sample { m, s, seed, n, ensemble } => {
            if !(*s >= 0.0) {
                return Err(CliError::Usage(format!("--s must be >= 0, got {s}")));
            }
            RunConfig::Sample {
                m: check_m(*m)?,
                cap,
                s: *s,
                seed: seed.or(file.seed).unwrap_or(DEFAULT_SEED),
                n: *n,
                ensemble: *ensemble,
            }
        }
        Command::Lab(a) => {
            let m = check_m(a.m.unwrap_or(6))?;
            let e = a.experiment;
            let default_levels = match e {
                Experiment::Eigsweep => LevelRange { lo: 1, hi: 6 },
                Experiment::Supnorm | Experiment::RieszRegime => LevelRange { lo: m.saturating_sub(1).max(1), hi: m },
                Experiment::Voronoi => LevelRange { lo: 2, hi: 5 },
                Experiment::Logcorr => LevelRange { lo: 3, hi: m },
                _ => LevelRange { lo: 2, hi: 6 },
            };
            let levels = a.levels.unwrap_or(default_levels);
            let offset = a.offset.or(file.offset).unwrap_or(DEFAULT_OFFSET);
            let reference = a.reference.unwrap_or(match e {
                Experiment::Voronoi => levels.hi + offset,
                _ => levels.hi + 2,
            });
            if e.uses_sweep() {
                check_m(levels.hi)?;
            }
            if e.uses_test_function() {
                check_m(reference)?;
            }
            let default_s = match e {
                Experiment::Holder | Experiment::Quadform | Experiment::Characteristic | Experiment::Lipschitz => 0.5,
                Experiment::RieszRegime => 0.3,
                Experiment::Logcorr => CONSTANTS.critical_s,
                _ => 0.0,
            };
            let default_n = match e {
                Experiment::Holder | Experiment::Sobolev => 200,
                Experiment::Lipschitz => 100,
                _ => 0,
            };
            RunConfig::Lab(LabConfig {
                experiment: e,
                cap,
                m,
                s: a.s.unwrap_or(default_s),
                seed: a.seed.or(file.seed).unwrap_or(DEFAULT_SEED),
                n: a.n.unwrap_or(default_n),
                t: a.t.unwrap_or(0.01),
                levels,
                reference,
                offset,
                function: a.function.unwrap_or(FunctionKind::Ground),
                alpha: a.alpha.clone().unwrap_or_else(|| vec![0.3, 0.5, 0.7, 1.0, 1.5]),
                j: a.j.unwrap_or(3),
                tolerances,
            })
        }
        Command::Replay { .. } => return Err(CliError::Usage("replay has no run configuration of its own".into())),
    })
}

/// Output root: flag or environment, then config file, then `./out`.
pub fn out_root(global: &GlobalArgs) -> Result<PathBuf> {
    if let Some(o) = &global.out {
        return Ok(o.clone());
    }
    if let Some(p) = &global.config {
        if let Some(o) = parse_config(&read_text(p)?)?.out {
            return Ok(o);
        }
    }
    Ok(PathBuf::from("out"))
}

fn read_text(p: &Path) -> Result<String> {
    std::fs::read_to_string(p).map_err(|source| CliError::File { path: p.to_path_buf(), source })
}

/// A failed check as listed in manifests and on stdout.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Failure {
    pub experiment: String,
    pub check: String,
    pub value: f64,
    pub bound: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub run: RunConfig,
    pub files: Vec<String>,
    pub flags: Vec<String>,
    pub pass: bool,
    pub failures: Vec<Failure>,
}

/// Result of a run.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub dir: PathBuf,
    pub manifest: Manifest,
    /// Short human-readable summary.
    pub summary: Vec<String>,
}

struct Output {
    files: Vec<(String, Vec<u8>)>,
    flags: Vec<String>,
    reports: Vec<ConvergenceReport>,
    summary: Vec<String>,
}

impl Output {
    fn new() -> Self {
        Output { files: Vec::new(), flags: Vec::new(), reports: Vec::new(), summary: Vec::new() }
    }
}

/// Executes a run and writes its files and manifest under `root/<run name>/`.
pub fn execute(config: &RunConfig, root: &Path) -> Result<Outcome> {
    let out = match config {
        RunConfig::Graph { m, cap } => run_graph(*m, *cap)?,
        RunConfig::Spectrum { m, cap, eigenvectors } => run_spectrum(*m, *cap, *eigenvectors)?,
        RunConfig::Sample { m, cap, s, seed, n, ensemble } => run_sample(*m, *cap, *s, *seed, *n, *ensemble)?,
        RunConfig::Lab(c) => run_lab(c)?,
    };
    let dir = root.join(config.run_name());
    let mut names = Vec::new();
    for (name, bytes) in &out.files {
        let path = dir.join(name);
        io::write_atomic(&path, bytes)?;
        names.push(name.clone());
    }
    let failures: Vec<Failure> = out
        .reports
        .iter()
        .flat_map(|r| {
            r.failures().into_iter().map(move |c| Failure {
                experiment: r.experiment.clone(),
                check: c.name.clone(),
                value: c.value,
                bound: c.bound.clone(),
            })
        })
        .collect();
    let pass = out.reports.iter().all(|r| r.pass);
    let manifest = Manifest {
        tool: "gasket-fgf".into(),
        version: env!("CARGO_PKG_VERSION").into(),
        run: config.clone(),
        files: names,
        flags: out.flags,
        pass,
        failures,
    };
    io::write_atomic(&dir.join(MANIFEST), &io::to_json(&manifest)?)?;
    Ok(Outcome { dir, manifest, summary: out.summary })
}

/// Reads a manifest written by [`execute`].
pub fn load_manifest(path: &Path) -> Result<Manifest> {
    Ok(serde_json::from_str(&read_text(path)?)?)
}

fn run_graph(m: usize, cap: usize) -> Result<Output> {
    let g = build_graph_capped(m, cap)?;
    let mut o = Output::new();
    o.files.push(("vertices.csv".into(), io::vertices_csv(&g)?));
    o.files.push(("edges.csv".into(), io::edges_csv(&g)?));
    o.summary.push(format!("level {m}: {} vertices, {} edges", g.vertex_count(), g.edge_count()));
    Ok(o)
}

fn run_spectrum(m: usize, cap: usize, eigenvectors: bool) -> Result<Output> {
    let g = build_graph_capped(m, cap)?;
    let spec = eigendecompose(&assemble_dirichlet_laplacian(&g)?)?;
    let mut o = Output::new();
    o.files.push(("eigenvalues.csv".into(), io::eigenvalues_csv(&spec)?));
    if eigenvectors {
        o.files.push(("eigenvectors.csv".into(), io::eigenvectors_csv(&spec)?));
    }
    o.summary.push(format!("lambda_1 = {}", spec.eigenvalues()[0]));
    o.summary.push(format!("N_{m} = {}", interior_count(m)));
    Ok(o)
}

fn run_sample(m: usize, cap: usize, s: f64, seed: u64, n: usize, ensemble: bool) -> Result<Output> {
    let mut o = Output::new();
    if (s - CONSTANTS.critical_s).abs() <= Regime::LOG_TOLERANCE {
        o.flags.push("log-correlated".into());
    }
    if n == 0 {
        return Ok(o);
    }
    let g = build_graph_capped(m, cap)?;
    let spec = eigendecompose(&assemble_dirichlet_laplacian(&g)?)?;
    let samples = (0..n)
        .map(|k| sample_dfgf(&spec, s, member_seed(seed, k as u64)))
        .collect::<gasket_fgf::Result<Vec<_>>>()?;
    if ensemble {
        o.files.push(("ensemble.csv".into(), io::ensemble_csv(&samples)?));
    } else {
        for (k, x) in samples.iter().enumerate() {
            o.files.push((format!("field_{k}.csv"), io::field_csv(x)?));
        }
    }
    o.summary.push(format!("{n} field(s) at level {m}, s = {s}"));
    Ok(o)
}

fn test_function(c: &LabConfig) -> Result<TestFunction> {
    Ok(match c.function {
        FunctionKind::Ground => TestFunction::ground_state(c.reference)?,
        FunctionKind::Torsion => TestFunction::torsion(c.reference)?,
    })
}

fn sweep(c: &LabConfig) -> Result<LevelSweep> {
    Ok(LevelSweep::new(c.levels.lo, c.levels.hi)?)
}

fn level(c: &LabConfig) -> Result<Level> {
    Ok(Level::with_cap(c.m, c.cap)?)
}

fn run_lab(c: &LabConfig) -> Result<Output> {
    let tol = &c.tolerances;
    let reports: Vec<ConvergenceReport> = match c.experiment {
        Experiment::Weyl => vec![lab::weyl_check(&level(c)?.spectrum, tol)?.report()],
        Experiment::RieszRegime => {
            let mut r = vec![lab::riesz_regime_fit(&level(c)?, c.s, tol)?.report()];
            if Regime::of_kernel(c.s) == Regime::Bounded {
                r.push(lab::riesz_sup_stability(&sweep(c)?, c.s, tol)?);
            }
            r
        }
        Experiment::Semigroup => vec![lab::semigroup_convergence(&test_function(c)?, c.t, &sweep(c)?)?],
        Experiment::Quadform => vec![lab::quadratic_form_convergence(&test_function(c)?, c.s, &sweep(c)?)?],
        Experiment::Integral => vec![lab::integral_convergence(&test_function(c)?, &sweep(c)?)?],
        Experiment::Characteristic => vec![lab::characteristic_convergence(&test_function(c)?, c.s, &sweep(c)?, tol)?],
        Experiment::Holder => vec![lab::holder_exponent(&level(c)?, c.s, c.n, c.seed, tol)?.report()],
        Experiment::Logcorr => vec![
            lab::log_correlation_fit(&level(c)?, c.n, c.seed, tol)?.report(),
            lab::log_diagonal_growth(&sweep(c)?)?,
        ],
        Experiment::Sobolev => vec![lab::sobolev_membership_scan(&level(c)?.spectrum, c.s, &c.alpha, c.n, c.seed, tol)?],
        Experiment::Supnorm => vec![lab::eigenfunction_supnorm_check(&sweep(c)?, tol)?],
        Experiment::Lipschitz => vec![lab::lipschitz_kernel_check(&level(c)?, c.s, c.n, c.seed, tol)?.report()],
        Experiment::Eigsweep => vec![lab::eigen_level_sweep(&sweep(c)?, c.j)?.report],
        Experiment::Voronoi => vec![lab::voronoi_lifting_rate(&test_function(c)?, &c.levels.levels(), c.offset, tol)?],
    };
    let mut o = Output::new();
    o.files.push(("report.json".into(), io::to_json(&reports)?));
    for (k, r) in reports.iter().enumerate() {
        for s in &r.series {
            o.files.push((format!("series_{k}_{}.csv", slug(&s.name)), io::series_csv(s)?));
        }
        let fit = r.fit.map(|f| format!(", fit {:.6} (r2 {:.4})", f.exponent, f.r2)).unwrap_or_default();
        o.summary.push(format!("{}: {}{fit}", r.experiment, if r.pass { "pass" } else { "FAIL" }));
    }
    o.reports = reports;
    Ok(o)
}

fn slug(name: &str) -> String {
    name.chars().map(|c| if c.is_ascii_alphanumeric() { c.to_ascii_lowercase() } else { '_' }).collect()
}

/// Parses arguments, runs, and returns the process exit code.
///
/// 0 when every check passes, 3 with a JSON failure list on stdout when some
/// check fails, 1 on errors.
pub fn main_with(cli: Cli) -> i32 {
    let result = (|| -> Result<Outcome> {
        let root = out_root(&cli.global)?;
        let config = match &cli.command {
            Command::Replay { manifest } => load_manifest(manifest)?.run,
            other => resolve(&cli.global, other)?,
        };
        execute(&config, &root)
    })();
    match result {
        Ok(outcome) => {
            for line in &outcome.summary {
                println!("{line}");
            }
            println!("wrote {}", outcome.dir.display());
            if outcome.manifest.pass {
                0
            } else {
                println!("{}", serde_json::to_string(&outcome.manifest.failures).unwrap());
                3
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}
