//! Command-line front end. [`run`] parses arguments, executes one
//! subcommand and returns the process exit code: 0 on success, 1 for
//! invalid input, 2 for runtime or solver failures.

use std::ffi::OsString;
use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::distributions::{moment_check, DistributionSpec};
use crate::ensembles::{MeasurementMatrix, MixedGraphModel, Provenance};
use crate::error::{Error, Result};
use crate::experiments::{curve_point, image_experiment, synthetic_test_image, Ensemble, SweepParameter};
use crate::io::csv::{fmt_f64, read_matrix, read_vector_file, write_matrix};
use crate::io::{read_csmat_file, read_pgm_file, write_csmat_file, write_pgm_file, GrayImage};
use crate::linalg::Matrix;
use crate::rip::{delta_exhaustive, delta_monte_carlo, RipEstimate};
use crate::solver::{bpdn, SolveStatus};
use crate::spectral::{bai_yin_check, semicircle_edge_check, SpectralEdgeReport};

pub const JOBS_ENV: &str = "MIXCS_JOBS";
pub const BENCH_CSV_HEADER: &str = "ensemble,param,trials,successes,rate,mean_rel_error,mean_iterations";

#[derive(Debug, Parser)]
#[command(name = "mixcs", version, about = "Mixed symmetric random matrices for compressed sensing")]
pub struct Cli {
    /// Worker threads for sweeps (default: logical cores; MIXCS_JOBS overrides).
    #[arg(long, global = true)]
    pub jobs: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sample a measurement matrix and write it as CSMAT1 (or CSV for *.csv).
    GenMatrix(GenMatrixArgs),
    /// Compare extreme singular values or eigenvalues with their limits.
    SpectralCheck(SpectralArgs),
    /// Estimate the restricted isometry constant of a stored matrix.
    Rip(RipArgs),
    /// Recover a sparse vector from measurements.
    Recover(RecoverArgs),
    /// Success rate against sparsity.
    BenchSparsity(ConfigArgs),
    /// Success rate against the number of measurements.
    BenchMeasurements(ConfigArgs),
    /// Image reconstruction benchmark.
    BenchImage(ConfigArgs),
    /// Empirical moments of a scalar law.
    Moments(MomentsArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum MatrixKind {
    Gaussian,
    Bernoulli,
    SMixed,
    SBernoulli,
    /// `[I | 0]`, unscaled.
    Identity,
}

#[derive(Debug, Args, Serialize)]
pub struct GenMatrixArgs {
    #[arg(long, value_enum)]
    pub ensemble: MatrixKind,
    #[arg(long = "N")]
    #[serde(rename = "N")]
    pub cols: usize,
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Loop-weight law for s-mixed.
    #[arg(long, default_value = "gaussian-unit")]
    pub diag_law: DistributionSpec,
    /// Edge-weight law for s-mixed.
    #[arg(long, default_value = "bernoulli-sym")]
    pub offdiag_law: DistributionSpec,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SpectralKind {
    BaiYin,
    Semicircle,
}

#[derive(Debug, Args, Serialize)]
pub struct SpectralArgs {
    #[arg(long, value_enum, default_value = "bai-yin")]
    pub kind: SpectralKind,
    #[arg(long, default_value_t = 1000)]
    pub n: usize,
    /// Aspect ratio `p/n` for bai-yin.
    #[arg(long, default_value_t = 0.25)]
    pub y: f64,
    /// Entry law for bai-yin.
    #[arg(long, default_value = "gaussian-unit")]
    pub law: DistributionSpec,
    #[arg(long, default_value = "gaussian-unit")]
    pub diag_law: DistributionSpec,
    #[arg(long, default_value = "bernoulli-sym")]
    pub offdiag_law: DistributionSpec,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Number of consecutive seeds starting at --seed.
    #[arg(long, default_value_t = 1)]
    pub repeats: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct RipArgs {
    #[arg(long)]
    pub matrix: PathBuf,
    #[arg(long)]
    pub k: usize,
    #[arg(long, conflicts_with = "trials")]
    pub exhaustive: bool,
    #[arg(long)]
    pub trials: Option<u64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct RecoverArgs {
    #[arg(long)]
    pub matrix: PathBuf,
    #[arg(long)]
    pub y: PathBuf,
    #[arg(long, default_value_t = 0.0)]
    pub eps: f64,
    #[arg(long, default_value_t = crate::solver::DEFAULT_TOL)]
    pub tol: f64,
    #[arg(long, default_value_t = crate::solver::DEFAULT_MAX_ITER)]
    pub max_iter: usize,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct ConfigArgs {
    /// JSON config; a run manifest is accepted too. Defaults apply when omitted.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct MomentsArgs {
    #[arg(long, default_value = "gaussian-unit")]
    pub law: DistributionSpec,
    #[arg(long, default_value_t = 100_000)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn default_ensembles() -> Vec<Ensemble> {
    Ensemble::COMPARED.to_vec()
}
fn default_cols() -> usize {
    256
}
fn default_n() -> usize {
    100
}
fn default_k() -> usize {
    20
}
fn default_trials() -> usize {
    1000
}
fn default_threshold() -> f64 {
    crate::experiments::DEFAULT_THRESHOLD
}
fn default_k_grid() -> Vec<usize> {
    (1..=10).map(|i| 5 * i).collect()
}
fn default_n_grid() -> Vec<usize> {
    (8..=32).map(|i| 5 * i).collect()
}
fn default_image_n() -> usize {
    2400
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SparsityConfig {
    #[serde(default = "default_ensembles")]
    pub ensembles: Vec<Ensemble>,
    #[serde(rename = "N", default = "default_cols")]
    pub cols: usize,
    #[serde(default = "default_n")]
    pub n: usize,
    #[serde(default = "default_k_grid")]
    pub k_grid: Vec<usize>,
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default)]
    pub master_seed: u64,
    #[serde(default = "default_threshold")]
    pub threshold: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeasurementsConfig {
    #[serde(default = "default_ensembles")]
    pub ensembles: Vec<Ensemble>,
    #[serde(rename = "N", default = "default_cols")]
    pub cols: usize,
    #[serde(default = "default_k")]
    pub k: usize,
    #[serde(default = "default_n_grid")]
    pub n_grid: Vec<usize>,
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default)]
    pub master_seed: u64,
    #[serde(default = "default_threshold")]
    pub threshold: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ImageConfig {
    #[serde(default = "default_ensembles")]
    pub ensembles: Vec<Ensemble>,
    #[serde(default = "default_image_n")]
    pub n: usize,
    #[serde(default)]
    pub master_seed: u64,
    #[serde(default)]
    pub eps: f64,
    /// PGM file; the built-in 64×64 test image when absent.
    #[serde(default)]
    pub image: Option<PathBuf>,
}

/// Semantic checks run after a config parses.
pub trait Validate {
    fn validate(&self) -> Result<()>;
}

fn config_error(key: &str, msg: impl std::fmt::Display) -> Error {
    Error::Config(format!("{key}: {msg}"))
}

fn check_ensembles(e: &[Ensemble]) -> Result<()> {
    if e.is_empty() {
        return Err(config_error("ensembles", "must list at least one ensemble"));
    }
    Ok(())
}

fn check_grid(key: &str, grid: &[usize], max: usize, min: usize) -> Result<()> {
    if grid.is_empty() {
        return Err(config_error(key, "must be nonempty"));
    }
    if grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(config_error(key, "must be strictly ascending"));
    }
    if grid[0] < min || grid[grid.len() - 1] > max {
        return Err(config_error(key, format!("values must lie in {min}..={max}")));
    }
    Ok(())
}

fn check_threshold(t: f64) -> Result<()> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(config_error("threshold", "must be a finite nonnegative number"));
    }
    Ok(())
}

impl Validate for SparsityConfig {
    fn validate(&self) -> Result<()> {
        check_ensembles(&self.ensembles)?;
        if self.cols == 0 {
            return Err(config_error("N", "must be positive"));
        }
        if self.n == 0 || self.n > self.cols {
            return Err(config_error("n", format!("must lie in 1..={}", self.cols)));
        }
        check_grid("k_grid", &self.k_grid, self.cols, 0)?;
        if self.trials == 0 {
            return Err(config_error("trials", "must be positive"));
        }
        check_threshold(self.threshold)
    }
}

impl Validate for MeasurementsConfig {
    fn validate(&self) -> Result<()> {
        check_ensembles(&self.ensembles)?;
        if self.cols == 0 {
            return Err(config_error("N", "must be positive"));
        }
        if self.k > self.cols {
            return Err(config_error("k", format!("must lie in 0..={}", self.cols)));
        }
        check_grid("n_grid", &self.n_grid, self.cols, 1)?;
        if self.trials == 0 {
            return Err(config_error("trials", "must be positive"));
        }
        check_threshold(self.threshold)
    }
}

impl Validate for ImageConfig {
    fn validate(&self) -> Result<()> {
        check_ensembles(&self.ensembles)?;
        if self.n == 0 {
            return Err(config_error("n", "must be positive"));
        }
        if !(self.eps >= 0.0 && self.eps.is_finite()) {
            return Err(config_error("eps", "must be a finite nonnegative number"));
        }
        Ok(())
    }
}

/// Parses a strict JSON config, filling defaults. A run manifest is
/// accepted in place of a config: its embedded `config` object is used.
pub fn parse_config<T: DeserializeOwned + Validate>(text: &str) -> Result<T> {
    let mut value: serde_json::Value =
        serde_json::from_str(text).map_err(|e| Error::Config(format!("invalid JSON: {e}")))?;
    if let Some(obj) = value.as_object_mut() {
        if obj.contains_key("command") && obj.contains_key("config") {
            value = obj.remove("config").expect("checked above");
        }
    }
    let config: T = serde_path_to_error::deserialize(value).map_err(|e| {
        let path = e.path().to_string();
        Error::Config(format!("{path}: {}", e.into_inner()))
    })?;
    config.validate()?;
    Ok(config)
}

pub fn load_config<T: DeserializeOwned + Validate>(path: Option<&Path>) -> Result<T> {
    let text = match path {
        Some(p) => fs::read_to_string(p).map_err(|e| Error::Config(format!("cannot read {}: {e}", p.display())))?,
        None => "{}".to_owned(),
    };
    parse_config(&text)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub config: serde_json::Value,
    pub master_seed: Option<u64>,
    pub version: String,
    pub outputs: Vec<String>,
    pub duration_seconds: f64,
}

pub fn manifest_path(out: &Path) -> PathBuf {
    let mut name = out.as_os_str().to_owned();
    name.push(".manifest.json");
    PathBuf::from(name)
}

struct Outcome {
    config: serde_json::Value,
    master_seed: Option<u64>,
    outputs: Vec<PathBuf>,
    /// Set when results were written but the run still failed.
    failure: Option<Error>,
}

impl Outcome {
    fn ok(config: impl Serialize, master_seed: Option<u64>, outputs: Vec<PathBuf>) -> Result<Self> {
        Ok(Outcome {
            config: serde_json::to_value(config).map_err(|e| Error::Numerical(e.to_string()))?,
            master_seed,
            outputs,
            failure: None,
        })
    }
}

fn write_manifest(command: &str, outcome: &Outcome, started: Instant) -> Result<()> {
    let Some(primary) = outcome.outputs.first() else {
        return Ok(());
    };
    let manifest = RunManifest {
        command: command.to_owned(),
        config: outcome.config.clone(),
        master_seed: outcome.master_seed,
        version: env!("CARGO_PKG_VERSION").to_owned(),
        outputs: outcome.outputs.iter().map(|p| p.display().to_string()).collect(),
        duration_seconds: started.elapsed().as_secs_f64(),
    };
    let text = serde_json::to_string_pretty(&manifest).map_err(|e| Error::Numerical(e.to_string()))?;
    fs::write(manifest_path(primary), text + "\n")?;
    Ok(())
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::GenMatrix(_) => "gen-matrix",
        Command::SpectralCheck(_) => "spectral-check",
        Command::Rip(_) => "rip",
        Command::Recover(_) => "recover",
        Command::BenchSparsity(_) => "bench-sparsity",
        Command::BenchMeasurements(_) => "bench-measurements",
        Command::BenchImage(_) => "bench-image",
        Command::Moments(_) => "moments",
    }
}

fn resolve_jobs(flag: Option<usize>) -> Result<Option<usize>> {
    match std::env::var(JOBS_ENV) {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .ok()
            .filter(|&j| j > 0)
            .map(Some)
            .ok_or_else(|| Error::validation(format!("{JOBS_ENV} must be a positive integer, got '{v}'"))),
        Err(_) => match flag {
            Some(0) => Err(Error::validation("--jobs must be positive")),
            other => Ok(other),
        },
    }
}

/// Runs the CLI on `args` (including the program name) and returns the
/// exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_validation() {
                1
            } else {
                2
            }
        }
    }
}

pub fn execute(cli: Cli) -> Result<()> {
    let jobs = resolve_jobs(cli.jobs)?;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(j) = jobs {
        builder = builder.num_threads(j);
    }
    let pool = builder.build().map_err(|e| Error::Numerical(format!("thread pool: {e}")))?;
    let name = command_name(&cli.command);
    let started = Instant::now();
    let outcome = pool.install(|| match &cli.command {
        Command::GenMatrix(a) => gen_matrix(a),
        Command::SpectralCheck(a) => spectral_check(a),
        Command::Rip(a) => rip(a),
        Command::Recover(a) => recover(a),
        Command::BenchSparsity(a) => bench_sparsity(a),
        Command::BenchMeasurements(a) => bench_measurements(a),
        Command::BenchImage(a) => bench_image(a),
        Command::Moments(a) => moments(a),
    })?;
    write_manifest(name, &outcome, started)?;
    match outcome.failure {
        Some(e) => Err(e),
        None => Ok(()),
    }
}

fn is_csv(path: &Path) -> bool {
    path.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv"))
}

pub fn load_matrix(path: &Path) -> Result<MeasurementMatrix> {
    if is_csv(path) {
        MeasurementMatrix::from_matrix(read_matrix(&fs::read_to_string(path)?)?)
    } else {
        read_csmat_file(path)
    }
}

/// Writes through a buffered file, or stdout when `path` is `None`.
fn with_output(path: Option<&Path>, f: impl FnOnce(&mut dyn Write) -> Result<()>) -> Result<()> {
    match path {
        Some(p) => {
            let mut w = BufWriter::new(File::create(p)?);
            f(&mut w)?;
            w.flush()?;
        }
        None => {
            let stdout = io::stdout();
            let mut w = stdout.lock();
            f(&mut w)?;
            w.flush()?;
        }
    }
    Ok(())
}

fn gen_matrix(a: &GenMatrixArgs) -> Result<Outcome> {
    let m = match a.ensemble {
        MatrixKind::Identity => {
            if a.n == 0 || a.n > a.cols {
                return Err(Error::validation(format!("need 1 <= n <= N, got n={}, N={}", a.n, a.cols)));
            }
            MeasurementMatrix::new(
                Matrix::from_fn(a.n, a.cols, |i, j| if i == j { 1.0 } else { 0.0 }),
                1.0,
                Provenance::explicit(),
            )?
        }
        MatrixKind::SMixed => {
            let model = MixedGraphModel::new(a.cols, a.diag_law.clone(), a.offdiag_law.clone())?;
            if a.n == 0 || a.n > a.cols {
                return Err(Error::validation(format!("need 1 <= n <= N, got n={}, N={}", a.n, a.cols)));
            }
            crate::ensembles::mixed_measurement(&model, a.n, a.seed)?
        }
        MatrixKind::Gaussian => Ensemble::Gaussian.measurement(a.n, a.cols, a.seed)?,
        MatrixKind::Bernoulli => Ensemble::Bernoulli.measurement(a.n, a.cols, a.seed)?,
        MatrixKind::SBernoulli => Ensemble::SBernoulli.measurement(a.n, a.cols, a.seed)?,
    };
    if is_csv(&a.out) {
        with_output(Some(&a.out), |w| write_matrix(w, m.matrix()))?;
    } else {
        write_csmat_file(&a.out, &m)?;
    }
    Outcome::ok(a, Some(a.seed), vec![a.out.clone()])
}

fn spectral_check(a: &SpectralArgs) -> Result<Outcome> {
    if a.repeats == 0 {
        return Err(Error::validation("--repeats must be positive"));
    }
    let reports: Vec<(u64, SpectralEdgeReport)> = (a.seed..a.seed + a.repeats)
        .map(|seed| {
            let r = match a.kind {
                SpectralKind::BaiYin => bai_yin_check(&a.law, a.n, a.y, seed)?,
                SpectralKind::Semicircle => {
                    let model = MixedGraphModel::new(a.n, a.diag_law.clone(), a.offdiag_law.clone())?;
                    semicircle_edge_check(&model, a.n, seed)?
                }
            };
            eprintln!("seed {seed}: deviation {}", fmt_f64(r.abs_deviation));
            Ok((seed, r))
        })
        .collect::<Result<_>>()?;
    with_output(a.out.as_deref(), |w| {
        writeln!(w, "seed,{}", SpectralEdgeReport::CSV_HEADER)?;
        for (seed, r) in &reports {
            writeln!(w, "{seed},{}", r.to_csv_line())?;
        }
        Ok(())
    })?;
    Outcome::ok(a, Some(a.seed), a.out.iter().cloned().collect())
}

fn rip(a: &RipArgs) -> Result<Outcome> {
    let phi = load_matrix(&a.matrix)?;
    let est: RipEstimate = match (a.exhaustive, a.trials) {
        (_, Some(trials)) => delta_monte_carlo(&phi, a.k, trials, a.seed)?,
        (true, None) => delta_exhaustive(&phi, a.k)?,
        (false, None) => return Err(Error::validation("pass --exhaustive or --trials <int>")),
    };
    eprintln!("delta = {}", fmt_f64(est.delta));
    with_output(a.out.as_deref(), |w| {
        writeln!(w, "{}", RipEstimate::CSV_HEADER)?;
        writeln!(w, "{}", est.to_csv_line())?;
        Ok(())
    })?;
    Outcome::ok(a, Some(a.seed), a.out.iter().cloned().collect())
}

pub const RECOVER_ZERO_CUTOFF: f64 = 1e-10;

fn recover(a: &RecoverArgs) -> Result<Outcome> {
    let phi = load_matrix(&a.matrix)?;
    let y = read_vector_file(&a.y)?;
    let res = bpdn(&phi, &y, a.eps, a.tol, a.max_iter)?;
    with_output(Some(&a.out), |w| {
        writeln!(
            w,
            "# objective={},residual={},iterations={},status={}",
            fmt_f64(res.objective),
            fmt_f64(res.residual),
            res.iterations,
            res.status
        )?;
        writeln!(w, "index,value")?;
        for (i, v) in res.x_star.iter().enumerate() {
            if v.abs() > RECOVER_ZERO_CUTOFF {
                writeln!(w, "{i},{}", fmt_f64(*v))?;
            }
        }
        Ok(())
    })?;
    let mut outcome = Outcome::ok(a, None, vec![a.out.clone()])?;
    if res.status != SolveStatus::Converged {
        outcome.failure = Some(Error::Numerical(format!("solver stopped with status {}", res.status)));
    }
    Ok(outcome)
}

fn bench_row(w: &mut dyn Write, e: Ensemble, p: &crate::experiments::CurvePoint) -> io::Result<()> {
    writeln!(
        w,
        "{},{},{},{},{},{},{}",
        e,
        p.value,
        p.trials,
        p.successes,
        fmt_f64(p.rate),
        fmt_f64(p.mean_rel_error),
        fmt_f64(p.mean_iterations)
    )
}

/// Runs the `(ensemble, point)` grid in order, writing one row per point as
/// soon as it is done. A runtime error writes a marker row and stops the
/// sweep.
fn run_sweep(
    out: &Path,
    ensembles: &[Ensemble],
    values: &[usize],
    mut point: impl FnMut(Ensemble, usize) -> Result<crate::experiments::CurvePoint>,
) -> Result<Option<Error>> {
    let mut w = BufWriter::new(File::create(out)?);
    writeln!(w, "{BENCH_CSV_HEADER}")?;
    w.flush()?;
    let total = ensembles.len() * values.len();
    let mut done = 0;
    for &e in ensembles {
        for &v in values {
            match point(e, v) {
                Ok(p) => {
                    bench_row(&mut w, e, &p)?;
                    done += 1;
                    eprintln!("[{done}/{total}] {e} {v}: rate {}", fmt_f64(p.rate));
                }
                Err(err) if err.is_validation() => return Err(err),
                Err(err) => {
                    writeln!(w, "{e},{v},failed,,,,")?;
                    w.flush()?;
                    return Ok(Some(err));
                }
            }
            w.flush()?;
        }
    }
    Ok(None)
}

fn bench_sparsity(a: &ConfigArgs) -> Result<Outcome> {
    let cfg: SparsityConfig = load_config(a.config.as_deref())?;
    let failure = run_sweep(&a.out, &cfg.ensembles, &cfg.k_grid, |e, k| {
        curve_point(e, cfg.cols, cfg.n, k, SweepParameter::K, cfg.trials, cfg.master_seed, cfg.threshold)
    })?;
    let mut outcome = Outcome::ok(&cfg, Some(cfg.master_seed), vec![a.out.clone()])?;
    outcome.failure = failure;
    Ok(outcome)
}

fn bench_measurements(a: &ConfigArgs) -> Result<Outcome> {
    let cfg: MeasurementsConfig = load_config(a.config.as_deref())?;
    let failure = run_sweep(&a.out, &cfg.ensembles, &cfg.n_grid, |e, n| {
        curve_point(e, cfg.cols, n, cfg.k, SweepParameter::N, cfg.trials, cfg.master_seed, cfg.threshold)
    })?;
    let mut outcome = Outcome::ok(&cfg, Some(cfg.master_seed), vec![a.out.clone()])?;
    outcome.failure = failure;
    Ok(outcome)
}

pub const IMAGE_CSV_HEADER: &str = "ensemble,n,mse,input_nonzeros,iterations,status";

fn reconstruction_path(out: &Path, e: Ensemble) -> PathBuf {
    let stem = out.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    out.with_file_name(format!("{stem}-{e}.pgm"))
}

fn bench_image(a: &ConfigArgs) -> Result<Outcome> {
    let cfg: ImageConfig = load_config(a.config.as_deref())?;
    let image: GrayImage = match &cfg.image {
        Some(p) => read_pgm_file(p)?,
        None => synthetic_test_image(),
    };
    let mut outputs = vec![a.out.clone()];
    let mut w = BufWriter::new(File::create(&a.out)?);
    writeln!(w, "{IMAGE_CSV_HEADER}")?;
    let mut failure = None;
    for &e in &cfg.ensembles {
        match image_experiment(&image, cfg.n, e, cfg.master_seed, cfg.eps) {
            Ok(r) => {
                writeln!(
                    w,
                    "{e},{},{},{},{},{}",
                    cfg.n,
                    fmt_f64(r.mse),
                    r.input_nonzeros,
                    r.iterations,
                    r.status
                )?;
                let path = reconstruction_path(&a.out, e);
                write_pgm_file(&path, &r.reconstruction)?;
                outputs.push(path);
                eprintln!("{e}: mse {}", fmt_f64(r.mse));
            }
            Err(err) if err.is_validation() => return Err(err),
            Err(err) => {
                writeln!(w, "{e},{},failed,,,", cfg.n)?;
                failure = Some(err);
                break;
            }
        }
        w.flush()?;
    }
    w.flush()?;
    let mut outcome = Outcome::ok(&cfg, Some(cfg.master_seed), outputs)?;
    outcome.failure = failure;
    Ok(outcome)
}

fn moments(a: &MomentsArgs) -> Result<Outcome> {
    let r = moment_check(&a.law, a.samples, a.seed)?;
    with_output(a.out.as_deref(), |w| {
        writeln!(w, "law,samples,mean,variance,fourth_moment,positive_part_second_moment")?;
        writeln!(
            w,
            "{},{},{},{},{},{}",
            a.law,
            a.samples,
            fmt_f64(r.mean),
            fmt_f64(r.variance),
            fmt_f64(r.fourth_moment),
            fmt_f64(r.positive_part_second_moment)
        )?;
        Ok(())
    })?;
    Outcome::ok(a, Some(a.seed), a.out.iter().cloned().collect())
}
