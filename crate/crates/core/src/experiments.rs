//! Recovery benchmarks: sparse signals, success-rate sweeps, image
//! reconstruction and error-bound probes.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::distributions::DistributionSpec;
use crate::ensembles::{graph_measurement, mixed_measurement, sample_iid_matrix, MeasurementMatrix, MixedGraphModel};
use crate::error::{Error, Result};
use crate::io::GrayImage;
use crate::linalg::{norm1, norm2, sub};
use crate::rng::{derive_seed, Stream};
use crate::solver::{basis_pursuit, bpdn, SolveStatus, DEFAULT_MAX_ITER, DEFAULT_TOL};

pub const DEFAULT_THRESHOLD: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Ensemble {
    Gaussian,
    Bernoulli,
    /// Mixed symmetric: Gaussian loops, symmetric Bernoulli edges.
    SMixed,
    /// `2A(G) − J` for an Erdős–Rényi graph with edge probability 1/2.
    SBernoulli,
}

impl Ensemble {
    pub const ALL: [Ensemble; 4] = [Ensemble::Gaussian, Ensemble::Bernoulli, Ensemble::SMixed, Ensemble::SBernoulli];
    /// The three ensembles compared in the benchmarks.
    pub const COMPARED: [Ensemble; 3] = [Ensemble::Gaussian, Ensemble::Bernoulli, Ensemble::SMixed];

    pub fn name(self) -> &'static str {
        match self {
            Ensemble::Gaussian => "gaussian",
            Ensemble::Bernoulli => "bernoulli",
            Ensemble::SMixed => "s-mixed",
            Ensemble::SBernoulli => "s-bernoulli",
        }
    }

    /// Scaled `n × N` measurement matrix.
    pub fn measurement(self, n: usize, cols: usize, seed: u64) -> Result<MeasurementMatrix> {
        if n == 0 || n > cols {
            return Err(Error::validation(format!("need 1 <= n <= N, got n={n}, N={cols}")));
        }
        match self {
            Ensemble::Gaussian => Ok(sample_iid_matrix(&DistributionSpec::gaussian_unit(), n, cols, seed)?.normalized()),
            Ensemble::Bernoulli => Ok(sample_iid_matrix(&DistributionSpec::bernoulli_sym(), n, cols, seed)?.normalized()),
            Ensemble::SMixed => mixed_measurement(&MixedGraphModel::default_mixed(cols), n, seed),
            Ensemble::SBernoulli => graph_measurement(cols, n, 0.5, seed),
        }
    }
}

impl fmt::Display for Ensemble {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Ensemble {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ensemble::ALL
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| Error::validation(format!("unknown ensemble '{s}' (gaussian, bernoulli, s-mixed, s-bernoulli)")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SparseSignal {
    pub len: usize,
    /// Ascending.
    pub support: Vec<usize>,
    pub values: Vec<f64>,
}

impl SparseSignal {
    pub fn sparsity(&self) -> usize {
        self.support.len()
    }

    pub fn to_dense(&self) -> Vec<f64> {
        let mut x = vec![0.0; self.len];
        for (&j, &v) in self.support.iter().zip(&self.values) {
            x[j] = v;
        }
        x
    }
}

/// Uniformly random `k`-subset support with independent ±1 values.
pub fn gen_sparse_signal(len: usize, k: usize, seed: u64) -> Result<SparseSignal> {
    if k > len {
        return Err(Error::validation(format!("sparsity {k} exceeds length {len}")));
    }
    let mut stream = Stream::derive(seed, "signal", 0);
    let support = stream.sample_subset(len, k);
    let values = support.iter().map(|_| if stream.next_bool() { 1.0 } else { -1.0 }).collect();
    Ok(SparseSignal { len, support, values })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialOutcome {
    pub ensemble: Ensemble,
    pub n: usize,
    #[serde(rename = "N")]
    pub cols: usize,
    pub k: usize,
    pub seed: u64,
    pub rel_error: f64,
    pub success: bool,
    pub solve_iterations: usize,
    /// `None` when the solver returned an error.
    pub status: Option<SolveStatus>,
}

/// `‖x − x₀‖₂ / ‖x₀‖₂`, or the absolute error when `x₀ = 0`.
pub fn relative_error(x: &[f64], x0: &[f64]) -> f64 {
    let d = norm2(&sub(x, x0));
    let base = norm2(x0);
    if base > 0.0 {
        d / base
    } else {
        d
    }
}

/// One recovery trial on a fresh matrix and a fresh signal.
///
/// Solver failures are recorded as unsuccessful outcomes; only invalid
/// arguments produce an error.
pub fn run_trial(ensemble: Ensemble, n: usize, cols: usize, k: usize, seed: u64, threshold: f64) -> Result<TrialOutcome> {
    if n > cols {
        return Err(Error::validation(format!("n={n} exceeds N={cols}")));
    }
    if !(threshold >= 0.0) {
        return Err(Error::validation(format!("threshold must be nonnegative, got {threshold}")));
    }
    let phi = ensemble.measurement(n, cols, derive_seed(seed, "matrix", 0))?;
    let x0 = gen_sparse_signal(cols, k, derive_seed(seed, "signal", 0))?.to_dense();
    let y = phi.matrix().mul_vec(&x0);
    let (rel_error, solve_iterations, status) = match basis_pursuit(&phi, &y, DEFAULT_TOL, DEFAULT_MAX_ITER) {
        Ok(res) => (relative_error(&res.x_star, &x0), res.iterations, Some(res.status)),
        Err(e) if e.is_validation() => return Err(e),
        Err(_) => (f64::INFINITY, 0, None),
    };
    Ok(TrialOutcome {
        ensemble,
        n,
        cols,
        k,
        seed,
        rel_error,
        success: rel_error <= threshold,
        solve_iterations,
        status,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepParameter {
    K,
    N,
}

impl fmt::Display for SweepParameter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SweepParameter::K => "k",
            SweepParameter::N => "n",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurvePoint {
    pub value: usize,
    pub trials: usize,
    pub successes: usize,
    pub rate: f64,
    pub mean_rel_error: f64,
    pub mean_iterations: f64,
    /// Trials where the solver returned an error.
    pub solver_errors: usize,
}

impl CurvePoint {
    /// Binomial standard error of the rate.
    pub fn standard_error(&self) -> f64 {
        (self.rate * (1.0 - self.rate) / self.trials.max(1) as f64).sqrt()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuccessCurve {
    pub ensemble: Ensemble,
    pub parameter: SweepParameter,
    #[serde(rename = "N")]
    pub cols: usize,
    /// The parameter held fixed: `n` for a sparsity sweep, `k` otherwise.
    pub fixed: usize,
    pub points: Vec<CurvePoint>,
}

/// Runs `trials` trials at one `(n, k)` point. Trial seeds depend on the
/// master seed, the ensemble, the point and the trial index only.
pub fn success_point(
    ensemble: Ensemble,
    cols: usize,
    n: usize,
    k: usize,
    trials: usize,
    master_seed: u64,
    threshold: f64,
) -> Result<(usize, usize, Vec<TrialOutcome>)> {
    let point_seed = derive_seed(master_seed, ensemble.name(), ((n as u64) << 32) | k as u64);
    let outcomes: Vec<TrialOutcome> = (0..trials as u64)
        .into_par_iter()
        .map(|t| run_trial(ensemble, n, cols, k, derive_seed(point_seed, "trial", t), threshold))
        .collect::<Result<_>>()?;
    Ok((n, k, outcomes))
}

fn summarize(value: usize, outcomes: &[TrialOutcome]) -> CurvePoint {
    let trials = outcomes.len();
    let successes = outcomes.iter().filter(|o| o.success).count();
    let finite: Vec<&TrialOutcome> = outcomes.iter().filter(|o| o.rel_error.is_finite()).collect();
    let mean = |f: &dyn Fn(&TrialOutcome) -> f64| {
        if finite.is_empty() {
            f64::NAN
        } else {
            finite.iter().map(|o| f(o)).sum::<f64>() / finite.len() as f64
        }
    };
    CurvePoint {
        value,
        trials,
        successes,
        rate: if trials == 0 { 0.0 } else { successes as f64 / trials as f64 },
        mean_rel_error: mean(&|o| o.rel_error),
        mean_iterations: mean(&|o| o.solve_iterations as f64),
        solver_errors: outcomes.iter().filter(|o| o.status.is_none()).count(),
    }
}

/// One curve point from [`success_point`].
pub fn curve_point(
    ensemble: Ensemble,
    cols: usize,
    n: usize,
    k: usize,
    parameter: SweepParameter,
    trials: usize,
    master_seed: u64,
    threshold: f64,
) -> Result<CurvePoint> {
    let (_, _, outcomes) = success_point(ensemble, cols, n, k, trials, master_seed, threshold)?;
    let value = match parameter {
        SweepParameter::K => k,
        SweepParameter::N => n,
    };
    Ok(summarize(value, &outcomes))
}

fn check_grid(grid: &[usize], name: &str) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::validation(format!("{name} must be nonempty")));
    }
    if grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::validation(format!("{name} must be strictly ascending")));
    }
    Ok(())
}

/// Success rate against sparsity at fixed `n`.
pub fn success_vs_sparsity(
    ensembles: &[Ensemble],
    cols: usize,
    n: usize,
    k_grid: &[usize],
    trials: usize,
    master_seed: u64,
    threshold: f64,
) -> Result<Vec<SuccessCurve>> {
    check_grid(k_grid, "k_grid")?;
    if n == 0 || n > cols {
        return Err(Error::validation(format!("need 1 <= n <= N, got n={n}, N={cols}")));
    }
    if let Some(&k) = k_grid.iter().find(|&&k| k > cols) {
        return Err(Error::validation(format!("sparsity {k} exceeds N={cols}")));
    }
    ensembles
        .iter()
        .map(|&e| {
            let points = k_grid
                .iter()
                .map(|&k| curve_point(e, cols, n, k, SweepParameter::K, trials, master_seed, threshold))
                .collect::<Result<_>>()?;
            Ok(SuccessCurve {
                ensemble: e,
                parameter: SweepParameter::K,
                cols,
                fixed: n,
                points,
            })
        })
        .collect()
}

/// Success rate against the number of measurements at fixed `k`.
pub fn success_vs_measurements(
    ensembles: &[Ensemble],
    cols: usize,
    k: usize,
    n_grid: &[usize],
    trials: usize,
    master_seed: u64,
    threshold: f64,
) -> Result<Vec<SuccessCurve>> {
    check_grid(n_grid, "n_grid")?;
    if k > cols {
        return Err(Error::validation(format!("sparsity {k} exceeds N={cols}")));
    }
    if n_grid[0] == 0 || n_grid[n_grid.len() - 1] > cols {
        return Err(Error::validation(format!("n_grid must lie in 1..={cols}")));
    }
    ensembles
        .iter()
        .map(|&e| {
            let points = n_grid
                .iter()
                .map(|&n| curve_point(e, cols, n, k, SweepParameter::N, trials, master_seed, threshold))
                .collect::<Result<_>>()?;
            Ok(SuccessCurve {
                ensemble: e,
                parameter: SweepParameter::N,
                cols,
                fixed: k,
                points,
            })
        })
        .collect()
}

/// Smallest `n` in `lo..=hi` whose success rate reaches `target`, by
/// bisection (assumes the rate is monotone in `n`). `hi` itself is
/// returned without being tested.
pub fn measurement_threshold(
    ensemble: Ensemble,
    cols: usize,
    k: usize,
    target: f64,
    (mut lo, mut hi): (usize, usize),
    trials: usize,
    master_seed: u64,
    threshold: f64,
) -> Result<usize> {
    if lo == 0 || lo > hi || hi > cols {
        return Err(Error::validation(format!("bisection range {lo}..={hi} must lie in 1..={cols}")));
    }
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        let p = curve_point(ensemble, cols, mid, k, SweepParameter::N, trials, master_seed, threshold)?;
        if p.rate >= target {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    Ok(hi)
}

/// `‖X − M‖_F / ‖M‖_F`.
pub fn relative_frobenius_error(x: &[f64], m: &[f64]) -> Result<f64> {
    if x.len() != m.len() {
        return Err(Error::validation("images differ in size"));
    }
    let base = norm2(m);
    if base == 0.0 {
        return Err(Error::validation("reference image is identically zero"));
    }
    Ok(norm2(&sub(x, m)) / base)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ImageReport {
    /// Unclamped reconstruction.
    pub reconstruction: GrayImage,
    pub mse: f64,
    pub input_nonzeros: usize,
    pub iterations: usize,
    pub status: SolveStatus,
}

/// Measures the column-major vectorization of `image` with an `n × N`
/// matrix from `ensemble` and reconstructs it by ℓ1 minimization.
pub fn image_experiment(image: &GrayImage, n: usize, ensemble: Ensemble, seed: u64, eps: f64) -> Result<ImageReport> {
    let cols = image.height * image.width;
    if image.pixels.len() != cols || cols == 0 {
        return Err(Error::validation("image dimensions do not match its pixel count"));
    }
    if n == 0 || n > cols {
        return Err(Error::validation(format!("need 1 <= n <= {cols}, got {n}")));
    }
    let x0 = image.to_column_major();
    let phi = ensemble.measurement(n, cols, derive_seed(seed, "image-matrix", 0))?;
    let y = phi.matrix().mul_vec(&x0);
    let res = bpdn(&phi, &y, eps, DEFAULT_TOL, DEFAULT_MAX_ITER)?;
    Ok(ImageReport {
        mse: relative_frobenius_error(&res.x_star, &x0)?,
        reconstruction: GrayImage::from_column_major(image.height, image.width, &res.x_star)?,
        input_nonzeros: image.nonzero_count(),
        iterations: res.iterations,
        status: res.status,
    })
}

pub const TEST_IMAGE_SIZE: usize = 64;
pub const TEST_IMAGE_NONZEROS: usize = 739;

/// Deterministic 64×64 test image with exactly 739 nonzero 8-bit pixels:
/// a smooth pattern of blobs and ridges, quantized, keeping only its 739
/// brightest pixels.
pub fn synthetic_test_image() -> GrayImage {
    let s = TEST_IMAGE_SIZE;
    let blobs = [(18.0, 20.0, 7.0, 1.0), (44.0, 40.0, 9.0, 0.85), (16.0, 48.0, 5.0, 0.7), (50.0, 12.0, 6.0, 0.6)];
    let level = |r: usize, c: usize| -> u8 {
        let (y, x) = (r as f64, c as f64);
        let mut v = 0.0;
        for &(cy, cx, w, a) in &blobs {
            let d2 = (y - cy).powi(2) + (x - cx).powi(2);
            v += a * (-d2 / (2.0 * w * w)).exp();
        }
        v += 0.25 * ((x * 0.35).sin() * (y * 0.21).cos()).max(0.0);
        (v.min(1.0) * 255.0).round() as u8
    };
    let mut ranked: Vec<(u8, usize)> = (0..s * s).map(|i| (level(i / s, i % s), i)).collect();
    ranked.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
    let mut pixels = vec![0.0; s * s];
    for &(v, i) in ranked.iter().take(TEST_IMAGE_NONZEROS) {
        pixels[i] = f64::from(v.max(1)) / 255.0;
    }
    GrayImage {
        height: s,
        width: s,
        pixels,
    }
}

/// ℓ1 norm of `x` outside its `k` largest magnitudes.
pub fn best_k_tail_l1(x: &[f64], k: usize) -> f64 {
    let mut mags: Vec<f64> = x.iter().map(|v| v.abs()).collect();
    mags.sort_by(|a, b| b.total_cmp(a));
    mags.iter().skip(k).sum()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NoiseScaling {
    pub eps: f64,
    pub l2_error_at_eps: f64,
    pub l2_error_at_2eps: f64,
    /// `l2_error_at_2eps / l2_error_at_eps`.
    pub growth_ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ErrorBoundReport {
    pub l1_error: f64,
    pub l2_error: f64,
    pub tail_l1: f64,
    /// Absent when `eps = 0`.
    pub noise_scaling: Option<NoiseScaling>,
}

/// Recovers `x0` from `Φx0 + z` with `‖z‖₂ = eps` (random direction from
/// `seed`) under the constraint `‖Φx − y‖₂ ≤ eps`, and repeats at `2·eps`
/// with the noise doubled.
pub fn error_bound_probe(phi: &MeasurementMatrix, x0: &[f64], k: usize, eps: f64, seed: u64) -> Result<ErrorBoundReport> {
    if x0.len() != phi.cols() {
        return Err(Error::validation(format!("signal has length {} but Φ has {} columns", x0.len(), phi.cols())));
    }
    if k == 0 {
        return Err(Error::validation("k must be at least 1"));
    }
    if !(eps >= 0.0 && eps.is_finite()) {
        return Err(Error::validation(format!("eps must be finite and nonnegative, got {eps}")));
    }
    let clean = phi.matrix().mul_vec(x0);
    let mut stream = Stream::derive(seed, "probe-noise", 0);
    let mut dir: Vec<f64> = (0..clean.len()).map(|_| stream.next_signed_unit()).collect();
    let nd = norm2(&dir);
    dir.iter_mut().for_each(|v| *v /= nd);
    let solve = |level: f64| -> Result<Vec<f64>> {
        let y: Vec<f64> = clean.iter().zip(&dir).map(|(c, d)| c + level * d).collect();
        Ok(bpdn(phi, &y, level, DEFAULT_TOL, DEFAULT_MAX_ITER)?.x_star)
    };
    let x = solve(eps)?;
    let diff = sub(&x, x0);
    let l2_error = norm2(&diff);
    let noise_scaling = if eps > 0.0 {
        let doubled = norm2(&sub(&solve(2.0 * eps)?, x0));
        Some(NoiseScaling {
            eps,
            l2_error_at_eps: l2_error,
            l2_error_at_2eps: doubled,
            growth_ratio: doubled / l2_error,
        })
    } else {
        None
    };
    Ok(ErrorBoundReport {
        l1_error: norm1(&diff),
        l2_error,
        tail_l1: best_k_tail_l1(x0, k),
        noise_scaling,
    })
}
