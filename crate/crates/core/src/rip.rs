//! Restricted isometry constants.
//!
//! `δ_k = max over k-supports S of max(λ_max(Φ_SᵀΦ_S) - 1, 1 - λ_min(Φ_SᵀΦ_S))`,
//! computed exactly by enumerating supports or bounded from below by
//! sampling them. Also hosts the σ² admissibility intervals of the
//! almost-sure RIP argument for mixed symmetric matrices.

use std::collections::HashSet;
use std::fmt;

use rayon::prelude::*;
use serde::Serialize;

use crate::ensembles::{inverse_sqrt, mixed_rows, MeasurementMatrix, MixedGraphModel};
use crate::error::{Error, Result};
use crate::io::csv::fmt_f64;
use crate::linalg::{dot, symmetric_eigenvalues, Matrix};
use crate::rng::Stream;

/// Largest number of supports [`delta_exhaustive`] will enumerate.
pub const EXHAUSTIVE_LIMIT: u128 = 2_000_000;

/// Above this many columns the Gram entries are formed per support instead
/// of precomputing `ΦᵀΦ`.
const FULL_GRAM_MAX_COLS: usize = 1024;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum RipMethod {
    Exhaustive,
    MonteCarlo { trials: u64, seed: u64 },
}

impl fmt::Display for RipMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RipMethod::Exhaustive => f.write_str("exhaustive"),
            RipMethod::MonteCarlo { .. } => f.write_str("monte-carlo"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RipEstimate {
    pub k: usize,
    pub delta: f64,
    pub method: RipMethod,
    /// Support (0-based, ascending) attaining `delta`.
    pub witness_support: Vec<usize>,
    /// Smallest Gram eigenvalue seen over the examined supports.
    pub gram_min: f64,
    /// Largest Gram eigenvalue seen over the examined supports.
    pub gram_max: f64,
    /// Number of distinct supports evaluated.
    pub supports_examined: u64,
}

impl RipEstimate {
    pub const CSV_HEADER: &'static str = "k,delta,method,trials,gram_min,gram_max,witness";

    pub fn to_csv_line(&self) -> String {
        let trials = match self.method {
            RipMethod::Exhaustive => String::new(),
            RipMethod::MonteCarlo { trials, .. } => trials.to_string(),
        };
        let witness: Vec<String> = self.witness_support.iter().map(usize::to_string).collect();
        format!(
            "{},{},{},{},{},{},{}",
            self.k,
            fmt_f64(self.delta),
            self.method,
            trials,
            fmt_f64(self.gram_min),
            fmt_f64(self.gram_max),
            witness.join(";")
        )
    }
}

/// Source of Gram entries `⟨φ_i, φ_j⟩`.
enum GramSource {
    Full(Matrix),
    /// Rows of `Φᵀ`, i.e. the columns of `Φ`.
    Columns(Matrix),
}

impl GramSource {
    fn new(phi: &Matrix) -> Self {
        if phi.cols() <= FULL_GRAM_MAX_COLS {
            GramSource::Full(phi.gram())
        } else {
            GramSource::Columns(phi.transpose())
        }
    }

    fn entry(&self, i: usize, j: usize) -> f64 {
        match self {
            GramSource::Full(g) => g[(i, j)],
            GramSource::Columns(c) => dot(c.row(i), c.row(j)),
        }
    }

    /// `(λ_min, λ_max)` of `Φ_SᵀΦ_S`.
    fn extremes(&self, support: &[usize]) -> (f64, f64) {
        let k = support.len();
        if k == 1 {
            let g = self.entry(support[0], support[0]);
            return (g, g);
        }
        let mut sub = Matrix::zeros(k, k);
        for a in 0..k {
            for b in a..k {
                let g = self.entry(support[a], support[b]);
                sub[(a, b)] = g;
                sub[(b, a)] = g;
            }
        }
        match symmetric_eigenvalues(&sub) {
            Ok(ev) => (ev[0], ev[k - 1]),
            Err(_) => (f64::NAN, f64::NAN),
        }
    }
}

#[derive(Debug, Clone)]
struct Running {
    delta: f64,
    witness: Vec<usize>,
    gram_min: f64,
    gram_max: f64,
    count: u64,
}

impl Running {
    fn empty() -> Self {
        Running {
            delta: f64::NEG_INFINITY,
            witness: Vec::new(),
            gram_min: f64::INFINITY,
            gram_max: f64::NEG_INFINITY,
            count: 0,
        }
    }

    fn observe(&mut self, support: &[usize], (lo, hi): (f64, f64)) {
        let dev = (hi - 1.0).max(1.0 - lo);
        self.count += 1;
        self.gram_min = self.gram_min.min(lo.max(0.0));
        self.gram_max = self.gram_max.max(hi);
        if dev > self.delta || self.witness.is_empty() {
            self.delta = dev;
            self.witness = support.to_vec();
        }
    }

    /// Associative merge; on equal deviation the lexicographically smaller
    /// witness wins.
    fn merge(mut self, other: Running) -> Running {
        if other.count == 0 {
            return self;
        }
        if self.count == 0 {
            return other;
        }
        self.gram_min = self.gram_min.min(other.gram_min);
        self.gram_max = self.gram_max.max(other.gram_max);
        self.count += other.count;
        if other.delta > self.delta || (other.delta == self.delta && other.witness < self.witness) {
            self.delta = other.delta;
            self.witness = other.witness;
        }
        self
    }

    fn finish(self, k: usize, method: RipMethod) -> RipEstimate {
        RipEstimate {
            k,
            delta: self.delta.max(0.0),
            method,
            witness_support: self.witness,
            gram_min: self.gram_min,
            gram_max: self.gram_max,
            supports_examined: self.count,
        }
    }
}

fn check_order(phi: &MeasurementMatrix, k: usize) -> Result<()> {
    if k == 0 || k > phi.rows() || k > phi.cols() {
        return Err(Error::validation(format!(
            "order k = {k} must satisfy 1 <= k <= min(n, N) = {}",
            phi.rows().min(phi.cols())
        )));
    }
    Ok(())
}

/// `C(n, k)`, saturating at `u128::MAX`.
pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = match acc.checked_mul((n - i) as u128) {
            Some(v) => v / (i as u128 + 1),
            None => return u128::MAX,
        };
    }
    acc
}

/// Advances `c` to the next k-subset of `0..n` in lexicographic order.
fn next_combination(c: &mut [usize], n: usize) -> bool {
    let k = c.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if c[i] < n - k + i {
            c[i] += 1;
            for j in (i + 1)..k {
                c[j] = c[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Exact `δ_k` by enumerating every k-subset of columns.
pub fn delta_exhaustive(phi: &MeasurementMatrix, k: usize) -> Result<RipEstimate> {
    check_order(phi, k)?;
    let cols = phi.cols();
    let count = binomial(cols, k);
    if count > EXHAUSTIVE_LIMIT {
        return Err(Error::TooLarge {
            count,
            limit: EXHAUSTIVE_LIMIT,
        });
    }
    let gram = GramSource::new(phi.matrix());
    let best = (0..=cols - k)
        .into_par_iter()
        .map(|first| {
            // supports starting at `first`: the tail is a (k-1)-subset of first+1..cols
            let span = cols - first - 1;
            let mut tail: Vec<usize> = (0..k - 1).collect();
            let mut support = vec![first; k];
            let mut run = Running::empty();
            loop {
                for (slot, &t) in support[1..].iter_mut().zip(&tail) {
                    *slot = first + 1 + t;
                }
                run.observe(&support, gram.extremes(&support));
                if !next_combination(&mut tail, span) {
                    break;
                }
            }
            run
        })
        .reduce(Running::empty, Running::merge);
    Ok(best.finish(k, RipMethod::Exhaustive))
}

/// Lower bound on `δ_k` from `trials` uniformly sampled supports. Trial `t`
/// uses its own sub-stream, so a longer run extends a shorter one.
pub fn delta_monte_carlo(phi: &MeasurementMatrix, k: usize, trials: u64, seed: u64) -> Result<RipEstimate> {
    check_order(phi, k)?;
    if trials == 0 {
        return Err(Error::validation("monte-carlo needs at least one trial"));
    }
    let cols = phi.cols();
    let mut seen = HashSet::new();
    let mut supports = Vec::new();
    for t in 0..trials {
        let s = Stream::derive(seed, "rip-support", t).sample_subset(cols, k);
        if seen.insert(s.clone()) {
            supports.push(s);
        }
    }
    let gram = GramSource::new(phi.matrix());
    let extremes: Vec<(f64, f64)> = supports.par_iter().map(|s| gram.extremes(s)).collect();
    let mut run = Running::empty();
    for (s, e) in supports.iter().zip(extremes) {
        run.observe(s, e);
    }
    Ok(run.finish(k, RipMethod::MonteCarlo { trials, seed }))
}

/// `δ_{2k} < √2 - 1`, the sufficient condition for exact ℓ1 recovery of
/// k-sparse vectors.
pub fn recovery_condition(delta_2k: f64) -> bool {
    delta_2k < std::f64::consts::SQRT_2 - 1.0
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SupportCase {
    /// Support inside the selected rows Θ.
    DiagInside,
    /// Support disjoint from Θ.
    OffDiag,
    /// Support straddling Θ and its complement.
    MixedBoundary,
}

impl SupportCase {
    pub const ALL: [SupportCase; 3] = [SupportCase::DiagInside, SupportCase::OffDiag, SupportCase::MixedBoundary];
}

impl fmt::Display for SupportCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SupportCase::DiagInside => "diag-inside",
            SupportCase::OffDiag => "off-diag",
            SupportCase::MixedBoundary => "mixed-boundary",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SigmaInterval {
    pub gamma: f64,
    pub delta: f64,
    pub case: SupportCase,
    pub lo: f64,
    pub hi: f64,
    pub feasible: bool,
}

fn check_gamma_delta(gamma: f64, delta: f64) -> Result<()> {
    if !(0.0..1.0).contains(&gamma) {
        return Err(Error::validation(format!("gamma = {gamma} must lie in [0, 1)")));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::validation(format!("delta = {delta} must lie in (0, 1)")));
    }
    Ok(())
}

/// Range of σ² for which the limiting Gram extremes of a support of the
/// given type stay within `[1 - δ, 1 + δ]` when `k/n → γ`.
pub fn sigma_interval(gamma: f64, delta: f64, case: SupportCase) -> Result<SigmaInterval> {
    check_gamma_delta(gamma, delta)?;
    let root = (gamma * (1.0 - gamma)).sqrt();
    let (lo_den, hi_den) = match case {
        SupportCase::DiagInside => {
            let den = 1.0 - 2.0 * root;
            if !(den > 0.0) {
                return Err(Error::Singular(format!(
                    "{case}: lower bound denominator 1 - 2√(γ(1-γ)) = {den} at γ = {gamma}"
                )));
            }
            (den, 1.0 + 4.0 * gamma + 2.0 * root)
        }
        SupportCase::OffDiag => {
            let base = 1.0 - gamma.sqrt();
            (base * base, (1.0 + gamma.sqrt()).powi(2))
        }
        SupportCase::MixedBoundary => {
            let base = 1.0 - (gamma / (1.0 - gamma)).sqrt();
            if !(base > 0.0) {
                return Err(Error::Singular(format!(
                    "{case}: lower bound denominator (1 - √(γ/(1-γ)))² degenerates at γ = {gamma}"
                )));
            }
            (base * base, 1.0 + 7.0 * gamma + 2.0 * gamma.sqrt())
        }
    };
    let lo = (1.0 - delta) / lo_den;
    let hi = (1.0 + delta) / hi_den;
    Ok(SigmaInterval {
        gamma,
        delta,
        case,
        lo,
        hi,
        feasible: lo <= hi,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CaseOutcome {
    pub case: SupportCase,
    pub interval: Option<SigmaInterval>,
    /// Set when the case's bound degenerates.
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SigmaFeasibility {
    pub gamma: f64,
    pub delta: f64,
    pub cases: Vec<CaseOutcome>,
    /// Intersection `[max lo, min hi]` over the nondegenerate cases.
    pub intersection: Option<(f64, f64)>,
    /// True only when every case is nondegenerate and the intersection is
    /// nonempty.
    pub feasible: bool,
}

impl SigmaFeasibility {
    pub fn contains(&self, sigma_sq: f64) -> bool {
        self.feasible && self.intersection.is_some_and(|(lo, hi)| lo <= sigma_sq && sigma_sq <= hi)
    }
}

pub fn sigma_feasible_all_cases(gamma: f64, delta: f64) -> Result<SigmaFeasibility> {
    check_gamma_delta(gamma, delta)?;
    let cases: Vec<CaseOutcome> = SupportCase::ALL
        .iter()
        .map(|&case| match sigma_interval(gamma, delta, case) {
            Ok(iv) => CaseOutcome {
                case,
                interval: Some(iv),
                error: None,
            },
            Err(e) => CaseOutcome {
                case,
                interval: None,
                error: Some(e.to_string()),
            },
        })
        .collect();
    let ok: Vec<&SigmaInterval> = cases.iter().filter_map(|c| c.interval.as_ref()).collect();
    let intersection = if ok.is_empty() {
        None
    } else {
        let lo = ok.iter().map(|i| i.lo).fold(f64::NEG_INFINITY, f64::max);
        let hi = ok.iter().map(|i| i.hi).fold(f64::INFINITY, f64::min);
        Some((lo, hi))
    };
    let feasible = ok.len() == cases.len() && intersection.is_some_and(|(lo, hi)| lo <= hi);
    Ok(SigmaFeasibility {
        gamma,
        delta,
        cases,
        intersection,
        feasible,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GramAsymptoteReport {
    pub n: usize,
    pub k: usize,
    pub gamma: f64,
    pub case: SupportCase,
    pub support: Vec<usize>,
    pub observed_min: f64,
    pub observed_max: f64,
    /// Limiting lower edge for the case (a bound for diag-inside).
    pub predicted_min: f64,
    /// Limiting upper edge for the case (a bound for diag-inside).
    pub predicted_max: f64,
}

/// Builds `Φ` from the first `n` rows of a mixed-model draw and reports the
/// Gram extremes of a support placed inside `Θ` (diag-inside, columns
/// `0..k`) or outside it (off-diag, columns `n..n+k`).
pub fn gram_asymptote_check(
    model: &MixedGraphModel,
    n: usize,
    gamma: f64,
    case: SupportCase,
    seed: u64,
) -> Result<GramAsymptoteReport> {
    model.validate()?;
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(Error::validation(format!("gamma = {gamma} must lie in (0, 1)")));
    }
    let k = (gamma * n as f64).round() as usize;
    if k == 0 {
        return Err(Error::validation(format!("round(γ·n) = 0 for γ = {gamma}, n = {n}")));
    }
    let support: Vec<usize> = match case {
        SupportCase::DiagInside if k <= n && n <= model.vertices => (0..k).collect(),
        SupportCase::OffDiag if n + k <= model.vertices => (n..n + k).collect(),
        SupportCase::MixedBoundary => {
            return Err(Error::validation("straddling supports have no dedicated asymptote check"))
        }
        _ => {
            return Err(Error::validation(format!(
                "cannot place a {case} support of size {k} with n = {n}, N = {}",
                model.vertices
            )))
        }
    };
    let phi = mixed_rows(model, n, seed)?.scaled(inverse_sqrt(n));
    let sub = phi.select_columns(&support);
    let ev = symmetric_eigenvalues(&sub.gram())?;
    let var = model.offdiag_law.declared_variance;
    let (pmin, pmax) = match case {
        SupportCase::DiagInside => {
            let root = (gamma * (1.0 - gamma)).sqrt();
            ((1.0 - 2.0 * root) * var, (1.0 + 4.0 * gamma + 2.0 * root) * var)
        }
        _ => ((1.0 - gamma.sqrt()).powi(2) * var, (1.0 + gamma.sqrt()).powi(2) * var),
    };
    Ok(GramAsymptoteReport {
        n,
        k,
        gamma,
        case,
        support,
        observed_min: ev[0],
        observed_max: ev[k - 1],
        predicted_min: pmin,
        predicted_max: pmax,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::DistributionSpec;
    use crate::ensembles::sample_iid_matrix;

    fn bernoulli_phi(n: usize, cols: usize, seed: u64) -> MeasurementMatrix {
        sample_iid_matrix(&DistributionSpec::bernoulli_sym(), n, cols, seed).unwrap().normalized()
    }

    /// Largest eigenvalue deviation of a 2×2 Gram block from the
    /// characteristic polynomial `λ² - tλ + det`.
    fn pair_deviation(phi: &Matrix, i: usize, j: usize) -> f64 {
        let (ci, cj) = (phi.column(i), phi.column(j));
        let a: f64 = ci.iter().map(|x| x * x).sum();
        let d: f64 = cj.iter().map(|x| x * x).sum();
        let b: f64 = ci.iter().zip(&cj).map(|(x, y)| x * y).sum();
        let t = a + d;
        let disc = (t * t - 4.0 * (a * d - b * b)).max(0.0).sqrt();
        let (lo, hi) = ((t - disc) / 2.0, (t + disc) / 2.0);
        (hi - 1.0).max(1.0 - lo)
    }

    #[test]
    fn binomial_and_combinations() {
        assert_eq!(binomial(12, 2), 66);
        assert_eq!(binomial(256, 3), 2_763_520);
        assert_eq!(binomial(5, 7), 0);
        let mut c = vec![0, 1];
        let mut all = vec![c.clone()];
        while next_combination(&mut c, 4) {
            all.push(c.clone());
        }
        assert_eq!(all, vec![vec![0, 1], vec![0, 2], vec![0, 3], vec![1, 2], vec![1, 3], vec![2, 3]]);
    }

    #[test]
    fn identity_has_zero_delta() {
        let phi = MeasurementMatrix::from_matrix(Matrix::identity(6)).unwrap();
        for k in 1..=6 {
            let est = delta_exhaustive(&phi, k).unwrap();
            assert!(est.delta.abs() < 1e-15, "k={k}: {}", est.delta);
            assert_eq!(est.supports_examined as u128, binomial(6, k));
        }
        let mc = delta_monte_carlo(&phi, 3, 50, 1).unwrap();
        assert!(mc.delta.abs() < 1e-15);
    }

    #[test]
    fn duplicated_columns_give_unit_delta() {
        let m = Matrix::from_rows(&[vec![1.0, 1.0, 0.0], vec![0.0, 0.0, 1.0]]).unwrap();
        let phi = MeasurementMatrix::from_matrix(m.scaled(1.0 / 2f64.sqrt()).select_columns(&[0, 1, 2])).unwrap();
        // columns 0 and 1 equal (1/√2, 0): Gram [[.5,.5],[.5,.5]] has eigenvalues 0 and 1
        let est = delta_exhaustive(&phi, 2).unwrap();
        assert!(est.gram_min.abs() < 1e-15);
        assert!((est.delta - 1.0).abs() < 1e-15);
        assert_eq!(est.witness_support, vec![0, 1]);
    }

    #[test]
    fn pairs_match_closed_form_oracle() {
        let phi = bernoulli_phi(8, 12, 4);
        let est = delta_exhaustive(&phi, 2).unwrap();
        let mut best = f64::NEG_INFINITY;
        for i in 0..12 {
            for j in (i + 1)..12 {
                best = best.max(pair_deviation(phi.matrix(), i, j));
            }
        }
        assert!((est.delta - best).abs() < 1e-10, "{} vs {best}", est.delta);
        assert_eq!(est.supports_examined, 66);
        let w = &est.witness_support;
        assert!((pair_deviation(phi.matrix(), w[0], w[1]) - est.delta).abs() < 1e-10);
    }

    #[test]
    fn witness_is_lexicographically_first_on_ties() {
        let phi = MeasurementMatrix::from_matrix(Matrix::identity(4).scaled(2.0)).unwrap();
        let est = delta_exhaustive(&phi, 2).unwrap();
        assert_eq!(est.witness_support, vec![0, 1]);
        assert!((est.delta - 3.0).abs() < 1e-12);
    }

    #[test]
    fn guard_and_order_errors() {
        let phi = bernoulli_phi(4, 300, 1);
        assert!(matches!(delta_exhaustive(&phi, 3), Err(Error::TooLarge { .. })));
        assert!(delta_exhaustive(&phi, 0).is_err());
        assert!(delta_exhaustive(&phi, 5).is_err());
        assert!(delta_monte_carlo(&phi, 2, 0, 1).is_err());
    }

    #[test]
    fn monte_carlo_single_trial_and_coverage() {
        let phi = bernoulli_phi(6, 10, 9);
        let one = delta_monte_carlo(&phi, 2, 1, 3).unwrap();
        assert_eq!(one.supports_examined, 1);
        let w = &one.witness_support;
        assert!((pair_deviation(phi.matrix(), w[0], w[1]) - one.delta).abs() < 1e-12);

        let full = delta_monte_carlo(&phi, 2, 10_000, 3).unwrap();
        let exact = delta_exhaustive(&phi, 2).unwrap();
        assert_eq!(full.supports_examined, 45);
        assert!((full.delta - exact.delta).abs() <= 1e-12);
    }

    #[test]
    fn monte_carlo_is_monotone_in_trials() {
        let phi = bernoulli_phi(10, 40, 2);
        let mut prev = 0.0;
        for trials in [1, 5, 20, 100, 400] {
            let d = delta_monte_carlo(&phi, 3, trials, 11).unwrap().delta;
            assert!(d >= prev);
            prev = d;
        }
    }

    #[test]
    fn recovery_threshold() {
        assert!(recovery_condition(0.0));
        assert!(!recovery_condition(0.5));
        assert!(recovery_condition(0.41421));
        assert!(!recovery_condition(0.41422));
    }

    #[test]
    fn sigma_interval_examples() {
        for case in SupportCase::ALL {
            for delta in [0.1, 0.3, 0.5] {
                let iv = sigma_interval(0.0, delta, case).unwrap();
                assert_eq!((iv.lo, iv.hi), (1.0 - delta, 1.0 + delta));
                assert!(iv.feasible);
            }
        }
        let iv = sigma_interval(0.01, 0.3, SupportCase::OffDiag).unwrap();
        assert!((iv.lo - 0.7 / 0.81).abs() < 1e-12);
        assert!((iv.hi - 1.3 / 1.21).abs() < 1e-12);
        assert!((iv.lo - 0.86420).abs() < 1e-5 && (iv.hi - 1.07438).abs() < 1e-5);
        assert!(matches!(sigma_interval(0.5, 0.3, SupportCase::DiagInside), Err(Error::Singular(_))));
        assert!(matches!(sigma_interval(0.5, 0.3, SupportCase::MixedBoundary), Err(Error::Singular(_))));
        assert!(sigma_interval(1.0, 0.3, SupportCase::OffDiag).is_err());
        assert!(sigma_interval(0.1, 0.0, SupportCase::OffDiag).is_err());
    }

    #[test]
    fn feasibility_examples() {
        let f = sigma_feasible_all_cases(0.0, 0.5).unwrap();
        assert!(f.feasible);
        assert_eq!(f.intersection, Some((0.5, 1.5)));
        let g = sigma_feasible_all_cases(0.3, 0.1).unwrap();
        assert!(!g.feasible);
        let diag = g.cases[0].interval.unwrap();
        let mixed = g.cases[2].interval.unwrap();
        assert!(diag.lo > 10.0 && mixed.hi < 0.27);
        let degenerate = sigma_feasible_all_cases(0.5, 0.3).unwrap();
        assert!(!degenerate.feasible);
        assert!(degenerate.cases[0].error.is_some());
        assert!(degenerate.cases[1].interval.is_some());
    }

    #[test]
    fn feasibility_is_monotone_in_gamma() {
        let grid: Vec<f64> = (0..100).map(|i| i as f64 * 0.004).collect();
        let flags: Vec<bool> = grid
            .iter()
            .map(|&g| sigma_feasible_all_cases(g, 0.4).unwrap().feasible)
            .collect();
        if let Some(last) = flags.iter().rposition(|&f| f) {
            assert!(flags[..=last].iter().all(|&f| f), "{flags:?}");
        }
        assert!(flags[0]);
    }

    #[test]
    fn unit_variance_admissible_for_small_gamma() {
        for gi in 0..=10 {
            let gamma = gi as f64 * 1e-4;
            for di in 1..=9 {
                let delta = di as f64 * 0.1;
                let f = sigma_feasible_all_cases(gamma, delta).unwrap();
                assert!(f.contains(1.0), "gamma {gamma} delta {delta}: {:?}", f.intersection);
            }
        }
    }

    #[test]
    fn gram_asymptote_small_gamma() {
        let model = MixedGraphModel::default_mixed(1100);
        let r = gram_asymptote_check(&model, 1000, 0.001, SupportCase::OffDiag, 2).unwrap();
        assert_eq!(r.k, 1);
        assert!((0.8..=1.2).contains(&r.observed_min) && (0.8..=1.2).contains(&r.observed_max));
        let r = gram_asymptote_check(&model, 1000, 0.001, SupportCase::DiagInside, 2).unwrap();
        assert!((0.8..=1.2).contains(&r.observed_min));
        assert!(gram_asymptote_check(&model, 1000, 0.2, SupportCase::OffDiag, 2).is_err());
        assert!(gram_asymptote_check(&model, 1000, 0.01, SupportCase::MixedBoundary, 2).is_err());
    }
}
