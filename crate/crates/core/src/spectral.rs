//! Extreme singular values and eigenvalues, plus the two asymptotic edge laws
//! the RIP argument rests on: the Bai–Yin edges `1 ∓ √y` of scaled iid
//! rectangular matrices and the `2σ` edge of scaled symmetric matrices.

use serde::Serialize;

use crate::distributions::DistributionSpec;
use crate::ensembles::{inverse_sqrt, mixed_rows, sample_iid_matrix, MixedGraphModel};
use crate::error::{Error, Result};
use crate::io::csv::fmt_f64;
use crate::linalg::{self, Matrix};

pub const SYMMETRY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpectralEdgeReport {
    pub n: usize,
    /// Aspect ratio `p/n`; 1 for the square symmetric check.
    pub y: f64,
    pub observed_min: f64,
    pub observed_max: f64,
    pub predicted_min: f64,
    pub predicted_max: f64,
    pub abs_deviation: f64,
}

impl SpectralEdgeReport {
    pub const CSV_HEADER: &'static str = "n,y,observed_min,observed_max,predicted_min,predicted_max,abs_deviation";

    pub fn to_csv_line(&self) -> String {
        [
            self.n.to_string(),
            fmt_f64(self.y),
            fmt_f64(self.observed_min),
            fmt_f64(self.observed_max),
            fmt_f64(self.predicted_min),
            fmt_f64(self.predicted_max),
            fmt_f64(self.abs_deviation),
        ]
        .join(",")
    }
}

/// `(σ_min, σ_max)` of the matrix as given.
pub fn extreme_singular_values(m: &Matrix) -> Result<(f64, f64)> {
    if m.rows() == 0 || m.cols() == 0 {
        return Err(Error::validation("matrix is empty"));
    }
    if !m.is_finite() {
        return Err(Error::validation("matrix has non-finite entries"));
    }
    let s = linalg::singular_values(m)?;
    Ok((s[0], s[s.len() - 1]))
}

/// `(λ_min, λ_max)`; rejects input that is not symmetric to `1e-12`.
pub fn extreme_eigenvalues_symmetric(m: &Matrix) -> Result<(f64, f64)> {
    if m.rows() == 0 || m.rows() != m.cols() {
        return Err(Error::validation("symmetric eigenvalues need a nonempty square matrix"));
    }
    if !m.is_finite() {
        return Err(Error::validation("matrix has non-finite entries"));
    }
    let asym = m.asymmetry();
    if asym > SYMMETRY_TOL * m.max_abs().max(1.0) {
        return Err(Error::validation(format!("matrix is not symmetric (max |M - Mᵀ| = {asym:e})")));
    }
    let ev = linalg::symmetric_eigenvalues(m)?;
    Ok((ev[0], ev[ev.len() - 1]))
}

fn check_centered(spec: &DistributionSpec) -> Result<()> {
    spec.validate()?;
    if spec.declared_mean.abs() > 1e-12 || !(spec.declared_variance > 0.0) {
        return Err(Error::validation(format!("{spec} must be centered with positive variance")));
    }
    if !spec.declared_fourth_moment.is_some_and(f64::is_finite) {
        return Err(Error::validation(format!("{spec} needs a finite fourth moment")));
    }
    Ok(())
}

/// Samples an `n × round(y·n)` iid matrix, scales by `n^{-1/2}` and compares
/// its extreme singular values with `√v (1 ∓ √y)`.
pub fn bai_yin_check(spec: &DistributionSpec, n: usize, y: f64, seed: u64) -> Result<SpectralEdgeReport> {
    if !(y > 0.0 && y < 1.0) {
        return Err(Error::validation(format!("aspect ratio {y} must lie in (0, 1)")));
    }
    check_centered(spec)?;
    let p = (y * n as f64).round() as usize;
    if p < 2 {
        return Err(Error::validation(format!("round(y·n) = {p} must be at least 2")));
    }
    let a = sample_iid_matrix(spec, n, p, seed)?.normalized();
    let (lo, hi) = extreme_singular_values(a.matrix())?;
    let sd = spec.declared_variance.sqrt();
    let (pmin, pmax) = (sd * (1.0 - y.sqrt()), sd * (1.0 + y.sqrt()));
    Ok(SpectralEdgeReport {
        n,
        y,
        observed_min: lo,
        observed_max: hi,
        predicted_min: pmin,
        predicted_max: pmax,
        abs_deviation: (lo - pmin).abs().max((hi - pmax).abs()),
    })
}

/// Samples the `n × n` mixed symmetric matrix, scales by `n^{-1/2}` and
/// compares `λ_max` with `2σ`. The model's vertex count is replaced by `n`.
pub fn semicircle_edge_check(model: &MixedGraphModel, n: usize, seed: u64) -> Result<SpectralEdgeReport> {
    let model = MixedGraphModel {
        vertices: n,
        ..model.clone()
    };
    model.validate()?;
    let m = mixed_rows(&model, n, seed)?.scaled(inverse_sqrt(n));
    let (lo, hi) = extreme_eigenvalues_symmetric(&m)?;
    let edge = 2.0 * model.sigma();
    Ok(SpectralEdgeReport {
        n,
        y: 1.0,
        observed_min: lo,
        observed_max: hi,
        predicted_min: -edge,
        predicted_max: edge,
        abs_deviation: (hi - edge).abs(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trivial_spectra() {
        let (lo, hi) = extreme_singular_values(&Matrix::identity(3)).unwrap();
        assert!((lo - 1.0).abs() < 1e-14 && (hi - 1.0).abs() < 1e-14);
        let (lo, hi) = extreme_singular_values(&Matrix::diag(&[3.0, 4.0])).unwrap();
        assert!((lo - 3.0).abs() < 1e-14 && (hi - 4.0).abs() < 1e-14);
        let (lo, hi) = extreme_eigenvalues_symmetric(&Matrix::diag(&[-1.0, 5.0])).unwrap();
        assert!((lo + 1.0).abs() < 1e-14 && (hi - 5.0).abs() < 1e-14);
    }

    #[test]
    fn shift_moves_eigenvalues_exactly() {
        let mut m = Matrix::from_fn(6, 6, |i, j| ((i + 1) * (j + 1)) as f64 / 7.0 + if i == j { (i as f64).sin() } else { 0.0 });
        let (lo, hi) = extreme_eigenvalues_symmetric(&m).unwrap();
        for i in 0..6 {
            m[(i, i)] += 2.5;
        }
        let (lo2, hi2) = extreme_eigenvalues_symmetric(&m).unwrap();
        assert!((lo2 - lo - 2.5).abs() < 1e-9);
        assert!((hi2 - hi - 2.5).abs() < 1e-9);
    }

    #[test]
    fn rejects_invalid_input() {
        let asym = Matrix::from_rows(&[vec![1.0, 2.0], vec![2.0 + 1e-9, 1.0]]).unwrap();
        assert!(matches!(extreme_eigenvalues_symmetric(&asym), Err(Error::Validation(_))));
        let nan = Matrix::from_rows(&[vec![f64::NAN]]).unwrap();
        assert!(extreme_singular_values(&nan).is_err());
        assert!(extreme_eigenvalues_symmetric(&Matrix::zeros(2, 3)).is_err());
    }

    #[test]
    fn bai_yin_preconditions() {
        let g = DistributionSpec::gaussian_unit();
        assert!(bai_yin_check(&g, 1, 1.0, 0).is_err());
        assert!(bai_yin_check(&g, 100, 0.0, 0).is_err());
        assert!(bai_yin_check(&g, 10, 0.1, 0).is_err());
        let shifted = DistributionSpec::discrete(vec![(0.0, 0.5), (2.0, 0.5)]).unwrap();
        assert!(bai_yin_check(&shifted, 100, 0.5, 0).is_err());
    }

    #[test]
    fn bai_yin_gaussian_quarter() {
        let r = bai_yin_check(&DistributionSpec::gaussian_unit(), 1000, 0.25, 3).unwrap();
        assert!((0.45..=0.55).contains(&r.observed_min), "{r:?}");
        assert!((1.44..=1.56).contains(&r.observed_max), "{r:?}");
        assert_eq!((r.predicted_min, r.predicted_max), (0.5, 1.5));
    }

    #[test]
    fn bai_yin_three_point_tenth() {
        let r = bai_yin_check(&DistributionSpec::three_point(), 1000, 0.1, 8).unwrap();
        assert!((1.31 * 0.97..=1.32 * 1.05).contains(&r.observed_max), "{r:?}");
    }

    #[test]
    fn semicircle_edges() {
        let model = MixedGraphModel::default_mixed(1000);
        let r = semicircle_edge_check(&model, 1000, 5).unwrap();
        assert!((1.9..=2.1).contains(&r.observed_max), "{r:?}");

        let half = DistributionSpec::discrete(vec![(-0.5, 0.5), (0.5, 0.5)]).unwrap();
        let m = MixedGraphModel::new(1000, DistributionSpec::gaussian_unit(), half).unwrap();
        let r = semicircle_edge_check(&m, 1000, 6).unwrap();
        assert!((0.95..=1.05).contains(&r.observed_max), "{r:?}");

        let tp = MixedGraphModel::new(1000, DistributionSpec::three_point(), DistributionSpec::three_point()).unwrap();
        let r = semicircle_edge_check(&tp, 1000, 7).unwrap();
        assert!((1.9..=2.1).contains(&r.observed_max), "{r:?}");
    }

    #[test]
    fn csv_line_has_seven_fields() {
        let r = SpectralEdgeReport {
            n: 10,
            y: 0.25,
            observed_min: 0.5,
            observed_max: 1.5,
            predicted_min: 0.5,
            predicted_max: 1.5,
            abs_deviation: 0.0,
        };
        assert_eq!(r.to_csv_line(), "10,0.25,0.5,1.5,0.5,1.5,0");
        assert_eq!(SpectralEdgeReport::CSV_HEADER.split(',').count(), 7);
    }
}
