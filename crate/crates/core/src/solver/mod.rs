//! ℓ1 recovery: basis pursuit, basis pursuit denoising, an exact LP
//! reference solver and dual certificates.

mod admm;
mod bpdn;
mod certificate;
pub mod simplex;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::ensembles::MeasurementMatrix;
use crate::error::{Error, Result};
use crate::linalg::{norm1, norm2, Matrix};

pub use admm::{basis_pursuit, BasisPursuit};
pub use bpdn::bpdn;
pub use certificate::{dual_certificate_check, CertificateReport};

pub const DEFAULT_TOL: f64 = 1e-6;
pub const DEFAULT_MAX_ITER: usize = 10_000;
pub const CERTIFICATE_TOL: f64 = 1e-6;

pub const LP_MAX_COLS: usize = 64;
pub const LP_MAX_ROWS: usize = 48;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolveStatus {
    Converged,
    MaxIter,
    Infeasible,
}

impl fmt::Display for SolveStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SolveStatus::Converged => "converged",
            SolveStatus::MaxIter => "max-iter",
            SolveStatus::Infeasible => "infeasible",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RecoveryResult {
    pub x_star: Vec<f64>,
    pub objective: f64,
    pub residual: f64,
    pub iterations: usize,
    pub status: SolveStatus,
    /// `max(0, ‖Φᵀν‖∞ − 1)` for the dual vector found by the solver, if any.
    pub certificate_gap: Option<f64>,
}

impl RecoveryResult {
    fn assemble(
        phi: &Matrix,
        y: &[f64],
        x_star: Vec<f64>,
        iterations: usize,
        status: SolveStatus,
        certificate_gap: Option<f64>,
    ) -> Self {
        let residual = residual_norm(phi, &x_star, y);
        RecoveryResult {
            objective: norm1(&x_star),
            x_star,
            residual,
            iterations,
            status,
            certificate_gap,
        }
    }
}

pub(crate) fn residual_norm(phi: &Matrix, x: &[f64], y: &[f64]) -> f64 {
    let mut r = phi.mul_vec(x);
    r.iter_mut().zip(y).for_each(|(a, b)| *a -= b);
    norm2(&r)
}

pub(crate) fn soft_threshold(v: f64, t: f64) -> f64 {
    if v > t {
        v - t
    } else if v < -t {
        v + t
    } else {
        0.0
    }
}

pub(crate) fn check_inputs(phi: &Matrix, y: &[f64], tol: f64, max_iter: usize) -> Result<()> {
    if y.len() != phi.rows() {
        return Err(Error::validation(format!(
            "y has length {} but the matrix has {} rows",
            y.len(),
            phi.rows()
        )));
    }
    if y.iter().any(|v| !v.is_finite()) {
        return Err(Error::validation("y has non-finite entries"));
    }
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(Error::validation(format!("tol must be positive, got {tol}")));
    }
    if max_iter == 0 {
        return Err(Error::validation("max_iter must be at least 1"));
    }
    Ok(())
}

/// Exact solution of `min ‖x‖₁ s.t. Φx = y` by the dense simplex method on
/// the split `x = u − v`.
pub fn lp_oracle(phi: &MeasurementMatrix, y: &[f64]) -> Result<RecoveryResult> {
    let a = phi.matrix();
    let (n, cols) = (a.rows(), a.cols());
    if cols > LP_MAX_COLS || n > LP_MAX_ROWS {
        return Err(Error::validation(format!(
            "lp_oracle handles at most {LP_MAX_ROWS}x{LP_MAX_COLS}, got {n}x{cols}"
        )));
    }
    check_inputs(a, y, 1.0, 1)?;
    let split = Matrix::from_fn(n, 2 * cols, |i, j| if j < cols { a[(i, j)] } else { -a[(i, j - cols)] });
    let sol = simplex::solve_standard_form(&vec![1.0; 2 * cols], &split, y)?;
    match sol.status {
        simplex::LpStatus::Optimal => {
            let x: Vec<f64> = (0..cols).map(|j| sol.x[j] - sol.x[j + cols]).collect();
            let gap = (crate::linalg::norm_inf(&a.tr_mul_vec(&sol.duals)) - 1.0).max(0.0);
            Ok(RecoveryResult::assemble(a, y, x, sol.pivots, SolveStatus::Converged, Some(gap)))
        }
        _ => Ok(RecoveryResult::assemble(
            a,
            y,
            vec![0.0; cols],
            sol.pivots,
            SolveStatus::Infeasible,
            None,
        )),
    }
}
