use super::certificate::polish_on_support;
use super::{check_inputs, soft_threshold, RecoveryResult, SolveStatus, CERTIFICATE_TOL};
use crate::ensembles::MeasurementMatrix;
use crate::error::{Error, Result};
use crate::linalg::{norm2, Cholesky, Matrix};

const RHO: f64 = 1.0;
const RELAX: f64 = 1.6;
const RANK_TOL: f64 = 1e-10;
const SUPPORT_CHECK_EVERY: usize = 10;
const FIRST_BACKOFF: usize = 20;
const MAX_BACKOFF: usize = 640;
/// Gap accepted for an early exit; the final polish uses the looser
/// certificate tolerance.
const EARLY_EXIT_GAP: f64 = 1e-9;

/// Basis pursuit solver bound to one matrix. Holds the Cholesky factor of
/// `ΦΦᵀ`, so repeated solves on the same `Φ` skip the factorization.
#[derive(Debug, Clone)]
pub struct BasisPursuit<'a> {
    phi: &'a Matrix,
    chol: Cholesky,
}

impl<'a> BasisPursuit<'a> {
    /// Fails with [`Error::RankDeficient`] unless `Φ` has full row rank
    /// with `σ_min(Φ) ≥ 1e-10`.
    pub fn new(phi: &'a Matrix) -> Result<Self> {
        if phi.rows() == 0 || phi.rows() > phi.cols() {
            return Err(Error::RankDeficient(format!(
                "a {}x{} matrix cannot have full row rank",
                phi.rows(),
                phi.cols()
            )));
        }
        let chol = Cholesky::new(&phi.outer_gram())?;
        let sigma_min = chol.smallest_eigenvalue_estimate(200).max(0.0).sqrt();
        if sigma_min < RANK_TOL {
            return Err(Error::RankDeficient(format!("smallest singular value {sigma_min:e}")));
        }
        Ok(BasisPursuit { phi, chol })
    }

    pub fn matrix(&self) -> &Matrix {
        self.phi
    }

    /// `(ΦΦᵀ)⁻¹ Φ v`
    fn range_coefficients(&self, v: &[f64]) -> Vec<f64> {
        let mut w = self.phi.mul_vec(v);
        self.chol.solve_in_place(&mut w);
        w
    }

    /// Orthogonal projection of `v` onto `{x : Φx = y}`.
    pub fn project(&self, v: &[f64], y: &[f64]) -> Vec<f64> {
        let mut w = self.phi.mul_vec(v);
        w.iter_mut().zip(y).for_each(|(a, b)| *a -= b);
        self.chol.solve_in_place(&mut w);
        let correction = self.phi.tr_mul_vec(&w);
        v.iter().zip(&correction).map(|(a, b)| a - b).collect()
    }

    pub fn solve(&self, y: &[f64], tol: f64, max_iter: usize) -> Result<RecoveryResult> {
        let phi = self.phi;
        check_inputs(phi, y, tol, max_iter)?;
        let cols = phi.cols();
        let y_norm = norm2(y);
        if y_norm == 0.0 {
            return Ok(RecoveryResult::assemble(phi, y, vec![0.0; cols], 0, SolveStatus::Converged, Some(0.0)));
        }
        let threshold = tol * (cols as f64).sqrt();

        let mut z = self.project(&vec![0.0; cols], y);
        let mut u = vec![0.0; cols];
        let mut shifted = vec![0.0; cols];
        let mut last_signs: Vec<i8> = Vec::new();
        let mut stable = 0usize;
        let mut next_attempt = 0usize;
        let mut backoff = FIRST_BACKOFF;
        let mut converged = false;
        let mut iterations = 0;

        while iterations < max_iter {
            iterations += 1;
            shifted.iter_mut().zip(z.iter().zip(&u)).for_each(|(s, (a, b))| *s = a - b);
            let x = self.project(&shifted, y);
            let mut dual_sq = 0.0;
            let mut primal_sq = 0.0;
            for j in 0..cols {
                let relaxed = RELAX * x[j] + (1.0 - RELAX) * z[j];
                let v = relaxed + u[j];
                let zj = soft_threshold(v, 1.0 / RHO);
                dual_sq += (zj - z[j]) * (zj - z[j]);
                z[j] = zj;
                let r = x[j] - zj;
                primal_sq += r * r;
                u[j] += relaxed - zj;
            }
            if primal_sq.sqrt() <= threshold && RHO * dual_sq.sqrt() <= threshold {
                converged = true;
                break;
            }
            if iterations % SUPPORT_CHECK_EVERY == 0 {
                let signs: Vec<i8> = z.iter().map(|&v| sign_of(v)).collect();
                if signs == last_signs {
                    stable += 1;
                } else {
                    stable = 0;
                    last_signs = signs;
                }
                if stable >= 2 && iterations >= next_attempt {
                    if let Some(done) = self.try_polish(y, &z, &u, EARLY_EXIT_GAP) {
                        return Ok(RecoveryResult::assemble(
                            phi,
                            y,
                            done.x,
                            iterations,
                            SolveStatus::Converged,
                            Some(done.gap),
                        ));
                    }
                    next_attempt = iterations + backoff;
                    backoff = (backoff * 2).min(MAX_BACKOFF);
                }
            }
        }

        if let Some(done) = self.try_polish(y, &z, &u, CERTIFICATE_TOL) {
            return Ok(RecoveryResult::assemble(
                phi,
                y,
                done.x,
                iterations,
                SolveStatus::Converged,
                Some(done.gap),
            ));
        }
        let x_star = self.project(&z, y);
        let status = if converged && super::residual_norm(phi, &x_star, y) <= tol * y_norm.max(1.0) {
            SolveStatus::Converged
        } else {
            SolveStatus::MaxIter
        };
        Ok(RecoveryResult::assemble(phi, y, x_star, iterations, status, None))
    }

    fn try_polish(&self, y: &[f64], z: &[f64], u: &[f64], max_gap: f64) -> Option<super::certificate::Polished> {
        let mut nu0 = self.range_coefficients(u);
        nu0.iter_mut().for_each(|v| *v *= RHO);
        let polished = polish_on_support(self.phi, y, z, &nu0)?;
        (polished.gap <= max_gap).then_some(polished)
    }
}

fn sign_of(v: f64) -> i8 {
    if v > 0.0 {
        1
    } else if v < 0.0 {
        -1
    } else {
        0
    }
}

/// `min ‖x‖₁ s.t. Φx = y` by alternating projections onto the affine
/// constraint set and soft thresholding.
pub fn basis_pursuit(phi: &MeasurementMatrix, y: &[f64], tol: f64, max_iter: usize) -> Result<RecoveryResult> {
    BasisPursuit::new(phi.matrix())?.solve(y, tol, max_iter)
}
