use super::admm::BasisPursuit;
use super::certificate::Polished;
use super::{check_inputs, soft_threshold, RecoveryResult, SolveStatus, CERTIFICATE_TOL};
use crate::ensembles::MeasurementMatrix;
use crate::error::{Error, Result};
use crate::linalg::{dot, norm2, norm_inf, Matrix, Qr};

const STEP_FRACTION: f64 = 0.9;
const BETA: f64 = 1.0;
const SUPPORT_CHECK_EVERY: usize = 10;
const FIRST_BACKOFF: usize = 20;
const MAX_BACKOFF: usize = 640;
const EARLY_EXIT_GAP: f64 = 1e-9;

/// Largest singular value by power iteration on `ΦᵀΦ`.
pub(crate) fn spectral_norm(phi: &Matrix) -> f64 {
    let cols = phi.cols();
    let mut v: Vec<f64> = (0..cols).map(|j| 1.0 + (j % 7) as f64 * 0.1).collect();
    let mut estimate = 0.0;
    for _ in 0..500 {
        let nv = norm2(&v);
        if nv == 0.0 {
            return 0.0;
        }
        v.iter_mut().for_each(|x| *x /= nv);
        let w = phi.tr_mul_vec(&phi.mul_vec(&v));
        let next = dot(&v, &w);
        v = w;
        if (next - estimate).abs() <= 1e-10 * next {
            estimate = next;
            break;
        }
        estimate = next;
    }
    estimate.max(0.0).sqrt()
}

fn project_ball(v: &mut [f64], y: &[f64], eps: f64) {
    let mut d: Vec<f64> = v.iter().zip(y).map(|(a, b)| a - b).collect();
    let nd = norm2(&d);
    if nd > eps {
        d.iter_mut().for_each(|x| *x *= eps / nd);
        v.iter_mut().zip(y.iter().zip(&d)).for_each(|(out, (b, dd))| *out = b + dd);
    }
}

/// `min ‖x‖₁ s.t. ‖Φx − y‖₂ ≤ ε`. With `ε = 0` this is [`basis_pursuit`].
///
/// [`basis_pursuit`]: super::basis_pursuit
pub fn bpdn(phi: &MeasurementMatrix, y: &[f64], eps: f64, tol: f64, max_iter: usize) -> Result<RecoveryResult> {
    if !(eps >= 0.0 && eps.is_finite()) {
        return Err(Error::validation(format!("eps must be finite and nonnegative, got {eps}")));
    }
    let bp = BasisPursuit::new(phi.matrix())?;
    if eps == 0.0 {
        return bp.solve(y, tol, max_iter);
    }
    let a = phi.matrix();
    check_inputs(a, y, tol, max_iter)?;
    let cols = a.cols();
    if norm2(y) <= eps {
        return Ok(RecoveryResult::assemble(a, y, vec![0.0; cols], 0, SolveStatus::Converged, Some(0.0)));
    }

    let tau = STEP_FRACTION / spectral_norm(a).powi(2);
    let threshold = tol * (cols as f64).sqrt();
    let mut x = vec![0.0; cols];
    let mut ax = vec![0.0; a.rows()];
    let mut r = ax.clone();
    project_ball(&mut r, y, eps);
    let mut w = vec![0.0; a.rows()];
    let mut last_signs: Vec<i8> = Vec::new();
    let mut stable = 0usize;
    let mut next_attempt = 0usize;
    let mut backoff = FIRST_BACKOFF;
    let mut iterations = 0;
    let mut converged = false;

    while iterations < max_iter {
        iterations += 1;
        let coupling: Vec<f64> = (0..a.rows()).map(|i| ax[i] - r[i] + w[i]).collect();
        let g = a.tr_mul_vec(&coupling);
        let mut step_sq = 0.0;
        for j in 0..cols {
            let next = soft_threshold(x[j] - tau * g[j], tau / BETA);
            step_sq += (next - x[j]) * (next - x[j]);
            x[j] = next;
        }
        ax = a.mul_vec(&x);
        let r_old = r.clone();
        r = (0..a.rows()).map(|i| ax[i] + w[i]).collect();
        project_ball(&mut r, y, eps);
        let mut primal_sq = 0.0;
        for i in 0..a.rows() {
            let d = ax[i] - r[i];
            primal_sq += d * d;
            w[i] += d;
        }
        let dr: Vec<f64> = r.iter().zip(&r_old).map(|(p, q)| p - q).collect();
        let dual = BETA * norm2(&a.tr_mul_vec(&dr)) + step_sq.sqrt();
        if primal_sq.sqrt() <= threshold && dual <= threshold {
            converged = true;
            break;
        }
        if iterations % SUPPORT_CHECK_EVERY == 0 {
            let signs: Vec<i8> = x.iter().map(|&v| (v > 0.0) as i8 - (v < 0.0) as i8).collect();
            if signs == last_signs {
                stable += 1;
            } else {
                stable = 0;
                last_signs = signs;
            }
            if stable >= 2 && iterations >= next_attempt {
                if let Some(done) = polish_ball(a, y, eps, &x).filter(|p| p.gap <= EARLY_EXIT_GAP) {
                    return Ok(RecoveryResult::assemble(a, y, done.x, iterations, SolveStatus::Converged, Some(done.gap)));
                }
                next_attempt = iterations + backoff;
                backoff = (backoff * 2).min(MAX_BACKOFF);
            }
        }
    }

    if let Some(done) = polish_ball(a, y, eps, &x).filter(|p| p.gap <= CERTIFICATE_TOL) {
        return Ok(RecoveryResult::assemble(a, y, done.x, iterations, SolveStatus::Converged, Some(done.gap)));
    }
    let residual = super::residual_norm(a, &x, y);
    let status = if converged && residual <= eps + tol {
        SolveStatus::Converged
    } else {
        SolveStatus::MaxIter
    };
    Ok(RecoveryResult::assemble(a, y, x, iterations, status, None))
}

/// On the support `S` with signs `s` of `guide`, the optimum has the form
/// `x_S(t) = (Φ_SᵀΦ_S)⁻¹(Φ_Sᵀy − t·s)` with `t > 0` chosen so that the
/// residual lies on the ε-sphere; `ν = r/t` certifies it.
fn polish_ball(a: &Matrix, y: &[f64], eps: f64, guide: &[f64]) -> Option<Polished> {
    let support: Vec<usize> = (0..guide.len()).filter(|&j| guide[j] != 0.0).collect();
    if support.is_empty() || support.len() > a.rows() {
        return None;
    }
    let signs: Vec<f64> = support.iter().map(|&j| guide[j].signum()).collect();
    let phi_s = a.select_columns(&support);
    let qr = Qr::new(&phi_s).ok()?;
    let x_ls = qr.solve_ls(y);
    let fit = phi_s.mul_vec(&x_ls);
    let r_ls: Vec<f64> = y.iter().zip(&fit).map(|(p, q)| p - q).collect();
    let h = qr.solve_gram(&signs);
    let q = phi_s.mul_vec(&h);
    let slack = eps * eps - dot(&r_ls, &r_ls);
    let qq = dot(&q, &q);
    if !(slack > 0.0 && qq > 0.0) {
        return None;
    }
    let t = (slack / qq).sqrt();
    let xs: Vec<f64> = x_ls.iter().zip(&h).map(|(p, q)| p - t * q).collect();
    if xs.iter().zip(&signs).any(|(v, s)| *v != 0.0 && v.signum() != *s) {
        return None;
    }
    let fit = phi_s.mul_vec(&xs);
    let nu: Vec<f64> = y.iter().zip(&fit).map(|(p, q)| (p - q) / t).collect();
    let gap = (norm_inf(&a.tr_mul_vec(&nu)) - 1.0).max(0.0);
    let mut x = vec![0.0; a.cols()];
    for (&j, &v) in support.iter().zip(&xs) {
        x[j] = v;
    }
    Some(Polished { x, gap })
}
