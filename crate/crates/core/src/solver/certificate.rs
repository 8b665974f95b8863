use super::simplex::{solve_standard_form, LpStatus};
use crate::ensembles::MeasurementMatrix;
use crate::linalg::{norm2, norm_inf, Matrix, Qr};

/// Size limits for the Chebyshev refinement of a certificate.
const REFINE_MAX_ROWS: usize = 64;
const REFINE_MAX_COLS: usize = 128;

#[derive(Debug, Clone, PartialEq)]
pub struct CertificateReport {
    pub valid: bool,
    pub certificate_gap: f64,
    pub nu: Vec<f64>,
}

pub(crate) struct Polished {
    pub x: Vec<f64>,
    pub gap: f64,
}

fn support_of(v: &[f64], threshold: f64) -> (Vec<usize>, Vec<f64>) {
    let support: Vec<usize> = (0..v.len()).filter(|&j| v[j].abs() > threshold).collect();
    let signs = support.iter().map(|&j| v[j].signum()).collect();
    (support, signs)
}

/// `ν + Φ_S (Φ_SᵀΦ_S)⁻¹ (s − Φ_Sᵀν)`: the closest vector to `ν` whose
/// correlations with the support columns equal `s`.
fn corrected_multiplier(phi_s: &Matrix, qr: &Qr, signs: &[f64], nu: &[f64]) -> Vec<f64> {
    let current = phi_s.tr_mul_vec(nu);
    let defect: Vec<f64> = signs.iter().zip(&current).map(|(s, c)| s - c).collect();
    let step = phi_s.mul_vec(&qr.solve_gram(&defect));
    nu.iter().zip(&step).map(|(a, b)| a + b).collect()
}

fn gap_of(phi: &Matrix, nu: &[f64]) -> f64 {
    (norm_inf(&phi.tr_mul_vec(nu)) - 1.0).max(0.0)
}

/// Greedy independent subset of the columns of `a`, visiting them by
/// decreasing `weight`. Returned indices are ascending.
fn independent_columns(a: &Matrix, weight: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..a.cols()).collect();
    order.sort_by(|&p, &q| weight[q].total_cmp(&weight[p]).then(p.cmp(&q)));
    let mut basis: Vec<Vec<f64>> = Vec::new();
    let mut keep = Vec::new();
    for t in order {
        if basis.len() == a.rows() {
            break;
        }
        let mut v = a.column(t);
        let scale = norm2(&v);
        for _ in 0..2 {
            for b in &basis {
                let c = crate::linalg::dot(b, &v);
                crate::linalg::axpy(-c, b, &mut v);
            }
        }
        let nv = norm2(&v);
        if nv > 1e-10 * scale.max(f64::MIN_POSITIVE) {
            v.iter_mut().for_each(|x| *x /= nv);
            basis.push(v);
            keep.push(t);
        }
    }
    keep.sort_unstable();
    keep
}

/// Least squares on the support of `guide` followed by a certificate built
/// from the multiplier estimate `nu0`. Returns `None` when the support
/// cannot reproduce `y` or the signs disagree with `guide`.
pub(crate) fn polish_on_support(phi: &Matrix, y: &[f64], guide: &[f64], nu0: &[f64]) -> Option<Polished> {
    let (mut support, mut signs) = support_of(guide, 0.0);
    if support.is_empty() {
        return None;
    }
    let mut phi_s = phi.select_columns(&support);
    let qr = match (support.len() <= phi.rows()).then(|| Qr::new(&phi_s).ok()).flatten() {
        Some(qr) => qr,
        None => {
            // dependent columns: keep an independent subset, largest entries first
            let keep = independent_columns(&phi_s, &support.iter().map(|&j| guide[j].abs()).collect::<Vec<_>>());
            support = keep.iter().map(|&t| support[t]).collect();
            signs = keep.iter().map(|&t| signs[t]).collect();
            phi_s = phi.select_columns(&support);
            Qr::new(&phi_s).ok()?
        }
    };
    let xs = qr.solve_ls(y);
    let mut r = phi_s.mul_vec(&xs);
    r.iter_mut().zip(y).for_each(|(a, b)| *a -= b);
    if norm2(&r) > 1e-9 * norm2(y).max(1.0) {
        return None;
    }
    if xs.iter().zip(&signs).any(|(v, s)| *v != 0.0 && v.signum() != *s) {
        return None;
    }
    let nu = corrected_multiplier(&phi_s, &qr, &signs, nu0);
    let mut x = vec![0.0; phi.cols()];
    for (&j, &v) in support.iter().zip(&xs) {
        x[j] = v;
    }
    Some(Polished { x, gap: gap_of(phi, &nu) })
}

/// Searches for `ν` with `Φ_Sᵀν = sign(x_S)` on the support `S` of `x_star`
/// and `‖Φᵀν‖∞ ≤ 1 + tol`.
///
/// Starts from the least-squares fit of the support equations. On small
/// problems a failed fit is refined by minimizing `‖Φᵀν‖∞` over all exact
/// fits. `valid = false` is inconclusive, not a proof of suboptimality.
pub fn dual_certificate_check(phi: &MeasurementMatrix, x_star: &[f64], tol: f64) -> CertificateReport {
    let a = phi.matrix();
    let n = a.rows();
    let fail = CertificateReport {
        valid: false,
        certificate_gap: f64::INFINITY,
        nu: vec![0.0; n],
    };
    if x_star.len() != a.cols() || x_star.iter().any(|v| !v.is_finite()) || !(tol >= 0.0) {
        return fail;
    }
    let threshold = tol * norm_inf(x_star).max(1.0);
    let (support, signs) = support_of(x_star, threshold);
    if support.is_empty() {
        return CertificateReport {
            valid: true,
            certificate_gap: 0.0,
            nu: vec![0.0; n],
        };
    }
    let phi_s = a.select_columns(&support);

    let (mut nu, fit_error) = if support.len() <= n {
        match Qr::new(&phi_s) {
            Ok(qr) => (corrected_multiplier(&phi_s, &qr, &signs, &vec![0.0; n]), 0.0),
            Err(_) => return fail,
        }
    } else {
        // more support equations than unknowns: fit them in least squares
        match Qr::new(&phi_s.transpose()) {
            Ok(qr) => {
                let nu = qr.solve_ls(&signs);
                let fitted = phi_s.tr_mul_vec(&nu);
                let err = fitted.iter().zip(&signs).fold(0.0f64, |m, (f, s)| m.max((f - s).abs()));
                (nu, err)
            }
            Err(_) => return fail,
        }
    };
    let mut gap = gap_of(a, &nu);

    if gap > tol && fit_error == 0.0 && n <= REFINE_MAX_ROWS && a.cols() <= REFINE_MAX_COLS {
        if let Some(better) = chebyshev_multiplier(a, &support, &signs) {
            let better_gap = gap_of(a, &better);
            let fitted = phi_s.tr_mul_vec(&better);
            let err = fitted.iter().zip(&signs).fold(0.0f64, |m, (f, s)| m.max((f - s).abs()));
            if better_gap < gap && err <= 1e-10 {
                nu = better;
                gap = better_gap;
            }
        }
    }
    CertificateReport {
        valid: fit_error <= tol && gap <= tol,
        certificate_gap: gap,
        nu,
    }
}

/// `min t` over `ν = p − q` with `Φ_Sᵀν = s` and `|φ_jᵀν| ≤ t` off the
/// support.
fn chebyshev_multiplier(a: &Matrix, support: &[usize], signs: &[f64]) -> Option<Vec<f64>> {
    let n = a.rows();
    let off: Vec<usize> = (0..a.cols()).filter(|j| support.binary_search(j).is_err()).collect();
    let rows = support.len() + 2 * off.len();
    // variables: p (n), q (n), t, slacks (2·|off|)
    let vars = 2 * n + 1 + 2 * off.len();
    let mut lp = Matrix::zeros(rows, vars);
    let mut b = vec![0.0; rows];
    for (r, &j) in support.iter().enumerate() {
        for i in 0..n {
            lp[(r, i)] = a[(i, j)];
            lp[(r, n + i)] = -a[(i, j)];
        }
        b[r] = signs[r];
    }
    for (k, &j) in off.iter().enumerate() {
        for (side, sgn) in [(0usize, 1.0f64), (1, -1.0)] {
            let r = support.len() + 2 * k + side;
            for i in 0..n {
                lp[(r, i)] = sgn * a[(i, j)];
                lp[(r, n + i)] = -sgn * a[(i, j)];
            }
            lp[(r, 2 * n)] = -1.0;
            lp[(r, 2 * n + 1 + 2 * k + side)] = 1.0;
        }
    }
    let mut c = vec![0.0; vars];
    c[2 * n] = 1.0;
    let sol = solve_standard_form(&c, &lp, &b).ok()?;
    (sol.status == LpStatus::Optimal).then(|| (0..n).map(|i| sol.x[i] - sol.x[n + i]).collect())
}
