//! Symmetric eigenvalues by Householder tridiagonalization and implicit QL,
//! singular values through the Gram matrix or a Golub–Kahan bidiagonal form.

use super::{axpy, dot, norm2, Matrix};
use crate::error::{Error, Result};

const MAX_SWEEPS_PER_EIGENVALUE: usize = 60;

/// Reduces a symmetric matrix to tridiagonal form, returning (diagonal,
/// off-diagonal). Only the eigenvalues of the input are preserved.
fn tridiagonalize(a: &Matrix) -> (Vec<f64>, Vec<f64>) {
    let n = a.rows();
    let mut w = a.as_slice().to_vec();
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n.saturating_sub(1)];
    let mut p = vec![0.0; n];
    for k in 0..n.saturating_sub(1) {
        let m = n - k - 1;
        let x = w[k * n + k + 1..(k + 1) * n].to_vec();
        d[k] = w[k * n + k];
        if m == 1 {
            e[k] = x[0];
            continue;
        }
        let xnorm = norm2(&x);
        if xnorm == 0.0 {
            e[k] = 0.0;
            continue;
        }
        let alpha = if x[0] > 0.0 { -xnorm } else { xnorm };
        let mut v = x;
        v[0] -= alpha;
        let beta = 2.0 / dot(&v, &v);
        e[k] = alpha;

        // p = beta * A22 v, w = p - (beta/2)(vᵀp) v, A22 -= v wᵀ + w vᵀ
        let off = k + 1;
        let p = &mut p[..m];
        for i in 0..m {
            let row = &w[(off + i) * n + off..(off + i + 1) * n];
            p[i] = beta * dot(row, &v);
        }
        let kappa = 0.5 * beta * dot(&v, p);
        axpy(-kappa, &v, p);
        for i in 0..m {
            let row = &mut w[(off + i) * n + off..(off + i + 1) * n];
            let (vi, pi) = (v[i], p[i]);
            for j in 0..m {
                row[j] -= vi * p[j] + pi * v[j];
            }
        }
    }
    if n > 0 {
        d[n - 1] = w[(n - 1) * n + n - 1];
    }
    (d, e)
}

/// Eigenvalues of the symmetric tridiagonal matrix with diagonal `d` and
/// off-diagonal `e`, in ascending order.
pub fn tridiagonal_eigenvalues(d: &[f64], e: &[f64]) -> Result<Vec<f64>> {
    let n = d.len();
    if n == 0 {
        return Ok(Vec::new());
    }
    if e.len() + 1 != n {
        return Err(Error::validation("off-diagonal must have length n - 1"));
    }
    let mut d = d.to_vec();
    let mut e: Vec<f64> = e.iter().copied().chain(std::iter::once(0.0)).collect();
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > MAX_SWEEPS_PER_EIGENVALUE {
                return Err(Error::Numerical(format!(
                    "implicit QL did not converge for eigenvalue {l}"
                )));
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut underflow = false;
            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    d.sort_by(f64::total_cmp);
    Ok(d)
}

/// All eigenvalues of a symmetric matrix, ascending. Symmetry is not checked
/// here; only the upper triangle's reflection of the lower matters.
pub fn symmetric_eigenvalues(a: &Matrix) -> Result<Vec<f64>> {
    if a.rows() != a.cols() {
        return Err(Error::validation("eigenvalues need a square matrix"));
    }
    match a.rows() {
        0 => Ok(Vec::new()),
        1 => Ok(vec![a[(0, 0)]]),
        _ => {
            let (d, e) = tridiagonalize(a);
            tridiagonal_eigenvalues(&d, &e)
        }
    }
}

/// Golub–Kahan reduction of a tall matrix (`rows >= cols`) to upper
/// bidiagonal form, returning (diagonal, superdiagonal).
fn bidiagonalize(a: &Matrix) -> (Vec<f64>, Vec<f64>) {
    let (m, n) = (a.rows(), a.cols());
    debug_assert!(m >= n);
    let mut w = a.clone();
    let mut d = vec![0.0; n];
    let mut f = vec![0.0; n.saturating_sub(1)];
    let mut acc = vec![0.0; n];
    for k in 0..n {
        // left reflector zeroing column k below the diagonal
        let x: Vec<f64> = (k..m).map(|i| w[(i, k)]).collect();
        let xnorm = norm2(&x);
        if xnorm == 0.0 {
            d[k] = 0.0;
        } else {
            let alpha = if x[0] > 0.0 { -xnorm } else { xnorm };
            let mut v = x;
            v[0] -= alpha;
            let beta = 2.0 / dot(&v, &v);
            let acc = &mut acc[k..];
            acc.iter_mut().for_each(|s| *s = 0.0);
            for (t, i) in (k..m).enumerate() {
                axpy(v[t], &w.row(i)[k..], acc);
            }
            for (t, i) in (k..m).enumerate() {
                axpy(-beta * v[t], acc, &mut w.row_mut(i)[k..]);
            }
            d[k] = alpha;
        }
        if k + 1 >= n {
            continue;
        }
        // right reflector zeroing row k right of the superdiagonal
        let x = w.row(k)[k + 1..].to_vec();
        let xnorm = norm2(&x);
        if xnorm == 0.0 {
            f[k] = 0.0;
            continue;
        }
        if x.len() == 1 {
            f[k] = x[0];
            continue;
        }
        let alpha = if x[0] > 0.0 { -xnorm } else { xnorm };
        let mut u = x;
        u[0] -= alpha;
        let beta = 2.0 / dot(&u, &u);
        for i in k..m {
            let row = &mut w.row_mut(i)[k + 1..];
            let s = beta * dot(row, &u);
            axpy(-s, &u, row);
        }
        f[k] = alpha;
    }
    (d, f)
}

/// All singular values, ascending.
///
/// Thin matrices (aspect ratio at least 4) go through the Gram matrix; the
/// rest through bidiagonalization and the Golub–Kahan tridiagonal whose
/// eigenvalues are `±σ`.
pub fn singular_values(a: &Matrix) -> Result<Vec<f64>> {
    let (m, n) = (a.rows(), a.cols());
    if m == 0 || n == 0 {
        return Ok(Vec::new());
    }
    let (small, large) = (m.min(n), m.max(n));
    if large >= 4 * small {
        let g = if m >= n { a.gram() } else { a.outer_gram() };
        let mut s: Vec<f64> = symmetric_eigenvalues(&g)?
            .into_iter()
            .map(|l| l.max(0.0).sqrt())
            .collect();
        s.sort_by(f64::total_cmp);
        return Ok(s);
    }
    let tall = if m >= n { a.clone() } else { a.transpose() };
    let (d, f) = bidiagonalize(&tall);
    let p = d.len();
    let mut off = Vec::with_capacity(2 * p - 1);
    for k in 0..p {
        off.push(d[k]);
        if k + 1 < p {
            off.push(f[k]);
        }
    }
    let zeros = vec![0.0; 2 * p];
    let ev = tridiagonal_eigenvalues(&zeros, &off)?;
    let mut s: Vec<f64> = ev[p..].iter().map(|v| v.abs()).collect();
    s.sort_by(f64::total_cmp);
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Cyclic Jacobi rotations; slow but independent of the QL path.
    fn jacobi_eigenvalues(a: &Matrix) -> Vec<f64> {
        let n = a.rows();
        let mut w = a.clone();
        for _ in 0..100 {
            let mut off = 0.0;
            for i in 0..n {
                for j in 0..n {
                    if i != j {
                        off += w[(i, j)] * w[(i, j)];
                    }
                }
            }
            if off < 1e-26 {
                break;
            }
            for p in 0..n {
                for q in (p + 1)..n {
                    if w[(p, q)].abs() < 1e-300 {
                        continue;
                    }
                    let theta = (w[(q, q)] - w[(p, p)]) / (2.0 * w[(p, q)]);
                    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                    let t = if theta == 0.0 { 1.0 } else { t };
                    let c = 1.0 / (t * t + 1.0).sqrt();
                    let s = t * c;
                    for k in 0..n {
                        let (akp, akq) = (w[(k, p)], w[(k, q)]);
                        w[(k, p)] = c * akp - s * akq;
                        w[(k, q)] = s * akp + c * akq;
                    }
                    for k in 0..n {
                        let (apk, aqk) = (w[(p, k)], w[(q, k)]);
                        w[(p, k)] = c * apk - s * aqk;
                        w[(q, k)] = s * apk + c * aqk;
                    }
                }
            }
        }
        let mut ev: Vec<f64> = (0..n).map(|i| w[(i, i)]).collect();
        ev.sort_by(f64::total_cmp);
        ev
    }

    fn pseudo_random_symmetric(n: usize, salt: f64) -> Matrix {
        let mut m = Matrix::from_fn(n, n, |i, j| ((i * 13 + j * 7) as f64 * salt).sin());
        for i in 0..n {
            for j in 0..i {
                m[(i, j)] = m[(j, i)];
            }
        }
        m
    }

    #[test]
    fn matches_jacobi_on_dense_symmetric() {
        for (n, salt) in [(2, 0.3), (3, 1.1), (7, 0.77), (20, 0.123), (33, 2.9)] {
            let a = pseudo_random_symmetric(n, salt);
            let ql = symmetric_eigenvalues(&a).unwrap();
            let jac = jacobi_eigenvalues(&a);
            for (x, y) in ql.iter().zip(&jac) {
                assert!((x - y).abs() < 1e-10 * (1.0 + y.abs()), "n={n}: {x} vs {y}");
            }
        }
    }

    #[test]
    fn handles_diagonal_and_repeated_eigenvalues() {
        let a = Matrix::diag(&[3.0, -1.0, 3.0, 0.0]);
        assert_eq!(symmetric_eigenvalues(&a).unwrap(), vec![-1.0, 0.0, 3.0, 3.0]);
        let ones = Matrix::from_fn(5, 5, |_, _| 1.0);
        let ev = symmetric_eigenvalues(&ones).unwrap();
        assert!((ev[4] - 5.0).abs() < 1e-12);
        assert!(ev[..4].iter().all(|v| v.abs() < 1e-12));
    }

    #[test]
    fn singular_values_square_and_wide() {
        let a = Matrix::from_fn(6, 9, |i, j| ((i * 5 + j * 3) as f64 * 0.41).cos());
        let s = singular_values(&a).unwrap();
        let ev = jacobi_eigenvalues(&a.outer_gram());
        assert_eq!(s.len(), 6);
        for (x, l) in s.iter().zip(&ev) {
            assert!((x * x - l).abs() < 1e-10 * (1.0 + l), "{x} {l}");
        }
        let st = singular_values(&a.transpose()).unwrap();
        for (x, y) in s.iter().zip(&st) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn thin_route_agrees_with_bidiagonal_route() {
        let mut rng = crate::rng::Stream::new(12);
        let a = Matrix::from_fn(40, 6, |_, _| rng.next_signed_unit());
        let thin = singular_values(&a).unwrap();
        let (d, f) = bidiagonalize(&a);
        let mut off = Vec::new();
        for k in 0..d.len() {
            off.push(d[k]);
            if k + 1 < d.len() {
                off.push(f[k]);
            }
        }
        let ev = tridiagonal_eigenvalues(&vec![0.0; 12], &off).unwrap();
        let mut bid: Vec<f64> = ev[6..].iter().map(|v| v.abs()).collect();
        bid.sort_by(f64::total_cmp);
        for (x, y) in thin.iter().zip(&bid) {
            assert!((x - y).abs() < 1e-10 * y.max(1.0), "{thin:?} vs {bid:?}");
        }
    }

    #[test]
    fn rank_deficient_has_zero_singular_value() {
        let a = Matrix::from_rows(&[vec![1.0, 2.0, 3.0], vec![2.0, 4.0, 6.0], vec![0.0, 1.0, 1.0]]).unwrap();
        let s = singular_values(&a).unwrap();
        assert!(s[0] < 1e-14, "{s:?}");
    }
}
