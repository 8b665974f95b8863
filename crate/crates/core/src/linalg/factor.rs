use super::{axpy, dot, norm2, Matrix};
use crate::error::{Error, Result};

/// Lower Cholesky factor `A = LLᵀ` of a symmetric positive definite matrix.
#[derive(Debug, Clone)]
pub struct Cholesky {
    n: usize,
    l: Vec<f64>,
}

impl Cholesky {
    /// Fails when a pivot falls below `n·ε·max(diag)`, i.e. the matrix is
    /// numerically singular.
    pub fn new(a: &Matrix) -> Result<Self> {
        let n = a.rows();
        if a.cols() != n {
            return Err(Error::validation("cholesky needs a square matrix"));
        }
        let max_diag = (0..n).fold(0.0f64, |m, i| m.max(a[(i, i)]));
        let floor = (n.max(1) as f64) * f64::EPSILON * max_diag;
        let mut l = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..=i {
                let s = a[(i, j)] - dot(&l[i * n..i * n + j], &l[j * n..j * n + j]);
                if i == j {
                    if !(s > floor) {
                        return Err(Error::RankDeficient(format!(
                            "pivot {i} is {s:e} (floor {floor:e})"
                        )));
                    }
                    l[i * n + i] = s.sqrt();
                } else {
                    l[i * n + j] = s / l[j * n + j];
                }
            }
        }
        Ok(Cholesky { n, l })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Solves `L w = b` in place.
    pub fn solve_lower_in_place(&self, b: &mut [f64]) {
        let n = self.n;
        for i in 0..n {
            let s = b[i] - dot(&self.l[i * n..i * n + i], &b[..i]);
            b[i] = s / self.l[i * n + i];
        }
    }

    /// Solves `Lᵀ x = w` in place.
    pub fn solve_upper_in_place(&self, b: &mut [f64]) {
        let n = self.n;
        for i in (0..n).rev() {
            b[i] /= self.l[i * n + i];
            let bi = b[i];
            // column i of Lᵀ above the diagonal is row i of L left of it
            axpy(-bi, &self.l[i * n..i * n + i], &mut b[..i]);
        }
    }

    pub fn solve_in_place(&self, b: &mut [f64]) {
        self.solve_lower_in_place(b);
        self.solve_upper_in_place(b);
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let mut x = b.to_vec();
        self.solve_in_place(&mut x);
        x
    }

    /// Inverse power iteration estimate of the smallest eigenvalue of `LLᵀ`.
    pub fn smallest_eigenvalue_estimate(&self, max_iter: usize) -> f64 {
        let n = self.n;
        if n == 0 {
            return f64::INFINITY;
        }
        let mut v: Vec<f64> = (0..n).map(|i| 1.0 + ((i * 7919) % 13) as f64 / 13.0).collect();
        let nv = norm2(&v);
        v.iter_mut().for_each(|x| *x /= nv);
        let mut mu = 0.0;
        for _ in 0..max_iter {
            let mut w = v.clone();
            self.solve_in_place(&mut w);
            let next = dot(&v, &w);
            let nw = norm2(&w);
            if !(nw > 0.0) || !nw.is_finite() {
                return 0.0;
            }
            v = w.into_iter().map(|x| x / nw).collect();
            if (next - mu).abs() <= 1e-8 * next.abs() {
                mu = next;
                break;
            }
            mu = next;
        }
        if mu > 0.0 {
            1.0 / mu
        } else {
            0.0
        }
    }
}

/// Householder QR of a tall matrix, kept in factored form.
#[derive(Debug, Clone)]
pub struct Qr {
    rows: usize,
    cols: usize,
    /// Householder vectors; vector `k` acts on entries `k..rows`.
    reflectors: Vec<(Vec<f64>, f64)>,
    /// Upper triangular factor, row-major `cols × cols`.
    r: Vec<f64>,
}

impl Qr {
    /// Fails if the matrix is wide or numerically column-rank deficient.
    pub fn new(a: &Matrix) -> Result<Self> {
        let (m, n) = (a.rows(), a.cols());
        if m < n {
            return Err(Error::validation(format!("QR needs rows >= cols, got {m}x{n}")));
        }
        let mut w = a.clone();
        let mut reflectors = Vec::with_capacity(n);
        let mut scratch = vec![0.0; n];
        for k in 0..n {
            let x: Vec<f64> = (k..m).map(|i| w[(i, k)]).collect();
            let alpha = norm2(&x);
            let mut v = x;
            let beta;
            if alpha == 0.0 {
                beta = 0.0;
            } else {
                let alpha = if v[0] > 0.0 { -alpha } else { alpha };
                v[0] -= alpha;
                let vv = dot(&v, &v);
                beta = if vv > 0.0 { 2.0 / vv } else { 0.0 };
            }
            if beta != 0.0 {
                // w[k.., k..] -= beta v (vᵀ w[k.., k..])
                let acc = &mut scratch[k..];
                acc.iter_mut().for_each(|s| *s = 0.0);
                for (t, i) in (k..m).enumerate() {
                    axpy(v[t], &w.row(i)[k..], acc);
                }
                for (t, i) in (k..m).enumerate() {
                    let f = -beta * v[t];
                    axpy(f, &scratch[k..], &mut w.row_mut(i)[k..]);
                }
            }
            reflectors.push((v, beta));
        }
        let mut r = vec![0.0; n * n];
        for i in 0..n {
            r[i * n + i..(i + 1) * n].copy_from_slice(&w.row(i)[i..]);
        }
        let max_diag = (0..n).fold(0.0f64, |acc, i| acc.max(r[i * n + i].abs()));
        let floor = (m.max(1) as f64) * f64::EPSILON * max_diag;
        for i in 0..n {
            if !(r[i * n + i].abs() > floor) {
                return Err(Error::RankDeficient(format!(
                    "column {i} is numerically dependent on earlier columns"
                )));
            }
        }
        Ok(Qr {
            rows: m,
            cols: n,
            reflectors,
            r,
        })
    }

    fn apply_qt(&self, b: &mut [f64]) {
        for (k, (v, beta)) in self.reflectors.iter().enumerate() {
            if *beta == 0.0 {
                continue;
            }
            let s = beta * dot(v, &b[k..]);
            axpy(-s, v, &mut b[k..]);
        }
    }

    fn solve_r(&self, x: &mut [f64]) {
        let n = self.cols;
        for i in (0..n).rev() {
            let s = x[i] - dot(&self.r[i * n + i + 1..(i + 1) * n], &x[i + 1..n]);
            x[i] = s / self.r[i * n + i];
        }
    }

    fn solve_rt(&self, x: &mut [f64]) {
        let n = self.cols;
        for i in 0..n {
            x[i] /= self.r[i * n + i];
            let xi = x[i];
            axpy(-xi, &self.r[i * n + i + 1..(i + 1) * n], &mut x[i + 1..n]);
        }
    }

    /// Least-squares solution of `min ‖A x - b‖₂`.
    pub fn solve_ls(&self, b: &[f64]) -> Vec<f64> {
        assert_eq!(b.len(), self.rows);
        let mut qb = b.to_vec();
        self.apply_qt(&mut qb);
        qb.truncate(self.cols);
        self.solve_r(&mut qb);
        qb
    }

    /// Solves `(AᵀA) z = b`.
    pub fn solve_gram(&self, b: &[f64]) -> Vec<f64> {
        assert_eq!(b.len(), self.cols);
        let mut z = b.to_vec();
        self.solve_rt(&mut z);
        self.solve_r(&mut z);
        z
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample(rows: usize, cols: usize) -> Matrix {
        Matrix::from_fn(rows, cols, |i, j| ((i * 31 + j * 17) as f64 * 0.731).sin() + if i == j { 2.0 } else { 0.0 })
    }

    #[test]
    fn cholesky_solves_spd_system() {
        let a = sample(6, 4);
        let g = a.gram();
        let ch = Cholesky::new(&g).unwrap();
        let b = [1.0, -2.0, 0.5, 3.0];
        let x = ch.solve(&b);
        let gx = g.mul_vec(&x);
        for (p, q) in gx.iter().zip(&b) {
            assert!((p - q).abs() < 1e-10);
        }
    }

    #[test]
    fn cholesky_rejects_singular() {
        let g = Matrix::from_rows(&[vec![1.0, 1.0], vec![1.0, 1.0]]).unwrap();
        assert!(matches!(Cholesky::new(&g), Err(Error::RankDeficient(_))));
        let neg = Matrix::diag(&[1.0, -1.0]);
        assert!(Cholesky::new(&neg).is_err());
    }

    #[test]
    fn smallest_eigenvalue_of_diagonal() {
        let ch = Cholesky::new(&Matrix::diag(&[4.0, 0.25, 9.0])).unwrap();
        let est = ch.smallest_eigenvalue_estimate(200);
        assert!((est - 0.25).abs() < 1e-6, "{est}");
    }

    #[test]
    fn qr_least_squares_matches_normal_equations() {
        let a = sample(9, 4);
        let b: Vec<f64> = (0..9).map(|i| (i as f64).cos()).collect();
        let qr = Qr::new(&a).unwrap();
        let x = qr.solve_ls(&b);
        let ch = Cholesky::new(&a.gram()).unwrap();
        let x2 = ch.solve(&a.tr_mul_vec(&b));
        for (p, q) in x.iter().zip(&x2) {
            assert!((p - q).abs() < 1e-10);
        }
        let z = qr.solve_gram(&[1.0, 2.0, 3.0, 4.0]);
        let z2 = ch.solve(&[1.0, 2.0, 3.0, 4.0]);
        for (p, q) in z.iter().zip(&z2) {
            assert!((p - q).abs() < 1e-10);
        }
    }

    #[test]
    fn qr_detects_dependent_columns() {
        let a = Matrix::from_rows(&[vec![1.0, 2.0], vec![2.0, 4.0], vec![3.0, 6.0]]).unwrap();
        assert!(matches!(Qr::new(&a), Err(Error::RankDeficient(_))));
        assert!(Qr::new(&a.transpose()).is_err());
    }
}
