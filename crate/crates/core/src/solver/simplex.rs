//! Revised dense simplex for `min cᵀx  s.t.  Ax = b, x ≥ 0`.
//!
//! Two phases with one artificial variable per row, Bland's rule for both
//! the entering and the leaving variable, and an explicit basis inverse that
//! is rebuilt from scratch every few dozen pivots.

use crate::error::{Error, Result};
use crate::linalg::{dot, Matrix};

const PIVOT_TOL: f64 = 1e-9;
const OPTIMALITY_TOL: f64 = 1e-10;
const REFACTOR_EVERY: usize = 40;
const MAX_PIVOTS: usize = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone)]
pub struct LpSolution {
    pub status: LpStatus,
    pub x: Vec<f64>,
    pub objective: f64,
    /// Simplex multipliers `y` with `Aᵀy ≤ c` at optimality.
    pub duals: Vec<f64>,
    pub pivots: usize,
}

struct Tableau<'a> {
    a: &'a Matrix,
    b: Vec<f64>,
    /// Column count of `a`; indices at or above it are artificials.
    structural: usize,
    basis: Vec<usize>,
    binv: Matrix,
    xb: Vec<f64>,
    pivots: usize,
}

impl<'a> Tableau<'a> {
    fn column(&self, j: usize) -> Vec<f64> {
        let m = self.b.len();
        if j >= self.structural {
            let mut e = vec![0.0; m];
            e[j - self.structural] = 1.0;
            e
        } else {
            (0..m).map(|i| self.a[(i, j)]).collect()
        }
    }

    fn ftran(&self, col: &[f64]) -> Vec<f64> {
        self.binv.mul_vec(col)
    }

    fn refactor(&mut self) -> Result<()> {
        let m = self.b.len();
        let mut bmat = Matrix::zeros(m, m);
        for (k, &j) in self.basis.iter().enumerate() {
            let col = self.column(j);
            for i in 0..m {
                bmat[(i, k)] = col[i];
            }
        }
        self.binv = invert(&bmat)?;
        self.xb = self.binv.mul_vec(&self.b);
        Ok(())
    }

    /// Runs simplex iterations with costs `cost` (length structural + m).
    /// `allowed(j)` says whether a nonbasic column may enter.
    fn optimize(&mut self, cost: &[f64], allowed: impl Fn(usize) -> bool) -> Result<LpStatus> {
        let m = self.b.len();
        let total = self.structural + m;
        loop {
            if self.pivots > MAX_PIVOTS {
                return Err(Error::Numerical("simplex pivot limit reached".into()));
            }
            let cb: Vec<f64> = self.basis.iter().map(|&j| cost[j]).collect();
            let y = self.binv.tr_mul_vec(&cb);
            let mut in_basis = vec![false; total];
            for &j in &self.basis {
                in_basis[j] = true;
            }
            let entering = (0..total).find(|&j| {
                !in_basis[j] && allowed(j) && cost[j] - dot(&y, &self.column(j)) < -OPTIMALITY_TOL
            });
            let Some(q) = entering else {
                return Ok(LpStatus::Optimal);
            };
            let w = self.ftran(&self.column(q));
            let mut leave: Option<(usize, f64)> = None;
            for i in 0..m {
                if w[i] > PIVOT_TOL {
                    let ratio = self.xb[i].max(0.0) / w[i];
                    leave = match leave {
                        None => Some((i, ratio)),
                        Some((r, best)) => {
                            let tie = (ratio - best).abs() <= 1e-12 * best.abs().max(1.0);
                            if ratio < best && !tie || tie && self.basis[i] < self.basis[r] {
                                Some((i, ratio))
                            } else {
                                Some((r, best))
                            }
                        }
                    };
                }
            }
            let Some((r, _)) = leave else {
                return Ok(LpStatus::Unbounded);
            };
            self.pivot(r, q, &w)?;
        }
    }

    fn pivot(&mut self, r: usize, q: usize, w: &[f64]) -> Result<()> {
        let m = self.b.len();
        let piv = w[r];
        let row_r: Vec<f64> = self.binv.row(r).iter().map(|v| v / piv).collect();
        let xr = self.xb[r] / piv;
        for i in 0..m {
            if i == r || w[i] == 0.0 {
                continue;
            }
            let f = w[i];
            for (dst, src) in self.binv.row_mut(i).iter_mut().zip(&row_r) {
                *dst -= f * src;
            }
            self.xb[i] -= f * xr;
        }
        self.binv.row_mut(r).copy_from_slice(&row_r);
        self.xb[r] = xr;
        self.basis[r] = q;
        self.pivots += 1;
        if self.pivots % REFACTOR_EVERY == 0 {
            self.refactor()?;
        }
        Ok(())
    }
}

/// Gauss–Jordan inverse with partial pivoting.
fn invert(a: &Matrix) -> Result<Matrix> {
    let n = a.rows();
    let mut w = a.clone();
    let mut inv = Matrix::identity(n);
    for c in 0..n {
        let p = (c..n)
            .max_by(|&i, &j| w[(i, c)].abs().total_cmp(&w[(j, c)].abs()))
            .expect("nonempty pivot range");
        if w[(p, c)].abs() < 1e-14 {
            return Err(Error::Numerical("singular simplex basis".into()));
        }
        if p != c {
            for j in 0..n {
                let t = w[(p, j)];
                w[(p, j)] = w[(c, j)];
                w[(c, j)] = t;
                let t = inv[(p, j)];
                inv[(p, j)] = inv[(c, j)];
                inv[(c, j)] = t;
            }
        }
        let d = w[(c, c)];
        for j in 0..n {
            w[(c, j)] /= d;
            inv[(c, j)] /= d;
        }
        for i in 0..n {
            if i != c && w[(i, c)] != 0.0 {
                let f = w[(i, c)];
                for j in 0..n {
                    w[(i, j)] -= f * w[(c, j)];
                    inv[(i, j)] -= f * inv[(c, j)];
                }
            }
        }
    }
    Ok(inv)
}

pub fn solve_standard_form(c: &[f64], a: &Matrix, b: &[f64]) -> Result<LpSolution> {
    let (m, nv) = (a.rows(), a.cols());
    if c.len() != nv || b.len() != m {
        return Err(Error::validation("LP dimensions do not match"));
    }
    // make every right-hand side nonnegative
    let flips: Vec<f64> = b.iter().map(|&v| if v < 0.0 { -1.0 } else { 1.0 }).collect();
    let signed = Matrix::from_fn(m, nv, |i, j| flips[i] * a[(i, j)]);
    let rhs: Vec<f64> = b.iter().zip(&flips).map(|(v, f)| v * f).collect();

    let mut t = Tableau {
        a: &signed,
        b: rhs.clone(),
        structural: nv,
        basis: (nv..nv + m).collect(),
        binv: Matrix::identity(m),
        xb: rhs.clone(),
        pivots: 0,
    };

    let phase1: Vec<f64> = (0..nv + m).map(|j| if j >= nv { 1.0 } else { 0.0 }).collect();
    t.optimize(&phase1, |_| true)?;
    let infeasibility: f64 = t
        .basis
        .iter()
        .zip(&t.xb)
        .filter(|(&j, _)| j >= nv)
        .map(|(_, &v)| v.max(0.0))
        .sum();
    let scale = rhs.iter().fold(1.0f64, |s, v| s.max(v.abs()));
    if infeasibility > 1e-9 * scale {
        return Ok(LpSolution {
            status: LpStatus::Infeasible,
            x: vec![0.0; nv],
            objective: f64::NAN,
            duals: vec![0.0; m],
            pivots: t.pivots,
        });
    }

    // drive zero-level artificials out of the basis where possible
    for r in 0..m {
        if t.basis[r] < nv {
            continue;
        }
        let in_basis: Vec<bool> = (0..nv).map(|j| t.basis.contains(&j)).collect();
        let candidate = (0..nv).filter(|&j| !in_basis[j]).find_map(|j| {
            let w = t.ftran(&t.column(j));
            (w[r].abs() > PIVOT_TOL).then_some((j, w))
        });
        if let Some((j, w)) = candidate {
            t.pivot(r, j, &w)?;
        }
    }

    let mut phase2 = c.to_vec();
    phase2.extend(std::iter::repeat(0.0).take(m));
    let status = t.optimize(&phase2, |j| j < nv)?;
    t.refactor()?;

    let mut x = vec![0.0; nv];
    for (&j, &v) in t.basis.iter().zip(&t.xb) {
        if j < nv {
            x[j] = v.max(0.0);
        }
    }
    let cb: Vec<f64> = t.basis.iter().map(|&j| phase2[j]).collect();
    let y = t.binv.tr_mul_vec(&cb);
    let duals: Vec<f64> = y.iter().zip(&flips).map(|(v, f)| v * f).collect();
    let objective = dot(c, &x);
    Ok(LpSolution {
        status,
        x,
        objective,
        duals,
        pivots: t.pivots,
    })
}
