//! Measurement-matrix ensembles: iid, mixed symmetric (weighted random graph)
//! and the ±1 matrix `2A(G) - J` of an Erdős–Rényi graph with loops.
//!
//! Symmetric generators draw the diagonal from one sub-stream and the strict
//! upper triangle of row `i` from its own sub-stream, so the first `n` rows of
//! an `N × N` matrix can be produced without materializing the rest.

use std::fmt;

use serde::Serialize;

use crate::distributions::{DistributionSpec, Sampler};
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::rng::Stream;

/// Complete weighted graph on `vertices` nodes: loop weights from
/// `diag_law`, edge weights from `offdiag_law`.
#[derive(Debug, Clone, PartialEq)]
pub struct MixedGraphModel {
    pub vertices: usize,
    pub diag_law: DistributionSpec,
    pub offdiag_law: DistributionSpec,
}

impl MixedGraphModel {
    pub fn new(vertices: usize, diag_law: DistributionSpec, offdiag_law: DistributionSpec) -> Result<Self> {
        let model = MixedGraphModel {
            vertices,
            diag_law,
            offdiag_law,
        };
        model.validate()?;
        Ok(model)
    }

    pub fn validate(&self) -> Result<()> {
        if self.vertices == 0 {
            return Err(Error::validation("graph needs at least one vertex"));
        }
        self.diag_law.validate()?;
        self.offdiag_law.validate()?;
        let off = &self.offdiag_law;
        if off.declared_mean.abs() > 1e-12 {
            return Err(Error::validation(format!(
                "off-diagonal law must have zero mean, declared {}",
                off.declared_mean
            )));
        }
        if !(off.declared_variance > 0.0) {
            return Err(Error::validation("off-diagonal law must have positive variance"));
        }
        match off.declared_fourth_moment {
            Some(m4) if m4.is_finite() => Ok(()),
            _ => Err(Error::validation("off-diagonal law must declare a finite fourth moment")),
        }
    }

    /// Standard deviation σ of the off-diagonal weights.
    pub fn sigma(&self) -> f64 {
        self.offdiag_law.declared_variance.sqrt()
    }

    /// Gaussian loops, ±1 edges.
    pub fn default_mixed(vertices: usize) -> Self {
        MixedGraphModel {
            vertices,
            diag_law: DistributionSpec::gaussian_unit(),
            offdiag_law: DistributionSpec::bernoulli_sym(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum EnsembleDescriptor {
    Iid { law: String },
    SymmetricMixed { diag_law: String, offdiag_law: String },
    GraphBernoulli { p: f64 },
    Explicit,
}

impl fmt::Display for EnsembleDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EnsembleDescriptor::Iid { law } => write!(f, "iid({law})"),
            EnsembleDescriptor::SymmetricMixed { diag_law, offdiag_law } => {
                write!(f, "symmetric-mixed({diag_law}/{offdiag_law})")
            }
            EnsembleDescriptor::GraphBernoulli { p } => write!(f, "graph-bernoulli(p={p})"),
            EnsembleDescriptor::Explicit => f.write_str("explicit"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Provenance {
    pub ensemble: EnsembleDescriptor,
    pub seed: Option<u64>,
    /// Selected parent rows (0-based), when the matrix is a row subset.
    pub rows_selected: Option<Vec<usize>>,
}

impl Provenance {
    pub fn explicit() -> Self {
        Provenance {
            ensemble: EnsembleDescriptor::Explicit,
            seed: None,
            rows_selected: None,
        }
    }
}

/// Dense `n × N` matrix `Φ` with the scaling factor already applied to its
/// entries.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementMatrix {
    matrix: Matrix,
    scaling: f64,
    provenance: Provenance,
}

impl MeasurementMatrix {
    pub fn new(matrix: Matrix, scaling: f64, provenance: Provenance) -> Result<Self> {
        if matrix.rows() == 0 || matrix.cols() == 0 {
            return Err(Error::validation("measurement matrix must be nonempty"));
        }
        if !matrix.is_finite() {
            return Err(Error::validation("measurement matrix has non-finite entries"));
        }
        if !scaling.is_finite() {
            return Err(Error::validation("scaling must be finite"));
        }
        Ok(MeasurementMatrix {
            matrix,
            scaling,
            provenance,
        })
    }

    /// Wraps an arbitrary matrix with scaling 1.
    pub fn from_matrix(matrix: Matrix) -> Result<Self> {
        MeasurementMatrix::new(matrix, 1.0, Provenance::explicit())
    }

    pub fn rows(&self) -> usize {
        self.matrix.rows()
    }

    pub fn cols(&self) -> usize {
        self.matrix.cols()
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn entries(&self) -> &[f64] {
        self.matrix.as_slice()
    }

    pub fn scaling(&self) -> f64 {
        self.scaling
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    pub fn into_matrix(self) -> Matrix {
        self.matrix
    }

    /// Multiplies the entries by `n^{-1/2}` and records it.
    pub fn normalized(self) -> Self {
        let c = inverse_sqrt(self.rows());
        MeasurementMatrix {
            matrix: self.matrix.scaled(c),
            scaling: self.scaling * c,
            provenance: self.provenance,
        }
    }
}

#[inline]
pub(crate) fn inverse_sqrt(n: usize) -> f64 {
    1.0 / (n as f64).sqrt()
}

/// Unscaled `n × N` matrix of iid draws.
pub fn sample_iid_matrix(spec: &DistributionSpec, n: usize, cols: usize, seed: u64) -> Result<MeasurementMatrix> {
    if n == 0 || cols == 0 {
        return Err(Error::validation(format!("matrix dimensions must be positive, got {n}x{cols}")));
    }
    let sampler = spec.sampler()?;
    let mut stream = Stream::derive(seed, "iid", 0);
    let data = (0..n * cols).map(|_| sampler.sample(&mut stream)).collect();
    MeasurementMatrix::new(
        Matrix::from_vec(n, cols, data)?,
        1.0,
        Provenance {
            ensemble: EnsembleDescriptor::Iid { law: spec.to_string() },
            seed: Some(seed),
            rows_selected: None,
        },
    )
}

/// First `n` rows of a symmetric `order × order` matrix whose diagonal comes
/// from `diag` and whose strict upper triangle comes from `off`.
fn symmetric_rows(
    order: usize,
    n: usize,
    seed: u64,
    tags: (&str, &str),
    mut diag: impl FnMut(&mut Stream) -> f64,
    mut off: impl FnMut(&mut Stream) -> f64,
) -> Matrix {
    debug_assert!(n <= order);
    let mut out = Matrix::zeros(n, order);
    let mut diag_stream = Stream::derive(seed, tags.0, 0);
    for i in 0..n {
        out[(i, i)] = diag(&mut diag_stream);
        let mut row_stream = Stream::derive(seed, tags.1, i as u64);
        for j in (i + 1)..order {
            let w = off(&mut row_stream);
            out[(i, j)] = w;
            if j < n {
                out[(j, i)] = w;
            }
        }
    }
    out
}

/// Symmetric adjacency matrix of a draw from the mixed weighted graph model.
pub fn sample_mixed_adjacency(model: &MixedGraphModel, seed: u64) -> Result<Matrix> {
    mixed_rows(model, model.vertices, seed)
}

/// Rows `0..n` of [`sample_mixed_adjacency`] for the same seed, without
/// generating the remaining rows.
pub fn mixed_rows(model: &MixedGraphModel, n: usize, seed: u64) -> Result<Matrix> {
    model.validate()?;
    if n == 0 || n > model.vertices {
        return Err(Error::validation(format!("row count {n} must lie in 1..={}", model.vertices)));
    }
    let diag: Sampler = model.diag_law.sampler()?;
    let off: Sampler = model.offdiag_law.sampler()?;
    Ok(symmetric_rows(
        model.vertices,
        n,
        seed,
        ("mixed-diag", "mixed-upper"),
        |s| diag.sample(s),
        |s| off.sample(s),
    ))
}

fn check_edge_probability(p: f64) -> Result<()> {
    if p > 0.0 && p < 1.0 {
        Ok(())
    } else {
        Err(Error::validation(format!("edge probability {p} must lie in (0, 1)")))
    }
}

/// `2A(G) - J` for `G` drawn from the Erdős–Rényi model with loops.
pub fn bernoulli_from_graph(vertices: usize, p: f64, seed: u64) -> Result<Matrix> {
    graph_rows(vertices, vertices, p, seed)
}

/// Rows `0..n` of [`bernoulli_from_graph`] for the same seed.
pub fn graph_rows(vertices: usize, n: usize, p: f64, seed: u64) -> Result<Matrix> {
    check_edge_probability(p)?;
    if vertices == 0 || n == 0 || n > vertices {
        return Err(Error::validation(format!("row count {n} must lie in 1..={vertices}")));
    }
    let edge = |s: &mut Stream| if s.next_f64() < p { 1.0 } else { -1.0 };
    Ok(symmetric_rows(vertices, n, seed, ("graph-loops", "graph-upper"), edge, edge))
}

/// Selects `theta` (0-based, distinct) rows of `parent`, optionally scaling
/// by `|theta|^{-1/2}`.
pub fn subsample_rows(parent: &Matrix, theta: &[usize], scale: bool) -> Result<MeasurementMatrix> {
    if theta.is_empty() {
        return Err(Error::validation("row selection must be nonempty"));
    }
    let mut seen = vec![false; parent.rows()];
    for &i in theta {
        if i >= parent.rows() {
            return Err(Error::validation(format!("row index {i} out of range 0..{}", parent.rows())));
        }
        if std::mem::replace(&mut seen[i], true) {
            return Err(Error::validation(format!("row index {i} selected twice")));
        }
    }
    let selected = parent.select_rows(theta);
    let scaling = if scale { inverse_sqrt(theta.len()) } else { 1.0 };
    let matrix = if scale { selected.scaled(scaling) } else { selected };
    MeasurementMatrix::new(
        matrix,
        scaling,
        Provenance {
            ensemble: EnsembleDescriptor::Explicit,
            seed: None,
            rows_selected: Some(theta.to_vec()),
        },
    )
}

/// Scaled `n × N` measurement matrix from the mixed model with `Θ = {0..n}`.
pub fn mixed_measurement(model: &MixedGraphModel, n: usize, seed: u64) -> Result<MeasurementMatrix> {
    let rows = mixed_rows(model, n, seed)?;
    let c = inverse_sqrt(n);
    MeasurementMatrix::new(
        rows.scaled(c),
        c,
        Provenance {
            ensemble: EnsembleDescriptor::SymmetricMixed {
                diag_law: model.diag_law.to_string(),
                offdiag_law: model.offdiag_law.to_string(),
            },
            seed: Some(seed),
            rows_selected: Some((0..n).collect()),
        },
    )
}

/// Scaled `n × N` measurement matrix from `2A(G) - J` with `Θ = {0..n}`.
pub fn graph_measurement(vertices: usize, n: usize, p: f64, seed: u64) -> Result<MeasurementMatrix> {
    let rows = graph_rows(vertices, n, p, seed)?;
    let c = inverse_sqrt(n);
    MeasurementMatrix::new(
        rows.scaled(c),
        c,
        Provenance {
            ensemble: EnsembleDescriptor::GraphBernoulli { p },
            seed: Some(seed),
            rows_selected: Some((0..n).collect()),
        },
    )
}
