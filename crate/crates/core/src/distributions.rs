//! Scalar probability laws with declared moment metadata.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::Stream;

const PROBABILITY_SUM_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub value: f64,
    pub probability: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum DistributionKind {
    /// Standard normal.
    GaussianUnit,
    /// ±1 with probability 1/2 each.
    BernoulliSym,
    /// ±√3 with probability 1/6 each, 0 with probability 2/3.
    ThreePoint,
    Discrete(Vec<Atom>),
}

/// A law together with the moments it claims to have. Callers compare these
/// against [`moment_check`] output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct DistributionSpec {
    pub kind: DistributionKind,
    pub declared_mean: f64,
    pub declared_variance: f64,
    /// Raw fourth moment `E[x⁴]`; `None` when unknown.
    pub declared_fourth_moment: Option<f64>,
}

impl DistributionSpec {
    pub fn gaussian_unit() -> Self {
        DistributionSpec {
            kind: DistributionKind::GaussianUnit,
            declared_mean: 0.0,
            declared_variance: 1.0,
            declared_fourth_moment: Some(3.0),
        }
    }

    pub fn bernoulli_sym() -> Self {
        DistributionSpec {
            kind: DistributionKind::BernoulliSym,
            declared_mean: 0.0,
            declared_variance: 1.0,
            declared_fourth_moment: Some(1.0),
        }
    }

    pub fn three_point() -> Self {
        DistributionSpec {
            kind: DistributionKind::ThreePoint,
            declared_mean: 0.0,
            declared_variance: 1.0,
            declared_fourth_moment: Some(3.0),
        }
    }

    /// Finite discrete law; declared moments are computed from the atoms.
    pub fn discrete(atoms: Vec<(f64, f64)>) -> Result<Self> {
        let atoms: Vec<Atom> = atoms
            .into_iter()
            .map(|(value, probability)| Atom { value, probability })
            .collect();
        validate_atoms(&atoms)?;
        let moment = |p: i32| atoms.iter().map(|a| a.probability * a.value.powi(p)).sum::<f64>();
        let mean = moment(1);
        Ok(DistributionSpec {
            declared_mean: mean,
            declared_variance: moment(2) - mean * mean,
            declared_fourth_moment: Some(moment(4)),
            kind: DistributionKind::Discrete(atoms),
        })
    }

    pub fn validate(&self) -> Result<()> {
        if let DistributionKind::Discrete(atoms) = &self.kind {
            validate_atoms(atoms)?;
        }
        if !self.declared_mean.is_finite() || !(self.declared_variance >= 0.0) {
            return Err(Error::validation("declared mean/variance must be finite, variance nonnegative"));
        }
        Ok(())
    }

    /// Validated sampler for repeated draws.
    pub fn sampler(&self) -> Result<Sampler> {
        self.validate()?;
        Ok(match &self.kind {
            DistributionKind::GaussianUnit => Sampler::Gaussian,
            DistributionKind::BernoulliSym => Sampler::Sign,
            DistributionKind::ThreePoint => Sampler::ThreePoint,
            DistributionKind::Discrete(atoms) => {
                let mut acc = 0.0;
                let mut cumulative = Vec::with_capacity(atoms.len());
                for a in atoms {
                    acc += a.probability;
                    cumulative.push((acc, a.value));
                }
                Sampler::Table(cumulative)
            }
        })
    }
}

fn validate_atoms(atoms: &[Atom]) -> Result<()> {
    if atoms.is_empty() {
        return Err(Error::validation("discrete law needs at least one atom"));
    }
    for a in atoms {
        if !a.value.is_finite() {
            return Err(Error::validation(format!("atom value {} is not finite", a.value)));
        }
        if !(a.probability >= 0.0) || !a.probability.is_finite() {
            return Err(Error::validation(format!("probability {} is negative", a.probability)));
        }
    }
    let total: f64 = atoms.iter().map(|a| a.probability).sum();
    if (total - 1.0).abs() > PROBABILITY_SUM_TOL {
        return Err(Error::validation(format!("probabilities sum to {total}, not 1")));
    }
    Ok(())
}

#[derive(Debug, Clone)]
pub enum Sampler {
    Gaussian,
    Sign,
    ThreePoint,
    /// (cumulative probability, value)
    Table(Vec<(f64, f64)>),
}

impl Sampler {
    #[inline]
    pub fn sample(&self, stream: &mut Stream) -> f64 {
        match self {
            Sampler::Gaussian => polar_gaussian(stream),
            Sampler::Sign => {
                if stream.next_bool() {
                    1.0
                } else {
                    -1.0
                }
            }
            Sampler::ThreePoint => {
                let u = stream.next_f64();
                if u < 1.0 / 6.0 {
                    3f64.sqrt()
                } else if u < 5.0 / 6.0 {
                    0.0
                } else {
                    -(3f64.sqrt())
                }
            }
            Sampler::Table(table) => {
                let u = stream.next_f64();
                table
                    .iter()
                    .find(|(c, _)| u < *c)
                    .or(table.last())
                    .map(|&(_, v)| v)
                    .unwrap_or(0.0)
            }
        }
    }
}

/// Marsaglia's polar method; the second variate of each pair is discarded.
fn polar_gaussian(stream: &mut Stream) -> f64 {
    loop {
        let u = stream.next_signed_unit();
        let v = stream.next_signed_unit();
        let s = u * u + v * v;
        if s > 0.0 && s < 1.0 {
            return u * (-2.0 * s.ln() / s).sqrt();
        }
    }
}

pub fn sample_scalar(spec: &DistributionSpec, stream: &mut Stream) -> Result<f64> {
    Ok(spec.sampler()?.sample(stream))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MomentReport {
    pub mean: f64,
    pub variance: f64,
    pub fourth_moment: f64,
    pub positive_part_second_moment: f64,
}

/// Empirical moments of `samples` draws. Variance is about the sample mean;
/// the fourth moment is raw.
pub fn moment_check(spec: &DistributionSpec, samples: usize, seed: u64) -> Result<MomentReport> {
    if samples < 10_000 {
        return Err(Error::validation(format!("moment_check needs at least 10^4 samples, got {samples}")));
    }
    let sampler = spec.sampler()?;
    let mut stream = Stream::derive(seed, "moments", 0);
    let (mut s1, mut s2, mut s4, mut pos2) = (0.0, 0.0, 0.0, 0.0);
    for _ in 0..samples {
        let x = sampler.sample(&mut stream);
        let x2 = x * x;
        s1 += x;
        s2 += x2;
        s4 += x2 * x2;
        if x > 0.0 {
            pos2 += x2;
        }
    }
    let m = samples as f64;
    let mean = s1 / m;
    Ok(MomentReport {
        mean,
        variance: (s2 / m - mean * mean).max(0.0),
        fourth_moment: s4 / m,
        positive_part_second_moment: pos2 / m,
    })
}

impl fmt::Display for DistributionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            DistributionKind::GaussianUnit => f.write_str("gaussian-unit"),
            DistributionKind::BernoulliSym => f.write_str("bernoulli-sym"),
            DistributionKind::ThreePoint => f.write_str("three-point"),
            DistributionKind::Discrete(atoms) => {
                f.write_str("discrete:")?;
                for (i, a) in atoms.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{}@{}", a.value, a.probability)?;
                }
                Ok(())
            }
        }
    }
}

/// Accepts `gaussian-unit`, `bernoulli-sym`, `three-point` (and the short
/// forms `gaussian`, `bernoulli`) or `discrete:v1@p1,v2@p2,...`.
impl FromStr for DistributionSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "gaussian" | "gaussian-unit" => Ok(DistributionSpec::gaussian_unit()),
            "bernoulli" | "bernoulli-sym" => Ok(DistributionSpec::bernoulli_sym()),
            "three-point" => Ok(DistributionSpec::three_point()),
            other => {
                let body = other
                    .strip_prefix("discrete:")
                    .ok_or_else(|| Error::validation(format!("unknown distribution '{other}'")))?;
                let atoms = body
                    .split(',')
                    .map(|tok| {
                        let (v, p) = tok
                            .split_once('@')
                            .ok_or_else(|| Error::validation(format!("atom '{tok}' is not value@probability")))?;
                        let parse = |x: &str| {
                            x.trim()
                                .parse::<f64>()
                                .map_err(|_| Error::validation(format!("'{x}' is not a number")))
                        };
                        Ok((parse(v)?, parse(p)?))
                    })
                    .collect::<Result<Vec<_>>>()?;
                DistributionSpec::discrete(atoms)
            }
        }
    }
}

impl TryFrom<String> for DistributionSpec {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<DistributionSpec> for String {
    fn from(d: DistributionSpec) -> String {
        d.to_string()
    }
}
