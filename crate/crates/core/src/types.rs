//! Shared domain types and the Euclidean distance primitive.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Result, WfrError};

/// Label given to points that belong to no family.
pub const OUTLIER: i32 = -1;

/// Default stabilizer for the log resemblance and the separation score.
pub const DEFAULT_EPS: f64 = 1e-8;

/// A dense row-major matrix of `n` points in `d` dimensions, all finite.
#[derive(Clone, Debug, PartialEq)]
pub struct Dataset {
    values: Vec<f64>,
    n: usize,
    d: usize,
}

impl Dataset {
    /// Builds a dataset from a flat row-major buffer.
    pub fn from_flat(values: Vec<f64>, d: usize) -> Result<Self> {
        if d == 0 {
            return Err(WfrError::ZeroDimension);
        }
        if values.is_empty() {
            return Err(WfrError::EmptyDataset);
        }
        if !values.len().is_multiple_of(d) {
            return Err(WfrError::RaggedRows {
                row: values.len() / d,
                expected: d,
                got: values.len() % d,
            });
        }
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            return Err(WfrError::NonFinite {
                row: pos / d,
                col: pos % d,
            });
        }
        let n = values.len() / d;
        Ok(Self { values, n, d })
    }

    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let first = rows.first().ok_or(WfrError::EmptyDataset)?;
        let d = first.as_ref().len();
        let mut values = Vec::with_capacity(rows.len() * d);
        for (row, r) in rows.iter().enumerate() {
            let r = r.as_ref();
            if r.len() != d {
                return Err(WfrError::RaggedRows {
                    row,
                    expected: d,
                    got: r.len(),
                });
            }
            values.extend_from_slice(r);
        }
        Self::from_flat(values, d)
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn d(&self) -> usize {
        self.d
    }

    #[inline]
    pub fn point(&self, i: usize) -> &[f64] {
        &self.values[i * self.d..(i + 1) * self.d]
    }

    pub fn rows(&self) -> impl ExactSizeIterator<Item = &[f64]> {
        self.values.chunks_exact(self.d)
    }

    pub fn as_flat(&self) -> &[f64] {
        &self.values
    }
}

/// Per-point cluster ids; `OUTLIER` marks points outside every family.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Labels(Vec<i32>);

impl Labels {
    pub fn new(values: Vec<i32>) -> Result<Self> {
        if let Some(&bad) = values.iter().find(|&&v| v < OUTLIER) {
            return Err(WfrError::InvalidLabel(i64::from(bad)));
        }
        Ok(Self(values))
    }

    pub(crate) fn from_vec_unchecked(values: Vec<i32>) -> Self {
        Self(values)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[i32] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<i32> {
        self.0
    }

    pub fn get(&self, i: usize) -> i32 {
        self.0[i]
    }

    /// Number of distinct non-outlier ids.
    pub fn num_clusters(&self) -> usize {
        let mut ids: Vec<i32> = self.0.iter().copied().filter(|&l| l != OUTLIER).collect();
        ids.sort_unstable();
        ids.dedup();
        ids.len()
    }

    pub fn num_outliers(&self) -> usize {
        self.0.iter().filter(|&&l| l == OUTLIER).count()
    }
}

impl std::ops::Index<usize> for Labels {
    type Output = i32;

    fn index(&self, i: usize) -> &i32 {
        &self.0[i]
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ResemblanceKind {
    Log,
    Cosine,
    Rbf,
    Sigmoid,
}

impl ResemblanceKind {
    pub fn name(self) -> &'static str {
        match self {
            ResemblanceKind::Log => "log",
            ResemblanceKind::Cosine => "cosine",
            ResemblanceKind::Rbf => "rbf",
            ResemblanceKind::Sigmoid => "sigmoid",
        }
    }
}

impl fmt::Display for ResemblanceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ResemblanceKind {
    type Err = WfrError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "log" => Ok(ResemblanceKind::Log),
            "cosine" => Ok(ResemblanceKind::Cosine),
            "rbf" => Ok(ResemblanceKind::Rbf),
            "sigmoid" => Ok(ResemblanceKind::Sigmoid),
            other => Err(WfrError::InvalidParameter(format!(
                "unknown resemblance `{other}`"
            ))),
        }
    }
}

/// Which resemblance function to use, with its parameters fully resolved.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResemblanceConfig {
    pub kind: ResemblanceKind,
    pub eps: f64,
    pub gamma: f64,
    pub coef0: f64,
}

impl ResemblanceConfig {
    /// Config with `eps = 1e-8`, `gamma = 1/d` and `coef0 = 0`.
    pub fn with_defaults(kind: ResemblanceKind, d: usize) -> Self {
        Self {
            kind,
            eps: DEFAULT_EPS,
            gamma: 1.0 / d.max(1) as f64,
            coef0: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.eps.is_finite() && self.eps > 0.0) {
            return Err(WfrError::InvalidParameter(format!(
                "eps must be positive, got {}",
                self.eps
            )));
        }
        if matches!(self.kind, ResemblanceKind::Rbf | ResemblanceKind::Sigmoid)
            && !(self.gamma.is_finite() && self.gamma > 0.0)
        {
            return Err(WfrError::InvalidParameter(format!(
                "gamma must be positive, got {}",
                self.gamma
            )));
        }
        if !self.coef0.is_finite() {
            return Err(WfrError::InvalidParameter("coef0 must be finite".into()));
        }
        Ok(())
    }
}

/// Squared Euclidean distance without the dimension check; shared by both kNN
/// backends so that their distance keys are bit-identical.
#[inline]
pub(crate) fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| {
            let diff = x - y;
            diff * diff
        })
        .sum()
}

/// `‖a − b‖₂`.
pub fn euclidean_distance(a: &[f64], b: &[f64]) -> Result<f64> {
    check_dims(a, b)?;
    Ok(squared_distance(a, b).sqrt())
}

#[inline]
pub(crate) fn check_dims(a: &[f64], b: &[f64]) -> Result<()> {
    if a.len() != b.len() {
        return Err(WfrError::DimensionMismatch {
            expected: a.len(),
            got: b.len(),
        });
    }
    Ok(())
}
