//! Resemblance functions and min-max normalization of edge scores.
//!
//! Every function here is increasing in similarity and symmetric in its
//! arguments. Scores are normalized over the stored kNN edges only; the
//! implicit zeros of non-neighbor pairs never enter the bounds.

use serde::{Deserialize, Serialize};

use crate::error::{Result, WfrError};
use crate::types::{check_dims, squared_distance, ResemblanceConfig, ResemblanceKind};

/// A directed kNN edge `src -> dst` carrying a resemblance score.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EdgeScore {
    pub src: usize,
    pub dst: usize,
    pub score: f64,
}

/// `1 / (1 + ln(‖x1 − x2‖₂ + 1 + eps))`.
pub fn log_resemblance(x1: &[f64], x2: &[f64], eps: f64) -> Result<f64> {
    check_dims(x1, x2)?;
    Ok(log_of_distance(squared_distance(x1, x2).sqrt(), eps))
}

#[inline]
fn log_of_distance(dist: f64, eps: f64) -> f64 {
    1.0 / (1.0 + (dist + 1.0 + eps).ln())
}

/// Cosine of the angle between `x1` and `x2`.
pub fn cosine_resemblance(x1: &[f64], x2: &[f64]) -> Result<f64> {
    check_dims(x1, x2)?;
    let n1 = dot(x1, x1).sqrt();
    let n2 = dot(x2, x2).sqrt();
    if n1 == 0.0 || n2 == 0.0 {
        return Err(WfrError::ZeroNorm);
    }
    // clamp guards against |cos| drifting past 1 by an ulp
    Ok((dot(x1, x2) / (n1 * n2)).clamp(-1.0, 1.0))
}

/// RBF kernel `exp(−gamma ‖x1 − x2‖₂²)`.
pub fn rbf_resemblance(x1: &[f64], x2: &[f64], gamma: f64) -> Result<f64> {
    check_dims(x1, x2)?;
    Ok((-gamma * squared_distance(x1, x2)).exp())
}

/// Sigmoid kernel `tanh(gamma ⟨x1, x2⟩ + coef0)`.
pub fn sigmoid_resemblance(x1: &[f64], x2: &[f64], gamma: f64, coef0: f64) -> Result<f64> {
    check_dims(x1, x2)?;
    Ok((gamma * dot(x1, x2) + coef0).tanh())
}

#[inline]
fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

impl ResemblanceConfig {
    /// Evaluates the configured resemblance between two points.
    pub fn score(&self, x1: &[f64], x2: &[f64]) -> Result<f64> {
        match self.kind {
            ResemblanceKind::Log => log_resemblance(x1, x2, self.eps),
            ResemblanceKind::Cosine => cosine_resemblance(x1, x2),
            ResemblanceKind::Rbf => rbf_resemblance(x1, x2, self.gamma),
            ResemblanceKind::Sigmoid => sigmoid_resemblance(x1, x2, self.gamma, self.coef0),
        }
    }
}

/// Min and max raw scores over the stored training edges.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormalizationBounds {
    pub r_min: f64,
    pub r_max: f64,
}

impl NormalizationBounds {
    pub fn new(r_min: f64, r_max: f64) -> Result<Self> {
        if !(r_min.is_finite() && r_max.is_finite()) || r_min > r_max {
            return Err(WfrError::InvalidParameter(format!(
                "invalid normalization bounds ({r_min}, {r_max})"
            )));
        }
        Ok(Self { r_min, r_max })
    }

    pub fn is_degenerate(&self) -> bool {
        self.r_max == self.r_min
    }

    /// Affine rescale of a raw score, unclipped. A degenerate range maps
    /// scores at or above the single training value to 1 and the rest to 0.
    pub fn apply(&self, score: f64) -> f64 {
        if self.is_degenerate() {
            if score >= self.r_min {
                1.0
            } else {
                0.0
            }
        } else {
            (score - self.r_min) / (self.r_max - self.r_min)
        }
    }

    /// [`apply`](Self::apply) clipped into `[0, 1]`.
    pub fn apply_clipped(&self, score: f64) -> f64 {
        self.apply(score).clamp(0.0, 1.0)
    }
}

/// Min-max normalizes edge scores into `[0, 1]`.
///
/// Bounds come from the stored edges alone. When every score is equal the
/// range is degenerate and all edges normalize to 1.
pub fn normalize_edges(edges: &[EdgeScore]) -> Result<(Vec<EdgeScore>, NormalizationBounds)> {
    if edges.is_empty() {
        return Err(WfrError::EmptyEdges);
    }
    let (mut r_min, mut r_max) = (f64::INFINITY, f64::NEG_INFINITY);
    for e in edges {
        if !e.score.is_finite() {
            return Err(WfrError::InvalidParameter(format!(
                "non-finite score on edge {} -> {}",
                e.src, e.dst
            )));
        }
        r_min = r_min.min(e.score);
        r_max = r_max.max(e.score);
    }
    let bounds = NormalizationBounds { r_min, r_max };
    let normalized = edges
        .iter()
        .map(|e| EdgeScore {
            score: bounds.apply(e.score).clamp(0.0, 1.0),
            ..*e
        })
        .collect();
    Ok((normalized, bounds))
}
