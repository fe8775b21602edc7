//! External scoring against ground truth.

use std::collections::HashMap;
use std::fmt;

use crate::error::{Result, WfrError};
use crate::types::{Labels, OUTLIER};

/// Adjusted Rand index between two labelings.
///
/// Outliers are one ordinary group. Two partitions that are both a single
/// group, or both all singletons, score 1.
pub fn adjusted_rand_index(a: &[i32], b: &[i32]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(WfrError::LengthMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    let n = a.len();
    if n < 2 {
        return Ok(1.0);
    }
    let mut joint: HashMap<(i32, i32), u64> = HashMap::new();
    let mut rows: HashMap<i32, u64> = HashMap::new();
    let mut cols: HashMap<i32, u64> = HashMap::new();
    for (&x, &y) in a.iter().zip(b) {
        *joint.entry((x, y)).or_default() += 1;
        *rows.entry(x).or_default() += 1;
        *cols.entry(y).or_default() += 1;
    }
    let pairs = |c: u64| (c * c.saturating_sub(1) / 2) as f64;
    let index: f64 = joint.values().map(|&c| pairs(c)).sum();
    let sum_a: f64 = rows.values().map(|&c| pairs(c)).sum();
    let sum_b: f64 = cols.values().map(|&c| pairs(c)).sum();
    let expected = sum_a * sum_b / pairs(n as u64);
    let max = 0.5 * (sum_a + sum_b);
    if max == expected {
        return Ok(1.0);
    }
    Ok((index - expected) / (max - expected))
}

/// Family count, family sizes (by id) and outlier count.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClusterSummary {
    pub num_clusters: usize,
    pub sizes: Vec<usize>,
    pub outliers: usize,
}

impl ClusterSummary {
    pub fn total(&self) -> usize {
        self.sizes.iter().sum::<usize>() + self.outliers
    }
}

impl fmt::Display for ClusterSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sizes: Vec<String> = self.sizes.iter().map(|s| s.to_string()).collect();
        write!(
            f,
            "clusters={} sizes=[{}] outliers={}",
            self.num_clusters,
            sizes.join(","),
            self.outliers
        )
    }
}

pub fn summarize(labels: &Labels) -> ClusterSummary {
    let mut sizes: Vec<usize> = Vec::new();
    let mut outliers = 0;
    for &l in labels.as_slice() {
        if l == OUTLIER {
            outliers += 1;
            continue;
        }
        let l = l as usize;
        if l >= sizes.len() {
            sizes.resize(l + 1, 0);
        }
        sizes[l] += 1;
    }
    sizes.retain(|&s| s > 0);
    ClusterSummary {
        num_clusters: sizes.len(),
        sizes,
        outliers,
    }
}
