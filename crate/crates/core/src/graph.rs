//! Thresholding, OR-symmetrization, connected components and outlier marking.
//!
//! Together these make up a single "search" pass at one threshold: keep the
//! directed kNN edges whose normalized score is at least `tau`, take the
//! undirected union, and label each connected component as one family.
//! Every node carries an implicit self-loop, so isolated points are
//! singleton families rather than unlabeled.

use serde::{Deserialize, Serialize};

use crate::error::{Result, WfrError};
use crate::neighbors::SparseResemblance;
use crate::types::{Labels, OUTLIER};
use crate::union_find::DisjointSet;

/// Default fraction of the largest family below which a family is an outlier.
pub const DEFAULT_OUTLIER_RATIO: f64 = 0.05;
/// Default number of standard deviations for statistical outlier marking.
pub const DEFAULT_OUTLIER_STD: f64 = 2.0;

/// Undirected adjacency in CSR form. Self-loops are implicit.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Adjacency {
    offsets: Vec<usize>,
    targets: Vec<usize>,
}

impl Adjacency {
    /// Builds the symmetric closure of the given directed pairs.
    pub fn from_directed_pairs(n: usize, pairs: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut lists: Vec<Vec<usize>> = vec![Vec::new(); n];
        for (a, b) in pairs {
            if a != b {
                lists[a].push(b);
                lists[b].push(a);
            }
        }
        let mut offsets = Vec::with_capacity(n + 1);
        let mut targets = Vec::new();
        offsets.push(0);
        for mut l in lists {
            l.sort_unstable();
            l.dedup();
            targets.extend(l);
            offsets.push(targets.len());
        }
        Self { offsets, targets }
    }

    pub fn n(&self) -> usize {
        self.offsets.len() - 1
    }

    /// Neighbors of `i` excluding `i` itself, ascending.
    pub fn neighbors(&self, i: usize) -> &[usize] {
        &self.targets[self.offsets[i]..self.offsets[i + 1]]
    }

    /// Edge test; always true on the diagonal.
    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        i == j || self.neighbors(i).binary_search(&j).is_ok()
    }

    /// Number of undirected non-loop edges.
    pub fn edge_count(&self) -> usize {
        self.targets.len() / 2
    }

    /// Each undirected non-loop edge once, as `(low, high)`.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n()).flat_map(move |i| {
            self.neighbors(i)
                .iter()
                .filter(move |&&j| j > i)
                .map(move |&j| (i, j))
        })
    }
}

/// Keeps every directed edge scoring at least `tau`, then symmetrizes by OR.
pub fn threshold_adjacency(r: &SparseResemblance, tau: f64) -> Result<Adjacency> {
    check_tau(tau)?;
    Ok(Adjacency::from_directed_pairs(
        r.n(),
        r.edges()
            .iter()
            .filter(|e| e.score >= tau)
            .map(|e| (e.src, e.dst)),
    ))
}

pub(crate) fn check_tau(tau: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&tau) {
        return Err(WfrError::ThresholdOutOfRange(tau));
    }
    Ok(())
}

/// Labels connected components by depth-first search.
///
/// Components are numbered in order of their smallest member.
pub fn connected_components(adj: &Adjacency) -> Labels {
    let n = adj.n();
    let mut labels = vec![OUTLIER; n];
    let mut stack = Vec::new();
    let mut next = 0;
    for start in 0..n {
        if labels[start] != OUTLIER {
            continue;
        }
        labels[start] = next;
        stack.push(start);
        while let Some(u) = stack.pop() {
            for &v in adj.neighbors(u) {
                if labels[v] == OUTLIER {
                    labels[v] = next;
                    stack.push(v);
                }
            }
        }
        next += 1;
    }
    Labels::from_vec_unchecked(labels)
}

/// Same partition and numbering as [`connected_components`], via union-find.
pub fn connected_components_union_find(adj: &Adjacency) -> Labels {
    let n = adj.n();
    let mut ds = DisjointSet::new(n);
    for (a, b) in adj.edges() {
        ds.union(a, b);
    }
    let mut root_label = vec![OUTLIER; n];
    let mut next = 0;
    let labels = (0..n)
        .map(|i| {
            let root = ds.find(i);
            if root_label[root] == OUTLIER {
                root_label[root] = next;
                next += 1;
            }
            root_label[root]
        })
        .collect();
    Labels::from_vec_unchecked(labels)
}

/// How small families are turned into outliers.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "lowercase")]
pub enum OutlierPolicy {
    #[default]
    None,
    /// Families smaller than `ratio` times the largest family.
    Ratio { ratio: f64 },
    /// Families smaller than `mean − num_std · std` of the family sizes
    /// (population standard deviation).
    Statistical { num_std: f64 },
}

impl OutlierPolicy {
    pub fn ratio(ratio: f64) -> Result<Self> {
        let p = OutlierPolicy::Ratio { ratio };
        p.validate()?;
        Ok(p)
    }

    pub fn statistical(num_std: f64) -> Result<Self> {
        let p = OutlierPolicy::Statistical { num_std };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            OutlierPolicy::None => Ok(()),
            OutlierPolicy::Ratio { ratio } if ratio > 0.0 && ratio < 1.0 => Ok(()),
            OutlierPolicy::Ratio { ratio } => Err(WfrError::InvalidParameter(format!(
                "outlier ratio must lie in (0, 1), got {ratio}"
            ))),
            OutlierPolicy::Statistical { num_std } if num_std > 0.0 && num_std.is_finite() => {
                Ok(())
            }
            OutlierPolicy::Statistical { num_std } => Err(WfrError::InvalidParameter(format!(
                "outlier std multiple must be positive, got {num_std}"
            ))),
        }
    }

    /// Size below which a family is marked, given all family sizes.
    fn size_cutoff(&self, sizes: &[usize]) -> Option<f64> {
        match *self {
            OutlierPolicy::None => None,
            OutlierPolicy::Ratio { ratio } => {
                let max = sizes.iter().copied().max().unwrap_or(0);
                Some(ratio * max as f64)
            }
            OutlierPolicy::Statistical { num_std } => {
                if sizes.is_empty() {
                    return None;
                }
                let c = sizes.len() as f64;
                let mean = sizes.iter().map(|&s| s as f64).sum::<f64>() / c;
                let var = sizes
                    .iter()
                    .map(|&s| (s as f64 - mean).powi(2))
                    .sum::<f64>()
                    / c;
                Some(mean - num_std * var.sqrt())
            }
        }
    }
}

/// Sends whole small families to [`OUTLIER`] and renumbers the survivors
/// contiguously, keeping their relative order.
pub fn mark_outliers(labels: &Labels, policy: &OutlierPolicy) -> Result<Labels> {
    policy.validate()?;
    let values = labels.as_slice();
    if values.contains(&OUTLIER) {
        return Err(WfrError::InvalidParameter(
            "labels already contain outliers".into(),
        ));
    }
    let c = values.iter().map(|&l| l as usize + 1).max().unwrap_or(0);
    let mut sizes = vec![0usize; c];
    for &l in values {
        sizes[l as usize] += 1;
    }
    let Some(cutoff) = policy.size_cutoff(&sizes) else {
        return Ok(labels.clone());
    };
    let mut remap = vec![OUTLIER; c];
    let mut next = 0;
    for (id, &size) in sizes.iter().enumerate() {
        if size > 0 && (size as f64) >= cutoff {
            remap[id] = next;
            next += 1;
        }
    }
    Ok(Labels::from_vec_unchecked(
        values.iter().map(|&l| remap[l as usize]).collect(),
    ))
}

/// One full search pass: threshold, components, then outlier marking.
pub fn search(r: &SparseResemblance, tau: f64, policy: &OutlierPolicy) -> Result<Labels> {
    let adj = threshold_adjacency(r, tau)?;
    mark_outliers(&connected_components(&adj), policy)
}
