//! kNN graph construction and the sparse resemblance matrix over its edges.
//!
//! Two exact backends are provided. Both order candidates by squared
//! distance and then by ascending index, so they agree bit for bit.

mod kdtree;

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::error::{Result, WfrError};
use crate::resemblance::{normalize_edges, EdgeScore, NormalizationBounds};
use crate::types::{squared_distance, Dataset, ResemblanceConfig};

use kdtree::KdTree;

/// Default neighbor count.
pub const DEFAULT_K: usize = 10;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum KnnBackend {
    Brute,
    #[default]
    KdTree,
}

impl fmt::Display for KnnBackend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            KnnBackend::Brute => "brute",
            KnnBackend::KdTree => "kdtree",
        })
    }
}

impl FromStr for KnnBackend {
    type Err = WfrError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "brute" => Ok(KnnBackend::Brute),
            "kdtree" => Ok(KnnBackend::KdTree),
            other => Err(WfrError::InvalidParameter(format!(
                "unknown knn backend `{other}`"
            ))),
        }
    }
}

/// Bounded candidate list kept sorted by `(squared distance, index)`.
pub(crate) struct Candidates {
    k: usize,
    items: Vec<(f64, usize)>,
}

impl Candidates {
    pub(crate) fn new(k: usize) -> Self {
        Self {
            k,
            items: Vec::with_capacity(k + 1),
        }
    }

    #[inline]
    fn cmp(a: &(f64, usize), b: &(f64, usize)) -> Ordering {
        a.0.total_cmp(&b.0).then(a.1.cmp(&b.1))
    }

    #[inline]
    pub(crate) fn offer(&mut self, dist2: f64, index: usize) {
        let item = (dist2, index);
        if self.items.len() == self.k {
            match self.items.last() {
                Some(worst) if Self::cmp(&item, worst) == Ordering::Less => {}
                _ => return,
            }
        }
        let pos = self
            .items
            .partition_point(|probe| Self::cmp(probe, &item) == Ordering::Less);
        self.items.insert(pos, item);
        self.items.truncate(self.k);
    }

    /// True when no point at squared distance `>= bound2` can enter the list.
    #[inline]
    pub(crate) fn prunes(&self, bound2: f64) -> bool {
        self.items.len() == self.k && self.items.last().is_some_and(|w| bound2 > w.0)
    }

    pub(crate) fn into_sorted(self) -> Vec<(f64, usize)> {
        self.items
    }
}

/// Per-query neighbor indices and distances, ascending by distance with ties
/// broken by ascending index.
#[derive(Clone, Debug, PartialEq)]
pub struct NeighborLists {
    k: usize,
    indices: Vec<usize>,
    distances: Vec<f64>,
}

impl NeighborLists {
    /// Number of query rows.
    pub fn len(&self) -> usize {
        self.indices.len().checked_div(self.k).unwrap_or(0)
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn indices(&self, i: usize) -> &[usize] {
        &self.indices[i * self.k..(i + 1) * self.k]
    }

    pub fn distances(&self, i: usize) -> &[f64] {
        &self.distances[i * self.k..(i + 1) * self.k]
    }

    /// `(neighbor, distance)` pairs of row `i`.
    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.indices(i)
            .iter()
            .copied()
            .zip(self.distances(i).iter().copied())
    }

    fn from_rows(k: usize, rows: Vec<Vec<(f64, usize)>>) -> Self {
        let mut indices = Vec::with_capacity(rows.len() * k);
        let mut distances = Vec::with_capacity(rows.len() * k);
        for row in rows {
            debug_assert_eq!(row.len(), k);
            for (d2, j) in row {
                indices.push(j);
                distances.push(d2.sqrt());
            }
        }
        Self {
            k,
            indices,
            distances,
        }
    }
}

fn check_k(k: usize, n: usize) -> Result<()> {
    if k < 1 || k >= n {
        return Err(WfrError::InvalidK { k, n });
    }
    Ok(())
}

fn brute_query(data: &Dataset, query: &[f64], k: usize, exclude: Option<usize>) -> Candidates {
    let mut cands = Candidates::new(k);
    for (j, p) in data.rows().enumerate() {
        if Some(j) != exclude {
            cands.offer(squared_distance(query, p), j);
        }
    }
    cands
}

/// Exact kNN of every training point by exhaustive search, self excluded.
pub fn knn_brute(data: &Dataset, k: usize) -> Result<NeighborLists> {
    check_k(k, data.n())?;
    let rows = (0..data.n())
        .into_par_iter()
        .map(|i| brute_query(data, data.point(i), k, Some(i)).into_sorted())
        .collect();
    Ok(NeighborLists::from_rows(k, rows))
}

/// Exact kNN of every training point through a kd-tree, self excluded.
pub fn knn_kdtree(data: &Dataset, k: usize) -> Result<NeighborLists> {
    check_k(k, data.n())?;
    let tree = KdTree::build(data);
    let rows = (0..data.n())
        .into_par_iter()
        .map(|i| tree.knn(data.point(i), k, Some(i)).into_sorted())
        .collect();
    Ok(NeighborLists::from_rows(k, rows))
}

pub fn knn(data: &Dataset, k: usize, backend: KnnBackend) -> Result<NeighborLists> {
    match backend {
        KnnBackend::Brute => knn_brute(data, k),
        KnnBackend::KdTree => knn_kdtree(data, k),
    }
}

/// kNN of external query points among `data`; no row is excluded.
///
/// Fails when the query dimensionality differs from `data` or `k` is not in
/// `1..=n`.
pub fn knn_query(
    data: &Dataset,
    queries: &[&[f64]],
    k: usize,
    backend: KnnBackend,
) -> Result<NeighborLists> {
    if k < 1 || k > data.n() {
        return Err(WfrError::InvalidK { k, n: data.n() });
    }
    if let Some(q) = queries.iter().find(|q| q.len() != data.d()) {
        return Err(WfrError::DimensionMismatch {
            expected: data.d(),
            got: q.len(),
        });
    }
    let rows = match backend {
        KnnBackend::Brute => queries
            .par_iter()
            .map(|q| brute_query(data, q, k, None).into_sorted())
            .collect(),
        KnnBackend::KdTree => {
            let tree = KdTree::build(data);
            queries
                .par_iter()
                .map(|q| tree.knn(q, k, None).into_sorted())
                .collect()
        }
    };
    Ok(NeighborLists::from_rows(k, rows))
}

/// Normalized resemblance scores on the (possibly asymmetric) kNN pattern.
#[derive(Clone, Debug)]
pub struct SparseResemblance {
    n: usize,
    edges: Vec<EdgeScore>,
    raw_scores: Vec<f64>,
    bounds: NormalizationBounds,
}

impl SparseResemblance {
    /// Assembles a matrix from raw edge scores, normalizing them.
    pub fn from_raw_edges(n: usize, raw: Vec<EdgeScore>) -> Result<Self> {
        if let Some(e) = raw
            .iter()
            .find(|e| e.src >= n || e.dst >= n || e.src == e.dst)
        {
            return Err(WfrError::InvalidParameter(format!(
                "invalid edge {} -> {} for n={n}",
                e.src, e.dst
            )));
        }
        let (edges, bounds) = normalize_edges(&raw)?;
        Ok(Self {
            n,
            edges,
            raw_scores: raw.into_iter().map(|e| e.score).collect(),
            bounds,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Normalized edges in row-major kNN order.
    pub fn edges(&self) -> &[EdgeScore] {
        &self.edges
    }

    /// Raw scores, aligned with [`edges`](Self::edges).
    pub fn raw_scores(&self) -> &[f64] {
        &self.raw_scores
    }

    pub fn bounds(&self) -> NormalizationBounds {
        self.bounds
    }
}

/// Scores every kNN edge with `cfg` and min-max normalizes the result.
pub fn build_resemblance_matrix(
    data: &Dataset,
    nbrs: &NeighborLists,
    cfg: &ResemblanceConfig,
) -> Result<SparseResemblance> {
    cfg.validate()?;
    if nbrs.len() != data.n() {
        return Err(WfrError::LengthMismatch {
            left: data.n(),
            right: nbrs.len(),
        });
    }
    let rows: Vec<Vec<EdgeScore>> = (0..data.n())
        .into_par_iter()
        .map(|i| {
            nbrs.indices(i)
                .iter()
                .map(|&j| {
                    Ok(EdgeScore {
                        src: i,
                        dst: j,
                        score: cfg.score(data.point(i), data.point(j))?,
                    })
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    SparseResemblance::from_raw_edges(data.n(), rows.into_iter().flatten().collect())
}
