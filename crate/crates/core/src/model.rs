//! Fitting and out-of-sample assignment.

use crate::error::{Result, WfrError};
use crate::graph::{check_tau, search, OutlierPolicy, DEFAULT_OUTLIER_RATIO};
use crate::neighbors::{
    build_resemblance_matrix, knn, knn_query, KnnBackend, NeighborLists, SparseResemblance,
    DEFAULT_K,
};
use crate::resemblance::NormalizationBounds;
use crate::threshold::{select_threshold, GridSearch, ThresholdDiagnostics};
use crate::types::{Dataset, Labels, ResemblanceConfig, ResemblanceKind, OUTLIER};

/// How the threshold is chosen during fitting.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ThresholdMode {
    Fixed(f64),
    Auto(GridSearch),
}

impl Default for ThresholdMode {
    fn default() -> Self {
        ThresholdMode::Auto(GridSearch::default())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WfrParams {
    pub k: usize,
    pub resemblance: ResemblanceConfig,
    pub threshold: ThresholdMode,
    pub outliers: OutlierPolicy,
    pub backend: KnnBackend,
}

impl WfrParams {
    /// Defaults for data of dimensionality `d`: k = 10, automatic threshold,
    /// ratio outlier marking at 0.05, kd-tree search.
    pub fn new(kind: ResemblanceKind, d: usize) -> Self {
        Self {
            k: DEFAULT_K,
            resemblance: ResemblanceConfig::with_defaults(kind, d),
            threshold: ThresholdMode::default(),
            outliers: OutlierPolicy::Ratio {
                ratio: DEFAULT_OUTLIER_RATIO,
            },
            backend: KnnBackend::KdTree,
        }
    }

    pub fn with_k(mut self, k: usize) -> Self {
        self.k = k;
        self
    }

    pub fn with_threshold(mut self, tau: f64) -> Self {
        self.threshold = ThresholdMode::Fixed(tau);
        self
    }

    pub fn with_auto_threshold(mut self, grid: GridSearch) -> Self {
        self.threshold = ThresholdMode::Auto(grid);
        self
    }

    pub fn with_outliers(mut self, policy: OutlierPolicy) -> Self {
        self.outliers = policy;
        self
    }

    pub fn with_backend(mut self, backend: KnnBackend) -> Self {
        self.backend = backend;
        self
    }
}

/// Everything needed to label unseen points.
#[derive(Clone, Debug, PartialEq)]
pub struct ModelState {
    train: Dataset,
    labels: Labels,
    resemblance: ResemblanceConfig,
    k: usize,
    tau: f64,
    bounds: NormalizationBounds,
}

impl ModelState {
    pub fn new(
        train: Dataset,
        labels: Labels,
        resemblance: ResemblanceConfig,
        k: usize,
        tau: f64,
        bounds: NormalizationBounds,
    ) -> Result<Self> {
        if labels.len() != train.n() {
            return Err(WfrError::LengthMismatch {
                left: train.n(),
                right: labels.len(),
            });
        }
        check_tau(tau)?;
        resemblance.validate()?;
        let bounds = NormalizationBounds::new(bounds.r_min, bounds.r_max)?;
        if k < 1 {
            return Err(WfrError::InvalidK { k, n: train.n() });
        }
        Ok(Self {
            train,
            labels,
            resemblance,
            k,
            tau,
            bounds,
        })
    }

    pub fn train(&self) -> &Dataset {
        &self.train
    }

    pub fn labels(&self) -> &Labels {
        &self.labels
    }

    pub fn resemblance(&self) -> &ResemblanceConfig {
        &self.resemblance
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn bounds(&self) -> NormalizationBounds {
        self.bounds
    }

    /// Labels a test set.
    pub fn predict(&self, test: &Dataset) -> Result<Labels> {
        let rows: Vec<&[f64]> = test.rows().collect();
        self.predict_rows(&rows)
    }

    /// Labels arbitrary rows; an empty slice gives empty labels.
    pub fn predict_rows(&self, rows: &[&[f64]]) -> Result<Labels> {
        Ok(self.assign(rows)?.labels)
    }

    /// Per-row assignment details: label, chosen training neighbor and its
    /// clipped normalized resemblance.
    pub fn assign(&self, rows: &[&[f64]]) -> Result<Assignment> {
        if rows.is_empty() {
            return Ok(Assignment::default());
        }
        let d = self.train.d();
        if let Some(bad) = rows.iter().find(|r| r.len() != d) {
            return Err(WfrError::DimensionMismatch {
                expected: d,
                got: bad.len(),
            });
        }
        if let Some(pos) = rows
            .iter()
            .flat_map(|r| r.iter())
            .position(|v| !v.is_finite())
        {
            return Err(WfrError::NonFinite {
                row: pos / d,
                col: pos % d,
            });
        }
        let k = self.k.min(self.train.n());
        let nbrs = knn_query(&self.train, rows, k, KnnBackend::KdTree)?;
        let mut labels = Vec::with_capacity(rows.len());
        let mut neighbor = Vec::with_capacity(rows.len());
        let mut score = Vec::with_capacity(rows.len());
        for (i, row) in rows.iter().enumerate() {
            let (best, s) = self.best_neighbor(row, &nbrs, i)?;
            labels.push(if s >= self.tau {
                self.labels[best]
            } else {
                OUTLIER
            });
            neighbor.push(best);
            score.push(s);
        }
        Ok(Assignment {
            labels: Labels::from_vec_unchecked(labels),
            neighbor,
            score,
        })
    }

    fn best_neighbor(&self, row: &[f64], nbrs: &NeighborLists, i: usize) -> Result<(usize, f64)> {
        let mut best: Option<(usize, f64)> = None;
        for &j in nbrs.indices(i) {
            let raw = self.resemblance.score(row, self.train.point(j))?;
            let s = self.bounds.apply_clipped(raw);
            best = match best {
                Some((bj, bs)) if bs > s || (bs == s && bj < j) => Some((bj, bs)),
                _ => Some((j, s)),
            };
        }
        Ok(best.expect("k >= 1"))
    }
}

/// Result of [`ModelState::assign`].
#[derive(Clone, Debug, PartialEq)]
pub struct Assignment {
    pub labels: Labels,
    /// Training index of the most resembling neighbor.
    pub neighbor: Vec<usize>,
    /// Its normalized resemblance, clipped into `[0, 1]`.
    pub score: Vec<f64>,
}

impl Default for Assignment {
    fn default() -> Self {
        Self {
            labels: Labels::from_vec_unchecked(Vec::new()),
            neighbor: Vec::new(),
            score: Vec::new(),
        }
    }
}

/// Output of [`fit`].
#[derive(Clone, Debug)]
pub struct FitResult {
    pub model: ModelState,
    pub neighbors: NeighborLists,
    pub resemblance: SparseResemblance,
    /// Present when the threshold was searched for.
    pub diagnostics: Option<ThresholdDiagnostics>,
}

impl FitResult {
    pub fn labels(&self) -> &Labels {
        self.model.labels()
    }

    pub fn tau(&self) -> f64 {
        self.model.tau()
    }
}

/// Clusters `data`: kNN graph, normalized resemblances, threshold (fixed or
/// searched), then one search pass.
pub fn fit(data: &Dataset, params: &WfrParams) -> Result<FitResult> {
    params.resemblance.validate()?;
    params.outliers.validate()?;
    if let ThresholdMode::Fixed(tau) = params.threshold {
        check_tau(tau)?;
    }
    let neighbors = knn(data, params.k, params.backend)?;
    let resemblance = build_resemblance_matrix(data, &neighbors, &params.resemblance)?;
    let (tau, diagnostics) = match params.threshold {
        ThresholdMode::Fixed(tau) => (tau, None),
        ThresholdMode::Auto(grid) => {
            let (tau, diag) =
                select_threshold(&resemblance, data, &neighbors, &params.outliers, &grid)?;
            (tau, Some(diag))
        }
    };
    let labels = search(&resemblance, tau, &params.outliers)?;
    let model = ModelState::new(
        data.clone(),
        labels,
        params.resemblance,
        params.k,
        tau,
        resemblance.bounds(),
    )?;
    Ok(FitResult {
        model,
        neighbors,
        resemblance,
        diagnostics,
    })
}
