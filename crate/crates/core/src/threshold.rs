//! Automatic threshold selection by grid search over `s1 + s2`.
//!
//! `s1` rewards partitions where kNN pairs, weighted by inverse distance,
//! rarely cross family boundaries. `s2` rewards families that are neither
//! tiny nor wildly unbalanced. Outliers count as their own label for `s1`
//! and are left out of the families for `s2` (while still counting toward
//! the total point count).

use std::io::Write;
use std::path::Path;

use rayon::prelude::*;

use crate::error::{Result, WfrError};
use crate::graph::{connected_components, mark_outliers, threshold_adjacency, OutlierPolicy};
use crate::neighbors::{NeighborLists, SparseResemblance};
use crate::types::{Dataset, Labels, DEFAULT_EPS, OUTLIER};

pub const DEFAULT_GRID_STEP: f64 = 0.01;
pub const DEFAULT_F_MIN: f64 = 0.05;
pub const DEFAULT_ALPHA: f64 = 2.0;
pub const DEFAULT_MIN_CLUSTERS: usize = 2;

/// Graph-based separation score `s1` in `[0, 1]`.
///
/// Fails if `labels` and `nbrs` do not describe the same number of points.
pub fn separation_score(
    data: &Dataset,
    nbrs: &NeighborLists,
    labels: &Labels,
    eps: f64,
) -> Result<f64> {
    if nbrs.len() != data.n() || labels.len() != data.n() {
        return Err(WfrError::LengthMismatch {
            left: data.n(),
            right: if labels.len() != data.n() {
                labels.len()
            } else {
                nbrs.len()
            },
        });
    }
    let l = labels.as_slice();
    let mut crossing = 0.0;
    let mut total = 0.0;
    for i in 0..data.n() {
        for (j, dist) in nbrs.row(i) {
            let w = 1.0 / (dist + eps);
            total += w;
            if l[i] != l[j] {
                crossing += w;
            }
        }
    }
    if total == 0.0 {
        return Ok(1.0);
    }
    Ok((1.0 - crossing / total).clamp(0.0, 1.0))
}

/// Cluster-size score `s2` in `[0, 1]`.
///
/// Fractions are taken over non-outlier families relative to the full point
/// count; the variance is the population variance of those fractions.
pub fn size_score(labels: &Labels, f_min: f64, alpha: f64) -> Result<f64> {
    if !(f_min > 0.0 && f_min <= 1.0) {
        return Err(WfrError::InvalidParameter(format!(
            "f_min must lie in (0, 1], got {f_min}"
        )));
    }
    if !(alpha >= 1.0 && alpha.is_finite()) {
        return Err(WfrError::InvalidParameter(format!(
            "alpha must be at least 1, got {alpha}"
        )));
    }
    let mut sizes: Vec<usize> = Vec::new();
    for &l in labels.as_slice() {
        if l == OUTLIER {
            continue;
        }
        let l = l as usize;
        if l >= sizes.len() {
            sizes.resize(l + 1, 0);
        }
        sizes[l] += 1;
    }
    sizes.retain(|&s| s > 0);
    if sizes.is_empty() {
        return Err(WfrError::NoClusters);
    }
    let n = labels.len() as f64;
    let c = sizes.len() as f64;
    let fractions: Vec<f64> = sizes.iter().map(|&s| s as f64 / n).collect();
    let coverage = fractions.iter().map(|f| (f / f_min).min(1.0)).sum::<f64>() / c;
    let mean = fractions.iter().sum::<f64>() / c;
    let var = fractions.iter().map(|f| (f - mean).powi(2)).sum::<f64>() / c;
    Ok((coverage * (-alpha * var).exp()).clamp(0.0, 1.0))
}

/// Grid-search settings.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridSearch {
    pub step: f64,
    pub f_min: f64,
    pub alpha: f64,
    pub eps: f64,
    /// Candidates with fewer non-outlier families are skipped unless no
    /// candidate reaches this count. A single family always scores the
    /// maximum `s1 = s2 = 1`, so without this floor any connected kNN graph
    /// collapses to one cluster.
    pub min_clusters: usize,
}

impl Default for GridSearch {
    fn default() -> Self {
        Self {
            step: DEFAULT_GRID_STEP,
            f_min: DEFAULT_F_MIN,
            alpha: DEFAULT_ALPHA,
            eps: DEFAULT_EPS,
            min_clusters: DEFAULT_MIN_CLUSTERS,
        }
    }
}

impl GridSearch {
    pub fn validate(&self) -> Result<()> {
        if !(self.step > 0.0 && self.step < 1.0) {
            return Err(WfrError::InvalidParameter(format!(
                "grid step must lie in (0, 1), got {}",
                self.step
            )));
        }
        if self.min_clusters == 0 {
            return Err(WfrError::InvalidParameter(
                "min_clusters must be at least 1".into(),
            ));
        }
        if !(self.eps > 0.0 && self.eps.is_finite()) {
            return Err(WfrError::InvalidParameter(format!(
                "eps must be positive, got {}",
                self.eps
            )));
        }
        Ok(())
    }

    /// Candidate thresholds `1, 1 − step, …` down to the last value `>= 0`.
    pub fn thresholds(&self) -> Vec<f64> {
        let count = (1.0 / self.step + 1e-9).floor() as usize;
        (0..=count)
            .map(|i| {
                let tau = 1.0 - i as f64 * self.step;
                ((tau * 1e12).round() / 1e12).clamp(0.0, 1.0)
            })
            .collect()
    }
}

/// Scores recorded for one candidate threshold.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ThresholdCandidate {
    pub tau: f64,
    /// Connected components before outlier marking.
    pub num_components: usize,
    /// Non-outlier families after outlier marking.
    pub num_clusters: usize,
    pub num_outliers: usize,
    pub s1: f64,
    pub s2: f64,
    pub total: f64,
}

/// All candidates in grid order (strictly decreasing `tau`).
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ThresholdDiagnostics {
    pub candidates: Vec<ThresholdCandidate>,
}

impl ThresholdDiagnostics {
    /// Index of the best candidate with at least `min_clusters` families,
    /// or of the best overall if none qualifies. Ties go to the larger
    /// threshold.
    pub fn best_index(&self, min_clusters: usize) -> Option<usize> {
        let eligible = |c: &ThresholdCandidate| c.num_clusters >= min_clusters;
        let any_eligible = self.candidates.iter().any(eligible);
        let mut best: Option<usize> = None;
        for (i, c) in self.candidates.iter().enumerate() {
            if any_eligible && !eligible(c) {
                continue;
            }
            match best {
                Some(b) if self.candidates[b].total >= c.total => {}
                _ => best = Some(i),
            }
        }
        best
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "tau,num_clusters,s1,s2,total")?;
        for c in &self.candidates {
            writeln!(
                out,
                "{},{},{},{},{}",
                c.tau, c.num_clusters, c.s1, c.s2, c.total
            )?;
        }
        Ok(())
    }

    pub fn save_csv(&self, path: &Path) -> Result<()> {
        let io_err = |source| WfrError::Io {
            path: path.to_path_buf(),
            source,
        };
        let file = std::fs::File::create(path).map_err(io_err)?;
        let mut w = std::io::BufWriter::new(file);
        self.write_csv(&mut w).map_err(io_err)?;
        w.flush().map_err(io_err)
    }
}

fn evaluate(
    r: &SparseResemblance,
    data: &Dataset,
    nbrs: &NeighborLists,
    tau: f64,
    policy: &OutlierPolicy,
    grid: &GridSearch,
) -> Result<ThresholdCandidate> {
    let components = connected_components(&threshold_adjacency(r, tau)?);
    let labels = mark_outliers(&components, policy)?;
    let s1 = separation_score(data, nbrs, &labels, grid.eps)?;
    let s2 = size_score(&labels, grid.f_min, grid.alpha)?;
    Ok(ThresholdCandidate {
        tau,
        num_components: components.num_clusters(),
        num_clusters: labels.num_clusters(),
        num_outliers: labels.num_outliers(),
        s1,
        s2,
        total: s1 + s2,
    })
}

/// Picks the grid threshold maximizing `s1 + s2`.
///
/// Candidates are evaluated in parallel; the result does not depend on
/// evaluation order.
pub fn select_threshold(
    r: &SparseResemblance,
    data: &Dataset,
    nbrs: &NeighborLists,
    policy: &OutlierPolicy,
    grid: &GridSearch,
) -> Result<(f64, ThresholdDiagnostics)> {
    grid.validate()?;
    policy.validate()?;
    let candidates = grid
        .thresholds()
        .into_par_iter()
        .map(|tau| evaluate(r, data, nbrs, tau, policy, grid))
        .collect::<Result<Vec<_>>>()?;
    let diagnostics = ThresholdDiagnostics { candidates };
    let best = diagnostics
        .best_index(grid.min_clusters)
        .expect("grid always holds at least two thresholds");
    Ok((diagnostics.candidates[best].tau, diagnostics))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::neighbors::{build_resemblance_matrix, knn_brute};
    use crate::types::{ResemblanceConfig, ResemblanceKind};

    fn labels(v: &[i32]) -> Labels {
        Labels::new(v.to_vec()).unwrap()
    }

    #[test]
    fn separation_examples() {
        let data = Dataset::from_flat(vec![0.0, 1.0, 5.0], 1).unwrap();
        let nb = knn_brute(&data, 1).unwrap();
        assert_eq!(
            separation_score(&data, &nb, &labels(&[0, 0, 0]), 1e-8).unwrap(),
            1.0
        );
        let s1 = separation_score(&data, &nb, &labels(&[0, 0, 1]), 1e-8).unwrap();
        assert!((s1 - 8.0 / 9.0).abs() < 1e-8, "{s1}");

        let two = Dataset::from_flat(vec![0.0, 3.0], 1).unwrap();
        let nb = knn_brute(&two, 1).unwrap();
        assert_eq!(
            separation_score(&two, &nb, &labels(&[0, 1]), 1e-8).unwrap(),
            0.0
        );
        assert!(separation_score(&two, &nb, &labels(&[0]), 1e-8).is_err());
    }

    #[test]
    fn outliers_count_as_different_for_separation() {
        let data = Dataset::from_flat(vec![0.0, 1.0, 5.0], 1).unwrap();
        let nb = knn_brute(&data, 1).unwrap();
        let a = separation_score(&data, &nb, &labels(&[0, 0, 1]), 1e-8).unwrap();
        let b = separation_score(&data, &nb, &labels(&[0, 0, -1]), 1e-8).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn size_examples() {
        assert_eq!(size_score(&labels(&[0; 20]), 0.05, 2.0).unwrap(), 1.0);
        assert_eq!(size_score(&labels(&[0, 0, 1, 1]), 0.05, 2.0).unwrap(), 1.0);

        let mut v = vec![0; 99];
        v.push(1);
        let s2 = size_score(&labels(&v), 0.05, 2.0).unwrap();
        assert!((s2 - 0.371_195_788_501_573_5).abs() < 1e-12, "{s2}");

        assert!(matches!(
            size_score(&labels(&[-1, -1]), 0.05, 2.0),
            Err(WfrError::NoClusters)
        ));
        assert!(size_score(&labels(&[0]), 0.0, 2.0).is_err());
        assert!(size_score(&labels(&[0]), 0.05, 0.5).is_err());
    }

    #[test]
    fn outliers_shrink_fractions() {
        // one family of 2 among 4 points: f = 0.5 and coverage stays 1
        let s = size_score(&labels(&[0, 0, -1, -1]), 0.05, 2.0).unwrap();
        assert_eq!(s, 1.0);
        // one family of 1 among 40 points: f = 0.025 -> coverage 0.5
        let mut v = vec![-1; 39];
        v.push(0);
        let s = size_score(&labels(&v), 0.05, 2.0).unwrap();
        assert!((s - 0.5).abs() < 1e-15);
    }

    #[test]
    fn grid_shape() {
        let g = GridSearch::default();
        let t = g.thresholds();
        assert_eq!(t.len(), 101);
        assert_eq!(t[0], 1.0);
        assert_eq!(t[31], 0.69);
        assert_eq!(*t.last().unwrap(), 0.0);
        assert!(t.windows(2).all(|w| w[0] > w[1]));

        let g = GridSearch { step: 0.3, ..g };
        assert_eq!(g.thresholds(), vec![1.0, 0.7, 0.4, 0.1]);
        assert!(GridSearch { step: 0.0, ..g }.validate().is_err());
        assert!(GridSearch { step: 1.0, ..g }.validate().is_err());
    }

    #[test]
    fn degenerate_scores_select_top_threshold() {
        // equally spaced points: every kNN edge has the same score
        let data = Dataset::from_flat(vec![0.0, 1.0, 2.0, 3.0], 1).unwrap();
        let nb = knn_brute(&data, 1).unwrap();
        let cfg = ResemblanceConfig::with_defaults(ResemblanceKind::Log, 1);
        let r = build_resemblance_matrix(&data, &nb, &cfg).unwrap();
        assert!(r.bounds().is_degenerate());
        let (tau, diag) =
            select_threshold(&r, &data, &nb, &OutlierPolicy::None, &GridSearch::default()).unwrap();
        assert_eq!(tau, 1.0);
        let first = diag.candidates[0];
        assert!(diag.candidates.iter().all(|c| c.total == first.total));
    }

    #[test]
    fn diagnostics_csv_columns() {
        let diag = ThresholdDiagnostics {
            candidates: vec![ThresholdCandidate {
                tau: 0.5,
                num_components: 3,
                num_clusters: 2,
                num_outliers: 1,
                s1: 0.75,
                s2: 0.25,
                total: 1.0,
            }],
        };
        let mut buf = Vec::new();
        diag.write_csv(&mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "tau,num_clusters,s1,s2,total\n0.5,2,0.75,0.25,1\n"
        );
    }

    #[test]
    fn best_index_prefers_larger_tau_on_ties() {
        let mk = |tau, total| ThresholdCandidate {
            tau,
            num_components: 1,
            num_clusters: 1,
            num_outliers: 0,
            s1: 0.0,
            s2: 0.0,
            total,
        };
        let diag = ThresholdDiagnostics {
            candidates: vec![mk(1.0, 1.0), mk(0.9, 1.5), mk(0.8, 1.5), mk(0.7, 1.2)],
        };
        assert_eq!(diag.best_index(1), Some(1));
    }

    #[test]
    fn single_family_candidates_skipped_when_possible() {
        let mk = |tau, num_clusters, total| ThresholdCandidate {
            tau,
            num_components: num_clusters,
            num_clusters,
            num_outliers: 0,
            s1: 0.0,
            s2: 0.0,
            total,
        };
        let diag = ThresholdDiagnostics {
            candidates: vec![mk(1.0, 9, 0.4), mk(0.5, 2, 1.9), mk(0.0, 1, 2.0)],
        };
        assert_eq!(diag.best_index(1), Some(2));
        assert_eq!(diag.best_index(2), Some(1));
        let diag = ThresholdDiagnostics {
            candidates: vec![mk(1.0, 1, 1.5), mk(0.5, 1, 2.0)],
        };
        assert_eq!(diag.best_index(2), Some(1));
    }
}
