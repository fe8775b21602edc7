use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Result, WfrError};
use crate::types::{Dataset, Labels};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Family {
    TwoSpirals,
    TwoCircles,
    TwoMoons,
    GaussianBlobs,
}

impl Family {
    pub const ALL: [Family; 4] = [
        Family::TwoSpirals,
        Family::TwoCircles,
        Family::TwoMoons,
        Family::GaussianBlobs,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::TwoSpirals => "two_spirals",
            Family::TwoCircles => "two_circles",
            Family::TwoMoons => "two_moons",
            Family::GaussianBlobs => "gaussian_blobs",
        }
    }

    /// Noise level used when none is given.
    pub fn default_noise(self) -> f64 {
        match self {
            Family::TwoSpirals => 0.02,
            Family::TwoCircles => 0.03,
            Family::TwoMoons => 0.05,
            Family::GaussianBlobs => 0.0,
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = WfrError;

    fn from_str(s: &str) -> Result<Self> {
        Family::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| WfrError::InvalidParameter(format!("unknown dataset family `{s}`")))
    }
}

/// One Gaussian component: mean and covariance (row-major, `d × d`).
#[derive(Clone, Debug, PartialEq)]
pub struct Blob {
    pub mean: Vec<f64>,
    pub covariance: Vec<f64>,
}

impl Blob {
    pub fn new(mean: Vec<f64>, covariance: Vec<f64>) -> Self {
        Self { mean, covariance }
    }

    /// Three 2-D Gaussians of different shapes: round at (0, 0), stretched
    /// along x at (5, 0), and tilted at (2.5, 4).
    pub fn default_set() -> Vec<Blob> {
        // diag(1.0, 0.1) rotated by -30 degrees, so the long axis points
        // away from both other means
        let (s, c) = (-PI / 6.0).sin_cos();
        let (l1, l2) = (1.0, 0.1);
        let tilted = vec![
            c * c * l1 + s * s * l2,
            c * s * (l1 - l2),
            c * s * (l1 - l2),
            s * s * l1 + c * c * l2,
        ];
        vec![
            Blob::new(vec![0.0, 0.0], vec![1.0, 0.0, 0.0, 1.0]),
            Blob::new(vec![5.0, 0.0], vec![2.0, 0.0, 0.0, 0.3]),
            Blob::new(vec![2.5, 4.0], tilted),
        ]
    }
}

/// Parameters of a synthetic benchmark.
#[derive(Clone, Debug, PartialEq)]
pub struct GeneratorSpec {
    pub family: Family,
    pub n: usize,
    pub noise: f64,
    pub seed: u64,
    /// Components for [`Family::GaussianBlobs`]; ignored otherwise.
    pub blobs: Vec<Blob>,
}

impl GeneratorSpec {
    /// Settings with the family's default noise and, for blobs, the default set.
    pub fn new(family: Family, n: usize, seed: u64) -> Self {
        Self {
            family,
            n,
            noise: family.default_noise(),
            seed,
            blobs: if family == Family::GaussianBlobs {
                Blob::default_set()
            } else {
                Vec::new()
            },
        }
    }

    pub fn with_noise(mut self, noise: f64) -> Self {
        self.noise = noise;
        self
    }

    pub fn with_blobs(mut self, blobs: Vec<Blob>) -> Self {
        self.blobs = blobs;
        self
    }
}

/// Splits `n` into `parts` near-equal counts, remainder to the first parts.
fn split(n: usize, parts: usize) -> impl Iterator<Item = usize> {
    (0..parts).map(move |p| n / parts + usize::from(p < n % parts))
}

/// Draws a labeled sample. The output is a pure function of `spec`.
pub fn generate(spec: &GeneratorSpec) -> Result<(Dataset, Labels)> {
    if spec.n < 2 {
        return Err(WfrError::InvalidParameter(format!(
            "need at least 2 points, got {}",
            spec.n
        )));
    }
    if !(spec.noise.is_finite() && spec.noise >= 0.0) {
        return Err(WfrError::InvalidParameter(format!(
            "noise must be finite and non-negative, got {}",
            spec.noise
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let (mut values, labels, d) = match spec.family {
        Family::TwoSpirals => two_branch(spec.n, &mut rng, |rng, branch| {
            let t = PI + 3.0 * PI * rng.random::<f64>();
            let r = t / (4.0 * PI);
            let sign = if branch == 0 { 1.0 } else { -1.0 };
            [sign * r * t.cos(), sign * r * t.sin()]
        }),
        Family::TwoCircles => two_branch(spec.n, &mut rng, |rng, branch| {
            let t = 2.0 * PI * rng.random::<f64>();
            let r = if branch == 0 { 1.0 } else { 0.5 };
            [r * t.cos(), r * t.sin()]
        }),
        Family::TwoMoons => two_branch(spec.n, &mut rng, |rng, branch| {
            let t = PI * rng.random::<f64>();
            if branch == 0 {
                [t.cos(), t.sin()]
            } else {
                [1.0 - t.cos(), 0.5 - t.sin()]
            }
        }),
        Family::GaussianBlobs => blobs(spec.n, &spec.blobs, &mut rng)?,
    };
    if spec.noise > 0.0 {
        for v in values.iter_mut() {
            let z: f64 = rng.sample(StandardNormal);
            *v += spec.noise * z;
        }
    }
    Ok((Dataset::from_flat(values, d)?, Labels::new(labels)?))
}

fn two_branch<F>(n: usize, rng: &mut ChaCha8Rng, mut draw: F) -> (Vec<f64>, Vec<i32>, usize)
where
    F: FnMut(&mut ChaCha8Rng, usize) -> [f64; 2],
{
    let mut values = Vec::with_capacity(2 * n);
    let mut labels = Vec::with_capacity(n);
    for (branch, count) in split(n, 2).enumerate() {
        for _ in 0..count {
            values.extend(draw(rng, branch));
            labels.push(branch as i32);
        }
    }
    (values, labels, 2)
}

fn blobs(n: usize, blobs: &[Blob], rng: &mut ChaCha8Rng) -> Result<(Vec<f64>, Vec<i32>, usize)> {
    let first = blobs.first().ok_or_else(|| {
        WfrError::InvalidParameter("gaussian_blobs needs at least one blob".into())
    })?;
    let d = first.mean.len();
    if d == 0 {
        return Err(WfrError::ZeroDimension);
    }
    let factors = blobs
        .iter()
        .enumerate()
        .map(|(index, b)| {
            if b.mean.len() != d {
                return Err(WfrError::DimensionMismatch {
                    expected: d,
                    got: b.mean.len(),
                });
            }
            sqrt_factor(&b.covariance, d).ok_or(WfrError::InvalidCovariance { index })
        })
        .collect::<Result<Vec<_>>>()?;

    let mut values = Vec::with_capacity(n * d);
    let mut labels = Vec::with_capacity(n);
    let mut z = vec![0.0; d];
    for (b, count) in split(n, blobs.len()).enumerate() {
        for _ in 0..count {
            for zi in z.iter_mut() {
                *zi = rng.sample(StandardNormal);
            }
            for row in 0..d {
                let offset: f64 = (0..d).map(|col| factors[b][(row, col)] * z[col]).sum();
                values.push(blobs[b].mean[row] + offset);
            }
            labels.push(b as i32);
        }
    }
    Ok((values, labels, d))
}

/// `L` with `L Lᵀ = cov`, or `None` unless `cov` is symmetric PSD.
fn sqrt_factor(cov: &[f64], d: usize) -> Option<DMatrix<f64>> {
    if cov.len() != d * d || cov.iter().any(|v| !v.is_finite()) {
        return None;
    }
    let m = DMatrix::from_row_slice(d, d, cov);
    let scale = cov.iter().fold(0.0f64, |a, v| a.max(v.abs())).max(1.0);
    let tol = 1e-12 * scale;
    for i in 0..d {
        for j in 0..i {
            if (m[(i, j)] - m[(j, i)]).abs() > tol {
                return None;
            }
        }
    }
    let eig = SymmetricEigen::new(m);
    if eig.eigenvalues.iter().any(|&l| l < -tol) {
        return None;
    }
    let roots = eig.eigenvalues.map(|l| l.max(0.0).sqrt());
    Some(eig.eigenvectors * DMatrix::from_diagonal(&roots))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn moons_on_arcs_without_noise() {
        let spec = GeneratorSpec::new(Family::TwoMoons, 100, 3).with_noise(0.0);
        let (data, labels) = generate(&spec).unwrap();
        assert_eq!(data.n(), 100);
        for (i, p) in data.rows().enumerate() {
            let (x, y) = (p[0], p[1]);
            let dist = if labels[i] == 0 {
                // upper unit arc, centered at the origin
                ((x * x + y * y).sqrt() - 1.0).abs().max((-y).max(0.0))
            } else {
                // lower unit arc, centered at (1, 0.5)
                let (u, v) = (x - 1.0, y - 0.5);
                ((u * u + v * v).sqrt() - 1.0).abs().max(v.max(0.0))
            };
            assert!(dist < 1e-9, "point {i} off its arc by {dist}");
        }
        assert_eq!(labels.as_slice().iter().filter(|&&l| l == 1).count(), 50);
    }

    #[test]
    fn circles_radii_without_noise() {
        let spec = GeneratorSpec::new(Family::TwoCircles, 51, 9).with_noise(0.0);
        let (data, labels) = generate(&spec).unwrap();
        for (i, p) in data.rows().enumerate() {
            let r = (p[0] * p[0] + p[1] * p[1]).sqrt();
            let want = if labels[i] == 0 { 1.0 } else { 0.5 };
            assert!((r - want).abs() < 1e-9);
        }
    }

    #[test]
    fn spiral_arms_are_point_reflections() {
        let spec = GeneratorSpec::new(Family::TwoSpirals, 200, 1).with_noise(0.0);
        let (data, labels) = generate(&spec).unwrap();
        for (i, p) in data.rows().enumerate() {
            let r = (p[0] * p[0] + p[1] * p[1]).sqrt();
            assert!((0.25 - 1e-12..=1.0 + 1e-12).contains(&r));
            // recover t from the radius and check the angle matches
            let t = r * 4.0 * PI;
            let sign = if labels[i] == 0 { 1.0 } else { -1.0 };
            assert!((sign * r * t.cos() - p[0]).abs() < 1e-9);
            assert!((sign * r * t.sin() - p[1]).abs() < 1e-9);
        }
    }

    #[test]
    fn degenerate_blobs_coincide() {
        let blob = Blob::new(vec![1.5, -2.0], vec![0.0; 4]);
        let spec = GeneratorSpec::new(Family::GaussianBlobs, 30, 4)
            .with_noise(0.0)
            .with_blobs(vec![blob.clone(), blob]);
        let (data, labels) = generate(&spec).unwrap();
        assert!(data.rows().all(|p| p == [1.5, -2.0]));
        assert_eq!(labels.num_clusters(), 2);
    }

    #[test]
    fn blob_sample_covariance_close_to_target() {
        let blobs = Blob::default_set();
        let spec = GeneratorSpec::new(Family::GaussianBlobs, 60_000, 11).with_noise(0.0);
        let (data, labels) = generate(&spec).unwrap();
        for (b, blob) in blobs.iter().enumerate() {
            let pts: Vec<&[f64]> = data
                .rows()
                .zip(labels.as_slice())
                .filter(|(_, &l)| l == b as i32)
                .map(|(p, _)| p)
                .collect();
            let m = pts.len() as f64;
            let mean: Vec<f64> = (0..2)
                .map(|a| pts.iter().map(|p| p[a]).sum::<f64>() / m)
                .collect();
            for a in 0..2 {
                assert!((mean[a] - blob.mean[a]).abs() < 0.05);
                for c in 0..2 {
                    let cov = pts
                        .iter()
                        .map(|p| (p[a] - mean[a]) * (p[c] - mean[c]))
                        .sum::<f64>()
                        / m;
                    assert!(
                        (cov - blob.covariance[a * 2 + c]).abs() < 0.06,
                        "{b} {a}{c} {cov}"
                    );
                }
            }
        }
    }

    #[test]
    fn invalid_specs() {
        assert!(generate(&GeneratorSpec::new(Family::TwoMoons, 1, 0)).is_err());
        assert!(generate(&GeneratorSpec::new(Family::TwoMoons, 10, 0).with_noise(-1.0)).is_err());
        let bad = Blob::new(vec![0.0, 0.0], vec![1.0, 2.0, 2.0, 1.0]);
        let spec = GeneratorSpec::new(Family::GaussianBlobs, 10, 0).with_blobs(vec![bad]);
        assert!(matches!(
            generate(&spec),
            Err(WfrError::InvalidCovariance { index: 0 })
        ));
        let asym = Blob::new(vec![0.0, 0.0], vec![1.0, 0.5, 0.0, 1.0]);
        let spec = GeneratorSpec::new(Family::GaussianBlobs, 10, 0).with_blobs(vec![asym]);
        assert!(generate(&spec).is_err());
    }

    #[test]
    fn seeded_determinism() {
        for family in Family::ALL {
            let spec = GeneratorSpec::new(family, 77, 5);
            let a = generate(&spec).unwrap();
            let b = generate(&spec).unwrap();
            assert_eq!(a, b);
            let other = generate(&GeneratorSpec::new(family, 77, 6)).unwrap();
            assert_ne!(a.0, other.0);
        }
    }

    #[test]
    fn family_names_round_trip() {
        for f in Family::ALL {
            assert_eq!(f.name().parse::<Family>().unwrap(), f);
        }
        assert!("three_moons".parse::<Family>().is_err());
    }
}
