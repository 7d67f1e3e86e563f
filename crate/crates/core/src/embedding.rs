//! Planar embeddings of distance matrices.
//!
//! Two methods are provided. Classical (Torgerson) scaling factors the
//! double-centred squared-distance matrix. Non-metric scaling runs SMACOF
//! with isotonic disparities, so only the rank order of the input distances
//! matters; it starts from the classical solution unless a random start is
//! requested.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::adjacency::DistanceMatrix;
use crate::error::{Error, Result};
use crate::isotonic::isotonic_regression;
use crate::linalg::symmetric_eigen;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MdsMethod {
    Classical,
    NonMetric,
}

impl MdsMethod {
    pub fn as_str(&self) -> &'static str {
        match self {
            MdsMethod::Classical => "classical",
            MdsMethod::NonMetric => "nonmetric",
        }
    }
}

impl fmt::Display for MdsMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Starting configuration for non-metric scaling.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MdsInit {
    Classical,
    /// Uniform coordinates in `[-0.5, 0.5)` from a seeded ChaCha8 stream.
    Random {
        seed: u64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NonMetricConfig {
    pub max_iter: usize,
    /// Iteration stops once `(prev - next) < eps * prev` for stress-1.
    pub eps: f64,
    pub init: MdsInit,
}

impl Default for NonMetricConfig {
    fn default() -> Self {
        Self {
            max_iter: 300,
            eps: 1e-9,
            init: MdsInit::Classical,
        }
    }
}

/// Coordinates for each classifier plus fit diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct Embedding {
    pub classifier_ids: Vec<String>,
    pub dim: usize,
    /// Row-major `M x dim`.
    pub coords: Vec<f64>,
    pub method: MdsMethod,
    /// Stress-1 `sqrt(sum (dhat - d)^2 / sum d^2)`. For classical scaling the
    /// input distances play the role of `dhat`.
    pub stress: f64,
    /// Classical only: share `sum |neg eigenvalues| / sum |eigenvalues|` of
    /// spectrum that was clamped to zero.
    pub clamped_mass: f64,
    /// Classical only: the leading `dim` eigenvalues of the double-centred
    /// matrix, before clamping.
    pub eigenvalues: Vec<f64>,
    /// Non-metric only: stress-1 after initialization and each accepted iteration.
    pub trace: Vec<f64>,
    pub iterations: usize,
    pub seed: Option<u64>,
}

impl Embedding {
    pub fn len(&self) -> usize {
        self.classifier_ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classifier_ids.is_empty()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn distance(&self, i: usize, j: usize) -> f64 {
        euclidean(self.point(i), self.point(j))
    }
}

fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    libm::sqrt(a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum())
}

fn check_dim(m: usize, dim: usize) -> Result<()> {
    if dim == 0 {
        return Err(Error::TooShort { len: 0, min: 1 });
    }
    if m < 2 || dim > m - 1 {
        return Err(Error::DimensionTooLarge {
            dim,
            max: m.saturating_sub(1),
        });
    }
    Ok(())
}

fn center(coords: &mut [f64], dim: usize) {
    let m = coords.len() / dim;
    for k in 0..dim {
        let mean = (0..m).map(|i| coords[i * dim + k]).sum::<f64>() / m as f64;
        for i in 0..m {
            coords[i * dim + k] -= mean;
        }
    }
}

/// Torgerson scaling: top `dim` eigenpairs of `B = -1/2 J D^2 J`, with
/// coordinates `v_k * sqrt(max(lambda_k, 0))`.
pub fn classical_mds(d: &DistanceMatrix, dim: usize) -> Result<Embedding> {
    let m = d.len();
    check_dim(m, dim)?;

    let sq: Vec<f64> = d.values().iter().map(|x| x * x).collect();
    let row_mean: Vec<f64> = (0..m)
        .map(|i| sq[i * m..(i + 1) * m].iter().sum::<f64>() / m as f64)
        .collect();
    let grand = row_mean.iter().sum::<f64>() / m as f64;
    let mut b = vec![0.0; m * m];
    for i in 0..m {
        for j in 0..m {
            b[i * m + j] = -0.5 * (sq[i * m + j] - row_mean[i] - row_mean[j] + grand);
        }
    }
    // Exact symmetry for the solver.
    for i in 0..m {
        for j in i + 1..m {
            let v = 0.5 * (b[i * m + j] + b[j * m + i]);
            b[i * m + j] = v;
            b[j * m + i] = v;
        }
    }

    let eig = symmetric_eigen(&b, m);
    let total: f64 = eig.values.iter().map(|l| l.abs()).sum();
    let negative: f64 = eig.values.iter().filter(|l| **l < 0.0).map(|l| -l).sum();
    let clamped_mass = if total > 0.0 { negative / total } else { 0.0 };

    // Eigenvalues at round-off level of the largest one count as zero.
    let floor = 1e-12 * eig.values.iter().fold(0.0f64, |a, l| a.max(l.abs()));
    let mut coords = vec![0.0; m * dim];
    for k in 0..dim {
        let lambda = eig.values[k];
        let scale = if lambda > floor {
            libm::sqrt(lambda)
        } else {
            0.0
        };
        for i in 0..m {
            coords[i * dim + k] = eig.vectors[i * m + k] * scale;
        }
    }
    center(&mut coords, dim);

    let (num, den) = crate::adjacency::upper_pairs(m).fold((0.0, 0.0), |(num, den), (i, j)| {
        let delta = d.get(i, j);
        let e = euclidean(
            &coords[i * dim..(i + 1) * dim],
            &coords[j * dim..(j + 1) * dim],
        );
        (num + (delta - e) * (delta - e), den + delta * delta)
    });
    let stress = if den > 0.0 {
        libm::sqrt(num / den)
    } else {
        0.0
    };

    Ok(Embedding {
        classifier_ids: d.classifier_ids().to_vec(),
        dim,
        coords,
        method: MdsMethod::Classical,
        stress,
        clamped_mass,
        eigenvalues: eig.values[..dim].to_vec(),
        trace: Vec::new(),
        iterations: 0,
        seed: None,
    })
}

/// State of one non-metric evaluation: configuration distances, their
/// isotonic disparities and stress-1.
struct Fit {
    dist: Vec<f64>,
    disparity: Vec<f64>,
    stress: f64,
}

struct Smacof {
    m: usize,
    dim: usize,
    pairs: Vec<(usize, usize)>,
    /// Pair indices sorted by input dissimilarity.
    by_delta: Vec<usize>,
    /// Ranges of `by_delta` holding tied dissimilarities.
    tie_blocks: Vec<core::ops::Range<usize>>,
}

impl Smacof {
    fn new(d: &DistanceMatrix, dim: usize) -> Self {
        let m = d.len();
        let pairs: Vec<(usize, usize)> = crate::adjacency::upper_pairs(m).collect();
        let delta: Vec<f64> = pairs.iter().map(|&(i, j)| d.get(i, j)).collect();
        let mut by_delta: Vec<usize> = (0..pairs.len()).collect();
        by_delta.sort_by(|&a, &b| delta[a].total_cmp(&delta[b]).then(a.cmp(&b)));
        let mut tie_blocks = Vec::new();
        let mut start = 0;
        for k in 1..=by_delta.len() {
            if k == by_delta.len() || delta[by_delta[k]] != delta[by_delta[start]] {
                tie_blocks.push(start..k);
                start = k;
            }
        }
        Self {
            m,
            dim,
            pairs,
            by_delta,
            tie_blocks,
        }
    }

    fn evaluate(&self, x: &[f64]) -> Fit {
        let dim = self.dim;
        let dist: Vec<f64> = self
            .pairs
            .iter()
            .map(|&(i, j)| euclidean(&x[i * dim..(i + 1) * dim], &x[j * dim..(j + 1) * dim]))
            .collect();

        // Primary approach to ties: tied dissimilarities are free to take
        // any order, so each tie block is ordered by current distance.
        let mut order = self.by_delta.clone();
        for block in &self.tie_blocks {
            order[block.clone()].sort_by(|&a, &b| dist[a].total_cmp(&dist[b]).then(a.cmp(&b)));
        }
        let seq: Vec<f64> = order.iter().map(|&p| dist[p]).collect();
        let mut disparity = vec![0.0; dist.len()];
        if !seq.is_empty() {
            let fit =
                isotonic_regression(&seq, &vec![1.0; seq.len()]).expect("distances are finite");
            for (&p, &v) in order.iter().zip(&fit.fitted) {
                disparity[p] = v;
            }
        }

        let den: f64 = dist.iter().map(|v| v * v).sum();
        let num: f64 = dist
            .iter()
            .zip(&disparity)
            .map(|(a, b)| (a - b) * (a - b))
            .sum();
        let stress = if den > 0.0 {
            libm::sqrt(num / den)
        } else {
            0.0
        };
        Fit {
            dist,
            disparity,
            stress,
        }
    }

    /// Rescales `x` in place to the size that minimizes raw stress against
    /// disparities normalized to `sum dhat^2 = n_pairs`, and returns the fit
    /// at the new scale.
    fn rescale(&self, x: &mut [f64], fit: Fit) -> Fit {
        let d2: f64 = fit.dist.iter().map(|v| v * v).sum();
        let p_norm = libm::sqrt(fit.disparity.iter().map(|v| v * v).sum::<f64>());
        if d2 == 0.0 || p_norm == 0.0 {
            return fit;
        }
        let s = libm::sqrt(self.pairs.len() as f64) * p_norm / d2;
        for v in x.iter_mut() {
            *v *= s;
        }
        Fit {
            dist: fit.dist.iter().map(|v| v * s).collect(),
            disparity: fit.disparity.iter().map(|v| v * s).collect(),
            stress: fit.stress,
        }
    }

    /// Guttman transform `X' = B(X) X / m` with the normalized disparities.
    fn guttman(&self, x: &[f64], fit: &Fit) -> Vec<f64> {
        let (m, dim) = (self.m, self.dim);
        let p_norm = libm::sqrt(fit.disparity.iter().map(|v| v * v).sum::<f64>());
        let norm = libm::sqrt(self.pairs.len() as f64) / p_norm;
        let mut b = vec![0.0; m * m];
        for (k, &(i, j)) in self.pairs.iter().enumerate() {
            if fit.dist[k] > 0.0 {
                let v = -fit.disparity[k] * norm / fit.dist[k];
                b[i * m + j] = v;
                b[j * m + i] = v;
                b[i * m + i] -= v;
                b[j * m + j] -= v;
            }
        }
        let mut out = vec![0.0; m * dim];
        for i in 0..m {
            for j in 0..m {
                let bij = b[i * m + j];
                if bij != 0.0 {
                    for k in 0..dim {
                        out[i * dim + k] += bij * x[j * dim + k];
                    }
                }
            }
        }
        for v in out.iter_mut() {
            *v /= m as f64;
        }
        out
    }
}

fn random_init(m: usize, dim: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut x: Vec<f64> = (0..m * dim)
        .map(|_| (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64 - 0.5)
        .collect();
    center(&mut x, dim);
    x
}

/// Non-metric scaling by SMACOF with isotonic disparities.
///
/// After every Guttman transform the configuration is rescaled to its
/// stress-optimal size, which makes the recorded stress-1 trace
/// non-increasing. A step that would raise stress-1 through rounding is
/// rejected and ends the run. Reaching `max_iter` is not an error.
pub fn nonmetric_mds(
    d: &DistanceMatrix,
    dim: usize,
    config: &NonMetricConfig,
) -> Result<Embedding> {
    let m = d.len();
    check_dim(m, dim)?;
    let (mut x, seed) = match config.init {
        MdsInit::Classical => (classical_mds(d, dim)?.coords, None),
        MdsInit::Random { seed } => (random_init(m, dim, seed), Some(seed)),
    };

    let smacof = Smacof::new(d, dim);
    let fit = smacof.evaluate(&x);
    let mut fit = smacof.rescale(&mut x, fit);
    let mut trace = vec![fit.stress];
    let mut iterations = 0;

    let degenerate =
        |f: &Fit| f.dist.iter().all(|v| *v == 0.0) || f.disparity.iter().all(|v| *v == 0.0);
    while iterations < config.max_iter && fit.stress > 0.0 && !degenerate(&fit) {
        let mut next_x = smacof.guttman(&x, &fit);
        let next = smacof.evaluate(&next_x);
        if next.stress.is_nan() || next.stress > fit.stress || degenerate(&next) {
            break;
        }
        let next = smacof.rescale(&mut next_x, next);
        iterations += 1;
        trace.push(next.stress);
        let improvement = fit.stress - next.stress;
        x = next_x;
        let prev = fit.stress;
        fit = next;
        if improvement < config.eps * prev {
            break;
        }
    }
    center(&mut x, dim);

    Ok(Embedding {
        classifier_ids: d.classifier_ids().to_vec(),
        dim,
        coords: x,
        method: MdsMethod::NonMetric,
        stress: fit.stress,
        clamped_mass: 0.0,
        eigenvalues: Vec::new(),
        trace,
        iterations,
        seed,
    })
}

/// Puts an embedding in a canonical pose.
///
/// The centroid moves to the origin. In 2D the major principal axis is
/// rotated onto the first coordinate; when the point cloud is isotropic the
/// first point away from the origin defines that axis instead. Each axis is
/// then flipped so that the first point with a non-negligible coordinate on
/// it is positive. Embeddings of other dimension are only centred and
/// sign-fixed.
pub fn procrustes_normalize(e: &Embedding) -> Embedding {
    let mut out = e.clone();
    let dim = e.dim;
    let m = e.len();
    if m == 0 || dim == 0 {
        return out;
    }
    center(&mut out.coords, dim);
    let c = &mut out.coords;

    let sum_sq: f64 = c.iter().map(|v| v * v).sum();
    if sum_sq == 0.0 {
        return out;
    }
    let tol = 1e-9 * libm::sqrt(sum_sq / m as f64);

    if dim == 2 {
        let (mut sxx, mut syy, mut sxy) = (0.0, 0.0, 0.0);
        for p in c.chunks_exact(2) {
            sxx += p[0] * p[0];
            syy += p[1] * p[1];
            sxy += p[0] * p[1];
        }
        let gap = libm::sqrt((sxx - syy) * (sxx - syy) + 4.0 * sxy * sxy);
        let angle = if gap > 1e-9 * (sxx + syy) {
            0.5 * libm::atan2(2.0 * sxy, sxx - syy)
        } else {
            c.chunks_exact(2)
                .find(|p| libm::hypot(p[0], p[1]) > tol)
                .map_or(0.0, |p| libm::atan2(p[1], p[0]))
        };
        let (sin, cos) = (libm::sin(angle), libm::cos(angle));
        for p in c.chunks_exact_mut(2) {
            let (x, y) = (p[0], p[1]);
            p[0] = cos * x + sin * y;
            p[1] = -sin * x + cos * y;
        }
    }

    for k in 0..dim {
        let flip = (0..m)
            .map(|i| c[i * dim + k])
            .find(|v| v.abs() > tol)
            .is_some_and(|v| v < 0.0);
        if flip {
            for i in 0..m {
                c[i * dim + k] = -c[i * dim + k];
            }
        }
    }
    out
}

/// Rigid 2D alignment of `points` onto `target` (both row-major `x, y`
/// pairs): translation plus the rotation or reflection with the smallest
/// squared residual. Returns the moved copy of `points`.
pub fn procrustes_align(points: &[f64], target: &[f64]) -> Result<Vec<f64>> {
    if points.len() != target.len() {
        return Err(Error::LengthMismatch {
            expected: target.len(),
            found: points.len(),
        });
    }
    if !points.len().is_multiple_of(2) {
        return Err(Error::LengthMismatch {
            expected: points.len() + 1,
            found: points.len(),
        });
    }
    let mut a = points.to_vec();
    let mut b = target.to_vec();
    let target_mean = mean2(&b);
    center(&mut a, 2);
    center(&mut b, 2);

    // Treat points as complex numbers: a rotation is y = e^{i phi} x, a
    // reflection is y = e^{i phi} conj(x).
    let (mut rot_re, mut rot_im, mut ref_re, mut ref_im) = (0.0, 0.0, 0.0, 0.0);
    for (p, q) in a.chunks_exact(2).zip(b.chunks_exact(2)) {
        // q * conj(p)
        rot_re += q[0] * p[0] + q[1] * p[1];
        rot_im += q[1] * p[0] - q[0] * p[1];
        // q * p
        ref_re += q[0] * p[0] - q[1] * p[1];
        ref_im += q[1] * p[0] + q[0] * p[1];
    }
    let reflect = libm::hypot(ref_re, ref_im) > libm::hypot(rot_re, rot_im);
    let phi = if reflect {
        libm::atan2(ref_im, ref_re)
    } else {
        libm::atan2(rot_im, rot_re)
    };
    let (sin, cos) = (libm::sin(phi), libm::cos(phi));
    for p in a.chunks_exact_mut(2) {
        let (x, y) = (p[0], if reflect { -p[1] } else { p[1] });
        p[0] = cos * x - sin * y + target_mean[0];
        p[1] = sin * x + cos * y + target_mean[1];
    }
    Ok(a)
}

fn mean2(p: &[f64]) -> [f64; 2] {
    let m = (p.len() / 2).max(1) as f64;
    let (sx, sy) = p
        .chunks_exact(2)
        .fold((0.0, 0.0), |(sx, sy), q| (sx + q[0], sy + q[1]));
    [sx / m, sy / m]
}
