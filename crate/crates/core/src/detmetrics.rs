//! Detection-performance metrics for a single score column.
//!
//! The decision rule everywhere is `score >= threshold` ⇒ positive.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::f64::consts::LN_2;

use crate::error::{Error, Result};
use crate::isotonic::isotonic_regression;
use crate::scores::GroupMap;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OperatingPoint {
    pub threshold: f64,
    pub p_miss: f64,
    pub p_fa: f64,
}

/// Empirical miss and false-alarm rates at every distinct score, ordered by
/// increasing threshold, plus a final point at `+inf` where everything is
/// rejected.
#[derive(Debug, Clone, PartialEq)]
pub struct DetCurve {
    pub points: Vec<OperatingPoint>,
}

impl DetCurve {
    /// `(p_miss, p_fa)` pairs without thresholds.
    pub fn rates(&self) -> Vec<(f64, f64)> {
        self.points.iter().map(|p| (p.p_miss, p.p_fa)).collect()
    }
}

fn check(scores: &[f64], labels: &[bool], allow_infinite: bool) -> Result<(usize, usize)> {
    if scores.len() != labels.len() {
        return Err(Error::LengthMismatch {
            expected: scores.len(),
            found: labels.len(),
        });
    }
    let bad = |v: &f64| {
        if allow_infinite {
            v.is_nan()
        } else {
            !v.is_finite()
        }
    };
    if let Some(index) = scores.iter().position(bad) {
        return Err(Error::NonFiniteValue { index });
    }
    let n_tar = labels.iter().filter(|l| **l).count();
    let n_non = labels.len() - n_tar;
    if n_tar == 0 || n_non == 0 {
        return Err(Error::SingleClass);
    }
    Ok((n_tar, n_non))
}

/// Indices of `scores` in ascending score order (ties by index).
fn ascending(scores: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]).then(a.cmp(&b)));
    order
}

/// Runs of equal score in an ascending order, as index ranges into `order`.
fn tie_runs(scores: &[f64], order: &[usize]) -> Vec<core::ops::Range<usize>> {
    let mut runs = Vec::new();
    let mut start = 0;
    for k in 1..=order.len() {
        if k == order.len() || scores[order[k]] != scores[order[start]] {
            runs.push(start..k);
            start = k;
        }
    }
    runs
}

pub fn det_curve(scores: &[f64], labels: &[bool]) -> Result<DetCurve> {
    let (n_tar, n_non) = check(scores, labels, false)?;
    let order = ascending(scores);
    let mut points = Vec::new();
    // Counts of trials strictly below the current threshold.
    let (mut tar_below, mut non_below) = (0usize, 0usize);
    for run in tie_runs(scores, &order) {
        points.push(OperatingPoint {
            threshold: scores[order[run.start]],
            p_miss: tar_below as f64 / n_tar as f64,
            p_fa: (n_non - non_below) as f64 / n_non as f64,
        });
        for &i in &order[run] {
            if labels[i] {
                tar_below += 1;
            } else {
                non_below += 1;
            }
        }
    }
    points.push(OperatingPoint {
        threshold: f64::INFINITY,
        p_miss: 1.0,
        p_fa: 0.0,
    });
    Ok(DetCurve { points })
}

/// Equal error rate: where `p_miss - p_fa` changes sign along the curve,
/// linearly interpolated between the two bracketing operating points.
pub fn eer(curve: &DetCurve) -> f64 {
    let pts = &curve.points;
    let Some(k) = pts.iter().position(|p| p.p_miss >= p.p_fa) else {
        return pts.last().map_or(0.0, |p| 0.5 * (p.p_miss + p.p_fa));
    };
    if k == 0 || pts[k].p_miss == pts[k].p_fa {
        return pts[k].p_miss;
    }
    let (a, b) = (pts[k - 1], pts[k]);
    let gap_a = a.p_fa - a.p_miss;
    let gap_b = b.p_miss - b.p_fa;
    let t = gap_a / (gap_a + gap_b);
    a.p_miss + t * (b.p_miss - a.p_miss)
}

/// `ln(1 + e^x)` without overflow.
fn softplus(x: f64) -> f64 {
    if x == f64::NEG_INFINITY {
        return 0.0;
    }
    x.max(0.0) + libm::log1p(libm::exp(-x.abs()))
}

/// Log-likelihood-ratio cost in bits, reading scores as natural-log LLRs:
/// `1/2 [mean_tar log2(1 + e^-s) + mean_non log2(1 + e^s)]`.
///
/// Infinite LLRs are allowed and cost nothing when they point the right way.
pub fn cllr(scores: &[f64], labels: &[bool]) -> Result<f64> {
    check(scores, labels, true)?;
    // Running means: exact when every term is equal.
    let (mut tar, mut non) = (0.0, 0.0);
    let (mut k_tar, mut k_non) = (0.0, 0.0);
    for (&s, &l) in scores.iter().zip(labels) {
        if l {
            k_tar += 1.0;
            tar += (softplus(-s) - tar) / k_tar;
        } else {
            k_non += 1.0;
            non += (softplus(s) - non) / k_non;
        }
    }
    Ok(0.5 * (tar + non) / LN_2)
}

/// Result of monotone (PAV) calibration of one score column.
#[derive(Debug, Clone, PartialEq)]
pub struct PavCalibration {
    /// Calibrated natural-log LLR per trial, in input order. Blocks holding a
    /// single class map to `+inf` / `-inf`.
    pub llr: Vec<f64>,
    /// Block index per trial, in input order; blocks are numbered from 0 in
    /// ascending score order.
    pub block: Vec<usize>,
    pub n_blocks: usize,
}

/// Optimal monotone score-to-LLR map.
///
/// Trials are sorted by score; tied scores are pooled first so they always
/// share a value. The 0/1 labels are isotonically regressed and the fitted
/// posteriors converted to LLRs by removing the prior log-odds implied by
/// the class counts.
pub fn pav_calibrate(scores: &[f64], labels: &[bool]) -> Result<PavCalibration> {
    let (n_tar, n_non) = check(scores, labels, false)?;
    let order = ascending(scores);
    let runs = tie_runs(scores, &order);

    let mut y = Vec::with_capacity(runs.len());
    let mut w = Vec::with_capacity(runs.len());
    for run in &runs {
        let tar = order[run.clone()].iter().filter(|&&i| labels[i]).count();
        w.push(run.len() as f64);
        y.push(tar as f64 / run.len() as f64);
    }
    let fit = isotonic_regression(&y, &w)?;

    let prior_log_odds = libm::log(n_tar as f64) - libm::log(n_non as f64);
    let mut llr = alloc::vec![0.0; scores.len()];
    let mut block = alloc::vec![0; scores.len()];
    for (b, units) in fit.blocks.iter().enumerate() {
        let p = fit.fitted[units.start];
        // Pure blocks are exact 0 or 1: the weighted mean of identical labels.
        let l = libm::log(p) - libm::log(1.0 - p) - prior_log_odds;
        for u in units.clone() {
            for &i in &order[runs[u].clone()] {
                llr[i] = l;
                block[i] = b;
            }
        }
    }
    Ok(PavCalibration {
        llr,
        block,
        n_blocks: fit.blocks.len(),
    })
}

/// Cllr after optimal monotone calibration. Never exceeds [`cllr`] of the
/// raw scores.
pub fn min_cllr(scores: &[f64], labels: &[bool]) -> Result<f64> {
    let cal = pav_calibrate(scores, labels)?;
    cllr(&cal.llr, labels)
}

/// Groups trials that PAV calibration maps to the same value.
///
/// Group ids are the 1-based block numbers in ascending score order,
/// zero-padded so that lexicographic order equals numeric order.
pub fn pav_rank_groups<S: AsRef<str>>(
    trial_ids: &[S],
    scores: &[f64],
    labels: &[bool],
) -> Result<GroupMap> {
    if trial_ids.len() != scores.len() {
        return Err(Error::LengthMismatch {
            expected: scores.len(),
            found: trial_ids.len(),
        });
    }
    let cal = pav_calibrate(scores, labels)?;
    let width = digits(cal.n_blocks);
    let mut groups = GroupMap::new();
    for (t, b) in trial_ids.iter().zip(&cal.block) {
        let id: String = format!("{:0width$}", b + 1, width = width);
        groups.insert(t.as_ref(), id)?;
    }
    Ok(groups)
}

fn digits(mut n: usize) -> usize {
    let mut d = 1;
    while n >= 10 {
        n /= 10;
        d += 1;
    }
    d
}
