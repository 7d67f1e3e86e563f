//! Tie-corrected Kendall rank correlation (tau-b).
//!
//! Every pair of trials falls in exactly one of five classes: concordant,
//! discordant, tied only in `x`, tied only in `y`, or tied in both. Pairs
//! tied in both columns enter no term of the coefficient
//!
//! ```text
//! tau = (n_con - n_dis) / sqrt((n_con + n_dis + ties_x) * (n_con + n_dis + ties_y))
//! ```
//!
//! Scores compare by exact value: two scores are tied iff they are `==`.

use alloc::string::String;
use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::error::{Error, Result};

/// Pair counts for one pair of score columns.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct TauStats {
    pub n_con: u64,
    pub n_dis: u64,
    /// Pairs tied in the first column only.
    pub ties_i: u64,
    /// Pairs tied in the second column only.
    pub ties_j: u64,
    pub ties_both: u64,
    pub n_pairs: u64,
}

impl TauStats {
    /// The coefficient computed from the counts, or `DegenerateColumn` when
    /// one column has every pair tied.
    pub fn tau(&self) -> Result<f64> {
        // Pairs not tied in the second column, and not tied in the first.
        let untied_j = self.n_con + self.n_dis + self.ties_i;
        let untied_i = self.n_con + self.n_dis + self.ties_j;
        if untied_i == 0 {
            return Err(Error::DegenerateColumn {
                classifier: String::from("x"),
            });
        }
        if untied_j == 0 {
            return Err(Error::DegenerateColumn {
                classifier: String::from("y"),
            });
        }
        let denom = if untied_i == untied_j {
            untied_i as f64
        } else {
            libm::sqrt(untied_i as f64 * untied_j as f64)
        };
        let num = self.n_con as f64 - self.n_dis as f64;
        Ok((num / denom).clamp(-1.0, 1.0))
    }

    /// Counts with the roles of the two columns exchanged.
    pub fn swapped(&self) -> Self {
        Self {
            ties_i: self.ties_j,
            ties_j: self.ties_i,
            ..*self
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TauResult {
    pub tau: f64,
    pub stats: TauStats,
}

fn check_inputs(x: &[f64], y: &[f64]) -> Result<()> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch {
            expected: x.len(),
            found: y.len(),
        });
    }
    for col in [x, y] {
        if let Some(index) = col.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFiniteValue { index });
        }
    }
    Ok(())
}

fn n_pairs(n: usize) -> u64 {
    let n = n as u64;
    n * n.saturating_sub(1) / 2
}

/// Kendall tau by enumerating all `N(N-1)/2` pairs. Quadratic; used as the
/// reference for [`kendall_tau_fast`].
pub fn kendall_tau_naive(x: &[f64], y: &[f64]) -> Result<TauResult> {
    check_inputs(x, y)?;
    let mut stats = TauStats {
        n_pairs: n_pairs(x.len()),
        ..TauStats::default()
    };
    for a in 0..x.len() {
        for b in a + 1..x.len() {
            let dx = x[a].partial_cmp(&x[b]).unwrap();
            let dy = y[a].partial_cmp(&y[b]).unwrap();
            match (dx, dy) {
                (Ordering::Equal, Ordering::Equal) => stats.ties_both += 1,
                (Ordering::Equal, _) => stats.ties_i += 1,
                (_, Ordering::Equal) => stats.ties_j += 1,
                _ if dx == dy => stats.n_con += 1,
                _ => stats.n_dis += 1,
            }
        }
    }
    Ok(TauResult {
        tau: stats.tau()?,
        stats,
    })
}

/// A score column reduced to dense ranks, so that it can be paired with
/// many other columns without sorting its floats again.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankedColumn {
    /// Trial indices in ascending score order.
    order: Vec<usize>,
    /// Dense rank (0-based) of each trial, in input order.
    rank: Vec<usize>,
    /// Pairs of trials with equal scores.
    tied_pairs: u64,
}

impl RankedColumn {
    pub fn new(values: &[f64]) -> Result<Self> {
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFiniteValue { index });
        }
        let mut order: Vec<usize> = (0..values.len()).collect();
        order.sort_unstable_by(|&a, &b| values[a].partial_cmp(&values[b]).unwrap());
        let mut rank = alloc::vec![0; values.len()];
        let mut current = 0;
        for k in 1..order.len() {
            if values[order[k]] != values[order[k - 1]] {
                current += 1;
            }
            rank[order[k]] = current;
        }
        let sorted: Vec<usize> = order.iter().map(|&i| rank[i]).collect();
        Ok(Self {
            tied_pairs: tied_pairs(&sorted),
            order,
            rank,
        })
    }

    pub fn len(&self) -> usize {
        self.rank.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rank.is_empty()
    }

    pub fn ranks(&self) -> &[usize] {
        &self.rank
    }
}

/// Kendall tau in `O(N log N)`.
///
/// Trials are sorted by `x` with `y` as secondary key; discordant pairs are
/// then the strict inversions of the resulting `y` sequence, counted during
/// a merge sort. Tie counts come from runs of equal values in the two
/// sorted orders.
pub fn kendall_tau_fast(x: &[f64], y: &[f64]) -> Result<TauResult> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch {
            expected: x.len(),
            found: y.len(),
        });
    }
    kendall_tau_ranked(&RankedColumn::new(x)?, &RankedColumn::new(y)?)
}

/// [`kendall_tau_fast`] on pre-ranked columns.
pub fn kendall_tau_ranked(x: &RankedColumn, y: &RankedColumn) -> Result<TauResult> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch {
            expected: x.len(),
            found: y.len(),
        });
    }
    let n = x.len();
    let mut ys: Vec<usize> = x.order.iter().map(|&i| y.rank[i]).collect();

    // Order each run of tied x by y, counting pairs tied in both.
    let mut tied_xy = 0u64;
    let mut start = 0;
    while start < n {
        let rx = x.rank[x.order[start]];
        let mut end = start + 1;
        while end < n && x.rank[x.order[end]] == rx {
            end += 1;
        }
        if end - start > 1 {
            ys[start..end].sort_unstable();
            tied_xy += tied_pairs(&ys[start..end]);
        }
        start = end;
    }

    let n_dis = count_inversions(&mut ys);
    let total = n_pairs(n);
    let ties_i = x.tied_pairs - tied_xy;
    let ties_j = y.tied_pairs - tied_xy;
    let stats = TauStats {
        n_con: total - n_dis - ties_i - ties_j - tied_xy,
        n_dis,
        ties_i,
        ties_j,
        ties_both: tied_xy,
        n_pairs: total,
    };
    Ok(TauResult {
        tau: stats.tau()?,
        stats,
    })
}

/// Number of pairs of equal values in a sorted slice.
fn tied_pairs<T: PartialEq>(sorted: &[T]) -> u64 {
    let mut total = 0u64;
    let mut run = 1u64;
    for w in sorted.windows(2) {
        if w[0] == w[1] {
            run += 1;
        } else {
            total += run * (run - 1) / 2;
            run = 1;
        }
    }
    total + run * (run - 1) / 2
}

/// Sorts `values` ascending and returns the number of pairs `a < b` with
/// `values[a] > values[b]` (equal values are not inversions).
fn count_inversions<T: Copy + PartialOrd + Default>(values: &mut [T]) -> u64 {
    let n = values.len();
    let mut buf = alloc::vec![T::default(); n];
    let mut inversions = 0u64;
    let mut width = 1;
    let (mut src, mut dst): (&mut [T], &mut [T]) = (values, &mut buf);
    let mut in_values = true;
    while width < n {
        let mut start = 0;
        while start < n {
            let mid = (start + width).min(n);
            let end = (start + 2 * width).min(n);
            let (mut l, mut r, mut o) = (start, mid, start);
            while l < mid && r < end {
                if src[r] < src[l] {
                    dst[o] = src[r];
                    inversions += (mid - l) as u64;
                    r += 1;
                } else {
                    dst[o] = src[l];
                    l += 1;
                }
                o += 1;
            }
            dst[o..o + (mid - l)].copy_from_slice(&src[l..mid]);
            o += mid - l;
            dst[o..o + (end - r)].copy_from_slice(&src[r..end]);
            start = end;
        }
        core::mem::swap(&mut src, &mut dst);
        in_values = !in_values;
        width *= 2;
    }
    if !in_values {
        dst.copy_from_slice(src);
    }
    inversions
}
