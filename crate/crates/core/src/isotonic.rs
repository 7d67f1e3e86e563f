//! Weighted isotonic regression by pool-adjacent-violators.

use alloc::vec::Vec;
use core::ops::Range;

use crate::error::{Error, Result};

/// Non-decreasing least-squares fit of a sequence.
#[derive(Debug, Clone, PartialEq)]
pub struct IsotonicFit {
    pub values: Vec<f64>,
    pub weights: Vec<f64>,
    pub fitted: Vec<f64>,
    /// Maximal runs of equal fitted value, in order, covering `0..len`.
    pub blocks: Vec<Range<usize>>,
}

struct Block {
    start: usize,
    weight: f64,
    weighted_sum: f64,
}

impl Block {
    fn mean(&self) -> f64 {
        self.weighted_sum / self.weight
    }
}

/// Minimizes `sum w_i (f_i - y_i)^2` over non-decreasing `f`.
///
/// Adjacent blocks are pooled while the left mean is `>=` the right one, so
/// the returned blocks are exactly the runs of constant fitted value.
pub fn isotonic_regression(y: &[f64], w: &[f64]) -> Result<IsotonicFit> {
    if y.is_empty() {
        return Err(Error::EmptyInput);
    }
    if y.len() != w.len() {
        return Err(Error::LengthMismatch {
            expected: y.len(),
            found: w.len(),
        });
    }
    if let Some(index) = y.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFiniteValue { index });
    }
    if let Some(index) = w.iter().position(|&v| !(v > 0.0 && v.is_finite())) {
        return Err(Error::NonPositiveWeight { index });
    }

    let mut stack: Vec<Block> = Vec::with_capacity(y.len());
    for (i, (&yi, &wi)) in y.iter().zip(w).enumerate() {
        let mut cur = Block {
            start: i,
            weight: wi,
            weighted_sum: wi * yi,
        };
        while let Some(prev) = stack.last() {
            if prev.mean() < cur.mean() {
                break;
            }
            let prev = stack.pop().unwrap();
            cur = Block {
                start: prev.start,
                weight: prev.weight + cur.weight,
                weighted_sum: prev.weighted_sum + cur.weighted_sum,
            };
        }
        stack.push(cur);
    }

    let mut fitted = Vec::with_capacity(y.len());
    let mut blocks = Vec::with_capacity(stack.len());
    for (k, b) in stack.iter().enumerate() {
        let end = stack.get(k + 1).map_or(y.len(), |n| n.start);
        let m = b.mean();
        fitted.extend(core::iter::repeat_n(m, end - b.start));
        blocks.push(b.start..end);
    }
    Ok(IsotonicFit {
        values: y.to_vec(),
        weights: w.to_vec(),
        fitted,
        blocks,
    })
}
