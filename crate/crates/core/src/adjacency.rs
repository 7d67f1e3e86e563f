//! Rank distances between classifiers.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::ranking::{kendall_tau_ranked, RankedColumn};
use crate::scores::ScoreMatrix;

/// Largest asymmetry `|d(i,j) - d(j,i)|` accepted by [`DistanceMatrix::new`].
pub const SYMMETRY_TOLERANCE: f64 = 1e-9;

/// Symmetric, zero-diagonal matrix of pairwise distances, labelled by
/// classifier id.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix {
    classifier_ids: Vec<String>,
    values: Vec<f64>,
}

impl DistanceMatrix {
    /// Validates and wraps a row-major `M x M` matrix.
    ///
    /// Cells must be finite and non-negative, the diagonal exactly zero, and
    /// mirrored cells may differ by at most [`SYMMETRY_TOLERANCE`]; they are
    /// replaced by their mean.
    pub fn new(classifier_ids: Vec<String>, mut values: Vec<f64>) -> Result<Self> {
        let m = classifier_ids.len();
        if values.len() != m * m {
            return Err(Error::LengthMismatch {
                expected: m * m,
                found: values.len(),
            });
        }
        for i in 0..m {
            for j in 0..m {
                let v = values[i * m + j];
                if !v.is_finite() {
                    return Err(Error::InvalidDistance {
                        row: i,
                        col: j,
                        reason: "not finite",
                    });
                }
                if v < 0.0 {
                    return Err(Error::InvalidDistance {
                        row: i,
                        col: j,
                        reason: "negative",
                    });
                }
            }
            if values[i * m + i] != 0.0 {
                return Err(Error::InvalidDistance {
                    row: i,
                    col: i,
                    reason: "nonzero diagonal",
                });
            }
        }
        for i in 0..m {
            for j in i + 1..m {
                let (a, b) = (values[i * m + j], values[j * m + i]);
                if (a - b).abs() > SYMMETRY_TOLERANCE {
                    return Err(Error::InvalidDistance {
                        row: i,
                        col: j,
                        reason: "asymmetric",
                    });
                }
                let mean = if a == b { a } else { 0.5 * (a + b) };
                values[i * m + j] = mean;
                values[j * m + i] = mean;
            }
        }
        Ok(Self {
            classifier_ids,
            values,
        })
    }

    /// Builds the matrix from the strict upper triangle listed row by row,
    /// `(0,1), (0,2), ..., (1,2), ...`.
    pub fn from_upper(classifier_ids: Vec<String>, upper: &[f64]) -> Result<Self> {
        let m = classifier_ids.len();
        let expected = m * m.saturating_sub(1) / 2;
        if upper.len() != expected {
            return Err(Error::LengthMismatch {
                expected,
                found: upper.len(),
            });
        }
        let mut values = vec![0.0; m * m];
        let mut k = 0;
        for i in 0..m {
            for j in i + 1..m {
                values[i * m + j] = upper[k];
                values[j * m + i] = upper[k];
                k += 1;
            }
        }
        Self::new(classifier_ids, values)
    }

    pub fn len(&self) -> usize {
        self.classifier_ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classifier_ids.is_empty()
    }

    pub fn classifier_ids(&self) -> &[String] {
        &self.classifier_ids
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.len() + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let m = self.len();
        &self.values[i * m..(i + 1) * m]
    }

    /// Row-major cell values.
    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

/// `D = (1 - tau) / 2`: 0 for identical rankings, 1 for exactly reversed ones.
pub fn tau_to_distance(tau: f64) -> Result<f64> {
    if !(-1.0..=1.0).contains(&tau) {
        return Err(Error::OutOfRange { value: tau });
    }
    Ok(0.5 * (1.0 - tau))
}

/// Unordered classifier pairs `(i, j)`, `i < j`, in row-major upper-triangle order.
pub fn upper_pairs(m: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..m).flat_map(move |i| (i + 1..m).map(move |j| (i, j)))
}

/// Rank distance between classifiers `i` and `j` of `scores`. A degenerate
/// column is reported under its classifier id.
pub fn pair_distance(scores: &ScoreMatrix, i: usize, j: usize) -> Result<f64> {
    let x = RankedColumn::new(scores.column(i))?;
    let y = RankedColumn::new(scores.column(j))?;
    ranked_pair_distance(
        &x,
        &y,
        &scores.classifier_ids()[i],
        &scores.classifier_ids()[j],
    )
}

/// Rank distance between two pre-ranked columns named `id_x` and `id_y`.
pub fn ranked_pair_distance(
    x: &RankedColumn,
    y: &RankedColumn,
    id_x: &str,
    id_y: &str,
) -> Result<f64> {
    let r = kendall_tau_ranked(x, y).map_err(|e| match e {
        Error::DegenerateColumn { classifier } => Error::DegenerateColumn {
            classifier: String::from(if classifier == "x" { id_x } else { id_y }),
        },
        other => other,
    })?;
    tau_to_distance(r.tau)
}

/// Every score column of `scores`, ranked.
pub fn rank_columns(scores: &ScoreMatrix) -> Result<Vec<RankedColumn>> {
    scores.columns().map(RankedColumn::new).collect()
}

/// Distance matrix over all classifier pairs of `scores`, in classifier order.
pub fn distance_matrix(scores: &ScoreMatrix) -> Result<DistanceMatrix> {
    let m = scores.n_classifiers();
    if m < 2 {
        return Err(Error::TooShort { len: m, min: 2 });
    }
    let ranked = rank_columns(scores)?;
    let ids = scores.classifier_ids();
    let upper = upper_pairs(m)
        .map(|(i, j)| ranked_pair_distance(&ranked[i], &ranked[j], &ids[i], &ids[j]))
        .collect::<Result<Vec<f64>>>()?;
    DistanceMatrix::from_upper(ids.to_vec(), &upper)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ranking::kendall_tau_naive;
    use alloc::format;
    use alloc::string::ToString;

    fn matrix(columns: Vec<Vec<f64>>) -> ScoreMatrix {
        let n = columns[0].len();
        ScoreMatrix::new(
            (0..n).map(|i| format!("t{i}")).collect(),
            (0..columns.len()).map(|j| format!("c{j}")).collect(),
            columns,
        )
        .unwrap()
    }

    #[test]
    fn tau_mapping() {
        assert_eq!(tau_to_distance(1.0).unwrap(), 0.0);
        assert_eq!(tau_to_distance(-1.0).unwrap(), 1.0);
        assert_eq!(tau_to_distance(0.0).unwrap(), 0.5);
        assert!(tau_to_distance(1.5).is_err());
        assert!(tau_to_distance(f64::NAN).is_err());
    }

    #[test]
    fn identical_columns() {
        let d = distance_matrix(&matrix(vec![vec![1.0, 2.0, 3.0], vec![1.0, 2.0, 3.0]])).unwrap();
        assert_eq!(d.values(), &[0.0; 4]);
    }

    #[test]
    fn reversed_columns() {
        let d = distance_matrix(&matrix(vec![vec![1.0, 2.0, 3.0], vec![0.0, -1.0, -2.0]])).unwrap();
        assert_eq!(d.get(0, 1), 1.0);
        assert_eq!(d.get(1, 0), 1.0);
    }

    #[test]
    fn degenerate_column_is_named() {
        let s = matrix(vec![vec![1.0, 2.0, 3.0], vec![4.0, 4.0, 4.0]]);
        assert_eq!(
            distance_matrix(&s).unwrap_err(),
            Error::DegenerateColumn {
                classifier: "c1".to_string()
            }
        );
    }

    #[test]
    fn matches_naive_taus() {
        // Deterministic pseudo-random tie-free columns.
        let mut state = 0x9e3779b97f4a7c15u64;
        let mut next = || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64
        };
        let cols: Vec<Vec<f64>> = (0..3).map(|_| (0..50).map(|_| next()).collect()).collect();
        let d = distance_matrix(&matrix(cols.clone())).unwrap();
        for (i, j) in upper_pairs(3) {
            let tau = kendall_tau_naive(&cols[i], &cols[j]).unwrap().tau;
            assert!((d.get(i, j) - 0.5 * (1.0 - tau)).abs() <= 1e-12);
        }
    }

    #[test]
    fn validation() {
        let ids = || vec!["a".to_string(), "b".to_string()];
        assert!(DistanceMatrix::new(ids(), vec![0.0, 0.5, 0.5 + 1e-12, 0.0]).is_ok());
        assert_eq!(
            DistanceMatrix::new(ids(), vec![0.0, 0.5, 0.6, 0.0]).unwrap_err(),
            Error::InvalidDistance {
                row: 0,
                col: 1,
                reason: "asymmetric"
            }
        );
        assert_eq!(
            DistanceMatrix::new(ids(), vec![0.1, 0.5, 0.5, 0.0]).unwrap_err(),
            Error::InvalidDistance {
                row: 0,
                col: 0,
                reason: "nonzero diagonal"
            }
        );
    }
}
