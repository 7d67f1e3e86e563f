//! Multi-threaded distance matrix.

use std::num::NonZeroUsize;

use adjviz_core::adjacency::{ranked_pair_distance, upper_pairs};
use adjviz_core::{DistanceMatrix, Error, RankedColumn, ScoreMatrix};
use rayon::prelude::*;

use crate::error::{AppError, Result};

/// Worker count: the explicit value if given, else the machine's available
/// parallelism.
pub fn resolve_threads(requested: Option<usize>) -> usize {
    requested
        .filter(|n| *n > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, NonZeroUsize::get))
}

/// Same result as [`adjviz_core::distance_matrix`], with the classifier
/// pairs spread over `threads` workers. Each pair writes its own cell, so
/// the output does not depend on scheduling; on failure the error of the
/// first failing pair in row-major order is returned.
pub fn distance_matrix_parallel(scores: &ScoreMatrix, threads: usize) -> Result<DistanceMatrix> {
    let m = scores.n_classifiers();
    if m < 2 {
        return Err(Error::TooShort { len: m, min: 2 }.into());
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.max(1))
        .build()
        .map_err(|e| AppError::Usage(format!("cannot start worker pool: {e}")))?;
    let ids = scores.classifier_ids();
    let pairs: Vec<(usize, usize)> = upper_pairs(m).collect();
    let upper: Vec<f64> = pool.install(|| {
        let ranked = (0..m)
            .into_par_iter()
            .map(|j| RankedColumn::new(scores.column(j)))
            .collect::<std::result::Result<Vec<_>, Error>>()?;
        pairs
            .par_iter()
            .map(|&(i, j)| ranked_pair_distance(&ranked[i], &ranked[j], &ids[i], &ids[j]))
            .collect::<std::result::Result<Vec<f64>, Error>>()
    })?;
    Ok(DistanceMatrix::from_upper(ids.to_vec(), &upper)?)
}
