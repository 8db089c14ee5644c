use std::borrow::Cow;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::SvrError;
use crate::matrix::Matrix;

/// Largest training set for which the full Gram matrix is materialized.
pub const DENSE_GRAM_LIMIT: usize = 4096;

/// RBF width: an explicit positive value, or `1 / (cols * var(X))`
/// resolved from the training matrix.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
pub enum Gamma {
    #[default]
    Scale,
    Value(f64),
}

/// `‖x − y‖²`, summed left to right.
pub fn squared_distance(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum()
}

#[inline]
pub(crate) fn rbf_from_sq(d2: f64, gamma: f64) -> f64 {
    (-gamma * d2).exp()
}

/// `exp(−gamma · ‖x − y‖²)`.
pub fn rbf_kernel(x: &[f64], y: &[f64], gamma: f64) -> Result<f64, SvrError> {
    if x.len() != y.len() {
        return Err(SvrError::DimensionMismatch {
            expected: x.len(),
            found: y.len(),
        });
    }
    if !(gamma > 0.0) {
        return Err(SvrError::InvalidHyperParams(format!(
            "gamma must be positive, got {gamma}"
        )));
    }
    Ok(rbf_from_sq(squared_distance(x, y), gamma))
}

/// Resolves [`Gamma::Scale`]: `1 / (cols · var)` with `var` the population
/// variance over every entry of `x`.
pub fn resolve_gamma(x: &Matrix) -> Result<f64, SvrError> {
    if x.nrows() < 2 {
        return Err(SvrError::TooFewSamples {
            needed: 2,
            got: x.nrows(),
        });
    }
    let vals = x.as_slice();
    let n = vals.len() as f64;
    let mean = vals.iter().sum::<f64>() / n;
    let var = vals.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    if !(var > 0.0) {
        return Err(SvrError::ZeroVariance);
    }
    Ok(1.0 / (x.ncols() as f64 * var))
}

pub(crate) fn gamma_for(x: &Matrix, gamma: Gamma) -> Result<f64, SvrError> {
    match gamma {
        Gamma::Scale => resolve_gamma(x),
        Gamma::Value(g) if g > 0.0 && g.is_finite() => Ok(g),
        Gamma::Value(g) => Err(SvrError::InvalidHyperParams(format!(
            "gamma must be positive, got {g}"
        ))),
    }
}

/// Symmetric `n × n` matrix of squared distances between rows of `x`.
///
/// Each entry is computed independently, so the result does not depend on
/// the number of worker threads.
pub fn pairwise_sq_distances(x: &Matrix) -> Matrix {
    let n = x.nrows();
    let mut out = Matrix::zeros(n, n);
    let upper: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|i| {
            (i..n)
                .map(|j| squared_distance(x.row(i), x.row(j)))
                .collect()
        })
        .collect();
    for (i, row) in upper.into_iter().enumerate() {
        for (off, d) in row.into_iter().enumerate() {
            let j = i + off;
            out.row_mut(i)[j] = d;
            out.row_mut(j)[i] = d;
        }
    }
    out
}

/// Kernel values between training rows, either materialized or computed on
/// demand.
#[derive(Debug, Clone)]
pub enum Gram<'a> {
    Dense(Matrix),
    Lazy { x: &'a Matrix, gamma: f64 },
}

impl<'a> Gram<'a> {
    pub fn new(x: &'a Matrix, gamma: f64) -> Self {
        if x.nrows() <= DENSE_GRAM_LIMIT {
            Gram::Dense(Gram::dense_from_sq(&pairwise_sq_distances(x), gamma))
        } else {
            Gram::Lazy { x, gamma }
        }
    }

    /// Builds a dense Gram matrix from precomputed squared distances.
    pub fn from_sq_distances(d2: &Matrix, gamma: f64) -> Gram<'static> {
        Gram::Dense(Gram::dense_from_sq(d2, gamma))
    }

    fn dense_from_sq(d2: &Matrix, gamma: f64) -> Matrix {
        let data = d2
            .as_slice()
            .iter()
            .map(|&d| rbf_from_sq(d, gamma))
            .collect();
        Matrix::from_vec(d2.nrows(), d2.ncols(), data)
    }

    pub fn len(&self) -> usize {
        match self {
            Gram::Dense(k) => k.nrows(),
            Gram::Lazy { x, .. } => x.nrows(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn row(&self, i: usize) -> Cow<'_, [f64]> {
        match self {
            Gram::Dense(k) => Cow::Borrowed(k.row(i)),
            Gram::Lazy { x, gamma } => Cow::Owned(
                x.rows()
                    .map(|r| rbf_from_sq(squared_distance(x.row(i), r), *gamma))
                    .collect(),
            ),
        }
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        match self {
            Gram::Dense(k) => k.get(i, j),
            Gram::Lazy { x, gamma } => rbf_from_sq(squared_distance(x.row(i), x.row(j)), *gamma),
        }
    }
}
