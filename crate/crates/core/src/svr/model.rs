use std::path::Path;

use serde::{Deserialize, Serialize};

use super::kernel::{gamma_for, rbf_from_sq, squared_distance, Gamma, Gram};
use super::smo::{self, SolverOptions};
use crate::error::SvrError;
use crate::matrix::Matrix;

/// Coefficients at or below this magnitude are not kept as support vectors.
pub const SUPPORT_THRESHOLD: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HyperParams {
    pub c: f64,
    pub epsilon: f64,
    pub gamma: Gamma,
}

impl Default for HyperParams {
    /// `C = 1`, `ε = 0.1`, scale-default gamma.
    fn default() -> Self {
        HyperParams {
            c: 1.0,
            epsilon: 0.1,
            gamma: Gamma::Scale,
        }
    }
}

impl HyperParams {
    pub fn new(c: f64, epsilon: f64) -> Self {
        HyperParams {
            c,
            epsilon,
            gamma: Gamma::Scale,
        }
    }

    pub fn with_gamma(mut self, gamma: f64) -> Self {
        self.gamma = Gamma::Value(gamma);
        self
    }

    pub fn validate(&self) -> Result<(), SvrError> {
        if !(self.c > 0.0 && self.c.is_finite()) {
            return Err(SvrError::InvalidHyperParams(format!(
                "C must be positive, got {}",
                self.c
            )));
        }
        if !(self.epsilon >= 0.0 && self.epsilon.is_finite()) {
            return Err(SvrError::InvalidHyperParams(format!(
                "epsilon must be non-negative, got {}",
                self.epsilon
            )));
        }
        if let Gamma::Value(g) = self.gamma {
            if !(g > 0.0 && g.is_finite()) {
                return Err(SvrError::InvalidHyperParams(format!(
                    "gamma must be positive, got {g}"
                )));
            }
        }
        Ok(())
    }
}

/// A trained epsilon-SVR with RBF kernel.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SvrModel {
    pub support_vectors: Matrix,
    /// Training-row index of each support vector.
    pub support_indices: Vec<usize>,
    /// `β_i = α_i − α*_i` for each support vector.
    pub dual_coefs: Vec<f64>,
    pub bias: f64,
    /// Resolved kernel width.
    pub gamma: f64,
    pub hp: HyperParams,
    pub train_dim: usize,
}

/// Trains on the rows of `x` with the default solver options.
pub fn fit_svr(x: &Matrix, y: &[f64], hp: &HyperParams) -> Result<SvrModel, SvrError> {
    fit_svr_with(x, y, hp, SolverOptions::default())
}

pub fn fit_svr_with(
    x: &Matrix,
    y: &[f64],
    hp: &HyperParams,
    opts: SolverOptions,
) -> Result<SvrModel, SvrError> {
    check_inputs(x, y, hp)?;
    let gamma = gamma_for(x, hp.gamma)?;
    let gram = Gram::new(x, gamma);
    fit_with_gram(x, &gram, gamma, y, hp, opts)
}

/// Trains against a precomputed Gram matrix.
///
/// `gram` must hold `exp(−gamma · ‖x_i − x_j‖²)` for the rows of `x`; the
/// cross-validation harness uses this to reuse pairwise distances across
/// folds and hyperparameters.
pub fn fit_with_gram(
    x: &Matrix,
    gram: &Gram<'_>,
    gamma: f64,
    y: &[f64],
    hp: &HyperParams,
    opts: SolverOptions,
) -> Result<SvrModel, SvrError> {
    check_inputs(x, y, hp)?;
    if gram.len() != x.nrows() {
        return Err(SvrError::DimensionMismatch {
            expected: x.nrows(),
            found: gram.len(),
        });
    }
    let sol = smo::solve(gram, y, hp.c, hp.epsilon, opts)?;
    let keep: Vec<usize> = (0..sol.beta.len())
        .filter(|&i| sol.beta[i].abs() > SUPPORT_THRESHOLD)
        .collect();
    Ok(SvrModel {
        support_vectors: x.select_rows(&keep),
        dual_coefs: keep.iter().map(|&i| sol.beta[i]).collect(),
        support_indices: keep,
        bias: sol.bias,
        gamma,
        hp: *hp,
        train_dim: x.ncols(),
    })
}

fn check_inputs(x: &Matrix, y: &[f64], hp: &HyperParams) -> Result<(), SvrError> {
    hp.validate()?;
    if x.nrows() < 2 {
        return Err(SvrError::TooFewSamples {
            needed: 2,
            got: x.nrows(),
        });
    }
    if y.len() != x.nrows() {
        return Err(SvrError::DimensionMismatch {
            expected: x.nrows(),
            found: y.len(),
        });
    }
    if x.ncols() == 0 {
        return Err(SvrError::DimensionMismatch {
            expected: 1,
            found: 0,
        });
    }
    Ok(())
}

impl SvrModel {
    pub fn n_support(&self) -> usize {
        self.dual_coefs.len()
    }

    /// Dual coefficients expanded to all `n` training rows (zeros for
    /// non-support rows).
    pub fn training_beta(&self, n: usize) -> Vec<f64> {
        let mut beta = vec![0.0; n];
        for (&i, &b) in self.support_indices.iter().zip(&self.dual_coefs) {
            beta[i] = b;
        }
        beta
    }

    pub fn predict_one(&self, x: &[f64]) -> Result<f64, SvrError> {
        if x.len() != self.train_dim {
            return Err(SvrError::DimensionMismatch {
                expected: self.train_dim,
                found: x.len(),
            });
        }
        let s: f64 = self
            .support_vectors
            .rows()
            .zip(&self.dual_coefs)
            .map(|(sv, b)| b * rbf_from_sq(squared_distance(sv, x), self.gamma))
            .sum();
        Ok(s + self.bias)
    }

    /// `f(x) = Σ β_j K(sv_j, x) + b` for every row of `x`.
    pub fn predict(&self, x: &Matrix) -> Result<Vec<f64>, SvrError> {
        if x.ncols() != self.train_dim {
            return Err(SvrError::DimensionMismatch {
                expected: self.train_dim,
                found: x.ncols(),
            });
        }
        x.rows().map(|r| self.predict_one(r)).collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("model serializes")
    }

    pub fn from_json(s: &str) -> Result<Self, SvrError> {
        let m: SvrModel = serde_json::from_str(s).map_err(|e| SvrError::Format(e.to_string()))?;
        if m.support_vectors.as_slice().len()
            != m.support_vectors.nrows() * m.support_vectors.ncols()
            || m.support_vectors.nrows() != m.dual_coefs.len()
            || m.support_indices.len() != m.dual_coefs.len()
            || (m.support_vectors.nrows() > 0 && m.support_vectors.ncols() != m.train_dim)
        {
            return Err(SvrError::Format("inconsistent model shapes".into()));
        }
        Ok(m)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> std::io::Result<()> {
        std::fs::write(path, self.to_json())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, SvrError> {
        let s = std::fs::read_to_string(path).map_err(|e| SvrError::Format(e.to_string()))?;
        Self::from_json(&s)
    }
}

/// Dual objective `−½ βᵀKβ − ε Σ|β_i| + Σ y_i β_i`.
pub fn dual_objective(gram: &Gram<'_>, y: &[f64], epsilon: f64, beta: &[f64]) -> f64 {
    let mut quad = 0.0;
    for (i, &bi) in beta.iter().enumerate() {
        if bi == 0.0 {
            continue;
        }
        let row = gram.row(i);
        let kb: f64 = row.iter().zip(beta).map(|(k, b)| k * b).sum();
        quad += bi * kb;
    }
    let l1: f64 = beta.iter().map(|b| b.abs()).sum();
    let lin: f64 = y.iter().zip(beta).map(|(a, b)| a * b).sum();
    -0.5 * quad - epsilon * l1 + lin
}

/// Summary of how well a dual solution satisfies feasibility and
/// complementarity.
#[derive(Debug, Clone, PartialEq)]
pub struct KktReport {
    pub sum_beta: f64,
    pub max_abs_beta: f64,
    /// Largest `|f(x_i) − y_i| − ε` over rows strictly inside the box.
    pub inside_excess: f64,
    /// Rows whose residual exceeds `ε + tol` but whose `|β|` is below `C`.
    pub unbounded_outliers: Vec<usize>,
}

impl KktReport {
    pub fn passes(&self, c: f64, n: usize, tol: f64) -> bool {
        self.sum_beta.abs() <= 1e-6 * c * n as f64
            && self.max_abs_beta <= c + 1e-9
            && self.inside_excess <= tol
            && self.unbounded_outliers.is_empty()
    }
}

/// Checks a fitted model against its own training set.
pub fn kkt_report(
    model: &SvrModel,
    x: &Matrix,
    y: &[f64],
    tol: f64,
) -> Result<KktReport, SvrError> {
    let pred = model.predict(x)?;
    if y.len() != x.nrows() {
        return Err(SvrError::DimensionMismatch {
            expected: x.nrows(),
            found: y.len(),
        });
    }
    let c = model.hp.c;
    let eps = model.hp.epsilon;
    let beta = model.training_beta(x.nrows());
    let mut inside_excess = f64::NEG_INFINITY;
    let mut outliers = Vec::new();
    for i in 0..x.nrows() {
        let r = (pred[i] - y[i]).abs();
        let at_bound = beta[i].abs() >= c - 1e-9;
        if !at_bound {
            inside_excess = inside_excess.max(r - eps);
            if r > eps + tol {
                outliers.push(i);
            }
        }
    }
    Ok(KktReport {
        sum_beta: model.dual_coefs.iter().sum(),
        max_abs_beta: model.dual_coefs.iter().fold(0.0, |m, b| m.max(b.abs())),
        inside_excess,
        unbounded_outliers: outliers,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn wave(n: usize) -> (Matrix, Vec<f64>) {
        let rows: Vec<[f64; 2]> = (0..n)
            .map(|i| {
                let t = i as f64 / n as f64;
                [t, (3.0 * t).cos()]
            })
            .collect();
        let y = rows
            .iter()
            .map(|r| (4.0 * r[0]).sin() + 0.3 * r[1])
            .collect();
        (Matrix::from_rows(&rows), y)
    }

    #[test]
    fn flat_target_fits_inside_tube() {
        let (x, _) = wave(10);
        let m = fit_svr(&x, &[0.7; 10], &HyperParams::new(1.0, 0.1)).unwrap();
        for p in m.predict(&x).unwrap() {
            assert!((p - 0.7).abs() <= 0.1 + 1e-12, "{p}");
        }
        assert_eq!(m.n_support(), 0);
        assert_relative_eq!(m.bias, 0.7, epsilon = 1e-12);
    }

    #[test]
    fn no_support_vectors_predicts_bias() {
        let m = SvrModel {
            support_vectors: Matrix::zeros(0, 3),
            support_indices: vec![],
            dual_coefs: vec![],
            bias: -1.25,
            gamma: 1.0,
            hp: HyperParams::default(),
            train_dim: 3,
        };
        let x = Matrix::from_rows(&[[1.0, 2.0, 3.0], [0.0, 0.0, 0.0]]);
        assert_eq!(m.predict(&x).unwrap(), vec![-1.25, -1.25]);
        assert!(matches!(
            m.predict(&Matrix::zeros(1, 2)),
            Err(SvrError::DimensionMismatch {
                expected: 3,
                found: 2
            })
        ));
    }

    #[test]
    fn selected_hyperparameters_bound_coefficients() {
        let (x, y) = wave(30);
        let y: Vec<f64> = y.iter().map(|v| v * 3.0).collect();
        let m = fit_svr(&x, &y, &HyperParams::new(1.0, 0.1)).unwrap();
        assert!(m.dual_coefs.iter().all(|b| b.abs() <= 1.0));
        let rep = kkt_report(&m, &x, &y, 1e-3).unwrap();
        assert!(rep.passes(1.0, 30, 1e-3), "{rep:?}");
    }

    #[test]
    fn invalid_inputs() {
        let (x, y) = wave(4);
        assert!(fit_svr(&x, &y, &HyperParams::new(0.0, 0.1)).is_err());
        assert!(fit_svr(&x, &y, &HyperParams::new(1.0, -0.1)).is_err());
        assert!(fit_svr(&x, &y, &HyperParams::new(1.0, 0.1).with_gamma(-1.0)).is_err());
        assert!(matches!(
            fit_svr(&x, &y[..3], &HyperParams::default()),
            Err(SvrError::DimensionMismatch { .. })
        ));
        assert!(matches!(
            fit_svr(&x.select_rows(&[0]), &y[..1], &HyperParams::default()),
            Err(SvrError::TooFewSamples { .. })
        ));
        let flat = Matrix::from_rows(&[[1.0], [1.0]]);
        assert_eq!(
            fit_svr(&flat, &[0.0, 1.0], &HyperParams::default()),
            Err(SvrError::ZeroVariance)
        );
        assert!(fit_svr(&flat, &[0.0, 1.0], &HyperParams::default().with_gamma(1.0)).is_ok());
    }

    #[test]
    fn save_load_reproduces_predictions_bitwise() {
        let (x, y) = wave(25);
        let m = fit_svr(&x, &y, &HyperParams::new(10.0, 0.01)).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("model.json");
        m.save(&path).unwrap();
        let back = SvrModel::load(&path).unwrap();
        assert_eq!(back, m);
        let a = m.predict(&x).unwrap();
        let b = back.predict(&x).unwrap();
        assert!(a.iter().zip(&b).all(|(p, q)| p.to_bits() == q.to_bits()));
        assert!(SvrModel::from_json("{}").is_err());
    }

    proptest! {
        #[test]
        fn prediction_ignores_support_vector_order(seed in 0u64..1000) {
            let (x, y) = wave(12);
            let y: Vec<f64> = y.iter().enumerate().map(|(i, v)| v + ((seed + i as u64) % 7) as f64 * 0.1).collect();
            let m = fit_svr(&x, &y, &HyperParams::new(10.0, 0.05)).unwrap();
            let mut perm: Vec<usize> = (0..m.n_support()).collect();
            perm.reverse();
            perm.rotate_left((seed as usize) % m.n_support().max(1));
            let shuffled = SvrModel {
                support_vectors: m.support_vectors.select_rows(&perm),
                dual_coefs: perm.iter().map(|&i| m.dual_coefs[i]).collect(),
                support_indices: perm.iter().map(|&i| m.support_indices[i]).collect(),
                ..m.clone()
            };
            let a = m.predict(&x).unwrap();
            let b = shuffled.predict(&x).unwrap();
            for (p, q) in a.iter().zip(&b) {
                prop_assert!((p - q).abs() <= 1e-12);
            }
        }
    }
}
