use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::EvalError;

/// Default shuffle seed for fold assignment.
pub const DEFAULT_SEED: u64 = 42;
/// Default number of cross-validation folds.
pub const DEFAULT_FOLDS: usize = 20;

/// Assignment of `n` rows to `k` folds.
///
/// Rows `0..n` are shuffled with ChaCha8 seeded from `seed`, then dealt
/// round-robin, so fold sizes differ by at most one and the plan is fully
/// determined by `(n, k, seed)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FoldPlan {
    pub k: usize,
    pub assignment: Vec<usize>,
    pub seed: u64,
}

pub fn make_folds(n: usize, k: usize, seed: u64) -> Result<FoldPlan, EvalError> {
    if k < 2 || k > n {
        return Err(EvalError::InvalidFolds { n, k });
    }
    let mut order: Vec<usize> = (0..n).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    order.shuffle(&mut rng);
    let mut assignment = vec![0; n];
    for (pos, &row) in order.iter().enumerate() {
        assignment[row] = pos % k;
    }
    Ok(FoldPlan {
        k,
        assignment,
        seed,
    })
}

impl FoldPlan {
    pub fn n(&self) -> usize {
        self.assignment.len()
    }

    /// Rows held out in fold `f`, ascending.
    pub fn test_indices(&self, f: usize) -> Vec<usize> {
        (0..self.n()).filter(|&i| self.assignment[i] == f).collect()
    }

    /// Rows used for training when fold `f` is held out, ascending.
    pub fn train_indices(&self, f: usize) -> Vec<usize> {
        (0..self.n()).filter(|&i| self.assignment[i] != f).collect()
    }

    pub fn fold_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.k];
        for &f in &self.assignment {
            sizes[f] += 1;
        }
        sizes
    }
}
