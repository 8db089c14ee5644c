use std::collections::BTreeMap;

use crate::dataset::Construct;
use crate::error::EvalError;

/// Predicts the training-set mean of each construct.
#[derive(Debug, Clone, PartialEq)]
pub struct MeanBaseline {
    pub means: BTreeMap<Construct, f64>,
}

pub fn fit_baseline(
    y_by_construct: &BTreeMap<Construct, Vec<f64>>,
) -> Result<MeanBaseline, EvalError> {
    let mut means = BTreeMap::new();
    for (&c, y) in y_by_construct {
        means.insert(c, mean(y)?);
    }
    Ok(MeanBaseline { means })
}

impl MeanBaseline {
    pub fn predict(&self, c: Construct, n: usize) -> Option<Vec<f64>> {
        self.means.get(&c).map(|&m| vec![m; n])
    }
}

pub(crate) fn mean(y: &[f64]) -> Result<f64, EvalError> {
    if y.is_empty() {
        return Err(EvalError::Empty);
    }
    Ok(y.iter().sum::<f64>() / y.len() as f64)
}
