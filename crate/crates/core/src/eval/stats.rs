use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::error::EvalError;

/// Mean squared error.
pub fn mse(pred: &[f64], truth: &[f64]) -> Result<f64, EvalError> {
    if pred.len() != truth.len() {
        return Err(EvalError::LengthMismatch(pred.len(), truth.len()));
    }
    if pred.is_empty() {
        return Err(EvalError::Empty);
    }
    let s: f64 = pred.iter().zip(truth).map(|(p, t)| (p - t) * (p - t)).sum();
    Ok(s / pred.len() as f64)
}

/// Two-sided paired t-test on `a − b`; returns `(t, p)`.
///
/// Zero-variance differences short-circuit: `(0, 1)` when the mean
/// difference is zero, `(±∞, 0)` otherwise.
pub fn paired_t_test(a: &[f64], b: &[f64]) -> Result<(f64, f64), EvalError> {
    if a.len() != b.len() {
        return Err(EvalError::LengthMismatch(a.len(), b.len()));
    }
    let n = a.len();
    if n < 2 {
        return Err(EvalError::TooFewPairs(n));
    }
    let d: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    let nf = n as f64;
    let mean = d.iter().sum::<f64>() / nf;
    let var = d.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (nf - 1.0);
    let sd = var.sqrt();
    if sd == 0.0 {
        return Ok(if mean == 0.0 {
            (0.0, 1.0)
        } else {
            (mean.signum() * f64::INFINITY, 0.0)
        });
    }
    let t = mean / (sd / nf.sqrt());
    let dist = StudentsT::new(0.0, 1.0, nf - 1.0).expect("df >= 1");
    let p = (2.0 * dist.sf(t.abs())).min(1.0);
    Ok((t, p))
}

/// Significance annotation: `***` for p < .001, `**` for p < .01,
/// `*` for p < .05.
pub fn stars(p: f64) -> Result<&'static str, EvalError> {
    if !(0.0..=1.0).contains(&p) {
        return Err(EvalError::PValueRange(p));
    }
    Ok(if p < 0.001 {
        "***"
    } else if p < 0.01 {
        "**"
    } else if p < 0.05 {
        "*"
    } else {
        ""
    })
}
