//! Two-sided Student t p-values by direct numerical integration of the
//! density, with the normalizing Gamma ratio built by recurrence.

use std::f64::consts::PI;

/// `Γ((ν + 1) / 2) / Γ(ν / 2)` for integer `ν ≥ 1`.
fn gamma_ratio(df: u32) -> f64 {
    // r(1) = 1/√π, r(2) = √π/2, r(ν + 2) = r(ν)·(ν + 1)/ν
    let mut r = if df % 2 == 1 {
        1.0 / PI.sqrt()
    } else {
        PI.sqrt() / 2.0
    };
    let mut nu = if df % 2 == 1 { 1 } else { 2 };
    while nu < df {
        r *= (nu as f64 + 1.0) / nu as f64;
        nu += 2;
    }
    r
}

pub fn density(u: f64, df: u32) -> f64 {
    let nu = df as f64;
    gamma_ratio(df) / (nu * PI).sqrt() * (1.0 + u * u / nu).powf(-(nu + 1.0) / 2.0)
}

/// `P(|T| ≥ |t|)` via composite Simpson on `[0, |t|]`.
pub fn two_sided_p(t: f64, df: u32) -> f64 {
    let a = t.abs();
    if a == 0.0 {
        return 1.0;
    }
    let m = 200_000usize;
    let h = a / m as f64;
    let mut s = density(0.0, df) + density(a, df);
    for i in 1..m {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        s += w * density(i as f64 * h, df);
    }
    (1.0 - 2.0 * s * h / 3.0).max(0.0)
}

/// Paired t statistic from first principles.
pub fn paired_t(a: &[f64], b: &[f64]) -> (f64, u32) {
    let n = a.len();
    let d: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    let mean = d.iter().sum::<f64>() / n as f64;
    let var = d.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n as f64 - 1.0);
    (mean / (var / n as f64).sqrt(), n as u32 - 1)
}
