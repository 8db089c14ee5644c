//! Sequential minimal optimization for the epsilon-SVR dual.
//!
//! The dual over `β = α − α*` is rewritten with `2n` box-constrained
//! variables `z = (α, α*)`, signs `s = (+1, −1)` and
//!
//! ```text
//! minimize   ½ zᵀQz + pᵀz
//! subject to sᵀz = 0,  0 ≤ z ≤ C
//! Q_tu = s_t s_u K(x_t mod n, x_u mod n)
//! p_t  = ε − y_t (t < n),  ε + y_{t−n} (t ≥ n)
//! ```
//!
//! Each iteration picks the maximal violating pair and solves the
//! two-variable subproblem analytically.

use super::kernel::Gram;
use crate::error::SvrError;

const TAU: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    /// Stop once the maximal KKT violation falls below this value.
    pub tol: f64,
    /// Iteration budget, in units of `n` pair updates.
    pub max_passes: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            tol: 1e-6,
            max_passes: 10_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DualSolution {
    pub beta: Vec<f64>,
    pub bias: f64,
    pub iterations: usize,
    /// Maximal KKT violation at exit.
    pub violation: f64,
}

struct State<'g, 'a> {
    gram: &'g Gram<'a>,
    n: usize,
    c: f64,
    alpha: Vec<f64>,
    grad: Vec<f64>,
}

impl State<'_, '_> {
    fn sign(&self, t: usize) -> f64 {
        if t < self.n {
            1.0
        } else {
            -1.0
        }
    }

    fn in_up(&self, t: usize) -> bool {
        if t < self.n {
            self.alpha[t] < self.c
        } else {
            self.alpha[t] > 0.0
        }
    }

    fn in_low(&self, t: usize) -> bool {
        if t < self.n {
            self.alpha[t] > 0.0
        } else {
            self.alpha[t] < self.c
        }
    }

    /// Maximal violating pair `(i, j, gap)`; lowest index wins ties.
    fn select(&self) -> (Option<usize>, Option<usize>, f64) {
        let mut gmax = f64::NEG_INFINITY;
        let mut gmin = f64::INFINITY;
        let mut i = None;
        let mut j = None;
        for t in 0..2 * self.n {
            let v = -self.sign(t) * self.grad[t];
            if self.in_up(t) && v > gmax {
                gmax = v;
                i = Some(t);
            }
            if self.in_low(t) && v < gmin {
                gmin = v;
                j = Some(t);
            }
        }
        (i, j, gmax - gmin)
    }

    fn update(&mut self, i: usize, j: usize) {
        let n = self.n;
        let c = self.c;
        let (si, sj) = (self.sign(i), self.sign(j));
        let gram = self.gram;
        let ki = gram.row(i % n);
        let kj = gram.row(j % n);
        let qii = ki[i % n];
        let qjj = kj[j % n];
        let qij = si * sj * ki[j % n];
        let (old_i, old_j) = (self.alpha[i], self.alpha[j]);
        let (gi, gj) = (self.grad[i], self.grad[j]);
        let (mut ai, mut aj) = (old_i, old_j);

        if si != sj {
            let mut quad = qii + qjj + 2.0 * qij;
            if quad <= 0.0 {
                quad = TAU;
            }
            let delta = (-gi - gj) / quad;
            let diff = ai - aj;
            ai += delta;
            aj += delta;
            if diff > 0.0 {
                if aj < 0.0 {
                    aj = 0.0;
                    ai = diff;
                }
            } else if ai < 0.0 {
                ai = 0.0;
                aj = -diff;
            }
            if diff > 0.0 {
                if ai > c {
                    ai = c;
                    aj = c - diff;
                }
            } else if aj > c {
                aj = c;
                ai = c + diff;
            }
        } else {
            let mut quad = qii + qjj - 2.0 * qij;
            if quad <= 0.0 {
                quad = TAU;
            }
            let delta = (gi - gj) / quad;
            let sum = ai + aj;
            ai -= delta;
            aj += delta;
            if sum > c {
                if ai > c {
                    ai = c;
                    aj = sum - c;
                }
            } else if aj < 0.0 {
                aj = 0.0;
                ai = sum;
            }
            if sum > c {
                if aj > c {
                    aj = c;
                    ai = sum - c;
                }
            } else if ai < 0.0 {
                ai = 0.0;
                aj = sum;
            }
        }

        self.alpha[i] = ai;
        self.alpha[j] = aj;
        let (dai, daj) = (ai - old_i, aj - old_j);
        for t in 0..2 * n {
            let st = self.sign(t);
            let k = t % n;
            self.grad[t] += st * (si * ki[k] * dai + sj * kj[k] * daj);
        }
    }

    /// Bias from free variables, else the midpoint of the feasible interval.
    fn bias(&self) -> f64 {
        let (mut ub, mut lb) = (f64::INFINITY, f64::NEG_INFINITY);
        let (mut sum, mut free) = (0.0, 0usize);
        for t in 0..2 * self.n {
            let s = self.sign(t);
            let yg = s * self.grad[t];
            let at_upper = self.alpha[t] >= self.c;
            let at_lower = self.alpha[t] <= 0.0;
            if at_upper {
                if s < 0.0 {
                    ub = ub.min(yg);
                } else {
                    lb = lb.max(yg);
                }
            } else if at_lower {
                if s > 0.0 {
                    ub = ub.min(yg);
                } else {
                    lb = lb.max(yg);
                }
            } else {
                free += 1;
                sum += yg;
            }
        }
        let rho = if free > 0 {
            sum / free as f64
        } else {
            (ub + lb) / 2.0
        };
        -rho
    }
}

/// Solves the epsilon-SVR dual for the training set behind `gram`.
pub fn solve(
    gram: &Gram<'_>,
    y: &[f64],
    c: f64,
    epsilon: f64,
    opts: SolverOptions,
) -> Result<DualSolution, SvrError> {
    let n = gram.len();
    if y.len() != n {
        return Err(SvrError::DimensionMismatch {
            expected: n,
            found: y.len(),
        });
    }
    let mut grad = Vec::with_capacity(2 * n);
    grad.extend(y.iter().map(|&v| epsilon - v));
    grad.extend(y.iter().map(|&v| epsilon + v));
    let mut st = State {
        gram,
        n,
        c,
        alpha: vec![0.0; 2 * n],
        grad,
    };

    let max_iter = opts.max_passes.saturating_mul(n.max(1));
    let mut iterations = 0;
    let violation = loop {
        let (i, j, gap) = st.select();
        let (Some(i), Some(j)) = (i, j) else {
            break 0.0;
        };
        if gap < opts.tol {
            break gap.max(0.0);
        }
        if iterations >= max_iter {
            return Err(SvrError::NotConverged {
                iterations,
                violation: gap,
            });
        }
        st.update(i, j);
        iterations += 1;
    };

    let bias = st.bias();
    let beta = (0..n).map(|i| st.alpha[i] - st.alpha[i + n]).collect();
    Ok(DualSolution {
        beta,
        bias,
        iterations,
        violation,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::Matrix;
    use approx::assert_relative_eq;

    #[test]
    fn two_point_problem_has_closed_form() {
        // β = (−t, t), objective −t²(1 − e⁻¹) + 2t, maximized at t = 1/(1 − e⁻¹)
        let x = Matrix::from_rows(&[[0.0], [1.0]]);
        let gram = Gram::new(&x, 1.0);
        let sol = solve(
            &gram,
            &[-1.0, 1.0],
            10.0,
            0.0,
            SolverOptions {
                tol: 1e-12,
                ..Default::default()
            },
        )
        .unwrap();
        let t = 1.0 / (1.0 - (-1.0f64).exp());
        assert_relative_eq!(sol.beta[0], -t, epsilon = 1e-9);
        assert_relative_eq!(sol.beta[1], t, epsilon = 1e-9);
        assert_relative_eq!(sol.bias, 0.0, epsilon = 1e-9);
    }

    #[test]
    fn flat_target_stays_at_zero() {
        let x = Matrix::from_rows(&[[0.0, 1.0], [1.0, 3.0], [2.0, -1.0]]);
        let gram = Gram::new(&x, 0.5);
        let sol = solve(&gram, &[0.7; 3], 1.0, 0.1, SolverOptions::default()).unwrap();
        assert!(sol.beta.iter().all(|&b| b == 0.0));
        assert_relative_eq!(sol.bias, 0.7, epsilon = 1e-12);
        assert_eq!(sol.iterations, 0);
    }

    #[test]
    fn iteration_budget_is_enforced() {
        let x = Matrix::from_rows(&[[0.0], [0.3], [0.9], [2.0]]);
        let gram = Gram::new(&x, 1.0);
        let err = solve(
            &gram,
            &[1.0, -1.0, 2.0, 0.0],
            100.0,
            0.0,
            SolverOptions {
                tol: 0.0,
                max_passes: 1,
            },
        )
        .unwrap_err();
        assert!(
            matches!(err, SvrError::NotConverged { iterations: 4, .. }),
            "{err}"
        );
    }
}
