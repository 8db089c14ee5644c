//! Dense reference solver for tiny SVR duals, independent of the SMO code.
//!
//! Accelerated projected-gradient ascent in the split variables `(α, α*)`
//! locates the active set, then the free coefficients and the bias are
//! solved exactly from the stationarity conditions.

use embodiment::svr::rbf_kernel;
use embodiment::Matrix;
use nalgebra::{DMatrix, DVector};

pub const ORACLE_MAX_N: usize = 16;

const FIRST_ROUND: usize = 100;
const MAX_ITERS: usize = 2_000_000;
const KKT_TOL: f64 = 1e-9;

#[derive(Debug, Clone)]
pub struct OracleSolution {
    pub objective: f64,
    pub beta: Vec<f64>,
    pub bias: f64,
    /// Gradient steps taken before an exact active-set solve succeeded.
    pub iterations: usize,
    /// Whether the exact solve passed the optimality check.
    pub polished: bool,
}

impl OracleSolution {
    pub fn predict(&self, x_train: &Matrix, gamma: f64, x: &[f64]) -> f64 {
        x_train
            .rows()
            .zip(&self.beta)
            .map(|(r, b)| b * rbf_kernel(r, x, gamma).unwrap())
            .sum::<f64>()
            + self.bias
    }
}

struct Problem {
    k: DMatrix<f64>,
    y: DVector<f64>,
    c: f64,
    eps: f64,
}

impl Problem {
    fn n(&self) -> usize {
        self.y.len()
    }

    fn objective(&self, beta: &DVector<f64>) -> f64 {
        let kb = &self.k * beta;
        -0.5 * beta.dot(&kb) - self.eps * beta.abs().sum() + self.y.dot(beta)
    }
}

pub fn dual_oracle(x: &Matrix, y: &[f64], c: f64, eps: f64, gamma: f64) -> OracleSolution {
    let n = x.nrows();
    assert!(n <= ORACLE_MAX_N && n == y.len());
    let k = DMatrix::from_fn(n, n, |i, j| rbf_kernel(x.row(i), x.row(j), gamma).unwrap());
    let p = Problem {
        k,
        y: DVector::from_column_slice(y),
        c,
        eps,
    };

    let mut fista = Fista::new(&p);
    let (mut done, mut round) = (0, FIRST_ROUND);
    while done < MAX_ITERS {
        fista.run(&p, round);
        done += round;
        round *= 2;
        let beta = fista.beta();
        // try a range of thresholds for deciding which coefficients are at a bound
        for delta in [1e-4, 1e-6, 1e-8, 1e-3, 1e-2] {
            if let Some((b, bias)) = polish(&p, &beta, delta * c.max(1.0)) {
                return OracleSolution {
                    objective: p.objective(&b),
                    beta: b.iter().copied().collect(),
                    bias,
                    iterations: done,
                    polished: true,
                };
            }
        }
    }
    let beta = fista.beta();
    let bias = kkt_bias(&p, &beta, 1e-9 * c.max(1.0));
    OracleSolution {
        objective: p.objective(&beta),
        beta: beta.iter().copied().collect(),
        bias,
        iterations: done,
        polished: false,
    }
}

struct Fista {
    z: DVector<f64>,
    w: DVector<f64>,
    t: f64,
    obj: f64,
    step: f64,
}

impl Fista {
    fn new(p: &Problem) -> Self {
        let n = p.n();
        // Gershgorin bound for [[K, −K], [−K, K]]
        let l = 2.0 * (0..n).map(|i| p.k.row(i).abs().sum()).fold(0.0, f64::max);
        let z = DVector::zeros(2 * n);
        Fista {
            w: z.clone(),
            obj: 0.0,
            z,
            t: 1.0,
            step: 1.0 / l,
        }
    }

    fn beta(&self) -> DVector<f64> {
        let n = self.z.len() / 2;
        self.z.rows(0, n) - self.z.rows(n, n)
    }

    fn run(&mut self, p: &Problem, iters: usize) {
        let n = p.n();
        for _ in 0..iters {
            let beta = self.w.rows(0, n) - self.w.rows(n, n);
            let r = &p.y - &p.k * beta;
            let mut cand = self.w.clone();
            for i in 0..n {
                cand[i] += self.step * (r[i] - p.eps);
                cand[n + i] += self.step * (-r[i] - p.eps);
            }
            let next = project(&cand, n, p.c);
            let nb = next.rows(0, n) - next.rows(n, n);
            let obj_next = p.objective(&nb) - p.eps * split_excess(&next, n);
            if obj_next < self.obj {
                self.w = self.z.clone();
                self.t = 1.0;
                continue;
            }
            let t_next = (1.0 + (1.0 + 4.0 * self.t * self.t).sqrt()) / 2.0;
            let mom = (self.t - 1.0) / t_next;
            self.w = project(&(&next + (&next - &self.z) * mom), n, p.c);
            self.z = next;
            self.t = t_next;
            self.obj = obj_next;
        }
    }
}

// Σ(α + α*) − Σ|α − α*|, zero unless both sides of a pair are positive
fn split_excess(z: &DVector<f64>, n: usize) -> f64 {
    (0..n)
        .map(|i| z[i] + z[n + i] - (z[i] - z[n + i]).abs())
        .sum()
}

fn project(v: &DVector<f64>, n: usize, c: f64) -> DVector<f64> {
    let clip = |x: f64| x.clamp(0.0, c);
    let h = |lam: f64| -> f64 {
        (0..n)
            .map(|i| clip(v[i] - lam) - clip(v[n + i] + lam))
            .sum()
    };
    let span = v.amax() + c + 1.0;
    let (mut lo, mut hi) = (-span, span);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if h(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= f64::EPSILON * span {
            break;
        }
    }
    let lam = if h(hi) == 0.0 {
        hi
    } else if h(lo) == 0.0 {
        lo
    } else {
        0.5 * (lo + hi)
    };
    DVector::from_fn(2 * n, |t, _| {
        if t < n {
            clip(v[t] - lam)
        } else {
            clip(v[t] + lam)
        }
    })
}

#[derive(Clone, Copy, PartialEq)]
enum State {
    Zero,
    Upper,
    Lower,
    Free(f64),
}

/// Solves the stationarity system for the active set suggested by `beta`
/// and returns the result only if it satisfies every optimality condition.
fn polish(p: &Problem, beta: &DVector<f64>, delta: f64) -> Option<(DVector<f64>, f64)> {
    let n = p.n();
    let c = p.c;
    let states: Vec<State> = beta
        .iter()
        .map(|&b| {
            if b.abs() <= delta {
                State::Zero
            } else if b >= c - delta {
                State::Upper
            } else if b <= -c + delta {
                State::Lower
            } else {
                State::Free(b.signum())
            }
        })
        .collect();
    let free: Vec<usize> = (0..n)
        .filter(|&i| matches!(states[i], State::Free(_)))
        .collect();
    let mut out = DVector::from_fn(n, |i, _| match states[i] {
        State::Upper => c,
        State::Lower => -c,
        _ => 0.0,
    });

    let bias = if free.is_empty() {
        kkt_bias(p, &out, 0.0)
    } else {
        let m = free.len();
        let fixed_k = &p.k * &out;
        let mut a = DMatrix::zeros(m + 1, m + 1);
        let mut rhs = DVector::zeros(m + 1);
        for (r, &i) in free.iter().enumerate() {
            for (s, &j) in free.iter().enumerate() {
                a[(r, s)] = p.k[(i, j)];
            }
            a[(r, m)] = 1.0;
            a[(m, r)] = 1.0;
            let State::Free(sign) = states[i] else {
                unreachable!()
            };
            rhs[r] = p.y[i] - p.eps * sign - fixed_k[i];
        }
        rhs[m] = -out.sum();
        let sol = a
            .clone()
            .lu()
            .solve(&rhs)
            .or_else(|| a.svd(true, true).solve(&rhs, 1e-12).ok())?;
        for (r, &i) in free.iter().enumerate() {
            let State::Free(sign) = states[i] else {
                unreachable!()
            };
            let v = sol[r];
            if v * sign < 0.0 || v.abs() > c {
                return None;
            }
            out[i] = v;
        }
        sol[m]
    };

    let f = &p.k * &out;
    let tol = KKT_TOL * (1.0 + p.y.amax());
    for i in 0..n {
        let r = p.y[i] - f[i] - bias;
        let ok = match states[i] {
            State::Zero => r.abs() <= p.eps + tol,
            State::Upper => r >= p.eps - tol,
            State::Lower => r <= -p.eps + tol,
            State::Free(s) => (r - p.eps * s).abs() <= tol,
        };
        if !ok {
            return None;
        }
    }
    if out.sum().abs() > tol {
        return None;
    }
    Some((out, bias))
}

/// Bias from the KKT conditions: mean over free coefficients, else the
/// midpoint of the feasible interval.
fn kkt_bias(p: &Problem, beta: &DVector<f64>, tiny: f64) -> f64 {
    let kb = &p.k * beta;
    let c = p.c;
    let (mut lb, mut ub) = (f64::NEG_INFINITY, f64::INFINITY);
    let (mut sum, mut free) = (0.0, 0usize);
    for i in 0..p.n() {
        let u = p.y[i] - kb[i];
        let b = beta[i];
        if b.abs() <= tiny {
            lb = lb.max(u - p.eps);
            ub = ub.min(u + p.eps);
        } else if b >= c - tiny {
            ub = ub.min(u - p.eps);
        } else if b <= -c + tiny {
            lb = lb.max(u + p.eps);
        } else {
            sum += u - p.eps * b.signum();
            free += 1;
        }
    }
    if free > 0 {
        sum / free as f64
    } else {
        (lb + ub) / 2.0
    }
}

/// Dual objective of an arbitrary `beta` on the instance `(x, y)`.
pub fn objective(x: &Matrix, y: &[f64], eps: f64, gamma: f64, beta: &[f64]) -> f64 {
    let n = x.nrows();
    let p = Problem {
        k: DMatrix::from_fn(n, n, |i, j| rbf_kernel(x.row(i), x.row(j), gamma).unwrap()),
        y: DVector::from_column_slice(y),
        c: f64::INFINITY,
        eps,
    };
    p.objective(&DVector::from_column_slice(beta))
}
