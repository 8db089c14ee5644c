//! Sanity checks on the reference solvers used by the acceptance suite.

mod common;

use approx::assert_relative_eq;
use common::oracle::dual_oracle;
use common::tdist::two_sided_p;
use embodiment::Matrix;

#[test]
fn two_point_closed_form() {
    // β = (−t, t) reduces the dual to −t²(1 − e⁻¹) + 2t
    let x = Matrix::from_rows(&[[0.0], [1.0]]);
    let sol = dual_oracle(&x, &[-1.0, 1.0], 10.0, 0.0, 1.0);
    let t = 1.0 / (1.0 - (-1.0f64).exp());
    assert!(sol.polished);
    assert_relative_eq!(sol.beta[0], -t, epsilon = 1e-12);
    assert_relative_eq!(sol.beta[1], t, epsilon = 1e-12);
    assert_relative_eq!(sol.objective, t, epsilon = 1e-12);
    assert_relative_eq!(sol.bias, 0.0, epsilon = 1e-12);
}

#[test]
fn two_point_clipped_by_c() {
    let x = Matrix::from_rows(&[[0.0], [1.0]]);
    let sol = dual_oracle(&x, &[-1.0, 1.0], 0.5, 0.0, 1.0);
    assert_eq!(sol.beta, vec![-0.5, 0.5]);
}

#[test]
fn flat_target_has_zero_solution() {
    let x = Matrix::from_rows(&[[0.0], [1.0], [2.5]]);
    let sol = dual_oracle(&x, &[0.4; 3], 1.0, 0.1, 1.0);
    assert!(sol.beta.iter().all(|&b| b == 0.0));
    assert_eq!(sol.objective, 0.0);
    assert_relative_eq!(sol.bias, 0.4, epsilon = 1e-12);
}

#[test]
fn t_distribution_table_values() {
    // two-sided 5% critical values
    assert_relative_eq!(two_sided_p(12.706, 1), 0.05, epsilon = 1e-4);
    assert_relative_eq!(two_sided_p(2.228, 10), 0.05, epsilon = 1e-4);
    assert_relative_eq!(two_sided_p(2.093, 19), 0.05, epsilon = 1e-4);
    // df = 2 has the closed form 1 − t / √(2 + t²)
    for t in [0.3, 1.0, 4.0] {
        let exact = 1.0 - t / (2.0f64 + t * t).sqrt();
        assert_relative_eq!(two_sided_p(t, 2), exact, epsilon = 1e-12);
    }
    assert_eq!(two_sided_p(0.0, 5), 1.0);
}
