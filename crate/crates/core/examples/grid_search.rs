//! Select C and epsilon with the pooled cross-validated grid search.
//!
//! Run:
//!   cargo run -p embodiment --release --example grid_search

use embodiment::dataset::Dims;
use embodiment::eval::{grid_search, make_folds, GridSpec};
use embodiment::synthetic::{generate, SyntheticSpec};

fn main() {
    let ds = generate(&SyntheticSpec {
        n: 60,
        dims: Dims::new(20, 32, 32),
        ..Default::default()
    });
    let plan = make_folds(ds.len(), 5, 42).unwrap();
    let grid = GridSpec {
        c_values: vec![0.1, 1.0, 10.0],
        epsilon_values: vec![0.01, 0.1, 1.0],
    };
    let result = grid_search(&ds, &grid, &plan).unwrap();

    println!("{:>6} {:>6} {:>10}", "C", "eps", "pooled");
    for (c, eps, mse) in &result.evaluated {
        println!("{c:>6} {eps:>6} {mse:>10.5}");
    }
    println!(
        "selected C = {}, epsilon = {} (pooled MSE {:.5})",
        result.best.c, result.best.epsilon, result.pooled_mse
    );
}
