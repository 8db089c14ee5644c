//! Paired t-tests and significance stars, including the degenerate cases.
//!
//! Run:
//!   cargo run -p embodiment --example significance

use embodiment::eval::{paired_t_test, stars};

fn main() {
    let model = [0.14, 0.16, 0.12, 0.15, 0.13, 0.17, 0.11, 0.14];
    let baseline = [0.21, 0.19, 0.22, 0.20, 0.23, 0.18, 0.21, 0.20];
    let (t, p) = paired_t_test(&model, &baseline).unwrap();
    println!("t = {t:.3}, p = {p:.3e}, stars {:?}", stars(p).unwrap());

    let same = paired_t_test(&baseline, &baseline).unwrap();
    let shifted: Vec<f64> = baseline.iter().map(|v| v - 0.01).collect();
    let constant = paired_t_test(&shifted, &baseline).unwrap();
    println!("identical inputs: {same:?}, constant shift: {constant:?}");

    for p in [0.2, 0.05, 0.049, 0.01, 0.0099, 0.001, 0.0009] {
        println!("p = {p:<7} -> {:?}", stars(p).unwrap());
    }
}
