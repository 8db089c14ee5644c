//! Fit an epsilon-SVR to a noisy sine curve, inspect the dual solution and
//! round-trip the model through JSON.
//!
//! Run:
//!   cargo run -p embodiment --example fit_svr

use embodiment::svr::{kkt_report, Gamma};
use embodiment::{fit_svr, HyperParams, Matrix, SvrModel};

fn main() {
    let xs: Vec<f64> = (0..40).map(|i| i as f64 / 39.0 * 6.0).collect();
    let y: Vec<f64> = xs
        .iter()
        .enumerate()
        .map(|(i, x)| x.sin() + if i % 2 == 0 { 0.05 } else { -0.05 })
        .collect();
    let x = Matrix::from_vec(xs.len(), 1, xs);

    let hp = HyperParams {
        c: 10.0,
        epsilon: 0.1,
        gamma: Gamma::Value(0.5),
    };
    let model = fit_svr(&x, &y, &hp).expect("training succeeds");
    println!(
        "support vectors: {} of {}, bias {:.4}",
        model.n_support(),
        x.nrows(),
        model.bias
    );

    for probe in [0.5, 1.5, 3.0, 4.5] {
        let f = model.predict_one(&[probe]).unwrap();
        println!("f({probe}) = {f:+.4}   sin = {:+.4}", f64::sin(probe));
    }

    let kkt = kkt_report(&model, &x, &y, 1e-3).unwrap();
    println!(
        "sum of dual coefficients {:.2e}, max |beta| {:.3}, KKT ok: {}",
        kkt.sum_beta,
        kkt.max_abs_beta,
        kkt.passes(hp.c, x.nrows(), 1e-3)
    );

    let json = model.to_json();
    let back = SvrModel::from_json(&json).unwrap();
    assert_eq!(back.predict(&x).unwrap(), model.predict(&x).unwrap());
    println!(
        "model JSON: {} bytes, reload gives identical predictions",
        json.len()
    );
}
