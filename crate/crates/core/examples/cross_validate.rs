//! Cross-validate one modality combination on one construct and compare
//! against the mean baseline fold by fold.
//!
//! Run:
//!   cargo run -p embodiment --release --example cross_validate

use embodiment::eval::{cross_validate, make_folds, paired_t_test};
use embodiment::synthetic::{generate, SyntheticSpec};
use embodiment::{Construct, HyperParams, ModalityCombo};

fn main() {
    let ds = generate(&SyntheticSpec::default());
    let plan = make_folds(ds.len(), 20, 42).unwrap();
    println!("fold sizes: {:?}", plan.fold_sizes());

    for combo in [ModalityCombo::HC, ModalityCombo::M_IM] {
        let scores = cross_validate(
            &ds,
            combo,
            Construct::Warmth,
            &HyperParams::default(),
            &plan,
        )
        .unwrap();
        let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
        let (t, p) = paired_t_test(&scores.fold_mses, &scores.baseline_fold_mses).unwrap();
        println!(
            "{combo:>8}: SVR {:.3}  baseline {:.3}  t = {t:+.2}  p = {p:.2e}",
            mean(&scores.fold_mses),
            mean(&scores.baseline_fold_mses)
        );
    }
}
