//! Trains a small classifier, auto-fills the bound inputs from it, and
//! compares the high-probability generalization bound against the measured
//! error on fresh data.
//!
//! ```bash
//! cargo run --release --example generalization_bound
//! ```

use pnu::data::{synth_gaussians, SampleSet};
use pnu::loss::Loss;
use pnu::model::{median_bandwidths, Basis, CenterSelection};
use pnu::risk::{build_base, build_combined, RiskFamily};
use pnu::solver::train_closed_form;
use pnu::theory::{alpha_ratios, generalization_bound, BoundInputs};

fn main() {
    let train = synth_gaussians(0.5, 10, 10, 100, 2.0, 2, 3).unwrap();
    let prior = train.prior.unwrap();
    let labeled = SampleSet::new(train.labeled_points(), 2).unwrap();
    let bandwidth = median_bandwidths(&labeled, &[1.0]).unwrap()[0];
    let basis = Basis::gaussian(CenterSelection::LabeledOnly.centers(&train), bandwidth).unwrap();
    let spec = build_base(RiskFamily::Pn, prior, Loss::ScaledSquared).unwrap();
    let classifier = train_closed_form(&spec, &train, &basis, 0.1).unwrap();

    let gamma = 0.5;
    let ramp = build_combined(RiskFamily::NPnpu, gamma, prior, Loss::Ramp).unwrap();
    let empirical = ramp.evaluate_empirical(&train, &classifier).unwrap();
    let inputs = BoundInputs::from_trained(
        &classifier,
        &train.all_points(),
        0.05,
        train.positives.len(),
        train.negatives.len(),
        train.unlabeled.len(),
        prior,
    )
    .unwrap();
    let bound = generalization_bound(RiskFamily::NPnpu, gamma, empirical, &inputs).unwrap();

    let fresh = synth_gaussians(0.5, 20_000, 20_000, 0, 2.0, 2, 4).unwrap();
    let errors = fresh
        .positives
        .iter()
        .filter(|x| classifier.predict(x) != 1)
        .count()
        + fresh
            .negatives
            .iter()
            .filter(|x| classifier.predict(x) != -1)
            .count();
    let measured = errors as f64 / 40_000.0;

    println!("empirical PNPU risk (ramp, gamma = {gamma}): {empirical:.4}");
    println!("norm caps: |w| = {:.3}, max |phi| = {:.3}", inputs.c_w, inputs.c_phi);
    println!("bound at delta = 0.05: {bound:.4}");
    println!("measured error on fresh data: {measured:.4}");

    let alphas = alpha_ratios(prior, 10, 10, 100).unwrap();
    println!(
        "\ncomparison ratios: PU-vs-PN {:.3}, NU-vs-PN {:.3} (limits {:.3} / {:.3})",
        alphas.pu_pn, alphas.nu_pn, alphas.pu_pn_limit, alphas.nu_pn_limit
    );
}
