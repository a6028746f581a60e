//! Trains a PNU classifier on synthetic positive/negative/unlabeled data
//! with the squared loss (closed form), measures its test accuracy, and
//! round-trips the model through its JSON form.
//!
//! ```bash
//! cargo run --release --example train_and_predict
//! ```

use pnu::data::{synth_gaussians, SampleSet};
use pnu::loss::Loss;
use pnu::model::{median_bandwidths, Basis, CenterSelection, Classifier};
use pnu::risk::{build_pnu, PnuMode};
use pnu::solver::train_closed_form;

fn main() {
    let train = synth_gaussians(0.5, 15, 5, 300, 2.0, 2, 42).unwrap();
    let prior = train.prior.unwrap();
    println!(
        "training data: {} positive, {} negative, {} unlabeled",
        train.positives.len(),
        train.negatives.len(),
        train.unlabeled.len()
    );

    // Gaussian kernel model with the median-heuristic bandwidth
    let all = SampleSet::new(train.all_points(), 2).unwrap();
    let bandwidth = median_bandwidths(&all, &[1.0]).unwrap()[0];
    let centers = CenterSelection::Subsample { cap: 100, seed: 0 }.centers(&train);
    let basis = Basis::gaussian(centers, bandwidth).unwrap();

    // lean on the unlabeled data: eta > 0 selects the PN+PU combination
    let spec = build_pnu(0.5, prior, Loss::ScaledSquared, PnuMode::Convex).unwrap();
    let classifier = train_closed_form(&spec, &train, &basis, 0.01).unwrap();

    let test = synth_gaussians(0.5, 5000, 5000, 0, 2.0, 2, 43).unwrap();
    let mut correct = 0;
    for x in test.positives.iter() {
        correct += (classifier.predict(x) == 1) as usize;
    }
    for x in test.negatives.iter() {
        correct += (classifier.predict(x) == -1) as usize;
    }
    println!("test accuracy: {:.3}", correct as f64 / 10_000.0);

    let json = serde_json::to_string(&classifier).unwrap();
    let restored: Classifier = serde_json::from_str(&json).unwrap();
    println!(
        "JSON round trip preserves decisions: {}",
        restored.decision(&[0.3, -0.8]) == classifier.decision(&[0.3, -0.8])
    );
}
