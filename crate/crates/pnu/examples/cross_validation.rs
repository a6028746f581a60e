//! Five-fold cross-validation of the PNU trade-off, regularization, and
//! kernel bandwidth, scored by the zero-one PNU validation risk.
//!
//! ```bash
//! cargo run --release --example cross_validation
//! ```

use pnu::data::synth_gaussians;
use pnu::experiment::misclassification_rate;
use pnu::loss::Loss;
use pnu::risk::RiskFamily;
use pnu::selection::{cross_validate, refit, CvConfig, Grid};

fn main() {
    let data = synth_gaussians(0.5, 10, 10, 200, 1.8, 2, 5).unwrap();
    let grid = Grid::desk();
    let config = CvConfig::new(RiskFamily::Pnu, Loss::ScaledSquared);

    let report = cross_validate(&data, &grid, &config).unwrap();
    println!("eta_bar used for scoring: {:+.3}", report.eta_bar);
    println!("candidates evaluated: {}", report.candidates.len());
    println!(
        "chosen: lambda = {:.0e}, eta = {:+.2}, bandwidth = {:.3}",
        report.chosen.lambda,
        report.chosen.combo.unwrap(),
        report.chosen.bandwidth.unwrap()
    );

    let best = report
        .candidates
        .iter()
        .find(|c| c.candidate == report.chosen)
        .unwrap();
    println!("fold scores of the chosen candidate: {:?}", best.fold_scores);

    let classifier = refit(&data, &config, &report.chosen).unwrap();
    let test = synth_gaussians(0.5, 2000, 2000, 0, 1.8, 2, 6).unwrap();
    let pairs: Vec<(Vec<f64>, i8)> = test
        .positives
        .iter()
        .map(|x| (x.to_vec(), 1i8))
        .chain(test.negatives.iter().map(|x| (x.to_vec(), -1i8)))
        .collect();
    println!("refit test error: {:.3}", misclassification_rate(&classifier, &pairs));
}
