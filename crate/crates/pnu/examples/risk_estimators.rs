//! Risk estimators as data: builds the base and combined term tables,
//! prints their JSON audit form, and demonstrates the finite-sample
//! identity that makes the half-weight PUNU combination coincide with the
//! fully supervised risk.
//!
//! ```bash
//! cargo run --release --example risk_estimators
//! ```

use pnu::data::{synth_gaussians, ClassPrior};
use pnu::loss::Loss;
use pnu::model::{Basis, Classifier};
use pnu::risk::{build_base, build_combined, build_pnu, PnuMode, RiskFamily};

fn main() {
    let prior = ClassPrior::new(0.3).unwrap();

    let pu = build_base(RiskFamily::NPu, prior, Loss::Ramp).unwrap();
    println!("non-convex PU risk at theta_p = 0.3:");
    println!("{}\n", serde_json::to_string_pretty(&pu).unwrap());

    let pnu = build_pnu(-0.4, prior, Loss::Ramp, PnuMode::NonConvex).unwrap();
    println!("PNU at eta = -0.4 expands through the PNNU branch:");
    for term in &pnu.terms {
        println!("  {:?} weight {:.3}", (term.source, term.sign), term.weight);
    }
    println!("  constant {:.3}\n", pnu.constant);

    // the identity: with a symmetric loss the unlabeled terms of the
    // half-weight PUNU combination cancel pointwise against its constant
    let data = synth_gaussians(0.3, 12, 18, 40, 2.0, 2, 7).unwrap();
    let g = Classifier::new(Basis::raw_linear(2), vec![0.6, -0.2, 0.1]).unwrap();
    let punu_half = build_combined(RiskFamily::NPunu, 0.5, prior, Loss::Ramp)
        .unwrap()
        .evaluate_empirical(&data, &g)
        .unwrap();
    let pn = build_base(RiskFamily::Pn, prior, Loss::Ramp)
        .unwrap()
        .evaluate_empirical(&data, &g)
        .unwrap();
    println!("empirical PUNU(1/2) = {punu_half:.12}");
    println!("empirical PN       = {pn:.12}");
    println!("difference          = {:.2e}", (punu_half - pn).abs());
}
