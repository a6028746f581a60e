//! Ramp-loss training with the concave-convex procedure, printing the
//! objective trace (non-increasing by construction) and comparing against
//! the squared-loss closed form on the same ramp objective.
//!
//! ```bash
//! cargo run --release --example cccp_ramp
//! ```

use pnu::data::synth_gaussians;
use pnu::loss::Loss;
use pnu::model::Basis;
use pnu::risk::{build_pnu, PnuMode};
use pnu::solver::{objective, train_cccp, train_closed_form, CccpConfig};

fn main() {
    let data = synth_gaussians(0.5, 10, 10, 50, 1.5, 2, 11).unwrap();
    let prior = data.prior.unwrap();
    let basis = Basis::raw_linear(2);
    let lambda = 0.05;

    let ramp_spec = build_pnu(0.3, prior, Loss::Ramp, PnuMode::NonConvex).unwrap();
    let (ramp_model, trace) =
        train_cccp(&ramp_spec, &data, &basis, &CccpConfig::new(lambda)).unwrap();

    println!("CCCP objective trace:");
    for (i, value) in trace.iter().enumerate() {
        println!("  iter {i}: {value:.8}");
    }

    let squared_spec = build_pnu(0.3, prior, Loss::ScaledSquared, PnuMode::Convex).unwrap();
    let squared_model = train_closed_form(&squared_spec, &data, &basis, lambda).unwrap();
    let ramp_obj = objective(&ramp_spec, &data, &basis, lambda, &ramp_model.weights).unwrap();
    let squared_obj =
        objective(&ramp_spec, &data, &basis, lambda, &squared_model.weights).unwrap();
    println!("\nramp objective of the CCCP solution:        {ramp_obj:.6}");
    println!("ramp objective of the squared-loss solution: {squared_obj:.6}");
}
