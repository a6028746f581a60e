//! Tour of the margin losses: values, composite forms, and the two
//! algebraic conditions that decide risk-construction eligibility.
//!
//! ```bash
//! cargo run --release --example loss_functions
//! ```

use pnu::loss::{Loss, LossCondition};

fn main() {
    println!("{:<18} {:>8} {:>8} {:>8} {:>10} {:>10}", "loss", "l(-1)", "l(0)", "l(1)", "symmetry", "lin-comp");
    for loss in Loss::ALL {
        println!(
            "{:<18} {:>8.3} {:>8.3} {:>8.3} {:>10} {:>10}",
            loss.name(),
            loss.evaluate(-1.0),
            loss.evaluate(0.0),
            loss.evaluate(1.0),
            loss.satisfies(LossCondition::Symmetry),
            loss.satisfies(LossCondition::LinearComposite),
        );
    }

    println!("\ncomposite forms l(m) - l(-m) at m = 0.5:");
    for loss in Loss::ALL {
        println!("  {:<18} {:+.4}", loss.name(), loss.composite(0.5));
    }

    // the two conditions in action: ramp losses always sum to one across
    // the margin sign, squared-loss composites collapse to a line
    let m = 0.73;
    println!("\nramp({m}) + ramp({}) = {}", -m, Loss::Ramp.evaluate(m) + Loss::Ramp.evaluate(-m));
    println!("scaled_squared composite at {m} = {}", Loss::ScaledSquared.composite(m));
}
