//! Compares model selection under the PN and the PNU validation scores:
//! identical candidate classifiers, two selection rules, test-error ratio.
//!
//! ```bash
//! cargo run --release --example validation_score
//! ```

use pnu::experiment::{run_validation_ratio, DataSource, ExperimentConfig};

fn main() {
    let mut config = ExperimentConfig::desk(0.3);
    config.source = DataSource::Synthetic {
        separation: 1.0,
        dim: 2,
    };
    config.trials = 100;
    config.n_u_val_sweep = vec![10, 100, 300];
    config.n_test = 5_000;
    config.seed = 5;

    let report = run_validation_ratio(&config).unwrap();
    println!(
        "test error of the PNU-selected model over the PN-selected one ({} trials):",
        config.trials
    );
    for setting in &report.settings {
        println!(
            "  {:<13} mean ratio {:.4} (se {:.4})",
            setting.label, setting.mean, setting.std_error
        );
    }
}
