//! Small benchmark-style run: PNU and convex PUNU training against a
//! PN-only baseline, each tuned by cross-validation, on overlapping
//! synthetic Gaussians with few labels and many unlabeled points.
//!
//! ```bash
//! cargo run --release --example benchmark_compare
//! ```

use pnu::experiment::{run_benchmark_compare, DataSource, ExperimentConfig};

fn main() {
    let mut config = ExperimentConfig::desk(0.5);
    config.source = DataSource::Synthetic {
        separation: 1.2,
        dim: 8,
    };
    config.trials = 20;
    config.n_labeled = 10;
    config.theta_labeled = 0.7;
    config.n_unlabeled = 300;
    config.n_test = 5_000;
    config.seed = 42;
    config.grid.lambdas = vec![1e-2, 1e-1, 1.0, 10.0];

    let report = run_benchmark_compare(&config).unwrap();
    println!(
        "misclassification over {} trials (n_l = {}, n_u = {}):",
        config.trials, config.n_labeled, config.n_unlabeled
    );
    for setting in &report.settings {
        println!(
            "  {:<5} {:.4} (se {:.4})  [{:.2} s]",
            setting.label,
            setting.mean,
            setting.std_error,
            setting.wall_clock_secs.unwrap()
        );
    }
}
