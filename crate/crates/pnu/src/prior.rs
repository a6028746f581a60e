//! Class-prior estimation by energy-distance minimization.
//!
//! The empirical energy distance between the mixture `beta P + (1-beta) N`
//! and the unlabeled sample is a quadratic in `beta` whose coefficients are
//! mean pairwise Euclidean distances within and across the three sets, so
//! the minimizer has a closed form clamped to [0, 1].

use serde::{Deserialize, Serialize};

use crate::data::SampleSet;
use crate::error::{Error, Result};

/// Mean pairwise Euclidean distances. Within-set means (`a11`, `a22`, and
/// `u_within`) average over all ordered pairs including the zero diagonal;
/// that convention makes the mixture quadratic coefficient exactly the
/// (nonnegative) energy distance between the P and N samples. Cross-set
/// means run over all pairs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairwiseStats {
    /// Within the positive set.
    pub a11: f64,
    /// Positive against negative.
    pub a12: f64,
    /// Within the negative set.
    pub a22: f64,
    /// Positive against unlabeled.
    pub b1: f64,
    /// Negative against unlabeled.
    pub b2: f64,
    /// Within the unlabeled set (constant in beta; kept for the full
    /// energy-distance value).
    pub u_within: f64,
}

fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

fn mean_within(set: &SampleSet) -> f64 {
    let n = set.len();
    let mut sum = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            sum += euclidean(set.point(i), set.point(j));
        }
    }
    2.0 * sum / (n * n) as f64
}

fn mean_cross(a: &SampleSet, b: &SampleSet) -> f64 {
    let mut sum = 0.0;
    for x in a.iter() {
        for y in b.iter() {
            sum += euclidean(x, y);
        }
    }
    sum / (a.len() * b.len()) as f64
}

impl PairwiseStats {
    pub fn compute(p_set: &SampleSet, n_set: &SampleSet, u_set: &SampleSet) -> Result<Self> {
        for (name, set) in [("P", p_set), ("N", n_set), ("U", u_set)] {
            if set.len() < 2 {
                return Err(Error::data(format!(
                    "prior estimation needs at least 2 points in each set; {name} has {}",
                    set.len()
                )));
            }
        }
        if p_set.dim() != n_set.dim() || p_set.dim() != u_set.dim() {
            return Err(Error::data("prior estimation needs equal dimensions"));
        }
        Ok(PairwiseStats {
            a11: mean_within(p_set),
            a12: mean_cross(p_set, n_set),
            a22: mean_within(n_set),
            b1: mean_cross(p_set, u_set),
            b2: mean_cross(n_set, u_set),
            u_within: mean_within(u_set),
        })
    }

    /// Quadratic coefficient `a = -a11 + 2 a12 - a22`: the energy distance
    /// between the P and N samples, hence nonnegative.
    pub fn quadratic_coefficient(&self) -> f64 {
        -self.a11 + 2.0 * self.a12 - self.a22
    }

    /// Linear coefficient `b = -b1 + a12 + b2 - a22` of the quadratic
    /// `a beta^2 - 2 b beta + const`.
    pub fn linear_coefficient(&self) -> f64 {
        -self.b1 + self.a12 + self.b2 - self.a22
    }

    /// The empirical energy distance between `beta P + (1-beta) N` and the
    /// unlabeled sample:
    /// `2 E|x - y|_{q,U} - E|x - y|_{q,q} - E|x - y|_{U,U}`.
    pub fn energy_distance(&self, beta: f64) -> f64 {
        let cross = beta * self.b1 + (1.0 - beta) * self.b2;
        let within = beta * beta * self.a11
            + 2.0 * beta * (1.0 - beta) * self.a12
            + (1.0 - beta) * (1.0 - beta) * self.a22;
        2.0 * cross - within - self.u_within
    }
}

/// Estimated class prior with a degeneracy flag: when the P and N samples
/// are indistinguishable in energy distance every mixture weight minimizes,
/// and the estimate falls back to 0.5.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PriorEstimate {
    pub theta_hat: f64,
    pub degenerate: bool,
}

/// Minimizes the empirical energy distance over the mixture weight and
/// clamps it to [0, 1].
pub fn estimate_prior(
    p_set: &SampleSet,
    n_set: &SampleSet,
    u_set: &SampleSet,
) -> Result<PriorEstimate> {
    let stats = PairwiseStats::compute(p_set, n_set, u_set)?;
    Ok(estimate_from_stats(&stats))
}

/// Closed-form minimizer from precomputed statistics.
pub fn estimate_from_stats(stats: &PairwiseStats) -> PriorEstimate {
    let a = stats.quadratic_coefficient();
    let scale = 1.0 + stats.a11 + 2.0 * stats.a12 + stats.a22;
    if a <= 1e-12 * scale {
        return PriorEstimate {
            theta_hat: 0.5,
            degenerate: true,
        };
    }
    PriorEstimate {
        theta_hat: (stats.linear_coefficient() / a).clamp(0.0, 1.0),
        degenerate: false,
    }
}
