//! Linear-in-parameter decision functions over Gaussian-kernel or raw
//! feature bases.

use rand::seq::index;
use serde::{Deserialize, Serialize};

use crate::data::{seeded_rng, SampleSet, TripleDataset};
use crate::error::{Error, Result};

/// Basis for `g(x) = w . phi(x)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Basis {
    /// `phi_j(x) = exp(-|x - c_j|^2 / (2 sigma^2))`.
    GaussianKernel {
        centers: Vec<Vec<f64>>,
        bandwidth: f64,
    },
    /// `phi(x) = (x_1, ..., x_d, 1)`.
    RawLinearWithOffset { dim: usize },
}

impl Basis {
    pub fn gaussian(centers: Vec<Vec<f64>>, bandwidth: f64) -> Result<Basis> {
        if centers.is_empty() {
            return Err(Error::config("gaussian basis needs at least one center"));
        }
        if !(bandwidth.is_finite() && bandwidth > 0.0) {
            return Err(Error::config(format!(
                "gaussian bandwidth must be positive, got {bandwidth}"
            )));
        }
        let dim = centers[0].len();
        if centers.iter().any(|c| c.len() != dim) {
            return Err(Error::config("gaussian centers must share one dimension"));
        }
        Ok(Basis::GaussianKernel { centers, bandwidth })
    }

    pub fn raw_linear(dim: usize) -> Basis {
        Basis::RawLinearWithOffset { dim }
    }

    /// Number of basis functions.
    pub fn size(&self) -> usize {
        match self {
            Basis::GaussianKernel { centers, .. } => centers.len(),
            Basis::RawLinearWithOffset { dim } => dim + 1,
        }
    }

    /// Input dimension.
    pub fn dim(&self) -> usize {
        match self {
            Basis::GaussianKernel { centers, .. } => centers[0].len(),
            Basis::RawLinearWithOffset { dim } => *dim,
        }
    }

    pub fn featurize(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.dim(), "input dimension mismatch");
        match self {
            Basis::GaussianKernel { centers, bandwidth } => {
                let two_sigma_sq = 2.0 * bandwidth * bandwidth;
                centers
                    .iter()
                    .map(|c| {
                        let sq: f64 = x
                            .iter()
                            .zip(c.iter())
                            .map(|(a, b)| (a - b) * (a - b))
                            .sum();
                        (-sq / two_sigma_sq).exp()
                    })
                    .collect()
            }
            Basis::RawLinearWithOffset { .. } => {
                let mut phi = x.to_vec();
                phi.push(1.0);
                phi
            }
        }
    }
}

/// A trained decision function `g(x) = w . phi(x)`; classification is by the
/// sign of the decision value with ties going positive.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Classifier {
    pub basis: Basis,
    pub weights: Vec<f64>,
}

impl Classifier {
    pub fn new(basis: Basis, weights: Vec<f64>) -> Result<Classifier> {
        if weights.len() != basis.size() {
            return Err(Error::config(format!(
                "weight length {} does not match basis size {}",
                weights.len(),
                basis.size()
            )));
        }
        if weights.iter().any(|w| !w.is_finite()) {
            return Err(Error::config("weights must be finite"));
        }
        Ok(Classifier { basis, weights })
    }

    pub fn decision(&self, x: &[f64]) -> f64 {
        self.basis
            .featurize(x)
            .iter()
            .zip(self.weights.iter())
            .map(|(p, w)| p * w)
            .sum()
    }

    pub fn predict(&self, x: &[f64]) -> i8 {
        if self.decision(x) >= 0.0 {
            1
        } else {
            -1
        }
    }

    pub fn decisions(&self, set: &SampleSet) -> Vec<f64> {
        set.iter().map(|x| self.decision(x)).collect()
    }
}

/// Default bandwidth multipliers for the median heuristic.
pub const DEFAULT_BANDWIDTH_MULTIPLIERS: [f64; 6] = [0.125, 0.25, 0.5, 1.0, 1.5, 2.0];

/// Median of the pairwise Euclidean distances over i < j pairs.
pub fn median_pairwise_distance(points: &[Vec<f64>]) -> Result<f64> {
    if points.len() < 2 {
        return Err(Error::data(
            "median heuristic needs at least two points",
        ));
    }
    let mut dists = Vec::with_capacity(points.len() * (points.len() - 1) / 2);
    for i in 0..points.len() {
        for j in (i + 1)..points.len() {
            let sq: f64 = points[i]
                .iter()
                .zip(points[j].iter())
                .map(|(a, b)| (a - b) * (a - b))
                .sum();
            dists.push(sq.sqrt());
        }
    }
    dists.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mid = dists.len() / 2;
    let median = if dists.len() % 2 == 1 {
        dists[mid]
    } else {
        0.5 * (dists[mid - 1] + dists[mid])
    };
    if median <= 0.0 {
        return Err(Error::data(
            "degenerate geometry: median pairwise distance is zero",
        ));
    }
    Ok(median)
}

/// Bandwidth candidates: `multipliers x median(|x_i - x_j|)`.
pub fn median_bandwidths(points: &SampleSet, multipliers: &[f64]) -> Result<Vec<f64>> {
    let median = median_pairwise_distance(points.points())?;
    Ok(multipliers.iter().map(|m| m * median).collect())
}

/// Which points become Gaussian kernel centers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CenterSelection {
    /// Labeled points only (P then N).
    LabeledOnly,
    /// Every point of P, N, and U.
    AllPoints,
    /// Every point, or a seeded subsample when there are more than `cap`.
    Subsample { cap: usize, seed: u64 },
}

impl Default for CenterSelection {
    fn default() -> Self {
        // all points, capped for tractability on large pools
        CenterSelection::Subsample { cap: 500, seed: 0 }
    }
}

impl CenterSelection {
    pub fn centers(&self, data: &TripleDataset) -> Vec<Vec<f64>> {
        match *self {
            CenterSelection::LabeledOnly => data.labeled_points(),
            CenterSelection::AllPoints => data.all_points(),
            CenterSelection::Subsample { cap, seed } => {
                let all = data.all_points();
                if all.len() <= cap {
                    all
                } else {
                    let mut rng = seeded_rng(seed);
                    let mut idx = index::sample(&mut rng, all.len(), cap).into_vec();
                    idx.sort_unstable();
                    idx.into_iter().map(|i| all[i].clone()).collect()
                }
            }
        }
    }
}
