//! Sample sets, class priors, CSV ingestion, feature scaling, and the
//! synthetic / pool sampling protocols used by the experiments.
//!
//! All pseudo-randomness goes through ChaCha8 with explicit `u64` seeds so
//! that every draw replays bit-exactly.

use std::path::Path;

use rand::seq::index;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Derives a stream seed from a master seed and an index (splitmix64 mixing),
/// so independent trials replay deterministically.
pub fn derive_seed(master: u64, index: u64) -> u64 {
    let mut z = master ^ index.wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// An immutable collection of feature vectors sharing one dimension.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleSet {
    points: Vec<Vec<f64>>,
    dim: usize,
}

impl SampleSet {
    /// Builds a set from row vectors; every row must have length `dim` and
    /// finite coordinates.
    pub fn new(points: Vec<Vec<f64>>, dim: usize) -> Result<Self> {
        for (i, p) in points.iter().enumerate() {
            if p.len() != dim {
                return Err(Error::data(format!(
                    "point {i} has dimension {}, expected {dim}",
                    p.len()
                )));
            }
            if p.iter().any(|v| !v.is_finite()) {
                return Err(Error::data(format!("point {i} has a non-finite coordinate")));
            }
        }
        Ok(SampleSet { points, dim })
    }

    pub fn empty(dim: usize) -> Self {
        SampleSet {
            points: Vec::new(),
            dim,
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.points[i]
    }

    pub fn iter(&self) -> impl Iterator<Item = &[f64]> {
        self.points.iter().map(|p| p.as_slice())
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    /// Subset by indices (cloning the selected rows).
    pub fn select(&self, indices: &[usize]) -> SampleSet {
        SampleSet {
            points: indices.iter().map(|&i| self.points[i].clone()).collect(),
            dim: self.dim,
        }
    }
}

/// Probability that a random sample is positive, strictly inside (0, 1).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ClassPrior(f64);

impl ClassPrior {
    pub fn new(theta_p: f64) -> Result<Self> {
        if !(theta_p.is_finite() && theta_p > 0.0 && theta_p < 1.0) {
            return Err(Error::config(format!(
                "class prior must lie strictly inside (0, 1), got {theta_p}"
            )));
        }
        Ok(ClassPrior(theta_p))
    }

    pub fn theta_p(self) -> f64 {
        self.0
    }

    pub fn theta_n(self) -> f64 {
        1.0 - self.0
    }
}

/// The positive / negative / unlabeled sample sets together with the class
/// prior of the unlabeled marginal (when known or estimated).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TripleDataset {
    pub positives: SampleSet,
    pub negatives: SampleSet,
    pub unlabeled: SampleSet,
    pub prior: Option<ClassPrior>,
}

impl TripleDataset {
    pub fn new(
        positives: SampleSet,
        negatives: SampleSet,
        unlabeled: SampleSet,
        prior: Option<ClassPrior>,
    ) -> Result<Self> {
        let dim = positives.dim();
        if negatives.dim() != dim || unlabeled.dim() != dim {
            return Err(Error::data(format!(
                "set dimensions disagree: P={}, N={}, U={}",
                dim,
                negatives.dim(),
                unlabeled.dim()
            )));
        }
        Ok(TripleDataset {
            positives,
            negatives,
            unlabeled,
            prior,
        })
    }

    pub fn dim(&self) -> usize {
        self.positives.dim()
    }

    pub fn with_prior(mut self, prior: ClassPrior) -> Self {
        self.prior = Some(prior);
        self
    }

    /// The prior, or a configuration error when it was never supplied.
    pub fn require_prior(&self) -> Result<ClassPrior> {
        self.prior
            .ok_or_else(|| Error::config("class prior is unset; supply or estimate it"))
    }

    /// All points of P, N, and U in that order.
    pub fn all_points(&self) -> Vec<Vec<f64>> {
        let mut out =
            Vec::with_capacity(self.positives.len() + self.negatives.len() + self.unlabeled.len());
        out.extend(self.positives.iter().map(|p| p.to_vec()));
        out.extend(self.negatives.iter().map(|p| p.to_vec()));
        out.extend(self.unlabeled.iter().map(|p| p.to_vec()));
        out
    }

    /// Labeled points only (P then N).
    pub fn labeled_points(&self) -> Vec<Vec<f64>> {
        let mut out = Vec::with_capacity(self.positives.len() + self.negatives.len());
        out.extend(self.positives.iter().map(|p| p.to_vec()));
        out.extend(self.negatives.iter().map(|p| p.to_vec()));
        out
    }
}

/// Pool of labeled samples the experiment protocols draw from.
#[derive(Debug, Clone)]
pub struct LabeledPool {
    pub positives: SampleSet,
    pub negatives: SampleSet,
}

impl LabeledPool {
    pub fn new(positives: SampleSet, negatives: SampleSet) -> Result<Self> {
        if positives.dim() != negatives.dim() {
            return Err(Error::data(format!(
                "pool dimensions disagree: P={}, N={}",
                positives.dim(),
                negatives.dim()
            )));
        }
        Ok(LabeledPool {
            positives,
            negatives,
        })
    }
}

/// Loads a CSV with a header row into P/N/U sets keyed by the label column
/// (+1 positive, -1 negative, 0 unlabeled). The prior is left unset.
pub fn load_csv(path: impl AsRef<Path>, label_column: &str) -> Result<TripleDataset> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_path(path.as_ref())
        .map_err(|e| Error::data(format!("cannot open {}: {e}", path.as_ref().display())))?;

    let headers = reader
        .headers()
        .map_err(|e| Error::data(format!("cannot read header: {e}")))?
        .clone();
    if headers.is_empty() {
        // completely empty file: three empty zero-dimensional sets
        return TripleDataset::new(
            SampleSet::empty(0),
            SampleSet::empty(0),
            SampleSet::empty(0),
            None,
        );
    }
    let label_idx = headers
        .iter()
        .position(|h| h == label_column)
        .ok_or_else(|| Error::data(format!("label column '{label_column}' not found")))?;
    let dim = headers.len() - 1;

    let mut positives = Vec::new();
    let mut negatives = Vec::new();
    let mut unlabeled = Vec::new();

    for (rec_idx, record) in reader.records().enumerate() {
        let row = rec_idx + 1; // 1-based data row
        let record = record.map_err(|e| Error::Parse {
            row,
            message: e.to_string(),
        })?;
        if record.len() != headers.len() {
            return Err(Error::Parse {
                row,
                message: format!("expected {} columns, found {}", headers.len(), record.len()),
            });
        }
        let mut features = Vec::with_capacity(dim);
        let mut label = None;
        for (col, cell) in record.iter().enumerate() {
            let value: f64 = cell.trim().parse().map_err(|_| Error::Parse {
                row,
                message: format!("malformed numeric cell '{cell}' in column {col}"),
            })?;
            if col == label_idx {
                label = Some(value);
            } else {
                if !value.is_finite() {
                    return Err(Error::Parse {
                        row,
                        message: format!("non-finite feature value in column {col}"),
                    });
                }
                features.push(value);
            }
        }
        let label = label.expect("label column is within record bounds");
        if label == 1.0 {
            positives.push(features);
        } else if label == -1.0 {
            negatives.push(features);
        } else if label == 0.0 {
            unlabeled.push(features);
        } else {
            return Err(Error::Parse {
                row,
                message: format!("unknown label value {label}; expected +1, -1, or 0"),
            });
        }
    }

    TripleDataset::new(
        SampleSet::new(positives, dim)?,
        SampleSet::new(negatives, dim)?,
        SampleSet::new(unlabeled, dim)?,
        None,
    )
}

/// Per-coordinate affine map onto [0, 1], fitted on the pooled P, N, and U
/// samples. Serialized as `{"mins": [...], "maxs": [...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingRecord {
    pub mins: Vec<f64>,
    pub maxs: Vec<f64>,
}

impl ScalingRecord {
    /// Transforms a point with the stored map; constant coordinates go to 0.
    pub fn apply(&self, point: &[f64]) -> Vec<f64> {
        point
            .iter()
            .zip(self.mins.iter().zip(self.maxs.iter()))
            .map(|(&v, (&lo, &hi))| if hi > lo { (v - lo) / (hi - lo) } else { 0.0 })
            .collect()
    }

    fn apply_set(&self, set: &SampleSet) -> SampleSet {
        SampleSet {
            points: set.iter().map(|p| self.apply(p)).collect(),
            dim: set.dim(),
        }
    }
}

/// Rescales every feature to [0, 1] using min/max pooled over P, N, and U,
/// returning the scaled dataset and the record needed to transform future
/// test points identically.
pub fn scale_features(dataset: &TripleDataset) -> Result<(TripleDataset, ScalingRecord)> {
    let dim = dataset.dim();
    let total = dataset.positives.len() + dataset.negatives.len() + dataset.unlabeled.len();
    if total == 0 {
        return Err(Error::data("cannot fit a scaling record on an empty dataset"));
    }
    let mut mins = vec![f64::INFINITY; dim];
    let mut maxs = vec![f64::NEG_INFINITY; dim];
    for set in [&dataset.positives, &dataset.negatives, &dataset.unlabeled] {
        for p in set.iter() {
            for (j, &v) in p.iter().enumerate() {
                mins[j] = mins[j].min(v);
                maxs[j] = maxs[j].max(v);
            }
        }
    }
    let record = ScalingRecord { mins, maxs };
    let scaled = TripleDataset {
        positives: record.apply_set(&dataset.positives),
        negatives: record.apply_set(&dataset.negatives),
        unlabeled: record.apply_set(&dataset.unlabeled),
        prior: dataset.prior,
    };
    Ok((scaled, record))
}

/// Two unit-covariance Gaussians at `±separation/2` along the first axis:
/// P at the positive mean, N at the negative one, and U drawn by first
/// sampling a class from Bernoulli(theta_p). Deterministic per seed.
pub fn synth_gaussians(
    theta_p: f64,
    n_p: usize,
    n_n: usize,
    n_u: usize,
    separation: f64,
    dim: usize,
    seed: u64,
) -> Result<TripleDataset> {
    let prior = ClassPrior::new(theta_p)?;
    if dim == 0 {
        return Err(Error::config("dimension must be positive"));
    }
    let mut rng = seeded_rng(seed);
    let offset = separation / 2.0;
    let draw = |rng: &mut ChaCha8Rng, positive: bool| -> Vec<f64> {
        (0..dim)
            .map(|j| {
                let z: f64 = StandardNormal.sample(rng);
                if j == 0 {
                    z + if positive { offset } else { -offset }
                } else {
                    z
                }
            })
            .collect()
    };

    let positives: Vec<_> = (0..n_p).map(|_| draw(&mut rng, true)).collect();
    let negatives: Vec<_> = (0..n_n).map(|_| draw(&mut rng, false)).collect();
    let unlabeled: Vec<_> = (0..n_u)
        .map(|_| {
            let positive = rng.random::<f64>() < theta_p;
            draw(&mut rng, positive)
        })
        .collect();

    TripleDataset::new(
        SampleSet::new(positives, dim)?,
        SampleSet::new(negatives, dim)?,
        SampleSet::new(unlabeled, dim)?,
        Some(prior),
    )
}

/// Result of [`protocol_split`]: the drawn training triple plus the unused
/// remainder of the pool (the experiments draw validation and test samples
/// from the rest).
#[derive(Debug, Clone)]
pub struct ProtocolSplit {
    pub train: TripleDataset,
    pub rest: LabeledPool,
}

/// Draws `round(theta_l * n_l)` positives and the remaining negatives as the
/// labeled sets, then `n_u` unlabeled samples with class ratio `theta_u`
/// (labels discarded), disjoint from the labeled draw. The dataset prior is
/// set to `theta_u`.
pub fn protocol_split(
    pool: &LabeledPool,
    n_l: usize,
    theta_l: f64,
    n_u: usize,
    theta_u: f64,
    seed: u64,
) -> Result<ProtocolSplit> {
    let prior_u = ClassPrior::new(theta_u)?;
    if !(0.0..=1.0).contains(&theta_l) {
        return Err(Error::config(format!(
            "labeled class ratio must lie in [0, 1], got {theta_l}"
        )));
    }
    let n_lp = (theta_l * n_l as f64).round() as usize;
    let n_ln = n_l - n_lp.min(n_l);
    let n_up = (theta_u * n_u as f64).round() as usize;
    let n_un = n_u - n_up.min(n_u);

    let need_p = n_lp + n_up;
    let need_n = n_ln + n_un;
    if need_p > pool.positives.len() {
        return Err(Error::Capacity {
            class: "positive",
            requested: need_p,
            available: pool.positives.len(),
        });
    }
    if need_n > pool.negatives.len() {
        return Err(Error::Capacity {
            class: "negative",
            requested: need_n,
            available: pool.negatives.len(),
        });
    }

    let mut rng = seeded_rng(seed);
    let p_idx = index::sample(&mut rng, pool.positives.len(), pool.positives.len()).into_vec();
    let n_idx = index::sample(&mut rng, pool.negatives.len(), pool.negatives.len()).into_vec();

    let positives = pool.positives.select(&p_idx[..n_lp]);
    let negatives = pool.negatives.select(&n_idx[..n_ln]);
    let mut unlabeled: Vec<Vec<f64>> = p_idx[n_lp..n_lp + n_up]
        .iter()
        .map(|&i| pool.positives.point(i).to_vec())
        .collect();
    unlabeled.extend(
        n_idx[n_ln..n_ln + n_un]
            .iter()
            .map(|&i| pool.negatives.point(i).to_vec()),
    );

    let rest = LabeledPool {
        positives: pool.positives.select(&p_idx[need_p..]),
        negatives: pool.negatives.select(&n_idx[need_n..]),
    };
    let train = TripleDataset::new(
        positives,
        negatives,
        SampleSet::new(unlabeled, pool.positives.dim())?,
        Some(prior_u),
    )?;
    Ok(ProtocolSplit { train, rest })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn write_csv(content: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(content.as_bytes()).unwrap();
        f
    }

    #[test]
    fn load_csv_partitions_by_label() {
        let f = write_csv("x1,x2,label\n1.0,2.0,1\n3.0,4.0,-1\n5.0,6.0,0\n7.0,8.0,0\n");
        let data = load_csv(f.path(), "label").unwrap();
        assert_eq!(data.positives.len(), 1);
        assert_eq!(data.negatives.len(), 1);
        assert_eq!(data.unlabeled.len(), 2);
        assert_eq!(data.dim(), 2);
        assert_eq!(data.positives.point(0), &[1.0, 2.0]);
        assert!(data.prior.is_none());
    }

    #[test]
    fn load_csv_rejects_unknown_label_with_row() {
        let f = write_csv("x,label\n1.0,1\n2.0,2\n");
        match load_csv(f.path(), "label") {
            Err(Error::Parse { row, .. }) => assert_eq!(row, 2),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn load_csv_rejects_malformed_cell_with_row() {
        let f = write_csv("x,label\nabc,1\n");
        match load_csv(f.path(), "label") {
            Err(Error::Parse { row, message }) => {
                assert_eq!(row, 1);
                assert!(message.contains("abc"));
            }
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn load_csv_rejects_ragged_rows() {
        let f = write_csv("x,y,label\n1.0,2.0,1\n1.0,1\n");
        match load_csv(f.path(), "label") {
            Err(Error::Parse { row, .. }) => assert_eq!(row, 2),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn load_csv_empty_file_gives_empty_sets() {
        let f = write_csv("");
        let data = load_csv(f.path(), "label").unwrap();
        assert!(data.positives.is_empty());
        assert!(data.negatives.is_empty());
        assert!(data.unlabeled.is_empty());
    }

    #[test]
    fn scaling_maps_to_unit_interval() {
        let data = TripleDataset::new(
            SampleSet::new(vec![vec![2.0, 3.0]], 2).unwrap(),
            SampleSet::new(vec![vec![4.0, 3.0]], 2).unwrap(),
            SampleSet::new(vec![vec![6.0, 3.0]], 2).unwrap(),
            None,
        )
        .unwrap();
        let (scaled, record) = scale_features(&data).unwrap();
        assert_eq!(scaled.positives.point(0), &[0.0, 0.0]);
        assert_eq!(scaled.negatives.point(0), &[0.5, 0.0]);
        assert_eq!(scaled.unlabeled.point(0), &[1.0, 0.0]);
        // record reuse on a fresh point
        assert_eq!(record.apply(&[4.0, 9.0]), vec![0.5, 0.0]);
    }

    #[test]
    fn scaling_record_serializes_as_min_max() {
        let record = ScalingRecord {
            mins: vec![0.0, 1.0],
            maxs: vec![2.0, 1.0],
        };
        let json = serde_json::to_value(&record).unwrap();
        assert_eq!(json["mins"][1], 1.0);
        assert_eq!(json["maxs"][0], 2.0);
    }

    #[test]
    fn scaled_dataset_lies_in_unit_cube() {
        let data = synth_gaussians(0.4, 30, 30, 40, 3.0, 3, 11).unwrap();
        let (scaled, _) = scale_features(&data).unwrap();
        for set in [&scaled.positives, &scaled.negatives, &scaled.unlabeled] {
            for p in set.iter() {
                assert!(p.iter().all(|&v| (0.0..=1.0).contains(&v)));
            }
        }
    }

    #[test]
    fn synth_means_concentrate() {
        let data = synth_gaussians(0.5, 100, 100, 0, 10.0, 2, 7).unwrap();
        assert!(data.unlabeled.is_empty());
        let mean = |set: &SampleSet, j: usize| {
            set.iter().map(|p| p[j]).sum::<f64>() / set.len() as f64
        };
        // sample-mean concentration: within 3/sqrt(100)
        assert!((mean(&data.positives, 0) - 5.0).abs() < 0.3);
        assert!((mean(&data.negatives, 0) + 5.0).abs() < 0.3);
        assert!(mean(&data.positives, 1).abs() < 0.3);
    }

    #[test]
    fn synth_unlabeled_matches_mixture_mass() {
        let data = synth_gaussians(0.7, 0, 0, 10_000, 4.0, 1, 1).unwrap();
        let frac_positive = data
            .unlabeled
            .iter()
            .filter(|p| p[0] > 0.0)
            .count() as f64
            / 10_000.0;
        // Phi(2) for the standard normal, frozen from tables
        let phi2 = 0.977_249_868_051_821;
        let expected = 0.7 * phi2 + 0.3 * (1.0 - phi2);
        assert!(
            (frac_positive - expected).abs() < 0.02,
            "got {frac_positive}, expected {expected}"
        );
    }

    #[test]
    fn synth_class_frequency_converges_to_prior() {
        let data = synth_gaussians(0.7, 0, 0, 100_000, 8.0, 1, 5).unwrap();
        // with separation 8 the sign of the first axis recovers the class
        let frac = data.unlabeled.iter().filter(|p| p[0] > 0.0).count() as f64 / 100_000.0;
        assert!((frac - 0.7).abs() < 0.01);
    }

    #[test]
    fn synth_is_deterministic() {
        let a = synth_gaussians(0.5, 10, 10, 10, 2.0, 2, 42).unwrap();
        let b = synth_gaussians(0.5, 10, 10, 10, 2.0, 2, 42).unwrap();
        assert_eq!(a, b);
    }

    fn grid_pool(n_p: usize, n_n: usize) -> LabeledPool {
        let p: Vec<_> = (0..n_p).map(|i| vec![i as f64, 1.0]).collect();
        let n: Vec<_> = (0..n_n).map(|i| vec![i as f64, -1.0]).collect();
        LabeledPool::new(
            SampleSet::new(p, 2).unwrap(),
            SampleSet::new(n, 2).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn protocol_split_rounds_class_counts() {
        let pool = grid_pool(50, 50);
        let split = protocol_split(&pool, 20, 0.7, 10, 0.5, 3).unwrap();
        assert_eq!(split.train.positives.len(), 14);
        assert_eq!(split.train.negatives.len(), 6);
        assert_eq!(split.train.unlabeled.len(), 10);
        assert_eq!(split.train.prior.unwrap().theta_p(), 0.5);

        let split = protocol_split(&pool, 10, 0.5, 0, 0.5, 3).unwrap();
        assert_eq!(split.train.positives.len(), 5);
        assert_eq!(split.train.negatives.len(), 5);
    }

    #[test]
    fn protocol_split_capacity_error_names_class() {
        let pool = grid_pool(5, 50);
        match protocol_split(&pool, 20, 0.7, 0, 0.5, 3) {
            Err(Error::Capacity { class, .. }) => assert_eq!(class, "positive"),
            other => panic!("expected capacity error, got {other:?}"),
        }
    }

    #[test]
    fn protocol_split_draws_are_disjoint() {
        let pool = grid_pool(30, 30);
        let split = protocol_split(&pool, 20, 0.5, 20, 0.5, 9).unwrap();
        let mut seen: Vec<Vec<u64>> = Vec::new();
        let mut check = |points: &SampleSet| {
            for p in points.iter() {
                let key: Vec<u64> = p.iter().map(|v| v.to_bits()).collect();
                assert!(!seen.contains(&key), "duplicate draw {p:?}");
                seen.push(key);
            }
        };
        check(&split.train.positives);
        check(&split.train.negatives);
        check(&split.train.unlabeled);
        check(&split.rest.positives);
        check(&split.rest.negatives);
        // every pool row accounted for exactly once
        assert_eq!(seen.len(), 60);
    }

    #[test]
    fn derive_seed_spreads_indices() {
        let a = derive_seed(1, 0);
        let b = derive_seed(1, 1);
        let c = derive_seed(2, 0);
        assert_ne!(a, b);
        assert_ne!(a, c);
        assert_eq!(a, derive_seed(1, 0));
    }
}
