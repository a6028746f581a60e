//! Resampling experiments: the variance-ratio and validation-ratio analyses
//! and the benchmark-style method comparison. Every trial derives its own
//! sub-seed from the master seed, so reports replay bit-exactly from their
//! config echo.

use std::time::Instant;

use rand::seq::index;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::data::{
    derive_seed, load_csv, protocol_split, seeded_rng, ClassPrior, LabeledPool, SampleSet,
    TripleDataset,
};
use crate::error::{Error, Result};
use crate::loss::Loss;
use crate::model::{CenterSelection, Classifier};
use crate::risk::{build_pnu, PnuMode, RiskFamily, RiskSpec, SampleSource};
use crate::selection::{cross_validate, eta_bar, refit,CvConfig, Grid, ValidationScore};
use crate::solver::{train_closed_form_cached, FeatureMoments};
use crate::theory::optimal_eta;

/// Where a run draws its samples.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DataSource {
    /// Two unit-covariance Gaussians at `±separation/2` along the first
    /// axis; effectively an infinite pool.
    Synthetic { separation: f64, dim: usize },
    /// A labeled CSV pool; rows are consumed without replacement per trial.
    Csv { path: String, label_column: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub source: DataSource,
    pub trials: usize,
    pub seed: u64,
    /// Labeled training draw: size and class ratio.
    pub n_labeled: usize,
    pub theta_labeled: f64,
    /// Class prior of unlabeled, validation, and test draws.
    pub theta_unlabeled: f64,
    /// Unlabeled training size (benchmark comparison).
    pub n_unlabeled: usize,
    /// Validation draw sizes; the unlabeled size sweeps.
    pub n_p_val: usize,
    pub n_n_val: usize,
    pub n_u_val_sweep: Vec<usize>,
    /// Validation resamples per sweep point in the variance experiment.
    pub resamples: usize,
    pub n_test: usize,
    pub grid: Grid,
    pub k: usize,
    pub centers: CenterSelection,
}

impl ExperimentConfig {
    /// Desk-scale defaults on overlapping synthetic Gaussians.
    pub fn desk(theta_unlabeled: f64) -> Self {
        ExperimentConfig {
            source: DataSource::Synthetic {
                separation: 2.0,
                dim: 2,
            },
            trials: 20,
            seed: 1,
            n_labeled: 20,
            theta_labeled: 0.5,
            theta_unlabeled,
            n_unlabeled: 300,
            n_p_val: 10,
            n_n_val: 10,
            n_u_val_sweep: vec![10, 50, 100, 300],
            resamples: 400,
            n_test: 10_000,
            grid: Grid::desk(),
            k: 5,
            centers: CenterSelection::Subsample { cap: 60, seed: 0 },
        }
    }

    fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::config("experiments need at least one trial"));
        }
        if self.n_u_val_sweep.is_empty() {
            return Err(Error::config("the unlabeled validation sweep is empty"));
        }
        self.grid.validate()
    }
}

/// Mean and standard error of one measured setting across trials.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SettingReport {
    pub label: String,
    pub mean: f64,
    pub std_error: f64,
    /// True when a single trial makes the standard error undefined (it is
    /// then reported as 0).
    pub se_degenerate: bool,
    pub per_trial: Vec<f64>,
    pub wall_clock_secs: Option<f64>,
}

impl SettingReport {
    fn from_values(label: String, values: Vec<f64>, wall_clock_secs: Option<f64>) -> Self {
        let n = values.len();
        let mean = values.iter().sum::<f64>() / n as f64;
        let (std_error, se_degenerate) = if n > 1 {
            let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>()
                / (n - 1) as f64;
            ((var / n as f64).sqrt(), false)
        } else {
            (0.0, true)
        };
        SettingReport {
            label,
            mean,
            std_error,
            se_degenerate,
            per_trial: values,
            wall_clock_secs,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub experiment: String,
    pub config: ExperimentConfig,
    pub settings: Vec<SettingReport>,
    /// Per-trial failures that were recorded and skipped.
    pub skipped: Vec<String>,
}

impl ExperimentReport {
    /// Plot-ready long format: `setting,trial,value`.
    pub fn to_long_csv(&self) -> String {
        let mut out = String::from("setting,trial,value\n");
        for setting in &self.settings {
            for (trial, value) in setting.per_trial.iter().enumerate() {
                out.push_str(&format!("{},{},{}\n", setting.label, trial, value));
            }
        }
        out
    }
}

/// Per-trial sample source: an endless generator for synthetic data, or
/// consumable shuffled queues over a finite pool.
#[allow(clippy::large_enum_variant)]
pub enum TrialSampler<'a> {
    Synthetic {
        separation: f64,
        dim: usize,
        rng: ChaCha8Rng,
    },
    Pool {
        pool: &'a LabeledPool,
        p_queue: Vec<usize>,
        n_queue: Vec<usize>,
    },
}

impl<'a> TrialSampler<'a> {
    pub fn synthetic(separation: f64, dim: usize, seed: u64) -> TrialSampler<'static> {
        TrialSampler::Synthetic {
            separation,
            dim,
            rng: seeded_rng(seed),
        }
    }

    pub fn pool(pool: &'a LabeledPool, seed: u64) -> TrialSampler<'a> {
        let mut rng = seeded_rng(seed);
        TrialSampler::Pool {
            p_queue: index::sample(&mut rng, pool.positives.len(), pool.positives.len())
                .into_vec(),
            n_queue: index::sample(&mut rng, pool.negatives.len(), pool.negatives.len())
                .into_vec(),
            pool,
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            TrialSampler::Synthetic { dim, .. } => *dim,
            TrialSampler::Pool { pool, .. } => pool.positives.dim(),
        }
    }

    fn draw_class(&mut self, positive: bool, n: usize) -> Result<Vec<Vec<f64>>> {
        match self {
            TrialSampler::Synthetic {
                separation,
                dim,
                rng,
            } => {
                let offset = if positive { *separation } else { -*separation } / 2.0;
                Ok((0..n)
                    .map(|_| {
                        (0..*dim)
                            .map(|j| {
                                let z: f64 = StandardNormal.sample(rng);
                                if j == 0 {
                                    z + offset
                                } else {
                                    z
                                }
                            })
                            .collect()
                    })
                    .collect())
            }
            TrialSampler::Pool { pool, p_queue, n_queue } => {
                let (queue, set, class) = if positive {
                    (p_queue, &pool.positives, "positive")
                } else {
                    (n_queue, &pool.negatives, "negative")
                };
                if queue.len() < n {
                    return Err(Error::Capacity {
                        class,
                        requested: n,
                        available: queue.len(),
                    });
                }
                Ok(queue
                    .drain(..n)
                    .map(|i| set.point(i).to_vec())
                    .collect())
            }
        }
    }

    /// Labeled draw with `round(theta * n)` positives.
    #[allow(clippy::type_complexity)]
    pub fn draw_labeled(&mut self, n: usize, theta: f64) -> Result<(Vec<Vec<f64>>, Vec<Vec<f64>>)> {
        let n_p = (theta * n as f64).round() as usize;
        Ok((self.draw_class(true, n_p)?, self.draw_class(false, n - n_p)?))
    }

    /// Unlabeled draw: synthetic sources sample each class from
    /// Bernoulli(theta) (an i.i.d. draw from the marginal), finite pools use
    /// rounded counts.
    pub fn draw_unlabeled(&mut self, n: usize, theta: f64) -> Result<Vec<Vec<f64>>> {
        match self {
            TrialSampler::Synthetic { rng, .. } => {
                let flips: Vec<bool> = (0..n).map(|_| rng.random::<f64>() < theta).collect();
                flips.into_iter().map(|f| Ok(self.draw_class(f, 1)?.pop().unwrap())).collect()
            }
            TrialSampler::Pool { .. } => {
                let n_p = (theta * n as f64).round() as usize;
                let mut points = self.draw_class(true, n_p)?;
                points.extend(self.draw_class(false, n - n_p)?);
                Ok(points)
            }
        }
    }

    /// Labeled test draw at the given prior (rounded counts), as
    /// (point, label) pairs.
    pub fn draw_test(&mut self, n: usize, theta: f64) -> Result<Vec<(Vec<f64>, i8)>> {
        let n_p = (theta * n as f64).round() as usize;
        let mut out: Vec<(Vec<f64>, i8)> = self
            .draw_class(true, n_p)?
            .into_iter()
            .map(|p| (p, 1))
            .collect();
        out.extend(self.draw_class(false, n - n_p)?.into_iter().map(|p| (p, -1)));
        Ok(out)
    }
}

enum SourceData {
    Synthetic { separation: f64, dim: usize },
    Pool(LabeledPool),
}

impl SourceData {
    fn load(source: &DataSource) -> Result<SourceData> {
        match source {
            DataSource::Synthetic { separation, dim } => Ok(SourceData::Synthetic {
                separation: *separation,
                dim: *dim,
            }),
            DataSource::Csv { path, label_column } => {
                let data = load_csv(path, label_column)?;
                if !data.unlabeled.is_empty() {
                    return Err(Error::data(
                        "experiment pools must be fully labeled (no label-0 rows)",
                    ));
                }
                Ok(SourceData::Pool(LabeledPool::new(
                    data.positives,
                    data.negatives,
                )?))
            }
        }
    }

    fn sampler(&self, seed: u64) -> TrialSampler<'_> {
        match self {
            SourceData::Synthetic { separation, dim } => {
                TrialSampler::synthetic(*separation, *dim, seed)
            }
            SourceData::Pool(pool) => TrialSampler::pool(pool, seed),
        }
    }
}

/// The four empirical risk atoms of one draw: mean loss over P at positive
/// margins, over N at negative margins, and over U at both margin signs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RiskComponents {
    pub p_plus: f64,
    pub n_minus: f64,
    pub u_plus: f64,
    pub u_minus: f64,
}

/// Computes the risk atoms of a fixed classifier under one loss. Empty sets
/// yield NaN atoms, which [`combine_components`] rejects if referenced.
pub fn risk_components(
    loss: Loss,
    classifier: &Classifier,
    p_points: &[Vec<f64>],
    n_points: &[Vec<f64>],
    u_points: &[Vec<f64>],
) -> RiskComponents {
    let mean = |points: &[Vec<f64>], sign: f64| -> f64 {
        if points.is_empty() {
            return f64::NAN;
        }
        points
            .iter()
            .map(|x| loss.evaluate(sign * classifier.decision(x)))
            .sum::<f64>()
            / points.len() as f64
    };
    RiskComponents {
        p_plus: mean(p_points, 1.0),
        n_minus: mean(n_points, -1.0),
        u_plus: mean(u_points, 1.0),
        u_minus: mean(u_points, -1.0),
    }
}

/// Evaluates a spec from precomputed atoms; the atoms must have been
/// computed with the spec's loss. Only the four standard (source, sign)
/// combinations are supported.
pub fn combine_components(spec: &RiskSpec, components: &RiskComponents) -> Result<f64> {
    use crate::risk::MarginSign;
    let mut total = spec.constant;
    for term in &spec.terms {
        let atom = match (term.source, term.sign) {
            (SampleSource::Positive, MarginSign::Plus) => components.p_plus,
            (SampleSource::Negative, MarginSign::Minus) => components.n_minus,
            (SampleSource::Unlabeled, MarginSign::Plus) => components.u_plus,
            (SampleSource::Unlabeled, MarginSign::Minus) => components.u_minus,
            (source, _) => {
                return Err(Error::Evaluation(format!(
                    "no precomputed atom for this (source, sign) on {source:?}"
                )))
            }
        };
        if atom.is_nan() {
            return Err(Error::Evaluation(
                "a referenced sample set was empty in this draw".into(),
            ));
        }
        total += term.weight * atom;
    }
    Ok(total)
}

pub fn misclassification_rate(classifier: &Classifier, test: &[(Vec<f64>, i8)]) -> f64 {
    let wrong = test
        .iter()
        .filter(|(x, y)| classifier.predict(x) != *y)
        .count();
    wrong as f64 / test.len() as f64
}

fn sample_variance(values: &[f64]) -> f64 {
    let n = values.len();
    let mean = values.iter().sum::<f64>() / n as f64;
    values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1) as f64
}

/// Pooled standard deviation accumulator (denominator n-1).
#[derive(Default)]
struct PooledStd {
    sum: f64,
    sum_sq: f64,
    count: usize,
}

impl PooledStd {
    fn add(&mut self, value: f64) {
        self.sum += value;
        self.sum_sq += value * value;
        self.count += 1;
    }

    fn std(&self) -> f64 {
        if self.count < 2 {
            return 0.0;
        }
        let n = self.count as f64;
        let var = (self.sum_sq - self.sum * self.sum / n) / (n - 1.0);
        var.max(0.0).sqrt()
    }
}

fn train_pn_by_cv(
    train: &TripleDataset,
    config: &ExperimentConfig,
) -> Result<Classifier> {
    let k = config
        .k
        .min(train.positives.len())
        .min(train.negatives.len())
        .max(2);
    let cv = CvConfig {
        family: RiskFamily::Pn,
        loss: Loss::ScaledSquared,
        k,
        seed: derive_seed(config.seed, 0xCF),
        score: ValidationScore::PnZeroOne,
        centers: CenterSelection::LabeledOnly,
        raw_linear_basis: false,
        pnu_mode: PnuMode::Convex,
    };
    let report = cross_validate(train, &config.grid, &cv)?;
    refit(train, &cv, &report.chosen)
}

/// Variance-ratio experiment: per trial a PN classifier is tuned by k-fold
/// cross-validation on a small labeled draw, then held fixed while
/// validation sets are resampled; the report tracks
/// `Var[PNU risk at eta_hat] / Var[PN risk]` per unlabeled validation size,
/// with `eta_hat` set from the per-class loss deviations pooled over the
/// resamples.
pub fn run_variance_ratio(config: &ExperimentConfig) -> Result<ExperimentReport> {
    config.validate()?;
    let source = SourceData::load(&config.source)?;
    let prior = ClassPrior::new(config.theta_unlabeled)?;
    let mut buckets: Vec<Vec<f64>> = vec![Vec::new(); config.n_u_val_sweep.len()];
    let mut skipped = Vec::new();

    for trial in 0..config.trials {
        let trial_seed = derive_seed(config.seed, trial as u64);
        let outcome = (|| -> Result<Vec<f64>> {
            let mut sampler = source.sampler(trial_seed);
            let (p_train, n_train) =
                sampler.draw_labeled(config.n_labeled, config.theta_labeled)?;
            let dim = sampler.dim();
            let train = TripleDataset::new(
                SampleSet::new(p_train, dim)?,
                SampleSet::new(n_train, dim)?,
                SampleSet::empty(dim),
                Some(prior),
            )?;
            let classifier = train_pn_by_cv(&train, config)?;

            let mut ratios = Vec::with_capacity(config.n_u_val_sweep.len());
            for &n_u_val in &config.n_u_val_sweep {
                let mut components = Vec::with_capacity(config.resamples);
                let mut p_losses = PooledStd::default();
                let mut n_losses = PooledStd::default();
                for _ in 0..config.resamples {
                    let p_val = sampler.draw_class(true, config.n_p_val)?;
                    let n_val = sampler.draw_class(false, config.n_n_val)?;
                    let u_val = sampler.draw_unlabeled(n_u_val, config.theta_unlabeled)?;
                    for x in &p_val {
                        p_losses.add(Loss::ZeroOne.evaluate(classifier.decision(x)));
                    }
                    for x in &n_val {
                        n_losses.add(Loss::ZeroOne.evaluate(-classifier.decision(x)));
                    }
                    components.push(risk_components(
                        Loss::ZeroOne,
                        &classifier,
                        &p_val,
                        &n_val,
                        &u_val,
                    ));
                }
                let sigma_p = p_losses.std();
                let sigma_n = n_losses.std();
                let psi_p =
                    prior.theta_p().powi(2) * sigma_p * sigma_p / config.n_p_val as f64;
                let psi_n =
                    prior.theta_n().powi(2) * sigma_n * sigma_n / config.n_n_val as f64;
                let eta_hat = optimal_eta(psi_p, psi_n);

                let pn_spec = build_pnu(0.0, prior, Loss::ZeroOne, PnuMode::NonConvex)?;
                let pnu_spec = build_pnu(eta_hat, prior, Loss::ZeroOne, PnuMode::NonConvex)?;
                let pn_values: Vec<f64> = components
                    .iter()
                    .map(|c| combine_components(&pn_spec, c))
                    .collect::<Result<_>>()?;
                let pnu_values: Vec<f64> = components
                    .iter()
                    .map(|c| combine_components(&pnu_spec, c))
                    .collect::<Result<_>>()?;
                let var_pn = sample_variance(&pn_values);
                if var_pn <= 0.0 {
                    return Err(Error::data(
                        "degenerate PN risk variance in a trial (classifier is exact)",
                    ));
                }
                ratios.push(sample_variance(&pnu_values) / var_pn);
            }
            Ok(ratios)
        })();
        match outcome {
            Ok(ratios) => {
                for (bucket, ratio) in buckets.iter_mut().zip(ratios) {
                    bucket.push(ratio);
                }
            }
            Err(e) => skipped.push(format!("trial {trial}: {e}")),
        }
    }

    if buckets[0].is_empty() {
        return Err(Error::data("every variance-ratio trial failed"));
    }
    let settings = config
        .n_u_val_sweep
        .iter()
        .zip(buckets)
        .map(|(&n, values)| {
            SettingReport::from_values(format!("n_u_val={n}"), values, None)
        })
        .collect();
    Ok(ExperimentReport {
        experiment: "variance_ratio".into(),
        config: config.clone(),
        settings,
        skipped,
    })
}

/// Validation-ratio experiment: identical candidate classifiers are tuned
/// once with the PN validation score and once with the PNU score at
/// `eta_bar`; the report tracks the test-error ratio (PNU-selected over
/// PN-selected) per unlabeled validation size.
pub fn run_validation_ratio(config: &ExperimentConfig) -> Result<ExperimentReport> {
    config.validate()?;
    let source = SourceData::load(&config.source)?;
    let prior = ClassPrior::new(config.theta_unlabeled)?;
    let eta = eta_bar(prior, config.n_p_val, config.n_n_val)?;
    let mut buckets: Vec<Vec<f64>> = vec![Vec::new(); config.n_u_val_sweep.len()];
    let mut skipped = Vec::new();

    for trial in 0..config.trials {
        let trial_seed = derive_seed(config.seed, trial as u64);
        let outcome = (|| -> Result<Vec<f64>> {
            let mut sampler = source.sampler(trial_seed);
            let dim = sampler.dim();
            let (p_train, n_train) =
                sampler.draw_labeled(config.n_labeled, config.theta_labeled)?;
            let train = TripleDataset::new(
                SampleSet::new(p_train, dim)?,
                SampleSet::new(n_train, dim)?,
                SampleSet::empty(dim),
                Some(prior),
            )?;

            // candidate classifiers all trained on the same PN risk
            let all_points = SampleSet::new(train.all_points(), dim)?;
            let bandwidths = crate::model::median_bandwidths(
                &all_points,
                &config.grid.bandwidth_multipliers,
            )?;
            let pn_spec = crate::risk::build_base(
                RiskFamily::Pn,
                prior,
                Loss::ScaledSquared,
            )?;
            let mut candidates = Vec::new();
            for &bw in &bandwidths {
                let basis =
                    crate::model::Basis::gaussian(CenterSelection::LabeledOnly.centers(&train), bw)?;
                let moments = FeatureMoments::new(&train, &basis);
                for &lambda in &config.grid.lambdas {
                    candidates.push(((lambda, bw), train_closed_form_cached(&pn_spec, &moments, lambda)?));
                }
            }

            let test = sampler.draw_test(config.n_test, config.theta_unlabeled)?;
            let mut ratios = Vec::with_capacity(config.n_u_val_sweep.len());
            for &n_u_val in &config.n_u_val_sweep {
                let p_val = SampleSet::new(sampler.draw_class(true, config.n_p_val)?, dim)?;
                let n_val = SampleSet::new(sampler.draw_class(false, config.n_n_val)?, dim)?;
                let u_val = SampleSet::new(
                    sampler.draw_unlabeled(n_u_val, config.theta_unlabeled)?,
                    dim,
                )?;
                let validation =
                    TripleDataset::new(p_val, n_val, u_val, Some(prior))?;

                let select = |eta_score: f64| -> Result<&Classifier> {
                    let mut best: Option<(f64, (f64, f64), &Classifier)> = None;
                    for ((lambda, bw), classifier) in &candidates {
                        let score = crate::risk::evaluate_zero_one_pnu(
                            eta_score,
                            prior,
                            &validation,
                            classifier,
                        )?;
                        // ties broken toward larger lambda, then smaller
                        // bandwidth, matching the fold-based selector
                        let better = match &best {
                            None => true,
                            Some((s, (l, b), _)) => {
                                score < *s
                                    || (score == *s
                                        && (lambda > l || (lambda == l && bw < b)))
                            }
                        };
                        if better {
                            best = Some((score, (*lambda, *bw), classifier));
                        }
                    }
                    Ok(best.unwrap().2)
                };

                let pn_choice = select(0.0)?;
                let pnu_choice = select(eta)?;
                let pn_err = misclassification_rate(pn_choice, &test);
                let pnu_err = misclassification_rate(pnu_choice, &test);
                if pn_err == 0.0 {
                    if pnu_err == 0.0 {
                        ratios.push(1.0);
                    } else {
                        return Err(Error::data("PN-selected error is exactly zero"));
                    }
                } else {
                    ratios.push(pnu_err / pn_err);
                }
            }
            Ok(ratios)
        })();
        match outcome {
            Ok(ratios) => {
                for (bucket, ratio) in buckets.iter_mut().zip(ratios) {
                    bucket.push(ratio);
                }
            }
            Err(e) => skipped.push(format!("trial {trial}: {e}")),
        }
    }

    if buckets[0].is_empty() {
        return Err(Error::data("every validation-ratio trial failed"));
    }
    let settings = config
        .n_u_val_sweep
        .iter()
        .zip(buckets)
        .map(|(&n, values)| {
            SettingReport::from_values(format!("n_u_val={n}"), values, None)
        })
        .collect();
    Ok(ExperimentReport {
        experiment: "validation_ratio".into(),
        config: config.clone(),
        settings,
        skipped,
    })
}

/// Benchmark-style comparison: per trial the protocol split draws labeled
/// and unlabeled training data, three methods (PNU, convex PUNU with the
/// squared loss, and a PN-only baseline) are each tuned by k-fold
/// cross-validation, and their test errors are reported with per-method
/// wall-clock time.
pub fn run_benchmark_compare(config: &ExperimentConfig) -> Result<ExperimentReport> {
    config.validate()?;
    let source = SourceData::load(&config.source)?;
    ClassPrior::new(config.theta_unlabeled)?;
    let methods = ["pnu", "punu", "pn"];
    let mut errors: Vec<Vec<f64>> = vec![Vec::new(); methods.len()];
    let mut clocks = vec![0.0f64; methods.len()];
    let mut skipped = Vec::new();

    for trial in 0..config.trials {
        let trial_seed = derive_seed(config.seed, trial as u64);
        let outcome = (|| -> Result<Vec<f64>> {
            // assemble a labeled pool for the protocol split
            let n_lp = (config.theta_labeled * config.n_labeled as f64).round() as usize;
            let n_up = (config.theta_unlabeled * config.n_unlabeled as f64).round() as usize;
            let need_p = n_lp + n_up;
            let need_n = (config.n_labeled - n_lp) + (config.n_unlabeled - n_up);
            let mut sampler = source.sampler(trial_seed);
            let dim = sampler.dim();
            let pool = LabeledPool::new(
                SampleSet::new(sampler.draw_class(true, need_p)?, dim)?,
                SampleSet::new(sampler.draw_class(false, need_n)?, dim)?,
            )?;
            let split = protocol_split(
                &pool,
                config.n_labeled,
                config.theta_labeled,
                config.n_unlabeled,
                config.theta_unlabeled,
                derive_seed(trial_seed, 0x51),
            )?;
            let train = split.train;
            let test = sampler.draw_test(config.n_test, config.theta_unlabeled)?;

            let k = config
                .k
                .min(train.positives.len())
                .min(train.negatives.len())
                .max(2);
            let run_method = |family: RiskFamily, score: ValidationScore| -> Result<f64> {
                let cv = CvConfig {
                    family,
                    loss: Loss::ScaledSquared,
                    k,
                    seed: derive_seed(trial_seed, 0xC0),
                    score,
                    centers: config.centers,
                    raw_linear_basis: false,
                    pnu_mode: PnuMode::Convex,
                };
                let report = cross_validate(&train, &config.grid, &cv)?;
                let classifier = refit(&train, &cv, &report.chosen)?;
                Ok(misclassification_rate(&classifier, &test))
            };

            let mut results = Vec::with_capacity(3);
            for (i, (family, score)) in [
                (RiskFamily::Pnu, ValidationScore::PnuAtEtaBar),
                (RiskFamily::CPunu, ValidationScore::PunuAtGammaBar),
                (RiskFamily::Pn, ValidationScore::PnZeroOne),
            ]
            .into_iter()
            .enumerate()
            {
                let start = Instant::now();
                let err = run_method(family, score)?;
                clocks[i] += start.elapsed().as_secs_f64();
                results.push(err);
            }
            Ok(results)
        })();
        match outcome {
            Ok(results) => {
                for (bucket, err) in errors.iter_mut().zip(results) {
                    bucket.push(err);
                }
            }
            Err(e) => skipped.push(format!("trial {trial}: {e}")),
        }
    }

    if errors[0].is_empty() {
        return Err(Error::data("every benchmark trial failed"));
    }
    let settings = methods
        .iter()
        .zip(errors)
        .zip(clocks)
        .map(|((name, values), secs)| {
            SettingReport::from_values((*name).into(), values, Some(secs))
        })
        .collect();
    Ok(ExperimentReport {
        experiment: "benchmark_compare".into(),
        config: config.clone(),
        settings,
        skipped,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Basis;

    fn quick_config(theta: f64) -> ExperimentConfig {
        let mut config = ExperimentConfig::desk(theta);
        config.trials = 3;
        config.resamples = 50;
        config.n_u_val_sweep = vec![10, 50];
        config.n_test = 500;
        config.grid = Grid {
            lambdas: vec![1e-2, 1.0],
            etas: vec![-0.5, 0.0, 0.5],
            gammas: vec![0.25, 0.5],
            bandwidth_multipliers: vec![1.0],
        };
        config.n_unlabeled = 40;
        config.n_labeled = 10;
        config.centers = CenterSelection::Subsample { cap: 30, seed: 0 };
        config
    }

    #[test]
    fn components_combine_like_direct_evaluation() {
        let data = crate::data::synth_gaussians(0.4, 6, 7, 9, 2.0, 2, 3).unwrap();
        let classifier =
            Classifier::new(Basis::raw_linear(2), vec![0.8, -0.1, 0.05]).unwrap();
        let prior = ClassPrior::new(0.4).unwrap();
        let spec = build_pnu(0.3, prior, Loss::Ramp, PnuMode::NonConvex).unwrap();
        let comps = risk_components(
            Loss::Ramp,
            &classifier,
            data.positives.points(),
            data.negatives.points(),
            data.unlabeled.points(),
        );
        let combined = combine_components(&spec, &comps).unwrap();
        let direct = spec.evaluate_empirical(&data, &classifier).unwrap();
        assert!((combined - direct).abs() < 1e-12);
    }

    #[test]
    fn combine_rejects_missing_atoms() {
        let classifier = Classifier::new(Basis::raw_linear(1), vec![1.0, 0.0]).unwrap();
        let prior = ClassPrior::new(0.5).unwrap();
        let spec = build_pnu(0.5, prior, Loss::Ramp, PnuMode::NonConvex).unwrap();
        let comps = risk_components(Loss::Ramp, &classifier, &[vec![1.0]], &[vec![-1.0]], &[]);
        assert!(combine_components(&spec, &comps).is_err());
    }

    #[test]
    fn report_echo_replays_bit_exactly() {
        let config = quick_config(0.5);
        let a = run_variance_ratio(&config).unwrap();
        let b = run_variance_ratio(&a.config).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn reported_se_matches_recomputation() {
        let config = quick_config(0.3);
        let report = run_validation_ratio(&config).unwrap();
        for setting in &report.settings {
            let n = setting.per_trial.len() as f64;
            let mean = setting.per_trial.iter().sum::<f64>() / n;
            assert!((mean - setting.mean).abs() < 1e-12);
            if setting.per_trial.len() > 1 {
                let se = (sample_variance(&setting.per_trial) / n).sqrt();
                assert!((se - setting.std_error).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn single_trial_flags_degenerate_se() {
        let mut config = quick_config(0.5);
        config.trials = 1;
        let report = run_variance_ratio(&config).unwrap();
        assert!(report.settings[0].se_degenerate);
        assert_eq!(report.settings[0].std_error, 0.0);
    }

    #[test]
    fn benchmark_reports_three_methods_with_clocks() {
        let config = quick_config(0.5);
        let report = run_benchmark_compare(&config).unwrap();
        assert_eq!(report.settings.len(), 3);
        for setting in &report.settings {
            assert!(setting.wall_clock_secs.unwrap() > 0.0);
            for err in &setting.per_trial {
                assert!((0.0..=1.0).contains(err));
            }
        }
        let csv = report.to_long_csv();
        assert!(csv.starts_with("setting,trial,value\n"));
        assert!(csv.contains("pnu,0,"));
    }

    #[test]
    fn identical_scores_give_unit_ratio() {
        // a single candidate makes both selections identical, so the ratio
        // is exactly 1
        let mut config = quick_config(0.5);
        config.grid.lambdas = vec![0.1];
        config.grid.bandwidth_multipliers = vec![1.0];
        let report = run_validation_ratio(&config).unwrap();
        for setting in &report.settings {
            for r in &setting.per_trial {
                assert_eq!(*r, 1.0);
            }
        }
    }

    #[test]
    fn pool_sampler_respects_capacity() {
        let data = crate::data::synth_gaussians(0.5, 8, 8, 0, 2.0, 2, 1).unwrap();
        let pool = LabeledPool::new(data.positives, data.negatives).unwrap();
        let mut sampler = TrialSampler::pool(&pool, 3);
        assert!(sampler.draw_class(true, 5).is_ok());
        match sampler.draw_class(true, 5) {
            Err(Error::Capacity { class, available, .. }) => {
                assert_eq!(class, "positive");
                assert_eq!(available, 3);
            }
            other => panic!("expected capacity error, got {other:?}"),
        }
    }
}
