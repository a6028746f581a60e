//! Hyperparameter selection by stratified k-fold cross-validation, scored
//! with the zero-one PNU validation risk at the equal-sigma trade-off
//! `eta_bar` (or, for the PUNU families, the matching `gamma_bar`).

use rand::seq::index;
use serde::{Deserialize, Serialize};

use crate::data::{seeded_rng, ClassPrior, SampleSet, TripleDataset};
use crate::error::{Error, Result};
use crate::loss::Loss;
use crate::model::{Basis, CenterSelection, Classifier};
use crate::risk::{
    build_base, build_combined, build_pnu, evaluate_zero_one_pnu, PnuMode, RiskFamily, RiskSpec,
};
use crate::solver::{train_closed_form_cached, train_cccp, CccpConfig, FeatureMoments};
use crate::theory::optimal_eta;

/// Hyperparameter grid. Defaults follow the experimental protocol:
/// regularization decades 1e-5..=1e2, eta in {-1, -0.9, ..., 1}, gamma in
/// {0, 0.05, ..., 1}, and the six median-heuristic bandwidth multipliers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub lambdas: Vec<f64>,
    pub etas: Vec<f64>,
    pub gammas: Vec<f64>,
    pub bandwidth_multipliers: Vec<f64>,
}

impl Default for Grid {
    fn default() -> Self {
        Grid {
            lambdas: (-5..=2).map(|e| 10f64.powi(e)).collect(),
            etas: (-10..=10).map(|i| i as f64 / 10.0).collect(),
            gammas: (0..=20).map(|i| i as f64 / 20.0).collect(),
            bandwidth_multipliers: crate::model::DEFAULT_BANDWIDTH_MULTIPLIERS.to_vec(),
        }
    }
}

impl Grid {
    /// A small grid for quick runs and the desk-scale experiments.
    pub fn desk() -> Self {
        Grid {
            lambdas: vec![1e-3, 1e-1, 1e1],
            etas: vec![-1.0, -0.5, 0.0, 0.5, 1.0],
            gammas: vec![0.0, 0.25, 0.5, 0.75, 1.0],
            bandwidth_multipliers: vec![0.5, 1.0, 2.0],
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.lambdas.is_empty()
            || self.etas.is_empty()
            || self.gammas.is_empty()
            || self.bandwidth_multipliers.is_empty()
        {
            return Err(Error::config("grid lists must be nonempty"));
        }
        if self.etas.iter().any(|e| !(-1.0..=1.0).contains(e)) {
            return Err(Error::config("grid etas must lie in [-1, 1]"));
        }
        if self.gammas.iter().any(|g| !(0.0..=1.0).contains(g)) {
            return Err(Error::config("grid gammas must lie in [0, 1]"));
        }
        Ok(())
    }
}

/// Equal-sigma PNU trade-off from the class prior and labeled counts:
/// `psi_p ~ theta_p^2 / n_p`, `psi_n ~ theta_n^2 / n_n`, and
/// `eta_bar = (psi_n - psi_p) / (psi_p + psi_n)`.
pub fn eta_bar(prior: ClassPrior, n_p: usize, n_n: usize) -> Result<f64> {
    if n_p == 0 || n_n == 0 {
        return Err(Error::config("eta_bar needs n_p, n_n >= 1"));
    }
    let psi_p = prior.theta_p() * prior.theta_p() / n_p as f64;
    let psi_n = prior.theta_n() * prior.theta_n() / n_n as f64;
    Ok(optimal_eta(psi_p, psi_n))
}

/// Equal-sigma PUNU combination weight `gamma_bar = psi_p / (psi_p + psi_n)`.
pub fn gamma_bar(prior: ClassPrior, n_p: usize, n_n: usize) -> Result<f64> {
    if n_p == 0 || n_n == 0 {
        return Err(Error::config("gamma_bar needs n_p, n_n >= 1"));
    }
    let psi_p = prior.theta_p() * prior.theta_p() / n_p as f64;
    let psi_n = prior.theta_n() * prior.theta_n() / n_n as f64;
    Ok(psi_p / (psi_p + psi_n))
}

/// Per-fold index sets into the P, N, and U sets of a dataset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Fold {
    pub p: Vec<usize>,
    pub n: Vec<usize>,
    pub u: Vec<usize>,
}

fn split_stratum(len: usize, k: usize, rng: &mut rand_chacha::ChaCha8Rng) -> Vec<Vec<usize>> {
    let perm = index::sample(rng, len, len).into_vec();
    let base = len / k;
    let extra = len % k;
    let mut folds = Vec::with_capacity(k);
    let mut cursor = 0;
    for f in 0..k {
        let size = base + usize::from(f < extra);
        folds.push(perm[cursor..cursor + size].to_vec());
        cursor += size;
    }
    folds
}

/// Stratified k-fold assignment: P, N, and U are each partitioned
/// independently into k near-equal folds, deterministically per seed. U
/// folds may be empty; a nonempty P or N stratum must have at least k
/// samples.
pub fn k_fold_split(data: &TripleDataset, k: usize, seed: u64) -> Result<Vec<Fold>> {
    if k < 2 {
        return Err(Error::config("k-fold split needs k >= 2"));
    }
    for (name, set) in [("P", &data.positives), ("N", &data.negatives)] {
        if !set.is_empty() && set.len() < k {
            return Err(Error::data(format!(
                "stratum {name} has {} samples, fewer than k = {k}",
                set.len()
            )));
        }
    }
    let mut rng = seeded_rng(seed);
    let p_folds = split_stratum(data.positives.len(), k, &mut rng);
    let n_folds = split_stratum(data.negatives.len(), k, &mut rng);
    let u_folds = split_stratum(data.unlabeled.len(), k, &mut rng);
    Ok((0..k)
        .map(|f| Fold {
            p: p_folds[f].clone(),
            n: n_folds[f].clone(),
            u: u_folds[f].clone(),
        })
        .collect())
}

/// Splits a dataset into the training part (all folds but `held_out`) and
/// the validation part (the held-out fold). Both inherit the prior.
pub fn fold_datasets(
    data: &TripleDataset,
    folds: &[Fold],
    held_out: usize,
) -> (TripleDataset, TripleDataset) {
    let mut train = Fold {
        p: Vec::new(),
        n: Vec::new(),
        u: Vec::new(),
    };
    for (i, fold) in folds.iter().enumerate() {
        if i != held_out {
            train.p.extend_from_slice(&fold.p);
            train.n.extend_from_slice(&fold.n);
            train.u.extend_from_slice(&fold.u);
        }
    }
    let pick = |fold: &Fold| TripleDataset {
        positives: data.positives.select(&fold.p),
        negatives: data.negatives.select(&fold.n),
        unlabeled: data.unlabeled.select(&fold.u),
        prior: data.prior,
    };
    (pick(&train), pick(&folds[held_out]))
}

/// Validation score used on held-out folds, always under the zero-one loss.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ValidationScore {
    /// PNU risk at the equal-sigma `eta_bar` (falls back to the PN risk
    /// when no unlabeled points are available).
    PnuAtEtaBar,
    /// Non-convex PUNU risk at the equal-sigma `gamma_bar`.
    PunuAtGammaBar,
    /// Prior-weighted labeled misclassification rate.
    PnZeroOne,
}

/// One grid candidate. `combo` is eta for the PNU family, gamma for the
/// combined families, and absent for the base families; `bandwidth` is
/// absent for the raw-linear basis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Candidate {
    pub lambda: f64,
    pub combo: Option<f64>,
    pub bandwidth: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CandidateReport {
    pub candidate: Candidate,
    pub fold_scores: Vec<f64>,
    pub mean_score: Option<f64>,
    pub failure: Option<String>,
}

/// Cross-validation report: every candidate with its fold scores, the
/// chosen candidate, and the resolved scoring trade-off.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvReport {
    pub family: RiskFamily,
    pub loss: Loss,
    pub k: usize,
    pub seed: u64,
    pub eta_bar: f64,
    pub candidates: Vec<CandidateReport>,
    pub chosen: Candidate,
}

/// Cross-validation configuration; the model is a Gaussian kernel basis
/// unless `raw_linear_basis` is set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvConfig {
    pub family: RiskFamily,
    pub loss: Loss,
    pub k: usize,
    pub seed: u64,
    pub score: ValidationScore,
    pub centers: CenterSelection,
    pub raw_linear_basis: bool,
    /// PNU specs train through this mode (convex by default, matching the
    /// squared-loss experiments).
    pub pnu_mode: PnuMode,
}

impl CvConfig {
    pub fn new(family: RiskFamily, loss: Loss) -> Self {
        CvConfig {
            family,
            loss,
            k: 5,
            seed: 0,
            score: ValidationScore::PnuAtEtaBar,
            centers: CenterSelection::default(),
            raw_linear_basis: false,
            pnu_mode: PnuMode::Convex,
        }
    }
}

fn build_spec(
    family: RiskFamily,
    combo: Option<f64>,
    prior: ClassPrior,
    loss: Loss,
    mode: PnuMode,
) -> Result<RiskSpec> {
    match family {
        RiskFamily::Pnu => build_pnu(combo.unwrap_or(0.0), prior, loss, mode),
        f if RiskFamily::COMBINED.contains(&f) => {
            build_combined(f, combo.unwrap_or(0.0), prior, loss)
        }
        f => build_base(f, prior, loss),
    }
}

/// The combination-parameter list a family sweeps during selection.
fn combos_for(family: RiskFamily, grid: &Grid) -> Vec<Option<f64>> {
    match family {
        RiskFamily::Pnu => grid.etas.iter().copied().map(Some).collect(),
        f if RiskFamily::COMBINED.contains(&f) => {
            grid.gammas.iter().copied().map(Some).collect()
        }
        _ => vec![None],
    }
}

/// Candidate ordering for ties: smaller |combo|, then larger lambda, then
/// smaller bandwidth.
fn tie_break(a: &Candidate, b: &Candidate) -> std::cmp::Ordering {
    let combo_a = a.combo.map_or(0.0, f64::abs);
    let combo_b = b.combo.map_or(0.0, f64::abs);
    combo_a
        .partial_cmp(&combo_b)
        .unwrap()
        .then(b.lambda.partial_cmp(&a.lambda).unwrap())
        .then(
            a.bandwidth
                .unwrap_or(0.0)
                .partial_cmp(&b.bandwidth.unwrap_or(0.0))
                .unwrap(),
        )
}

fn score_fold(
    config: &CvConfig,
    classifier: &Classifier,
    validation: &TripleDataset,
    prior: ClassPrior,
    eta: f64,
    gamma: f64,
) -> Result<f64> {
    match config.score {
        ValidationScore::PnuAtEtaBar => {
            let effective = if validation.unlabeled.is_empty() { 0.0 } else { eta };
            evaluate_zero_one_pnu(effective, prior, validation, classifier)
        }
        ValidationScore::PunuAtGammaBar => {
            if validation.unlabeled.is_empty() {
                return evaluate_zero_one_pnu(0.0, prior, validation, classifier);
            }
            let spec = build_combined(RiskFamily::NPunu, gamma, prior, Loss::ZeroOne)?;
            spec.evaluate_empirical(validation, classifier)
        }
        ValidationScore::PnZeroOne => {
            evaluate_zero_one_pnu(0.0, prior, validation, classifier)
        }
    }
}

/// Runs k-fold cross-validation over the grid. A training failure on any
/// fold records the candidate as failed without aborting the run; the chosen
/// candidate minimizes the mean validation score, ties broken by
/// [`tie_break`].
pub fn cross_validate(data: &TripleDataset, grid: &Grid, config: &CvConfig) -> Result<CvReport> {
    grid.validate()?;
    let prior = data.require_prior()?;
    if data.positives.is_empty() || data.negatives.is_empty() {
        return Err(Error::data("cross-validation needs nonempty P and N sets"));
    }
    // eta_bar comes from the whole training set, not per fold
    let eta = eta_bar(prior, data.positives.len(), data.negatives.len())?;
    let gamma = gamma_bar(prior, data.positives.len(), data.negatives.len())?;

    let folds = k_fold_split(data, config.k, config.seed)?;
    let splits: Vec<_> = (0..config.k)
        .map(|f| fold_datasets(data, &folds, f))
        .collect();

    let bandwidths: Vec<Option<f64>> = if config.raw_linear_basis {
        vec![None]
    } else {
        let all_points = SampleSet::new(data.all_points(), data.dim())?;
        crate::model::median_bandwidths(&all_points, &grid.bandwidth_multipliers)?
            .into_iter()
            .map(Some)
            .collect()
    };
    let combos = combos_for(config.family, grid);

    let mut candidates = Vec::new();
    for &bandwidth in &bandwidths {
        // per-(fold, bandwidth) feature moments are shared by every
        // (lambda, combo) candidate
        let mut fold_moments = Vec::with_capacity(config.k);
        for (train, _) in &splits {
            let basis = match bandwidth {
                Some(bw) => Basis::gaussian(config.centers.centers(train), bw)?,
                None => Basis::raw_linear(data.dim()),
            };
            fold_moments.push(FeatureMoments::new(train, &basis));
        }
        for &combo in &combos {
            for &lambda in &grid.lambdas {
                let candidate = Candidate {
                    lambda,
                    combo,
                    bandwidth,
                };
                let mut fold_scores = Vec::with_capacity(config.k);
                let mut failure = None;
                for (f, (train, validation)) in splits.iter().enumerate() {
                    let result = build_spec(config.family, combo, prior, config.loss, config.pnu_mode)
                        .and_then(|spec| fit_fold(&spec, train, &fold_moments[f], lambda))
                        .and_then(|classifier| {
                            score_fold(config, &classifier, validation, prior, eta, gamma)
                        });
                    match result {
                        Ok(score) => fold_scores.push(score),
                        Err(e) => {
                            failure = Some(e.to_string());
                            break;
                        }
                    }
                }
                let mean_score = if failure.is_none() {
                    Some(fold_scores.iter().sum::<f64>() / fold_scores.len() as f64)
                } else {
                    None
                };
                candidates.push(CandidateReport {
                    candidate,
                    fold_scores,
                    mean_score,
                    failure,
                });
            }
        }
    }

    let chosen = candidates
        .iter()
        .filter(|c| c.mean_score.is_some())
        .min_by(|a, b| {
            a.mean_score
                .unwrap()
                .partial_cmp(&b.mean_score.unwrap())
                .unwrap()
                .then(tie_break(&a.candidate, &b.candidate))
        })
        .map(|c| c.candidate)
        .ok_or_else(|| Error::data("every cross-validation candidate failed"))?;

    Ok(CvReport {
        family: config.family,
        loss: config.loss,
        k: config.k,
        seed: config.seed,
        eta_bar: eta,
        candidates,
        chosen,
    })
}

fn fit_fold(
    spec: &RiskSpec,
    train: &TripleDataset,
    moments: &FeatureMoments,
    lambda: f64,
) -> Result<Classifier> {
    let quadratic = spec
        .terms
        .iter()
        .all(|t| matches!(t.loss, Loss::ScaledSquared | Loss::Linear));
    if quadratic {
        train_closed_form_cached(spec, moments, lambda)
    } else {
        let (classifier, _) =
            train_cccp(spec, train, moments.basis(), &CccpConfig::new(lambda))?;
        Ok(classifier)
    }
}

/// Refits the chosen candidate on the full dataset.
pub fn refit(data: &TripleDataset, config: &CvConfig, chosen: &Candidate) -> Result<Classifier> {
    let prior = data.require_prior()?;
    let basis = match chosen.bandwidth {
        Some(bw) => Basis::gaussian(config.centers.centers(data), bw)?,
        None => Basis::raw_linear(data.dim()),
    };
    let spec = build_spec(config.family, chosen.combo, prior, config.loss, config.pnu_mode)?;
    let moments = FeatureMoments::new(data, &basis);
    fit_fold(&spec, data, &moments, chosen.lambda)
}
