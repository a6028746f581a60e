//! Training by l2-regularized empirical risk minimization.
//!
//! Quadratic specs (scaled squared and linear losses only) reduce to a
//! symmetric positive-definite linear system solved in closed form. Ramp
//! losses go through the concave-convex procedure: `ramp(m)` splits as
//! `max(0, 1-m)/2 - max(0, -1-m)/2`, the concave half is linearized at the
//! current margins, and the resulting weighted hinge + linear + ridge
//! surrogate is minimized exactly by dual coordinate descent.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::data::TripleDataset;
use crate::error::{Error, Result};
use crate::loss::Loss;
use crate::model::{Basis, Classifier};
use crate::risk::{RiskSpec, SampleSource};

/// How [`train`] picks its algorithm.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TrainMethod {
    /// Closed form when every loss is quadratic-compatible, CCCP otherwise.
    Auto,
    ClosedForm,
    Cccp,
}

/// Initial weights for iterative training.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Init {
    Zeros,
    Given(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub lambda: f64,
    pub method: TrainMethod,
    pub cccp_max_iter: usize,
    pub cccp_tol: f64,
    pub init: Init,
}

impl TrainConfig {
    pub fn new(lambda: f64) -> Self {
        TrainConfig {
            lambda,
            method: TrainMethod::Auto,
            cccp_max_iter: 50,
            cccp_tol: 1e-6,
            init: Init::Zeros,
        }
    }
}

/// Outcome of [`train`]; the objective trace is present for CCCP runs.
#[derive(Debug, Clone)]
pub struct TrainOutcome {
    pub classifier: Classifier,
    pub trace: Option<Vec<f64>>,
}

/// The regularized empirical risk `R(spec; w) + lambda * |w|^2`.
pub fn objective(
    spec: &RiskSpec,
    data: &TripleDataset,
    basis: &Basis,
    lambda: f64,
    weights: &[f64],
) -> Result<f64> {
    let classifier = Classifier::new(basis.clone(), weights.to_vec())?;
    let risk = spec.evaluate_empirical(data, &classifier)?;
    let reg: f64 = weights.iter().map(|w| w * w).sum();
    Ok(risk + lambda * reg)
}

/// Per-source feature moments `sum phi phi'` and `sum phi`, computed once so
/// that many (lambda, combination) candidates reuse the same pass over the
/// data.
pub struct FeatureMoments {
    basis: Basis,
    gram: [Option<DMatrix<f64>>; 3],
    sums: [Option<DVector<f64>>; 3],
    counts: [usize; 3],
}

fn source_index(source: SampleSource) -> usize {
    match source {
        SampleSource::Positive => 0,
        SampleSource::Negative => 1,
        SampleSource::Unlabeled => 2,
    }
}

impl FeatureMoments {
    pub fn new(data: &TripleDataset, basis: &Basis) -> Self {
        let b = basis.size();
        let mut gram: [Option<DMatrix<f64>>; 3] = [None, None, None];
        let mut sums: [Option<DVector<f64>>; 3] = [None, None, None];
        let mut counts = [0usize; 3];
        for (idx, set) in [&data.positives, &data.negatives, &data.unlabeled]
            .into_iter()
            .enumerate()
        {
            counts[idx] = set.len();
            if set.is_empty() {
                continue;
            }
            let mut g = DMatrix::zeros(b, b);
            let mut s = DVector::zeros(b);
            for x in set.iter() {
                let phi = DVector::from_vec(basis.featurize(x));
                g.syger(1.0, &phi, &phi, 1.0);
                s += &phi;
            }
            g.fill_upper_triangle_with_lower_triangle();
            gram[idx] = Some(g);
            sums[idx] = Some(s);
        }
        FeatureMoments {
            basis: basis.clone(),
            gram,
            sums,
            counts,
        }
    }

    pub fn basis(&self) -> &Basis {
        &self.basis
    }
}

/// The assembled quadratic `w' A w - 2 b' w + constant` of a
/// quadratic-compatible spec (before regularization).
pub struct QuadraticForm {
    pub matrix: DMatrix<f64>,
    pub linear: DVector<f64>,
    pub constant: f64,
}

impl QuadraticForm {
    pub fn value(&self, w: &DVector<f64>, lambda: f64) -> f64 {
        (w.transpose() * &self.matrix * w)[(0, 0)] - 2.0 * self.linear.dot(w)
            + self.constant
            + lambda * w.dot(w)
    }

    /// Gradient `2 (A + lambda I) w - 2 b`.
    pub fn gradient(&self, w: &DVector<f64>, lambda: f64) -> DVector<f64> {
        2.0 * (&self.matrix * w) + 2.0 * lambda * w - 2.0 * &self.linear
    }

    /// Solves `(A + lambda I) w = b` by Cholesky, falling back to an SVD
    /// least-squares solve if the factorization fails numerically.
    pub fn solve(&self, lambda: f64) -> Result<DVector<f64>> {
        if lambda < 0.0 {
            return Err(Error::config(format!(
                "regularization weight must be nonnegative, got {lambda}"
            )));
        }
        let b = self.matrix.nrows();
        let mut m = self.matrix.clone();
        for i in 0..b {
            m[(i, i)] += lambda;
        }
        if let Some(chol) = m.clone().cholesky() {
            return Ok(chol.solve(&self.linear));
        }
        if lambda == 0.0 {
            return Err(Error::numerical(
                "quadratic form is singular at lambda = 0; use lambda > 0",
            ));
        }
        m.svd(true, true)
            .solve(&self.linear, 1e-12)
            .map_err(|e| Error::numerical(format!("least-squares fallback failed: {e}")))
    }
}

/// Expands the spec's term table into the quadratic form. Each scaled
/// squared term `(c, D, s)` contributes `c/(4|D|) sum (s w'phi - 1)^2`, each
/// linear term `-(c s)/|D| sum phi' w`.
pub fn assemble_quadratic(spec: &RiskSpec, moments: &FeatureMoments) -> Result<QuadraticForm> {
    let b = moments.basis.size();
    let mut matrix = DMatrix::zeros(b, b);
    let mut linear = DVector::zeros(b);
    let mut constant = spec.constant;
    for term in &spec.terms {
        let idx = source_index(term.source);
        let count = moments.counts[idx];
        if count == 0 {
            return Err(Error::Evaluation(format!(
                "term on an empty set with weight {}",
                term.weight
            )));
        }
        let gram = moments.gram[idx].as_ref().unwrap();
        let sum = moments.sums[idx].as_ref().unwrap();
        let s = term.sign.factor();
        match term.loss {
            Loss::ScaledSquared => {
                if term.weight < 0.0 {
                    return Err(Error::config(
                        "closed form rejects negative squared-loss weights",
                    ));
                }
                let scale = term.weight / (4.0 * count as f64);
                matrix += gram * scale;
                linear += sum * (scale * s);
                constant += term.weight / 4.0;
            }
            Loss::Linear => {
                linear += sum * (term.weight * s / (2.0 * count as f64));
            }
            other => {
                return Err(Error::config(format!(
                    "loss '{other}' is not quadratic; closed form accepts scaled_squared and linear"
                )))
            }
        }
    }
    Ok(QuadraticForm {
        matrix,
        linear,
        constant,
    })
}

/// Closed-form minimizer of the regularized quadratic objective.
pub fn train_closed_form(
    spec: &RiskSpec,
    data: &TripleDataset,
    basis: &Basis,
    lambda: f64,
) -> Result<Classifier> {
    let moments = FeatureMoments::new(data, basis);
    train_closed_form_cached(spec, &moments, lambda)
}

/// Closed-form training against precomputed moments (the cross-validation
/// hot path).
pub fn train_closed_form_cached(
    spec: &RiskSpec,
    moments: &FeatureMoments,
    lambda: f64,
) -> Result<Classifier> {
    let quad = assemble_quadratic(spec, moments)?;
    let w = quad.solve(lambda)?;
    Classifier::new(moments.basis.clone(), w.iter().copied().collect())
}

/// CCCP training configuration; `lambda` must be strictly positive because
/// the inner dual solver scales by `1/(2 lambda)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CccpConfig {
    pub lambda: f64,
    pub max_iter: usize,
    pub tol: f64,
    pub init: Init,
}

impl CccpConfig {
    pub fn new(lambda: f64) -> Self {
        CccpConfig {
            lambda,
            max_iter: 50,
            tol: 1e-6,
            init: Init::Zeros,
        }
    }
}

/// One hinge atom of the inner problem: weight `a * max(0, 1 - s w'phi)`.
struct Atom {
    set: usize,
    point: usize,
    sign: f64,
    weight: f64,
}

struct CccpProblem {
    features: [Vec<DVector<f64>>; 3],
    sq_norms: [Vec<f64>; 3],
    atoms: Vec<Atom>,
    /// Linear part of the objective from linear-loss terms.
    base_linear: DVector<f64>,
}

impl CccpProblem {
    fn build(spec: &RiskSpec, data: &TripleDataset, basis: &Basis) -> Result<Self> {
        let b = basis.size();
        let sets = [&data.positives, &data.negatives, &data.unlabeled];
        let features: [Vec<DVector<f64>>; 3] = std::array::from_fn(|i| {
            sets[i]
                .iter()
                .map(|x| DVector::from_vec(basis.featurize(x)))
                .collect()
        });
        let sq_norms: [Vec<f64>; 3] =
            std::array::from_fn(|i| features[i].iter().map(|p| p.dot(p)).collect());

        let mut atoms = Vec::new();
        let mut base_linear = DVector::zeros(b);
        for term in &spec.terms {
            let idx = source_index(term.source);
            if features[idx].is_empty() {
                return Err(Error::Evaluation(format!(
                    "term on an empty set with weight {}",
                    term.weight
                )));
            }
            let count = features[idx].len() as f64;
            let s = term.sign.factor();
            match term.loss {
                Loss::Ramp => {
                    if term.weight < 0.0 {
                        return Err(Error::config(
                            "CCCP requires nonnegative ramp-term weights",
                        ));
                    }
                    // ramp = hinge/2 - hinge(shifted)/2; both halves carry a/2
                    let a = term.weight / (2.0 * count);
                    for point in 0..features[idx].len() {
                        atoms.push(Atom {
                            set: idx,
                            point,
                            sign: s,
                            weight: a,
                        });
                    }
                }
                Loss::Linear => {
                    for phi in &features[idx] {
                        base_linear += phi * (-term.weight * s / count);
                    }
                }
                other => {
                    return Err(Error::config(format!(
                        "loss '{other}' is not CCCP-trainable; nonlinear terms must use ramp"
                    )))
                }
            }
        }
        Ok(CccpProblem {
            features,
            sq_norms,
            atoms,
            base_linear,
        })
    }

    fn margins(&self, w: &DVector<f64>) -> Vec<f64> {
        self.atoms
            .iter()
            .map(|a| a.sign * self.features[a.set][a.point].dot(w))
            .collect()
    }
}

/// Exact minimizer of `sum_j a_j max(0, 1 - s_j w'phi_j) + q'w + lambda|w|^2`
/// by dual coordinate descent, run to a duality gap of `tol * (1 + |P|)`.
fn solve_weighted_hinge(
    problem: &CccpProblem,
    q: &DVector<f64>,
    lambda: f64,
    tol: f64,
) -> Result<DVector<f64>> {
    let two_lambda = 2.0 * lambda;
    // shifted variable u = w + q / (2 lambda); per-atom margins get offsets
    let rho: Vec<f64> = problem
        .atoms
        .iter()
        .map(|a| 1.0 + a.sign * q.dot(&problem.features[a.set][a.point]) / two_lambda)
        .collect();

    let mut alpha = vec![0.0; problem.atoms.len()];
    let mut u = DVector::zeros(q.len());
    let max_sweeps = 100_000;
    for _ in 0..max_sweeps {
        for (j, atom) in problem.atoms.iter().enumerate() {
            let phi = &problem.features[atom.set][atom.point];
            let grad = rho[j] - atom.sign * u.dot(phi);
            let step = two_lambda * grad / problem.sq_norms[atom.set][atom.point];
            let new_alpha = (alpha[j] + step).clamp(0.0, atom.weight);
            let delta = new_alpha - alpha[j];
            if delta != 0.0 {
                u.axpy(delta * atom.sign / two_lambda, phi, 1.0);
                alpha[j] = new_alpha;
            }
        }
        let mut primal = lambda * u.dot(&u);
        let mut dual = -lambda * u.dot(&u);
        for (j, atom) in problem.atoms.iter().enumerate() {
            let slack = rho[j] - atom.sign * u.dot(&problem.features[atom.set][atom.point]);
            primal += atom.weight * slack.max(0.0);
            dual += alpha[j] * rho[j];
        }
        if primal - dual <= tol * (1.0 + primal.abs()) {
            return Ok(u - q / two_lambda);
        }
    }
    Err(Error::Numerical {
        message: "inner hinge solver hit its sweep limit".into(),
        trace: Vec::new(),
    })
}

/// Trains a ramp-loss spec by CCCP, returning the classifier and the true
/// objective per accepted iterate (non-increasing by construction).
pub fn train_cccp(
    spec: &RiskSpec,
    data: &TripleDataset,
    basis: &Basis,
    config: &CccpConfig,
) -> Result<(Classifier, Vec<f64>)> {
    if config.lambda <= 0.0 {
        return Err(Error::config(
            "CCCP training requires lambda > 0",
        ));
    }
    let problem = CccpProblem::build(spec, data, basis)?;
    let b = basis.size();
    let mut w = match &config.init {
        Init::Zeros => DVector::zeros(b),
        Init::Given(values) => {
            if values.len() != b {
                return Err(Error::config(format!(
                    "initial weights have length {}, basis size is {b}",
                    values.len()
                )));
            }
            DVector::from_vec(values.clone())
        }
    };

    let true_objective = |w: &DVector<f64>| -> f64 {
        let mut value = spec.constant + config.lambda * w.dot(w);
        // linear terms
        value += problem.base_linear.dot(w);
        for (atom, &m) in problem.atoms.iter().zip(problem.margins(w).iter()) {
            value += atom.weight * ((1.0 - m).max(0.0) - (-1.0 - m).max(0.0));
        }
        value
    };

    let mut objective = true_objective(&w);
    let mut trace = vec![objective];
    for _ in 0..config.max_iter {
        // linearize the concave half at the current margins: slope is active
        // strictly below -1, ties take zero
        let margins = problem.margins(&w);
        let mut q = problem.base_linear.clone();
        for (atom, &m) in problem.atoms.iter().zip(margins.iter()) {
            if m < -1.0 {
                q.axpy(atom.weight * atom.sign, &problem.features[atom.set][atom.point], 1.0);
            }
        }
        let candidate = solve_weighted_hinge(&problem, &q, config.lambda, 1e-8)
            .map_err(|e| match e {
                Error::Numerical { message, .. } => Error::Numerical {
                    message,
                    trace: trace.clone(),
                },
                other => other,
            })?;
        let candidate_objective = true_objective(&candidate);
        if candidate_objective > objective {
            // inner tolerance kept the surrogate from improving; stop at the
            // last accepted iterate so the trace stays monotone
            break;
        }
        let decrease = objective - candidate_objective;
        w = candidate;
        objective = candidate_objective;
        trace.push(objective);
        if decrease < config.tol {
            break;
        }
    }

    let classifier = Classifier::new(basis.clone(), w.iter().copied().collect())?;
    Ok((classifier, trace))
}

/// Front-end dispatching on the configured method, or on the spec's losses
/// under [`TrainMethod::Auto`].
pub fn train(
    spec: &RiskSpec,
    data: &TripleDataset,
    basis: &Basis,
    config: &TrainConfig,
) -> Result<TrainOutcome> {
    let quadratic = spec
        .terms
        .iter()
        .all(|t| matches!(t.loss, Loss::ScaledSquared | Loss::Linear));
    let method = match config.method {
        TrainMethod::Auto => {
            if quadratic {
                TrainMethod::ClosedForm
            } else {
                TrainMethod::Cccp
            }
        }
        m => m,
    };
    match method {
        TrainMethod::ClosedForm => Ok(TrainOutcome {
            classifier: train_closed_form(spec, data, basis, config.lambda)?,
            trace: None,
        }),
        TrainMethod::Cccp => {
            let cccp = CccpConfig {
                lambda: config.lambda,
                max_iter: config.cccp_max_iter,
                tol: config.cccp_tol,
                init: config.init.clone(),
            };
            let (classifier, trace) = train_cccp(spec, data, basis, &cccp)?;
            Ok(TrainOutcome {
                classifier,
                trace: Some(trace),
            })
        }
        TrainMethod::Auto => unreachable!(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{synth_gaussians, ClassPrior, SampleSet};
    use crate::risk::{build_base, build_combined, RiskFamily};

    fn prior(theta: f64) -> ClassPrior {
        ClassPrior::new(theta).unwrap()
    }

    fn tiny_pn_dataset() -> TripleDataset {
        TripleDataset::new(
            SampleSet::new(vec![vec![1.0]], 1).unwrap(),
            SampleSet::new(vec![vec![-1.0]], 1).unwrap(),
            SampleSet::empty(1),
            None,
        )
        .unwrap()
    }

    /// Derivative-free exact coordinate descent: for a quadratic objective
    /// the three-point parabola fit is exact, so each coordinate step is an
    /// exact line minimization using only objective evaluations.
    fn coordinate_descent_oracle<F: Fn(&[f64]) -> f64>(f: F, dim: usize) -> Vec<f64> {
        let mut w = vec![0.0; dim];
        let mut value = f(&w);
        let h = 0.5;
        for _ in 0..20_000 {
            for i in 0..dim {
                let orig = w[i];
                w[i] = orig + h;
                let up = f(&w);
                w[i] = orig - h;
                let down = f(&w);
                let curvature = (up + down - 2.0 * value) / (h * h);
                w[i] = if curvature > 0.0 {
                    orig - (up - down) / (2.0 * h) / curvature
                } else {
                    orig
                };
                value = f(&w);
            }
            let grad_sq: f64 = (0..dim)
                .map(|i| {
                    let orig = w[i];
                    let mut wp = w.clone();
                    wp[i] = orig + 1e-6;
                    let mut wm = w.clone();
                    wm[i] = orig - 1e-6;
                    let g = (f(&wp) - f(&wm)) / 2e-6;
                    g * g
                })
                .sum();
            if grad_sq < 1e-24 {
                break;
            }
        }
        w
    }

    #[test]
    fn objective_known_values() {
        let data = tiny_pn_dataset();
        let basis = Basis::raw_linear(1);
        let spec = build_base(RiskFamily::Pn, prior(0.5), Loss::Ramp).unwrap();
        // ramp(0) = 1/2 and the regularizer vanishes at w = 0
        assert_eq!(
            objective(&spec, &data, &basis, 37.0, &[0.0, 0.0]).unwrap(),
            0.5
        );

        let w = [0.3, -0.2];
        let base = objective(&spec, &data, &basis, 1.0, &w).unwrap();
        let doubled = objective(&spec, &data, &basis, 2.0, &w).unwrap();
        let wsq = 0.3f64 * 0.3 + 0.2 * 0.2;
        assert!((doubled - base - wsq).abs() < 1e-15);
    }

    #[test]
    fn objective_of_constant_only_spec() {
        let data = tiny_pn_dataset();
        let basis = Basis::raw_linear(1);
        let spec = RiskSpec {
            family: RiskFamily::Pn,
            combo: 0.0,
            theta_p: 0.5,
            loss: Loss::Ramp,
            terms: vec![],
            constant: -0.25,
        };
        let w = [0.5, 0.5];
        let got = objective(&spec, &data, &basis, 2.0, &w).unwrap();
        assert!((got - (-0.25 + 2.0 * 0.5)).abs() < 1e-15);
    }

    #[test]
    fn closed_form_matches_descent_oracle() {
        let data = tiny_pn_dataset();
        let basis = Basis::raw_linear(1);
        let spec = build_base(RiskFamily::Pn, prior(0.5), Loss::ScaledSquared).unwrap();
        let lambda = 1e-3;
        let trained = train_closed_form(&spec, &data, &basis, lambda).unwrap();
        let oracle = coordinate_descent_oracle(
            |w| objective(&spec, &data, &basis, lambda, w).unwrap(),
            2,
        );
        for (a, b) in trained.weights.iter().zip(oracle.iter()) {
            assert!((a - b).abs() < 1e-6, "{:?} vs {:?}", trained.weights, oracle);
        }
    }

    #[test]
    fn closed_form_gradient_is_stationary() {
        let data = synth_gaussians(0.5, 10, 10, 20, 2.0, 2, 5).unwrap();
        let basis = Basis::raw_linear(2);
        let spec = build_base(RiskFamily::Pn, prior(0.5), Loss::ScaledSquared).unwrap();
        let trained = train_closed_form(&spec, &data, &basis, 0.01).unwrap();
        // central differences are exact for quadratics up to rounding
        let h = 1e-5;
        for i in 0..trained.weights.len() {
            let mut up = trained.weights.clone();
            up[i] += h;
            let mut down = trained.weights.clone();
            down[i] -= h;
            let g = (objective(&spec, &data, &basis, 0.01, &up).unwrap()
                - objective(&spec, &data, &basis, 0.01, &down).unwrap())
                / (2.0 * h);
            assert!(g.abs() < 1e-8, "coordinate {i}: gradient {g}");
        }
    }

    #[test]
    fn closed_form_beats_random_perturbations() {
        let data = synth_gaussians(0.4, 15, 10, 30, 1.5, 2, 9).unwrap();
        let basis = Basis::raw_linear(2);
        let spec =
            build_combined(RiskFamily::CPnpu, 0.4, prior(0.4), Loss::ScaledSquared).unwrap();
        let lambda = 0.05;
        let trained = train_closed_form(&spec, &data, &basis, lambda).unwrap();
        let best = objective(&spec, &data, &basis, lambda, &trained.weights).unwrap();
        let mut rng = crate::data::seeded_rng(77);
        for _ in 0..100 {
            let perturbed: Vec<f64> = trained
                .weights
                .iter()
                .map(|w| w + 0.2 * (rand::Rng::random::<f64>(&mut rng) - 0.5))
                .collect();
            let other = objective(&spec, &data, &basis, lambda, &perturbed).unwrap();
            assert!(best <= other + 1e-12);
        }
    }

    #[test]
    fn duplicating_every_point_leaves_solution_unchanged() {
        let data = synth_gaussians(0.5, 8, 8, 10, 2.0, 2, 31).unwrap();
        let doubled = TripleDataset::new(
            SampleSet::new(
                [data.positives.points(), data.positives.points()].concat(),
                2,
            )
            .unwrap(),
            SampleSet::new(
                [data.negatives.points(), data.negatives.points()].concat(),
                2,
            )
            .unwrap(),
            SampleSet::new(
                [data.unlabeled.points(), data.unlabeled.points()].concat(),
                2,
            )
            .unwrap(),
            data.prior,
        )
        .unwrap();
        let basis = Basis::raw_linear(2);
        let spec = build_base(RiskFamily::Pn, prior(0.5), Loss::ScaledSquared).unwrap();
        let a = train_closed_form(&spec, &data, &basis, 0.01).unwrap();
        let b = train_closed_form(&spec, &doubled, &basis, 0.01).unwrap();
        for (x, y) in a.weights.iter().zip(b.weights.iter()) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn permuting_samples_changes_nothing_beyond_tolerance() {
        let data = synth_gaussians(0.5, 20, 20, 40, 2.0, 3, 13).unwrap();
        let mut reversed_p: Vec<_> = data.positives.points().to_vec();
        reversed_p.reverse();
        let mut reversed_u: Vec<_> = data.unlabeled.points().to_vec();
        reversed_u.reverse();
        let permuted = TripleDataset::new(
            SampleSet::new(reversed_p, 3).unwrap(),
            data.negatives.clone(),
            SampleSet::new(reversed_u, 3).unwrap(),
            data.prior,
        )
        .unwrap();
        let basis = Basis::raw_linear(3);
        let spec =
            build_combined(RiskFamily::CPunu, 0.3, prior(0.5), Loss::ScaledSquared).unwrap();
        let a = train_closed_form(&spec, &data, &basis, 0.01).unwrap();
        let b = train_closed_form(&spec, &permuted, &basis, 0.01).unwrap();
        for (x, y) in a.weights.iter().zip(b.weights.iter()) {
            assert!((x - y).abs() < 1e-10);
        }
    }

    #[test]
    fn convex_pnpu_endpoints_reproduce_base_solutions() {
        let data = synth_gaussians(0.35, 12, 14, 25, 2.0, 2, 3).unwrap();
        let basis = Basis::raw_linear(2);
        let p = prior(0.35);
        let lambda = 0.01;

        let pn = build_base(RiskFamily::Pn, p, Loss::ScaledSquared).unwrap();
        let at_zero = build_combined(RiskFamily::CPnpu, 0.0, p, Loss::ScaledSquared).unwrap();
        let w_pn = train_closed_form(&pn, &data, &basis, lambda).unwrap();
        let w_zero = train_closed_form(&at_zero, &data, &basis, lambda).unwrap();
        for (x, y) in w_pn.weights.iter().zip(w_zero.weights.iter()) {
            assert!((x - y).abs() < 1e-8);
        }

        let cpu = build_base(RiskFamily::CPu, p, Loss::ScaledSquared).unwrap();
        let at_one = build_combined(RiskFamily::CPnpu, 1.0, p, Loss::ScaledSquared).unwrap();
        let w_cpu = train_closed_form(&cpu, &data, &basis, lambda).unwrap();
        let w_one = train_closed_form(&at_one, &data, &basis, lambda).unwrap();
        for (x, y) in w_cpu.weights.iter().zip(w_one.weights.iter()) {
            assert!((x - y).abs() < 1e-8);
        }
    }

    #[test]
    fn closed_form_rejects_nonquadratic_terms() {
        let data = tiny_pn_dataset();
        let spec = build_base(RiskFamily::Pn, prior(0.5), Loss::Ramp).unwrap();
        let err =
            train_closed_form(&spec, &data, &Basis::raw_linear(1), 0.1).unwrap_err();
        assert!(err.to_string().contains("not quadratic"), "{err}");
    }

    #[test]
    fn singular_system_at_zero_lambda_advises_regularization() {
        // one data point cannot pin down two raw coordinates
        let data = TripleDataset::new(
            SampleSet::new(vec![vec![0.0, 0.0]], 2).unwrap(),
            SampleSet::new(vec![vec![0.0, 0.0]], 2).unwrap(),
            SampleSet::empty(2),
            None,
        )
        .unwrap();
        let spec = build_base(RiskFamily::Pn, prior(0.5), Loss::ScaledSquared).unwrap();
        let err = train_closed_form(&spec, &data, &Basis::raw_linear(2), 0.0).unwrap_err();
        assert!(err.to_string().contains("lambda > 0"), "{err}");
    }

    #[test]
    fn cccp_trace_is_monotone_nonincreasing() {
        for seed in 0..5 {
            let data = synth_gaussians(0.5, 10, 10, 15, 1.0, 2, 100 + seed).unwrap();
            let spec = build_combined(RiskFamily::NPnpu, 0.3, prior(0.5), Loss::Ramp).unwrap();
            let basis = Basis::raw_linear(2);
            let (_, trace) = train_cccp(&spec, &data, &basis, &CccpConfig::new(0.05)).unwrap();
            for pair in trace.windows(2) {
                assert!(pair[1] <= pair[0], "trace increased: {trace:?}");
            }
        }
    }

    #[test]
    fn cccp_with_inactive_concave_part_matches_pure_hinge() {
        // strong regularization keeps every margin inside (-1, 1), so the
        // concave half never activates and CCCP solves the plain weighted
        // hinge problem
        let data = synth_gaussians(0.5, 6, 6, 0, 1.0, 1, 8).unwrap();
        let spec = build_base(RiskFamily::Pn, prior(0.5), Loss::Ramp).unwrap();
        let basis = Basis::raw_linear(1);
        let config = CccpConfig::new(5.0);
        let (trained, _) = train_cccp(&spec, &data, &basis, &config).unwrap();
        for set in [&data.positives, &data.negatives] {
            for x in set.iter() {
                assert!(trained.decision(x).abs() < 1.0);
            }
        }
        let problem = CccpProblem::build(&spec, &data, &basis).unwrap();
        let hinge = solve_weighted_hinge(
            &problem,
            &problem.base_linear.clone(),
            config.lambda,
            1e-10,
        )
        .unwrap();
        for (a, b) in trained.weights.iter().zip(hinge.iter()) {
            assert!((a - b).abs() < 1e-6, "{a} vs {b}");
        }
    }

    #[test]
    fn cccp_beats_squared_loss_solution_on_ramp_objective() {
        // separable 8-point problem in one dimension
        let data = TripleDataset::new(
            SampleSet::new(vec![vec![1.0], vec![1.5], vec![2.0], vec![2.5]], 1).unwrap(),
            SampleSet::new(vec![vec![-1.0], vec![-1.5], vec![-2.0], vec![-2.5]], 1).unwrap(),
            SampleSet::empty(1),
            None,
        )
        .unwrap();
        let basis = Basis::raw_linear(1);
        let p = prior(0.5);
        let lambda = 0.01;
        let ramp_spec = build_base(RiskFamily::Pn, p, Loss::Ramp).unwrap();
        let squared_spec = build_base(RiskFamily::Pn, p, Loss::ScaledSquared).unwrap();

        let (cccp, trace) =
            train_cccp(&ramp_spec, &data, &basis, &CccpConfig::new(lambda)).unwrap();
        let squared = train_closed_form(&squared_spec, &data, &basis, lambda).unwrap();

        let cccp_obj = objective(&ramp_spec, &data, &basis, lambda, &cccp.weights).unwrap();
        let squared_obj =
            objective(&ramp_spec, &data, &basis, lambda, &squared.weights).unwrap();
        assert!(cccp_obj <= squared_obj + 1e-12, "{cccp_obj} vs {squared_obj}");
        assert!((trace.last().unwrap() - cccp_obj).abs() < 1e-12);

        // 2-d lattice global oracle over (w1, w0)
        let mut lattice_best = f64::INFINITY;
        for i in -400..=400 {
            for j in -400..=400 {
                let w = [i as f64 * 0.01, j as f64 * 0.01];
                let v = objective(&ramp_spec, &data, &basis, lambda, &w).unwrap();
                if v < lattice_best {
                    lattice_best = v;
                }
            }
        }
        assert!(
            cccp_obj <= lattice_best + 1e-3,
            "CCCP {cccp_obj} vs lattice {lattice_best}"
        );
    }

    #[test]
    fn cccp_requires_positive_lambda() {
        let data = tiny_pn_dataset();
        let spec = build_base(RiskFamily::Pn, prior(0.5), Loss::Ramp).unwrap();
        assert!(
            train_cccp(&spec, &data, &Basis::raw_linear(1), &CccpConfig::new(0.0)).is_err()
        );
    }

    #[test]
    fn auto_dispatch_picks_method_from_losses() {
        let data = synth_gaussians(0.5, 6, 6, 8, 2.0, 1, 4).unwrap();
        let basis = Basis::raw_linear(1);
        let config = TrainConfig::new(0.1);
        let squared = build_base(RiskFamily::Pn, prior(0.5), Loss::ScaledSquared).unwrap();
        assert!(train(&squared, &data, &basis, &config).unwrap().trace.is_none());
        let ramp = build_base(RiskFamily::NPu, prior(0.5), Loss::Ramp).unwrap();
        assert!(train(&ramp, &data, &basis, &config).unwrap().trace.is_some());
    }
}
