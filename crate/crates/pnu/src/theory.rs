//! Analytical companions to the risk estimators: per-class variance
//! contributions, the variance-optimal combination weights, the closed-form
//! asymptotic variances (in the infinite-unlabeled limit), the confidence
//! term shared by all generalization bounds, and the PU/NU-vs-PN comparison
//! ratios.

use serde::{Deserialize, Serialize};

use crate::data::{ClassPrior, SampleSet};
use crate::error::{Error, Result};
use crate::loss::Loss;
use crate::model::Classifier;
use crate::risk::RiskFamily;

/// Per-class loss standard deviations of a fixed classifier together with
/// the variance contributions `psi = theta^2 sigma^2 / n` they induce.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VarianceProfile {
    pub sigma_p: f64,
    pub sigma_n: f64,
    pub psi_p: f64,
    pub psi_n: f64,
    pub n_p: usize,
    pub n_n: usize,
    pub theta_p: f64,
}

impl VarianceProfile {
    pub fn new(
        prior: ClassPrior,
        sigma_p: f64,
        sigma_n: f64,
        n_p: usize,
        n_n: usize,
    ) -> Result<Self> {
        if n_p == 0 || n_n == 0 {
            return Err(Error::config("variance profile needs n_p, n_n >= 1"));
        }
        if sigma_p < 0.0 || sigma_n < 0.0 {
            return Err(Error::config("standard deviations must be nonnegative"));
        }
        let tp = prior.theta_p();
        let tn = prior.theta_n();
        Ok(VarianceProfile {
            sigma_p,
            sigma_n,
            psi_p: tp * tp * sigma_p * sigma_p / n_p as f64,
            psi_n: tn * tn * sigma_n * sigma_n / n_n as f64,
            n_p,
            n_n,
            theta_p: tp,
        })
    }

    /// Profile directly from the variance contributions, for analytical
    /// studies where the sigmas are not observed individually.
    pub fn from_psi(psi_p: f64, psi_n: f64) -> Result<Self> {
        if psi_p < 0.0 || psi_n < 0.0 {
            return Err(Error::config("psi values must be nonnegative"));
        }
        Ok(VarianceProfile {
            sigma_p: psi_p.sqrt(),
            sigma_n: psi_n.sqrt(),
            psi_p,
            psi_n,
            n_p: 1,
            n_n: 1,
            theta_p: 0.5,
        })
    }
}

/// Sample standard deviations (denominator n-1) of the loss values
/// `l(g(x))` over the positive set and `l(-g(x))` over the negative set.
pub fn estimate_sigmas(
    classifier: &Classifier,
    loss: Loss,
    p_set: &SampleSet,
    n_set: &SampleSet,
) -> Result<(f64, f64)> {
    let std_of = |values: &[f64]| -> Result<f64> {
        if values.len() < 2 {
            return Err(Error::data(format!(
                "sigma estimation needs at least 2 points, got {}",
                values.len()
            )));
        }
        let mean = values.iter().sum::<f64>() / values.len() as f64;
        let ss: f64 = values.iter().map(|v| (v - mean) * (v - mean)).sum();
        Ok((ss / (values.len() - 1) as f64).sqrt())
    };
    let p_losses: Vec<f64> = p_set
        .iter()
        .map(|x| loss.evaluate(classifier.decision(x)))
        .collect();
    let n_losses: Vec<f64> = n_set
        .iter()
        .map(|x| loss.evaluate(-classifier.decision(x)))
        .collect();
    Ok((std_of(&p_losses)?, std_of(&n_losses)?))
}

/// A variance-optimal combination weight; `in_unit_interval` flags whether
/// the unconstrained optimum lies in [0, 1] (it always does for PUNU, and
/// for PNPU/PNNU only under the matching psi ordering). The value is never
/// clamped.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptimalGamma {
    pub gamma: f64,
    pub in_unit_interval: bool,
}

/// The variance-minimizing gamma of a non-convex combined family in the
/// infinite-unlabeled limit.
pub fn optimal_gamma(family: RiskFamily, profile: &VarianceProfile) -> Result<OptimalGamma> {
    let total = profile.psi_p + profile.psi_n;
    if total <= 0.0 {
        return Err(Error::config(
            "optimal gamma is undefined when psi_p + psi_n = 0",
        ));
    }
    let gamma = match family {
        RiskFamily::NPunu => profile.psi_p / total,
        RiskFamily::NPnpu => (profile.psi_n - profile.psi_p) / total,
        RiskFamily::NPnnu => (profile.psi_p - profile.psi_n) / total,
        other => {
            return Err(Error::config(format!(
                "optimal gamma is defined for N-PUNU, N-PNPU, N-PNNU; got {other}"
            )))
        }
    };
    Ok(OptimalGamma {
        gamma,
        in_unit_interval: (0.0..=1.0).contains(&gamma),
    })
}

/// The signed PNU trade-off that minimizes the asymptotic variance:
/// `(psi_n - psi_p) / (psi_p + psi_n)`, selecting the PNPU branch when
/// nonnegative and the PNNU branch otherwise. Returns 0 when both psi
/// values vanish (no variance signal).
pub fn optimal_eta(psi_p: f64, psi_n: f64) -> f64 {
    let total = psi_p + psi_n;
    if total <= 0.0 {
        return 0.0;
    }
    (psi_n - psi_p) / total
}

/// Closed-form variance of the empirical risk for a fixed classifier in the
/// infinite-unlabeled limit.
pub fn asymptotic_variance(family: RiskFamily, gamma: f64, profile: &VarianceProfile) -> f64 {
    let (p, n) = (profile.psi_p, profile.psi_n);
    let g = gamma;
    match family {
        RiskFamily::Pn => p + n,
        RiskFamily::NPunu => 4.0 * (1.0 - g) * (1.0 - g) * p + 4.0 * g * g * n,
        RiskFamily::NPnpu => (1.0 + g) * (1.0 + g) * p + (1.0 - g) * (1.0 - g) * n,
        RiskFamily::NPnnu => (1.0 - g) * (1.0 - g) * p + (1.0 + g) * (1.0 + g) * n,
        other => panic!("no asymptotic variance formula for {other}"),
    }
}

/// The confidence-term shape `c_p theta_p / sqrt(n_p) + c_n theta_n /
/// sqrt(n_n) + c_u / sqrt(n_u)` shared by all generalization bounds.
pub fn chi(
    c_p: f64,
    c_n: f64,
    c_u: f64,
    prior: ClassPrior,
    n_p: usize,
    n_n: usize,
    n_u: usize,
) -> Result<f64> {
    if n_p == 0 || n_n == 0 || n_u == 0 {
        return Err(Error::config("chi needs all sample counts >= 1"));
    }
    Ok(c_p * prior.theta_p() / (n_p as f64).sqrt()
        + c_n * prior.theta_n() / (n_n as f64).sqrt()
        + c_u / (n_u as f64).sqrt())
}

/// Inputs of the generalization bounds: the hyperplane and feature norm caps
/// of the classifier class, the confidence level, and the sample layout.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundInputs {
    pub c_w: f64,
    pub c_phi: f64,
    pub delta: f64,
    pub n_p: usize,
    pub n_n: usize,
    pub n_u: usize,
    pub theta_p: f64,
}

impl BoundInputs {
    pub fn new(
        c_w: f64,
        c_phi: f64,
        delta: f64,
        n_p: usize,
        n_n: usize,
        n_u: usize,
        prior: ClassPrior,
    ) -> Result<Self> {
        if !(c_w > 0.0 && c_phi > 0.0) {
            return Err(Error::config("norm caps must be positive"));
        }
        if !(delta > 0.0 && delta < 1.0) {
            return Err(Error::config(format!(
                "confidence level must lie in (0, 1), got {delta}"
            )));
        }
        Ok(BoundInputs {
            c_w,
            c_phi,
            delta,
            n_p,
            n_n,
            n_u,
            theta_p: prior.theta_p(),
        })
    }

    /// Auto-fills the norm caps from a trained classifier: `c_w` is the l2
    /// norm of its weights and `c_phi` the largest feature norm over the
    /// given points.
    pub fn from_trained(
        classifier: &Classifier,
        points: &[Vec<f64>],
        delta: f64,
        n_p: usize,
        n_n: usize,
        n_u: usize,
        prior: ClassPrior,
    ) -> Result<Self> {
        let c_w = classifier
            .weights
            .iter()
            .map(|w| w * w)
            .sum::<f64>()
            .sqrt()
            .max(f64::MIN_POSITIVE);
        let c_phi = points
            .iter()
            .map(|x| {
                classifier
                    .basis
                    .featurize(x)
                    .iter()
                    .map(|v| v * v)
                    .sum::<f64>()
                    .sqrt()
            })
            .fold(0.0_f64, f64::max)
            .max(f64::MIN_POSITIVE);
        BoundInputs::new(c_w, c_phi, delta, n_p, n_n, n_u, prior)
    }
}

/// High-probability upper bound on the misclassification rate from the
/// empirical risk of a combined family. Non-convex families pay twice the
/// empirical risk, convex families four times, each plus a scaled chi
/// confidence term.
pub fn generalization_bound(
    family: RiskFamily,
    gamma: f64,
    empirical_risk: f64,
    inputs: &BoundInputs,
) -> Result<f64> {
    if !(0.0..=1.0).contains(&gamma) {
        return Err(Error::config(format!(
            "bound needs gamma in [0, 1], got {gamma}"
        )));
    }
    let prior = ClassPrior::new(inputs.theta_p)?;
    let g = gamma;
    let (risk_scale, log_arg, chi_args) = match family {
        RiskFamily::NPunu => (2.0, 3.0, (2.0 - 2.0 * g, 2.0 * g, (2.0 * g - 1.0).abs())),
        RiskFamily::NPnpu => (2.0, 3.0, (1.0 + g, 1.0 - g, g)),
        RiskFamily::NPnnu => (2.0, 3.0, (1.0 - g, 1.0 + g, g)),
        RiskFamily::CPunu => (4.0, 4.0, (1.0 - g, g, 1.0)),
        RiskFamily::CPnpu => (4.0, 4.0, (1.0, 1.0 - g, g)),
        RiskFamily::CPnnu => (4.0, 4.0, (1.0 - g, 1.0, g)),
        other => {
            return Err(Error::config(format!(
                "generalization bound is defined for the combined families; got {other}"
            )))
        }
    };
    let constant =
        risk_scale * inputs.c_w * inputs.c_phi + (2.0 * (log_arg / inputs.delta).ln()).sqrt();
    let confidence = constant
        * chi(
            chi_args.0, chi_args.1, chi_args.2, prior, inputs.n_p, inputs.n_n, inputs.n_u,
        )?;
    Ok(risk_scale * empirical_risk + confidence)
}

/// The finite-sample comparison ratios of PU and NU against PN training,
/// plus their infinite-unlabeled limits (whose product is exactly 1).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AlphaRatios {
    pub pu_pn: f64,
    pub nu_pn: f64,
    pub pu_pn_limit: f64,
    pub nu_pn_limit: f64,
}

pub fn alpha_ratios(prior: ClassPrior, n_p: usize, n_n: usize, n_u: usize) -> Result<AlphaRatios> {
    if n_p == 0 || n_n == 0 || n_u == 0 {
        return Err(Error::config("alpha ratios need all sample counts >= 1"));
    }
    let p_rate = prior.theta_p() / (n_p as f64).sqrt();
    let n_rate = prior.theta_n() / (n_n as f64).sqrt();
    let u_rate = 1.0 / (n_u as f64).sqrt();
    Ok(AlphaRatios {
        pu_pn: (p_rate + u_rate) / n_rate,
        nu_pn: (n_rate + u_rate) / p_rate,
        pu_pn_limit: p_rate / n_rate,
        nu_pn_limit: n_rate / p_rate,
    })
}
