//! Risk estimators as data: every risk is a weighted list of
//! `(source set, margin sign, loss)` terms plus an additive constant, built
//! from one of the family tables below and evaluated against a
//! [`TripleDataset`].
//!
//! Base families (theta denotes the class prior of the unlabeled marginal,
//! `l` the chosen loss):
//!
//! | family | terms                                         | constant   |
//! |--------|-----------------------------------------------|------------|
//! | PN     | tP (P,+,l) + tN (N,-,l)                       | 0          |
//! | N-PU   | 2 tP (P,+,l) + (U,-,l)                        | -tP        |
//! | N-NU   | 2 tN (N,-,l) + (U,+,l)                        | -tN        |
//! | C-PU   | tP (P,+,linear) + (U,-,l)                     | 0          |
//! | C-NU   | tN (N,-,linear) + (U,+,l)                     | 0          |
//!
//! Non-convex families require the symmetry condition `l(m) + l(-m) = 1`;
//! convex families require the linear-composite condition `l(m) - l(-m) = -m`.
//! The truncated squared loss is also accepted by the convex families for
//! bound evaluation: there the linear surrogate terms are replaced by the
//! exact composite `l(m) - l(-m)`, carried as a pair of plain terms with
//! weights `+c` and `-c`.

use serde::{Deserialize, Serialize};

use crate::data::{ClassPrior, SampleSet, TripleDataset};
use crate::error::{Error, Result};
use crate::loss::{Loss, LossCondition};
use crate::model::Classifier;

/// Which sample set a term averages over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SampleSource {
    #[serde(rename = "P")]
    Positive,
    #[serde(rename = "N")]
    Negative,
    #[serde(rename = "U")]
    Unlabeled,
}

impl SampleSource {
    fn name(self) -> &'static str {
        match self {
            SampleSource::Positive => "P",
            SampleSource::Negative => "N",
            SampleSource::Unlabeled => "U",
        }
    }
}

/// Sign applied to the decision value inside the loss: a term averages
/// `loss(sign * g(x))` over its source set.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MarginSign {
    Plus,
    Minus,
}

impl MarginSign {
    pub fn factor(self) -> f64 {
        match self {
            MarginSign::Plus => 1.0,
            MarginSign::Minus => -1.0,
        }
    }
}

impl Serialize for MarginSign {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_i8(match self {
            MarginSign::Plus => 1,
            MarginSign::Minus => -1,
        })
    }
}

impl<'de> Deserialize<'de> for MarginSign {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        match i8::deserialize(d)? {
            1 => Ok(MarginSign::Plus),
            -1 => Ok(MarginSign::Minus),
            v => Err(serde::de::Error::custom(format!("invalid sign {v}"))),
        }
    }
}

/// One weighted term: `weight * mean_{x in source} loss(sign * g(x))`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RiskTerm {
    pub source: SampleSource,
    pub sign: MarginSign,
    pub weight: f64,
    pub loss: Loss,
}

/// The risk families of this crate; `N-` marks non-convex constructions,
/// `C-` convex ones. `PNU` is the signed umbrella over PNPU/PNNU.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RiskFamily {
    #[serde(rename = "PN")]
    Pn,
    #[serde(rename = "N-PU")]
    NPu,
    #[serde(rename = "C-PU")]
    CPu,
    #[serde(rename = "N-NU")]
    NNu,
    #[serde(rename = "C-NU")]
    CNu,
    #[serde(rename = "N-PUNU")]
    NPunu,
    #[serde(rename = "C-PUNU")]
    CPunu,
    #[serde(rename = "N-PNPU")]
    NPnpu,
    #[serde(rename = "C-PNPU")]
    CPnpu,
    #[serde(rename = "N-PNNU")]
    NPnnu,
    #[serde(rename = "C-PNNU")]
    CPnnu,
    #[serde(rename = "PNU")]
    Pnu,
}

impl RiskFamily {
    pub const BASE: [RiskFamily; 5] = [
        RiskFamily::Pn,
        RiskFamily::NPu,
        RiskFamily::CPu,
        RiskFamily::NNu,
        RiskFamily::CNu,
    ];

    pub const COMBINED: [RiskFamily; 6] = [
        RiskFamily::NPunu,
        RiskFamily::CPunu,
        RiskFamily::NPnpu,
        RiskFamily::CPnpu,
        RiskFamily::NPnnu,
        RiskFamily::CPnnu,
    ];

    pub fn name(self) -> &'static str {
        match self {
            RiskFamily::Pn => "PN",
            RiskFamily::NPu => "N-PU",
            RiskFamily::CPu => "C-PU",
            RiskFamily::NNu => "N-NU",
            RiskFamily::CNu => "C-NU",
            RiskFamily::NPunu => "N-PUNU",
            RiskFamily::CPunu => "C-PUNU",
            RiskFamily::NPnpu => "N-PNPU",
            RiskFamily::CPnpu => "C-PNPU",
            RiskFamily::NPnnu => "N-PNNU",
            RiskFamily::CPnnu => "C-PNNU",
            RiskFamily::Pnu => "PNU",
        }
    }

    pub fn parse(name: &str) -> Option<RiskFamily> {
        let all = [
            RiskFamily::Pn,
            RiskFamily::NPu,
            RiskFamily::CPu,
            RiskFamily::NNu,
            RiskFamily::CNu,
            RiskFamily::NPunu,
            RiskFamily::CPunu,
            RiskFamily::NPnpu,
            RiskFamily::CPnpu,
            RiskFamily::NPnnu,
            RiskFamily::CPnnu,
            RiskFamily::Pnu,
        ];
        let upper = name.to_ascii_uppercase();
        all.into_iter().find(|f| f.name() == upper)
    }

    /// Whether this family's composite parts use the convex construction.
    pub fn is_convex_family(self) -> bool {
        matches!(
            self,
            RiskFamily::CPu
                | RiskFamily::CNu
                | RiskFamily::CPunu
                | RiskFamily::CPnpu
                | RiskFamily::CPnnu
        )
    }
}

impl std::fmt::Display for RiskFamily {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Whether a PNU spec expands through the non-convex or the convex tables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PnuMode {
    NonConvex,
    Convex,
}

/// A risk estimator in expanded form. Serializes to
/// `{family, combo, theta_p, loss, terms, constant}` for audit output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RiskSpec {
    pub family: RiskFamily,
    /// Combination parameter: gamma for the combined families, eta for PNU,
    /// 0 for the base families.
    pub combo: f64,
    pub theta_p: f64,
    pub loss: Loss,
    pub terms: Vec<RiskTerm>,
    pub constant: f64,
}

fn require(loss: Loss, condition: LossCondition, family: RiskFamily) -> Result<()> {
    if loss.satisfies(condition) {
        return Ok(());
    }
    let name = match condition {
        LossCondition::Symmetry => "l(m) + l(-m) = 1",
        LossCondition::LinearComposite => "l(m) - l(-m) = -m",
    };
    Err(Error::config(format!(
        "loss '{loss}' is incompatible with family {family}: requires {name}"
    )))
}

/// Checks convex-family eligibility: the linear-composite condition, or the
/// truncated squared loss whose exact composite is used instead.
fn require_convex(loss: Loss, family: RiskFamily) -> Result<()> {
    if loss == Loss::TruncatedSquared {
        return Ok(());
    }
    require(loss, LossCondition::LinearComposite, family)
}

struct TermList(Vec<RiskTerm>);

impl TermList {
    fn new() -> Self {
        TermList(Vec::new())
    }

    fn push(&mut self, source: SampleSource, sign: MarginSign, weight: f64, loss: Loss) {
        if weight != 0.0 {
            self.0.push(RiskTerm {
                source,
                sign,
                weight,
                loss,
            });
        }
    }

    /// Composite-loss term `weight * mean l~(sign * g)`: a linear-loss term
    /// for eligible convex losses, an exact two-term expansion for the
    /// truncated squared loss.
    fn push_composite(&mut self, source: SampleSource, sign: MarginSign, weight: f64, loss: Loss) {
        if loss == Loss::TruncatedSquared {
            let flipped = match sign {
                MarginSign::Plus => MarginSign::Minus,
                MarginSign::Minus => MarginSign::Plus,
            };
            self.push(source, sign, weight, loss);
            self.push(source, flipped, -weight, loss);
        } else {
            self.push(source, sign, weight, Loss::Linear);
        }
    }
}

/// Builds one of the base risks: PN, N-PU, C-PU, N-NU, or C-NU.
pub fn build_base(family: RiskFamily, prior: ClassPrior, loss: Loss) -> Result<RiskSpec> {
    use MarginSign::{Minus, Plus};
    use SampleSource::{Negative, Positive, Unlabeled};

    let tp = prior.theta_p();
    let tn = prior.theta_n();
    let mut terms = TermList::new();
    let constant = match family {
        RiskFamily::Pn => {
            terms.push(Positive, Plus, tp, loss);
            terms.push(Negative, Minus, tn, loss);
            0.0
        }
        RiskFamily::NPu => {
            require(loss, LossCondition::Symmetry, family)?;
            terms.push(Positive, Plus, 2.0 * tp, loss);
            terms.push(Unlabeled, Minus, 1.0, loss);
            -tp
        }
        RiskFamily::NNu => {
            require(loss, LossCondition::Symmetry, family)?;
            terms.push(Negative, Minus, 2.0 * tn, loss);
            terms.push(Unlabeled, Plus, 1.0, loss);
            -tn
        }
        RiskFamily::CPu => {
            require_convex(loss, family)?;
            terms.push_composite(Positive, Plus, tp, loss);
            terms.push(Unlabeled, Minus, 1.0, loss);
            0.0
        }
        RiskFamily::CNu => {
            require_convex(loss, family)?;
            terms.push_composite(Negative, Minus, tn, loss);
            terms.push(Unlabeled, Plus, 1.0, loss);
            0.0
        }
        other => {
            return Err(Error::config(format!(
                "{other} is not a base family; use build_combined or build_pnu"
            )))
        }
    };
    Ok(RiskSpec {
        family,
        combo: 0.0,
        theta_p: tp,
        loss,
        terms: terms.0,
        constant,
    })
}

/// Builds one of the gamma-combined risks over an interpolation weight in
/// [0, 1].
pub fn build_combined(
    family: RiskFamily,
    gamma: f64,
    prior: ClassPrior,
    loss: Loss,
) -> Result<RiskSpec> {
    use MarginSign::{Minus, Plus};
    use SampleSource::{Negative, Positive, Unlabeled};

    if !(0.0..=1.0).contains(&gamma) {
        return Err(Error::config(format!(
            "combination weight must lie in [0, 1], got {gamma}"
        )));
    }
    let tp = prior.theta_p();
    let tn = prior.theta_n();
    let g = gamma;
    let mut terms = TermList::new();
    let constant = match family {
        RiskFamily::NPunu => {
            require(loss, LossCondition::Symmetry, family)?;
            terms.push(Positive, Plus, (2.0 - 2.0 * g) * tp, loss);
            terms.push(Negative, Minus, 2.0 * g * tn, loss);
            terms.push(Unlabeled, Minus, 1.0 - g, loss);
            terms.push(Unlabeled, Plus, g, loss);
            -(1.0 - g) * tp - g * tn
        }
        RiskFamily::NPnpu => {
            require(loss, LossCondition::Symmetry, family)?;
            terms.push(Positive, Plus, (1.0 + g) * tp, loss);
            terms.push(Negative, Minus, (1.0 - g) * tn, loss);
            terms.push(Unlabeled, Minus, g, loss);
            -g * tp
        }
        RiskFamily::NPnnu => {
            require(loss, LossCondition::Symmetry, family)?;
            terms.push(Positive, Plus, (1.0 - g) * tp, loss);
            terms.push(Negative, Minus, (1.0 + g) * tn, loss);
            terms.push(Unlabeled, Plus, g, loss);
            -g * tn
        }
        RiskFamily::CPunu => {
            require_convex(loss, family)?;
            terms.push_composite(Positive, Plus, (1.0 - g) * tp, loss);
            terms.push_composite(Negative, Minus, g * tn, loss);
            terms.push(Unlabeled, Minus, 1.0 - g, loss);
            terms.push(Unlabeled, Plus, g, loss);
            0.0
        }
        RiskFamily::CPnpu => {
            require_convex(loss, family)?;
            // the PN part keeps the plain loss; only the PU composite part
            // is linearized
            terms.push(Positive, Plus, (1.0 - g) * tp, loss);
            terms.push(Negative, Minus, (1.0 - g) * tn, loss);
            terms.push_composite(Positive, Plus, g * tp, loss);
            terms.push(Unlabeled, Minus, g, loss);
            0.0
        }
        RiskFamily::CPnnu => {
            require_convex(loss, family)?;
            terms.push(Positive, Plus, (1.0 - g) * tp, loss);
            terms.push(Negative, Minus, (1.0 - g) * tn, loss);
            terms.push_composite(Negative, Minus, g * tn, loss);
            terms.push(Unlabeled, Plus, g, loss);
            0.0
        }
        other => {
            return Err(Error::config(format!(
                "{other} is not a gamma-combined family"
            )))
        }
    };
    Ok(RiskSpec {
        family,
        combo: gamma,
        theta_p: tp,
        loss,
        terms: terms.0,
        constant,
    })
}

/// Builds the signed PNU risk: `eta >= 0` selects the PNPU branch with
/// `gamma = eta`, `eta < 0` the PNNU branch with `gamma = -eta`. At the
/// endpoints this collapses to the PU / NU tables and at 0 to PN.
pub fn build_pnu(eta: f64, prior: ClassPrior, loss: Loss, mode: PnuMode) -> Result<RiskSpec> {
    if !(-1.0..=1.0).contains(&eta) {
        return Err(Error::config(format!(
            "eta must lie in [-1, 1], got {eta}"
        )));
    }
    let (family, gamma) = match (eta >= 0.0, mode) {
        (true, PnuMode::NonConvex) => (RiskFamily::NPnpu, eta),
        (true, PnuMode::Convex) => (RiskFamily::CPnpu, eta),
        (false, PnuMode::NonConvex) => (RiskFamily::NPnnu, -eta),
        (false, PnuMode::Convex) => (RiskFamily::CPnnu, -eta),
    };
    let mut spec = build_combined(family, gamma, prior, loss)?;
    spec.family = RiskFamily::Pnu;
    spec.combo = eta;
    Ok(spec)
}

impl RiskSpec {
    fn source_set<'a>(&self, data: &'a TripleDataset, source: SampleSource) -> &'a SampleSet {
        match source {
            SampleSource::Positive => &data.positives,
            SampleSource::Negative => &data.negatives,
            SampleSource::Unlabeled => &data.unlabeled,
        }
    }

    /// Empirical risk: weighted term averages over the dataset plus the
    /// constant. Errors when a nonzero-weight term references an empty set.
    pub fn evaluate_empirical(&self, data: &TripleDataset, classifier: &Classifier) -> Result<f64> {
        let mut total = self.constant;
        for term in &self.terms {
            let set = self.source_set(data, term.source);
            if set.is_empty() {
                return Err(Error::Evaluation(format!(
                    "term on set {} has weight {} but the set is empty",
                    term.source.name(),
                    term.weight
                )));
            }
            let sign = term.sign.factor();
            let sum: f64 = set
                .iter()
                .map(|x| term.loss.evaluate(sign * classifier.decision(x)))
                .sum();
            total += term.weight * sum / set.len() as f64;
        }
        Ok(total)
    }

}

/// Zero-one PNU validation risk at the given trade-off, used as the
/// cross-validation score.
pub fn evaluate_zero_one_pnu(
    eta: f64,
    prior: ClassPrior,
    data: &TripleDataset,
    classifier: &Classifier,
) -> Result<f64> {
    let spec = build_pnu(eta, prior, Loss::ZeroOne, PnuMode::NonConvex)?;
    spec.evaluate_empirical(data, classifier)
}
