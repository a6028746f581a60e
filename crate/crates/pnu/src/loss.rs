//! Margin loss functions and their composite forms.
//!
//! Every risk estimator in this crate averages `loss(sign * g(x))` over a
//! sample set, so losses are closed-form functions of the margin. The two
//! algebraic conditions checked by [`Loss::satisfies`] decide which risk
//! constructions a loss is eligible for:
//!
//! - **Symmetry**: `l(m) + l(-m) = 1`, required by the non-convex
//!   positive-unlabeled constructions (ramp, zero-one).
//! - **Linear composite**: `l(m) - l(-m) = -m`, required by the convex
//!   constructions (scaled squared, linear).

use serde::{Deserialize, Serialize};

/// Named margin loss with exact closed-form evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Loss {
    /// `(1 - sign(m)) / 2` with the tie convention `sign(0) = +1`.
    ZeroOne,
    /// `max(0, min(2, 1 - m)) / 2`, clipped to `[0, 1]`.
    Ramp,
    /// `(m - 1)^2 / 4`.
    ScaledSquared,
    /// `1/4` for `m <= 0`, `(m - 1)^2 / 4` for `0 < m <= 1`, `0` for `m > 1`.
    TruncatedSquared,
    /// `-m`.
    Linear,
    /// `max(0, 1 - m)`.
    Hinge,
}

/// Algebraic identities a loss may satisfy; see the module docs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LossCondition {
    /// `l(m) + l(-m) = 1` for all margins.
    Symmetry,
    /// `l(m) - l(-m) = -m` for all margins.
    LinearComposite,
}

fn sign_tie_positive(m: f64) -> f64 {
    if m < 0.0 {
        -1.0
    } else {
        1.0
    }
}

impl Loss {
    pub const ALL: [Loss; 6] = [
        Loss::ZeroOne,
        Loss::Ramp,
        Loss::ScaledSquared,
        Loss::TruncatedSquared,
        Loss::Linear,
        Loss::Hinge,
    ];

    /// Evaluates the loss at the given margin.
    ///
    /// Panics on a non-finite margin; margins produced by finite weights over
    /// finite features are always finite.
    pub fn evaluate(self, margin: f64) -> f64 {
        assert!(margin.is_finite(), "non-finite margin {margin}");
        match self {
            Loss::ZeroOne => (1.0 - sign_tie_positive(margin)) / 2.0,
            Loss::Ramp => 0.5 * (1.0 - margin).clamp(0.0, 2.0),
            Loss::ScaledSquared => (margin - 1.0) * (margin - 1.0) / 4.0,
            Loss::TruncatedSquared => {
                if margin <= 0.0 {
                    0.25
                } else if margin <= 1.0 {
                    (margin - 1.0) * (margin - 1.0) / 4.0
                } else {
                    0.0
                }
            }
            Loss::Linear => -margin,
            Loss::Hinge => (1.0 - margin).max(0.0),
        }
    }

    /// Composite form `l(m) - l(-m)`, in closed form per kind so the
    /// identities below hold exactly rather than up to cancellation error.
    pub fn composite(self, margin: f64) -> f64 {
        assert!(margin.is_finite(), "non-finite margin {margin}");
        match self {
            Loss::ZeroOne => (sign_tie_positive(-margin) - sign_tie_positive(margin)) / 2.0,
            Loss::Ramp => 2.0 * self.evaluate(margin) - 1.0,
            Loss::ScaledSquared => -margin,
            Loss::TruncatedSquared => {
                if margin <= -1.0 {
                    0.25
                } else if margin <= 0.0 {
                    0.25 - (margin + 1.0) * (margin + 1.0) / 4.0
                } else if margin <= 1.0 {
                    (margin - 1.0) * (margin - 1.0) / 4.0 - 0.25
                } else {
                    -0.25
                }
            }
            Loss::Linear => -2.0 * margin,
            Loss::Hinge => self.evaluate(margin) - self.evaluate(-margin),
        }
    }

    /// Whether the named identity holds for this loss, decided analytically
    /// per kind rather than by sampling.
    pub fn satisfies(self, condition: LossCondition) -> bool {
        match condition {
            LossCondition::Symmetry => matches!(self, Loss::ZeroOne | Loss::Ramp),
            LossCondition::LinearComposite => matches!(self, Loss::ScaledSquared | Loss::Linear),
        }
    }

    pub fn is_convex(self) -> bool {
        matches!(self, Loss::ScaledSquared | Loss::Linear | Loss::Hinge)
    }

    /// Global Lipschitz constant; infinite for the discontinuous zero-one
    /// loss and the unbounded-slope squared loss.
    pub fn lipschitz(self) -> f64 {
        match self {
            Loss::ZeroOne | Loss::ScaledSquared => f64::INFINITY,
            Loss::Ramp | Loss::TruncatedSquared => 0.5,
            Loss::Linear | Loss::Hinge => 1.0,
        }
    }

    /// Lowercase config name, e.g. `"scaled_squared"`.
    pub fn name(self) -> &'static str {
        match self {
            Loss::ZeroOne => "zero_one",
            Loss::Ramp => "ramp",
            Loss::ScaledSquared => "scaled_squared",
            Loss::TruncatedSquared => "truncated_squared",
            Loss::Linear => "linear",
            Loss::Hinge => "hinge",
        }
    }

    /// Parses a lowercase config name.
    pub fn parse(name: &str) -> Option<Loss> {
        Loss::ALL.iter().copied().find(|l| l.name() == name)
    }
}

impl std::fmt::Display for Loss {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}
