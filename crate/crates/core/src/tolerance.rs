//! Residual thresholds, graded by how many derivatives an identity involves.

use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Tolerances {
    /// Pointwise algebra on curvature.
    pub algebraic: f64,
    /// One derivative of curvature, or first-order invariants of `J`.
    pub first_order: f64,
    /// `δW`, Cotton–York and the `α`, `β` formulas.
    pub second_order: f64,
    /// Bach tensor and the 2-form Weitzenböck formula.
    pub bach: f64,
    /// Vanishing tests behind classification verdicts.
    pub verdict: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            algebraic: 1e-9,
            first_order: 1e-8,
            second_order: 1e-7,
            bach: 1e-6,
            verdict: 1e-7,
        }
    }
}

impl Tolerances {
    pub fn scaled(factor: f64) -> Self {
        let d = Self::default();
        Tolerances {
            algebraic: d.algebraic * factor,
            first_order: d.first_order * factor,
            second_order: d.second_order * factor,
            bach: d.bach * factor,
            verdict: d.verdict * factor,
        }
    }
}
