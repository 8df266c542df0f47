//! Hard constraints and their relaxations.
//!
//! Constraint values follow the convention `g ≤ 0 ⇔ satisfied`. A hard
//! constraint either holds or marks the point infeasible; a penalty
//! constraint adds `μ₁·exp(μ₂·g)` to the objective, which is negligible
//! when satisfied and grows steeply past the boundary; a slack constraint
//! reshapes `g ≤ 0` into `g − s ≤ 0` with `s ≥ 0` and charges `k_s · s²`.

use thiserror::Error;

/// Ceiling applied to exponential penalties so line searches stay finite.
pub const PENALTY_CLAMP: f64 = 1e30;

#[derive(Debug, Error, PartialEq)]
pub enum ConstraintError {
    #[error("operation requires kind {expected}, constraint '{id}' is {actual}")]
    KindMismatch {
        id: String,
        expected: &'static str,
        actual: &'static str,
    },
    #[error("penalty weights must be positive (mu1 = {mu1}, mu2 = {mu2})")]
    InvalidPenaltyWeights { mu1: f64, mu2: f64 },
    #[error("slack weight must be non-negative (ks = {ks})")]
    InvalidSlackWeight { ks: f64 },
    #[error("{what}: expected {expected}, got {got}")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        got: usize,
    },
}

/// Relaxation attached to a constraint.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ConstraintKind {
    /// Must hold exactly; violations mark the point infeasible.
    Hard,
    /// Exponential penalty μ₁·exp(μ₂·g) added to the objective.
    Penalty { mu1: f64, mu2: f64 },
    /// Slack variable s ≥ 0 with quadratic cost k_s·s².
    Slack { weight: f64 },
}

impl ConstraintKind {
    fn name(&self) -> &'static str {
        match self {
            ConstraintKind::Hard => "hard",
            ConstraintKind::Penalty { .. } => "penalty",
            ConstraintKind::Slack { .. } => "slack",
        }
    }
}

/// Default penalty weights: large enough to dominate desk-scale objectives
/// without overflowing for violations below order one.
pub const DEFAULT_MU1: f64 = 50.0;
pub const DEFAULT_MU2: f64 = 50.0;

/// A named inequality constraint `g(·) ≤ 0` with its relaxation.
#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub id: String,
    pub kind: ConstraintKind,
}

impl Constraint {
    pub fn hard(id: impl Into<String>) -> Self {
        Self {
            id: id.into(),
            kind: ConstraintKind::Hard,
        }
    }

    pub fn penalty(id: impl Into<String>, mu1: f64, mu2: f64) -> Result<Self, ConstraintError> {
        if mu1 <= 0.0 || mu2 <= 0.0 {
            return Err(ConstraintError::InvalidPenaltyWeights { mu1, mu2 });
        }
        Ok(Self {
            id: id.into(),
            kind: ConstraintKind::Penalty { mu1, mu2 },
        })
    }

    pub fn slack(id: impl Into<String>, weight: f64) -> Result<Self, ConstraintError> {
        if weight < 0.0 {
            return Err(ConstraintError::InvalidSlackWeight { ks: weight });
        }
        Ok(Self {
            id: id.into(),
            kind: ConstraintKind::Slack { weight },
        })
    }

    /// Penalty contribution for a measured constraint value.
    pub fn penalty_value(&self, g_val: f64) -> Result<f64, ConstraintError> {
        match self.kind {
            ConstraintKind::Penalty { mu1, mu2 } => Ok(exp_penalty(mu1, mu2, g_val)),
            ref k => Err(ConstraintError::KindMismatch {
                id: self.id.clone(),
                expected: "penalty",
                actual: k.name(),
            }),
        }
    }

    /// Emits the slack reshaping of this constraint: a new decision
    /// variable s ≥ 0, the reshaped inequality g − s ≤ 0, and the
    /// objective addend k_s·s².
    pub fn slack_relaxation(&self) -> Result<SlackRelaxation, ConstraintError> {
        match self.kind {
            ConstraintKind::Slack { weight } => Ok(SlackRelaxation {
                slack_id: format!("s_{}", self.id),
                weight,
            }),
            ref k => Err(ConstraintError::KindMismatch {
                id: self.id.clone(),
                expected: "slack",
                actual: k.name(),
            }),
        }
    }
}

/// Raw exponential penalty `min(μ₁·exp(μ₂·g), clamp)`.
pub fn exp_penalty(mu1: f64, mu2: f64, g_val: f64) -> f64 {
    (mu1 * (mu2 * g_val).exp()).min(PENALTY_CLAMP)
}

/// Descriptor of a slack-relaxed constraint.
///
/// Note that with weight 0 the addend vanishes and the slack variable is
/// free, so the constraint is fully relaxed rather than hard.
#[derive(Debug, Clone, PartialEq)]
pub struct SlackRelaxation {
    pub slack_id: String,
    /// Quadratic slack weight k_s ≥ 0.
    pub weight: f64,
}

impl SlackRelaxation {
    /// Reshaped constraint value `g − s` (≤ 0 ⇔ satisfied).
    pub fn reshaped(&self, g_val: f64, slack: f64) -> f64 {
        g_val - slack
    }

    /// Objective addend `k_s · s²`.
    pub fn objective_addend(&self, slack: f64) -> f64 {
        self.weight * slack * slack
    }
}

/// Immutable collection of constraints evaluated together.
#[derive(Debug, Clone, Default)]
pub struct ConstraintSet {
    constraints: Vec<Constraint>,
}

/// Augmented objective value with the hard-feasibility verdict kept apart.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AugmentedObjective {
    pub value: f64,
    pub hard_feasible: bool,
    /// Largest positive hard-constraint value (0 when feasible).
    pub max_hard_violation: f64,
}

impl ConstraintSet {
    pub fn new(constraints: Vec<Constraint>) -> Self {
        Self { constraints }
    }

    pub fn len(&self) -> usize {
        self.constraints.len()
    }

    pub fn is_empty(&self) -> bool {
        self.constraints.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Constraint> {
        self.constraints.iter()
    }

    /// Number of slack variables this set introduces.
    pub fn slack_count(&self) -> usize {
        self.constraints
            .iter()
            .filter(|c| matches!(c.kind, ConstraintKind::Slack { .. }))
            .count()
    }

    /// Assembles `base + Σ penalties + Σ k_s·s²`.
    ///
    /// `g_values` aligns with the full constraint list; `slack_values`
    /// aligns with the slack-kind subset in order. Hard constraints
    /// contribute nothing to the value but flip `hard_feasible`.
    pub fn total_augmented_objective(
        &self,
        base: f64,
        g_values: &[f64],
        slack_values: &[f64],
    ) -> Result<AugmentedObjective, ConstraintError> {
        if g_values.len() != self.constraints.len() {
            return Err(ConstraintError::DimensionMismatch {
                what: "constraint values",
                expected: self.constraints.len(),
                got: g_values.len(),
            });
        }
        let expected_slacks = self.slack_count();
        if slack_values.len() != expected_slacks {
            return Err(ConstraintError::DimensionMismatch {
                what: "slack values",
                expected: expected_slacks,
                got: slack_values.len(),
            });
        }
        let mut value = base;
        let mut hard_feasible = true;
        let mut max_hard_violation = 0.0f64;
        let mut slack_iter = slack_values.iter();
        for (c, &g) in self.constraints.iter().zip(g_values) {
            match c.kind {
                ConstraintKind::Hard => {
                    if g > 0.0 {
                        hard_feasible = false;
                        max_hard_violation = max_hard_violation.max(g);
                    }
                }
                ConstraintKind::Penalty { mu1, mu2 } => {
                    value += exp_penalty(mu1, mu2, g);
                }
                ConstraintKind::Slack { weight } => {
                    let s = *slack_iter.next().expect("slack count checked above");
                    value += weight * s * s;
                }
            }
        }
        Ok(AugmentedObjective {
            value,
            hard_feasible,
            max_hard_violation,
        })
    }
}
