//! Decision procedures: the per-act criterion for primitive normality, the
//! class-level decision for commutative monoids, the amalgam counterexample,
//! and the necessary conditions around them.

mod class;
mod counterexample;
mod criterion;

use serde::Serialize;

pub use crate::formula::{detect_primitive_group, GroupCertificate, GroupError};
pub use class::{
    check_r_decomposition, decide_class, idempotent_comparability, is_regularly_linearly_ordered, ClassDecision,
    ClassWitness, Decomposition, DeciderError, IdempotentProbe, Inapplicable,
};
pub use counterexample::{build_counterexample, Counterexample, CounterexampleError};
pub use criterion::{
    necessity_violation, theorem1_check, theorem1_check_bounded, BoundedWitness, CriterionWitness, ExplicitInstance,
    NecessityViolation,
};

/// Outcome of a check that either holds, fails with a witness, or does not apply.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "outcome", content = "witness", rename_all = "snake_case")]
pub enum Verdict<W> {
    Holds,
    Fails(W),
    Inapplicable(String),
}

impl<W> Verdict<W> {
    pub fn holds(&self) -> bool {
        matches!(self, Verdict::Holds)
    }

    pub fn fails(&self) -> bool {
        matches!(self, Verdict::Fails(_))
    }

    pub fn witness(&self) -> Option<&W> {
        match self {
            Verdict::Fails(w) => Some(w),
            _ => None,
        }
    }
}
