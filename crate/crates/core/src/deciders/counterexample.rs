//! The amalgam witnessing failure of primitive normality when two elements
//! of `Sa` (`a ∈ R`) have incomparable principal left ideals.
//!
//! With `e` an idempotent of `R` and `Sa ≅ Se`, take three copies of `ₛSe`,
//! glue `c` of the first copy to `c` of the second and `b` of the second to
//! `b` of the third. In the quotient the copies of
//! `∃u (s_b·u = x ∧ s_c·u = y)` at `x = b₁` and `x = b₂` share `c₁` while
//! only the second contains `c₃`.

use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use super::criterion::{theorem1_check, CriterionWitness};
use crate::act::{congruence_closure, coproduct, quotient, Act, ActSummary, Point};
use crate::formula::{solution_set, Atom, Formula, FormulaSummary};
use crate::monoid::{Elem, Monoid};

#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize)]
#[serde(tag = "error", rename_all = "snake_case")]
pub enum CounterexampleError {
    #[error("{a} is not in the regular part")]
    NotInR { a: Elem },
    #[error("{x} is not in the orbit of {a}")]
    NotInOrbit { a: Elem, x: Elem },
    #[error("the principal left ideals of {b} and {c} are comparable")]
    ComparableIdeals { b: Elem, c: Elem },
    #[error("no idempotent e of the regular part has Se isomorphic to S{a}")]
    NoIdempotentWitness { a: Elem },
    #[error("the glued act is not regular (point {point})")]
    QuotientNotRegular { point: String },
    #[error("the probe formula does not separate the glued copies")]
    ViolationNotReproduced,
    #[error("the glued act satisfies the per-act criterion")]
    CriterionHolds,
}

#[derive(Debug, Clone, Serialize)]
pub struct Counterexample {
    pub e: Elem,
    /// `b` and `c` moved into `Se` along `a ↦ e`, with the multipliers used.
    pub b_in_se: Elem,
    pub c_in_se: Elem,
    pub s_b: Elem,
    pub s_c: Elem,
    #[serde(skip)]
    pub act: Act,
    #[serde(rename = "act")]
    pub summary: ActSummary,
    #[serde(skip)]
    pub formula: Formula,
    #[serde(rename = "formula")]
    pub formula_summary: FormulaSummary,
    /// Points of the glued act: parameters `b₁, b₂`, shared `c₁`, separating `c₃`.
    pub params: [Point; 2],
    pub shared: Point,
    pub separating: Point,
    pub criterion: CriterionWitness,
}

impl Counterexample {
    /// Re-evaluates both copies on the glued act.
    pub fn verify(&self) -> bool {
        let first = solution_set(&self.formula, &self.act, &[self.params[0]]);
        let second = solution_set(&self.formula, &self.act, &[self.params[1]]);
        first.contains(&[self.shared])
            && second.contains(&[self.shared])
            && !first.contains(&[self.separating])
            && second.contains(&[self.separating])
    }
}

fn multiplier(m: &Monoid, a: Elem, x: Elem) -> Option<Elem> {
    m.elements().find(|&s| m.mul(s, a) == x)
}

pub fn build_counterexample(m: &Arc<Monoid>, a: Elem, b: Elem, c: Elem) -> Result<Counterexample, CounterexampleError> {
    if !crate::act::regular_part(m).contains(a) {
        return Err(CounterexampleError::NotInR { a });
    }
    let s_b = multiplier(m, a, b).ok_or(CounterexampleError::NotInOrbit { a, x: b })?;
    let s_c = multiplier(m, a, c).ok_or(CounterexampleError::NotInOrbit { a, x: c })?;
    if m.left_ideal_subset(b, c) || m.left_ideal_subset(c, b) {
        return Err(CounterexampleError::ComparableIdeals { b, c });
    }
    let regular = Act::regular_representation(m);
    let e = regular.regular_via_idempotent(a).ok_or(CounterexampleError::NoIdempotentWitness { a })?;
    let (b_in_se, c_in_se) = (m.mul(s_b, e), m.mul(s_c, e));

    let se = regular.cyclic_subact(e);
    let local = |x: Elem| se.inclusion.iter().position(|&p| p == x).expect("in Se");
    let copies = coproduct(&[se.act.clone(), se.act.clone(), se.act.clone()]).expect("same monoid");
    let at = |copy: usize, x: Elem| copies.injections[copy][local(x)];
    let theta = congruence_closure(&copies.act, &[(at(0, c_in_se), at(1, c_in_se)), (at(1, b_in_se), at(2, b_in_se))]);
    let q = quotient(&copies.act, &theta).expect("closure is a congruence");
    let glued = q.act;
    if let Some(p) = glued.non_regular_point() {
        return Err(CounterexampleError::QuotientNotRegular { point: glued.name(p).to_string() });
    }
    let point = |copy: usize, x: Elem| q.projection[at(copy, x)];

    // free variables in the order (y, x), so x is the parameter
    let (y, x, u) = (0, 1, 2);
    let formula = Formula::new(
        vec!["y".into(), "x".into()],
        vec!["u".into()],
        vec![Atom::new(s_b, u, m.identity(), x), Atom::new(s_c, u, m.identity(), y)],
    )
    .expect("well scoped");
    let formula_summary = FormulaSummary::new(&formula, m);
    let criterion = match theorem1_check(&glued) {
        super::Verdict::Fails(w) => w,
        _ => return Err(CounterexampleError::CriterionHolds),
    };
    let cx = Counterexample {
        e,
        b_in_se,
        c_in_se,
        s_b,
        s_c,
        summary: ActSummary::from(&glued),
        act: glued,
        formula,
        formula_summary,
        params: [point(0, b_in_se), point(1, b_in_se)],
        shared: point(0, c_in_se),
        separating: point(2, c_in_se),
        criterion,
    };
    if !cx.verify() {
        return Err(CounterexampleError::ViolationNotReproduced);
    }
    Ok(cx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::act::fixtures::diamond_arc;
    use crate::deciders::{is_regularly_linearly_ordered, Verdict};
    use crate::formula::is_copy_normal;
    use crate::monoid::enumerate_commutative_monoids;

    #[test]
    fn diamond_amalgam() {
        let d = diamond_arc();
        let cx = build_counterexample(&d, 0, 1, 2).unwrap();
        assert_eq!(cx.e, 0);
        // ₛD has 4 points; gluing one point twice leaves 8 classes of 12
        assert_eq!(cx.act.size(), 8);
        assert!(cx.act.is_regular());
        assert_eq!(cx.formula_summary.text, "exists u : e*u = x & f*u = y");
        assert!(!is_copy_normal(&cx.formula, &cx.act, 1).is_normal());
    }

    #[test]
    fn rejects_bad_input() {
        let d = diamond_arc();
        assert_eq!(build_counterexample(&d, 0, 1, 3).unwrap_err(), CounterexampleError::ComparableIdeals { b: 1, c: 3 });
        assert_eq!(build_counterexample(&d, 1, 1, 2).unwrap_err(), CounterexampleError::NotInOrbit { a: 1, x: 2 });
        let nil = Arc::new(Monoid::from_table(vec![vec![0, 1, 2], vec![1, 2, 2], vec![2, 2, 2]]).unwrap());
        assert_eq!(build_counterexample(&nil, 1, 1, 2).unwrap_err(), CounterexampleError::NotInR { a: 1 });
    }

    #[test]
    fn every_failure_of_regular_linearity_builds() {
        let mut built = 0;
        for n in 1..=5 {
            for m in enumerate_commutative_monoids(n).unwrap() {
                let m = Arc::new(m);
                if crate::act::regular_part(&m).is_empty() {
                    continue;
                }
                if let Ok(Verdict::Fails([a, b, c])) = is_regularly_linearly_ordered(&m) {
                    let cx = build_counterexample(&m, a, b, c).unwrap();
                    assert!(cx.verify());
                    built += 1;
                }
            }
        }
        assert!(built > 0);
    }
}
