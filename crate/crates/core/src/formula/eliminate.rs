//! Rewriting a quantifier-free conjunction so that a chosen variable `x₀`
//! occurs in a single atom `t·xᵢ = s·x₀`.
//!
//! Valid in regular acts over a commutative monoid whose regular part is
//! `R = eR` and linearly ordered. There every point satisfies `x = e·x`, so a
//! coefficient `s` next to `x₀` may be replaced by `s·e`, and two atoms
//! `t₁·xᵢ = s₁·x₀`, `t₂·xⱼ = s₂·x₀` with `s₁e = r·s₂e` can trade the first
//! for `r·t₂·xⱼ = t₁·xᵢ`.
//!
//! Each accepted step lowers (number of x₀-atoms, occurrences of x₀)
//! lexicographically. A merge that would keep both counts is skipped. Two
//! atoms of the form `t·x₀ = s·x₀` are compared directly: whether one holds
//! at a point depends only on which idempotent of `R` the point's cyclic
//! subact is isomorphic to, and the idempotents satisfying it form a down-set
//! of a chain, so one of the two implies the other.

use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use super::{Atom, Formula, Var};
use crate::act::regular_part;
use crate::monoid::{Elem, ElementSet, Monoid};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Precondition {
    Noncommutative,
    NotIdempotent,
    /// `R ≠ eR`.
    NotGeneratedByE,
    NotLinearlyOrdered,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EliminationError {
    #[error("precondition fails: {0:?}")]
    PreconditionFails(Precondition),
    #[error("input has quantified variables")]
    NotConjunction,
    #[error("variable {0} is not free")]
    NotFree(Var),
    /// No merge lowers the measure and no atom can be dropped.
    #[error("no measure-decreasing rewrite applies")]
    Stuck { atoms: Vec<Atom> },
}

/// `t·xᵢ = s·x₀`; `i` may be `x₀` itself.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Pivot {
    pub t: Elem,
    pub i: Var,
    pub s: Elem,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Elimination {
    /// Atoms without `x₀`.
    pub rest: Vec<Atom>,
    pub pivot: Pivot,
    /// (x₀-atoms, occurrences of x₀) before each step, then at the end.
    pub trace: Vec<(usize, usize)>,
}

impl Elimination {
    /// `rest ∧ pivot` over the variables of `original`.
    pub fn formula(&self, original: &Formula, x0: Var) -> Formula {
        let mut atoms = self.rest.clone();
        atoms.push(Atom::new(self.pivot.t, self.pivot.i, self.pivot.s, x0));
        Formula::new(original.free_names().to_vec(), Vec::new(), atoms).expect("same scope")
    }
}

/// Preconditions checked once per (monoid, e).
#[derive(Debug, Clone)]
pub struct Eliminator {
    monoid: Arc<Monoid>,
    e: Elem,
    /// Idempotents of `R`.
    idempotents: Vec<Elem>,
}

impl Eliminator {
    pub fn new(monoid: &Arc<Monoid>, e: Elem) -> Result<Eliminator, EliminationError> {
        let fail = |p| Err(EliminationError::PreconditionFails(p));
        if !monoid.is_commutative() {
            return fail(Precondition::Noncommutative);
        }
        if e >= monoid.order() || !monoid.is_idempotent(e) {
            return fail(Precondition::NotIdempotent);
        }
        let r = regular_part(monoid);
        let er = ElementSet::from_iter(monoid.order(), r.iter().map(|a| monoid.mul(e, a)));
        if r.is_empty() || er != r {
            return fail(Precondition::NotGeneratedByE);
        }
        if !matches!(monoid.is_linearly_ordered(&r), Ok(o) if o.is_linear()) {
            return fail(Precondition::NotLinearlyOrdered);
        }
        let idempotents = r.iter().filter(|&f| monoid.is_idempotent(f)).collect();
        Ok(Eliminator { monoid: monoid.clone(), e, idempotents })
    }

    pub fn eliminate(&self, phi: &Formula, x0: Var) -> Result<Elimination, EliminationError> {
        if !phi.is_quantifier_free() {
            return Err(EliminationError::NotConjunction);
        }
        if x0 >= phi.free_count() {
            return Err(EliminationError::NotFree(x0));
        }
        let m = &self.monoid;
        let mut atoms = phi.atoms().to_vec();
        let mut trace = vec![measure(&atoms, x0)];
        if trace[0].0 > 1 {
            while measure(&atoms, x0).0 > 1 {
                let before = measure(&atoms, x0);
                if let Some(k) = atoms.iter().position(|a| {
                    a.lhs.var == x0 && a.rhs.var == x0 && m.mul(a.lhs.coef, self.e) == m.mul(a.rhs.coef, self.e)
                }) {
                    atoms.remove(k);
                } else if let Some((k, merged)) = self.merge(&atoms, x0) {
                    atoms[k] = merged;
                } else if let Some(k) = self.weaker_two_sided(&atoms, x0) {
                    atoms.remove(k);
                } else {
                    return Err(EliminationError::Stuck { atoms });
                }
                let after = measure(&atoms, x0);
                debug_assert!(after < before);
                trace.push(after);
            }
        }
        let id = m.identity();
        let pivot = atoms
            .iter()
            .find(|a| a.mentions(x0))
            .map(|&a| orientations(a, x0)[0])
            .unwrap_or(Pivot { t: id, i: x0, s: id });
        let rest = atoms.into_iter().filter(|a| !a.mentions(x0)).collect();
        Ok(Elimination { rest, pivot, trace })
    }

    /// First replacement of an x₀-atom by a merge with another one that
    /// lowers the measure.
    fn merge(&self, atoms: &[Atom], x0: Var) -> Option<(usize, Atom)> {
        let m = &self.monoid;
        let before = measure(atoms, x0);
        let with_x0: Vec<usize> = (0..atoms.len()).filter(|&k| atoms[k].mentions(x0)).collect();
        for &p in &with_x0 {
            for &q in &with_x0 {
                if p == q {
                    continue;
                }
                for a1 in orientations(atoms[p], x0) {
                    for a2 in orientations(atoms[q], x0) {
                        let (s1e, s2e) = (m.mul(a1.s, self.e), m.mul(a2.s, self.e));
                        // s₁e ∈ S·s₂e, with the least divisor
                        let Some(r) = m.elements().find(|&r| m.mul(r, s2e) == s1e) else {
                            continue;
                        };
                        let merged = Atom::new(m.mul(r, a2.t), a2.i, a1.t, a1.i);
                        let mut next = atoms.to_vec();
                        next[p] = merged;
                        if measure(&next, x0) < before {
                            return Some((p, merged));
                        }
                    }
                }
            }
        }
        None
    }

    /// Of two atoms `t·x₀ = s·x₀`, one implied by the other; returns the
    /// index of the implied one.
    fn weaker_two_sided(&self, atoms: &[Atom], x0: Var) -> Option<usize> {
        let m = &self.monoid;
        let two_sided: Vec<usize> =
            (0..atoms.len()).filter(|&k| atoms[k].lhs.var == x0 && atoms[k].rhs.var == x0).collect();
        // idempotents of R at which the atom holds
        let holds = |a: Atom| -> Vec<bool> {
            self.idempotents.iter().map(|&f| m.mul(a.lhs.coef, f) == m.mul(a.rhs.coef, f)).collect()
        };
        for (i, &p) in two_sided.iter().enumerate() {
            for &q in &two_sided[i + 1..] {
                let (hp, hq) = (holds(atoms[p]), holds(atoms[q]));
                let p_in_q = hp.iter().zip(&hq).all(|(&a, &b)| !a || b);
                let q_in_p = hq.iter().zip(&hp).all(|(&a, &b)| !a || b);
                if p_in_q {
                    return Some(q);
                }
                if q_in_p {
                    return Some(p);
                }
            }
        }
        None
    }
}

/// Ways to read an x₀-atom as `t·xᵢ = s·x₀`.
fn orientations(a: Atom, x0: Var) -> Vec<Pivot> {
    let mut out = Vec::with_capacity(2);
    if a.rhs.var == x0 {
        out.push(Pivot { t: a.lhs.coef, i: a.lhs.var, s: a.rhs.coef });
    }
    if a.lhs.var == x0 {
        out.push(Pivot { t: a.rhs.coef, i: a.rhs.var, s: a.lhs.coef });
    }
    out
}

/// (atoms mentioning x₀, occurrences of x₀).
fn measure(atoms: &[Atom], x0: Var) -> (usize, usize) {
    let count = atoms.iter().filter(|a| a.mentions(x0)).count();
    let occ = atoms.iter().map(|a| (a.lhs.var == x0) as usize + (a.rhs.var == x0) as usize).sum();
    (count, occ)
}

pub fn eliminate_variable(phi: &Formula, x0: Var, m: &Arc<Monoid>, e: Elem) -> Result<Elimination, EliminationError> {
    Eliminator::new(m, e)?.eliminate(phi, x0)
}
