//! Class-level decisions for the regular acts over a commutative monoid.

use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use super::counterexample::{build_counterexample, Counterexample};
use super::Verdict;
use crate::act::{regular_part, Act};
use crate::formula::{is_copy_normal, parse_formula_with_free, CopyNormality, FormulaSummary};
use crate::monoid::{Elem, ElementSet, Monoid};

#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DeciderError {
    #[error("the regular part is empty")]
    EmptyR,
    #[error("the monoid is not commutative")]
    Noncommutative,
}

/// `R = ⋃ {eR : e ∈ E ∩ R}`, and a single `e` with `R = eR` if there is one.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Decomposition {
    pub holds: bool,
    pub idempotents: Vec<Elem>,
    /// Elements of `R` outside every `eR`.
    pub uncovered: Vec<Elem>,
    pub single: Option<Elem>,
}

pub fn check_r_decomposition(m: &Arc<Monoid>) -> Result<Decomposition, DeciderError> {
    let r = regular_part(m);
    if r.is_empty() {
        return Err(DeciderError::EmptyR);
    }
    let idempotents: Vec<Elem> = r.iter().filter(|&e| m.is_idempotent(e)).collect();
    let e_r = |e: Elem| ElementSet::from_iter(m.order(), r.iter().map(|a| m.mul(e, a)));
    let mut covered = ElementSet::empty(m.order());
    for &e in &idempotents {
        covered = covered.union(&e_r(e));
    }
    let uncovered: Vec<Elem> = r.iter().filter(|&a| !covered.contains(a)).collect();
    let single = idempotents.iter().copied().find(|&e| e_r(e) == r);
    Ok(Decomposition { holds: uncovered.is_empty(), idempotents, uncovered, single })
}

/// For every `a ∈ R`, elements of `Sa` have comparable principal left ideals.
pub fn is_regularly_linearly_ordered(m: &Arc<Monoid>) -> Result<Verdict<[Elem; 3]>, DeciderError> {
    let r = regular_part(m);
    if r.is_empty() {
        return Err(DeciderError::EmptyR);
    }
    for a in r.iter() {
        let orbit = m.principal_left_ideal(a);
        for b in orbit.iter() {
            for c in orbit.iter().filter(|&c| c > b) {
                if !m.left_ideal_subset(b, c) && !m.left_ideal_subset(c, b) {
                    return Ok(Verdict::Fails([a, b, c]));
                }
            }
        }
    }
    Ok(Verdict::Holds)
}

/// Idempotents of `R` have comparable principal left ideals.
pub fn idempotent_comparability(m: &Arc<Monoid>) -> Result<Verdict<[Elem; 2]>, DeciderError> {
    if !m.is_commutative() {
        return Err(DeciderError::Noncommutative);
    }
    let r = regular_part(m);
    if r.is_empty() {
        return Err(DeciderError::EmptyR);
    }
    let es: Vec<Elem> = r.iter().filter(|&e| m.is_idempotent(e)).collect();
    for (i, &e) in es.iter().enumerate() {
        for &f in &es[i + 1..] {
            if !m.left_ideal_subset(e, f) && !m.left_ideal_subset(f, e) {
                return Ok(Verdict::Fails([e, f]));
            }
        }
    }
    Ok(Verdict::Holds)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "reason", rename_all = "snake_case")]
pub enum Inapplicable {
    Noncommutative { a: Elem, b: Elem },
    EmptyR,
    /// `R` is not the union of the `eR`; the class is then not axiomatizable.
    Decomposition { uncovered: Vec<Elem> },
}

/// The copies of `∃u(e·u = e·x ∧ f·u = f·y)` at `y = e` and `y = f` on `ₛR`,
/// for incomparable idempotents `e, f`.
#[derive(Debug, Clone, Serialize)]
pub struct IdempotentProbe {
    pub e: Elem,
    pub f: Elem,
    pub formula: FormulaSummary,
    /// Points of the violation index into `carrier`, the elements of `R`.
    pub violation: CopyNormality,
    pub carrier: Vec<Elem>,
}

#[derive(Debug, Clone, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ClassWitness {
    /// `a ∈ R` and `b, c ∈ Sa` with incomparable ideals, and the amalgam
    /// built from them.
    Amalgam { a: Elem, b: Elem, c: Elem, counterexample: Box<Counterexample> },
    IdempotentProbe(IdempotentProbe),
    /// `Ra`, `Rb` incomparable but neither construction applied.
    Unexplained { a: Elem, b: Elem, error: String },
}

#[derive(Debug, Clone, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum ClassDecision {
    /// `R` is linearly ordered; `e` satisfies `R = eR`.
    PrimitiveNormal { e: Option<Elem> },
    NotPrimitiveNormal { incomparable: [Elem; 2], witness: ClassWitness },
    Inapplicable(Inapplicable),
}

impl ClassDecision {
    pub fn exit_code(&self) -> i32 {
        match self {
            ClassDecision::PrimitiveNormal { .. } => 0,
            ClassDecision::NotPrimitiveNormal { .. } => 1,
            ClassDecision::Inapplicable(_) => 2,
        }
    }

    pub fn is_primitive_normal(&self) -> bool {
        matches!(self, ClassDecision::PrimitiveNormal { .. })
    }
}

/// Primitive normality (equivalently antiadditivity) of the class of regular
/// acts over a commutative monoid: holds iff `R` is linearly ordered.
pub fn decide_class(m: &Arc<Monoid>) -> ClassDecision {
    if let Some((a, b)) = m.commutativity_violation() {
        return ClassDecision::Inapplicable(Inapplicable::Noncommutative { a, b });
    }
    let decomposition = match check_r_decomposition(m) {
        Ok(d) => d,
        Err(_) => return ClassDecision::Inapplicable(Inapplicable::EmptyR),
    };
    if !decomposition.holds {
        return ClassDecision::Inapplicable(Inapplicable::Decomposition { uncovered: decomposition.uncovered });
    }
    let r = regular_part(m);
    let incomparable = match m.is_linearly_ordered(&r) {
        Ok(o) if o.is_linear() => return ClassDecision::PrimitiveNormal { e: decomposition.single },
        Ok(crate::monoid::LinearOrder::Incomparable { a, b }) => [a, b],
        // R is a left ideal of a commutative monoid, hence closed
        _ => unreachable!("the regular part is a subsemigroup"),
    };
    let witness = witness_for(m, &r, incomparable);
    ClassDecision::NotPrimitiveNormal { incomparable, witness }
}

fn witness_for(m: &Arc<Monoid>, r: &ElementSet, [a, b]: [Elem; 2]) -> ClassWitness {
    let unexplained = |error: String| ClassWitness::Unexplained { a, b, error };
    match is_regularly_linearly_ordered(m) {
        Ok(Verdict::Fails([a, b, c])) => {
            return match build_counterexample(m, a, b, c) {
                Ok(cx) => ClassWitness::Amalgam { a, b, c, counterexample: Box::new(cx) },
                Err(e) => unexplained(e.to_string()),
            };
        }
        Err(e) => return unexplained(e.to_string()),
        Ok(_) => {}
    }
    match idempotent_comparability(m) {
        Ok(Verdict::Fails([e, f])) => idempotent_probe(m, r, e, f).map_or_else(
            || unexplained(format!("probe on idempotents {e}, {f} found no violation")),
            ClassWitness::IdempotentProbe,
        ),
        Ok(_) => unexplained("idempotents of R are comparable".into()),
        Err(e) => unexplained(e.to_string()),
    }
}

fn idempotent_probe(m: &Arc<Monoid>, r: &ElementSet, e: Elem, f: Elem) -> Option<IdempotentProbe> {
    let sub = Act::regular_representation(m).subact(&r.to_vec());
    let sr = sub.act;
    let text = format!("exists u : {e}*u = {e}*x & {f}*u = {f}*y", e = m.name(e), f = m.name(f));
    let phi = parse_formula_with_free(&text, m, &["x", "y"]).ok()?;
    let violation = is_copy_normal(&phi, &sr, 1);
    (!violation.is_normal()).then(|| IdempotentProbe {
        e,
        f,
        formula: FormulaSummary::new(&phi, m),
        violation,
        carrier: sub.inclusion,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::act::fixtures::diamond_arc;
    use crate::monoid::fixtures::right_zero;
    use crate::monoid::enumerate_commutative_monoids;

    #[test]
    fn groups_are_primitive_normal() {
        for n in 1..=5 {
            let g = Arc::new(Monoid::cyclic_group(n));
            assert!(matches!(decide_class(&g), ClassDecision::PrimitiveNormal { e: Some(0) }));
            assert_eq!(check_r_decomposition(&g).unwrap().single, Some(0));
            assert!(is_regularly_linearly_ordered(&g).unwrap().holds());
        }
    }

    #[test]
    fn chain_semilattice() {
        let c = Arc::new(Monoid::chain_semilattice(3));
        // every element is idempotent and 1 is act-regular, so R = S, a chain
        assert_eq!(regular_part(&c), c.full_set());
        assert!(matches!(decide_class(&c), ClassDecision::PrimitiveNormal { e: Some(0) }));
        assert!(idempotent_comparability(&c).unwrap().holds());
        assert!(is_regularly_linearly_ordered(&c).unwrap().holds());
    }

    #[test]
    fn diamond_is_not_primitive_normal() {
        let d = diamond_arc();
        let (e, f) = (1, 2);
        assert_eq!(idempotent_comparability(&d).unwrap(), Verdict::Fails([e, f]));
        assert_eq!(is_regularly_linearly_ordered(&d).unwrap(), Verdict::Fails([0, e, f]));
        match decide_class(&d) {
            ClassDecision::NotPrimitiveNormal { witness: ClassWitness::Amalgam { a, b, c, counterexample }, .. } => {
                assert_eq!((a, b, c), (0, e, f));
                assert!(crate::deciders::theorem1_check(&counterexample.act).fails());
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn noncommutative_is_inapplicable() {
        let z = Arc::new(right_zero());
        assert!(matches!(decide_class(&z), ClassDecision::Inapplicable(Inapplicable::Noncommutative { .. })));
        assert_eq!(idempotent_comparability(&z), Err(DeciderError::Noncommutative));
    }

    #[test]
    fn nilpotent_generator() {
        // {1, a, 0} with a² = 0: only 0 is regular
        let m = Arc::new(Monoid::from_table(vec![vec![0, 1, 2], vec![1, 2, 2], vec![2, 2, 2]]).unwrap());
        let d = check_r_decomposition(&m).unwrap();
        assert!(d.holds);
        assert_eq!(d.single, Some(2));
    }

    #[test]
    fn necessary_conditions_chain() {
        for n in 1..=4 {
            for m in enumerate_commutative_monoids(n).unwrap() {
                let m = Arc::new(m);
                if let ClassDecision::PrimitiveNormal { e } = decide_class(&m) {
                    assert!(idempotent_comparability(&m).unwrap().holds());
                    assert!(is_regularly_linearly_ordered(&m).unwrap().holds());
                    let e = e.expect("single idempotent");
                    let r = regular_part(&m);
                    assert_eq!(ElementSet::from_iter(m.order(), r.iter().map(|a| m.mul(e, a))), r);
                }
            }
        }
    }

    #[test]
    fn every_negative_has_a_witness() {
        let (mut amalgams, mut probes) = (0, 0);
        for n in 1..=5 {
            for m in enumerate_commutative_monoids(n).unwrap() {
                match decide_class(&Arc::new(m)) {
                    ClassDecision::NotPrimitiveNormal { witness: ClassWitness::Amalgam { .. }, .. } => amalgams += 1,
                    ClassDecision::NotPrimitiveNormal { witness: ClassWitness::IdempotentProbe(_), .. } => probes += 1,
                    ClassDecision::NotPrimitiveNormal { witness, .. } => panic!("{witness:?}"),
                    _ => {}
                }
            }
        }
        assert!(amalgams > 0 && probes > 0);
    }
}
