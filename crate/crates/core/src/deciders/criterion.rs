//! The per-act criterion for primitive normality.
//!
//! For a triple `(a₁, a₂, a₃)` let
//! `I* = {s : s·a₁ = s·a₂}`, `J* = {t : t·a₂ = t·a₃}` and
//! `K* = {(r₁, r₂) : r₁·aₘ = r₂·aₘ for m = 1, 2, 3}`. The act passes iff every
//! triple has some `b` with `s·a₃ = s·b` on `I*`, `t·b = t·a₁` on `J*` and
//! `r₁·b = r₂·b` on `K*`.
//!
//! The general condition quantifies over tuples of any length and arbitrary
//! finite index sets. Each index constrains a single coordinate, so the
//! condition splits by coordinate, and for a fixed triple the sets above are
//! the largest admissible ones; a `b` that works for them works for every
//! smaller instance. [`theorem1_check_bounded`] evaluates explicit instances
//! directly and is used to audit this reduction.

use serde::Serialize;

use super::Verdict;
use crate::act::{Act, Point};
use crate::formula::{solution_set, Atom, Formula};
use crate::monoid::Elem;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CriterionWitness {
    pub triple: [Point; 3],
    pub i_star: Vec<Elem>,
    pub j_star: Vec<Elem>,
    /// Pairs `r₁ < r₂`.
    pub k_star: Vec<(Elem, Elem)>,
}

/// Kernel of `s ↦ s·a` as a bitset over ordered pairs `(s, t)`.
fn kernels(act: &Act) -> Vec<Vec<u64>> {
    let n = act.monoid().order();
    let words = (n * n).div_ceil(64);
    act.points()
        .map(|a| {
            let mut k = vec![0u64; words];
            for s in 0..n {
                for t in 0..n {
                    if act.act(s, a) == act.act(t, a) {
                        let c = s * n + t;
                        k[c / 64] |= 1 << (c % 64);
                    }
                }
            }
            k
        })
        .collect()
}

pub fn theorem1_check(act: &Act) -> Verdict<CriterionWitness> {
    let n = act.monoid().order();
    let ker = kernels(act);
    let img = |s: Elem, a: Point| act.act(s, a);
    let mut k_star = vec![0u64; ker.first().map_or(0, Vec::len)];
    for a1 in act.points() {
        for a2 in act.points() {
            let i_star: Vec<Elem> = (0..n).filter(|&s| img(s, a1) == img(s, a2)).collect();
            for a3 in act.points() {
                let j_star: Vec<Elem> = (0..n).filter(|&t| img(t, a2) == img(t, a3)).collect();
                for (w, ((x, y), z)) in k_star.iter_mut().zip(ker[a1].iter().zip(&ker[a2]).zip(&ker[a3])) {
                    *w = x & y & z;
                }
                let found = act.points().any(|b| {
                    i_star.iter().all(|&s| img(s, a3) == img(s, b))
                        && j_star.iter().all(|&t| img(t, b) == img(t, a1))
                        && k_star.iter().zip(&ker[b]).all(|(k, kb)| k & !kb == 0)
                });
                if !found {
                    let k_pairs = (0..n)
                        .flat_map(|r1| (r1 + 1..n).map(move |r2| (r1, r2)))
                        .filter(|&(r1, r2)| (0..3).all(|m| img(r1, [a1, a2, a3][m]) == img(r2, [a1, a2, a3][m])))
                        .collect();
                    return Verdict::Fails(CriterionWitness { triple: [a1, a2, a3], i_star, j_star, k_star: k_pairs });
                }
            }
        }
    }
    Verdict::Holds
}

/// A copy-normality violation read off a failing triple:
/// `Φ(x, y) = ∃u (⋀ s·x = s·u ∧ ⋀ t·u = t·y ∧ ⋀ r₁·u = r₂·u)` with `y` the
/// parameter. The copies at `y = a₁` and `y = a₃` both contain `a₁`, and
/// only the second contains `a₃`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NecessityViolation {
    pub formula: Formula,
    pub params: [Point; 2],
    pub shared: Point,
    pub separating: Point,
}

impl NecessityViolation {
    /// Re-evaluates both copies on `act`.
    pub fn verify(&self, act: &Act) -> bool {
        let first = solution_set(&self.formula, act, &[self.params[0]]);
        let second = solution_set(&self.formula, act, &[self.params[1]]);
        first.contains(&[self.shared])
            && second.contains(&[self.shared])
            && !first.contains(&[self.separating])
            && second.contains(&[self.separating])
    }
}

pub fn necessity_violation(w: &CriterionWitness) -> NecessityViolation {
    let (x, y, u) = (0, 1, 2);
    let mut atoms: Vec<Atom> = w.i_star.iter().map(|&s| Atom::new(s, x, s, u)).collect();
    atoms.extend(w.j_star.iter().map(|&t| Atom::new(t, u, t, y)));
    atoms.extend(w.k_star.iter().map(|&(r1, r2)| Atom::new(r1, u, r2, u)));
    let formula = Formula::new(vec!["x".into(), "y".into()], vec!["u".into()], atoms).expect("well scoped");
    let [a1, _, a3] = w.triple;
    NecessityViolation { formula, params: [a1, a3], shared: a1, separating: a3 }
}

/// An instance of the unreduced condition: tuple length `n` and index sets
/// given as (coefficient, coordinate) entries.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExplicitInstance {
    pub n: usize,
    pub i: Vec<(Elem, usize)>,
    pub j: Vec<(Elem, usize)>,
    pub k: Vec<(Elem, Elem, usize)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BoundedWitness {
    pub triple: [Vec<Point>; 3],
}

fn decode(mut c: usize, m: usize, n: usize) -> Vec<Point> {
    let mut t = vec![0; n];
    for slot in t.iter_mut().rev() {
        *slot = c % m;
        c /= m;
    }
    t
}

/// Direct evaluation of one instance: every `ā₁, ā₂, ā₃` meeting the
/// hypothesis admits a `b̄` meeting the conclusion.
pub fn theorem1_check_bounded(act: &Act, inst: &ExplicitInstance) -> Verdict<BoundedWitness> {
    let coords_ok = inst.i.iter().map(|e| e.1).chain(inst.j.iter().map(|e| e.1)).chain(inst.k.iter().map(|e| e.2)).all(|l| l < inst.n);
    if !coords_ok {
        return Verdict::Inapplicable("coordinate out of range".into());
    }
    let (m, n) = (act.size(), inst.n);
    let g = |s: Elem, a: Point| act.act(s, a);
    let tuples: Vec<Vec<Point>> = (0..m.pow(n as u32)).map(|c| decode(c, m, n)).collect();
    let k_ok = |a: &[Point]| inst.k.iter().all(|&(r1, r2, l)| g(r1, a[l]) == g(r2, a[l]));
    for a1 in &tuples {
        if !k_ok(a1) {
            continue;
        }
        for a2 in &tuples {
            if !k_ok(a2) || !inst.i.iter().all(|&(s, l)| g(s, a1[l]) == g(s, a2[l])) {
                continue;
            }
            for a3 in &tuples {
                if !k_ok(a3) || !inst.j.iter().all(|&(t, l)| g(t, a2[l]) == g(t, a3[l])) {
                    continue;
                }
                let exists = tuples.iter().any(|b| {
                    inst.i.iter().all(|&(s, l)| g(s, a3[l]) == g(s, b[l]))
                        && inst.j.iter().all(|&(t, l)| g(t, b[l]) == g(t, a1[l]))
                        && k_ok(b)
                });
                if !exists {
                    return Verdict::Fails(BoundedWitness { triple: [a1.clone(), a2.clone(), a3.clone()] });
                }
            }
        }
    }
    Verdict::Holds
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::act::enumerate_acts;
    use crate::act::fixtures::diamond_arc;
    use crate::monoid::{enumerate_monoids, Monoid};
    use proptest::prelude::*;
    use std::sync::Arc;

    #[test]
    fn one_point_act_holds() {
        for m in enumerate_monoids(3).unwrap() {
            assert!(theorem1_check(&Act::one_point(&Arc::new(m))).holds());
        }
    }

    #[test]
    fn failing_triples_give_violations() {
        let mut failures = 0;
        for m in enumerate_monoids(3).unwrap() {
            let m = Arc::new(m);
            for size in 1..=3 {
                for act in enumerate_acts(&m, size) {
                    if let Verdict::Fails(w) = theorem1_check(&act) {
                        failures += 1;
                        assert!(necessity_violation(&w).verify(&act));
                    }
                }
            }
        }
        assert!(failures > 0);
    }

    #[test]
    fn empty_instance_holds() {
        let d = diamond_arc();
        let act = Act::regular_representation(&d);
        let inst = ExplicitInstance { n: 2, i: vec![], j: vec![], k: vec![] };
        assert!(theorem1_check_bounded(&act, &inst).holds());
        let bad = ExplicitInstance { n: 1, i: vec![(0, 1)], j: vec![], k: vec![] };
        assert!(matches!(theorem1_check_bounded(&act, &bad), Verdict::Inapplicable(_)));
    }

    /// Every n = 1 instance over the whole coefficient range.
    fn all_unary_instances(order: usize) -> Vec<ExplicitInstance> {
        let pairs: Vec<(Elem, Elem)> = (0..order).flat_map(|a| (a + 1..order).map(move |b| (a, b))).collect();
        let mut out = Vec::new();
        for i in 0..1usize << order {
            for j in 0..1usize << order {
                for k in 0..1usize << pairs.len() {
                    out.push(ExplicitInstance {
                        n: 1,
                        i: (0..order).filter(|s| i >> s & 1 == 1).map(|s| (s, 0)).collect(),
                        j: (0..order).filter(|s| j >> s & 1 == 1).map(|s| (s, 0)).collect(),
                        k: pairs.iter().enumerate().filter(|(p, _)| k >> p & 1 == 1).map(|(_, &(a, b))| (a, b, 0)).collect(),
                    });
                }
            }
        }
        out
    }

    #[test]
    fn unary_instances_agree_with_reduction() {
        for m in enumerate_monoids(2).unwrap().into_iter().chain([Monoid::chain_semilattice(3)]) {
            let m = Arc::new(m);
            let instances = all_unary_instances(m.order());
            for size in 1..=3 {
                for act in enumerate_acts(&m, size) {
                    let reduced = theorem1_check(&act).holds();
                    let direct = instances.iter().all(|i| theorem1_check_bounded(&act, i).holds());
                    assert_eq!(reduced, direct, "{act:?}");
                }
            }
        }
    }

    proptest! {
        #[test]
        fn independent_coordinates_factorize(
            pick in 0usize..1000,
            i in proptest::collection::vec((0usize..4, 0usize..2), 0..3),
            j in proptest::collection::vec((0usize..4, 0usize..2), 0..3),
            k in proptest::collection::vec((0usize..4, 0usize..4, 0usize..2), 0..2),
        ) {
            let d = diamond_arc();
            let acts = enumerate_acts(&d, 3);
            let act = &acts[pick % acts.len()];
            let inst = ExplicitInstance { n: 2, i: i.clone(), j: j.clone(), k: k.clone() };
            let project = |l: usize| ExplicitInstance {
                n: 1,
                i: i.iter().filter(|e| e.1 == l).map(|&(s, _)| (s, 0)).collect(),
                j: j.iter().filter(|e| e.1 == l).map(|&(s, _)| (s, 0)).collect(),
                k: k.iter().filter(|e| e.2 == l).map(|&(a, b, _)| (a, b, 0)).collect(),
            };
            let whole = theorem1_check_bounded(act, &inst).holds();
            let parts = theorem1_check_bounded(act, &project(0)).holds() && theorem1_check_bounded(act, &project(1)).holds();
            prop_assert_eq!(whole, parts);
        }

        #[test]
        fn reflexive_triples_never_fail(pick in 0usize..1000, size in 1usize..=3) {
            let d = diamond_arc();
            let acts = enumerate_acts(&d, size);
            let act = &acts[pick % acts.len()];
            if let Verdict::Fails(w) = theorem1_check(act) {
                prop_assert!(!(w.triple[0] == w.triple[1] && w.triple[1] == w.triple[2]));
            }
        }
    }
}
