//! Finite left S-acts.
//!
//! An act stores one transformation of its carrier per monoid element, row
//! `s` holding `s·a` for every point `a`.

mod congruence;
mod enumerate;
mod io;

use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::monoid::{Elem, ElementSet, Monoid};

pub use congruence::{congruence_closure, quotient, Congruence, Quotient};
pub use enumerate::{canonical_action, enumerate_acts, is_isomorphic_act};
pub use io::{parse_act, write_act, ActFileError, MonoidSource};

/// Index of a carrier point.
pub type Point = usize;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ActError {
    #[error("malformed action table: {0}")]
    Malformed(String),
    #[error("compatibility fails: {s1}·({s2}·{a}) != ({s1}{s2})·{a}")]
    CompatibilityFails { s1: Elem, s2: Elem, a: Point },
    #[error("identity does not fix point {0}")]
    IdentityFails(Point),
    #[error("acts are over different monoids")]
    MixedMonoids,
    #[error("partition is not compatible with the action: {a} ~ {b} but {s}·{a} !~ {s}·{b}")]
    NotCompatible { s: Elem, a: Point, b: Point },
}

/// A finite left act of a monoid.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Act {
    monoid: Arc<Monoid>,
    names: Vec<String>,
    action: Vec<Point>,
}

/// Checks the act axioms `s1·(s2·a) = (s1 s2)·a` and `1·a = a`.
pub fn validate_act(monoid: Arc<Monoid>, names: Vec<String>, rows: Vec<Vec<Point>>) -> Result<Act, ActError> {
    let m = names.len();
    if rows.len() != monoid.order() {
        return Err(ActError::Malformed(format!(
            "expected {} action rows, found {}",
            monoid.order(),
            rows.len()
        )));
    }
    for (i, n) in names.iter().enumerate() {
        if names[..i].contains(n) {
            return Err(ActError::Malformed(format!("duplicate point name `{n}`")));
        }
    }
    let mut action = Vec::with_capacity(monoid.order() * m);
    for (s, row) in rows.iter().enumerate() {
        if row.len() != m {
            return Err(ActError::Malformed(format!("row {s} has {} entries, expected {m}", row.len())));
        }
        if let Some(&bad) = row.iter().find(|&&p| p >= m) {
            return Err(ActError::Malformed(format!("row {s} maps to {bad}, not a point")));
        }
        action.extend_from_slice(row);
    }
    let act = Act { monoid, names, action };
    act.check_axioms()?;
    Ok(act)
}

impl Act {
    pub(crate) fn from_parts_unchecked(monoid: Arc<Monoid>, names: Vec<String>, action: Vec<Point>) -> Act {
        debug_assert_eq!(action.len(), monoid.order() * names.len());
        Act { monoid, names, action }
    }

    fn check_axioms(&self) -> Result<(), ActError> {
        let id = self.monoid.identity();
        for a in self.points() {
            if self.act(id, a) != a {
                return Err(ActError::IdentityFails(a));
            }
        }
        for s1 in self.monoid.elements() {
            for s2 in self.monoid.elements() {
                let s12 = self.monoid.mul(s1, s2);
                for a in self.points() {
                    if self.act(s1, self.act(s2, a)) != self.act(s12, a) {
                        return Err(ActError::CompatibilityFails { s1, s2, a });
                    }
                }
            }
        }
        Ok(())
    }

    /// `ₛS`: the monoid acting on itself by left multiplication.
    pub fn regular_representation(monoid: &Arc<Monoid>) -> Act {
        let n = monoid.order();
        let mut action = Vec::with_capacity(n * n);
        for s in monoid.elements() {
            action.extend(monoid.elements().map(|a| monoid.mul(s, a)));
        }
        Act { monoid: monoid.clone(), names: monoid.names().to_vec(), action }
    }

    /// `size` points, every element acting as the identity map.
    pub fn trivial(monoid: &Arc<Monoid>, size: usize) -> Act {
        let names = (0..size).map(|i| format!("p{i}")).collect();
        let action = monoid.elements().flat_map(|_| 0..size).collect();
        Act { monoid: monoid.clone(), names, action }
    }

    pub fn one_point(monoid: &Arc<Monoid>) -> Act {
        Act::trivial(monoid, 1)
    }

    pub fn monoid(&self) -> &Arc<Monoid> {
        &self.monoid
    }

    pub fn size(&self) -> usize {
        self.names.len()
    }

    pub fn points(&self) -> std::ops::Range<Point> {
        0..self.size()
    }

    #[inline]
    pub fn act(&self, s: Elem, a: Point) -> Point {
        self.action[s * self.size() + a]
    }

    pub fn name(&self, a: Point) -> &str {
        &self.names[a]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn point(&self, name: &str) -> Option<Point> {
        self.names.iter().position(|n| n == name)
    }

    pub fn rows(&self) -> Vec<Vec<Point>> {
        self.action.chunks(self.size().max(1)).map(|r| r.to_vec()).collect()
    }

    pub(crate) fn flat_action(&self) -> &[Point] {
        &self.action
    }

    pub fn renamed(mut self, names: Vec<String>) -> Result<Act, ActError> {
        if names.len() != self.size() {
            return Err(ActError::Malformed("name count differs from carrier size".into()));
        }
        for (i, n) in names.iter().enumerate() {
            if names[..i].contains(n) {
                return Err(ActError::Malformed(format!("duplicate point name `{n}`")));
            }
        }
        self.names = names;
        Ok(self)
    }

    /// Points of `Sa` in increasing order.
    pub fn orbit(&self, a: Point) -> Vec<Point> {
        let mut v: Vec<Point> = self.monoid.elements().map(|s| self.act(s, a)).collect();
        v.sort_unstable();
        v.dedup();
        v
    }

    /// The cyclic subact `Sa` together with its inclusion into `self`.
    pub fn cyclic_subact(&self, a: Point) -> Subact {
        self.subact(&self.orbit(a))
    }

    /// Restriction to a set of points closed under the action.
    pub fn subact(&self, points: &[Point]) -> Subact {
        let mut index = vec![usize::MAX; self.size()];
        for (i, &p) in points.iter().enumerate() {
            index[p] = i;
        }
        let mut action = Vec::with_capacity(self.monoid.order() * points.len());
        for s in self.monoid.elements() {
            for &p in points {
                let img = index[self.act(s, p)];
                assert!(img != usize::MAX, "subact points must be closed under the action");
                action.push(img);
            }
        }
        let names = points.iter().map(|&p| self.names[p].clone()).collect();
        Subact {
            act: Act { monoid: self.monoid.clone(), names, action },
            inclusion: points.to_vec(),
        }
    }

    /// Whether `s·a = t·a ⇔ s·b = t·b`: the kernels of `s ↦ s·a` and `s ↦ s·b`
    /// coincide, i.e. `s·a ↦ s·b` is a well-defined isomorphism `Sa → Sb`.
    pub fn same_kernel(&self, a: Point, other: &Act, b: Point) -> bool {
        let n = self.monoid.order();
        for s in 0..n {
            for t in s + 1..n {
                if (self.act(s, a) == self.act(t, a)) != (other.act(s, b) == other.act(t, b)) {
                    return false;
                }
            }
        }
        true
    }

    /// Act-regularity of `a`: some `u ∈ S` with `u·a = a` such that
    /// `s·a = t·a` implies `s·u = t·u`. The map `s·a ↦ s·u` is then an
    /// S-homomorphism `Sa → S` sending `a` to `u`. Returns the least such `u`.
    pub fn is_act_regular(&self, a: Point) -> Option<Elem> {
        let m = &self.monoid;
        let n = m.order();
        'u: for u in m.elements() {
            if self.act(u, a) != a {
                continue;
            }
            for s in 0..n {
                for t in s + 1..n {
                    if self.act(s, a) == self.act(t, a) && m.mul(s, u) != m.mul(t, u) {
                        continue 'u;
                    }
                }
            }
            return Some(u);
        }
        None
    }

    /// First point that is not act-regular, if any.
    pub fn non_regular_point(&self) -> Option<Point> {
        self.points().find(|&a| self.is_act_regular(a).is_none())
    }

    pub fn is_regular(&self) -> bool {
        self.non_regular_point().is_none()
    }

    /// An idempotent `e` of the regular part with `Sa ≅ Se` via `a ↦ e`.
    pub fn regular_via_idempotent(&self, a: Point) -> Option<Elem> {
        let m = &self.monoid;
        let r = regular_part(m);
        let regular = Act::regular_representation(m);
        m.elements()
            .filter(|&e| m.is_idempotent(e) && r.contains(e))
            .find(|&e| self.same_kernel(a, &regular, e))
    }
}

/// A subact and the positions of its points in the ambient act.
#[derive(Debug, Clone)]
pub struct Subact {
    pub act: Act,
    pub inclusion: Vec<Point>,
}

/// `Sa ≅ Sb` by an isomorphism sending `a` to `b`.
pub fn cyclic_iso(a_act: &Act, a: Point, b_act: &Act, b: Point) -> Result<bool, ActError> {
    if a_act.monoid != b_act.monoid {
        return Err(ActError::MixedMonoids);
    }
    Ok(a_act.same_kernel(a, b_act, b))
}

/// The regular part `R`: elements `a` of `S` such that every point of `Sa`
/// is act-regular in `ₛS`. It is the largest regular subact of `ₛS`.
pub fn regular_part(m: &Arc<Monoid>) -> ElementSet {
    let s = Act::regular_representation(m);
    let regular: Vec<bool> = s.points().map(|a| s.is_act_regular(a).is_some()).collect();
    ElementSet::from_iter(
        m.order(),
        m.elements().filter(|&a| s.orbit(a).iter().all(|&b| regular[b])),
    )
}

/// `R` as the union of all regular subacts of `ₛS`, found by listing every
/// subset closed under left multiplication. Only for small monoids.
pub fn regular_part_by_subacts(m: &Arc<Monoid>) -> ElementSet {
    let n = m.order();
    assert!(n <= 16, "subset enumeration is limited to order 16");
    let s = Act::regular_representation(m);
    let mut union = ElementSet::empty(n);
    for mask in 1u32..(1 << n) {
        let members: Vec<Elem> = (0..n).filter(|&i| mask & (1 << i) != 0).collect();
        let closed = members
            .iter()
            .all(|&a| m.elements().all(|t| mask & (1 << m.mul(t, a)) != 0));
        if closed && s.subact(&members).act.is_regular() {
            for a in members {
                union.insert(a);
            }
        }
    }
    union
}

/// Disjoint union of acts with injections.
#[derive(Debug, Clone)]
pub struct Coproduct {
    pub act: Act,
    pub injections: Vec<Vec<Point>>,
}

pub fn coproduct(acts: &[Act]) -> Result<Coproduct, ActError> {
    let Some(first) = acts.first() else {
        return Err(ActError::Malformed("coproduct of no acts".into()));
    };
    let monoid = first.monoid.clone();
    if acts.iter().any(|a| a.monoid != monoid) {
        return Err(ActError::MixedMonoids);
    }
    let mut offsets = Vec::with_capacity(acts.len());
    let mut total = 0;
    for a in acts {
        offsets.push(total);
        total += a.size();
    }
    let mut names = Vec::with_capacity(total);
    for (i, a) in acts.iter().enumerate() {
        names.extend(a.names.iter().map(|n| format!("{n}_{}", i + 1)));
    }
    let mut action = Vec::with_capacity(monoid.order() * total);
    for s in monoid.elements() {
        for (a, &off) in acts.iter().zip(&offsets) {
            action.extend(a.points().map(|p| a.act(s, p) + off));
        }
    }
    let injections = acts
        .iter()
        .zip(&offsets)
        .map(|(a, &off)| a.points().map(|p| p + off).collect())
        .collect();
    Ok(Coproduct { act: Act { monoid, names, action }, injections })
}

/// Serializable summary of an act.
#[derive(Debug, Clone, Serialize)]
pub struct ActSummary {
    pub carrier: Vec<String>,
    pub action: Vec<Vec<String>>,
}

impl From<&Act> for ActSummary {
    fn from(a: &Act) -> Self {
        ActSummary {
            carrier: a.names.clone(),
            action: a
                .rows()
                .iter()
                .map(|r| r.iter().map(|&p| a.names[p].clone()).collect())
                .collect(),
        }
    }
}

#[cfg(test)]
pub(crate) mod fixtures {
    use super::*;
    use crate::monoid::fixtures::diamond;

    pub fn diamond_arc() -> Arc<Monoid> {
        Arc::new(diamond())
    }
}

#[cfg(test)]
mod tests {
    use super::fixtures::*;
    use super::*;
    use crate::monoid::fixtures::right_zero;

    #[test]
    fn act_axioms() {
        let d = diamond_arc();
        let s = Act::regular_representation(&d);
        assert!(validate_act(d.clone(), s.names.clone(), s.rows()).is_ok());
        let one = Act::one_point(&d);
        assert!(validate_act(d.clone(), one.names.clone(), one.rows()).is_ok());

        let mut rows = s.rows();
        rows[0].swap(0, 1);
        assert!(matches!(
            validate_act(d.clone(), s.names.clone(), rows),
            Err(ActError::IdentityFails(_))
        ));

        // e acts as swap on two points: e·(e·a) = a but (ee)·a = e·a
        let z2 = Arc::new(Monoid::chain_semilattice(2));
        let err = validate_act(z2, vec!["p".into(), "q".into()], vec![vec![0, 1], vec![1, 0]]).unwrap_err();
        assert!(matches!(err, ActError::CompatibilityFails { .. }));
    }

    #[test]
    fn cyclic_subacts() {
        let d = diamond_arc();
        let s = Act::regular_representation(&d);
        assert_eq!(s.cyclic_subact(0).act.size(), 4);
        let se = s.cyclic_subact(d.element("e").unwrap());
        assert_eq!(se.act.names(), &["e", "0"]);
        assert_eq!(Act::one_point(&d).cyclic_subact(0).act.size(), 1);
    }

    #[test]
    fn regular_elements() {
        let d = diamond_arc();
        let s = Act::regular_representation(&d);
        assert_eq!(s.is_act_regular(0), Some(0));
        let e = d.element("e").unwrap();
        assert_eq!(s.is_act_regular(e), Some(e));
        // free acts over a group are regular with u = 1
        let g = Arc::new(Monoid::cyclic_group(3));
        let gs = Act::regular_representation(&g);
        let c = coproduct(&[gs.clone(), gs]).unwrap().act;
        for a in c.points() {
            assert!(c.is_act_regular(a).is_some());
        }
    }

    #[test]
    fn one_point_regularity() {
        let trivial = Arc::new(Monoid::from_table(vec![vec![0]]).unwrap());
        assert!(Act::one_point(&trivial).is_regular());
        // Z2 has no element u with g·u = u
        assert!(!Act::one_point(&Arc::new(Monoid::cyclic_group(2))).is_regular());
        // the chain {1, 0} has the zero
        assert!(Act::one_point(&Arc::new(Monoid::chain_semilattice(2))).is_regular());
    }

    #[test]
    fn diamond_regular_representation_is_regular() {
        // Brute force over all four points: each element is idempotent with u = itself.
        let d = diamond_arc();
        let s = Act::regular_representation(&d);
        for a in s.points() {
            assert_eq!(s.is_act_regular(a), Some(a));
        }
        assert!(s.is_regular());
    }

    #[test]
    fn regular_parts() {
        let g = Arc::new(Monoid::cyclic_group(4));
        assert_eq!(regular_part(&g).len(), 4);
        let z = Arc::new(right_zero());
        let r = regular_part(&z);
        assert!(r.contains(1) && r.contains(2));
        assert_eq!(r, regular_part_by_subacts(&z));
        let d = diamond_arc();
        assert_eq!(regular_part(&d), d.full_set());
        assert_eq!(regular_part(&d), regular_part_by_subacts(&d));
    }

    #[test]
    fn regular_part_can_be_small() {
        // {1, a, 0} with a·a = 0: only 0 is in R
        let m = Arc::new(Monoid::from_table(vec![vec![0, 1, 2], vec![1, 2, 2], vec![2, 2, 2]]).unwrap());
        assert_eq!(regular_part(&m).to_vec(), vec![2]);
    }

    #[test]
    fn cyclic_isomorphism() {
        let d = diamond_arc();
        let s = Act::regular_representation(&d);
        let (e, f) = (d.element("e").unwrap(), d.element("f").unwrap());
        assert!(cyclic_iso(&s, e, &s, e).unwrap());
        // kernels {(s,t): s·e = t·e} and {(s,t): s·f = t·f} differ: f·e = 0·e but f·f != 0·f
        assert!(!cyclic_iso(&s, e, &s, f).unwrap());
        let p = Act::one_point(&d);
        assert!(cyclic_iso(&p, 0, &p.clone(), 0).unwrap());
        let other = Act::one_point(&Arc::new(Monoid::cyclic_group(4)));
        assert_eq!(cyclic_iso(&p, 0, &other, 0), Err(ActError::MixedMonoids));
    }

    #[test]
    fn regular_via_idempotent_examples() {
        let d = diamond_arc();
        let s = Act::regular_representation(&d);
        let e = d.element("e").unwrap();
        assert_eq!(s.regular_via_idempotent(e), Some(e));
        let g = Arc::new(Monoid::cyclic_group(3));
        let gs = Act::regular_representation(&g);
        for a in gs.points() {
            assert_eq!(gs.regular_via_idempotent(a), Some(0));
        }
    }

    #[test]
    fn coproducts() {
        let d = diamond_arc();
        let s = Act::regular_representation(&d);
        let c = coproduct(&[s.clone()]).unwrap();
        assert!(is_isomorphic_act(&c.act, &s));
        let se = s.cyclic_subact(d.element("e").unwrap()).act;
        let three = coproduct(&[se.clone(), se.clone(), se.clone()]).unwrap();
        assert_eq!(three.act.size(), 3 * se.size());
        assert_eq!(three.injections[2], vec![4, 5]);
        let points = coproduct(&[Act::one_point(&d), Act::one_point(&d)]).unwrap().act;
        assert_eq!(points, Act::trivial(&d, 2).renamed(points.names().to_vec()).unwrap());
        let g = Arc::new(Monoid::cyclic_group(4));
        assert_eq!(
            coproduct(&[s, Act::one_point(&g)]).unwrap_err(),
            ActError::MixedMonoids
        );
    }
}
