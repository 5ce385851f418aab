//! Finite monoids given by their multiplication tables.
//!
//! Elements are identified by table index; names are only used for display
//! and file I/O.

pub(crate) mod enumerate;
pub(crate) mod io;

use serde::Serialize;
use thiserror::Error;

pub use enumerate::{
    canonical_table, enumerate_commutative_monoids, enumerate_monoids, is_isomorphic,
    DEFAULT_ORDER_BOUND,
};
pub use io::{parse_monoid, write_monoid, MonoidFileError};

/// Index of a monoid element.
pub type Elem = usize;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MonoidError {
    #[error("malformed table: {0}")]
    MalformedTable(String),
    #[error("multiplication is not associative at ({a}, {b}, {c})")]
    NotAssociative { a: Elem, b: Elem, c: Elem },
    #[error("identity law fails at element {0}")]
    IdentityLawFails(Elem),
    #[error("element {0} is not idempotent")]
    NotIdempotent(Elem),
    #[error("subset is not closed under multiplication: {a}*{b} leaves it")]
    NotClosed { a: Elem, b: Elem },
    #[error("order {requested} exceeds the enumeration bound {bound}")]
    BoundExceeded { requested: usize, bound: usize },
    #[error("unknown element `{0}`")]
    UnknownElement(String),
}

/// A multiplication table before validation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawTable {
    pub names: Vec<String>,
    pub identity: Elem,
    pub rows: Vec<Vec<Elem>>,
}

/// A finite monoid. Immutable once validated.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Monoid {
    names: Vec<String>,
    identity: Elem,
    table: Vec<Elem>,
}

/// Checks the monoid laws and builds a [`Monoid`].
pub fn validate_monoid(raw: RawTable) -> Result<Monoid, MonoidError> {
    let n = raw.names.len();
    if n == 0 {
        return Err(MonoidError::MalformedTable("empty element list".into()));
    }
    for (i, name) in raw.names.iter().enumerate() {
        if raw.names[..i].contains(name) {
            return Err(MonoidError::MalformedTable(format!("duplicate element name `{name}`")));
        }
    }
    if raw.identity >= n {
        return Err(MonoidError::MalformedTable(format!("identity index {} out of range", raw.identity)));
    }
    if raw.rows.len() != n {
        return Err(MonoidError::MalformedTable(format!("expected {n} rows, found {}", raw.rows.len())));
    }
    let mut table = Vec::with_capacity(n * n);
    for (i, row) in raw.rows.iter().enumerate() {
        if row.len() != n {
            return Err(MonoidError::MalformedTable(format!(
                "row {i} has {} entries, expected {n}",
                row.len()
            )));
        }
        for &v in row {
            if v >= n {
                return Err(MonoidError::MalformedTable(format!("entry {v} in row {i} is not an element index")));
            }
        }
        table.extend_from_slice(row);
    }
    let m = Monoid { names: raw.names, identity: raw.identity, table };
    for a in 0..n {
        if m.mul(m.identity, a) != a || m.mul(a, m.identity) != a {
            return Err(MonoidError::IdentityLawFails(a));
        }
    }
    if let Some((a, b, c)) = m.associativity_violation() {
        return Err(MonoidError::NotAssociative { a, b, c });
    }
    Ok(m)
}

impl Monoid {
    /// Builds a monoid from a row-major table, naming the elements
    /// `1, a, b, ...` with the identity at index 0.
    pub fn from_table(rows: Vec<Vec<Elem>>) -> Result<Self, MonoidError> {
        let names = default_names(rows.len());
        validate_monoid(RawTable { names, identity: 0, rows })
    }

    /// Trusted constructor for tables produced by the enumerators.
    pub(crate) fn from_flat_unchecked(n: usize, table: Vec<Elem>) -> Self {
        debug_assert_eq!(table.len(), n * n);
        Monoid { names: default_names(n), identity: 0, table }
    }

    /// The cyclic group of the given order.
    pub fn cyclic_group(n: usize) -> Self {
        let rows = (0..n).map(|i| (0..n).map(|j| (i + j) % n).collect()).collect();
        Monoid::from_table(rows).expect("cyclic group table is a monoid")
    }

    /// The chain semilattice `1 > a_1 > ... > a_{n-1}`, product = minimum.
    pub fn chain_semilattice(n: usize) -> Self {
        let rows = (0..n).map(|i| (0..n).map(|j| i.max(j)).collect()).collect();
        Monoid::from_table(rows).expect("chain table is a monoid")
    }

    pub fn with_names(mut self, names: &[&str]) -> Result<Self, MonoidError> {
        if names.len() != self.order() {
            return Err(MonoidError::MalformedTable("name count differs from order".into()));
        }
        self.names = names.iter().map(|s| s.to_string()).collect();
        validate_monoid(RawTable { names: self.names.clone(), identity: self.identity, rows: self.rows() })
    }

    pub fn order(&self) -> usize {
        self.names.len()
    }

    pub fn identity(&self) -> Elem {
        self.identity
    }

    #[inline]
    pub fn mul(&self, a: Elem, b: Elem) -> Elem {
        self.table[a * self.order() + b]
    }

    pub fn name(&self, a: Elem) -> &str {
        &self.names[a]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn element(&self, name: &str) -> Option<Elem> {
        self.names.iter().position(|n| n == name)
    }

    pub fn elements(&self) -> std::ops::Range<Elem> {
        0..self.order()
    }

    pub fn rows(&self) -> Vec<Vec<Elem>> {
        self.table.chunks(self.order()).map(|r| r.to_vec()).collect()
    }

    pub(crate) fn flat_table(&self) -> &[Elem] {
        &self.table
    }

    fn associativity_violation(&self) -> Option<(Elem, Elem, Elem)> {
        for a in self.elements() {
            for b in self.elements() {
                let ab = self.mul(a, b);
                for c in self.elements() {
                    if self.mul(ab, c) != self.mul(a, self.mul(b, c)) {
                        return Some((a, b, c));
                    }
                }
            }
        }
        None
    }

    /// First pair `(a, b)` with `ab != ba`, if any.
    pub fn commutativity_violation(&self) -> Option<(Elem, Elem)> {
        for a in self.elements() {
            for b in a + 1..self.order() {
                if self.mul(a, b) != self.mul(b, a) {
                    return Some((a, b));
                }
            }
        }
        None
    }

    pub fn is_commutative(&self) -> bool {
        self.commutativity_violation().is_none()
    }

    pub fn is_idempotent(&self, e: Elem) -> bool {
        self.mul(e, e) == e
    }

    pub fn idempotents(&self) -> ElementSet {
        ElementSet::from_iter(self.order(), self.elements().filter(|&e| self.is_idempotent(e)))
    }

    pub fn full_set(&self) -> ElementSet {
        ElementSet::from_iter(self.order(), self.elements())
    }

    /// `Sa = {s·a : s ∈ S}`.
    pub fn principal_left_ideal(&self, a: Elem) -> ElementSet {
        ElementSet::from_iter(self.order(), self.elements().map(|s| self.mul(s, a)))
    }

    /// `aS = {a·s : s ∈ S}`.
    pub fn principal_right_ideal(&self, a: Elem) -> ElementSet {
        ElementSet::from_iter(self.order(), self.elements().map(|s| self.mul(a, s)))
    }

    /// `aS ⊆ eS`, decided by `e·a = a`.
    pub fn right_ideal_within(&self, a: Elem, e: Elem) -> Result<bool, MonoidError> {
        self.require_idempotent(e)?;
        Ok(self.mul(e, a) == a)
    }

    /// `Sa ⊆ Se`, decided by `a·e = a`.
    pub fn left_ideal_within(&self, a: Elem, e: Elem) -> Result<bool, MonoidError> {
        self.require_idempotent(e)?;
        Ok(self.mul(a, e) == a)
    }

    /// `Sa ⊆ Sb` by comparing the ideals as sets.
    pub fn left_ideal_subset(&self, a: Elem, b: Elem) -> bool {
        self.principal_left_ideal(a).is_subset(&self.principal_left_ideal(b))
    }

    pub fn right_ideal_subset(&self, a: Elem, b: Elem) -> bool {
        self.principal_right_ideal(a).is_subset(&self.principal_right_ideal(b))
    }

    fn require_idempotent(&self, e: Elem) -> Result<(), MonoidError> {
        if self.is_idempotent(e) {
            Ok(())
        } else {
            Err(MonoidError::NotIdempotent(e))
        }
    }

    /// Finds a pair leaving `t` under multiplication.
    pub fn closure_violation(&self, t: &ElementSet) -> Option<(Elem, Elem)> {
        for a in t.iter() {
            for b in t.iter() {
                if !t.contains(self.mul(a, b)) {
                    return Some((a, b));
                }
            }
        }
        None
    }

    /// `Ta = {t·a : t ∈ T}` for a subset `T`.
    pub fn left_translate(&self, t: &ElementSet, a: Elem) -> ElementSet {
        ElementSet::from_iter(self.order(), t.iter().map(|x| self.mul(x, a)))
    }

    /// Whether the subsemigroup `T` is linearly ordered: for all `a, b ∈ T`
    /// either `Ta ⊆ Tb` or `Tb ⊆ Ta`. `T` itself is not extended by the
    /// identity, so `a ∈ Ta` need not hold.
    pub fn is_linearly_ordered(&self, t: &ElementSet) -> Result<LinearOrder, MonoidError> {
        if let Some((a, b)) = self.closure_violation(t) {
            return Err(MonoidError::NotClosed { a, b });
        }
        let ideals: Vec<(Elem, ElementSet)> = t.iter().map(|a| (a, self.left_translate(t, a))).collect();
        for (i, (a, ta)) in ideals.iter().enumerate() {
            for (b, tb) in &ideals[i + 1..] {
                if !ta.is_subset(tb) && !tb.is_subset(ta) {
                    return Ok(LinearOrder::Incomparable { a: *a, b: *b });
                }
            }
        }
        Ok(LinearOrder::Linear)
    }
}

/// Result of [`Monoid::is_linearly_ordered`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum LinearOrder {
    Linear,
    Incomparable { a: Elem, b: Elem },
}

impl LinearOrder {
    pub fn is_linear(&self) -> bool {
        matches!(self, LinearOrder::Linear)
    }
}

pub(crate) fn default_names(n: usize) -> Vec<String> {
    (0..n)
        .map(|i| match i {
            0 => "1".to_string(),
            i if i <= 26 => ((b'a' + (i - 1) as u8) as char).to_string(),
            i => format!("s{i}"),
        })
        .collect()
}

/// A subset of a monoid's elements.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ElementSet {
    members: Vec<bool>,
}

impl ElementSet {
    pub fn empty(order: usize) -> Self {
        ElementSet { members: vec![false; order] }
    }

    pub fn from_iter(order: usize, elems: impl IntoIterator<Item = Elem>) -> Self {
        let mut s = Self::empty(order);
        for e in elems {
            s.insert(e);
        }
        s
    }

    pub fn insert(&mut self, e: Elem) {
        self.members[e] = true;
    }

    pub fn contains(&self, e: Elem) -> bool {
        self.members.get(e).copied().unwrap_or(false)
    }

    pub fn len(&self) -> usize {
        self.members.iter().filter(|&&b| b).count()
    }

    pub fn is_empty(&self) -> bool {
        !self.members.iter().any(|&b| b)
    }

    pub fn iter(&self) -> impl Iterator<Item = Elem> + '_ {
        self.members.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| i)
    }

    pub fn to_vec(&self) -> Vec<Elem> {
        self.iter().collect()
    }

    pub fn is_subset(&self, other: &ElementSet) -> bool {
        self.members.iter().zip(&other.members).all(|(&a, &b)| !a || b)
    }

    pub fn intersection(&self, other: &ElementSet) -> ElementSet {
        ElementSet { members: self.members.iter().zip(&other.members).map(|(&a, &b)| a && b).collect() }
    }

    pub fn union(&self, other: &ElementSet) -> ElementSet {
        ElementSet { members: self.members.iter().zip(&other.members).map(|(&a, &b)| a || b).collect() }
    }
}

impl Serialize for ElementSet {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        ser.collect_seq(self.iter())
    }
}

#[cfg(test)]
pub(crate) mod fixtures {
    use super::*;

    /// The diamond semilattice `{1, e, f, 0}` with `ef = 0`.
    pub fn diamond() -> Monoid {
        Monoid::from_table(vec![
            vec![0, 1, 2, 3],
            vec![1, 1, 3, 3],
            vec![2, 3, 2, 3],
            vec![3, 3, 3, 3],
        ])
        .unwrap()
        .with_names(&["1", "e", "f", "0"])
        .unwrap()
    }

    /// `{1, e1, e2}` with `x·ei = ei`: a right-zero band with identity adjoined.
    pub fn right_zero() -> Monoid {
        Monoid::from_table(vec![vec![0, 1, 2], vec![1, 1, 2], vec![2, 1, 2]])
            .unwrap()
            .with_names(&["1", "e1", "e2"])
            .unwrap()
    }
}

#[cfg(test)]
mod tests {
    use super::fixtures::*;
    use super::*;

    fn set(m: &Monoid, names: &[&str]) -> ElementSet {
        ElementSet::from_iter(m.order(), names.iter().map(|n| m.element(n).unwrap()))
    }

    #[test]
    fn validates_small_tables() {
        assert!(Monoid::from_table(vec![vec![0]]).is_ok());
        assert!(Monoid::from_table(vec![vec![0, 1], vec![1, 0]]).is_ok());
        assert!(matches!(
            Monoid::from_table(vec![vec![0, 1], vec![1, 2]]),
            Err(MonoidError::MalformedTable(_))
        ));
        assert!(matches!(
            Monoid::from_table(vec![vec![0, 1], vec![1]]),
            Err(MonoidError::MalformedTable(_))
        ));
    }

    #[test]
    fn rejects_law_violations() {
        // row for `a` does not fix `a` under the identity
        assert_eq!(
            Monoid::from_table(vec![vec![0, 0], vec![1, 1]]),
            Err(MonoidError::IdentityLawFails(1))
        );
        // a·a = b, a·b = 1, b·a = b, b·b = b: (a·a)·a = b·a = b but a·(a·a) = a·b = 1
        let err = Monoid::from_table(vec![vec![0, 1, 2], vec![1, 2, 0], vec![2, 2, 2]]).unwrap_err();
        assert!(matches!(err, MonoidError::NotAssociative { .. }));
    }

    #[test]
    fn idempotent_sets() {
        assert_eq!(Monoid::cyclic_group(2).idempotents().to_vec(), vec![0]);
        let d = diamond();
        assert_eq!(d.idempotents().len(), 4);
        assert_eq!(right_zero().idempotents().to_vec(), vec![0, 1, 2]);
    }

    #[test]
    fn principal_ideals() {
        let trivial = Monoid::from_table(vec![vec![0]]).unwrap();
        assert_eq!(trivial.principal_left_ideal(0).to_vec(), vec![0]);
        let d = diamond();
        assert_eq!(d.principal_left_ideal(d.element("e").unwrap()), set(&d, &["e", "0"]));
        let z = right_zero();
        assert_eq!(z.principal_left_ideal(1), set(&z, &["e1"]));
        assert_eq!(z.principal_right_ideal(1), set(&z, &["e1", "e2"]));
    }

    #[test]
    fn ideal_comparison_shortcuts() {
        let d = diamond();
        let (one, e, zero) = (0, d.element("e").unwrap(), d.element("0").unwrap());
        assert!(d.left_ideal_within(e, e).unwrap());
        assert!(d.left_ideal_within(zero, e).unwrap());
        assert!(d.right_ideal_within(zero, e).unwrap());
        assert!(!d.right_ideal_within(one, e).unwrap());
        assert_eq!(
            Monoid::cyclic_group(2).left_ideal_within(0, 1),
            Err(MonoidError::NotIdempotent(1))
        );
    }

    #[test]
    fn linear_order_tests() {
        let chain = Monoid::chain_semilattice(3);
        assert!(chain.is_linearly_ordered(&chain.full_set()).unwrap().is_linear());

        let z = right_zero();
        let r = set(&z, &["e1", "e2"]);
        assert_eq!(z.is_linearly_ordered(&r).unwrap(), LinearOrder::Incomparable { a: 1, b: 2 });
        assert!(z.is_linearly_ordered(&set(&z, &["e1"])).unwrap().is_linear());

        let d = diamond();
        assert!(matches!(
            d.is_linearly_ordered(&set(&d, &["1", "e", "f"])),
            Err(MonoidError::NotClosed { .. })
        ));
    }

    #[test]
    fn groups_are_linearly_ordered() {
        for n in 1..6 {
            let g = Monoid::cyclic_group(n);
            assert!(g.is_linearly_ordered(&g.full_set()).unwrap().is_linear());
        }
    }
}
