//! Finite-model semantics: solution sets, copies, primitive equivalences and
//! generalized primitive sets.

use std::collections::BTreeMap;

use serde::{Serialize, Serializer};
use thiserror::Error;

use super::{Atom, Formula, Var};
use crate::act::{Act, Point};

/// A set of `width`-tuples of carrier points, stored as a bitset over the
/// base-`m` codes of the tuples (first coordinate most significant).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TupleSet {
    base: usize,
    width: usize,
    words: Vec<u64>,
}

impl TupleSet {
    pub fn empty(base: usize, width: usize) -> TupleSet {
        let cells = base.checked_pow(width as u32).expect("tuple space too large");
        assert!(cells <= 1 << 28, "tuple space too large");
        TupleSet { base, width, words: vec![0; cells.div_ceil(64)] }
    }

    pub fn full(base: usize, width: usize) -> TupleSet {
        let mut s = TupleSet::empty(base, width);
        for c in 0..s.cells() {
            s.words[c / 64] |= 1 << (c % 64);
        }
        s
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn cells(&self) -> usize {
        self.base.pow(self.width as u32)
    }

    pub fn code(&self, t: &[Point]) -> usize {
        debug_assert_eq!(t.len(), self.width);
        t.iter().fold(0, |acc, &p| acc * self.base + p)
    }

    pub fn decode(&self, mut c: usize) -> Vec<Point> {
        let mut t = vec![0; self.width];
        for slot in t.iter_mut().rev() {
            *slot = c % self.base;
            c /= self.base;
        }
        t
    }

    pub fn insert(&mut self, t: &[Point]) {
        let c = self.code(t);
        self.words[c / 64] |= 1 << (c % 64);
    }

    pub fn contains(&self, t: &[Point]) -> bool {
        self.contains_code(self.code(t))
    }

    pub fn contains_code(&self, c: usize) -> bool {
        self.words[c / 64] >> (c % 64) & 1 == 1
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn codes(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(i, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                (w != 0).then(|| {
                    let b = w.trailing_zeros() as usize;
                    w &= w - 1;
                    i * 64 + b
                })
            })
        })
    }

    pub fn iter(&self) -> impl Iterator<Item = Vec<Point>> + '_ {
        self.codes().map(|c| self.decode(c))
    }

    pub fn intersects(&self, other: &TupleSet) -> bool {
        self.words.iter().zip(&other.words).any(|(a, b)| a & b != 0)
    }

    pub fn intersect_with(&mut self, other: &TupleSet) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= b;
        }
    }

    pub fn is_subset(&self, other: &TupleSet) -> bool {
        self.words.iter().zip(&other.words).all(|(a, b)| a & !b == 0)
    }

    /// Least tuple in `self ∩ other`.
    pub fn first_common(&self, other: &TupleSet) -> Option<Vec<Point>> {
        self.first_where(other, |a, b| a & b)
    }

    /// Least tuple in the symmetric difference.
    pub fn first_difference(&self, other: &TupleSet) -> Option<Vec<Point>> {
        self.first_where(other, |a, b| a ^ b)
    }

    fn first_where(&self, other: &TupleSet, f: impl Fn(u64, u64) -> u64) -> Option<Vec<Point>> {
        self.words
            .iter()
            .zip(&other.words)
            .enumerate()
            .find_map(|(i, (&a, &b))| {
                let w = f(a, b);
                (w != 0).then(|| i * 64 + w.trailing_zeros() as usize)
            })
            .map(|c| self.decode(c))
    }
}

impl Serialize for TupleSet {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(self.iter())
    }
}

/// Backtracking search over the variables of one formula on one act.
struct Search<'a> {
    act: &'a Act,
    atoms: &'a [Atom],
    /// `preimage[s][b]` = points `p` with `s·p = b`.
    preimage: Vec<Vec<Vec<Point>>>,
    assign: Vec<Option<Point>>,
}

impl<'a> Search<'a> {
    fn new(act: &'a Act, phi: &'a Formula) -> Search<'a> {
        let m = act.monoid();
        let mut preimage = vec![vec![Vec::new(); act.size()]; m.order()];
        for s in m.elements() {
            for p in act.points() {
                preimage[s][act.act(s, p)].push(p);
            }
        }
        Search { act, atoms: phi.atoms(), preimage, assign: vec![None; phi.var_count()] }
    }

    /// Points allowed for `v` by atoms whose other side is already fixed.
    fn candidates(&self, v: Var) -> Vec<Point> {
        let mut cand: Option<Vec<Point>> = None;
        for a in self.atoms {
            for (mine, other) in [(a.lhs, a.rhs), (a.rhs, a.lhs)] {
                if mine.var != v || other.var == v {
                    continue;
                }
                if let Some(o) = self.assign[other.var] {
                    let target = self.act.act(other.coef, o);
                    let allowed = &self.preimage[mine.coef][target];
                    cand = Some(match cand {
                        None => allowed.clone(),
                        Some(c) => c.into_iter().filter(|p| allowed.contains(p)).collect(),
                    });
                }
            }
        }
        cand.unwrap_or_else(|| self.act.points().collect())
    }

    /// Atoms mentioning `v` whose variables are all assigned hold.
    fn consistent(&self, v: Var) -> bool {
        self.atoms.iter().filter(|a| a.mentions(v)).all(|a| {
            match (self.assign[a.lhs.var], self.assign[a.rhs.var]) {
                (Some(x), Some(y)) => self.act.act(a.lhs.coef, x) == self.act.act(a.rhs.coef, y),
                _ => true,
            }
        })
    }

    /// Whether the current assignment extends to all of `vars`.
    fn exists(&mut self, vars: &[Var]) -> bool {
        let Some((&v, rest)) = vars.split_first() else {
            return true;
        };
        for p in self.candidates(v) {
            self.assign[v] = Some(p);
            if self.consistent(v) && self.exists(rest) {
                self.assign[v] = None;
                return true;
            }
        }
        self.assign[v] = None;
        false
    }

    /// Every assignment of `objects` that extends to `bound`.
    fn enumerate(&mut self, objects: &[Var], bound: &[Var], out: &mut TupleSet, prefix: &mut Vec<Point>) {
        let Some((&v, rest)) = objects.split_first() else {
            if self.exists(bound) {
                out.insert(prefix);
            }
            return;
        };
        for p in self.candidates(v) {
            self.assign[v] = Some(p);
            if self.consistent(v) {
                prefix.push(p);
                self.enumerate(rest, bound, out, prefix);
                prefix.pop();
            }
        }
        self.assign[v] = None;
    }
}

/// `Φ(A, p̄)`: tuples for the free variables not covered by `params`, which
/// fix the last `params.len()` free variables.
pub fn solution_set(phi: &Formula, act: &Act, params: &[Point]) -> TupleSet {
    let f = phi.free_count();
    assert!(params.len() <= f, "more parameters than free variables");
    let objects: Vec<Var> = (0..f - params.len()).collect();
    let bound: Vec<Var> = (f..phi.var_count()).collect();
    let mut search = Search::new(act, phi);
    for (i, &p) in params.iter().enumerate() {
        search.assign[f - params.len() + i] = Some(p);
    }
    let mut out = TupleSet::empty(act.size(), objects.len());
    // atoms between parameters alone
    let params_ok = (f - params.len()..f).all(|v| search.consistent(v));
    if params_ok {
        search.enumerate(&objects, &bound, &mut out, &mut Vec::new());
    }
    out
}

/// `A ⊨ Φ(t̄)` for a full assignment of the free variables.
pub fn satisfies(phi: &Formula, act: &Act, tuple: &[Point]) -> bool {
    assert_eq!(tuple.len(), phi.free_count());
    !solution_set(phi, act, tuple).is_empty()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum CopyNormality {
    Normal,
    /// Two copies that meet without being equal.
    Violation {
        params: [Vec<Point>; 2],
        /// In both copies.
        shared: Vec<Point>,
        /// In exactly one copy.
        separating: Vec<Point>,
    },
}

impl CopyNormality {
    pub fn is_normal(&self) -> bool {
        matches!(self, CopyNormality::Normal)
    }
}

/// Whether any two copies `Φ(A, p̄)`, `Φ(A, q̄)` are equal or disjoint, the
/// last `n_params` free variables being the parameter block.
pub fn is_copy_normal(phi: &Formula, act: &Act, n_params: usize) -> CopyNormality {
    if n_params == 0 {
        return CopyNormality::Normal;
    }
    let space = TupleSet::empty(act.size(), n_params);
    let copies: Vec<(Vec<Point>, TupleSet)> = (0..space.cells())
        .map(|c| {
            let p = space.decode(c);
            let s = solution_set(phi, act, &p);
            (p, s)
        })
        .collect();
    for (i, (p, x)) in copies.iter().enumerate() {
        for (q, y) in &copies[i + 1..] {
            if x != y {
                if let Some(shared) = x.first_common(y) {
                    let separating = x.first_difference(y).expect("sets differ");
                    return CopyNormality::Violation { params: [p.clone(), q.clone()], shared, separating };
                }
            }
        }
    }
    CopyNormality::Normal
}

/// A formula together with the points substituted for its parameter block.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instantiated {
    pub formula: Formula,
    pub params: Vec<Point>,
}

impl Instantiated {
    pub fn new(formula: Formula, params: Vec<Point>) -> Instantiated {
        Instantiated { formula, params }
    }

    /// Width of the object block.
    pub fn objects(&self) -> usize {
        self.formula.free_count().saturating_sub(self.params.len())
    }

    pub fn solutions(&self, act: &Act) -> TupleSet {
        solution_set(&self.formula, act, &self.params)
    }
}

/// The extension of a primitive formula that turned out to be an
/// equivalence on its domain.
#[derive(Debug, Clone, Serialize)]
pub struct PrimitiveEquivalence {
    pub width: usize,
    pub extension: TupleSet,
    pub domain: TupleSet,
    /// Classes in order of their least tuple.
    pub classes: Vec<Vec<Vec<Point>>>,
    #[serde(skip)]
    class_of: BTreeMap<Vec<Point>, usize>,
}

impl PrimitiveEquivalence {
    pub fn class_of(&self, t: &[Point]) -> Option<usize> {
        self.class_of.get(t).copied()
    }
}

/// `Some` iff the object block splits into two halves `x̄₁, x̄₂` on which
/// `Φ` is symmetric and transitive; the domain is then `Φ(x̄, x̄)`.
pub fn is_primitive_equivalence(phi: &Instantiated, act: &Act) -> Option<PrimitiveEquivalence> {
    let k = phi.objects();
    if k == 0 || k % 2 == 1 || phi.params.len() > phi.formula.free_count() {
        return None;
    }
    let width = k / 2;
    let eq = PrimitiveEquivalence::from_extension(phi.solutions(act), act.size(), width)?;
    debug_assert!(solution_set(&phi.formula.identify_blocks(width), act, &phi.params) == eq.domain);
    Some(eq)
}

impl PrimitiveEquivalence {
    /// `ext` read as a relation between the two halves of its tuples.
    pub fn from_extension(ext: TupleSet, base: usize, width: usize) -> Option<PrimitiveEquivalence> {
        let half = TupleSet::empty(base, width);
        let cells = half.cells();
        // row(a) = {b : a α b}
        let mut rows = vec![TupleSet::empty(base, width); cells];
        for c in ext.codes() {
            rows[c / cells].insert(&half.decode(c % cells));
        }
        for a in 0..cells {
            for b in rows[a].codes() {
                if !rows[b].contains_code(a) || !rows[b].is_subset(&rows[a]) {
                    return None;
                }
            }
        }
        let mut domain = TupleSet::empty(base, width);
        let mut classes: Vec<Vec<Vec<Point>>> = Vec::new();
        let mut class_of = BTreeMap::new();
        for a in 0..cells {
            if !rows[a].contains_code(a) {
                continue;
            }
            let t = half.decode(a);
            domain.insert(&t);
            let first = rows[a].codes().next().expect("reflexive");
            let idx = if first == a {
                classes.push(rows[a].iter().collect());
                classes.len() - 1
            } else {
                class_of[&half.decode(first)]
            };
            class_of.insert(t, idx);
        }
        Some(PrimitiveEquivalence { width, extension: ext, domain, classes, class_of })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GroupError {
    #[error("free-variable blocks do not match the equivalence width: {0}")]
    MalformedBlocks(String),
    #[error("basis tuple {0:?} lies outside the domain of the equivalence")]
    BasisOutsideDomain(Vec<Point>),
    #[error("the equivalence formula is not symmetric and transitive on this act")]
    NotAnEquivalence,
}

/// `X = X*/α` for a finite basis `X*` (intersection of the basis sets).
#[derive(Debug, Clone, Serialize)]
pub struct GeneralizedPrimitiveSet {
    pub basis: TupleSet,
    pub alpha: PrimitiveEquivalence,
    /// Indices into `alpha.classes` of the classes meeting the basis.
    pub classes: Vec<usize>,
}

impl GeneralizedPrimitiveSet {
    pub fn new(basis: &[Instantiated], alpha: &Instantiated, act: &Act) -> Result<Self, GroupError> {
        let alpha = is_primitive_equivalence(alpha, act).ok_or(GroupError::NotAnEquivalence)?;
        let w = alpha.width;
        let mut set = TupleSet::full(act.size(), w);
        for b in basis {
            if b.objects() != w {
                return Err(GroupError::MalformedBlocks(format!(
                    "basis formula has {} object variables, expected {w}",
                    b.objects()
                )));
            }
            set.intersect_with(&b.solutions(act));
        }
        Self::from_sets(set, alpha)
    }

    pub fn from_sets(basis: TupleSet, alpha: PrimitiveEquivalence) -> Result<Self, GroupError> {
        if let Some(t) = basis.iter().find(|t| !alpha.domain.contains(t)) {
            return Err(GroupError::BasisOutsideDomain(t));
        }
        let mut classes: Vec<usize> = basis.iter().map(|t| alpha.class_of(&t).expect("in domain")).collect();
        classes.sort_unstable();
        classes.dedup();
        Ok(GeneralizedPrimitiveSet { basis, alpha, classes })
    }

    pub fn size(&self) -> usize {
        self.classes.len()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GroupCertificate {
    pub size: usize,
    /// `table[i][j]` is the class of `cᵢ · cⱼ`, classes numbered as in
    /// `representatives`.
    pub table: Vec<Vec<usize>>,
    pub identity: usize,
    pub representatives: Vec<Vec<Point>>,
}

/// Whether `op(x̄, ȳ, z̄)` defines a group operation on `X = X*/α`.
///
/// For classes `[x], [y]` of `X` the candidate products are the classes of `X`
/// containing some `z̄` with `op(x̄', ȳ', z̄)`, over all basis representatives
/// `x̄' ∈ [x]`, `ȳ' ∈ [y]`. Every representative pair must produce exactly one
/// such class and all pairs the same one. Tuples `z̄` outside `X` are ignored.
pub fn detect_primitive_group(
    basis: &[Instantiated],
    alpha: &Instantiated,
    op: &Instantiated,
    act: &Act,
) -> Result<Option<GroupCertificate>, GroupError> {
    let x = GeneralizedPrimitiveSet::new(basis, alpha, act)?;
    let w = x.alpha.width;
    if op.objects() != 3 * w {
        return Err(GroupError::MalformedBlocks(format!(
            "operation has {} object variables, expected {}",
            op.objects(),
            3 * w
        )));
    }
    Ok(group_certificate(&x, &op.solutions(act), group_identity))
}

/// Representatives in the basis of each class of `X`.
fn representatives(x: &GeneralizedPrimitiveSet) -> Vec<Vec<Vec<Point>>> {
    x.classes
        .iter()
        .map(|&c| x.alpha.classes[c].iter().filter(|t| x.basis.contains(t)).cloned().collect())
        .collect()
}

/// The operation induced on `X` by a relation over `(x̄, ȳ, z̄)`, if it is
/// well defined and total.
pub fn operation_table(x: &GeneralizedPrimitiveSet, rel: &TupleSet) -> Option<Vec<Vec<usize>>> {
    let w = x.alpha.width;
    let index: BTreeMap<usize, usize> = x.classes.iter().enumerate().map(|(i, &c)| (c, i)).collect();
    let reps = representatives(x);
    let k = x.size();
    let mut table = vec![vec![0; k]; k];
    for i in 0..k {
        for j in 0..k {
            let mut product = None;
            for a in &reps[i] {
                for b in &reps[j] {
                    let mut found = None;
                    for z in rel.iter().filter(|t| t[..w] == a[..] && t[w..2 * w] == b[..]) {
                        let Some(c) = x.alpha.class_of(&z[2 * w..]).and_then(|c| index.get(&c)) else {
                            continue;
                        };
                        if found.is_some_and(|f| f != *c) {
                            return None;
                        }
                        found = Some(*c);
                    }
                    let c = found?;
                    if product.is_some_and(|p| p != c) {
                        return None;
                    }
                    product = Some(c);
                }
            }
            table[i][j] = product.expect("classes are nonempty");
        }
    }
    Some(table)
}

/// Certificate for the operation `rel` induces on `X`, with `identity`
/// deciding the group axioms on the table.
pub fn group_certificate(
    x: &GeneralizedPrimitiveSet,
    rel: &TupleSet,
    identity: impl Fn(&[Vec<usize>]) -> Option<usize>,
) -> Option<GroupCertificate> {
    let table = operation_table(x, rel)?;
    let identity = identity(&table)?;
    Some(GroupCertificate {
        size: x.size(),
        table,
        identity,
        representatives: representatives(x).iter().map(|r| r[0].clone()).collect(),
    })
}

/// Identity of the table if it is a group.
pub fn group_identity(t: &[Vec<usize>]) -> Option<usize> {
    let k = t.len();
    for a in 0..k {
        for b in 0..k {
            for c in 0..k {
                if t[t[a][b]][c] != t[a][t[b][c]] {
                    return None;
                }
            }
        }
    }
    let e = (0..k).find(|&e| (0..k).all(|a| t[e][a] == a && t[a][e] == a))?;
    (0..k).all(|a| (0..k).any(|b| t[a][b] == e && t[b][a] == e)).then_some(e)
}
