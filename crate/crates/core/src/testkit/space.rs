//! Relations on `Aʷ` definable by conjunctions of atoms, computed
//! extensionally: every conjunction of at most `k` atoms is the intersection
//! of a conjunction of at most `k − 1` atoms with one more atom, so a
//! breadth-first closure over distinct relations reaches all of them.

use std::collections::HashMap;

use crate::act::Act;
use crate::formula::{Atom, CopyNormality, Formula, FormulaBounds, Term, TupleSet};

#[derive(Debug, Clone)]
pub struct Definable {
    pub relation: TupleSet,
    /// A shortest conjunction defining it.
    pub atoms: Vec<Atom>,
}

/// Oriented atoms over `width` variables with every coefficient pair.
pub fn atom_universe(order: usize, width: usize) -> Vec<Atom> {
    let terms: Vec<Term> = (0..width).flat_map(|var| (0..order).map(move |coef| Term { var, coef })).collect();
    let mut out = Vec::new();
    for (i, &l) in terms.iter().enumerate() {
        for &r in &terms[i..] {
            out.push(Atom { lhs: l, rhs: r });
        }
    }
    out
}

pub fn atom_relation(act: &Act, width: usize, atom: Atom) -> TupleSet {
    let mut rel = TupleSet::empty(act.size(), width);
    for c in 0..rel.cells() {
        let t = rel.decode(c);
        if act.act(atom.lhs.coef, t[atom.lhs.var]) == act.act(atom.rhs.coef, t[atom.rhs.var]) {
            rel.insert(&t);
        }
    }
    rel
}

/// Distinct relations defined by conjunctions of `1..=max_atoms` atoms, in
/// order of discovery.
pub fn conjunction_closure(act: &Act, width: usize, max_atoms: usize) -> Vec<Definable> {
    let mut atoms: Vec<Definable> = Vec::new();
    let mut seen: HashMap<TupleSet, ()> = HashMap::new();
    for a in atom_universe(act.monoid().order(), width) {
        let relation = atom_relation(act, width, a);
        if seen.insert(relation.clone(), ()).is_none() {
            atoms.push(Definable { relation, atoms: vec![a] });
        }
    }
    if max_atoms == 0 {
        return Vec::new();
    }
    let mut all = atoms.clone();
    let mut frontier = 0..all.len();
    for _ in 1..max_atoms {
        let start = all.len();
        for i in frontier.clone() {
            for a in &atoms {
                let mut r = all[i].relation.clone();
                r.intersect_with(&a.relation);
                if !seen.contains_key(&r) {
                    seen.insert(r.clone(), ());
                    let mut list = all[i].atoms.clone();
                    list.push(a.atoms[0]);
                    all.push(Definable { relation: r, atoms: list });
                }
            }
        }
        frontier = start..all.len();
    }
    all
}

/// `∃` over the trailing coordinates, keeping the first `keep`.
pub fn project(rel: &TupleSet, base: usize, keep: usize) -> TupleSet {
    let drop = base.pow((rel.width() - keep) as u32);
    let mut out = TupleSet::empty(base, keep);
    let mut last = usize::MAX;
    for c in rel.codes() {
        let k = c / drop;
        if k != last {
            out.insert(&out.decode(k));
            last = k;
        }
    }
    out
}

/// Copy normality of `rel` with its last `params` coordinates as parameters.
pub fn copies_normal(rel: &TupleSet, base: usize, params: usize) -> CopyNormality {
    let objects = rel.width() - params;
    let p_cells = base.pow(params as u32);
    let mut copies = vec![TupleSet::empty(base, objects); p_cells];
    for c in rel.codes() {
        let x = c / p_cells;
        let copy = &mut copies[c % p_cells];
        copy.insert(&copy.decode(x));
    }
    let space = TupleSet::empty(base, params);
    for p in 0..p_cells {
        for q in p + 1..p_cells {
            let (x, y) = (&copies[p], &copies[q]);
            if x != y {
                if let Some(shared) = x.first_common(y) {
                    return CopyNormality::Violation {
                        params: [space.decode(p), space.decode(q)],
                        shared,
                        separating: x.first_difference(y).expect("sets differ"),
                    };
                }
            }
        }
    }
    CopyNormality::Normal
}

/// A primitive formula with overlapping unequal copies.
#[derive(Debug, Clone)]
pub struct FoundViolation {
    pub formula: Formula,
    pub params: usize,
    pub violation: CopyNormality,
}

/// First copy-normality violation among the formulas within `bounds`, each
/// split of the free block into objects and at least one parameter tried.
pub fn search_copy_violation(act: &Act, bounds: FormulaBounds) -> Option<FoundViolation> {
    let (f, b) = (bounds.max_free, bounds.max_bound);
    let mut seen: HashMap<TupleSet, ()> = HashMap::new();
    for d in conjunction_closure(act, f + b, bounds.max_atoms) {
        let rel = project(&d.relation, act.size(), f);
        if seen.insert(rel.clone(), ()).is_some() {
            continue;
        }
        for params in 1..f {
            let v = copies_normal(&rel, act.size(), params);
            if !v.is_normal() {
                let formula = Formula::with_default_names(f, b, d.atoms);
                return Some(FoundViolation { formula, params, violation: v });
            }
        }
    }
    None
}
