//! Bounded enumeration of primitive formulas.
//!
//! Canonical form: atoms oriented (smaller term left), sorted and
//! deduplicated; unused bound variables removed; the bound block relabelled
//! to give the least atom list. Free variables are positional and are not
//! permuted. The enumerator walks strictly increasing atom lists over the
//! oriented-atom universe and keeps the canonical ones that use every
//! variable, so each formula appears once.

use serde::{Deserialize, Serialize};

use super::{Atom, Formula, FormulaError, Term};
use crate::monoid::enumerate::permute;
use crate::monoid::Monoid;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FormulaBounds {
    pub max_free: usize,
    pub max_bound: usize,
    pub max_atoms: usize,
}

/// Largest bounds the enumerator accepts.
pub const FORMULA_LIMITS: FormulaBounds = FormulaBounds { max_free: 6, max_bound: 3, max_atoms: 5 };

impl FormulaBounds {
    pub fn check(&self) -> Result<(), FormulaError> {
        for (what, requested, limit) in [
            ("max_free", self.max_free, FORMULA_LIMITS.max_free),
            ("max_bound", self.max_bound, FORMULA_LIMITS.max_bound),
            ("max_atoms", self.max_atoms, FORMULA_LIMITS.max_atoms),
        ] {
            if requested > limit {
                return Err(FormulaError::BoundExceeded { what, requested, limit });
            }
        }
        Ok(())
    }
}

fn bound_permutations(b: usize) -> Vec<Vec<usize>> {
    let mut items: Vec<usize> = (0..b).collect();
    let mut out = Vec::new();
    permute(&mut items, 0, &mut out);
    out
}

/// Sorted, deduplicated, oriented atoms after renaming bound variable
/// `f + i` to `f + p[i]`.
fn normalized(atoms: &[Atom], f: usize, p: &[usize]) -> Vec<Atom> {
    let mut out: Vec<Atom> = atoms
        .iter()
        .map(|a| a.map_vars(|v| if v < f { v } else { f + p[v - f] }).oriented())
        .collect();
    out.sort_unstable();
    out.dedup();
    out
}

fn least_over(atoms: &[Atom], f: usize, perms: &[Vec<usize>]) -> Vec<Atom> {
    perms.iter().map(|p| normalized(atoms, f, p)).min().unwrap_or_default()
}

/// Canonical representative of `phi` (default variable names).
pub fn canonical_form(phi: &Formula) -> Formula {
    let f = phi.free_count();
    let mut used: Vec<usize> = (f..phi.var_count()).filter(|&v| phi.atoms().iter().any(|a| a.mentions(v))).collect();
    used.sort_unstable();
    let compact = |v: usize| if v < f { v } else { f + used.iter().position(|&u| u == v).expect("used") };
    let atoms: Vec<Atom> = phi.atoms().iter().map(|a| a.map_vars(compact)).collect();
    let atoms = least_over(&atoms, f, &bound_permutations(used.len()));
    Formula::with_default_names(f, used.len(), atoms)
}

/// Lazily yields every canonical formula within `bounds`, ordered by free
/// count, bound count, atom count, then atom list.
pub fn enumerate_formulas(m: &Monoid, bounds: FormulaBounds) -> Result<FormulaIter, FormulaError> {
    bounds.check()?;
    Ok(FormulaIter { order: m.order(), bounds, f: 0, b: 0, k: 0, universe: Vec::new(), combo: Vec::new(), perms: Vec::new() })
}

pub struct FormulaIter {
    order: usize,
    bounds: FormulaBounds,
    f: usize,
    b: usize,
    /// Current atom count; 0 before the first shape is set up.
    k: usize,
    universe: Vec<Atom>,
    combo: Vec<usize>,
    perms: Vec<Vec<usize>>,
}

impl FormulaIter {
    /// Moves to the next (free, bound, atoms) shape; false when exhausted.
    fn next_shape(&mut self) -> bool {
        if self.bounds.max_atoms == 0 {
            return false;
        }
        loop {
            if self.k == 0 {
                self.k = 1;
            } else if self.k < self.bounds.max_atoms {
                self.k += 1;
            } else if self.b < self.bounds.max_bound {
                self.b += 1;
                self.k = 1;
            } else if self.f < self.bounds.max_free {
                self.f += 1;
                self.b = 0;
                self.k = 1;
            } else {
                return false;
            }
            let v = self.f + self.b;
            let terms: Vec<Term> = (0..v).flat_map(|var| (0..self.order).map(move |coef| Term { var, coef })).collect();
            self.universe.clear();
            for (i, &t1) in terms.iter().enumerate() {
                for &t2 in &terms[i..] {
                    self.universe.push(Atom { lhs: t1, rhs: t2 });
                }
            }
            if self.k <= self.universe.len() {
                self.combo = (0..self.k).collect();
                self.perms = bound_permutations(self.b);
                return true;
            }
        }
    }

    /// Advances `combo` to the next strictly increasing index list.
    fn advance(&mut self) -> bool {
        let n = self.universe.len();
        let k = self.combo.len();
        let Some(i) = (0..k).rev().find(|&i| self.combo[i] < n - k + i) else {
            return false;
        };
        self.combo[i] += 1;
        for j in i + 1..k {
            self.combo[j] = self.combo[j - 1] + 1;
        }
        true
    }

    fn accept(&self, atoms: &[Atom]) -> bool {
        let v = self.f + self.b;
        let mut used = vec![false; v];
        for a in atoms {
            used[a.lhs.var] = true;
            used[a.rhs.var] = true;
        }
        used.iter().all(|&u| u) && least_over(atoms, self.f, &self.perms) == atoms
    }
}

impl Iterator for FormulaIter {
    type Item = Formula;

    fn next(&mut self) -> Option<Formula> {
        loop {
            // a fresh shape starts at its first combination
            let ready = (self.k > 0 && self.advance()) || self.next_shape();
            if !ready {
                return None;
            }
            let atoms: Vec<Atom> = self.combo.iter().map(|&i| self.universe[i]).collect();
            if self.accept(&atoms) {
                return Some(Formula::with_default_names(self.f, self.b, atoms));
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::monoid::fixtures::diamond;
    use crate::monoid::Monoid;
    use std::collections::BTreeSet;

    /// Every raw atom sequence, canonicalized afterwards.
    fn unpruned(order: usize, bounds: FormulaBounds) -> BTreeSet<(usize, usize, Vec<Atom>)> {
        let mut out = BTreeSet::new();
        for f in 0..=bounds.max_free {
            for b in 0..=bounds.max_bound {
                let v = f + b;
                let raw: Vec<Atom> = (0..v)
                    .flat_map(|v1| (0..order).flat_map(move |c1| (0..v).flat_map(move |v2| (0..order).map(move |c2| Atom::new(c1, v1, c2, v2)))))
                    .collect();
                let mut seqs: Vec<Vec<Atom>> = vec![Vec::new()];
                for _ in 0..bounds.max_atoms {
                    seqs = seqs
                        .iter()
                        .flat_map(|s| raw.iter().map(move |&a| [s.clone(), vec![a]].concat()))
                        .collect();
                    for s in &seqs {
                        let c = canonical_form(&Formula::with_default_names(f, b, s.clone()));
                        let all_free = (0..f).all(|x| c.atoms().iter().any(|a| a.mentions(x)));
                        if all_free {
                            out.insert((c.free_count(), c.bound_count(), c.atoms().to_vec()));
                        }
                    }
                }
            }
        }
        out
    }

    #[test]
    fn single_element_monoid() {
        let m = Monoid::from_table(vec![vec![0]]).unwrap();
        let bounds = FormulaBounds { max_free: 1, max_bound: 0, max_atoms: 1 };
        let all: Vec<Formula> = enumerate_formulas(&m, bounds).unwrap().collect();
        assert_eq!(all.len(), 1);
        assert_eq!(all[0].display(&m).to_string(), "x0 = x0");
    }

    #[test]
    fn dual_generator_agreement() {
        let m = Monoid::chain_semilattice(2);
        for bounds in [
            FormulaBounds { max_free: 2, max_bound: 1, max_atoms: 2 },
            FormulaBounds { max_free: 1, max_bound: 2, max_atoms: 2 },
        ] {
            let fast: Vec<(usize, usize, Vec<Atom>)> = enumerate_formulas(&m, bounds)
                .unwrap()
                .map(|f| (f.free_count(), f.bound_count(), f.atoms().to_vec()))
                .collect();
            let set: BTreeSet<_> = fast.iter().cloned().collect();
            assert_eq!(set.len(), fast.len(), "duplicates");
            assert_eq!(set, unpruned(2, bounds));
        }
    }

    #[test]
    fn deterministic_and_canonical() {
        let d = diamond();
        let bounds = FormulaBounds { max_free: 2, max_bound: 1, max_atoms: 2 };
        let a: Vec<Formula> = enumerate_formulas(&d, bounds).unwrap().collect();
        let b: Vec<Formula> = enumerate_formulas(&d, bounds).unwrap().collect();
        assert_eq!(a, b);
        assert!(a.iter().all(|f| canonical_form(f) == *f));
    }

    #[test]
    fn canonical_form_ignores_renaming() {
        let d = diamond();
        let p = crate::formula::parse_formula("exists u v : e*u = x & f*v = x & u = v", &d).unwrap();
        let q = crate::formula::parse_formula("exists v u : v = u & f*u = x & e*v = x", &d).unwrap();
        assert_eq!(canonical_form(&p), canonical_form(&q));
        let unused = crate::formula::parse_formula("exists u w : e*u = x", &d).unwrap();
        assert_eq!(canonical_form(&unused).bound_count(), 1);
    }

    #[test]
    fn bounds_are_enforced() {
        let d = diamond();
        let too_big = FormulaBounds { max_free: 7, max_bound: 0, max_atoms: 1 };
        assert!(matches!(enumerate_formulas(&d, too_big), Err(FormulaError::BoundExceeded { .. })));
        let none = FormulaBounds { max_free: 2, max_bound: 0, max_atoms: 0 };
        assert_eq!(enumerate_formulas(&d, none).unwrap().count(), 0);
    }
}
