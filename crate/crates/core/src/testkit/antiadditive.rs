//! Group structures on generalized primitive sets of width one.
//!
//! For every regular act in range, the basis, equivalence and operation are
//! drawn from the relations definable within the atom bound, each with its
//! own parameter: basis over `(x, p)`, equivalence over `(x₁, x₂, p)`,
//! operation over `(x, y, z, p)`, plus one quantified variable when allowed.
//! Operation relations are compared as bitmasks over `A³`.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;
use std::time::Instant;

use rayon::prelude::*;

use super::generate::regular_acts;
use super::space::{conjunction_closure, project, Definable};
use super::{CaseResult, ConfigError, Discrepancy, ExperimentConfig, Finding, FormulaRecord, Sweep, SweepReport};
use crate::act::{Act, Point};
use crate::deciders::{decide_class, ClassDecision};
use crate::formula::{
    detect_primitive_group, group_identity, Formula, GeneralizedPrimitiveSet, Instantiated, PrimitiveEquivalence,
    TupleSet,
};
use crate::monoid::Monoid;

/// Decides the group axioms on an operation table, returning the identity.
pub type GroupTest = dyn Fn(&[Vec<usize>]) -> Option<usize> + Sync;

pub fn run_antiadditivity_sweep(cfg: &ExperimentConfig) -> Result<SweepReport, ConfigError> {
    run_antiadditivity_sweep_with(cfg, &group_identity)
}

/// The sweep with a substitute group test, for mutation testing.
pub fn run_antiadditivity_sweep_with(cfg: &ExperimentConfig, test: &GroupTest) -> Result<SweepReport, ConfigError> {
    cfg.validate()?;
    if cfg.act_size.pow(3) > 128 {
        return Err(ConfigError::BoundExceeded { what: "act_size^3", requested: cfg.act_size.pow(3), limit: 128 });
    }
    let start = Instant::now();
    let mut rng = cfg.rng();
    let mut cases: Vec<(Arc<Monoid>, Act)> = Vec::new();
    let mut report = SweepReport::new(Sweep::Antiadditivity);
    for m in cfg.monoids(true) {
        if !matches!(decide_class(&m), ClassDecision::PrimitiveNormal { .. }) {
            continue;
        }
        report.add("monoids", 1);
        let (acts, _) = regular_acts(&m, cfg.act_size);
        let by_size = (1..=cfg.act_size).map(|k| acts.iter().filter(|a| a.size() == k).cloned().collect());
        for act in cfg.acts(by_size, &mut rng) {
            cases.push((m.clone(), act));
        }
    }
    let bound = cfg.formula.max_bound.min(1);
    let atoms = cfg.formula.max_atoms;
    let results: Vec<CaseResult> =
        cfg.install(|| cases.par_iter().map(|(m, act)| check_act(m, act, bound, atoms, test)).collect());
    for r in results {
        report.absorb(r);
    }
    report.runtime = start.elapsed();
    Ok(report)
}

/// Distinct parameter slices of the relations definable over `free`
/// object variables, one parameter and `bound` quantified variables.
fn slices(act: &Act, objects: usize, bound: usize, atoms: usize) -> Vec<(TupleSet, Definable, Point)> {
    let base = act.size();
    let mut seen: HashMap<TupleSet, ()> = HashMap::new();
    let mut out = Vec::new();
    for d in conjunction_closure(act, objects + 1 + bound, atoms) {
        let rel = project(&d.relation, base, objects + 1);
        for p in 0..base {
            let mut s = TupleSet::empty(base, objects);
            for c in rel.codes().filter(|c| c % base == p) {
                s.insert(&s.decode(c / base));
            }
            if seen.insert(s.clone(), ()).is_none() {
                out.push((s, d.clone(), p));
            }
        }
    }
    out
}

type Mask = u128;

/// Operation table of `op` (a bitmask over `A³`) on the classes of `X`.
fn fast_table(op: Mask, base: usize, class: &[Option<usize>], reps: &[Vec<Point>]) -> Option<Vec<Vec<usize>>> {
    let k = reps.len();
    let row = (1 as Mask).checked_shl(base as u32).map_or(Mask::MAX, |b| b - 1);
    let mut table = vec![vec![0; k]; k];
    for i in 0..k {
        for j in 0..k {
            let mut product = None;
            for &a in &reps[i] {
                for &b in &reps[j] {
                    let zs = op >> ((a * base + b) * base) & row;
                    let mut found = None;
                    for z in 0..base {
                        if zs >> z & 1 == 0 {
                            continue;
                        }
                        if let Some(c) = class[z] {
                            if found.is_some_and(|f| f != c) {
                                return None;
                            }
                            found = Some(c);
                        }
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

fn record(d: &Definable, objects: usize, bound: usize, m: &Monoid) -> FormulaRecord {
    FormulaRecord::new(&Formula::with_default_names(objects + 1, bound, d.atoms.clone()), m)
}

fn check_act(m: &Monoid, act: &Act, bound: usize, atoms: usize, test: &GroupTest) -> CaseResult {
    let mut out = CaseResult::default();
    let base = act.size();
    let bases = slices(act, 1, bound, atoms);
    let alphas: Vec<(PrimitiveEquivalence, Definable, Point)> = slices(act, 2, bound, atoms)
        .into_iter()
        .filter_map(|(s, d, p)| PrimitiveEquivalence::from_extension(s, base, 1).map(|e| (e, d, p)))
        .collect();
    let ops: Vec<(Mask, Definable, Point)> = slices(act, 3, bound, atoms)
        .into_iter()
        .map(|(s, d, p)| (s.codes().fold(0, |acc: Mask, c| acc | 1 << c), d, p))
        .collect();
    out.add("equivalences", alphas.len() as u64);
    out.add("operations", ops.len() as u64);
    // distinct sets X with at least two elements
    let mut sets: BTreeMap<(Vec<Vec<Vec<Point>>>, Vec<Vec<Point>>), (GeneralizedPrimitiveSet, usize, usize)> = BTreeMap::new();
    for (ai, (alpha, _, _)) in alphas.iter().enumerate() {
        for (bi, (b, _, _)) in bases.iter().enumerate() {
            let Ok(x) = GeneralizedPrimitiveSet::from_sets(b.clone(), alpha.clone()) else { continue };
            if x.size() < 2 {
                continue;
            }
            let key = (x.classes.iter().map(|&c| alpha.classes[c].clone()).collect(), b.iter().collect());
            sets.entry(key).or_insert((x, ai, bi));
        }
    }
    out.add("sets", sets.len() as u64);
    for (x, ai, bi) in sets.values() {
        let mut class = vec![None; base];
        for (i, &c) in x.classes.iter().enumerate() {
            for t in &x.alpha.classes[c] {
                class[t[0]] = Some(i);
            }
        }
        let reps: Vec<Vec<Point>> = x
            .classes
            .iter()
            .map(|&c| x.alpha.classes[c].iter().filter(|t| x.basis.contains(t)).map(|t| t[0]).collect())
            .collect();
        for (op, od, op_p) in &ops {
            let Some(table) = fast_table(*op, base, &class, &reps) else { continue };
            out.add("operations_defined", 1);
            if test(&table).is_some() {
                let (ad, ap) = (&alphas[*ai].1, alphas[*ai].2);
                let (bd, bp) = (&bases[*bi].1, bases[*bi].2);
                out.discrepancies.push(Discrepancy::new(
                    Sweep::Antiadditivity,
                    m,
                    Some(act),
                    Finding::Certificate {
                        basis: record(bd, 1, bound, m),
                        alpha: record(ad, 2, bound, m),
                        op: record(od, 3, bound, m),
                        params: [bp, ap, *op_p],
                        size: x.size(),
                    },
                    "primitive normal class",
                    "group on a set with at least two elements",
                ));
            }
        }
    }
    out
}

pub(super) fn replay(d: &Discrepancy) -> bool {
    let (Some(act), Finding::Certificate { basis, alpha, op, params, .. }) = (d.act(), &d.finding) else {
        return false;
    };
    let inst = |f: &FormulaRecord, p: Point| Instantiated::new(f.formula(), vec![p]);
    matches!(
        detect_primitive_group(&[inst(basis, params[0])], &inst(alpha, params[1]), &inst(op, params[2]), &act),
        Ok(Some(c)) if c.size >= 2
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::{operation_table, FormulaBounds};
    use crate::monoid::enumerate_commutative_monoids;

    #[test]
    fn fast_table_matches_operation_table() {
        let m = Arc::new(Monoid::cyclic_group(2));
        for act in (1..=3).flat_map(|k| crate::act::enumerate_acts(&m, k)) {
            let base = act.size();
            let alphas: Vec<PrimitiveEquivalence> = slices(&act, 2, 1, 2)
                .into_iter()
                .filter_map(|(s, _, _)| PrimitiveEquivalence::from_extension(s, base, 1))
                .collect();
            let ops = slices(&act, 3, 1, 2);
            for alpha in &alphas {
                let x = GeneralizedPrimitiveSet::from_sets(alpha.domain.clone(), alpha.clone()).unwrap();
                let mut class = vec![None; base];
                for (i, &c) in x.classes.iter().enumerate() {
                    for t in &alpha.classes[c] {
                        class[t[0]] = Some(i);
                    }
                }
                let reps: Vec<Vec<Point>> = x.classes.iter().map(|&c| alpha.classes[c].iter().map(|t| t[0]).collect()).collect();
                for (op, _, _) in &ops {
                    let mask = op.codes().fold(0, |acc: Mask, c| acc | 1 << c);
                    assert_eq!(fast_table(mask, base, &class, &reps), operation_table(&x, op));
                }
            }
        }
    }

    #[test]
    fn singleton_class_projection_is_trivial_group() {
        let m = Arc::new(Monoid::cyclic_group(2));
        let act = Act::one_point(&m);
        let f = |t: &str, free: &[&str]| crate::formula::parse_formula_with_free(t, &m, free).unwrap();
        let basis = Instantiated::new(f("x = x & p = p", &["x", "p"]), vec![0]);
        let alpha = Instantiated::new(f("x = y & p = p", &["x", "y", "p"]), vec![0]);
        let op = Instantiated::new(f("z = x & y = y & p = p", &["x", "y", "z", "p"]), vec![0]);
        let cert = detect_primitive_group(&[basis], &alpha, &op, &act).unwrap().unwrap();
        assert_eq!(cert.size, 1);
    }

    #[test]
    fn small_sweep_is_clean() {
        let mut cfg = ExperimentConfig::new(3, 3, FormulaBounds { max_free: 2, max_bound: 1, max_atoms: 2 });
        cfg.commutative_only = true;
        let r = run_antiadditivity_sweep(&cfg).unwrap();
        assert!(r.is_clean(), "{:?}", r.discrepancies);
        assert!(r.counts["sets"] > 0);
    }

    #[test]
    fn detects_a_planted_group() {
        let cfg = ExperimentConfig::new(2, 2, FormulaBounds { max_free: 2, max_bound: 0, max_atoms: 1 });
        let planted = |table: &[Vec<usize>]| (table.len() >= 2).then_some(table.len());
        let r = run_antiadditivity_sweep_with(&cfg, &planted).unwrap();
        assert!(!r.is_clean());
    }

    #[test]
    fn only_primitive_normal_monoids() {
        let cfg = ExperimentConfig::new(2, 2, FormulaBounds { max_free: 2, max_bound: 0, max_atoms: 1 });
        let r = run_antiadditivity_sweep(&cfg).unwrap();
        let pn = (1..=2)
            .flat_map(|n| enumerate_commutative_monoids(n).unwrap())
            .filter(|m| decide_class(&Arc::new(m.clone())).is_primitive_normal())
            .count();
        assert_eq!(r.counts["monoids"], pn as u64);
    }
}
