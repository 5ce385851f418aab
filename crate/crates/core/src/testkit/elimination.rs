//! The one-atom rewriting for `x₀` against the evaluator.
//!
//! Every quantifier-free conjunction within the bounds is rewritten for every
//! free variable over each commutative monoid in the primitive normal class.
//! The result must mention `x₀` in exactly one atom and have the same
//! solution set as the input on every regular act in range.

use std::collections::HashMap;
use std::sync::Arc;
use std::time::Instant;

use rayon::prelude::*;

use super::generate::regular_acts;
use super::{CaseResult, ConfigError, Discrepancy, ExperimentConfig, Finding, FormulaRecord, Sweep, SweepReport};
use crate::act::Act;
use crate::deciders::{decide_class, ClassDecision};
use crate::formula::{enumerate_formulas, solution_set, Atom, EliminationError, Eliminator, Formula, FormulaBounds, TupleSet};
use crate::monoid::{Elem, Monoid};

/// Discrepancies kept per monoid; the counts cover all of them.
const KEEP_PER_MONOID: usize = 8;

pub fn run_elimination_sweep(cfg: &ExperimentConfig) -> Result<SweepReport, ConfigError> {
    cfg.validate()?;
    let start = Instant::now();
    let mut rng = cfg.rng();
    let mut cases: Vec<(Arc<Monoid>, Elem, Vec<Act>)> = Vec::new();
    for m in cfg.monoids(true) {
        let ClassDecision::PrimitiveNormal { e: Some(e) } = decide_class(&m) else { continue };
        let (acts, _) = regular_acts(&m, cfg.act_size);
        let by_size = (1..=cfg.act_size).map(|k| acts.iter().filter(|a| a.size() == k).cloned().collect());
        let acts = cfg.acts(by_size, &mut rng);
        cases.push((m, e, acts));
    }
    let bounds = FormulaBounds { max_bound: 0, ..cfg.formula };
    let results: Vec<CaseResult> =
        cfg.install(|| cases.par_iter().map(|(m, e, acts)| check_monoid(m, *e, acts, bounds)).collect());
    let mut report = SweepReport::new(Sweep::Elimination);
    for r in results {
        report.absorb(r);
    }
    report.runtime = start.elapsed();
    Ok(report)
}

/// Solution sets of single atoms, per act and free count.
struct AtomCache<'a> {
    acts: &'a [Act],
    sets: HashMap<(usize, usize, Atom), TupleSet>,
}

impl AtomCache<'_> {
    fn solutions(&mut self, k: usize, free: usize, atoms: &[Atom]) -> TupleSet {
        let act = &self.acts[k];
        let mut out = TupleSet::full(act.size(), free);
        for &a in atoms {
            let set = self.sets.entry((k, free, a)).or_insert_with(|| {
                solution_set(&Formula::with_default_names(free, 0, vec![a]), act, &[])
            });
            out.intersect_with(set);
        }
        out
    }
}

fn check_monoid(m: &Arc<Monoid>, e: Elem, acts: &[Act], bounds: FormulaBounds) -> CaseResult {
    let mut out = CaseResult::default();
    out.add("monoids", 1);
    out.add("acts", acts.len() as u64);
    let elim = Eliminator::new(m, e).expect("primitive normal monoid satisfies the preconditions");
    let mut cache = AtomCache { acts, sets: HashMap::new() };
    let report = |out: &mut CaseResult, phi: &Formula, x0: usize, act: Option<&Act>, problem: String| {
        out.add(if act.is_some() { "mismatch" } else { "stuck" }, 1);
        if out.discrepancies.len() < KEEP_PER_MONOID {
            out.discrepancies.push(Discrepancy::new(
                Sweep::Elimination,
                m,
                act,
                Finding::Elimination { formula: FormulaRecord::new(phi, m), x0, problem },
                "one x0-atom form with the same solutions",
                "eliminator output",
            ));
        }
    };
    for phi in enumerate_formulas(m, bounds).expect("validated bounds") {
        let f = phi.free_count();
        for x0 in 0..f {
            out.add("runs", 1);
            let r = match elim.eliminate(&phi, x0) {
                Ok(r) => r,
                Err(EliminationError::Stuck { atoms }) => {
                    let left = Formula::with_default_names(f, 0, atoms);
                    report(&mut out, &phi, x0, None, format!("stuck at {}", left.display(m)));
                    continue;
                }
                Err(err) => {
                    report(&mut out, &phi, x0, None, err.to_string());
                    continue;
                }
            };
            let psi = r.formula(&phi, x0);
            let with_x0 = psi.atoms().iter().filter(|a| a.mentions(x0)).count();
            if with_x0 != 1 {
                report(&mut out, &phi, x0, None, format!("{with_x0} atoms mention x0"));
                continue;
            }
            let differs = (0..acts.len()).find(|&k| cache.solutions(k, f, phi.atoms()) != cache.solutions(k, f, psi.atoms()));
            match differs {
                Some(k) => report(&mut out, &phi, x0, Some(&acts[k]), format!("solutions differ from {}", psi.display(m))),
                None => out.add("verified", 1),
            }
        }
    }
    out
}

pub(super) fn replay(d: &Discrepancy) -> bool {
    let Finding::Elimination { formula, x0, .. } = &d.finding else { return false };
    let m = Arc::new(d.monoid());
    let ClassDecision::PrimitiveNormal { e: Some(e) } = decide_class(&m) else { return false };
    let Ok(elim) = Eliminator::new(&m, e) else { return false };
    let phi = formula.formula();
    match (elim.eliminate(&phi, *x0), d.act()) {
        (Ok(r), Some(act)) => solution_set(&phi, &act, &[]) != solution_set(&r.formula(&phi, *x0), &act, &[]),
        (Ok(r), None) => r.formula(&phi, *x0).atoms().iter().filter(|a| a.mentions(*x0)).count() != 1,
        (Err(_), None) => true,
        (Err(_), Some(_)) => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn groups_eliminate_cleanly() {
        let mut cfg = ExperimentConfig::new(3, 3, FormulaBounds { max_free: 2, max_bound: 0, max_atoms: 2 });
        cfg.commutative_only = true;
        let r = run_elimination_sweep(&cfg).unwrap();
        assert!(r.counts["runs"] > 0);
        assert!(r.discrepancies.iter().all(|d| d.replay()));
        assert_eq!(r.counts.get("mismatch"), None, "{:?}", r.discrepancies);
    }

    #[test]
    fn trivial_monoid() {
        let mut cfg = ExperimentConfig::new(1, 2, FormulaBounds { max_free: 2, max_bound: 0, max_atoms: 2 });
        cfg.commutative_only = true;
        let r = run_elimination_sweep(&cfg).unwrap();
        assert!(r.is_clean());
        assert_eq!(r.counts["verified"], r.counts["runs"]);
    }
}
