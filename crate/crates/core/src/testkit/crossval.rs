//! Per-act criterion against brute-force copy normality.
//!
//! Holds: every relation definable within the formula bounds must have equal
//! or disjoint copies for each split of the free block into objects and
//! trailing parameters. Fails: the necessity formula built from the
//! witness must separate two copies.

use std::collections::HashSet;
use std::sync::Arc;
use std::time::Instant;

use rayon::prelude::*;

use super::space::{conjunction_closure, copies_normal, project};
use super::{CaseResult, Criterion, Discrepancy, ExperimentConfig, Finding, FormulaRecord, Sweep, SweepReport};
use crate::act::{enumerate_acts, Act};
use crate::deciders::{necessity_violation, theorem1_check, Verdict};
use crate::formula::{is_copy_normal, CopyNormality, Formula, TupleSet};
use crate::monoid::Monoid;

pub fn run_theorem1_crossval(cfg: &ExperimentConfig) -> Result<SweepReport, super::ConfigError> {
    run_theorem1_crossval_with(cfg, &theorem1_check)
}

/// The cross-validation with a substitute criterion, for mutation testing.
pub fn run_theorem1_crossval_with(cfg: &ExperimentConfig, criterion: &Criterion) -> Result<SweepReport, super::ConfigError> {
    cfg.validate()?;
    let start = Instant::now();
    let mut rng = cfg.rng();
    let mut cases: Vec<(Arc<Monoid>, Act)> = Vec::new();
    for m in cfg.monoids(false) {
        for act in cfg.acts((1..=cfg.act_size).map(|k| enumerate_acts(&m, k)), &mut rng) {
            cases.push((m.clone(), act));
        }
    }
    let results: Vec<CaseResult> = cfg.install(|| cases.par_iter().map(|(m, act)| check_act(cfg, m, act, criterion)).collect());
    let mut report = SweepReport::new(Sweep::Theorem1Crossval);
    for r in results {
        report.absorb(r);
    }
    report.runtime = start.elapsed();
    Ok(report)
}

fn check_act(cfg: &ExperimentConfig, m: &Monoid, act: &Act, criterion: &Criterion) -> CaseResult {
    let mut out = CaseResult::default();
    let f = cfg.formula;
    match criterion(act) {
        Verdict::Fails(w) => {
            out.add("fails", 1);
            let nv = necessity_violation(&w);
            if nv.verify(act) {
                out.add("necessity_verified", 1);
            } else {
                out.discrepancies.push(Discrepancy::new(
                    Sweep::Theorem1Crossval,
                    m,
                    Some(act),
                    Finding::NecessityNotReproduced { triple: w.triple },
                    "criterion fails",
                    "necessity formula has normal copies",
                ));
            }
        }
        _ => {
            out.add("holds", 1);
            let mut seen: HashSet<TupleSet> = HashSet::new();
            for d in conjunction_closure(act, f.max_free + f.max_bound, f.max_atoms) {
                let rel = project(&d.relation, act.size(), f.max_free);
                if !seen.insert(rel.clone()) {
                    continue;
                }
                out.add("relations", 1);
                for params in 1..f.max_free {
                    if let CopyNormality::Violation { params: witness, .. } = copies_normal(&rel, act.size(), params) {
                        let phi = Formula::with_default_names(f.max_free, f.max_bound, d.atoms.clone());
                        out.discrepancies.push(Discrepancy::new(
                            Sweep::Theorem1Crossval,
                            m,
                            Some(act),
                            Finding::CopyViolation { formula: FormulaRecord::new(&phi, m), params, witness },
                            "criterion holds",
                            "copies overlap without being equal",
                        ));
                        break;
                    }
                }
            }
        }
    }
    out
}

pub(super) fn replay(d: &Discrepancy, criterion: &Criterion) -> bool {
    let Some(act) = d.act() else { return false };
    match &d.finding {
        Finding::CopyViolation { formula, params, .. } => {
            !criterion(&act).fails() && !is_copy_normal(&formula.formula(), &act, *params).is_normal()
        }
        Finding::NecessityNotReproduced { .. } => match criterion(&act) {
            Verdict::Fails(w) => !necessity_violation(&w).verify(&act),
            _ => false,
        },
        _ => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::FormulaBounds;

    #[test]
    fn small_sweep_is_clean() {
        let cfg = ExperimentConfig::new(2, 2, FormulaBounds { max_free: 2, max_bound: 1, max_atoms: 2 });
        let r = run_theorem1_crossval(&cfg).unwrap();
        assert!(r.is_clean(), "{:?}", r.discrepancies);
        assert_eq!(r.counts["holds"] + r.counts.get("fails").copied().unwrap_or(0), r.cases as u64);
    }

    #[test]
    fn empty_space() {
        let mut cfg = ExperimentConfig::new(1, 1, FormulaBounds { max_free: 1, max_bound: 0, max_atoms: 1 });
        cfg.sample = Some(0);
        cfg.seed = Some(1);
        let r = run_theorem1_crossval(&cfg).unwrap();
        assert_eq!(r.cases, 0);
        assert!(r.counts.is_empty() && r.is_clean());
    }
}
