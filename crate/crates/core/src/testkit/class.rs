//! The class-level decision against the per-act criterion and the chain of
//! necessary conditions.

use std::sync::Arc;
use std::time::Instant;

use rayon::prelude::*;

use super::generate::{regular_acts, GeneratorGap};
use super::{CaseResult, ConfigError, Discrepancy, ExperimentConfig, Finding, Sweep, SweepReport};
use crate::act::{regular_part, Act};
use crate::deciders::{
    check_r_decomposition, decide_class, idempotent_comparability, is_regularly_linearly_ordered, theorem1_check,
    ClassDecision, ClassWitness, Inapplicable,
};
use crate::monoid::{ElementSet, Monoid};

pub fn run_class_decision_sweep(cfg: &ExperimentConfig) -> Result<SweepReport, ConfigError> {
    cfg.validate()?;
    let start = Instant::now();
    let monoids = cfg.monoids(false);
    let results: Vec<CaseResult> = cfg.install(|| monoids.par_iter().map(|m| check_monoid(m, cfg.act_size)).collect());
    let mut report = SweepReport::new(Sweep::ClassDecision);
    for r in results {
        report.absorb(r);
    }
    report.runtime = start.elapsed();
    Ok(report)
}

/// Names of the checks that failed for `m`, with counters.
fn check_monoid(m: &Arc<Monoid>, act_size: usize) -> CaseResult {
    let mut out = CaseResult::default();
    let broken = |check: &str, out: &mut CaseResult| {
        out.discrepancies.push(Discrepancy::new(
            Sweep::ClassDecision,
            m,
            None,
            Finding::ClassChain { check: check.to_string(), act_size },
            "decide_class",
            check,
        ));
    };
    let decision = decide_class(m);
    if !m.is_commutative() {
        out.add("noncommutative", 1);
        if !matches!(decision, ClassDecision::Inapplicable(Inapplicable::Noncommutative { .. })) {
            broken("noncommutative monoid routed to inapplicable", &mut out);
        }
        return out;
    }
    out.add("commutative", 1);
    match decision {
        ClassDecision::Inapplicable(Inapplicable::EmptyR) => out.add("empty_r", 1),
        ClassDecision::Inapplicable(Inapplicable::Decomposition { .. }) => out.add("decomposition_fails", 1),
        ClassDecision::Inapplicable(Inapplicable::Noncommutative { .. }) => broken("commutative monoid not routed", &mut out),
        ClassDecision::NotPrimitiveNormal { witness, .. } => {
            out.add("not_primitive_normal", 1);
            let act = match witness {
                ClassWitness::Amalgam { counterexample, .. } => {
                    out.add("amalgam", 1);
                    if !counterexample.verify() {
                        broken("amalgam copies separate", &mut out);
                    }
                    counterexample.act.clone()
                }
                ClassWitness::IdempotentProbe(_) => {
                    out.add("idempotent_probe", 1);
                    Act::regular_representation(m).subact(&regular_part(m).to_vec()).act
                }
                ClassWitness::Unexplained { .. } => {
                    broken("negative verdict has a witness", &mut out);
                    return out;
                }
            };
            if !act.is_regular() {
                broken("witness act is regular", &mut out);
            }
            if !theorem1_check(&act).fails() {
                broken("witness act fails the criterion", &mut out);
            }
        }
        ClassDecision::PrimitiveNormal { e } => {
            out.add("primitive_normal", 1);
            if !idempotent_comparability(m).is_ok_and(|v| v.holds()) {
                broken("idempotents comparable", &mut out);
            }
            if !is_regularly_linearly_ordered(m).is_ok_and(|v| v.holds()) {
                broken("regularly linearly ordered", &mut out);
            }
            let r = regular_part(m);
            let single = e.filter(|&e| ElementSet::from_iter(m.order(), r.iter().map(|a| m.mul(e, a))) == r);
            if single.is_none() || check_r_decomposition(m).map(|d| d.single) != Ok(single) {
                broken("single idempotent generates R", &mut out);
            }
            let (acts, gap) = regular_acts(m, act_size);
            if gap != GeneratorGap::default() {
                broken("regular act generators agree", &mut out);
            }
            out.add("regular_acts", acts.len() as u64);
            if acts.iter().any(|a| !theorem1_check(a).holds()) {
                broken("regular acts pass the criterion", &mut out);
            }
        }
    }
    out
}

pub(super) fn replay(d: &Discrepancy) -> bool {
    let Finding::ClassChain { check, act_size } = &d.finding else { return false };
    check_monoid(&d.monoid(), *act_size).discrepancies.iter().any(|x| x.finding == d.finding && &x.right == check)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::FormulaBounds;

    #[test]
    fn order_three_is_consistent() {
        let cfg = ExperimentConfig::new(3, 3, FormulaBounds { max_free: 2, max_bound: 1, max_atoms: 2 });
        let r = run_class_decision_sweep(&cfg).unwrap();
        assert!(r.is_clean(), "{:?}", r.discrepancies);
        assert!(r.counts["noncommutative"] > 0);
        assert_eq!(r.counts["noncommutative"] + r.counts["commutative"], r.cases as u64);
    }

    #[test]
    fn order_one_is_primitive_normal() {
        let r = run_class_decision_sweep(&ExperimentConfig::new(1, 2, FormulaBounds { max_free: 2, max_bound: 0, max_atoms: 1 })).unwrap();
        assert_eq!(r.counts["primitive_normal"], 1);
    }
}
