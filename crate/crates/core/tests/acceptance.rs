//! Acceptance criteria 1 to 10, each at its stated bound and with exact
//! agreement. Every test prints one `criterion N: PASS|FAIL` line.
//!
//! Two criteria are known failures. Their tests evaluate the criterion in
//! full, print FAIL with the first counterexample, and pass only while that
//! remains so.
//!
//! - 2: over `{1, a, b}` with `a` a zero and `b² = a`, `R = {a}`, a point
//!   generating a free cyclic subact is act-regular, yet its subact is not
//!   isomorphic to `Se` for any idempotent `e ∈ R`. The equivalence holds
//!   with `e` ranging over all idempotents, and with `e ∈ R` for points
//!   whose whole orbit is act-regular; both are checked.
//! - 7: the merge step of the one-atom rewriting cannot lower the number of
//!   `x₀`-atoms once an atom has `x₀` on both sides, and such inputs exist
//!   within the bounds.

use std::io::Write;
use std::process::Command;
use std::sync::Arc;
use std::time::Instant;

use regacts::act::{enumerate_acts, regular_part, Act};
use regacts::deciders::{decide_class, ClassDecision, Inapplicable};
use regacts::formula::FormulaBounds;
use regacts::monoid::{enumerate_monoids, Monoid};
use regacts::testkit::space::search_copy_violation;
use regacts::testkit::{
    run_antiadditivity_sweep, run_class_decision_sweep, run_elimination_sweep, run_reduction_audit,
    run_sweeps, run_theorem1_crossval, ExperimentConfig, SweepReport,
};

/// Criteria whose failure is established and recorded.
const KNOWN_FAILURES: &[u32] = &[2, 7];

fn verdict(n: u32, passed: bool, detail: &str, start: Instant) {
    let status = if passed { "PASS" } else { "FAIL" };
    // written past the harness capture so the line shows in every run
    let line = format!("criterion {n}: {status} ({detail}; {:.1?})\n", start.elapsed());
    std::io::stdout().write_all(line.as_bytes()).unwrap();
    if KNOWN_FAILURES.contains(&n) {
        assert!(!passed, "criterion {n} now passes; remove it from the known failures");
    } else {
        assert!(passed, "criterion {n} failed: {detail}");
    }
}

fn count(r: &SweepReport, key: &str) -> u64 {
    r.counts.get(key).copied().unwrap_or(0)
}

fn first_discrepancy(r: &SweepReport) -> String {
    r.discrepancies.first().map_or_else(String::new, |d| format!("{:?}", d.finding))
}

#[test]
fn criterion_01_ideal_shortcuts() {
    let start = Instant::now();
    let mut pairs = 0;
    let mut bad = Vec::new();
    for n in 1..=4 {
        for m in enumerate_monoids(n).unwrap() {
            for e in m.idempotents().iter() {
                for a in m.elements() {
                    pairs += 1;
                    let right = m.right_ideal_within(a, e).unwrap() == m.right_ideal_subset(a, e);
                    let left = m.left_ideal_within(a, e).unwrap() == m.left_ideal_subset(a, e);
                    if !(right && left) {
                        bad.push((m.rows(), a, e));
                    }
                }
            }
        }
    }
    verdict(1, bad.is_empty() && pairs > 0, &format!("{pairs} pairs, {} disagreements", bad.len()), start);
}

#[test]
fn criterion_02_regular_points() {
    let start = Instant::now();
    let (mut points, mut bad, mut bad_in_regular_orbit, mut bad_any_idempotent) = (0, 0, 0, 0);
    let mut first = None;
    for n in 1..=3 {
        for m in enumerate_monoids(n).unwrap() {
            let m = Arc::new(m);
            let regular = Act::regular_representation(&m);
            for act in (1..=3).flat_map(|k| enumerate_acts(&m, k)) {
                for a in act.points() {
                    points += 1;
                    let direct = act.is_act_regular(a).is_some();
                    if direct != act.regular_via_idempotent(a).is_some() {
                        bad += 1;
                        first.get_or_insert_with(|| format!("monoid {:?}, act {:?}, point {a}", m.rows(), act.rows()));
                        if act.orbit(a).iter().all(|&b| act.is_act_regular(b).is_some()) {
                            bad_in_regular_orbit += 1;
                        }
                    }
                    let any = m.elements().any(|e| m.is_idempotent(e) && act.same_kernel(a, &regular, e));
                    if direct != any {
                        bad_any_idempotent += 1;
                    }
                }
            }
        }
    }
    assert_eq!(bad_in_regular_orbit, 0);
    assert_eq!(bad_any_idempotent, 0);
    let detail = format!(
        "{points} points, {bad} disagreements, first at {}",
        first.as_deref().unwrap_or("none")
    );
    verdict(2, bad == 0 && points > 0, &detail, start);
}

/// Criteria 3 and 4 share one sweep: formulas with up to four free
/// variables, split every way into objects and parameters, two quantified
/// variables and four atoms.
fn crossval() -> &'static SweepReport {
    static REPORT: std::sync::OnceLock<SweepReport> = std::sync::OnceLock::new();
    REPORT.get_or_init(|| {
        let cfg = ExperimentConfig::new(3, 3, FormulaBounds { max_free: 4, max_bound: 2, max_atoms: 4 });
        run_theorem1_crossval(&cfg).unwrap()
    })
}

#[test]
fn criterion_03_criterion_implies_copy_normality() {
    let start = Instant::now();
    let r = crossval();
    let copy = r.discrepancies.iter().filter(|d| matches!(d.finding, regacts::testkit::Finding::CopyViolation { .. })).count();
    let detail = format!("{} acts hold, {} relations, {copy} violations", count(r, "holds"), count(r, "relations"));
    verdict(3, copy == 0 && count(r, "holds") > 0, &detail, start);
}

#[test]
fn criterion_04_necessity_construction() {
    let start = Instant::now();
    let r = crossval();
    let (fails, verified) = (count(r, "fails"), count(r, "necessity_verified"));
    verdict(4, fails > 0 && fails == verified, &format!("{fails} failing acts, {verified} reproduced"), start);
}

#[test]
fn criterion_05_reduction_audit() {
    let start = Instant::now();
    let mut cfg = ExperimentConfig::new(3, 4, FormulaBounds { max_free: 1, max_bound: 0, max_atoms: 1 });
    cfg.audit_width = 2;
    let r = run_reduction_audit(&cfg).unwrap();
    let detail = format!(
        "{} acts, {} instance classes at n = 2, {} discrepancies {}",
        r.cases,
        count(&r, "n2_class_triples"),
        r.discrepancies.len(),
        first_discrepancy(&r)
    );
    verdict(5, r.is_clean() && r.cases > 0, detail.trim_end(), start);
}

#[test]
fn criterion_06_class_decision() {
    let start = Instant::now();
    let mut cfg = ExperimentConfig::new(4, 4, FormulaBounds { max_free: 1, max_bound: 0, max_atoms: 1 });
    cfg.commutative_only = true;
    let r = run_class_decision_sweep(&cfg).unwrap();
    let detail = format!(
        "{} monoids, {} primitive normal, {} regular acts checked, {} discrepancies {}",
        r.cases,
        count(&r, "primitive_normal"),
        count(&r, "regular_acts"),
        r.discrepancies.len(),
        first_discrepancy(&r)
    );
    verdict(6, r.is_clean() && count(&r, "primitive_normal") > 0, detail.trim_end(), start);
}

#[test]
fn criterion_07_elimination() {
    let start = Instant::now();
    let mut cfg = ExperimentConfig::new(4, 4, FormulaBounds { max_free: 3, max_bound: 0, max_atoms: 4 });
    cfg.commutative_only = true;
    let r = run_elimination_sweep(&cfg).unwrap();
    let detail = format!(
        "{} runs, {} verified, {} stuck, {} mismatched {}",
        count(&r, "runs"),
        count(&r, "verified"),
        count(&r, "stuck"),
        count(&r, "mismatch"),
        first_discrepancy(&r)
    );
    // every recorded failure is reproducible
    assert!(r.discrepancies.iter().all(|d| d.replay()));
    verdict(7, r.is_clean() && count(&r, "runs") > 0, detail.trim_end(), start);
}

#[test]
fn criterion_08_no_group_certificates() {
    let start = Instant::now();
    let mut cfg = ExperimentConfig::new(4, 4, FormulaBounds { max_free: 2, max_bound: 1, max_atoms: 2 });
    cfg.commutative_only = true;
    let r = run_antiadditivity_sweep(&cfg).unwrap();
    let detail = format!(
        "{} acts, {} sets, {} operations defined, {} certificates",
        r.cases,
        count(&r, "sets"),
        count(&r, "operations_defined"),
        r.discrepancies.len()
    );
    verdict(8, r.is_clean() && count(&r, "sets") > 0, &detail, start);
}

#[test]
fn criterion_09_right_zero_example() {
    let start = Instant::now();
    let z = Arc::new(
        Monoid::from_table(vec![vec![0, 1, 2], vec![1, 1, 2], vec![2, 1, 2]])
            .unwrap()
            .with_names(&["1", "e1", "e2"])
            .unwrap(),
    );
    let (e1, e2) = (1, 2);
    let inapplicable = matches!(decide_class(&z), ClassDecision::Inapplicable(Inapplicable::Noncommutative { .. }));
    let r = regular_part(&z);
    let ideals = z.principal_left_ideal(e1).to_vec() == vec![e1] && z.principal_left_ideal(e2).to_vec() == vec![e2];
    let structure = r.contains(e1) && r.contains(e2) && ideals;
    let bounds = FormulaBounds { max_free: 3, max_bound: 1, max_atoms: 3 };
    let violations = (1..=4).filter(|&k| search_copy_violation(&Act::trivial(&z, k), bounds).is_some()).count();
    let detail = format!("noncommutative: {inapplicable}, R = {:?}, ideals singletons: {ideals}, violations: {violations}", r.to_vec());
    verdict(9, inapplicable && structure && violations == 0, &detail, start);
}

fn cli(args: &[&str]) -> (i32, Vec<u8>) {
    let out = Command::new(env!("CARGO_BIN_EXE_regacts")).args(args).output().unwrap();
    (out.status.code().unwrap_or(-1), out.stdout)
}

#[test]
fn criterion_10_determinism() {
    let start = Instant::now();
    let data = concat!(env!("CARGO_MANIFEST_DIR"), "/../../data");
    let dir = tempfile::tempdir().unwrap();
    let act = dir.path().join("glued.act");
    let act = act.to_str().unwrap();
    let path = |f: &str| format!("{data}/{f}");
    let invocations: Vec<Vec<String>> = vec![
        vec!["analyze".into(), path("diamond.monoid")],
        vec!["decide".into(), path("diamond.monoid")],
        vec!["decide".into(), path("right_zero.monoid")],
        vec!["--format".into(), "text".into(), "decide".into(), path("chain.monoid")],
        vec!["counterexample".into(), path("diamond.monoid"), "--a".into(), "1".into(), "--b".into(), "e".into(), "--c".into(), "f".into(), "--act-out".into(), act.into()],
        vec!["act-check".into(), act.into(), "--oracle".into(), "both".into()],
        vec!["formula".into(), "normal-check".into(), act.into(), "exists u : e*u = x & f*u = y".into(), "--free".into(), "x,y".into(), "--params".into(), "1".into()],
        vec!["formula".into(), "eliminate".into(), path("chain.monoid"), "e*x = y & x = e*z".into(), "--x0".into(), "x".into()],
        vec!["sweep".into(), path("sweep.toml")],
    ];
    let mut differing = Vec::new();
    for args in &invocations {
        let args: Vec<&str> = args.iter().map(String::as_str).collect();
        let first = cli(&args);
        let second = cli(&args);
        if first != second || first.1.is_empty() {
            differing.push(args.join(" "));
        }
    }
    let cfg = ExperimentConfig::new(3, 3, FormulaBounds { max_free: 2, max_bound: 1, max_atoms: 2 });
    let json = || serde_json::to_string(&run_sweeps(&cfg).unwrap()).unwrap();
    let harness_stable = json() == json();
    let detail = format!("{} invocations, differing: {:?}, harness stable: {harness_stable}", invocations.len(), differing);
    verdict(10, differing.is_empty() && harness_stable, &detail, start);
}
