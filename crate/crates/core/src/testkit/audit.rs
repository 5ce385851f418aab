//! Audit of the coordinatewise maximal-set reduction against explicit
//! instances.
//!
//! An instance of tuple length `n` is fixed by coefficient sets
//! `I, J ⊆ S × [n]` and `K ⊆ S × S × [n]`. It only matters through the
//! equivalences `E_I`, `E_J` they induce on `Aⁿ` and the set `K^` of tuples
//! satisfying `K`. With `C = E_I ∘ E_J` restricted to `K^` (`a₁ C a₃` iff
//! some `a₂ ∈ K^` has `a₁ E_I a₂ E_J a₃`) the instance holds iff `C` is
//! symmetric: the conclusion asks for `b` with `a₃ E_I b E_J a₁`.
//!
//! Distinct equivalences and sets are reached by closing the single-entry
//! ones under intersection, so each class of instances is evaluated once.

use std::collections::HashMap;
use std::sync::Arc;
use std::time::Instant;

use rayon::prelude::*;

use super::{CaseResult, ConfigError, Discrepancy, ExperimentConfig, Finding, Sweep, SweepReport};
use crate::act::{enumerate_acts, Act, Point};
use crate::deciders::{theorem1_check, theorem1_check_bounded, ExplicitInstance, Verdict};
use crate::monoid::{Elem, Monoid};

/// Largest `|A|ⁿ` the audit handles (one `u128` per tuple set).
pub const MAX_AUDIT_CELLS: usize = 128;

type Mask = u128;

fn bits(mut m: Mask) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        (m != 0).then(|| {
            let b = m.trailing_zeros() as usize;
            m &= m - 1;
            b
        })
    })
}

/// Distinct closures under intersection, each with a shortest list of
/// generator indices producing it. The first entry is the empty list.
fn meet_closure(top: Vec<Mask>, generators: &[Vec<Mask>]) -> Vec<(Vec<Mask>, Vec<usize>)> {
    let mut seen: HashMap<Vec<Mask>, ()> = HashMap::new();
    seen.insert(top.clone(), ());
    let mut out = vec![(top, Vec::new())];
    let mut i = 0;
    while i < out.len() {
        for (g, gen) in generators.iter().enumerate() {
            let meet: Vec<Mask> = out[i].0.iter().zip(gen).map(|(a, b)| a & b).collect();
            if !seen.contains_key(&meet) {
                seen.insert(meet.clone(), ());
                let mut list = out[i].1.clone();
                list.push(g);
                out.push((meet, list));
            }
        }
        i += 1;
    }
    out
}

/// The instance classes of tuple length `n` on one act.
pub struct InstanceClasses {
    pub n: usize,
    cells: usize,
    /// Row `t` of an equivalence is the set of tuples equivalent to `t`.
    eqs: Vec<(Vec<Mask>, Vec<usize>)>,
    ks: Vec<(Mask, Vec<usize>)>,
    entries: Vec<(Elem, usize)>,
    k_entries: Vec<(Elem, Elem, usize)>,
}

pub fn instance_classes(act: &Act, n: usize) -> InstanceClasses {
    let (m, order) = (act.size(), act.monoid().order());
    let cells = m.pow(n as u32);
    assert!(cells <= MAX_AUDIT_CELLS, "tuple space too large for the audit");
    let decode = |mut c: usize| {
        let mut t = vec![0; n];
        for slot in t.iter_mut().rev() {
            *slot = c % m;
            c /= m;
        }
        t
    };
    let tuples: Vec<Vec<Point>> = (0..cells).map(decode).collect();
    let full: Mask = if cells == 128 { Mask::MAX } else { (1 << cells) - 1 };

    let entries: Vec<(Elem, usize)> = (0..n).flat_map(|l| (0..order).map(move |s| (s, l))).collect();
    let eq_gens: Vec<Vec<Mask>> = entries
        .iter()
        .map(|&(s, l)| {
            (0..cells)
                .map(|a| {
                    (0..cells).filter(|&b| act.act(s, tuples[a][l]) == act.act(s, tuples[b][l])).fold(0, |acc, b| acc | 1 << b)
                })
                .collect()
        })
        .collect();
    let eqs = meet_closure(vec![full; cells], &eq_gens);

    let k_entries: Vec<(Elem, Elem, usize)> =
        (0..n).flat_map(|l| (0..order).flat_map(move |a| (a + 1..order).map(move |b| (a, b, l)))).collect();
    let k_gens: Vec<Vec<Mask>> = k_entries
        .iter()
        .map(|&(r1, r2, l)| {
            vec![(0..cells).filter(|&a| act.act(r1, tuples[a][l]) == act.act(r2, tuples[a][l])).fold(0, |acc, a| acc | 1 << a)]
        })
        .collect();
    let ks = meet_closure(vec![full], &k_gens).into_iter().map(|(v, l)| (v[0], l)).collect();
    InstanceClasses { n, cells, eqs, ks, entries, k_entries }
}

impl InstanceClasses {
    pub fn eq_count(&self) -> usize {
        self.eqs.len()
    }

    pub fn k_count(&self) -> usize {
        self.ks.len()
    }

    /// A representative explicit instance of the class `(i, j, k)`.
    pub fn instance(&self, i: usize, j: usize, k: usize) -> ExplicitInstance {
        ExplicitInstance {
            n: self.n,
            i: self.eqs[i].1.iter().map(|&e| self.entries[e]).collect(),
            j: self.eqs[j].1.iter().map(|&e| self.entries[e]).collect(),
            k: self.ks[k].1.iter().map(|&e| self.k_entries[e]).collect(),
        }
    }

    pub fn holds(&self, i: usize, j: usize, k: usize) -> bool {
        let (ei, ej, kk) = (&self.eqs[i].0, &self.eqs[j].0, self.ks[k].0);
        let mut c = vec![0 as Mask; self.cells];
        for a1 in bits(kk) {
            c[a1] = bits(ei[a1] & kk).fold(0, |acc, a2| acc | (ej[a2] & kk));
        }
        bits(kk).all(|a1| bits(c[a1]).all(|a3| c[a3] >> a1 & 1 == 1))
    }

    /// Every class triple, in order.
    pub fn triples(&self) -> impl Iterator<Item = (usize, usize, usize)> + '_ {
        let (e, k) = (self.eqs.len(), self.ks.len());
        (0..e).flat_map(move |i| (0..e).flat_map(move |j| (0..k).map(move |kk| (i, j, kk))))
    }
}

/// The `n = 1` instance made of the maximal sets of a failing triple.
fn maximal_instance(w: &crate::deciders::CriterionWitness) -> ExplicitInstance {
    ExplicitInstance {
        n: 1,
        i: w.i_star.iter().map(|&s| (s, 0)).collect(),
        j: w.j_star.iter().map(|&t| (t, 0)).collect(),
        k: w.k_star.iter().map(|&(a, b)| (a, b, 0)).collect(),
    }
}

pub fn run_reduction_audit(cfg: &ExperimentConfig) -> Result<SweepReport, ConfigError> {
    cfg.validate()?;
    let cells = cfg.act_size.saturating_pow(cfg.audit_width as u32);
    if cells > MAX_AUDIT_CELLS {
        return Err(ConfigError::BoundExceeded { what: "act_size^audit_width", requested: cells, limit: MAX_AUDIT_CELLS });
    }
    let start = Instant::now();
    let mut rng = cfg.rng();
    let mut cases: Vec<(Arc<Monoid>, Act)> = Vec::new();
    for m in cfg.monoids(false) {
        for act in cfg.acts((1..=cfg.act_size).map(|k| enumerate_acts(&m, k)), &mut rng) {
            cases.push((m.clone(), act));
        }
    }
    let results: Vec<CaseResult> = cfg.install(|| cases.par_iter().map(|(m, act)| audit_act(cfg.audit_width, m, act)).collect());
    let mut report = SweepReport::new(Sweep::ReductionAudit);
    for r in results {
        report.absorb(r);
    }
    report.runtime = start.elapsed();
    Ok(report)
}

fn audit_act(width: usize, m: &Monoid, act: &Act) -> CaseResult {
    let mut out = CaseResult::default();
    let reduced = theorem1_check(act);
    let found = |inst: ExplicitInstance, left: &str, right: &str, out: &mut CaseResult| {
        out.discrepancies.push(Discrepancy::new(Sweep::ReductionAudit, m, Some(act), Finding::Instance { instance: inst }, left, right));
    };
    for n in 1..=width {
        let classes = instance_classes(act, n);
        out.add(&format!("n{n}_class_triples"), (classes.eq_count().pow(2) * classes.k_count()) as u64);
        let mut failing = None;
        for (i, j, k) in classes.triples() {
            let fast = classes.holds(i, j, k);
            // the unary space is small enough to evaluate every class directly
            if n == 1 {
                let direct = theorem1_check_bounded(act, &classes.instance(i, j, k)).holds();
                if direct != fast {
                    found(classes.instance(i, j, k), "class evaluation", "direct evaluation", &mut out);
                }
            }
            if !fast {
                out.add(&format!("n{n}_failing_triples"), 1);
                failing.get_or_insert((i, j, k));
            }
        }
        match (&reduced, failing) {
            (Verdict::Fails(_), None) => {}
            (Verdict::Fails(_), Some(_)) => out.add(&format!("n{n}_agree"), 1),
            (_, None) => out.add(&format!("n{n}_agree"), 1),
            (_, Some((i, j, k))) => {
                let inst = classes.instance(i, j, k);
                if !theorem1_check_bounded(act, &inst).holds() {
                    found(inst, "reduced criterion holds", "explicit instance fails", &mut out);
                }
            }
        }
    }
    if let Verdict::Fails(w) = &reduced {
        let inst = maximal_instance(w);
        if theorem1_check_bounded(act, &inst).holds() {
            found(inst, "reduced criterion fails", "its maximal instance holds", &mut out);
        } else {
            out.add("maximal_instance_fails", 1);
        }
    }
    out
}

pub(super) fn replay(d: &Discrepancy) -> bool {
    let (Some(act), Finding::Instance { instance }) = (d.act(), &d.finding) else { return false };
    theorem1_check(&act).holds() != theorem1_check_bounded(&act, instance).holds()
}
