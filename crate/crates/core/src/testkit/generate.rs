//! Two independent sources of regular acts up to isomorphism.
//!
//! `filtered` keeps the regular members of the full act enumeration.
//! `constructed` starts from the cyclic acts `ₛSe` (`e` an idempotent of
//! `R`) and closes under "coproduct with one of them, then quotient": a
//! regular act generated by `a₁, …, aᵣ` is a quotient of
//! `⟨a₁, …, aᵣ₋₁⟩ ⊔ ₛSeᵣ` with `Saᵣ ≅ Seᵣ`, and the first summand is again
//! regular and no larger.

use std::collections::{BTreeMap, HashSet};
use std::sync::Arc;

use crate::act::{canonical_action, congruence_closure, coproduct, enumerate_acts, quotient, regular_part, Act, Congruence, Point};
use crate::monoid::Monoid;

/// Isomorphism-invariant key of an act over a fixed monoid.
pub type ActKey = (usize, Vec<Point>);

pub fn act_key(act: &Act) -> ActKey {
    (act.size(), canonical_action(act))
}

pub fn filtered(m: &Arc<Monoid>, max_size: usize) -> Vec<Act> {
    (1..=max_size).flat_map(|k| enumerate_acts(m, k)).filter(Act::is_regular).collect()
}

/// Every congruence of `act`, as joins of principal congruences.
pub fn congruences(act: &Act) -> Vec<Congruence> {
    let principal: Vec<Congruence> = act
        .points()
        .flat_map(|a| (a + 1..act.size()).map(move |b| (a, b)))
        .map(|p| congruence_closure(act, &[p]))
        .collect::<HashSet<_>>()
        .into_iter()
        .collect();
    let mut seen: HashSet<Congruence> = HashSet::new();
    let mut out = vec![Congruence::identity(act.size())];
    seen.insert(out[0].clone());
    let mut i = 0;
    while i < out.len() {
        for p in &principal {
            let pairs: Vec<(Point, Point)> = act
                .points()
                .flat_map(|a| [(a, out[i].representative(a)), (a, p.representative(a))])
                .collect();
            let join = congruence_closure(act, &pairs);
            if seen.insert(join.clone()) {
                out.push(join);
            }
        }
        i += 1;
    }
    out
}

pub fn constructed(m: &Arc<Monoid>, max_size: usize) -> Vec<Act> {
    let regular = Act::regular_representation(m);
    let r = regular_part(m);
    let seeds: Vec<Act> = r
        .iter()
        .filter(|&e| m.is_idempotent(e))
        .map(|e| regular.cyclic_subact(e).act)
        .filter(|a| a.size() <= max_size)
        .collect();
    let mut known: BTreeMap<ActKey, Act> = BTreeMap::new();
    let mut queue: Vec<Act> = Vec::new();
    for s in &seeds {
        if known.insert(act_key(s), s.clone()).is_none() {
            queue.push(s.clone());
        }
    }
    while let Some(b) = queue.pop() {
        for s in &seeds {
            let sum = coproduct(&[b.clone(), s.clone()]).expect("same monoid").act;
            for theta in congruences(&sum) {
                if theta.class_count() > max_size {
                    continue;
                }
                let q = quotient(&sum, &theta).expect("congruence").act;
                if !q.is_regular() {
                    continue;
                }
                let key = act_key(&q);
                if !known.contains_key(&key) {
                    known.insert(key, q.clone());
                    queue.push(q);
                }
            }
        }
    }
    known.into_values().collect()
}

/// Keys found by only one of the two generators.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct GeneratorGap {
    pub only_filtered: Vec<ActKey>,
    pub only_constructed: Vec<ActKey>,
}

/// Union of both generators (filtered order first), and the keys on which
/// they disagree.
pub fn regular_acts(m: &Arc<Monoid>, max_size: usize) -> (Vec<Act>, GeneratorGap) {
    let a = filtered(m, max_size);
    let b = constructed(m, max_size);
    let ka: BTreeMap<ActKey, &Act> = a.iter().map(|x| (act_key(x), x)).collect();
    let kb: BTreeMap<ActKey, &Act> = b.iter().map(|x| (act_key(x), x)).collect();
    let gap = GeneratorGap {
        only_filtered: ka.keys().filter(|k| !kb.contains_key(*k)).cloned().collect(),
        only_constructed: kb.keys().filter(|k| !ka.contains_key(*k)).cloned().collect(),
    };
    let mut all = a.clone();
    all.extend(kb.iter().filter(|(k, _)| !ka.contains_key(*k)).map(|(_, x)| (*x).clone()));
    (all, gap)
}
