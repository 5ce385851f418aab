//! Acts of a fixed monoid on a small carrier, up to isomorphism.
//!
//! Same scheme as the monoid enumerator: fill the action table cell by cell,
//! reject partial tables that already break `s1·(s2·a) = (s1 s2)·a`, and keep
//! a complete table only if no carrier permutation makes it smaller.

use std::sync::Arc;

use super::{Act, Point};
use crate::monoid::enumerate::permute;
use crate::monoid::Monoid;

const UNSET: Point = Point::MAX;

/// All acts of `monoid` on `size` points up to isomorphism, points named
/// `p0, p1, ...`.
pub fn enumerate_acts(monoid: &Arc<Monoid>, size: usize) -> Vec<Act> {
    if size == 0 {
        return Vec::new();
    }
    let n = monoid.order();
    let id = monoid.identity();
    let mut table = vec![UNSET; n * size];
    for a in 0..size {
        table[id * size + a] = a;
    }
    let cells: Vec<(usize, Point)> = monoid
        .elements()
        .filter(|&s| s != id)
        .flat_map(|s| (0..size).map(move |a| (s, a)))
        .collect();
    let perms = carrier_permutations(size);
    let names: Vec<String> = (0..size).map(|i| format!("p{i}")).collect();
    let mut out = Vec::new();
    let mut search = Search { monoid, size, cells: &cells, perms: &perms, table, names: &names, out: &mut out };
    search.fill(0);
    out
}

struct Search<'a> {
    monoid: &'a Arc<Monoid>,
    size: usize,
    cells: &'a [(usize, Point)],
    perms: &'a [Vec<usize>],
    table: Vec<Point>,
    names: &'a [String],
    out: &'a mut Vec<Act>,
}

impl Search<'_> {
    fn fill(&mut self, k: usize) {
        if k == self.cells.len() {
            if self.perms.iter().all(|p| relabel(self.size, &self.table, p) >= self.table) {
                self.out.push(Act::from_parts_unchecked(
                    self.monoid.clone(),
                    self.names.to_vec(),
                    self.table.clone(),
                ));
            }
            return;
        }
        let (s, a) = self.cells[k];
        for v in 0..self.size {
            self.table[s * self.size + a] = v;
            if self.consistent() {
                self.fill(k + 1);
            }
        }
        self.table[s * self.size + a] = UNSET;
    }

    fn consistent(&self) -> bool {
        let (m, t, w) = (self.monoid, &self.table, self.size);
        for s1 in m.elements() {
            for s2 in m.elements() {
                let s12 = m.mul(s1, s2);
                for a in 0..w {
                    let b = t[s2 * w + a];
                    if b == UNSET {
                        continue;
                    }
                    let (l, r) = (t[s1 * w + b], t[s12 * w + a]);
                    if l != UNSET && r != UNSET && l != r {
                        return false;
                    }
                }
            }
        }
        true
    }
}

fn carrier_permutations(size: usize) -> Vec<Vec<usize>> {
    let mut items: Vec<usize> = (0..size).collect();
    let mut out = Vec::new();
    permute(&mut items, 0, &mut out);
    out
}

/// Action table relabelled by `p` (old point -> new point).
fn relabel(size: usize, t: &[Point], p: &[usize]) -> Vec<Point> {
    let mut out = vec![0; t.len()];
    for (s, row) in t.chunks(size).enumerate() {
        for (a, &b) in row.iter().enumerate() {
            out[s * size + p[a]] = p[b];
        }
    }
    out
}

/// Least relabelling of the flat action table; equal for isomorphic acts
/// over the same monoid.
pub fn canonical_action(act: &Act) -> Vec<Point> {
    let size = act.size();
    carrier_permutations(size)
        .iter()
        .map(|p| relabel(size, act.flat_action(), p))
        .min()
        .unwrap_or_default()
}

pub fn is_isomorphic_act(a: &Act, b: &Act) -> bool {
    a.monoid() == b.monoid() && a.size() == b.size() && canonical_action(a) == canonical_action(b)
}
