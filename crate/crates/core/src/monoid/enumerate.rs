//! Enumeration of small monoids up to isomorphism.
//!
//! Tables are filled cell by cell with the identity fixed at index 0 and
//! associativity checked on every partial table. A completed table is kept
//! only if it is the lexicographically least relabelling of itself, so each
//! isomorphism class is emitted exactly once and in a fixed order.

use super::{Elem, Monoid, MonoidError};

/// Largest order accepted by the enumerators.
pub const DEFAULT_ORDER_BOUND: usize = 5;

const UNSET: Elem = Elem::MAX;

/// All monoids of order `n` up to isomorphism.
pub fn enumerate_monoids(n: usize) -> Result<Vec<Monoid>, MonoidError> {
    enumerate(n, false)
}

/// All commutative monoids of order `n` up to isomorphism.
pub fn enumerate_commutative_monoids(n: usize) -> Result<Vec<Monoid>, MonoidError> {
    enumerate(n, true)
}

fn enumerate(n: usize, commutative: bool) -> Result<Vec<Monoid>, MonoidError> {
    if n > DEFAULT_ORDER_BOUND {
        return Err(MonoidError::BoundExceeded { requested: n, bound: DEFAULT_ORDER_BOUND });
    }
    if n == 0 {
        return Ok(Vec::new());
    }
    let mut table = vec![UNSET; n * n];
    for a in 0..n {
        table[a] = a;
        table[a * n] = a;
    }
    let cells: Vec<(usize, usize)> = (1..n)
        .flat_map(|i| (1..n).map(move |j| (i, j)))
        .filter(|&(i, j)| !commutative || i <= j)
        .collect();
    let perms = identity_fixing_permutations(n);
    let mut out = Vec::new();
    fill(n, commutative, &cells, 0, &mut table, &perms, &mut out);
    Ok(out)
}

fn fill(
    n: usize,
    commutative: bool,
    cells: &[(usize, usize)],
    k: usize,
    table: &mut Vec<Elem>,
    perms: &[Vec<usize>],
    out: &mut Vec<Monoid>,
) {
    if k == cells.len() {
        if is_canonical(n, table, perms) {
            out.push(Monoid::from_flat_unchecked(n, table.clone()));
        }
        return;
    }
    let (i, j) = cells[k];
    for v in 0..n {
        table[i * n + j] = v;
        table[j * n + i] = if commutative { v } else { table[j * n + i] };
        if partial_associative(n, table) {
            fill(n, commutative, cells, k + 1, table, perms, out);
        }
    }
    table[i * n + j] = UNSET;
    if commutative {
        table[j * n + i] = UNSET;
    }
}

fn partial_associative(n: usize, t: &[Elem]) -> bool {
    for a in 0..n {
        for b in 0..n {
            let ab = t[a * n + b];
            if ab == UNSET {
                continue;
            }
            for c in 0..n {
                let bc = t[b * n + c];
                if bc == UNSET {
                    continue;
                }
                let left = t[ab * n + c];
                let right = t[a * n + bc];
                if left != UNSET && right != UNSET && left != right {
                    return false;
                }
            }
        }
    }
    true
}

fn identity_fixing_permutations(n: usize) -> Vec<Vec<usize>> {
    let mut rest: Vec<usize> = (1..n).collect();
    let mut out = Vec::new();
    permute(&mut rest, 0, &mut out);
    out.into_iter()
        .map(|p| std::iter::once(0).chain(p).collect())
        .collect()
}

pub(crate) fn permute(items: &mut Vec<usize>, k: usize, out: &mut Vec<Vec<usize>>) {
    if k == items.len() {
        out.push(items.clone());
        return;
    }
    for i in k..items.len() {
        items.swap(k, i);
        permute(items, k + 1, out);
        items.swap(k, i);
    }
}

/// Table relabelled by `p` (old index -> new index).
fn relabel(n: usize, t: &[Elem], p: &[usize]) -> Vec<Elem> {
    let mut out = vec![0; n * n];
    for a in 0..n {
        for b in 0..n {
            out[p[a] * n + p[b]] = p[t[a * n + b]];
        }
    }
    out
}

fn is_canonical(n: usize, t: &[Elem], perms: &[Vec<usize>]) -> bool {
    perms.iter().all(|p| relabel(n, t, p).as_slice() >= t)
}

/// The least relabelled table of `m` with the identity moved to index 0.
/// Two monoids are isomorphic iff their canonical tables coincide.
pub fn canonical_table(m: &Monoid) -> Vec<Elem> {
    let n = m.order();
    // move the identity to 0 first
    let mut to_front: Vec<usize> = (0..n).collect();
    to_front.swap(0, m.identity());
    let mut inverse = vec![0; n];
    for (old, &new) in to_front.iter().enumerate() {
        inverse[old] = new;
    }
    let base = relabel(n, m.flat_table(), &inverse);
    identity_fixing_permutations(n)
        .iter()
        .map(|p| relabel(n, &base, p))
        .min()
        .unwrap_or(base)
}

pub fn is_isomorphic(a: &Monoid, b: &Monoid) -> bool {
    a.order() == b.order() && canonical_table(a) == canonical_table(b)
}
