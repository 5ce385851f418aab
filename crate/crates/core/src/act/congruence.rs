use serde::Serialize;

use super::{Act, ActError, Point};

/// An equivalence on the carrier of an act that is compatible with the action.
///
/// Each point maps to the least point of its class.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Congruence {
    representative: Vec<Point>,
}

impl Congruence {
    pub fn identity(size: usize) -> Self {
        Congruence { representative: (0..size).collect() }
    }

    /// Validates an arbitrary labelling (points with equal labels are
    /// equivalent) against the action.
    pub fn from_labels(act: &Act, labels: &[usize]) -> Result<Self, ActError> {
        if labels.len() != act.size() {
            return Err(ActError::Malformed("labelling does not cover the carrier".into()));
        }
        let mut first: std::collections::HashMap<usize, Point> = Default::default();
        let representative = labels
            .iter()
            .enumerate()
            .map(|(p, l)| *first.entry(*l).or_insert(p))
            .collect();
        let c = Congruence { representative };
        c.check_compatible(act)?;
        Ok(c)
    }

    fn check_compatible(&self, act: &Act) -> Result<(), ActError> {
        for a in act.points() {
            let b = self.representative[a];
            for s in act.monoid().elements() {
                if self.representative[act.act(s, a)] != self.representative[act.act(s, b)] {
                    return Err(ActError::NotCompatible { s, a, b });
                }
            }
        }
        Ok(())
    }

    pub fn representative(&self, a: Point) -> Point {
        self.representative[a]
    }

    pub fn related(&self, a: Point, b: Point) -> bool {
        self.representative[a] == self.representative[b]
    }

    pub fn class_count(&self) -> usize {
        self.representative.iter().enumerate().filter(|(p, r)| p == *r).count()
    }

    /// Classes in order of their least element.
    pub fn classes(&self) -> Vec<Vec<Point>> {
        let mut out: Vec<Vec<Point>> = Vec::new();
        let mut slot = vec![usize::MAX; self.representative.len()];
        for (p, &r) in self.representative.iter().enumerate() {
            if slot[r] == usize::MAX {
                slot[r] = out.len();
                out.push(Vec::new());
            }
            out[slot[r]].push(p);
        }
        out
    }
}

fn find(parent: &mut [Point], mut a: Point) -> Point {
    while parent[a] != a {
        parent[a] = parent[parent[a]];
        a = parent[a];
    }
    a
}

/// The least congruence containing `pairs`.
///
/// Union-find with a worklist: every merge of `a` and `b` schedules
/// `(s·a, s·b)` for all `s`, until nothing new merges.
pub fn congruence_closure(act: &Act, pairs: &[(Point, Point)]) -> Congruence {
    let mut parent: Vec<Point> = act.points().collect();
    let mut work: Vec<(Point, Point)> = pairs.to_vec();
    work.reverse();
    while let Some((a, b)) = work.pop() {
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        if ra == rb {
            continue;
        }
        // keep the smaller index as root
        let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
        parent[hi] = lo;
        for s in act.monoid().elements() {
            work.push((act.act(s, a), act.act(s, b)));
        }
    }
    let representative = (0..act.size()).map(|p| find(&mut parent, p)).collect();
    Congruence { representative }
}

#[derive(Debug, Clone)]
pub struct Quotient {
    pub act: Act,
    /// Class index of every point of the original act.
    pub projection: Vec<Point>,
}

/// The quotient act `A/θ`; classes are numbered by their least point and
/// named after it.
pub fn quotient(act: &Act, theta: &Congruence) -> Result<Quotient, ActError> {
    if theta.representative.len() != act.size() {
        return Err(ActError::Malformed("congruence belongs to a different act".into()));
    }
    theta.check_compatible(act)?;
    let classes = theta.classes();
    let mut projection = vec![0; act.size()];
    for (i, class) in classes.iter().enumerate() {
        for &p in class {
            projection[p] = i;
        }
    }
    let names = classes.iter().map(|c| act.name(c[0]).to_string()).collect();
    let mut action = Vec::with_capacity(act.monoid().order() * classes.len());
    for s in act.monoid().elements() {
        for class in &classes {
            action.push(projection[act.act(s, class[0])]);
        }
    }
    Ok(Quotient { act: Act::from_parts_unchecked(act.monoid().clone(), names, action), projection })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::act::fixtures::diamond_arc;
    use crate::act::{coproduct, validate_act};
    use crate::monoid::Monoid;
    use std::sync::Arc;

    /// Naive least congruence: saturate a boolean relation matrix under
    /// reflexivity, symmetry, transitivity and the action until stable.
    fn naive_closure(act: &Act, pairs: &[(Point, Point)]) -> Vec<Vec<bool>> {
        let n = act.size();
        let mut rel = vec![vec![false; n]; n];
        for a in 0..n {
            rel[a][a] = true;
        }
        for &(a, b) in pairs {
            rel[a][b] = true;
        }
        loop {
            let mut changed = false;
            for a in 0..n {
                for b in 0..n {
                    if !rel[a][b] {
                        continue;
                    }
                    if !rel[b][a] {
                        rel[b][a] = true;
                        changed = true;
                    }
                    for s in act.monoid().elements() {
                        let (x, y) = (act.act(s, a), act.act(s, b));
                        if !rel[x][y] {
                            rel[x][y] = true;
                            changed = true;
                        }
                    }
                    for c in 0..n {
                        if rel[b][c] && !rel[a][c] {
                            rel[a][c] = true;
                            changed = true;
                        }
                    }
                }
            }
            if !changed {
                return rel;
            }
        }
    }

    fn amalgam_base() -> (Act, Vec<(Point, Point)>) {
        let d = diamond_arc();
        let s = Act::regular_representation(&d);
        let c = coproduct(&[s.clone(), s.clone(), s]).unwrap();
        let (e, f) = (d.element("e").unwrap(), d.element("f").unwrap());
        let pairs = vec![
            (c.injections[0][f], c.injections[1][f]),
            (c.injections[1][e], c.injections[2][e]),
        ];
        (c.act, pairs)
    }

    #[test]
    fn empty_generators_give_identity() {
        let (act, _) = amalgam_base();
        assert_eq!(congruence_closure(&act, &[]), Congruence::identity(act.size()));
    }

    #[test]
    fn gluing_identities_collapses_copies() {
        let d = diamond_arc();
        let s = Act::regular_representation(&d);
        let c = coproduct(&[s.clone(), s.clone()]).unwrap();
        let theta = congruence_closure(&c.act, &[(c.injections[0][0], c.injections[1][0])]);
        assert_eq!(theta.class_count(), d.order());
        let q = quotient(&c.act, &theta).unwrap();
        assert_eq!(q.act.size(), d.order());
    }

    #[test]
    fn amalgam_matches_naive_closure() {
        let (act, pairs) = amalgam_base();
        let theta = congruence_closure(&act, &pairs);
        let rel = naive_closure(&act, &pairs);
        for a in act.points() {
            for b in act.points() {
                assert_eq!(theta.related(a, b), rel[a][b], "{a} {b}");
            }
        }
        // f1~f2, e2~e3 and the three zeros: 12 points, 8 classes
        assert_eq!(theta.class_count(), 8);
    }

    #[test]
    fn closure_is_least() {
        let (act, pairs) = amalgam_base();
        let theta = congruence_closure(&act, &pairs);
        // splitting any non-trivial class breaks compatibility or drops a generator
        for class in theta.classes().iter().filter(|c| c.len() > 1) {
            for &p in &class[1..] {
                let mut labels: Vec<usize> = (0..act.size()).map(|x| theta.representative(x)).collect();
                labels[p] = usize::MAX;
                let split = Congruence::from_labels(&act, &labels);
                let keeps_generators = pairs.iter().all(|&(a, b)| labels[a] == labels[b]);
                assert!(split.is_err() || !keeps_generators);
            }
        }
    }

    #[test]
    fn quotients() {
        let (act, pairs) = amalgam_base();
        let id = quotient(&act, &Congruence::identity(act.size())).unwrap();
        assert_eq!(id.act, act);
        let all = Congruence::from_labels(&act, &vec![0; act.size()]).unwrap();
        assert_eq!(quotient(&act, &all).unwrap().act.size(), 1);
        let q = quotient(&act, &congruence_closure(&act, &pairs)).unwrap();
        assert!(validate_act(q.act.monoid().clone(), q.act.names().to_vec(), q.act.rows()).is_ok());

        let g = Arc::new(Monoid::cyclic_group(2));
        let s = Act::regular_representation(&g);
        // 1_1 ~ 1_2 without g_1 ~ g_2
        let c = coproduct(&[s.clone(), s]).unwrap().act;
        assert!(matches!(
            Congruence::from_labels(&c, &[0, 1, 0, 2]),
            Err(ActError::NotCompatible { .. })
        ));
    }
}
