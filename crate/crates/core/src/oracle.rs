//! Brute-force reference routines: generator closure, orbits and point
//! stabilizers by plain breadth-first enumeration. These are deliberately
//! independent of the stabilizer-chain machinery and only feasible for small
//! groups; the test suites use them as ground truth.

use std::collections::HashSet;

use crate::matrix::{GroupMatrix, OrbitPoint};

/// All elements of the group generated by `gens`, or `None` if the closure
/// exceeds `cap` elements.
pub fn closure(gens: &[GroupMatrix], cap: usize) -> Option<HashSet<GroupMatrix>> {
    let Some(first) = gens.first() else {
        return Some(HashSet::new());
    };
    let id = GroupMatrix::identity(first.field().clone(), first.dim());
    let mut seen: HashSet<GroupMatrix> = HashSet::new();
    seen.insert(id.clone());
    let mut frontier = vec![id];
    while let Some(g) = frontier.pop() {
        for s in gens {
            let h = g.mul(s);
            if seen.insert(h.clone()) {
                if seen.len() > cap {
                    return None;
                }
                frontier.push(h);
            }
        }
    }
    Some(seen)
}

/// Orbit of a point under the closure of `gens`.
pub fn orbit(root: &OrbitPoint, gens: &[GroupMatrix]) -> HashSet<OrbitPoint> {
    let mut seen: HashSet<OrbitPoint> = HashSet::new();
    seen.insert(root.clone());
    let mut frontier = vec![root.clone()];
    while let Some(p) = frontier.pop() {
        for s in gens {
            let q = p.apply(s);
            if seen.insert(q.clone()) {
                frontier.push(q);
            }
        }
    }
    seen
}

/// Elements of `group` fixing the given point.
pub fn stabilizer<'a>(
    group: impl IntoIterator<Item = &'a GroupMatrix>,
    point: &OrbitPoint,
) -> Vec<GroupMatrix> {
    group
        .into_iter()
        .filter(|g| point.is_fixed_by(g))
        .cloned()
        .collect()
}
