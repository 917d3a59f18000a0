//! Schreier trees: orbit plus transversal structure for one base point.
//!
//! A tree maps every orbit point to its inbound edge. In `Generators` mode
//! the edge stores only which generator was applied and tracing a coset
//! representative multiplies labels along the path to the root. In
//! `Transversal` mode the full coset representative is stored at insertion
//! time, so a trace is a single lookup. This is the classic time/space
//! trade-off, exposed as a per-chain flag.

use std::collections::HashMap;

use crate::matrix::{GroupMatrix, OrbitPoint};
use crate::{Error, Result};

#[derive(Clone, Copy, PartialEq, Eq, Debug, Default)]
pub enum LabelMode {
    /// Edge labels are generator indices; traces multiply along the path.
    Generators,
    /// Edge labels carry the full coset representative; traces are lookups.
    #[default]
    Transversal,
}

impl std::str::FromStr for LabelMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "generators" => Ok(LabelMode::Generators),
            "transversal" => Ok(LabelMode::Transversal),
            other => Err(Error::Parse(format!("unknown tree label mode '{other}'"))),
        }
    }
}

#[derive(Clone)]
struct Edge {
    /// Index into the tree's generator list of the label that was applied.
    gen: usize,
    depth: u32,
    /// Full coset representative, present in `Transversal` mode.
    transversal: Option<GroupMatrix>,
}

/// Spanning tree of the orbit of `root` under the given generators, stored
/// as back-pointers in a hash map.
#[derive(Clone)]
pub struct SchreierTree {
    root: OrbitPoint,
    mode: LabelMode,
    gens: Vec<GroupMatrix>,
    gen_invs: Vec<GroupMatrix>,
    edges: HashMap<OrbitPoint, Edge>,
    /// Orbit in breadth-first discovery order; root first.
    order: Vec<OrbitPoint>,
    max_depth: u32,
}

/// Breadth-first orbit computation; generators are iterated in input order.
pub fn compute_schreier_tree(
    gens: &[GroupMatrix],
    root: OrbitPoint,
    mode: LabelMode,
    orbit_limit: usize,
) -> Result<SchreierTree> {
    let mut tree = SchreierTree {
        root: root.clone(),
        mode,
        gens: gens.to_vec(),
        gen_invs: gens
            .iter()
            .map(|g| g.inv().expect("generator is invertible"))
            .collect(),
        edges: HashMap::new(),
        order: vec![root],
        max_depth: 0,
    };
    tree.bfs_from(0, orbit_limit)?;
    Ok(tree)
}

impl SchreierTree {
    /// Expand the orbit starting from `order[start..]`.
    fn bfs_from(&mut self, start: usize, orbit_limit: usize) -> Result<()> {
        let mut i = start;
        while i < self.order.len() {
            let p = self.order[i].clone();
            let t_p = match self.mode {
                LabelMode::Transversal => Some(self.orbit_element(&p)?),
                LabelMode::Generators => None,
            };
            let depth = if p == self.root {
                0
            } else {
                self.edges[&p].depth
            };
            for (k, s) in self.gens.iter().enumerate() {
                let q = p.apply(s);
                if q == self.root || self.edges.contains_key(&q) {
                    continue;
                }
                let transversal = t_p.as_ref().map(|t| t.mul(s));
                self.edges.insert(
                    q.clone(),
                    Edge {
                        gen: k,
                        depth: depth + 1,
                        transversal,
                    },
                );
                self.max_depth = self.max_depth.max(depth + 1);
                self.order.push(q);
                if self.order.len() > orbit_limit {
                    return Err(Error::OrbitLimitExceeded(orbit_limit));
                }
            }
            i += 1;
        }
        Ok(())
    }

    /// Add generators and grow the orbit from the existing points.
    pub fn extend(&mut self, new_gens: &[GroupMatrix], orbit_limit: usize) -> Result<()> {
        if new_gens.is_empty() {
            return Ok(());
        }
        for g in new_gens {
            self.gen_invs
                .push(g.inv().expect("generator is invertible"));
            self.gens.push(g.clone());
        }
        // rescan every known point against the full generator set
        self.bfs_from(0, orbit_limit)
    }

    pub fn root(&self) -> &OrbitPoint {
        &self.root
    }

    pub fn mode(&self) -> LabelMode {
        self.mode
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn max_depth(&self) -> u32 {
        self.max_depth
    }

    pub fn contains(&self, p: &OrbitPoint) -> bool {
        *p == self.root || self.edges.contains_key(p)
    }

    /// Orbit points in breadth-first order, root first.
    pub fn points(&self) -> impl Iterator<Item = &OrbitPoint> {
        self.order.iter()
    }

    pub fn generators(&self) -> &[GroupMatrix] {
        &self.gens
    }

    fn identity(&self) -> GroupMatrix {
        GroupMatrix::identity(self.root.field().clone(), self.root.dim())
    }

    /// The transversal element t(p) with root^t(p) = p.
    pub fn orbit_element(&self, p: &OrbitPoint) -> Result<GroupMatrix> {
        if *p == self.root {
            return Ok(self.identity());
        }
        let edge = self.edges.get(p).ok_or(Error::PointNotInOrbit)?;
        match self.mode {
            LabelMode::Transversal => {
                Ok(edge.transversal.clone().expect("transversal label stored"))
            }
            LabelMode::Generators => {
                let mut g = self.gens[edge.gen].clone();
                let mut p = p.apply(&self.gen_invs[edge.gen]);
                while p != self.root {
                    let e = self.edges.get(&p).ok_or(Error::PointNotInOrbit)?;
                    g = self.gens[e.gen].mul(&g);
                    p = p.apply(&self.gen_invs[e.gen]);
                }
                Ok(g)
            }
        }
    }

    /// t(p) as a word over this tree's generator indices (1-based, signed;
    /// path words never need inverse letters).
    pub fn orbit_element_word(&self, p: &OrbitPoint) -> Result<Vec<i64>> {
        let mut word = Vec::new();
        let mut p = p.clone();
        while p != self.root {
            let e = self.edges.get(&p).ok_or(Error::PointNotInOrbit)?;
            word.push(e.gen as i64 + 1);
            p = p.apply(&self.gen_invs[e.gen]);
        }
        word.reverse();
        Ok(word)
    }
}

/// The Schreier generator t(p) * s * t(p^s)^-1, an element of the stabilizer
/// of the tree root.
pub fn schreier_generator(
    tree: &SchreierTree,
    p: &OrbitPoint,
    s: &GroupMatrix,
) -> Result<GroupMatrix> {
    let t1 = tree.orbit_element(p)?;
    let t2 = tree.orbit_element(&p.apply(s))?;
    Ok(t1
        .mul(s)
        .mul(&t2.inv().expect("transversal element is invertible")))
}

/// Same element as a word over the tree's generator indices; `s_idx` is the
/// 0-based index of `s` in the tree generator list.
pub fn schreier_generator_word(
    tree: &SchreierTree,
    p: &OrbitPoint,
    s_idx: usize,
) -> Result<Vec<i64>> {
    let s = &tree.generators()[s_idx];
    let mut word = tree.orbit_element_word(p)?;
    word.push(s_idx as i64 + 1);
    let tail = tree.orbit_element_word(&p.apply(s))?;
    word.extend(tail.iter().rev().map(|&l| -l));
    Ok(word)
}

/// Sims's pairwise reduction: whenever two generators at level i move the
/// base point to the same non-fixed image, one is replaced by g * h^-1,
/// which fixes that point. Levels 1..=m are processed in order.
pub fn boil_schreier_generators(
    base: &[OrbitPoint],
    sgs: &[GroupMatrix],
    m: usize,
) -> Vec<GroupMatrix> {
    assert!(m <= base.len());
    let mut sgs: Vec<GroupMatrix> = sgs.to_vec();
    for i in 0..m {
        let prefix = &base[..i];
        let level: Vec<usize> = (0..sgs.len())
            .filter(|&k| prefix.iter().all(|p| p.is_fixed_by(&sgs[k])))
            .collect();
        for &gi in &level {
            for &hi in &level {
                if gi == hi {
                    continue;
                }
                let g = sgs[gi].clone();
                let h = sgs[hi].clone();
                let img_g = base[i].apply(&g);
                if img_g != base[i] && img_g == base[i].apply(&h) {
                    sgs[hi] = g.mul(&h.inv().expect("generator is invertible"));
                }
            }
        }
    }
    // drop identities and duplicates introduced by replacements
    let mut seen = std::collections::HashSet::new();
    sgs.retain(|g| !g.is_identity() && seen.insert(g.clone()));
    sgs
}
