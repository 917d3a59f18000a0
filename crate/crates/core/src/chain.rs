//! Stabilizer chains: partial base and strong generating set construction,
//! sifting, the deterministic Schreier-Sims completion, the naive Schreier
//! lemma variant, and the query layer (order, membership, enumeration,
//! factorization, uniform random elements).
//!
//! Levels are 0-based here: level `l` has the tree rooted at `base[l]` and
//! generator set {s in sgs : s fixes base[0..l]}. Drop-out levels reported
//! by sifting are 1-based and range over [1, n + 1].

use std::collections::HashMap;

use num_bigint::BigUint;
use rand::Rng;

use crate::gf::Field;
use crate::heuristics::{select_base_point, BaseStrategy};
use crate::matrix::{GroupMatrix, OrbitPoint};
use crate::schreier::{
    boil_schreier_generators, compute_schreier_tree, schreier_generator, LabelMode, SchreierTree,
};
use crate::{Error, Result};

#[derive(Clone, Copy, PartialEq, Eq, Debug, Default)]
pub enum RebuildPolicy {
    /// Recompute a level tree whenever its generator set changes.
    #[default]
    Always,
    /// Grow the existing tree in place; a depth watchdog still forces a
    /// rebuild when the tree degenerates.
    Extend,
}

impl std::str::FromStr for RebuildPolicy {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "always" => Ok(RebuildPolicy::Always),
            "extend" => Ok(RebuildPolicy::Extend),
            other => Err(Error::Parse(format!("unknown rebuild policy '{other}'"))),
        }
    }
}

#[derive(Clone, Debug)]
pub struct ChainConfig {
    pub label_mode: LabelMode,
    pub rebuild: RebuildPolicy,
    pub base_strategy: BaseStrategy,
    pub orbit_limit: usize,
    /// Largest group that enumerate_elements will materialize.
    pub enumeration_cap: u64,
    /// Generator count cap for the naive variant.
    pub sgs_cap: usize,
}

impl Default for ChainConfig {
    fn default() -> Self {
        ChainConfig {
            label_mode: LabelMode::default(),
            rebuild: RebuildPolicy::default(),
            base_strategy: BaseStrategy::default(),
            orbit_limit: 1_000_000,
            enumeration_cap: 1_000_000,
            sgs_cap: 10_000,
        }
    }
}

#[derive(Clone)]
pub struct Level {
    /// Indices into sgs, parallel to the tree's generator list.
    pub gen_indices: Vec<usize>,
    pub tree: SchreierTree,
}

#[derive(Clone)]
pub struct StabilizerChain {
    field: Field,
    d: usize,
    pub base: Vec<OrbitPoint>,
    /// Deduplicated, inverse-closed, identity excluded.
    pub sgs: Vec<GroupMatrix>,
    sgs_index: HashMap<GroupMatrix, usize>,
    pub levels: Vec<Level>,
    pub complete: bool,
    pub config: ChainConfig,
}

#[derive(Clone, Debug)]
pub struct SiftResult {
    pub residue: GroupMatrix,
    /// 1-based; n + 1 means every level was passed.
    pub dropout: usize,
}

/// Partial base and strong generating set: generators are deduplicated,
/// identity-filtered and closed under inverses; the base (starting from
/// `seed_base`) is extended until no generator fixes every base point.
pub fn get_partial_bsgs(
    gens: &[GroupMatrix],
    seed_base: &[OrbitPoint],
    strategy: BaseStrategy,
) -> Result<(Vec<OrbitPoint>, Vec<GroupMatrix>)> {
    let mut sgs: Vec<GroupMatrix> = Vec::new();
    for g in gens {
        if g.is_identity() || sgs.contains(g) {
            continue;
        }
        sgs.push(g.clone());
        let gi = g.inv()?;
        if !sgs.contains(&gi) {
            sgs.push(gi);
        }
    }
    let mut base = seed_base.to_vec();
    for k in 0..sgs.len() {
        if base.iter().all(|p| p.is_fixed_by(&sgs[k])) {
            let g = sgs[k].clone();
            base.extend(select_base_point(strategy, &sgs, &g)?);
        }
    }
    Ok((base, sgs))
}

impl StabilizerChain {
    /// Partial chain: base and sgs from `get_partial_bsgs`, level trees
    /// built, complete flag set only for the trivial group.
    pub fn from_generators(
        field: Field,
        d: usize,
        gens: &[GroupMatrix],
        seed_base: &[OrbitPoint],
        config: ChainConfig,
    ) -> Result<Self> {
        let (base, sgs) = get_partial_bsgs(gens, seed_base, config.base_strategy)?;
        let mut chain = StabilizerChain {
            field,
            d,
            base,
            sgs: Vec::new(),
            sgs_index: HashMap::new(),
            levels: Vec::new(),
            complete: false,
            config,
        };
        for g in sgs {
            chain.push_sgs(g)?;
        }
        chain.rebuild_levels()?;
        chain.complete = chain.sgs.is_empty();
        Ok(chain)
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    fn identity(&self) -> GroupMatrix {
        GroupMatrix::identity(self.field.clone(), self.d)
    }

    /// Insert a non-identity element and its inverse, deduplicated.
    fn push_sgs(&mut self, g: GroupMatrix) -> Result<()> {
        debug_assert!(!g.is_identity());
        let gi = g.inv()?;
        for h in [g, gi] {
            if h.is_identity() || self.sgs_index.contains_key(&h) {
                continue;
            }
            self.sgs_index.insert(h.clone(), self.sgs.len());
            self.sgs.push(h);
        }
        Ok(())
    }

    /// Indices of sgs members fixing base[0..l], in sgs order.
    pub(crate) fn qualifying(&self, l: usize) -> Vec<usize> {
        (0..self.sgs.len())
            .filter(|&k| self.base[..l].iter().all(|p| p.is_fixed_by(&self.sgs[k])))
            .collect()
    }

    pub(crate) fn build_level(&self, l: usize) -> Result<Level> {
        let gen_indices = self.qualifying(l);
        let gens: Vec<GroupMatrix> = gen_indices.iter().map(|&k| self.sgs[k].clone()).collect();
        let tree = compute_schreier_tree(
            &gens,
            self.base[l].clone(),
            self.config.label_mode,
            self.config.orbit_limit,
        )?;
        Ok(Level { gen_indices, tree })
    }

    /// Build trees for base points that do not have a level yet.
    pub fn ensure_levels(&mut self) -> Result<()> {
        for l in self.levels.len()..self.base.len() {
            let lev = self.build_level(l)?;
            self.levels.push(lev);
        }
        Ok(())
    }

    pub fn rebuild_levels(&mut self) -> Result<()> {
        self.levels = (0..self.base.len())
            .map(|l| self.build_level(l))
            .collect::<Result<_>>()?;
        Ok(())
    }

    pub fn sift(&self, g: &GroupMatrix) -> Result<SiftResult> {
        self.sift_from(0, g.clone())
    }

    pub(crate) fn sift_from(&self, start: usize, mut r: GroupMatrix) -> Result<SiftResult> {
        for l in start..self.levels.len() {
            let img = self.base[l].apply(&r);
            let Ok(t) = self.levels[l].tree.orbit_element(&img) else {
                return Ok(SiftResult {
                    residue: r,
                    dropout: l + 1,
                });
            };
            r = r.mul(&t.inv()?);
        }
        Ok(SiftResult {
            residue: r,
            dropout: self.levels.len() + 1,
        })
    }

    pub fn is_member(&self, g: &GroupMatrix) -> Result<bool> {
        if !self.complete {
            return Err(Error::IncompleteChain);
        }
        Ok(self.sift(g)?.residue.is_identity())
    }

    /// Register a new group element (typically a sift residue) in the sgs,
    /// extending the base when it fixes every current base point, and update
    /// the affected level trees per the rebuild policy. Returns false when
    /// the element was already present (or is the identity).
    pub fn add_generator(&mut self, g: &GroupMatrix) -> Result<bool> {
        if g.is_identity() || self.sgs_index.contains_key(g) {
            return Ok(false);
        }
        let first_new = self.sgs.len();
        self.push_sgs(g.clone())?;
        if self.base.iter().all(|p| p.is_fixed_by(g)) {
            let pts = select_base_point(self.config.base_strategy, &self.sgs, g)?;
            self.base.extend(pts);
        }
        for l in 0..self.base.len() {
            if l >= self.levels.len() {
                let lev = self.build_level(l)?;
                self.levels.push(lev);
                continue;
            }
            let mut added = Vec::new();
            for k in first_new..self.sgs.len() {
                if self.base[..l].iter().all(|p| p.is_fixed_by(&self.sgs[k])) {
                    self.levels[l].gen_indices.push(k);
                    added.push(self.sgs[k].clone());
                }
            }
            if added.is_empty() {
                continue;
            }
            match self.config.rebuild {
                RebuildPolicy::Always => self.levels[l] = self.build_level(l)?,
                RebuildPolicy::Extend => {
                    self.levels[l]
                        .tree
                        .extend(&added, self.config.orbit_limit)?;
                    let t = &self.levels[l].tree;
                    if f64::from(t.max_depth()) > 4.0 * (t.len() as f64).log2() {
                        self.levels[l] = self.build_level(l)?;
                    }
                }
            }
        }
        Ok(true)
    }

    /// Deterministic completion. Levels are processed deepest first with an
    /// explicit worklist standing in for recursion: a frame rebuilds its
    /// level from the current sgs on entry, then walks all (orbit point,
    /// generator) pairs of that snapshot. A Schreier generator whose sift
    /// through the levels below leaves a non-trivial residue is adjoined to
    /// the sgs (with its inverse); when the residue fixes every base point
    /// the base is extended from the residue. Frames for the levels from the
    /// drop-out back down to the current one's child are then re-queued.
    pub fn schreier_sims(&mut self) -> Result<()> {
        struct Frame {
            level: usize,
            started: bool,
            point: usize,
            gen: usize,
        }
        let fresh = |level| Frame {
            level,
            started: false,
            point: 0,
            gen: 0,
        };
        let mut stack: Vec<Frame> = (0..self.levels.len()).map(fresh).collect();
        while let Some(top) = stack.last_mut() {
            let l = top.level;
            if !top.started {
                self.levels[l] = self.build_level(l)?;
                top.started = true;
            }
            if top.point >= self.levels[l].tree.len() {
                stack.pop();
                continue;
            }
            if top.gen >= self.levels[l].gen_indices.len() {
                top.gen = 0;
                top.point += 1;
                continue;
            }
            let (pi, si) = (top.point, top.gen);
            top.gen += 1;
            let sgen = {
                let tree = &self.levels[l].tree;
                let p = tree.points().nth(pi).expect("point index in range").clone();
                schreier_generator(tree, &p, &tree.generators()[si].clone())?
            };
            if sgen.is_identity() {
                continue;
            }
            let SiftResult { residue, dropout } = self.sift_from(l + 1, sgen.clone())?;
            if residue.is_identity() {
                continue;
            }
            self.push_sgs(sgen)?;
            let mut deepest = dropout - 1;
            if dropout == self.levels.len() + 1 {
                // the residue fixes every base point, so the strategy's new
                // point(s) are distinct from the existing base
                let pts = select_base_point(self.config.base_strategy, &self.sgs, &residue)?;
                for p in pts {
                    self.base.push(p.clone());
                    let tree = compute_schreier_tree(
                        &[],
                        p,
                        self.config.label_mode,
                        self.config.orbit_limit,
                    )?;
                    self.levels.push(Level {
                        gen_indices: Vec::new(),
                        tree,
                    });
                }
                deepest = self.levels.len() - 1;
            }
            for j in l + 1..=deepest {
                stack.push(fresh(j));
            }
        }
        self.normalize_levels()?;
        self.complete = true;
        Ok(())
    }

    /// Restore the level-set invariant after completion: register every sgs
    /// member at each level whose base prefix it fixes. The generated group
    /// at each level is unchanged, so orbits do not grow.
    pub(crate) fn normalize_levels(&mut self) -> Result<()> {
        for l in 0..self.levels.len() {
            let want = self.qualifying(l);
            let missing: Vec<usize> = want
                .iter()
                .copied()
                .filter(|k| !self.levels[l].gen_indices.contains(k))
                .collect();
            if missing.is_empty() {
                continue;
            }
            let added: Vec<GroupMatrix> = missing.iter().map(|&k| self.sgs[k].clone()).collect();
            let before = self.levels[l].tree.len();
            self.levels[l].gen_indices.extend(missing);
            self.levels[l]
                .tree
                .extend(&added, self.config.orbit_limit)?;
            debug_assert_eq!(before, self.levels[l].tree.len());
        }
        Ok(())
    }

    /// Leon condition: every Schreier generator at every level sifts to a
    /// trivial residue through the levels below it.
    pub fn schreier_generators_sift_trivially(&self) -> Result<bool> {
        for (l, lev) in self.levels.iter().enumerate() {
            for p in lev.tree.points() {
                for s in lev.tree.generators() {
                    let g = schreier_generator(&lev.tree, p, s)?;
                    if !self.sift_from(l + 1, g)?.residue.is_identity() {
                        return Ok(false);
                    }
                }
            }
        }
        Ok(true)
    }

    pub fn orbit_sizes(&self) -> Vec<usize> {
        self.levels.iter().map(|lev| lev.tree.len()).collect()
    }

    /// Product of level orbit sizes; on a complete chain this is |G|.
    pub fn product_of_orbits(&self) -> BigUint {
        let mut acc = BigUint::from(1u32);
        for lev in &self.levels {
            acc *= BigUint::from(lev.tree.len());
        }
        acc
    }

    pub fn group_order(&self) -> Result<BigUint> {
        if !self.complete {
            return Err(Error::IncompleteChain);
        }
        Ok(self.product_of_orbits())
    }

    /// All group elements, each exactly once, as products of one transversal
    /// element per level (deepest level leftmost).
    pub fn enumerate_elements(&self) -> Result<Vec<GroupMatrix>> {
        if !self.complete {
            return Err(Error::IncompleteChain);
        }
        let cap = self.config.enumeration_cap;
        if self.product_of_orbits() > BigUint::from(cap) {
            return Err(Error::GroupTooLarge(cap));
        }
        let mut acc = vec![self.identity()];
        for lev in self.levels.iter().rev() {
            let trans: Vec<GroupMatrix> = lev
                .tree
                .points()
                .map(|p| lev.tree.orbit_element(p))
                .collect::<Result<_>>()?;
            let mut next = Vec::with_capacity(acc.len() * trans.len());
            for a in &acc {
                for t in &trans {
                    next.push(a.mul(t));
                }
            }
            acc = next;
        }
        Ok(acc)
    }

    /// The unique factorization g = u_n ... u_1 over the level transversals,
    /// returned in multiplication order (u_n first).
    pub fn factorize(&self, g: &GroupMatrix) -> Result<Vec<GroupMatrix>> {
        if !self.complete {
            return Err(Error::IncompleteChain);
        }
        let mut r = g.clone();
        let mut factors = Vec::with_capacity(self.levels.len());
        for l in 0..self.levels.len() {
            let img = self.base[l].apply(&r);
            let t = self.levels[l]
                .tree
                .orbit_element(&img)
                .map_err(|_| Error::NotAMember)?;
            r = r.mul(&t.inv()?);
            factors.push(t);
        }
        if !r.is_identity() {
            return Err(Error::NotAMember);
        }
        factors.reverse();
        Ok(factors)
    }

    /// Exactly uniform over the group: one uniform transversal element per
    /// level, multiplied deepest first.
    pub fn random_element_from_chain<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<GroupMatrix> {
        if !self.complete {
            return Err(Error::IncompleteChain);
        }
        let mut g = self.identity();
        for lev in self.levels.iter().rev() {
            let i = rng.random_range(0..lev.tree.len());
            let p = lev.tree.points().nth(i).expect("index in range");
            g = g.mul(&lev.tree.orbit_element(p)?);
        }
        Ok(g)
    }
}

/// Build a partial chain and complete it deterministically.
pub fn compute_bsgs_deterministic(
    field: Field,
    d: usize,
    gens: &[GroupMatrix],
    config: ChainConfig,
) -> Result<StabilizerChain> {
    let mut chain = StabilizerChain::from_generators(field, d, gens, &[], config)?;
    chain.schreier_sims()?;
    Ok(chain)
}

/// Schreier lemma level sweep without sifting: at each level take all
/// Schreier generators, reduce them pairwise (boiling), and use the result
/// as the next level's generators. Kept as an independent oracle for the
/// deterministic path.
pub fn compute_bsgs_naive(
    field: Field,
    d: usize,
    gens: &[GroupMatrix],
    config: ChainConfig,
) -> Result<StabilizerChain> {
    let mut cur: Vec<GroupMatrix> = Vec::new();
    for g in gens {
        if !g.is_identity() && !cur.contains(g) {
            cur.push(g.clone());
        }
    }
    let mut i = 0;
    while i < cur.len() {
        let gi = cur[i].inv()?;
        if !cur.contains(&gi) {
            cur.push(gi);
        }
        i += 1;
    }
    let mut base: Vec<OrbitPoint> = Vec::new();
    let mut all: Vec<GroupMatrix> = Vec::new();
    while let Some(seed) = cur.first().cloned() {
        if cur.len() > config.sgs_cap {
            return Err(Error::GeneratorBlowup(cur.len()));
        }
        for g in &cur {
            if !all.contains(g) {
                all.push(g.clone());
            }
        }
        for pt in select_base_point(config.base_strategy, &cur, &seed)? {
            base.push(pt.clone());
            let tree = compute_schreier_tree(&cur, pt, config.label_mode, config.orbit_limit)?;
            let mut next: Vec<GroupMatrix> = Vec::new();
            for p in tree.points() {
                for s in tree.generators() {
                    let g = schreier_generator(&tree, p, s)?;
                    if !g.is_identity() && !next.contains(&g) {
                        if next.len() >= config.sgs_cap {
                            return Err(Error::GeneratorBlowup(next.len() + 1));
                        }
                        next.push(g);
                    }
                }
            }
            let mut boiled = boil_schreier_generators(&base, &next, base.len());
            let mut i = 0;
            while i < boiled.len() {
                let gi = boiled[i].inv()?;
                if !boiled.contains(&gi) {
                    boiled.push(gi);
                }
                i += 1;
            }
            cur = boiled;
        }
    }
    let mut chain = StabilizerChain {
        field,
        d,
        base,
        sgs: Vec::new(),
        sgs_index: HashMap::new(),
        levels: Vec::new(),
        complete: false,
        config,
    };
    for g in all {
        chain.push_sgs(g)?;
    }
    chain.rebuild_levels()?;
    chain.complete = true;
    Ok(chain)
}
