//! Product replacement random elements and the probabilistic chain
//! construction with the consecutive-trivial-sift stopping rule.

use rand::Rng;

use crate::chain::{ChainConfig, SiftResult, StabilizerChain};
use crate::gf::Field;
use crate::heuristics::select_base_point;
use crate::matrix::GroupMatrix;
use crate::{Error, Result};

/// Slot vector for the product replacement walk. Every slot stays inside
/// the generated group.
#[derive(Clone)]
pub struct ShakeState {
    slots: Vec<GroupMatrix>,
}

pub const SHAKE_MIN_SLOTS: usize = 10;
pub const SHAKE_DEFAULT_BURN_IN: usize = 60;

/// Slot count for n generators: max(10, 2n + 1).
pub fn shake_slot_count(n: usize) -> usize {
    SHAKE_MIN_SLOTS.max(2 * n + 1)
}

/// Seed the slots with the non-identity generators padded with identity,
/// then discard `burn_in` outputs to mix the state.
pub fn shake_init<R: Rng + ?Sized>(
    gens: &[GroupMatrix],
    m: Option<usize>,
    burn_in: Option<usize>,
    rng: &mut R,
) -> Result<ShakeState> {
    let gens: Vec<GroupMatrix> = gens.iter().filter(|g| !g.is_identity()).cloned().collect();
    let Some(first) = gens.first() else {
        return Err(Error::NoGenerators);
    };
    let m = m.unwrap_or_else(|| shake_slot_count(gens.len())).max(2);
    let id = GroupMatrix::identity(first.field().clone(), first.dim());
    let mut slots = gens;
    slots.resize(m, id);
    let mut state = ShakeState { slots };
    for _ in 0..burn_in.unwrap_or(SHAKE_DEFAULT_BURN_IN) {
        shake_next(&mut state, rng);
    }
    Ok(state)
}

impl ShakeState {
    pub fn slots(&self) -> &[GroupMatrix] {
        &self.slots
    }
}

/// One product replacement step: pick distinct slots i != j, replace a_i by
/// a_i * a_j or a_j * a_i with equal probability, and return it.
pub fn shake_next<R: Rng + ?Sized>(state: &mut ShakeState, rng: &mut R) -> GroupMatrix {
    let m = state.slots.len();
    let i = rng.random_range(0..m);
    let mut j = rng.random_range(0..m - 1);
    if j >= i {
        j += 1;
    }
    let b = if rng.random_bool(0.5) {
        state.slots[i].mul(&state.slots[j])
    } else {
        state.slots[j].mul(&state.slots[i])
    };
    state.slots[i] = b.clone();
    b
}

#[derive(Clone, Copy, Debug)]
pub struct RandomParams {
    /// Stop after this many consecutive trivial sifts (error bound 2^-m).
    pub stop_after: usize,
    /// Add the sampled element itself instead of its sift residue.
    pub add_literal_element: bool,
}

impl Default for RandomParams {
    fn default() -> Self {
        RandomParams {
            stop_after: 20,
            add_literal_element: false,
        }
    }
}

/// Probabilistic chain construction: sift random elements, adjoin whatever
/// does not strip to identity, and stop after `stop_after` consecutive
/// trivial sifts. The returned chain is probably but not certainly complete;
/// its complete flag is left unset (except for the trivial group) until a
/// verification pass confirms it.
pub fn random_schreier_sims<R: Rng + ?Sized>(
    field: Field,
    d: usize,
    gens: &[GroupMatrix],
    config: ChainConfig,
    params: RandomParams,
    rng: &mut R,
) -> Result<StabilizerChain> {
    random_schreier_sims_observed(field, d, gens, config, params, rng, |_| {})
}

/// Same construction with a callback invoked on the initial chain and after
/// every generator addition, for recording intermediate states.
pub fn random_schreier_sims_observed<R, F>(
    field: Field,
    d: usize,
    gens: &[GroupMatrix],
    config: ChainConfig,
    params: RandomParams,
    rng: &mut R,
    mut observer: F,
) -> Result<StabilizerChain>
where
    R: Rng + ?Sized,
    F: FnMut(&StabilizerChain),
{
    let mut chain = StabilizerChain::from_generators(field, d, gens, &[], config)?;
    observer(&chain);
    if chain.sgs.is_empty() {
        // trivial group: every sift is trivial
        return Ok(chain);
    }
    let mut shake = shake_init(&chain.sgs.clone(), None, None, rng)?;
    let mut sifts = 0usize;
    while sifts < params.stop_after.max(1) {
        let element = shake_next(&mut shake, rng);
        let SiftResult {
            residue,
            dropout: _,
        } = chain.sift(&element)?;
        if residue.is_identity() {
            sifts += 1;
            continue;
        }
        sifts = 0;
        let to_add = if params.add_literal_element {
            element
        } else {
            residue.clone()
        };
        // the residue is what provably moves no current base point; when the
        // added element does not, the base must still gain a point the
        // residue moves, or the chain could never absorb it
        if !chain.base.iter().all(|p| p.is_fixed_by(&to_add))
            && chain.base.iter().all(|p| p.is_fixed_by(&residue))
        {
            let pts = select_base_point(chain.config.base_strategy, &chain.sgs, &residue)?;
            chain.base.extend(pts);
            chain.ensure_levels()?;
        }
        chain.add_generator(&to_add)?;
        observer(&chain);
    }
    Ok(chain)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::{field_make, FieldElement};
    use crate::oracle;
    use num_bigint::BigUint;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn m(field: &Field, rows: &[&[u32]]) -> GroupMatrix {
        GroupMatrix::from_rows(
            field.clone(),
            rows.iter()
                .map(|r| r.iter().map(|&x| FieldElement(x)).collect())
                .collect(),
        )
    }

    fn gl23(field: &Field) -> Vec<GroupMatrix> {
        vec![m(field, &[&[2, 0], &[0, 1]]), m(field, &[&[2, 1], &[2, 0]])]
    }

    #[test]
    fn slot_count_formula() {
        assert_eq!(shake_slot_count(1), 10);
        assert_eq!(shake_slot_count(4), 10);
        assert_eq!(shake_slot_count(5), 11);
        assert_eq!(shake_slot_count(6), 13);
    }

    #[test]
    fn init_rejects_trivial_input() {
        let f2 = field_make(2, 1).unwrap();
        let id = GroupMatrix::identity(f2.clone(), 2);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(matches!(
            shake_init(&[], None, None, &mut rng),
            Err(Error::NoGenerators)
        ));
        assert!(matches!(
            shake_init(&[id], None, None, &mut rng),
            Err(Error::NoGenerators)
        ));
    }

    #[test]
    fn slots_stay_in_group() {
        let f3 = field_make(3, 1).unwrap();
        let gens = gl23(&f3);
        let mut closed = gens.clone();
        for g in &gens {
            closed.push(g.inv().unwrap());
        }
        let group = oracle::closure(&closed, 1000).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut state = shake_init(&gens, None, None, &mut rng).unwrap();
        assert_eq!(state.slots().len(), 10);
        for s in state.slots() {
            assert!(group.contains(s));
        }
        for _ in 0..200 {
            let g = shake_next(&mut state, &mut rng);
            assert!(group.contains(&g));
        }
    }

    #[test]
    fn shake_covers_small_group() {
        let f2 = field_make(2, 1).unwrap();
        let gens = vec![m(&f2, &[&[0, 1], &[1, 0]]), m(&f2, &[&[1, 1], &[0, 1]])];
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let mut state = shake_init(&gens, None, None, &mut rng).unwrap();
        let mut seen = std::collections::HashSet::new();
        for _ in 0..10_000 {
            seen.insert(shake_next(&mut state, &mut rng));
        }
        assert_eq!(seen.len(), 6);
    }

    #[test]
    fn random_chain_reaches_oracle_order() {
        let f3 = field_make(3, 1).unwrap();
        for seed in [1u64, 2, 3, 4, 5] {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut chain = random_schreier_sims(
                f3.clone(),
                2,
                &gl23(&f3),
                ChainConfig::default(),
                RandomParams::default(),
                &mut rng,
            )
            .unwrap();
            chain.schreier_sims().unwrap();
            assert_eq!(
                chain.group_order().unwrap(),
                BigUint::from(48u32),
                "seed {seed}"
            );
        }
    }

    #[test]
    fn literal_element_mode_agrees() {
        let f3 = field_make(3, 1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let params = RandomParams {
            add_literal_element: true,
            ..RandomParams::default()
        };
        let mut chain = random_schreier_sims(
            f3.clone(),
            2,
            &gl23(&f3),
            ChainConfig::default(),
            params,
            &mut rng,
        )
        .unwrap();
        chain.schreier_sims().unwrap();
        assert_eq!(chain.group_order().unwrap(), BigUint::from(48u32));
    }

    #[test]
    fn deterministic_under_fixed_seed() {
        let f3 = field_make(3, 1).unwrap();
        let run = || {
            let mut rng = ChaCha8Rng::seed_from_u64(42);
            random_schreier_sims(
                f3.clone(),
                2,
                &gl23(&f3),
                ChainConfig::default(),
                RandomParams::default(),
                &mut rng,
            )
            .unwrap()
        };
        let a = run();
        let b = run();
        assert_eq!(a.base, b.base);
        assert_eq!(a.sgs, b.sgs);
        assert_eq!(a.orbit_sizes(), b.orbit_sizes());
    }

    #[test]
    fn snapshot_orbit_products_divide_order() {
        let f3 = field_make(3, 1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut products = Vec::new();
        random_schreier_sims_observed(
            f3.clone(),
            2,
            &gl23(&f3),
            ChainConfig::default(),
            RandomParams::default(),
            &mut rng,
            |chain| products.push(chain.product_of_orbits()),
        )
        .unwrap();
        let order = BigUint::from(48u32);
        assert!(!products.is_empty());
        for p in products {
            assert_eq!(&order % &p, BigUint::from(0u32));
        }
    }

    #[test]
    fn trivial_group_stops_immediately() {
        let f2 = field_make(2, 1).unwrap();
        let id = GroupMatrix::identity(f2.clone(), 2);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let chain = random_schreier_sims(
            f2.clone(),
            2,
            &[id],
            ChainConfig::default(),
            RandomParams::default(),
            &mut rng,
        )
        .unwrap();
        assert!(chain.base.is_empty());
        assert_eq!(chain.group_order().unwrap(), BigUint::from(1u32));
    }
}
