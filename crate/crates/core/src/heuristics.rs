//! Base-point selection strategies that shrink orbits.
//!
//! Besides the natural choice from `new_base_point`, two heuristics are
//! available: inserting the line through a vector immediately before the
//! vector itself (so the projective action splits one big orbit into two
//! smaller ones), and choosing base points that are eigenvectors of as many
//! generators as possible.

use crate::gf::{FieldElement, ONE, ZERO};
use crate::matrix::{new_base_point, GroupMatrix, OrbitPoint, ProjectivePoint, RowVector};
use crate::{Error, Result};

/// Dimension cap for the characteristic-polynomial work; the heuristic is
/// meant to stay cheap relative to the main algorithm.
pub const EIGEN_DIM_CAP: usize = 8;

#[derive(Clone, Copy, PartialEq, Eq, Debug, Default)]
pub enum BaseStrategy {
    #[default]
    Natural,
    AlternatingProjective,
    Eigenvector,
}

impl std::str::FromStr for BaseStrategy {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "natural" => Ok(BaseStrategy::Natural),
            "projective" => Ok(BaseStrategy::AlternatingProjective),
            "eigen" => Ok(BaseStrategy::Eigenvector),
            other => Err(Error::Parse(format!("unknown base strategy '{other}'"))),
        }
    }
}

/// The (line, vector) pair for the alternating trick: the line precedes the
/// vector in the base, with the projective action at the line level.
pub fn alternating_base_points(v: &RowVector) -> Result<(ProjectivePoint, RowVector)> {
    Ok((ProjectivePoint::through(v)?, v.clone()))
}

/// Coefficients (ascending) of det(xI - A) over GF(q).
pub fn characteristic_polynomial(m: &GroupMatrix) -> Result<Vec<FieldElement>> {
    let d = m.dim();
    if d > EIGEN_DIM_CAP {
        return Err(Error::DimensionTooLarge(d, EIGEN_DIM_CAP));
    }
    let f = m.field().clone();
    let poly_add = |a: &[FieldElement], b: &[FieldElement]| -> Vec<FieldElement> {
        let n = a.len().max(b.len());
        (0..n)
            .map(|i| {
                f.add(
                    a.get(i).copied().unwrap_or(ZERO),
                    b.get(i).copied().unwrap_or(ZERO),
                )
            })
            .collect()
    };
    let poly_mul = |a: &[FieldElement], b: &[FieldElement]| -> Vec<FieldElement> {
        let mut out = vec![ZERO; a.len() + b.len() - 1];
        for (i, &ai) in a.iter().enumerate() {
            for (j, &bj) in b.iter().enumerate() {
                out[i + j] = f.add(out[i + j], f.mul(ai, bj));
            }
        }
        out
    };
    // entry (r, c) of xI - A as a degree <= 1 polynomial
    let entry = |r: usize, c: usize| -> Vec<FieldElement> {
        let lead = if r == c { ONE } else { ZERO };
        vec![f.neg(m.get(r, c)), lead]
    };
    // permutation-sum DP over columns; the state is the set of used rows
    let full = (1u32 << d) - 1;
    let mut table: Vec<Option<Vec<FieldElement>>> = vec![None; 1 << d];
    table[0] = Some(vec![ONE]);
    for mask in 0..full {
        let Some(acc) = table[mask as usize].clone() else {
            continue;
        };
        let col = mask.count_ones() as usize;
        for r in 0..d {
            if mask & (1 << r) != 0 {
                continue;
            }
            // parity from rows already used that are greater than r
            let inversions = (mask >> (r + 1)).count_ones();
            let mut term = poly_mul(&acc, &entry(r, col));
            if inversions % 2 == 1 {
                for t in term.iter_mut() {
                    *t = f.neg(*t);
                }
            }
            let next = mask | (1 << r);
            table[next as usize] = Some(match table[next as usize].take() {
                Some(cur) => poly_add(&cur, &term),
                None => term,
            });
        }
    }
    Ok(table[full as usize].take().expect("full mask reached"))
}

fn eval_poly(m: &GroupMatrix, coeffs: &[FieldElement], x: FieldElement) -> FieldElement {
    let f = m.field();
    let mut acc = ZERO;
    for &c in coeffs.iter().rev() {
        acc = f.add(f.mul(acc, x), c);
    }
    acc
}

/// Basis of the left null space of `m` (vectors v with v * m = 0), each
/// scaled so its first nonzero coordinate is 1.
fn left_null_space(m: &GroupMatrix) -> Vec<RowVector> {
    let d = m.dim();
    let f = m.field().clone();
    // row-reduce the transpose; its right null space is the left null space
    let t = m.transpose();
    let mut a: Vec<Vec<FieldElement>> = (0..d)
        .map(|i| (0..d).map(|j| t.get(i, j)).collect())
        .collect();
    let mut pivots: Vec<(usize, usize)> = Vec::new();
    let mut row = 0;
    for col in 0..d {
        let Some(p) = (row..d).find(|&i| a[i][col] != ZERO) else {
            continue;
        };
        a.swap(row, p);
        let pinv = f.inv(a[row][col]).expect("nonzero pivot");
        for e in a[row].iter_mut() {
            *e = f.mul(*e, pinv);
        }
        let pivot_row = a[row].clone();
        for (i, other) in a.iter_mut().enumerate() {
            if i != row && other[col] != ZERO {
                let factor = other[col];
                for (e, &s) in other.iter_mut().zip(&pivot_row) {
                    *e = f.sub(*e, f.mul(factor, s));
                }
            }
        }
        pivots.push((row, col));
        row += 1;
        if row == d {
            break;
        }
    }
    let pivot_cols: Vec<usize> = pivots.iter().map(|&(_, c)| c).collect();
    let mut basis = Vec::new();
    for free in (0..d).filter(|c| !pivot_cols.contains(c)) {
        let mut v = vec![ZERO; d];
        v[free] = ONE;
        for &(r, c) in &pivots {
            v[c] = f.neg(a[r][free]);
        }
        let rv = RowVector::new(m.field().clone(), v);
        if let Ok(line) = ProjectivePoint::through(&rv) {
            basis.push(line.rep().clone());
        }
    }
    basis
}

/// Little-endian numeric key: the first coordinate is least significant, so
/// e_1 sorts before every other unit vector.
fn vector_key(v: &RowVector) -> u128 {
    let q = v.field().q() as u128;
    v.coords()
        .iter()
        .rev()
        .fold(0u128, |acc, c| acc * q + c.0 as u128)
}

/// Best eigenvector base-point candidate, or `None` when no generator has an
/// eigenvalue in F_q. Candidates are scored by how many generators they are
/// an eigenvector of; ties break toward smaller eigenvalue order, then the
/// smaller vector key.
pub fn eigenvector_base_point(gens: &[GroupMatrix]) -> Result<Option<RowVector>> {
    let Some(first) = gens.first() else {
        return Ok(None);
    };
    let d = first.dim();
    if d > EIGEN_DIM_CAP {
        return Err(Error::DimensionTooLarge(d, EIGEN_DIM_CAP));
    }
    let f = first.field().clone();
    let mut candidates: Vec<(RowVector, FieldElement)> = Vec::new();
    for g in gens {
        let cp = characteristic_polynomial(g)?;
        for lambda in f.elements() {
            if eval_poly(g, &cp, lambda) != ZERO {
                continue;
            }
            // left null space of A - lambda I
            let mut shifted = g.clone();
            for i in 0..d {
                shifted.set(i, i, f.sub(g.get(i, i), lambda));
            }
            for v in left_null_space(&shifted) {
                if !candidates.iter().any(|(c, _)| c == &v) {
                    candidates.push((v, lambda));
                }
            }
        }
    }
    if candidates.is_empty() {
        return Ok(None);
    }
    let is_eigen = |v: &RowVector, g: &GroupMatrix| -> bool {
        let img = v.act(g);
        match (ProjectivePoint::through(v), ProjectivePoint::through(&img)) {
            (Ok(a), Ok(b)) => a == b,
            _ => false,
        }
    };
    candidates.sort_by_key(|(v, lambda)| {
        let score = gens.iter().filter(|g| is_eigen(v, g)).count();
        let order = f.order(*lambda).unwrap_or(u32::MAX);
        (std::cmp::Reverse(score), order, vector_key(v))
    });
    Ok(Some(candidates.remove(0).0))
}

/// Dispatch layer: turn a non-identity residue into the base point(s) the
/// chosen strategy appends to the base.
pub fn select_base_point(
    strategy: BaseStrategy,
    gens: &[GroupMatrix],
    residue: &GroupMatrix,
) -> Result<Vec<OrbitPoint>> {
    if residue.is_identity() {
        return Err(Error::IdentityMatrix);
    }
    let natural = new_base_point(residue)?;
    match strategy {
        BaseStrategy::Natural => Ok(vec![OrbitPoint::Vector(natural)]),
        BaseStrategy::AlternatingProjective => {
            let (line, v) = alternating_base_points(&natural)?;
            Ok(vec![OrbitPoint::Line(line), OrbitPoint::Vector(v)])
        }
        BaseStrategy::Eigenvector => {
            let candidate = match eigenvector_base_point(gens) {
                Ok(c) => c,
                Err(Error::DimensionTooLarge(..)) => None,
                Err(e) => return Err(e),
            };
            match candidate {
                Some(v) if v.act(residue) != v => Ok(vec![OrbitPoint::Vector(v)]),
                _ => Ok(vec![OrbitPoint::Vector(natural)]),
            }
        }
    }
}
