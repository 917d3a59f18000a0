//! Dense matrices over GF(q), the group-element type, and the two group
//! actions: the natural action on row vectors and the projective action on
//! lines. All actions are from the right, so `v^g = v * g` and
//! `(v^g)^h = v^(gh)`.

use std::cell::Cell;
use std::fmt;
use std::hash::{Hash, Hasher};

use rand::Rng;

use crate::gf::{Field, FieldElement, ONE, ZERO};
use crate::{Error, Result};

thread_local! {
    static MUL_COUNT: Cell<u64> = const { Cell::new(0) };
}

/// Matrix multiplications performed by this thread since the last reset.
pub fn mul_count() -> u64 {
    MUL_COUNT.with(|c| c.get())
}

pub fn reset_mul_count() {
    MUL_COUNT.with(|c| c.set(0));
}

/// Dense d x d matrix over GF(q), row-major. Invertibility is enforced at
/// group-construction boundaries, not per operation.
#[derive(Clone)]
pub struct GroupMatrix {
    field: Field,
    d: usize,
    entries: Vec<FieldElement>,
}

impl PartialEq for GroupMatrix {
    fn eq(&self, other: &Self) -> bool {
        self.d == other.d && self.entries == other.entries && self.field == other.field
    }
}
impl Eq for GroupMatrix {}

impl Hash for GroupMatrix {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.d.hash(state);
        for e in &self.entries {
            e.0.hash(state);
        }
    }
}

impl fmt::Debug for GroupMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<Vec<u32>> = (0..self.d)
            .map(|i| (0..self.d).map(|j| self.get(i, j).0).collect())
            .collect();
        write!(f, "{rows:?}")
    }
}

impl GroupMatrix {
    pub fn identity(field: Field, d: usize) -> Self {
        let mut entries = vec![ZERO; d * d];
        for i in 0..d {
            entries[i * d + i] = ONE;
        }
        GroupMatrix { field, d, entries }
    }

    pub fn from_rows(field: Field, rows: Vec<Vec<FieldElement>>) -> Self {
        let d = rows.len();
        let mut entries = Vec::with_capacity(d * d);
        for row in &rows {
            assert_eq!(row.len(), d, "matrix must be square");
            entries.extend_from_slice(row);
        }
        GroupMatrix { field, d, entries }
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn get(&self, i: usize, j: usize) -> FieldElement {
        self.entries[i * self.d + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: FieldElement) {
        self.entries[i * self.d + j] = v;
    }

    pub fn entries(&self) -> &[FieldElement] {
        &self.entries
    }

    pub fn is_identity(&self) -> bool {
        self.entries
            .iter()
            .enumerate()
            .all(|(k, &e)| e == if k / self.d == k % self.d { ONE } else { ZERO })
    }

    pub fn try_mul(&self, other: &GroupMatrix) -> Result<GroupMatrix> {
        if self.d != other.d {
            return Err(Error::DimensionMismatch(self.d, other.d));
        }
        Ok(self.mul(other))
    }

    /// Matrix product; dimensions and fields must agree.
    pub fn mul(&self, other: &GroupMatrix) -> GroupMatrix {
        debug_assert_eq!(self.d, other.d);
        debug_assert_eq!(self.field, other.field);
        MUL_COUNT.with(|c| c.set(c.get() + 1));
        let d = self.d;
        let f = &self.field;
        let mut entries = vec![ZERO; d * d];
        for i in 0..d {
            for k in 0..d {
                let a = self.entries[i * d + k];
                if a == ZERO {
                    continue;
                }
                for j in 0..d {
                    let b = other.entries[k * d + j];
                    if b != ZERO {
                        entries[i * d + j] = f.add(entries[i * d + j], f.mul(a, b));
                    }
                }
            }
        }
        GroupMatrix {
            field: self.field.clone(),
            d,
            entries,
        }
    }

    /// Inverse by Gauss-Jordan elimination.
    pub fn inv(&self) -> Result<GroupMatrix> {
        let d = self.d;
        let f = &self.field;
        let mut a = self.entries.clone();
        let mut b = GroupMatrix::identity(self.field.clone(), d).entries;
        for col in 0..d {
            let pivot = (col..d)
                .find(|&i| a[i * d + col] != ZERO)
                .ok_or(Error::SingularMatrix)?;
            if pivot != col {
                for j in 0..d {
                    a.swap(col * d + j, pivot * d + j);
                    b.swap(col * d + j, pivot * d + j);
                }
            }
            let pinv = f.inv(a[col * d + col])?;
            for j in 0..d {
                a[col * d + j] = f.mul(a[col * d + j], pinv);
                b[col * d + j] = f.mul(b[col * d + j], pinv);
            }
            for i in 0..d {
                if i == col {
                    continue;
                }
                let factor = a[i * d + col];
                if factor == ZERO {
                    continue;
                }
                for j in 0..d {
                    a[i * d + j] = f.sub(a[i * d + j], f.mul(factor, a[col * d + j]));
                    b[i * d + j] = f.sub(b[i * d + j], f.mul(factor, b[col * d + j]));
                }
            }
        }
        Ok(GroupMatrix {
            field: self.field.clone(),
            d,
            entries: b,
        })
    }

    pub fn determinant(&self) -> FieldElement {
        let d = self.d;
        let f = &self.field;
        let mut a = self.entries.clone();
        let mut det = ONE;
        for col in 0..d {
            let Some(pivot) = (col..d).find(|&i| a[i * d + col] != ZERO) else {
                return ZERO;
            };
            if pivot != col {
                for j in 0..d {
                    a.swap(col * d + j, pivot * d + j);
                }
                det = f.neg(det);
            }
            det = f.mul(det, a[col * d + col]);
            let pinv = f.inv(a[col * d + col]).expect("nonzero pivot");
            for i in col + 1..d {
                let factor = f.mul(a[i * d + col], pinv);
                if factor == ZERO {
                    continue;
                }
                for j in col..d {
                    a[i * d + j] = f.sub(a[i * d + j], f.mul(factor, a[col * d + j]));
                }
            }
        }
        det
    }

    pub fn transpose(&self) -> GroupMatrix {
        let d = self.d;
        let mut entries = vec![ZERO; d * d];
        for i in 0..d {
            for j in 0..d {
                entries[j * d + i] = self.entries[i * d + j];
            }
        }
        GroupMatrix {
            field: self.field.clone(),
            d,
            entries,
        }
    }
}

/// Row vector in F_q^d; the point type for the natural action.
#[derive(Clone)]
pub struct RowVector {
    field: Field,
    coords: Vec<FieldElement>,
}

impl PartialEq for RowVector {
    fn eq(&self, other: &Self) -> bool {
        self.coords == other.coords
    }
}
impl Eq for RowVector {}

impl Hash for RowVector {
    fn hash<H: Hasher>(&self, state: &mut H) {
        for c in &self.coords {
            c.0.hash(state);
        }
    }
}

impl fmt::Debug for RowVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cs: Vec<u32> = self.coords.iter().map(|c| c.0).collect();
        write!(f, "{cs:?}")
    }
}

impl RowVector {
    pub fn new(field: Field, coords: Vec<FieldElement>) -> Self {
        RowVector { field, coords }
    }

    /// Standard basis vector e_i (0-based).
    pub fn unit(field: Field, d: usize, i: usize) -> Self {
        let mut coords = vec![ZERO; d];
        coords[i] = ONE;
        RowVector { field, coords }
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[FieldElement] {
        &self.coords
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|&c| c == ZERO)
    }

    /// v * M, the natural right action.
    pub fn act(&self, m: &GroupMatrix) -> RowVector {
        debug_assert_eq!(self.coords.len(), m.d);
        let d = m.d;
        let f = &self.field;
        let mut out = vec![ZERO; d];
        for (i, &vi) in self.coords.iter().enumerate() {
            if vi == ZERO {
                continue;
            }
            for (j, o) in out.iter_mut().enumerate() {
                let e = m.entries[i * d + j];
                if e != ZERO {
                    *o = f.add(*o, f.mul(vi, e));
                }
            }
        }
        RowVector {
            field: self.field.clone(),
            coords: out,
        }
    }
}

/// One-dimensional subspace of F_q^d, stored via the canonical representative
/// whose first nonzero coordinate is 1.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ProjectivePoint {
    rep: RowVector,
}

impl fmt::Debug for ProjectivePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<{:?}>", self.rep)
    }
}

impl ProjectivePoint {
    /// Line through a nonzero vector.
    pub fn through(v: &RowVector) -> Result<ProjectivePoint> {
        let i = v
            .coords
            .iter()
            .position(|&c| c != ZERO)
            .ok_or(Error::ZeroVector)?;
        let f = v.field();
        let scale = f.inv(v.coords[i])?;
        let coords = v.coords.iter().map(|&c| f.mul(c, scale)).collect();
        Ok(ProjectivePoint {
            rep: RowVector::new(v.field.clone(), coords),
        })
    }

    pub fn rep(&self) -> &RowVector {
        &self.rep
    }

    /// Projective action: act on the representative, then re-canonicalize.
    pub fn act(&self, m: &GroupMatrix) -> ProjectivePoint {
        ProjectivePoint::through(&self.rep.act(m)).expect("image of a nonzero vector is nonzero")
    }
}

/// Point of either action, so one stabilizer chain can mix both.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum OrbitPoint {
    Vector(RowVector),
    Line(ProjectivePoint),
}

impl OrbitPoint {
    pub fn field(&self) -> &Field {
        match self {
            OrbitPoint::Vector(v) => v.field(),
            OrbitPoint::Line(l) => l.rep().field(),
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            OrbitPoint::Vector(v) => v.dim(),
            OrbitPoint::Line(l) => l.rep().dim(),
        }
    }

    pub fn apply(&self, m: &GroupMatrix) -> OrbitPoint {
        match self {
            OrbitPoint::Vector(v) => OrbitPoint::Vector(v.act(m)),
            OrbitPoint::Line(l) => OrbitPoint::Line(l.act(m)),
        }
    }

    pub fn is_fixed_by(&self, m: &GroupMatrix) -> bool {
        self.apply(m) == *self
    }
}

/// A row vector moved by the given non-identity matrix: e_i when some
/// off-diagonal entry of row i is nonzero, e_i + e_j for the first diagonal
/// pair with distinct entries, e_1 for a non-identity scalar matrix.
pub fn new_base_point(m: &GroupMatrix) -> Result<RowVector> {
    if m.is_identity() {
        return Err(Error::IdentityMatrix);
    }
    let d = m.dim();
    for i in 0..d {
        for j in 0..d {
            if i != j && m.get(i, j) != ZERO {
                return Ok(RowVector::unit(m.field.clone(), d, i));
            }
        }
    }
    for i in 0..d {
        for j in 0..d {
            if i != j && m.get(i, i) != m.get(j, j) {
                let mut v = RowVector::unit(m.field.clone(), d, i);
                v.coords[j] = ONE;
                return Ok(v);
            }
        }
    }
    Ok(RowVector::unit(m.field.clone(), d, 0))
}

/// Uniformly random entries, rejection-sampled until invertible.
pub fn random_invertible<R: Rng + ?Sized>(field: &Field, d: usize, rng: &mut R) -> GroupMatrix {
    loop {
        let entries = (0..d * d)
            .map(|_| FieldElement(rng.random_range(0..field.q())))
            .collect();
        let m = GroupMatrix {
            field: field.clone(),
            d,
            entries,
        };
        if m.determinant() != ZERO {
            return m;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::field_make;

    fn m(field: &Field, rows: &[&[u32]]) -> GroupMatrix {
        GroupMatrix::from_rows(
            field.clone(),
            rows.iter()
                .map(|r| r.iter().map(|&x| FieldElement(x)).collect())
                .collect(),
        )
    }

    fn v(field: &Field, coords: &[u32]) -> RowVector {
        RowVector::new(
            field.clone(),
            coords.iter().map(|&x| FieldElement(x)).collect(),
        )
    }

    #[test]
    fn mul_examples() {
        let f2 = field_make(2, 1).unwrap();
        let swap = m(&f2, &[&[0, 1], &[1, 0]]);
        assert!(swap.mul(&swap).is_identity());
        let id = GroupMatrix::identity(f2.clone(), 2);
        assert_eq!(id.mul(&swap), swap);

        let f3 = field_make(3, 1).unwrap();
        let a = m(&f3, &[&[1, 1], &[0, 1]]);
        let b = m(&f3, &[&[1, 2], &[0, 1]]);
        assert!(a.mul(&b).is_identity());
    }

    #[test]
    fn mul_dim_mismatch() {
        let f2 = field_make(2, 1).unwrap();
        let a = GroupMatrix::identity(f2.clone(), 2);
        let b = GroupMatrix::identity(f2.clone(), 3);
        assert!(matches!(a.try_mul(&b), Err(Error::DimensionMismatch(2, 3))));
    }

    #[test]
    fn inv_examples() {
        let f2 = field_make(2, 1).unwrap();
        let swap = m(&f2, &[&[0, 1], &[1, 0]]);
        assert_eq!(swap.inv().unwrap(), swap);

        let f5 = field_make(5, 1).unwrap();
        let a = m(&f5, &[&[2, 0], &[0, 1]]);
        assert_eq!(a.inv().unwrap(), m(&f5, &[&[3, 0], &[0, 1]]));

        let id = GroupMatrix::identity(f5.clone(), 3);
        assert_eq!(id.inv().unwrap(), id);

        let sing = m(&f5, &[&[1, 1], &[1, 1]]);
        assert!(matches!(sing.inv(), Err(Error::SingularMatrix)));
    }

    #[test]
    fn act_examples() {
        let f2 = field_make(2, 1).unwrap();
        let swap = m(&f2, &[&[0, 1], &[1, 0]]);
        assert_eq!(v(&f2, &[1, 0]).act(&swap), v(&f2, &[0, 1]));

        let f3 = field_make(3, 1).unwrap();
        let a = m(&f3, &[&[1, 1], &[0, 1]]);
        assert_eq!(v(&f3, &[1, 1]).act(&a), v(&f3, &[1, 2]));
    }

    #[test]
    fn projective_canonicalization() {
        let f3 = field_make(3, 1).unwrap();
        let l = ProjectivePoint::through(&v(&f3, &[0, 2, 1])).unwrap();
        assert_eq!(l.rep(), &v(&f3, &[0, 1, 2]));
        // idempotent
        let l2 = ProjectivePoint::through(l.rep()).unwrap();
        assert_eq!(l, l2);
        // scalar action absorbed on lines
        let scale = m(&f3, &[&[2, 0], &[0, 1]]);
        let line = ProjectivePoint::through(&v(&f3, &[1, 0])).unwrap();
        assert_eq!(line.act(&scale), line);
        assert!(ProjectivePoint::through(&v(&f3, &[0, 0])).is_err());
    }

    #[test]
    fn new_base_point_cases() {
        let f2 = field_make(2, 1).unwrap();
        let swap = m(&f2, &[&[0, 1], &[1, 0]]);
        assert_eq!(new_base_point(&swap).unwrap(), v(&f2, &[1, 0]));

        let f3 = field_make(3, 1).unwrap();
        let diag = m(&f3, &[&[1, 0], &[0, 2]]);
        assert_eq!(new_base_point(&diag).unwrap(), v(&f3, &[1, 1]));

        let scalar = m(&f3, &[&[2, 0], &[0, 2]]);
        assert_eq!(new_base_point(&scalar).unwrap(), v(&f3, &[1, 0]));

        let id = GroupMatrix::identity(f3.clone(), 2);
        assert!(matches!(new_base_point(&id), Err(Error::IdentityMatrix)));
    }

    #[test]
    fn new_base_point_is_moved() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for (p, r, d) in [(2u64, 1u32, 2usize), (3, 1, 3), (2, 2, 2), (5, 1, 4)] {
            let f = field_make(p, r).unwrap();
            for _ in 0..50 {
                let m = random_invertible(&f, d, &mut rng);
                if m.is_identity() {
                    continue;
                }
                let bp = new_base_point(&m).unwrap();
                assert_ne!(bp.act(&m), bp, "{m:?}");
            }
        }
    }

    #[test]
    fn random_invertible_distribution() {
        use rand::SeedableRng;
        let f2 = field_make(2, 1).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        // d=1 over GF(2): only invertible matrix is [[1]]
        for _ in 0..10 {
            assert!(random_invertible(&f2, 1, &mut rng).is_identity());
        }
        // d=2 over GF(2): all outputs among the 6 elements of GL(2,2)
        let mut seen = std::collections::HashSet::new();
        for _ in 0..200 {
            let m = random_invertible(&f2, 2, &mut rng);
            assert_ne!(m.determinant(), ZERO);
            seen.insert(m);
        }
        assert_eq!(seen.len(), 6);
    }

    #[test]
    fn mul_counter_counts() {
        let f2 = field_make(2, 1).unwrap();
        let a = GroupMatrix::identity(f2.clone(), 2);
        reset_mul_count();
        let _ = a.mul(&a);
        assert_eq!(mul_count(), 1);
    }
}
