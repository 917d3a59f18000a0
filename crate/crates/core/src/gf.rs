//! Arithmetic in GF(p^r) for small prime powers.
//!
//! Elements are stored as integer indices: the polynomial `sum e_i x^i` is
//! encoded as `index = sum e_i p^i`. Index 0 is the additive identity and
//! index 1 the multiplicative identity. Fields are capped at `q <= 2^16` so
//! that log/antilog tables fit comfortably in memory; multiplication and
//! inversion are table lookups.

use std::fmt;
use std::sync::Arc;

use crate::{Error, Result};

/// Shared handle to an immutable field description.
pub type Field = Arc<FieldSpec>;

/// Element of GF(q), valid only together with the `FieldSpec` it came from.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct FieldElement(pub u32);

pub const ZERO: FieldElement = FieldElement(0);
pub const ONE: FieldElement = FieldElement(1);

/// Description of GF(p^r) plus the precomputed arithmetic tables.
pub struct FieldSpec {
    p: u32,
    r: u32,
    q: u32,
    /// Monic irreducible of degree r over GF(p), coefficients ascending.
    /// For r = 1 this is the canonical `x` and is unused.
    primitive_poly: Vec<u32>,
    /// log[a] for a in 1..q with respect to a fixed primitive element.
    log: Vec<u32>,
    /// antilog[k] = zeta^k for k in 0..q-1.
    antilog: Vec<u32>,
    /// Additive inverse table.
    neg: Vec<u32>,
}

impl PartialEq for FieldSpec {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.r == other.r && self.primitive_poly == other.primitive_poly
    }
}
impl Eq for FieldSpec {}

impl fmt::Debug for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF({}^{})", self.p, self.r)
    }
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Construct GF(p^r) with the lexicographically least monic irreducible
/// polynomial of degree r (coefficient lists compared low-to-high).
pub fn field_make(p: u64, r: u32) -> Result<Field> {
    if !is_prime(p) {
        return Err(Error::NonPrimeCharacteristic(p));
    }
    if r < 1 {
        return Err(Error::FieldTooLarge { p, r });
    }
    let mut q: u64 = 1;
    for _ in 0..r {
        q = q.saturating_mul(p);
        if q > 1 << 16 {
            return Err(Error::FieldTooLarge { p, r });
        }
    }
    let p = p as u32;
    let q = q as u32;
    let poly = if r == 1 {
        vec![0, 1]
    } else {
        least_irreducible(p, r)
    };
    let mut spec = FieldSpec {
        p,
        r,
        q,
        primitive_poly: poly,
        log: Vec::new(),
        antilog: Vec::new(),
        neg: Vec::new(),
    };
    spec.build_tables();
    Ok(Arc::new(spec))
}

/// Multiply polynomials over GF(p), coefficients ascending.
fn poly_mul(p: u32, a: &[u32], b: &[u32]) -> Vec<u32> {
    let mut out = vec![0u32; a.len() + b.len() - 1];
    for (i, &ai) in a.iter().enumerate() {
        for (j, &bj) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + ai * bj) % p;
        }
    }
    out
}

/// Remainder of a modulo the monic polynomial m, over GF(p).
fn poly_rem(p: u32, a: &[u32], m: &[u32]) -> Vec<u32> {
    let mut a = a.to_vec();
    let deg_m = m.len() - 1;
    while a.len() > deg_m {
        let lead = *a.last().unwrap();
        let k = a.len() - 1 - deg_m;
        if lead != 0 {
            for (i, &mi) in m.iter().enumerate() {
                a[k + i] = (a[k + i] + lead * (p - mi) % p) % p;
            }
        }
        a.pop();
    }
    while a.len() > 1 && *a.last().unwrap() == 0 {
        a.pop();
    }
    a
}

fn is_zero_poly(a: &[u32]) -> bool {
    a.iter().all(|&c| c == 0)
}

/// Irreducibility by trial division against all monic polynomials of degree
/// at most r/2.
fn is_irreducible(p: u32, poly: &[u32]) -> bool {
    let r = poly.len() - 1;
    for deg in 1..=(r / 2) {
        // enumerate monic divisor candidates of this degree
        let count = (p as u64).pow(deg as u32);
        for idx in 0..count {
            let mut cand = Vec::with_capacity(deg + 1);
            let mut n = idx;
            for _ in 0..deg {
                cand.push((n % p as u64) as u32);
                n /= p as u64;
            }
            cand.push(1);
            if is_zero_poly(&poly_rem(p, poly, &cand)) {
                return false;
            }
        }
    }
    true
}

/// Lexicographically least monic irreducible of degree r over GF(p),
/// comparing coefficient lists position by position from the constant term.
fn least_irreducible(p: u32, r: u32) -> Vec<u32> {
    let r = r as usize;
    let mut coeffs = vec![0u32; r];
    loop {
        let mut poly = coeffs.clone();
        poly.push(1);
        if is_irreducible(p, &poly) {
            return poly;
        }
        // lex order: the last coefficient varies fastest
        let mut i = r;
        loop {
            if i == 0 {
                unreachable!("no irreducible polynomial of degree {r} over GF({p})");
            }
            i -= 1;
            coeffs[i] += 1;
            if coeffs[i] < p {
                break;
            }
            coeffs[i] = 0;
        }
    }
}

fn prime_factors(mut n: u32) -> Vec<u32> {
    let mut fs = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            fs.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        fs.push(n);
    }
    fs
}

impl FieldSpec {
    fn digits(&self, a: u32) -> Vec<u32> {
        let mut ds = vec![0u32; self.r as usize];
        let mut n = a;
        for d in ds.iter_mut() {
            *d = n % self.p;
            n /= self.p;
        }
        ds
    }

    fn pack_digits(&self, ds: &[u32]) -> u32 {
        let mut acc = 0u32;
        for &d in ds.iter().rev() {
            acc = acc * self.p + d % self.p;
        }
        acc
    }

    fn mul_slow(&self, a: u32, b: u32) -> u32 {
        if self.r == 1 {
            return ((a as u64 * b as u64) % self.p as u64) as u32;
        }
        let prod = poly_mul(self.p, &self.digits(a), &self.digits(b));
        let rem = poly_rem(self.p, &prod, &self.primitive_poly);
        self.pack_digits(&rem)
    }

    fn pow_slow(&self, mut a: u32, mut e: u32) -> u32 {
        let mut acc = 1u32;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul_slow(acc, a);
            }
            a = self.mul_slow(a, a);
            e >>= 1;
        }
        acc
    }

    fn build_tables(&mut self) {
        let q = self.q;
        // negation is digitwise
        self.neg = (0..q)
            .map(|a| {
                let ds: Vec<u32> = self
                    .digits(a)
                    .iter()
                    .map(|&d| (self.p - d) % self.p)
                    .collect();
                self.pack_digits(&ds)
            })
            .collect();
        // find a primitive element: least index of multiplicative order q - 1
        let factors = prime_factors(q - 1);
        let zeta = (1..q)
            .find(|&a| factors.iter().all(|&f| self.pow_slow(a, (q - 1) / f) != 1))
            .expect("multiplicative group of a finite field is cyclic");
        self.antilog = Vec::with_capacity((q - 1) as usize);
        self.log = vec![0u32; q as usize];
        let mut acc = 1u32;
        for k in 0..q - 1 {
            self.antilog.push(acc);
            self.log[acc as usize] = k;
            acc = self.mul_slow(acc, zeta);
        }
        debug_assert_eq!(acc, 1);
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn r(&self) -> u32 {
        self.r
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn primitive_poly(&self) -> &[u32] {
        &self.primitive_poly
    }

    /// A fixed primitive element (generator of the multiplicative group).
    pub fn primitive_element(&self) -> FieldElement {
        FieldElement(self.antilog[if self.q > 2 { 1 } else { 0 }])
    }

    /// Checked construction of an element from its index.
    pub fn element(&self, index: u32) -> Option<FieldElement> {
        (index < self.q).then_some(FieldElement(index))
    }

    pub fn add(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        if self.p == 2 {
            return FieldElement(a.0 ^ b.0);
        }
        if self.r == 1 {
            return FieldElement((a.0 + b.0) % self.p);
        }
        let da = self.digits(a.0);
        let db = self.digits(b.0);
        let ds: Vec<u32> = da
            .iter()
            .zip(&db)
            .map(|(&x, &y)| (x + y) % self.p)
            .collect();
        FieldElement(self.pack_digits(&ds))
    }

    pub fn neg(&self, a: FieldElement) -> FieldElement {
        FieldElement(self.neg[a.0 as usize])
    }

    pub fn sub(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        if a.0 == 0 || b.0 == 0 {
            return ZERO;
        }
        let k = self.log[a.0 as usize] + self.log[b.0 as usize];
        let k = if k >= self.q - 1 { k - (self.q - 1) } else { k };
        FieldElement(self.antilog[k as usize])
    }

    pub fn inv(&self, a: FieldElement) -> Result<FieldElement> {
        if a.0 == 0 {
            return Err(Error::DivisionByZero(self.q));
        }
        let k = (self.q - 1 - self.log[a.0 as usize]) % (self.q - 1);
        Ok(FieldElement(self.antilog[k as usize]))
    }

    pub fn pow(&self, a: FieldElement, e: u64) -> FieldElement {
        if a.0 == 0 {
            return if e == 0 { ONE } else { ZERO };
        }
        let k = (self.log[a.0 as usize] as u64 * (e % (self.q as u64 - 1))) % (self.q as u64 - 1);
        FieldElement(self.antilog[k as usize])
    }

    /// Multiplicative order of a nonzero element.
    pub fn order(&self, a: FieldElement) -> Result<u32> {
        if a.0 == 0 {
            return Err(Error::DivisionByZero(self.q));
        }
        let k = self.log[a.0 as usize];
        let n = self.q - 1;
        Ok(n / gcd(n, k))
    }

    pub fn elements(&self) -> impl Iterator<Item = FieldElement> {
        (0..self.q).map(FieldElement)
    }
}

fn gcd(a: u32, b: u32) -> u32 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}
