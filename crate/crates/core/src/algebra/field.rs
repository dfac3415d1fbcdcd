//! Finite fields.
//!
//! [`FqField`] is a word-sized `F_{p^k}`; elements are packed as base-`p`
//! digit strings, digit `i` holding the coefficient of `t^i` modulo the
//! defining polynomial. [`ExtField`] adjoins a root of an irreducible
//! polynomial over any other finite field and is how fibers over closed
//! points of higher degree are computed.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt::Debug;
use core::hash::Hash;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use rand_core::RngCore;

use super::factor;
use super::poly::{CanonicalZero, Poly, PolyRing};
use crate::error::{Error, Result};

/// Operations shared by every finite field used in the crate.
pub trait FiniteField: Clone + Debug + PartialEq + Eq {
    type Elem: Clone + Debug + PartialEq + Eq + Ord + Hash + CanonicalZero;

    fn characteristic(&self) -> u64;
    /// Degree over the prime field.
    fn absolute_degree(&self) -> usize;
    /// Number of elements.
    fn order(&self) -> BigUint;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn is_zero(&self, a: &Self::Elem) -> bool {
        a.is_canonical_zero()
    }
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn inv(&self, a: &Self::Elem) -> Option<Self::Elem>;
    /// Image of an integer under the prime-field embedding.
    fn integer(&self, n: u64) -> Self::Elem;
    /// The unique `p`-th root.
    fn pth_root(&self, a: &Self::Elem) -> Self::Elem;
    fn random<R: RngCore>(&self, rng: &mut R) -> Self::Elem;
    /// Appends a canonical word encoding of `a`, used to key randomness.
    fn key_words(&self, a: &Self::Elem, out: &mut Vec<u64>);

    fn pow(&self, a: &Self::Elem, e: &BigUint) -> Self::Elem {
        let mut acc = self.one();
        for i in (0..e.bits()).rev() {
            acc = self.mul(&acc, &acc);
            if e.bit(i) {
                acc = self.mul(&acc, a);
            }
        }
        acc
    }

    fn div(&self, a: &Self::Elem, b: &Self::Elem) -> Option<Self::Elem> {
        self.inv(b).map(|bi| self.mul(a, &bi))
    }

    /// Product of two ascending coefficient slices, untrimmed.
    fn poly_mul(&self, a: &[Self::Elem], b: &[Self::Elem]) -> Vec<Self::Elem> {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut out = vec![self.zero(); a.len() + b.len() - 1];
        for (i, x) in a.iter().enumerate() {
            if self.is_zero(x) {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                let t = self.mul(x, y);
                out[i + j] = self.add(&out[i + j], &t);
            }
        }
        out
    }
}

fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut i = 2u64;
    while i * i <= p {
        if p.is_multiple_of(i) {
            return false;
        }
        i += 1;
    }
    true
}

fn mod_pow(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut acc = 1 % p;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    acc
}

/// The field `F_{p^k}` with `p < 2^31` and `p^k <= 2^62`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FqField {
    p: u64,
    k: usize,
    q: u64,
    /// Ascending coefficients of the monic defining polynomial, length `k + 1`.
    modulus: Vec<u64>,
}

impl FqField {
    /// The prime field `F_p`.
    pub fn prime(p: u64) -> Result<Self> {
        Self::new(p, 1)
    }

    /// `F_{p^k}` defined by the smallest monic irreducible of degree `k`,
    /// ordering candidates by their packed encoding.
    pub fn new(p: u64, k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::ZeroExtensionDegree);
        }
        if p >= 1 << 31 || !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        let q = u32::try_from(k)
            .ok()
            .and_then(|k32| p.checked_pow(k32))
            .filter(|&q| q <= 1 << 62)
            .ok_or(Error::FieldTooLarge { p, k })?;
        if k == 1 {
            return Ok(FqField { p, k, q, modulus: vec![0, 1] });
        }
        let base = FqField { p, k: 1, q: p, modulus: vec![0, 1] };
        let ring = PolyRing::new(&base);
        for code in 0..q {
            let mut coeffs = Vec::with_capacity(k + 1);
            let mut c = code;
            for _ in 0..k {
                coeffs.push(c % p);
                c /= p;
            }
            coeffs.push(1);
            if factor::is_irreducible(&ring, &ring.from_coeffs(coeffs.clone())) {
                return Ok(FqField { p, k, q, modulus: coeffs });
            }
        }
        unreachable!("irreducible polynomials exist in every degree")
    }

    /// `F_{p^k}` with a caller-supplied defining polynomial.
    pub fn with_modulus(p: u64, modulus: Vec<u64>) -> Result<Self> {
        let k = modulus.len().checked_sub(1).ok_or(Error::ZeroExtensionDegree)?;
        let mut field = Self::new(p, k.max(1))?;
        if k == 0 || modulus[k] != 1 || modulus.iter().any(|&c| c >= p) {
            return Err(Error::NotIrreducible(format!("{modulus:?}")));
        }
        let base = Self::prime(p)?;
        let ring = PolyRing::new(&base);
        if !factor::is_irreducible(&ring, &ring.from_coeffs(modulus.clone())) {
            return Err(Error::NotIrreducible(format!("{modulus:?}")));
        }
        if k > 1 {
            field.modulus = modulus;
        }
        Ok(field)
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn modulus(&self) -> &[u64] {
        &self.modulus
    }

    pub fn is_prime_field(&self) -> bool {
        self.k == 1
    }

    /// Checks that `a` encodes an element.
    pub fn element(&self, a: u64) -> Result<u64> {
        if a < self.q {
            Ok(a)
        } else {
            Err(Error::InvalidElement(a))
        }
    }

    /// Reduces a signed integer into the prime field.
    pub fn from_i64(&self, n: i64) -> u64 {
        n.rem_euclid(self.p as i64) as u64
    }

    /// Digit `i` of `a`, the coefficient of `t^i`.
    pub fn digit(&self, a: u64, i: usize) -> u64 {
        (a / self.p.pow(i as u32)) % self.p
    }

    pub fn digits(&self, mut a: u64) -> Vec<u64> {
        let mut out = Vec::with_capacity(self.k);
        for _ in 0..self.k {
            out.push(a % self.p);
            a /= self.p;
        }
        out
    }

    pub fn from_digits(&self, digits: &[u64]) -> u64 {
        digits.iter().rev().fold(0, |acc, &d| acc * self.p + d % self.p)
    }

    /// The generator `t` of the extension.
    pub fn generator(&self) -> u64 {
        if self.k == 1 {
            (self.p - self.modulus[0]) % self.p
        } else {
            self.p
        }
    }

    fn digit_op(&self, a: u64, b: u64, op: impl Fn(u64, u64) -> u64) -> u64 {
        let (mut a, mut b) = (a, b);
        let mut out = 0;
        let mut scale = 1;
        for _ in 0..self.k {
            out += op(a % self.p, b % self.p) * scale;
            a /= self.p;
            b /= self.p;
            scale = scale.wrapping_mul(self.p);
        }
        out
    }

    fn ext_mul(&self, a: u64, b: u64) -> u64 {
        let p = self.p;
        let k = self.k;
        let da = self.digits(a);
        let db = self.digits(b);
        let mut prod = vec![0u64; 2 * k - 1];
        for (i, &x) in da.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in db.iter().enumerate() {
                prod[i + j] = (prod[i + j] + x * y) % p;
            }
        }
        for i in (k..prod.len()).rev() {
            let c = prod[i];
            if c == 0 {
                continue;
            }
            for j in 0..k {
                prod[i - k + j] = (prod[i - k + j] + (p - self.modulus[j]) * c) % p;
            }
        }
        self.from_digits(&prod[..k])
    }
}

impl FiniteField for FqField {
    type Elem = u64;

    fn characteristic(&self) -> u64 {
        self.p
    }

    fn absolute_degree(&self) -> usize {
        self.k
    }

    fn order(&self) -> BigUint {
        BigUint::from(self.q)
    }

    fn zero(&self) -> u64 {
        0
    }

    fn one(&self) -> u64 {
        1
    }

    fn add(&self, a: &u64, b: &u64) -> u64 {
        if self.k == 1 {
            let s = a + b;
            if s >= self.p {
                s - self.p
            } else {
                s
            }
        } else {
            self.digit_op(*a, *b, |x, y| (x + y) % self.p)
        }
    }

    fn sub(&self, a: &u64, b: &u64) -> u64 {
        if self.k == 1 {
            if a >= b {
                a - b
            } else {
                a + self.p - b
            }
        } else {
            self.digit_op(*a, *b, |x, y| (x + self.p - y) % self.p)
        }
    }

    fn neg(&self, a: &u64) -> u64 {
        self.sub(&0, a)
    }

    fn mul(&self, a: &u64, b: &u64) -> u64 {
        if self.k == 1 {
            a * b % self.p
        } else {
            self.ext_mul(*a, *b)
        }
    }

    fn inv(&self, a: &u64) -> Option<u64> {
        if *a == 0 {
            return None;
        }
        if self.k == 1 {
            return Some(mod_pow(*a, self.p - 2, self.p));
        }
        Some(self.pow(a, &BigUint::from(self.q - 2)))
    }

    fn integer(&self, n: u64) -> u64 {
        n % self.p
    }

    fn pth_root(&self, a: &u64) -> u64 {
        if self.k == 1 {
            *a
        } else {
            self.pow(a, &BigUint::from(self.q / self.p))
        }
    }

    fn random<R: RngCore>(&self, rng: &mut R) -> u64 {
        let zone = u64::MAX - (u64::MAX % self.q) - 1;
        loop {
            let x = rng.next_u64();
            if x <= zone {
                return x % self.q;
            }
        }
    }

    fn key_words(&self, a: &u64, out: &mut Vec<u64>) {
        out.push(*a);
    }

    fn poly_mul(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        if self.k != 1 {
            let mut out = vec![0; a.len() + b.len() - 1];
            for (i, x) in a.iter().enumerate() {
                if *x == 0 {
                    continue;
                }
                for (j, y) in b.iter().enumerate() {
                    out[i + j] = self.add(&out[i + j], &self.ext_mul(*x, *y));
                }
            }
            return out;
        }
        prime_poly_mul(self.p, a, b)
    }
}

const KARATSUBA_CUTOFF: usize = 48;

fn prime_poly_mul(p: u64, a: &[u64], b: &[u64]) -> Vec<u64> {
    if a.len() >= KARATSUBA_CUTOFF && b.len() >= KARATSUBA_CUTOFF {
        return karatsuba(p, a, b);
    }
    schoolbook(p, a, b)
}

fn schoolbook(p: u64, a: &[u64], b: &[u64]) -> Vec<u64> {
    let n = a.len() + b.len() - 1;
    let sq = (p - 1) * (p - 1);
    let terms = a.len().min(b.len()) as u64;
    if sq == 0 || u64::MAX / sq.max(1) > terms {
        let mut acc = vec![0u64; n];
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                acc[i + j] += x * y;
            }
        }
        acc.iter_mut().for_each(|c| *c %= p);
        acc
    } else {
        let mut acc = vec![0u128; n];
        for (i, &x) in a.iter().enumerate() {
            for (j, &y) in b.iter().enumerate() {
                acc[i + j] += (x * y) as u128;
            }
        }
        acc.into_iter().map(|c| (c % p as u128) as u64).collect()
    }
}

fn karatsuba(p: u64, a: &[u64], b: &[u64]) -> Vec<u64> {
    let h = a.len().max(b.len()).div_ceil(2);
    let split = |x: &[u64]| -> (Vec<u64>, Vec<u64>) {
        if x.len() <= h {
            (x.to_vec(), Vec::new())
        } else {
            (x[..h].to_vec(), x[h..].to_vec())
        }
    };
    let (a0, a1) = split(a);
    let (b0, b1) = split(b);
    let mul = |x: &[u64], y: &[u64]| -> Vec<u64> {
        if x.is_empty() || y.is_empty() {
            Vec::new()
        } else {
            prime_poly_mul(p, x, y)
        }
    };
    let addv = |x: &[u64], y: &[u64]| -> Vec<u64> {
        let n = x.len().max(y.len());
        (0..n)
            .map(|i| (x.get(i).copied().unwrap_or(0) + y.get(i).copied().unwrap_or(0)) % p)
            .collect()
    };
    let z0 = mul(&a0, &b0);
    let z2 = mul(&a1, &b1);
    let z1 = mul(&addv(&a0, &a1), &addv(&b0, &b1));
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &c) in z0.iter().enumerate() {
        out[i] = (out[i] + c) % p;
    }
    for (i, &c) in z2.iter().enumerate() {
        out[i + 2 * h] = (out[i + 2 * h] + c) % p;
    }
    for (i, &c) in z1.iter().enumerate() {
        let lo = z0.get(i).copied().unwrap_or(0);
        let hi = z2.get(i).copied().unwrap_or(0);
        let mid = (c + 2 * p - lo - hi) % p;
        if mid != 0 {
            out[i + h] = (out[i + h] + mid) % p;
        }
    }
    out
}

/// `F[t]/(g)` for a monic irreducible `g` over a finite field `F`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtField<F: FiniteField> {
    base: F,
    modulus: Poly<F::Elem>,
    order: BigUint,
}

impl<F: FiniteField> ExtField<F> {
    /// Checks that `modulus` is monic irreducible of positive degree.
    pub fn new(base: F, modulus: Poly<F::Elem>) -> Result<Self> {
        let ok = {
            let ring = PolyRing::new(&base);
            modulus.leading() == Some(&base.one()) && factor::is_irreducible(&ring, &modulus)
        };
        if !ok {
            return Err(Error::NotIrreducible(format!("{:?}", modulus.coeffs())));
        }
        Ok(Self::new_trusted(base, modulus))
    }

    /// Skips the irreducibility check; `modulus` must be monic irreducible.
    pub fn new_trusted(base: F, modulus: Poly<F::Elem>) -> Self {
        debug_assert!(modulus.degree().is_some_and(|d| d >= 1));
        let order = base.order().pow(modulus.deg() as u32);
        ExtField { base, modulus, order }
    }

    pub fn base(&self) -> &F {
        &self.base
    }

    pub fn modulus(&self) -> &Poly<F::Elem> {
        &self.modulus
    }

    /// Degree over the base field.
    pub fn degree(&self) -> usize {
        self.modulus.deg()
    }

    pub fn ring(&self) -> PolyRing<'_, F> {
        PolyRing::new(&self.base)
    }

    /// The class of `t`.
    pub fn generator(&self) -> Poly<F::Elem> {
        let r = self.ring();
        r.rem(&r.x(), &self.modulus)
    }

    /// Embeds a base-field element.
    pub fn embed(&self, c: F::Elem) -> Poly<F::Elem> {
        self.ring().constant(c)
    }

    /// Reduces an arbitrary polynomial in `t`.
    pub fn reduce(&self, a: &Poly<F::Elem>) -> Poly<F::Elem> {
        self.ring().rem(a, &self.modulus)
    }

    /// Coordinates in the power basis, padded to the degree.
    pub fn to_vector(&self, a: &Poly<F::Elem>) -> Vec<F::Elem> {
        let n = self.degree();
        let mut v = a.coeffs().to_vec();
        v.resize(n, self.base.zero());
        v
    }
}

impl<F: FiniteField> FiniteField for ExtField<F> {
    type Elem = Poly<F::Elem>;

    fn characteristic(&self) -> u64 {
        self.base.characteristic()
    }

    fn absolute_degree(&self) -> usize {
        self.base.absolute_degree() * self.degree()
    }

    fn order(&self) -> BigUint {
        self.order.clone()
    }

    fn zero(&self) -> Self::Elem {
        Poly::zero()
    }

    fn one(&self) -> Self::Elem {
        self.ring().one()
    }

    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        self.ring().add(a, b)
    }

    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        self.ring().sub(a, b)
    }

    fn neg(&self, a: &Self::Elem) -> Self::Elem {
        self.ring().neg(a)
    }

    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        let r = self.ring();
        r.rem(&r.mul(a, b), &self.modulus)
    }

    fn inv(&self, a: &Self::Elem) -> Option<Self::Elem> {
        if a.is_zero() {
            return None;
        }
        self.ring().inv_mod(a, &self.modulus)
    }

    fn integer(&self, n: u64) -> Self::Elem {
        self.embed(self.base.integer(n))
    }

    fn pth_root(&self, a: &Self::Elem) -> Self::Elem {
        let e = &self.order / BigUint::from(self.characteristic());
        self.pow(a, &e)
    }

    fn random<R: RngCore>(&self, rng: &mut R) -> Self::Elem {
        let coeffs = (0..self.degree()).map(|_| self.base.random(rng)).collect();
        self.ring().from_coeffs(coeffs)
    }

    fn key_words(&self, a: &Self::Elem, out: &mut Vec<u64>) {
        out.push(a.len() as u64);
        for c in a.coeffs() {
            self.base.key_words(c, out);
        }
    }

    fn pow(&self, a: &Self::Elem, e: &BigUint) -> Self::Elem {
        if e.is_zero() {
            return self.one();
        }
        if e.is_one() {
            return a.clone();
        }
        self.ring().powmod(a, e, &self.modulus)
    }
}
