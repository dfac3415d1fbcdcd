//! Dense univariate polynomials over a [`FiniteField`].
//!
//! Coefficients are stored in ascending order and are always trimmed: the
//! highest stored coefficient is nonzero, and the zero polynomial has no
//! coefficients at all. Arithmetic lives on [`PolyRing`], a borrowed view of
//! the coefficient field.

use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use num_bigint::BigUint;

use super::field::FiniteField;

/// Values with a canonical zero that can be recognized without a field.
pub trait CanonicalZero {
    fn is_canonical_zero(&self) -> bool;
}

impl CanonicalZero for u64 {
    fn is_canonical_zero(&self) -> bool {
        *self == 0
    }
}

impl<T> CanonicalZero for Poly<T> {
    fn is_canonical_zero(&self) -> bool {
        self.coeffs.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Poly<T> {
    coeffs: Vec<T>,
}

impl<T: CanonicalZero> Poly<T> {
    /// Builds a polynomial from ascending coefficients, trimming zeros.
    pub fn new(mut coeffs: Vec<T>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_canonical_zero()) {
            coeffs.pop();
        }
        Poly { coeffs }
    }
}

impl<T> Poly<T> {
    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, with `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Degree with the zero polynomial mapped to 0.
    pub fn deg(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<T> {
        self.coeffs
    }

    pub fn coeff(&self, i: usize) -> Option<&T> {
        self.coeffs.get(i)
    }

    pub fn leading(&self) -> Option<&T> {
        self.coeffs.last()
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }
}

impl<T: Ord> PartialOrd for Poly<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Canonical order: by degree, then coefficients from the top down.
impl<T: Ord> Ord for Poly<T> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.coeffs
            .len()
            .cmp(&other.coeffs.len())
            .then_with(|| self.coeffs.iter().rev().cmp(other.coeffs.iter().rev()))
    }
}

/// Polynomial arithmetic over a borrowed coefficient field.
#[derive(Debug)]
pub struct PolyRing<'a, F: FiniteField> {
    pub field: &'a F,
}

impl<F: FiniteField> Clone for PolyRing<'_, F> {
    fn clone(&self) -> Self {
        *self
    }
}

impl<F: FiniteField> Copy for PolyRing<'_, F> {}

type P<F> = Poly<<F as FiniteField>::Elem>;

impl<'a, F: FiniteField> PolyRing<'a, F> {
    pub fn new(field: &'a F) -> Self {
        PolyRing { field }
    }

    pub fn from_coeffs(&self, coeffs: Vec<F::Elem>) -> P<F> {
        let mut coeffs = coeffs;
        while coeffs.last().is_some_and(|c| self.field.is_zero(c)) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn constant(&self, c: F::Elem) -> P<F> {
        self.from_coeffs(vec![c])
    }

    pub fn one(&self) -> P<F> {
        self.constant(self.field.one())
    }

    /// The monomial `c * z^n`.
    pub fn monomial(&self, c: F::Elem, n: usize) -> P<F> {
        if self.field.is_zero(&c) {
            return Poly::zero();
        }
        let mut coeffs = vec![self.field.zero(); n + 1];
        coeffs[n] = c;
        Poly { coeffs }
    }

    pub fn x(&self) -> P<F> {
        self.monomial(self.field.one(), 1)
    }

    /// `z - c`.
    pub fn linear(&self, c: &F::Elem) -> P<F> {
        Poly { coeffs: vec![self.field.neg(c), self.field.one()] }
    }

    pub fn is_one(&self, a: &P<F>) -> bool {
        a.coeffs.len() == 1 && a.coeffs[0] == self.field.one()
    }

    pub fn coeff_or_zero(&self, a: &P<F>, i: usize) -> F::Elem {
        a.coeffs.get(i).cloned().unwrap_or_else(|| self.field.zero())
    }

    pub fn add(&self, a: &P<F>, b: &P<F>) -> P<F> {
        let f = self.field;
        let n = a.coeffs.len().max(b.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            out.push(match (a.coeffs.get(i), b.coeffs.get(i)) {
                (Some(x), Some(y)) => f.add(x, y),
                (Some(x), None) => x.clone(),
                (None, Some(y)) => y.clone(),
                (None, None) => unreachable!(),
            });
        }
        self.from_coeffs(out)
    }

    pub fn neg(&self, a: &P<F>) -> P<F> {
        Poly { coeffs: a.coeffs.iter().map(|c| self.field.neg(c)).collect() }
    }

    pub fn sub(&self, a: &P<F>, b: &P<F>) -> P<F> {
        let f = self.field;
        let n = a.coeffs.len().max(b.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            out.push(match (a.coeffs.get(i), b.coeffs.get(i)) {
                (Some(x), Some(y)) => f.sub(x, y),
                (Some(x), None) => x.clone(),
                (None, Some(y)) => f.neg(y),
                (None, None) => unreachable!(),
            });
        }
        self.from_coeffs(out)
    }

    pub fn scale(&self, a: &P<F>, c: &F::Elem) -> P<F> {
        if self.field.is_zero(c) {
            return Poly::zero();
        }
        Poly { coeffs: a.coeffs.iter().map(|x| self.field.mul(x, c)).collect() }
    }

    /// Multiplies by `z^n`.
    pub fn shift(&self, a: &P<F>, n: usize) -> P<F> {
        if a.is_zero() {
            return Poly::zero();
        }
        let mut coeffs = vec![self.field.zero(); n];
        coeffs.extend(a.coeffs.iter().cloned());
        Poly { coeffs }
    }

    pub fn mul(&self, a: &P<F>, b: &P<F>) -> P<F> {
        if a.is_zero() || b.is_zero() {
            return Poly::zero();
        }
        self.from_coeffs(self.field.poly_mul(&a.coeffs, &b.coeffs))
    }

    pub fn pow(&self, a: &P<F>, mut e: u64) -> P<F> {
        let mut base = a.clone();
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            e >>= 1;
            if e > 0 {
                base = self.mul(&base, &base);
            }
        }
        acc
    }

    /// Euclidean division. Panics if `b` is zero.
    pub fn divrem(&self, a: &P<F>, b: &P<F>) -> (P<F>, P<F>) {
        let f = self.field;
        let db = b.degree().expect("division by the zero polynomial");
        if a.coeffs.len() <= db {
            return (Poly::zero(), a.clone());
        }
        let lead_inv = f.inv(b.leading().unwrap()).unwrap();
        let mut rem = a.coeffs.clone();
        let mut quot = vec![f.zero(); a.coeffs.len() - db];
        for i in (0..quot.len()).rev() {
            let top = &rem[i + db];
            if f.is_zero(top) {
                continue;
            }
            let c = f.mul(top, &lead_inv);
            for (j, bc) in b.coeffs.iter().enumerate() {
                let t = f.mul(&c, bc);
                rem[i + j] = f.sub(&rem[i + j], &t);
            }
            quot[i] = c;
        }
        rem.truncate(db);
        (self.from_coeffs(quot), self.from_coeffs(rem))
    }

    pub fn rem(&self, a: &P<F>, b: &P<F>) -> P<F> {
        let f = self.field;
        let db = b.degree().expect("division by the zero polynomial");
        if a.coeffs.len() <= db {
            return a.clone();
        }
        let lead_inv = f.inv(b.leading().unwrap()).unwrap();
        let mut rem = a.coeffs.clone();
        for i in (0..a.coeffs.len() - db).rev() {
            let top = &rem[i + db];
            if f.is_zero(top) {
                continue;
            }
            let c = f.mul(top, &lead_inv);
            for (j, bc) in b.coeffs.iter().enumerate() {
                let t = f.mul(&c, bc);
                rem[i + j] = f.sub(&rem[i + j], &t);
            }
        }
        rem.truncate(db);
        self.from_coeffs(rem)
    }

    /// Exact quotient; debug-asserts that the remainder vanishes.
    pub fn div_exact(&self, a: &P<F>, b: &P<F>) -> P<F> {
        let (q, r) = self.divrem(a, b);
        debug_assert!(r.is_zero(), "inexact polynomial division");
        q
    }

    /// Whether `d | a`; zero divides only zero.
    pub fn divides(&self, d: &P<F>, a: &P<F>) -> bool {
        if d.is_zero() {
            return a.is_zero();
        }
        self.rem(a, d).is_zero()
    }

    /// Scales to a monic polynomial; the zero polynomial is returned as is.
    pub fn monic(&self, a: &P<F>) -> P<F> {
        match a.leading() {
            None => Poly::zero(),
            Some(lc) => {
                let inv = self.field.inv(lc).unwrap();
                self.scale(a, &inv)
            }
        }
    }

    /// Monic greatest common divisor; `gcd(0, 0) = 0`.
    pub fn gcd(&self, a: &P<F>, b: &P<F>) -> P<F> {
        let mut x = a.clone();
        let mut y = b.clone();
        while !y.is_zero() {
            let r = self.rem(&x, &y);
            x = y;
            y = r;
        }
        self.monic(&x)
    }

    /// Extended gcd: returns `(g, s, t)` with `s*a + t*b = g`, `g` monic.
    pub fn xgcd(&self, a: &P<F>, b: &P<F>) -> (P<F>, P<F>, P<F>) {
        let (mut r0, mut r1) = (a.clone(), b.clone());
        let (mut s0, mut s1) = (self.one(), Poly::zero());
        let (mut t0, mut t1) = (Poly::zero(), self.one());
        while !r1.is_zero() {
            let (q, r) = self.divrem(&r0, &r1);
            let s2 = self.sub(&s0, &self.mul(&q, &s1));
            let t2 = self.sub(&t0, &self.mul(&q, &t1));
            r0 = core::mem::replace(&mut r1, r);
            s0 = core::mem::replace(&mut s1, s2);
            t0 = core::mem::replace(&mut t1, t2);
        }
        match r0.leading() {
            None => (r0, s0, t0),
            Some(lc) => {
                let inv = self.field.inv(lc).unwrap();
                (self.scale(&r0, &inv), self.scale(&s0, &inv), self.scale(&t0, &inv))
            }
        }
    }

    /// Inverse of `a` modulo `m`, if it exists.
    pub fn inv_mod(&self, a: &P<F>, m: &P<F>) -> Option<P<F>> {
        let (g, s, _) = self.xgcd(a, m);
        if self.is_one(&g) {
            Some(self.rem(&s, m))
        } else {
            None
        }
    }

    pub fn mulmod(&self, a: &P<F>, b: &P<F>, m: &P<F>) -> P<F> {
        self.rem(&self.mul(a, b), m)
    }

    /// `a^e mod m` for an arbitrary-size exponent.
    pub fn powmod(&self, a: &P<F>, e: &BigUint, m: &P<F>) -> P<F> {
        let mut acc = self.rem(&self.one(), m);
        let base = self.rem(a, m);
        let bits = e.bits();
        for i in (0..bits).rev() {
            acc = self.mulmod(&acc, &acc, m);
            if e.bit(i) {
                acc = self.mulmod(&acc, &base, m);
            }
        }
        acc
    }

    pub fn derivative(&self, a: &P<F>) -> P<F> {
        let f = self.field;
        let out = a
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| f.mul(&f.integer(i as u64), c))
            .collect();
        self.from_coeffs(out)
    }

    pub fn eval(&self, a: &P<F>, x: &F::Elem) -> F::Elem {
        let f = self.field;
        a.coeffs.iter().rev().fold(f.zero(), |acc, c| f.add(&f.mul(&acc, x), c))
    }

    /// `a(b(z))`.
    pub fn compose(&self, a: &P<F>, b: &P<F>) -> P<F> {
        a.coeffs
            .iter()
            .rev()
            .fold(Poly::zero(), |acc, c| self.add(&self.mul(&acc, b), &self.constant(c.clone())))
    }

    /// Homogeneous substitution `sum_i a_i P^i Q^(n-i)` with `n` the formal
    /// degree of `a`; this is `Q^n a(P/Q)` cleared of denominators.
    pub fn homogeneous_substitute(&self, a: &P<F>, n: usize, num: &P<F>, den: &P<F>) -> P<F> {
        debug_assert!(a.coeffs.len() <= n + 1);
        let mut acc = Poly::zero();
        let mut den_pow = self.one();
        for i in (0..=n).rev() {
            let c = self.coeff_or_zero(a, i);
            acc = self.mul(&acc, num);
            if i < n {
                den_pow = self.mul(&den_pow, den);
            }
            if !self.field.is_zero(&c) {
                acc = self.add(&acc, &self.scale(&den_pow, &c));
            }
        }
        acc
    }

    /// Multiplicity of the irreducible `g` in `a` (`a` nonzero).
    pub fn valuation(&self, a: &P<F>, g: &P<F>) -> usize {
        let mut v = 0;
        let mut cur = a.clone();
        loop {
            let (q, r) = self.divrem(&cur, g);
            if !r.is_zero() {
                return v;
            }
            cur = q;
            v += 1;
        }
    }

    /// Coefficientwise `p`-th root of a polynomial in `z^p`.
    pub fn pth_root(&self, a: &P<F>) -> P<F> {
        let p = self.field.characteristic() as usize;
        let out = a
            .coeffs
            .iter()
            .step_by(p)
            .map(|c| self.field.pth_root(c))
            .collect();
        self.from_coeffs(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::field::FqField;

    fn f7() -> FqField {
        FqField::prime(7).unwrap()
    }

    #[test]
    fn gcd_shared_root() {
        let f = f7();
        let r = PolyRing::new(&f);
        let a = r.from_coeffs(vec![6, 0, 1]); // z^2 - 1
        let b = r.from_coeffs(vec![6, 1]); // z - 1
        assert_eq!(r.gcd(&a, &b), b);
    }

    #[test]
    fn gcd_with_zero_is_monic_input() {
        let f = f7();
        let r = PolyRing::new(&f);
        let a = r.from_coeffs(vec![1, 2, 3]);
        assert_eq!(r.gcd(&a, &Poly::zero()), r.monic(&a));
        assert!(r.leading_is_one(&r.gcd(&a, &Poly::zero())));
    }

    #[test]
    fn gcd_coprime_by_hand() {
        // z^2+1 = 1*(z^2+z) + (1 - z); z^2+z = (-z-2)(1-z) + 2 -> unit.
        let f = f7();
        let r = PolyRing::new(&f);
        let a = r.from_coeffs(vec![1, 0, 1]);
        let b = r.from_coeffs(vec![0, 1, 1]);
        assert!(r.is_one(&r.gcd(&a, &b)));
    }

    #[test]
    fn derivative_examples() {
        let f = f7();
        let r = PolyRing::new(&f);
        assert!(r.derivative(&r.monomial(1, 7)).is_zero());
        assert_eq!(r.derivative(&r.from_coeffs(vec![0, 3, 1])), r.from_coeffs(vec![3, 2]));
        assert!(r.derivative(&r.constant(5)).is_zero());
    }

    #[test]
    fn homogeneous_substitution_matches_definition() {
        let f = f7();
        let r = PolyRing::new(&f);
        let g = r.from_coeffs(vec![3, 1]); // z + 3
        let num = r.from_coeffs(vec![4, 3, 1]); // (z+5)^2 = z^2 + 10z + 25
        let den = r.monomial(1, 2);
        // (z+5)^2 + 3 z^2
        let expect = r.add(&num, &r.scale(&den, &3));
        assert_eq!(r.homogeneous_substitute(&g, 1, &num, &den), expect);
    }

    impl<F: FiniteField> PolyRing<'_, F> {
        fn leading_is_one(&self, a: &P<F>) -> bool {
            a.leading() == Some(&self.field.one())
        }
    }
}
