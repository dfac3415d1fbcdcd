//! Sylvester resultants by fraction-free elimination.
//!
//! The Sylvester matrix of `a` (formal degree `m`) and `b` (formal degree
//! `n`) has `n` rows of shifted coefficients of `a` followed by `m` rows of
//! shifted coefficients of `b`, leading coefficients first.

use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use super::field::FiniteField;
use super::poly::{Poly, PolyRing};

/// An integral domain with exact division, enough for Bareiss elimination.
pub trait Domain {
    type T: Clone;
    fn zero(&self) -> Self::T;
    fn one(&self) -> Self::T;
    fn is_zero(&self, a: &Self::T) -> bool;
    fn sub(&self, a: &Self::T, b: &Self::T) -> Self::T;
    fn mul(&self, a: &Self::T, b: &Self::T) -> Self::T;
    fn neg(&self, a: &Self::T) -> Self::T;
    /// `a / b` where `b` divides `a` exactly.
    fn div_exact(&self, a: &Self::T, b: &Self::T) -> Self::T;
}

/// A finite field viewed as a [`Domain`].
pub struct FieldDomain<'a, F>(pub &'a F);

impl<F: FiniteField> Domain for FieldDomain<'_, F> {
    type T = F::Elem;
    fn zero(&self) -> F::Elem {
        self.0.zero()
    }
    fn one(&self) -> F::Elem {
        self.0.one()
    }
    fn is_zero(&self, a: &F::Elem) -> bool {
        self.0.is_zero(a)
    }
    fn sub(&self, a: &F::Elem, b: &F::Elem) -> F::Elem {
        self.0.sub(a, b)
    }
    fn mul(&self, a: &F::Elem, b: &F::Elem) -> F::Elem {
        self.0.mul(a, b)
    }
    fn neg(&self, a: &F::Elem) -> F::Elem {
        self.0.neg(a)
    }
    fn div_exact(&self, a: &F::Elem, b: &F::Elem) -> F::Elem {
        self.0.div(a, b).expect("division by zero in field domain")
    }
}

impl<F: FiniteField> Domain for PolyRing<'_, F> {
    type T = Poly<F::Elem>;
    fn zero(&self) -> Self::T {
        Poly::zero()
    }
    fn one(&self) -> Self::T {
        PolyRing::one(self)
    }
    fn is_zero(&self, a: &Self::T) -> bool {
        a.is_zero()
    }
    fn sub(&self, a: &Self::T, b: &Self::T) -> Self::T {
        PolyRing::sub(self, a, b)
    }
    fn mul(&self, a: &Self::T, b: &Self::T) -> Self::T {
        PolyRing::mul(self, a, b)
    }
    fn neg(&self, a: &Self::T) -> Self::T {
        PolyRing::neg(self, a)
    }
    fn div_exact(&self, a: &Self::T, b: &Self::T) -> Self::T {
        PolyRing::div_exact(self, a, b)
    }
}

/// The integers.
pub struct Integers;

impl Domain for Integers {
    type T = BigInt;
    fn zero(&self) -> BigInt {
        BigInt::zero()
    }
    fn one(&self) -> BigInt {
        BigInt::one()
    }
    fn is_zero(&self, a: &BigInt) -> bool {
        a.is_zero()
    }
    fn sub(&self, a: &BigInt, b: &BigInt) -> BigInt {
        a - b
    }
    fn mul(&self, a: &BigInt, b: &BigInt) -> BigInt {
        a * b
    }
    fn neg(&self, a: &BigInt) -> BigInt {
        -a
    }
    fn div_exact(&self, a: &BigInt, b: &BigInt) -> BigInt {
        let (q, r) = a.div_rem(b);
        debug_assert!(r.is_zero());
        q
    }
}

/// Determinant by Bareiss fraction-free elimination.
pub fn determinant<D: Domain>(dom: &D, mut m: Vec<Vec<D::T>>) -> D::T {
    let n = m.len();
    if n == 0 {
        return dom.one();
    }
    let mut sign_flip = false;
    let mut prev = dom.one();
    for k in 0..n {
        if dom.is_zero(&m[k][k]) {
            match (k + 1..n).find(|&i| !dom.is_zero(&m[i][k])) {
                Some(i) => {
                    m.swap(i, k);
                    sign_flip = !sign_flip;
                }
                None => return dom.zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let t = dom.sub(&dom.mul(&m[i][j], &m[k][k]), &dom.mul(&m[i][k], &m[k][j]));
                m[i][j] = dom.div_exact(&t, &prev);
            }
            m[i][k] = dom.zero();
        }
        prev = m[k][k].clone();
    }
    let det = m[n - 1][n - 1].clone();
    if sign_flip {
        dom.neg(&det)
    } else {
        det
    }
}

/// Sylvester matrix of ascending coefficient lists read at formal degrees
/// `m = a.len() - 1` and `n = b.len() - 1`.
pub fn sylvester<D: Domain>(dom: &D, a: &[D::T], b: &[D::T]) -> Vec<Vec<D::T>> {
    let m = a.len().saturating_sub(1);
    let n = b.len().saturating_sub(1);
    let size = m + n;
    let mut rows = Vec::with_capacity(size);
    for i in 0..n {
        let mut row = vec![dom.zero(); size];
        for (j, c) in a.iter().rev().enumerate() {
            row[i + j] = c.clone();
        }
        rows.push(row);
    }
    for i in 0..m {
        let mut row = vec![dom.zero(); size];
        for (j, c) in b.iter().rev().enumerate() {
            row[i + j] = c.clone();
        }
        rows.push(row);
    }
    rows
}

/// Resultant of coefficient lists at their formal degrees.
pub fn resultant_formal<D: Domain>(dom: &D, a: &[D::T], b: &[D::T]) -> D::T {
    if a.is_empty() || b.is_empty() {
        return dom.zero();
    }
    determinant(dom, sylvester(dom, a, b))
}

fn padded<E: Clone>(c: &[E], n: usize, zero: E) -> Vec<E> {
    let mut v = c.to_vec();
    v.resize(n + 1, zero);
    v
}

/// `Res(a, b)` over a finite field at actual degrees; zero if either
/// polynomial is zero.
pub fn resultant<F: FiniteField>(ring: &PolyRing<'_, F>, a: &Poly<F::Elem>, b: &Poly<F::Elem>) -> F::Elem {
    if a.is_zero() || b.is_zero() {
        return ring.field.zero();
    }
    resultant_formal(&FieldDomain(ring.field), a.coeffs(), b.coeffs())
}

/// Homogeneous resultant of two polynomials read as binary forms of
/// degree `d`.
pub fn homogeneous_resultant<F: FiniteField>(
    ring: &PolyRing<'_, F>,
    a: &Poly<F::Elem>,
    b: &Poly<F::Elem>,
    d: usize,
) -> F::Elem {
    let z = ring.field.zero();
    resultant_formal(
        &FieldDomain(ring.field),
        &padded(a.coeffs(), d, z.clone()),
        &padded(b.coeffs(), d, z),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::field::FqField;

    #[test]
    fn res_z_and_z_minus_1() {
        // det [[1, 0], [1, -1]] = -1 = 6 in F_7.
        let f = FqField::prime(7).unwrap();
        let r = PolyRing::new(&f);
        assert_eq!(resultant(&r, &r.x(), &r.linear(&1)), 6);
    }

    #[test]
    fn res_z2_and_z2_plus_1() {
        let f = FqField::prime(7).unwrap();
        let r = PolyRing::new(&f);
        let a = r.monomial(1, 2);
        let b = r.from_coeffs(vec![1, 0, 1]);
        let m = sylvester(&FieldDomain(&f), a.coeffs(), b.coeffs());
        assert_eq!(m, vec![vec![1, 0, 0, 0], vec![0, 1, 0, 0], vec![1, 0, 1, 0], vec![0, 1, 0, 1]]);
        assert_eq!(resultant(&r, &a, &b), 1);
    }

    #[test]
    fn res_self_vanishes() {
        let f = FqField::prime(7).unwrap();
        let r = PolyRing::new(&f);
        let a = r.from_coeffs(vec![2, 5, 1]);
        assert_eq!(resultant(&r, &a, &a), 0);
    }

    #[test]
    fn integer_determinant() {
        let m = vec![
            vec![BigInt::from(2), BigInt::from(-1), BigInt::from(0)],
            vec![BigInt::from(-1), BigInt::from(2), BigInt::from(-1)],
            vec![BigInt::from(0), BigInt::from(-1), BigInt::from(2)],
        ];
        assert_eq!(determinant(&Integers, m), BigInt::from(4));
        let m = vec![vec![BigInt::from(0), BigInt::from(1)], vec![BigInt::from(1), BigInt::from(0)]];
        assert_eq!(determinant(&Integers, m), BigInt::from(-1));
    }

    #[test]
    fn homogeneous_gate_detects_common_infinity() {
        // (z : 1) as degree-2 forms (XZ : Z^2) share the point at infinity.
        let f = FqField::prime(7).unwrap();
        let r = PolyRing::new(&f);
        assert_eq!(homogeneous_resultant(&r, &r.x(), &r.one(), 2), 0);
        assert_ne!(homogeneous_resultant(&r, &r.monomial(1, 2), &r.one(), 2), 0);
    }
}
