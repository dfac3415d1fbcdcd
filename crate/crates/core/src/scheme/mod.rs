//! The projective line over the algebraic closure of a finite field.
//!
//! Closed points are Frobenius orbits over the base field `F_q`, encoded by
//! their monic irreducible polynomial (or the point at infinity); the
//! generic point stands for the whole line. A [`RationalMapP1`] is a pair
//! `P/Q` in the affine coordinate `z`, read as a pair of binary forms of
//! degree `d = max(deg P, deg Q)`.

pub mod dynamics;
pub mod fiber;

use alloc::vec::Vec;

use crate::algebra::factor::{frobenius_orbit_size, is_irreducible};
use crate::algebra::resultant::homogeneous_resultant;
use crate::algebra::{FiniteField, FqField, Poly, PolyRing};
use crate::error::{Error, Result};

pub use dynamics::{CycleRecord, GateReport};

/// A scheme point of `P^1`. The derived order is the canonical order used
/// for every report: generic, then infinity, then finite orbits by degree
/// and coefficients.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum P1Point {
    Generic,
    Infinity,
    Finite(Poly<u64>),
}

impl P1Point {
    /// The rational point `z = c`.
    pub fn rational(field: &FqField, c: u64) -> Self {
        P1Point::Finite(PolyRing::new(field).linear(&c))
    }

    /// The orbit cut out by `g`, which must be monic irreducible.
    pub fn orbit(field: &FqField, g: Poly<u64>) -> Result<Self> {
        frobenius_orbit_size(&PolyRing::new(field), &g)?;
        Ok(P1Point::Finite(g))
    }

    /// Number of geometric points represented.
    pub fn orbit_size(&self) -> usize {
        match self {
            P1Point::Finite(g) => g.deg(),
            _ => 1,
        }
    }

    pub fn is_closed(&self) -> bool {
        !matches!(self, P1Point::Generic)
    }

    /// The root when the point is rational and finite.
    pub fn as_rational(&self, field: &FqField) -> Option<u64> {
        match self {
            P1Point::Finite(g) if g.deg() == 1 => Some(field.neg(&g.coeffs()[0])),
            _ => None,
        }
    }

    pub fn polynomial(&self) -> Option<&Poly<u64>> {
        match self {
            P1Point::Finite(g) => Some(g),
            _ => None,
        }
    }
}

/// A morphism `P^1 -> P^1` of degree at least 2 defined over `F_q`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalMapP1 {
    field: FqField,
    num: Poly<u64>,
    den: Poly<u64>,
    degree: usize,
    separable: bool,
    char_ok: bool,
}

impl RationalMapP1 {
    /// Builds `num/den`, rejecting degree below 2 and common roots
    /// (including a common zero at infinity).
    pub fn new(field: FqField, num: Poly<u64>, den: Poly<u64>) -> Result<Self> {
        if num.is_zero() || den.is_zero() {
            return Err(Error::DegenerateMap);
        }
        let degree = num.deg().max(den.deg());
        let ring = PolyRing::new(&field);
        if field.is_zero(&homogeneous_resultant(&ring, &num, &den, degree)) {
            return Err(Error::DegenerateMap);
        }
        if degree < 2 {
            return Err(Error::DegreeTooSmall(degree));
        }
        let wronskian = wronskian(&ring, &num, &den);
        let separable = !wronskian.is_zero();
        let char_ok = !(degree as u64).is_multiple_of(field.characteristic());
        // Scale so the denominator is monic; the map is unchanged.
        let inv = field.inv(den.leading().unwrap()).unwrap();
        let num = ring.scale(&num, &inv);
        let den = ring.scale(&den, &inv);
        Ok(RationalMapP1 { field, num, den, degree, separable, char_ok })
    }

    /// The polynomial map `z -> a(z)`.
    pub fn polynomial(field: FqField, a: Poly<u64>) -> Result<Self> {
        let one = PolyRing::new(&field).one();
        Self::new(field, a, one)
    }

    pub fn field(&self) -> &FqField {
        &self.field
    }

    pub fn ring(&self) -> PolyRing<'_, FqField> {
        PolyRing::new(&self.field)
    }

    pub fn num(&self) -> &Poly<u64> {
        &self.num
    }

    pub fn den(&self) -> &Poly<u64> {
        &self.den
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn is_separable(&self) -> bool {
        self.separable
    }

    pub fn char_ok(&self) -> bool {
        self.char_ok
    }

    /// `P'Q - PQ'`.
    pub fn wronskian(&self) -> Poly<u64> {
        wronskian(&self.ring(), &self.num, &self.den)
    }

    /// Both gates required by the dynamical operations.
    pub fn require_gates(&self) -> Result<()> {
        if !self.separable {
            return Err(Error::InseparableMap);
        }
        if !self.char_ok {
            return Err(Error::CharDividesDegree { p: self.field.p(), d: self.degree });
        }
        Ok(())
    }

    /// `g ∘ self`.
    pub fn then(&self, g: &RationalMapP1) -> Result<RationalMapP1> {
        if self.field != g.field {
            return Err(Error::FieldMismatch);
        }
        let r = self.ring();
        let e = g.degree;
        let num = r.homogeneous_substitute(&g.num, e, &self.num, &self.den);
        let den = r.homogeneous_substitute(&g.den, e, &self.num, &self.den);
        RationalMapP1::new(self.field.clone(), num, den)
    }

    /// The `n`-th iterate, `n >= 1`.
    pub fn iterate(&self, n: usize) -> Result<RationalMapP1> {
        if n == 0 {
            return Err(Error::Precondition("iterate requires n >= 1"));
        }
        let mut acc = self.clone();
        for _ in 1..n {
            acc = acc.then(self)?;
        }
        Ok(acc)
    }

    /// Conjugate by the chart swap `w = 1/z`: the map `w -> 1/f(1/w)`.
    pub fn chart_swap(&self) -> RationalMapP1 {
        let r = self.ring();
        let rev = |a: &Poly<u64>| {
            let mut c = a.coeffs().to_vec();
            c.resize(self.degree + 1, 0);
            c.reverse();
            r.from_coeffs(c)
        };
        RationalMapP1::new(self.field.clone(), rev(&self.den), rev(&self.num))
            .expect("conjugation preserves nondegeneracy")
    }
}

fn wronskian(r: &PolyRing<'_, FqField>, p: &Poly<u64>, q: &Poly<u64>) -> Poly<u64> {
    r.sub(&r.mul(&r.derivative(p), q), &r.mul(p, &r.derivative(q)))
}

/// Every closed point of degree at most `max_deg` over `F_q`, plus
/// infinity, in canonical order. Intended for small fields.
pub fn closed_points_up_to(field: &FqField, max_deg: usize) -> Vec<P1Point> {
    let r = PolyRing::new(field);
    let q = field.q();
    let mut out = alloc::vec![P1Point::Infinity];
    for n in 1..=max_deg {
        let count = q.checked_pow(n as u32).expect("enumeration too large");
        for code in 0..count {
            let mut c = code;
            let mut coeffs = Vec::with_capacity(n + 1);
            for _ in 0..n {
                coeffs.push(c % q);
                c /= q;
            }
            coeffs.push(1);
            let g = r.from_coeffs(coeffs);
            if is_irreducible(&r, &g) {
                out.push(P1Point::Finite(g));
            }
        }
    }
    out.sort();
    out
}
