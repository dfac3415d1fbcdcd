//! Reduction modulo `p` of rational maps and points defined over `Q`.
//!
//! A map is stored as a pair of integer binary forms of degree `d` with
//! coprime content; it has good reduction at `p` when `p` does not divide
//! their homogeneous resultant. Preimages over `Q_p` are approximated by
//! Hensel lifting modulo `p^K` and recognized as rational numbers by
//! rational reconstruction followed by exact verification.

use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::algebra::resultant::{resultant_formal, Integers};
use crate::algebra::{FiniteField, FqField, PolyRing};
use crate::error::{Error, Result};
use crate::scheme::{P1Point, RationalMapP1};

/// Starting precision exponent for Hensel lifting.
pub const DEFAULT_PRECISION: u32 = 20;
/// Largest precision exponent tried before a lift is declared irrational.
pub const MAX_PRECISION: u32 = 80;

/// `v_p(n)` for `n != 0`.
pub fn valuation(n: &BigInt, p: u64) -> u64 {
    let p = BigInt::from(p);
    let mut n = n.clone();
    let mut v = 0;
    while !n.is_zero() && (&n % &p).is_zero() {
        n /= &p;
        v += 1;
    }
    v
}

fn is_prime(p: u64) -> bool {
    p >= 2 && (2..).take_while(|i| i * i <= p).all(|i| !p.is_multiple_of(i))
}

/// `(a : b)` with coprime integers, normalized so that the first nonzero
/// of `b, a` is positive.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct QProjPoint {
    a: BigInt,
    b: BigInt,
}

impl QProjPoint {
    pub fn new(a: BigInt, b: BigInt) -> Result<Self> {
        if a.is_zero() && b.is_zero() {
            return Err(Error::Precondition("projective point with both coordinates zero"));
        }
        let g = a.gcd(&b);
        let (mut a, mut b) = (a / &g, b / &g);
        if b.is_negative() || (b.is_zero() && a.is_negative()) {
            a = -a;
            b = -b;
        }
        Ok(QProjPoint { a, b })
    }

    pub fn from_rational(z: &BigRational) -> Self {
        QProjPoint::new(z.numer().clone(), z.denom().clone()).unwrap()
    }

    pub fn infinity() -> Self {
        QProjPoint { a: BigInt::one(), b: BigInt::zero() }
    }

    pub fn coords(&self) -> (&BigInt, &BigInt) {
        (&self.a, &self.b)
    }

    pub fn is_infinity(&self) -> bool {
        self.b.is_zero()
    }

    /// The affine coordinate when finite.
    pub fn affine(&self) -> Option<BigRational> {
        (!self.b.is_zero()).then(|| BigRational::new(self.a.clone(), self.b.clone()))
    }
}

fn mod_p(n: &BigInt, p: u64) -> u64 {
    n.mod_floor(&BigInt::from(p)).to_u64().unwrap()
}

/// Reduction of a point of `P^1(Q)` to `P^1(F_p)`.
pub fn reduce_point(x: &QProjPoint, p: u64) -> Result<P1Point> {
    let f = FqField::prime(p)?;
    let (a, b) = (mod_p(&x.a, p), mod_p(&x.b, p));
    if b == 0 {
        return Ok(P1Point::Infinity);
    }
    Ok(P1Point::rational(&f, f.div(&a, &b).expect("nonzero divisor")))
}

/// A map `P/Q` over `Q` with a chosen prime `p`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QRationalMapP1 {
    /// Ascending coefficients of the integer forms, padded to degree `d`.
    num: Vec<BigInt>,
    den: Vec<BigInt>,
    degree: usize,
    p: u64,
    resultant: BigInt,
}

fn trim(mut v: Vec<BigRational>) -> Vec<BigRational> {
    while v.last().is_some_and(Zero::is_zero) {
        v.pop();
    }
    v
}

/// `sum c_i X^i Y^(d-i)` at `(x : y)`.
fn eval_form(c: &[BigInt], x: &BigInt, y: &BigInt) -> BigInt {
    let d = c.len() - 1;
    let mut acc = BigInt::zero();
    let mut xp = BigInt::one();
    let ypows: Vec<BigInt> = (0..=d).scan(BigInt::one(), |s, _| {
        let cur = s.clone();
        *s *= y;
        Some(cur)
    }).collect();
    for (i, ci) in c.iter().enumerate() {
        acc += ci * &xp * &ypows[d - i];
        xp *= x;
    }
    acc
}

impl QRationalMapP1 {
    /// Builds `num/den` from ascending rational coefficients, clearing
    /// denominators and removing the common content.
    pub fn new(num: Vec<BigRational>, den: Vec<BigRational>, p: u64) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        let (num, den) = (trim(num), trim(den));
        if num.is_empty() || den.is_empty() {
            return Err(Error::DegenerateMap);
        }
        let degree = (num.len() - 1).max(den.len() - 1);
        let lcm = num.iter().chain(&den).fold(BigInt::one(), |l, c| l.lcm(c.denom()));
        let scale = |v: &[BigRational]| -> Vec<BigInt> {
            let mut out: Vec<BigInt> = v.iter().map(|c| (c * &lcm).to_integer()).collect();
            out.resize(degree + 1, BigInt::zero());
            out
        };
        let (mut num, mut den) = (scale(&num), scale(&den));
        let content = num.iter().chain(&den).fold(BigInt::zero(), |g, c| g.gcd(c));
        for c in num.iter_mut().chain(den.iter_mut()) {
            *c /= &content;
        }
        let resultant = resultant_formal(&Integers, &num, &den);
        if resultant.is_zero() {
            return Err(Error::DegenerateMap);
        }
        if degree < 2 {
            return Err(Error::DegreeTooSmall(degree));
        }
        Ok(QRationalMapP1 { num, den, degree, p, resultant })
    }

    pub fn from_integers(num: &[i64], den: &[i64], p: u64) -> Result<Self> {
        let q = |v: &[i64]| v.iter().map(|c| BigRational::from_integer(BigInt::from(*c))).collect();
        Self::new(q(num), q(den), p)
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn prime(&self) -> u64 {
        self.p
    }

    pub fn num(&self) -> &[BigInt] {
        &self.num
    }

    pub fn den(&self) -> &[BigInt] {
        &self.den
    }

    /// Homogeneous resultant of the normalized forms.
    pub fn resultant(&self) -> &BigInt {
        &self.resultant
    }

    /// `v_p` of the resultant.
    pub fn resultant_valuation(&self) -> u64 {
        valuation(&self.resultant, self.p)
    }

    pub fn has_good_reduction(&self) -> bool {
        self.resultant_valuation() == 0
    }

    /// `f(x)`.
    pub fn evaluate(&self, x: &QProjPoint) -> QProjPoint {
        let (a, b) = x.coords();
        QProjPoint::new(eval_form(&self.num, a, b), eval_form(&self.den, a, b)).expect("nondegenerate map")
    }
}

/// The reduction `f~` over `F_p`.
pub fn reduce_map(f: &QRationalMapP1) -> Result<RationalMapP1> {
    let v = f.resultant_valuation();
    if v != 0 {
        return Err(Error::GoodReductionFailure { valuation: v });
    }
    let field = FqField::prime(f.p)?;
    let r = PolyRing::new(&field);
    let red = |c: &[BigInt]| r.from_coeffs(c.iter().map(|x| mod_p(x, f.p)).collect());
    RationalMapP1::new(field.clone(), red(&f.num), red(&f.den))
}

/// One sample of the reduction square.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SemiconjugacyRow {
    pub point: QProjPoint,
    /// `red(f(x))`.
    pub reduced_image: P1Point,
    /// `f~(red(x))`.
    pub image_of_reduction: P1Point,
}

impl SemiconjugacyRow {
    pub fn holds(&self) -> bool {
        self.reduced_image == self.image_of_reduction
    }
}

/// `red(f(x))` against `f~(red(x))` for each sample.
pub fn semiconjugacy_check(f: &QRationalMapP1, sample: &[QProjPoint]) -> Result<Vec<SemiconjugacyRow>> {
    let ft = reduce_map(f)?;
    sample
        .iter()
        .map(|x| {
            Ok(SemiconjugacyRow {
                point: x.clone(),
                reduced_image: reduce_point(&f.evaluate(x), f.p)?,
                image_of_reduction: ft.evaluate(&reduce_point(x, f.p)?),
            })
        })
        .collect()
}

/// Outcome of [`mult_sum_check`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MultSumStatus {
    /// `x~` is simple and lifts to a verified rational preimage.
    Verified,
    /// `x~` is ramified: only `count <= m` is checked.
    Inconclusive,
    /// The lift exists over `Q_p` (or an unramified extension) but not over `Q`.
    SkippedIrrational,
}

/// A classical preimage of `y` reducing to `x~`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassicalPreimage {
    pub point: QProjPoint,
    pub multiplicity: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultSumRecord {
    pub target: P1Point,
    pub preimage: P1Point,
    /// `m_{f~}(x~)`.
    pub reduced_multiplicity: usize,
    /// Lifted preimages reducing to `x~`, with their multiplicities over `Q`.
    pub lifts: Vec<ClassicalPreimage>,
    /// Sum of the multiplicities of the classical lifts.
    pub count: usize,
    pub status: MultSumStatus,
    /// Precision exponent `K` of the last Hensel lift, if one was run.
    pub precision: Option<u32>,
    /// Equality (verified case) or inequality (ramified case) held.
    pub holds: bool,
}

/// The preimage polynomial of `y` in the chart through `x~`: `Y = 1` for a
/// finite `x~` (root near `x~`), `X = 1` at infinity (root near 0).
fn chart_polynomial(f: &QRationalMapP1, y: &QProjPoint, at_infinity: bool) -> Vec<BigInt> {
    let (a, b) = y.coords();
    let mut g: Vec<BigInt> = f.num.iter().zip(&f.den).map(|(p, q)| b * p - a * q).collect();
    if at_infinity {
        g.reverse();
    }
    while g.last().is_some_and(Zero::is_zero) {
        g.pop();
    }
    g
}

fn eval_mod(g: &[BigInt], x: &BigInt, m: &BigInt) -> BigInt {
    g.iter().rev().fold(BigInt::zero(), |acc, c| (acc * x + c).mod_floor(m))
}

fn derivative(g: &[BigInt]) -> Vec<BigInt> {
    g.iter().enumerate().skip(1).map(|(i, c)| c * BigInt::from(i)).collect()
}

fn inv_mod(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    let e = a.extended_gcd(m);
    e.gcd.is_one().then(|| e.x.mod_floor(m))
}

/// Newton iteration from a simple root `r0` modulo `p` to a root modulo
/// `p^k`.
pub fn hensel_lift(g: &[BigInt], r0: u64, p: u64, k: u32) -> Result<BigInt> {
    let dg = derivative(g);
    let pb = BigInt::from(p);
    if eval_mod(&dg, &BigInt::from(r0), &pb).is_zero() || !eval_mod(g, &BigInt::from(r0), &pb).is_zero() {
        return Err(Error::LiftFailure);
    }
    let target = num_traits::pow(pb.clone(), k as usize);
    let mut r = BigInt::from(r0);
    let mut m = pb;
    while m < target {
        m = (&m * &m).min(target.clone());
        let d = inv_mod(&eval_mod(&dg, &r, &m), &m).ok_or(Error::LiftFailure)?;
        r = (&r - eval_mod(g, &r, &m) * d).mod_floor(&m);
    }
    Ok(r)
}

/// A fraction `a/b` with `a ≡ r b (mod m)` and `|a|, |b| <= sqrt(m/2)`.
pub fn rational_reconstruction(r: &BigInt, m: &BigInt) -> Option<BigRational> {
    let bound = (m / BigInt::from(2)).sqrt();
    let (mut r0, mut r1) = (m.clone(), r.mod_floor(m));
    let (mut t0, mut t1) = (BigInt::zero(), BigInt::one());
    while r1 > bound {
        let q = &r0 / &r1;
        let r2 = &r0 - &q * &r1;
        r0 = core::mem::replace(&mut r1, r2);
        let t2 = &t0 - &q * &t1;
        t0 = core::mem::replace(&mut t1, t2);
    }
    if t1.is_zero() || t1.abs() > bound || !r1.gcd(&t1).is_one() {
        return None;
    }
    Some(BigRational::new(r1, t1))
}

fn is_root(g: &[BigInt], z: &BigRational) -> bool {
    let (a, b) = (z.numer(), z.denom());
    let mut c = g.to_vec();
    c.resize(g.len(), BigInt::zero());
    eval_form(&c, a, b).is_zero()
}

/// Multiplicity of a rational root.
fn root_multiplicity(g: &[BigInt], z: &BigRational) -> usize {
    let mut g: Vec<BigRational> = g.iter().map(|c| BigRational::from_integer(c.clone())).collect();
    let mut m = 0;
    loop {
        // Synthetic division by (x - z).
        let mut q = vec![BigRational::zero(); g.len().saturating_sub(1)];
        let mut acc = BigRational::zero();
        for i in (0..g.len()).rev() {
            acc = &acc * z + &g[i];
            if i > 0 {
                q[i - 1] = acc.clone();
            }
        }
        if !acc.is_zero() || g.len() < 2 {
            return m;
        }
        m += 1;
        g = q;
    }
}

/// Largest trial divisor used when enumerating rational roots.
const TRIAL_DIVISION_CAP: u64 = 1 << 22;

fn divisors(n: &BigInt) -> Result<Vec<BigInt>> {
    let mut n = n.abs();
    let mut primes: Vec<(BigInt, u32)> = Vec::new();
    let mut d = 2u64;
    while BigInt::from(d) * BigInt::from(d) <= n {
        if d > TRIAL_DIVISION_CAP {
            return Err(Error::CapExceeded { what: "trial division", cap: TRIAL_DIVISION_CAP });
        }
        let db = BigInt::from(d);
        let mut e = 0;
        while (&n % &db).is_zero() {
            n /= &db;
            e += 1;
        }
        if e > 0 {
            primes.push((db, e));
        }
        d += 1;
    }
    if n > BigInt::one() {
        primes.push((n, 1));
    }
    let mut out = vec![BigInt::one()];
    for (q, e) in primes {
        let mut next = Vec::new();
        for x in &out {
            let mut pw = BigInt::one();
            for _ in 0..=e {
                next.push(x * &pw);
                pw *= &q;
            }
        }
        out = next;
    }
    out.sort();
    Ok(out)
}

/// Rational roots of an integer polynomial with multiplicities.
pub fn rational_roots(g: &[BigInt]) -> Result<Vec<(BigRational, usize)>> {
    let mut out = Vec::new();
    let low = g.iter().position(|c| !c.is_zero()).ok_or(Error::ZeroFunction)?;
    if low > 0 {
        out.push((BigRational::zero(), low));
    }
    let h = &g[low..];
    if h.len() < 2 {
        return Ok(out);
    }
    let (c0, cn) = (&h[0], h.last().unwrap());
    for a in divisors(c0)? {
        for b in divisors(cn)? {
            for s in [a.clone(), -a.clone()] {
                let z = BigRational::new(s, b.clone());
                if z.denom() == &b && is_root(h, &z) && !out.iter().any(|(w, _)| *w == z) {
                    out.push((z.clone(), root_multiplicity(h, &z)));
                }
            }
        }
    }
    out.sort();
    Ok(out)
}

/// Checks `m_{f~}(x~) = sum m_f(x_i)` over the classical preimages `x_i` of
/// `y` reducing to `x~`, as far as classical points allow.
pub fn mult_sum_check(f: &QRationalMapP1, y: &QProjPoint, x_tilde: &P1Point) -> Result<MultSumRecord> {
    let ft = reduce_map(f)?;
    let p = f.p;
    let y_tilde = reduce_point(y, p)?;
    let fiber = ft.fiber(&y_tilde);
    let m = fiber.iter().find(|(x, _)| x == x_tilde).map(|(_, m)| *m).ok_or(Error::PointNotInFiber)?;
    if fiber.iter().any(|(x, e)| x != x_tilde && *e > 1) {
        return Err(Error::Precondition("reduced map is ramified elsewhere in the fiber"));
    }
    let mut record = MultSumRecord {
        target: y_tilde,
        preimage: x_tilde.clone(),
        reduced_multiplicity: m,
        lifts: Vec::new(),
        count: 0,
        status: MultSumStatus::SkippedIrrational,
        precision: None,
        holds: false,
    };
    let field = FqField::prime(p)?;
    let at_infinity = *x_tilde == P1Point::Infinity;
    let r0 = match x_tilde {
        P1Point::Infinity => 0,
        x => match x.as_rational(&field) {
            Some(c) => c,
            None => return Ok(record),
        },
    };
    let g = chart_polynomial(f, y, at_infinity);
    let to_point = |z: &BigRational| {
        if at_infinity {
            QProjPoint::new(z.denom().clone(), z.numer().clone()).unwrap()
        } else {
            QProjPoint::from_rational(z)
        }
    };
    if m > 1 {
        for (z, mult) in rational_roots(&g)? {
            let pt = to_point(&z);
            if reduce_point(&pt, p)? == *x_tilde {
                record.lifts.push(ClassicalPreimage { point: pt, multiplicity: mult });
            }
        }
        record.count = record.lifts.iter().map(|l| l.multiplicity).sum();
        record.status = MultSumStatus::Inconclusive;
        record.holds = record.count <= m;
        return Ok(record);
    }
    let mut k = DEFAULT_PRECISION;
    loop {
        let r = hensel_lift(&g, r0, p, k)?;
        record.precision = Some(k);
        let modulus = num_traits::pow(BigInt::from(p), k as usize);
        if let Some(z) = rational_reconstruction(&r, &modulus).filter(|z| is_root(&g, z)) {
            let pt = to_point(&z);
            debug_assert_eq!(f.evaluate(&pt), *y);
            record.lifts.push(ClassicalPreimage { point: pt, multiplicity: root_multiplicity(&g, &z) });
            record.count = record.lifts.iter().map(|l| l.multiplicity).sum();
            record.status = MultSumStatus::Verified;
            record.holds = record.count == m;
            return Ok(record);
        }
        if k >= MAX_PRECISION {
            return Ok(record);
        }
        k *= 2;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(a: i64, b: i64) -> QProjPoint {
        QProjPoint::new(BigInt::from(a), BigInt::from(b)).unwrap()
    }

    fn f1() -> QRationalMapP1 {
        // z^2 + 7z
        QRationalMapP1::from_integers(&[0, 7, 1], &[1], 7).unwrap()
    }

    #[test]
    fn reduce_map_examples() {
        let g = reduce_map(&f1()).unwrap();
        let f = FqField::prime(7).unwrap();
        assert_eq!(g, RationalMapP1::polynomial(f.clone(), PolyRing::new(&f).monomial(1, 2)).unwrap());
        let bad = QRationalMapP1::from_integers(&[0, 1, 7], &[1], 7).unwrap();
        assert_eq!(reduce_map(&bad), Err(Error::GoodReductionFailure { valuation: 2 }));
        let cube = QRationalMapP1::from_integers(&[0, 0, 0, 1], &[1], 5).unwrap();
        assert_eq!(reduce_map(&cube).unwrap().degree(), 3);
    }

    #[test]
    fn normalization_clears_denominators_and_content() {
        let h = |n, d| BigRational::new(BigInt::from(n), BigInt::from(d));
        let f = QRationalMapP1::new(vec![h(0, 1), h(7, 2), h(1, 2)], vec![h(1, 2)], 7).unwrap();
        assert_eq!(f, f1());
        let g = QRationalMapP1::from_integers(&[0, 14, 2], &[2], 7).unwrap();
        assert_eq!(g, f1());
        assert_eq!(QRationalMapP1::from_integers(&[0, 1], &[1], 7), Err(Error::DegreeTooSmall(1)));
        assert_eq!(QRationalMapP1::from_integers(&[0, 1, 1], &[0, 1], 7), Err(Error::DegenerateMap));
        assert_eq!(QRationalMapP1::from_integers(&[0, 0, 1], &[1], 8), Err(Error::NotPrime(8)));
    }

    #[test]
    fn reduce_point_examples() {
        let f = FqField::prime(7).unwrap();
        assert_eq!(reduce_point(&q(8, 1), 7).unwrap(), P1Point::rational(&f, 1));
        assert_eq!(reduce_point(&q(7, 1), 7).unwrap(), P1Point::rational(&f, 0));
        assert_eq!(reduce_point(&q(1, 7), 7).unwrap(), P1Point::Infinity);
        assert_eq!(reduce_point(&q(-3, -2), 7), reduce_point(&q(3, 2), 7));
        assert_eq!(reduce_point(&q(9, 6), 7), reduce_point(&q(3, 2), 7));
    }

    #[test]
    fn semiconjugacy_examples() {
        let f = FqField::prime(7).unwrap();
        let rows = semiconjugacy_check(&f1(), &[q(3, 1), q(0, 1), q(1, 0)]).unwrap();
        assert_eq!(f1().evaluate(&q(3, 1)), q(30, 1));
        assert_eq!(rows[0].reduced_image, P1Point::rational(&f, 2));
        assert!(rows.iter().all(SemiconjugacyRow::holds));
        assert_eq!(rows[1].reduced_image, P1Point::rational(&f, 0));
        assert_eq!(rows[2].image_of_reduction, P1Point::Infinity);
    }

    #[test]
    fn hensel_and_reconstruction() {
        // z^2 + 7z - 8 = (z - 1)(z + 8).
        let g: Vec<BigInt> = [-8, 7, 1].iter().map(|c| BigInt::from(*c)).collect();
        let m = num_traits::pow(BigInt::from(7), 20);
        let r = hensel_lift(&g, 6, 7, 20).unwrap();
        assert_eq!(rational_reconstruction(&r, &m), Some(BigRational::from_integer(BigInt::from(-8))));
        assert_eq!(hensel_lift(&g, 2, 7, 20), Err(Error::LiftFailure));
        let roots = rational_roots(&g).unwrap();
        assert_eq!(roots.len(), 2);
    }

    #[test]
    fn mult_sum_examples() {
        let f = FqField::prime(7).unwrap();
        for c in [1, 6] {
            let rec = mult_sum_check(&f1(), &q(8, 1), &P1Point::rational(&f, c)).unwrap();
            assert_eq!(rec.status, MultSumStatus::Verified);
            assert_eq!((rec.count, rec.reduced_multiplicity), (1, 1));
            assert!(rec.holds);
        }
        let sq = QRationalMapP1::from_integers(&[0, 0, 1], &[1], 7).unwrap();
        let rec = mult_sum_check(&sq, &q(0, 1), &P1Point::rational(&f, 0)).unwrap();
        assert_eq!(rec.status, MultSumStatus::Inconclusive);
        assert_eq!(rec.lifts, vec![ClassicalPreimage { point: q(0, 1), multiplicity: 2 }]);
        assert!(rec.holds);
        let rec = mult_sum_check(&f1(), &q(2, 1), &P1Point::rational(&f, 3)).unwrap();
        assert_eq!(rec.status, MultSumStatus::SkippedIrrational);
        assert_eq!(rec.precision, Some(80));
        assert_eq!(
            mult_sum_check(&f1(), &q(2, 1), &P1Point::rational(&f, 1)).map(|r| r.status),
            Err(Error::PointNotInFiber)
        );
    }

    #[test]
    fn mult_sum_at_infinity() {
        let g = QRationalMapP1::from_integers(&[0, 0, 2], &[1, 1], 5).unwrap();
        // g(∞) = ∞ simple: preimages of (1 : 0) are -1 and ∞.
        let rec = mult_sum_check(&g, &QProjPoint::infinity(), &P1Point::Infinity).unwrap();
        assert_eq!(rec.status, MultSumStatus::Verified);
        assert_eq!(rec.lifts[0].point, QProjPoint::infinity());
    }
}
