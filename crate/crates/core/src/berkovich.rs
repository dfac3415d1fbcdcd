//! The Berkovich projective line over a trivially valued algebraically
//! closed field.
//!
//! Over a trivially valued field the analytic line is a tree: the Gauss
//! point, joined to each closed point `x` by a branch of points
//! `v_{x,t} = t * ord_x` for `0 < t < ∞`, which ends at the classical point
//! `x` at `t = ∞`. Branch points are stored per Frobenius orbit of the
//! center, as in the scheme module.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Pow, Signed, Zero};

use crate::algebra::factor::factor;
use crate::algebra::resultant::resultant_formal;
use crate::algebra::{FiniteField, FqField, Poly, PolyRing};
use crate::error::{Error, Result};
use crate::measures::{iterate_with, rat_int, Atom, AtomicMeasure, Iteration};
use crate::scheme::{P1Point, RationalMapP1};

/// Position along a branch.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Param {
    Finite(BigRational),
    Infinite,
}

impl Param {
    fn divide(&self, e: usize) -> Param {
        match self {
            Param::Finite(t) => Param::Finite(t / rat_int(e)),
            Param::Infinite => Param::Infinite,
        }
    }

    fn times(&self, e: usize) -> Param {
        match self {
            Param::Finite(t) => Param::Finite(t * rat_int(e)),
            Param::Infinite => Param::Infinite,
        }
    }

    /// `min{1, t}`.
    pub fn capped(&self) -> BigRational {
        match self {
            Param::Finite(t) if *t < BigRational::one() => t.clone(),
            _ => BigRational::one(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BerkPointP1 {
    Gauss,
    Branch { center: P1Point, t: Param },
}

impl BerkPointP1 {
    /// `v_{x,t}` for a closed point `x` and `t > 0`.
    pub fn branch(center: P1Point, t: BigRational) -> Result<Self> {
        if !center.is_closed() {
            return Err(Error::NotClosedPoint);
        }
        if !t.is_positive() {
            return Err(Error::InvalidParameter);
        }
        Ok(BerkPointP1::Branch { center, t: Param::Finite(t) })
    }

    /// The classical point at a closed point `x`.
    pub fn classical(center: P1Point) -> Result<Self> {
        if !center.is_closed() {
            return Err(Error::NotClosedPoint);
        }
        Ok(BerkPointP1::Branch { center, t: Param::Infinite })
    }

    pub fn is_classical(&self) -> bool {
        matches!(self, BerkPointP1::Branch { t: Param::Infinite, .. })
    }

    pub fn center(&self) -> Option<&P1Point> {
        match self {
            BerkPointP1::Gauss => None,
            BerkPointP1::Branch { center, .. } => Some(center),
        }
    }
}

impl Atom for BerkPointP1 {
    fn orbit_size(&self) -> usize {
        match self {
            BerkPointP1::Gauss => 1,
            BerkPointP1::Branch { center, .. } => center.orbit_size(),
        }
    }
}

/// `red`: the Gauss point to the generic point, a branch to its center.
pub fn reduction(v: &BerkPointP1) -> P1Point {
    match v {
        BerkPointP1::Gauss => P1Point::Generic,
        BerkPointP1::Branch { center, .. } => center.clone(),
    }
}

/// `π`: the kernel of the seminorm, nontrivial only at classical points.
pub fn kernel_point(v: &BerkPointP1) -> P1Point {
    match v {
        BerkPointP1::Branch { center, t: Param::Infinite } => center.clone(),
        _ => P1Point::Generic,
    }
}

/// A value of a semivaluation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SemiVal {
    Finite(BigRational),
    PosInf,
    NegInf,
}

impl SemiVal {
    pub fn zero() -> Self {
        SemiVal::Finite(BigRational::zero())
    }

    pub fn as_finite(&self) -> Option<&BigRational> {
        match self {
            SemiVal::Finite(x) => Some(x),
            _ => None,
        }
    }
}

/// A nonzero rational function `num/den` in lowest terms with `den` monic.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalFunction {
    field: FqField,
    num: Poly<u64>,
    den: Poly<u64>,
}

impl RationalFunction {
    pub fn new(field: FqField, num: Poly<u64>, den: Poly<u64>) -> Result<Self> {
        if num.is_zero() {
            return Err(Error::ZeroFunction);
        }
        if den.is_zero() {
            return Err(Error::Precondition("denominator must be nonzero"));
        }
        let r = PolyRing::new(&field);
        let g = r.gcd(&num, &den);
        let mut num = r.div_exact(&num, &g);
        let mut den = r.div_exact(&den, &g);
        let inv = field.inv(den.leading().unwrap()).unwrap();
        num = r.scale(&num, &inv);
        den = r.scale(&den, &inv);
        Ok(RationalFunction { field, num, den })
    }

    pub fn polynomial(field: FqField, num: Poly<u64>) -> Result<Self> {
        let one = PolyRing::new(&field).one();
        Self::new(field, num, one)
    }

    pub fn field(&self) -> &FqField {
        &self.field
    }

    pub fn num(&self) -> &Poly<u64> {
        &self.num
    }

    pub fn den(&self) -> &Poly<u64> {
        &self.den
    }

    /// `max(deg num, deg den)`: the degree of both the zero and the polar
    /// divisor.
    pub fn degree(&self) -> usize {
        self.num.deg().max(self.den.deg())
    }

    /// Order of vanishing at a closed point (negative at poles).
    pub fn ord(&self, x: &P1Point) -> Result<i64> {
        let r = PolyRing::new(&self.field);
        match x {
            P1Point::Generic => Err(Error::NotClosedPoint),
            P1Point::Infinity => Ok(self.den.deg() as i64 - self.num.deg() as i64),
            P1Point::Finite(g) => Ok(r.valuation(&self.num, g) as i64 - r.valuation(&self.den, g) as i64),
        }
    }

    /// The closed points where the function has a zero or a pole.
    pub fn divisor_support(&self) -> Vec<P1Point> {
        let r = PolyRing::new(&self.field);
        let mut out = Vec::new();
        for a in [&self.num, &self.den] {
            if a.deg() > 0 {
                out.extend(factor(&r, a, 0).factors.into_iter().map(|(g, _)| P1Point::Finite(g)));
            }
        }
        if self.num.deg() != self.den.deg() {
            out.push(P1Point::Infinity);
        }
        out.sort();
        out
    }

    /// `self ∘ f`.
    pub fn compose(&self, f: &RationalMapP1) -> Result<RationalFunction> {
        if &self.field != f.field() {
            return Err(Error::FieldMismatch);
        }
        let r = f.ring();
        let k = self.degree();
        let num = r.homogeneous_substitute(&self.num, k, f.num(), f.den());
        let den = r.homogeneous_substitute(&self.den, k, f.num(), f.den());
        RationalFunction::new(self.field.clone(), num, den)
    }
}

/// `v(φ)`.
pub fn semival_eval(v: &BerkPointP1, phi: &RationalFunction) -> Result<SemiVal> {
    match v {
        BerkPointP1::Gauss => Ok(SemiVal::zero()),
        BerkPointP1::Branch { center, t } => {
            let ord = phi.ord(center)?;
            Ok(match t {
                Param::Finite(t) => SemiVal::Finite(t * BigRational::from_integer(BigInt::from(ord))),
                Param::Infinite if ord > 0 => SemiVal::PosInf,
                Param::Infinite if ord < 0 => SemiVal::NegInf,
                Param::Infinite => SemiVal::zero(),
            })
        }
    }
}

/// Preimages of a Berkovich point with their multiplicities.
pub fn berk_fiber(f: &RationalMapP1, v: &BerkPointP1) -> Vec<(BerkPointP1, usize)> {
    match v {
        BerkPointP1::Gauss => vec![(BerkPointP1::Gauss, f.degree())],
        BerkPointP1::Branch { center, t } => f
            .fiber(center)
            .into_iter()
            .map(|(y, e)| (BerkPointP1::Branch { center: y, t: t.divide(e) }, e))
            .collect(),
    }
}

/// `f(v)`: a branch point `v_{y,s}` maps to `v_{f(y), e s}`.
pub fn berk_image(f: &RationalMapP1, v: &BerkPointP1) -> BerkPointP1 {
    match v {
        BerkPointP1::Gauss => BerkPointP1::Gauss,
        BerkPointP1::Branch { center, t } => {
            BerkPointP1::Branch { center: f.evaluate(center), t: t.times(f.multiplicity(center)) }
        }
    }
}

/// `f^* mu`.
pub fn berk_pullback(f: &RationalMapP1, mu: &AtomicMeasure<BerkPointP1>) -> Result<AtomicMeasure<BerkPointP1>> {
    f.require_gates()?;
    Ok(mu.pullback_by(|v| berk_fiber(f, v)))
}

/// `f_* mu`.
pub fn berk_pushforward(f: &RationalMapP1, mu: &AtomicMeasure<BerkPointP1>) -> AtomicMeasure<BerkPointP1> {
    mu.pushforward_by(|v| berk_image(f, v))
}

/// `red_* mu`.
pub fn red_push(mu: &AtomicMeasure<BerkPointP1>) -> AtomicMeasure<P1Point> {
    mu.pushforward_by(reduction)
}

/// `π_* mu`.
pub fn kernel_push(mu: &AtomicMeasure<BerkPointP1>) -> AtomicMeasure<P1Point> {
    mu.pushforward_by(kernel_point)
}

/// The norm `N_f(a)` of a polynomial, as a rational function of the target
/// coordinate `w`. For monic `a` of degree `k` it is
/// `(-1)^(dk) Res_z(P - wQ, a) / lc_z(P - wQ)^k`; a leading coefficient `c`
/// contributes `c^d`.
pub fn norm_poly(f: &RationalMapP1, a: &Poly<u64>) -> Result<RationalFunction> {
    if a.is_zero() {
        return Err(Error::ZeroFunction);
    }
    let field = f.field();
    let r = f.ring();
    let d = f.degree();
    let k = a.deg();
    let c = a.leading().cloned().unwrap();
    let a = r.monic(a);
    // P - wQ with coefficients in F_q[w], padded to z-degree d.
    let big_a: Vec<Poly<u64>> = (0..=d)
        .map(|i| {
            let p = r.coeff_or_zero(f.num(), i);
            let q = r.coeff_or_zero(f.den(), i);
            r.from_coeffs(vec![p, field.neg(&q)])
        })
        .collect();
    let a_lifted: Vec<Poly<u64>> = a.coeffs().iter().map(|x| r.constant(*x)).collect();
    let mut num = resultant_formal(&r, &big_a, &a_lifted);
    if (d * k) % 2 == 1 {
        num = r.neg(&num);
    }
    num = r.scale(&num, &field.pow(&c, &BigUint::from(d)));
    let den = r.pow(&big_a[d], k as u64);
    RationalFunction::new(field.clone(), num, den)
}

/// `N_f(φ) = N_f(num) / N_f(den)`.
pub fn norm(f: &RationalMapP1, phi: &RationalFunction) -> Result<RationalFunction> {
    if phi.field() != f.field() {
        return Err(Error::FieldMismatch);
    }
    let n = norm_poly(f, phi.num())?;
    let m = norm_poly(f, phi.den())?;
    let r = f.ring();
    RationalFunction::new(f.field().clone(), r.mul(n.num(), m.den()), r.mul(n.den(), m.num()))
}

/// Both sides of `sum_{f(w)=v} m_f(w) w(φ) = v(N_f φ)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NormIdentity {
    pub lhs: BigRational,
    pub rhs: BigRational,
}

impl NormIdentity {
    pub fn holds(&self) -> bool {
        self.lhs == self.rhs
    }
}

/// Evaluates both sides of the norm identity at one geometric point of `v`.
pub fn norm_identity_check(f: &RationalMapP1, v: &BerkPointP1, phi: &RationalFunction) -> Result<NormIdentity> {
    f.require_gates()?;
    if v.is_classical() {
        return Err(Error::UnsupportedPoint("norm identity needs a valuation"));
    }
    let n_v = rat_int(v.orbit_size());
    let mut lhs = BigRational::zero();
    for (w, e) in berk_fiber(f, v) {
        let val = semival_eval(&w, phi)?;
        let val = val.as_finite().expect("finite parameter");
        lhs += rat_int(w.orbit_size()) / &n_v * rat_int(e) * val;
    }
    let rhs = semival_eval(v, &norm(f, phi)?)?;
    Ok(NormIdentity { lhs, rhs: rhs.as_finite().expect("finite parameter").clone() })
}

/// Tameness with the witness constant `C` in `v(φ) <= C ord(φ)`. The Gauss
/// point is reported tame with witness 0 by convention; classical points
/// are not tame.
pub fn is_tame(v: &BerkPointP1) -> (bool, Option<BigRational>) {
    match v {
        BerkPointP1::Gauss => (true, Some(BigRational::zero())),
        BerkPointP1::Branch { t: Param::Finite(t), .. } => (true, Some(t.clone())),
        BerkPointP1::Branch { t: Param::Infinite, .. } => (false, None),
    }
}

/// Per-step sums `S_k = sum_{f^k(w)=v} m_{f^k}(w) |w(φ)|`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TameBoundTable {
    pub sums: Vec<BigRational>,
    pub bound: BigRational,
}

impl TameBoundTable {
    pub fn holds(&self) -> bool {
        self.sums.iter().all(|s| *s <= self.bound)
    }

    pub fn sup(&self) -> BigRational {
        self.sums.iter().max().cloned().unwrap_or_else(BigRational::zero)
    }
}

fn tame_bound(v: &BerkPointP1, phi: &RationalFunction) -> Result<BigRational> {
    match is_tame(v) {
        (true, Some(c)) => Ok(c * rat_int(2 * phi.degree())),
        _ => Err(Error::NotTame),
    }
}

/// `S_k` for `k = 0..=n`, computed from the divisor of `φ`: only branches
/// through its support contribute, and a branch point above `v_{x,t}` at a
/// support point `y` has value `(t/e)|ord_y φ|` and multiplicity `e`.
pub fn tame_bound_check(
    f: &RationalMapP1,
    v: &BerkPointP1,
    phi: &RationalFunction,
    n: usize,
) -> Result<TameBoundTable> {
    let bound = tame_bound(v, phi)?;
    f.require_gates()?;
    let (x, t) = match v {
        BerkPointP1::Gauss => return Ok(TameBoundTable { sums: vec![BigRational::zero(); n + 1], bound }),
        BerkPointP1::Branch { center, t: Param::Finite(t) } => (center, t),
        BerkPointP1::Branch { .. } => unreachable!(),
    };
    let n_x = rat_int(x.orbit_size());
    let support: Vec<(P1Point, BigRational)> = phi
        .divisor_support()
        .into_iter()
        .map(|y| {
            let w = rat_int(y.orbit_size()) * rat_int(phi.ord(&y).unwrap().unsigned_abs() as usize);
            (y, w)
        })
        .collect();
    let mut images: Vec<P1Point> = support.iter().map(|(y, _)| y.clone()).collect();
    let mut sums = Vec::with_capacity(n + 1);
    for _ in 0..=n {
        let s: BigRational =
            support.iter().zip(&images).filter(|(_, img)| *img == x).map(|((_, w), _)| w.clone()).sum();
        sums.push(s * t / &n_x);
        images = images.iter().map(|y| f.evaluate(y)).collect();
    }
    Ok(TameBoundTable { sums, bound })
}

/// `S_k` computed from the full unnormalized pullbacks of `δ_v`.
pub fn tame_bound_check_full(
    f: &RationalMapP1,
    v: &BerkPointP1,
    phi: &RationalFunction,
    n: usize,
    cap: usize,
) -> Result<(TameBoundTable, bool)> {
    let bound = tame_bound(v, phi)?;
    let it = iterate_berk_pullback(f, v, n, false, cap)?;
    let mut sums = Vec::with_capacity(it.measures.len());
    for mu in &it.measures {
        let mut s = BigRational::zero();
        for (w, c) in mu.iter() {
            let val = semival_eval(w, phi)?;
            s += rat_int(w.orbit_size()) * c * val.as_finite().expect("finite parameter").abs();
        }
        sums.push(s);
    }
    Ok((TameBoundTable { sums, bound }, it.truncated))
}

/// `mu_k = d^{-k} f^{k*} δ_v` (unnormalized when `normalize` is false).
pub fn iterate_berk_pullback(
    f: &RationalMapP1,
    v: &BerkPointP1,
    n: usize,
    normalize: bool,
    cap: usize,
) -> Result<Iteration<BerkPointP1>> {
    f.require_gates()?;
    iterate_with(AtomicMeasure::dirac(v.clone()), n, f.degree(), normalize, cap, |mu| {
        Ok(mu.pullback_by(|w| berk_fiber(f, w)))
    })
}

/// The test functional `sum_w mu(w) min{1, w(m_E)}` for a finite set `E` of
/// closed points: a branch point `v_{y,s}` has `w(m_E) = s` when `y` lies
/// in `E`, and 0 otherwise.
pub fn test_functional(mu: &AtomicMeasure<BerkPointP1>, e: &[P1Point]) -> BigRational {
    let mut out = BigRational::zero();
    for (w, c) in mu.iter() {
        if let BerkPointP1::Branch { center, t } = w {
            if e.contains(center) {
                out += rat_int(center.orbit_size()) * c * t.capped();
            }
        }
    }
    out
}

/// The test functional on `d^{-k} f^{k*} δ_v` for `k = 0..=n`, summed only
/// over the branches that end in `E`.
pub fn test_functional_sequence(
    f: &RationalMapP1,
    v: &BerkPointP1,
    e: &[P1Point],
    n: usize,
) -> Result<Vec<BigRational>> {
    f.require_gates()?;
    let (x, t) = match v {
        BerkPointP1::Gauss => return Ok(vec![BigRational::zero(); n + 1]),
        BerkPointP1::Branch { center, t } => (center, t),
    };
    let n_x = rat_int(x.orbit_size());
    let d = rat_int(f.degree());
    // Per point of E: its current iterate and accumulated multiplicity.
    let mut state: Vec<(P1Point, BigUint)> = e.iter().map(|y| (y.clone(), BigUint::one())).collect();
    let mut out = Vec::with_capacity(n + 1);
    for k in 0..=n {
        let mut s = BigRational::zero();
        let dk: BigRational = Pow::pow(&d, k as u32);
        for ((img, mult), y) in state.iter().zip(e) {
            if img == x {
                let m = BigRational::from_integer(BigInt::from(mult.clone()));
                let tk = match t {
                    Param::Finite(t) => Param::Finite(t / &m),
                    Param::Infinite => Param::Infinite,
                };
                s += rat_int(y.orbit_size()) / &n_x * &m / &dk * tk.capped();
            }
        }
        out.push(s);
        for (img, mult) in state.iter_mut() {
            *mult *= BigUint::from(f.multiplicity(img));
            *img = f.evaluate(img);
        }
    }
    Ok(out)
}

/// One row of a [`GaussReport`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GaussRow {
    pub step: usize,
    pub support_size: usize,
    pub max_branch_mass: BigRational,
    /// Mass of `red^{-1}(x)` for every reduction `x` in the support.
    pub reduction_masses: BTreeMap<P1Point, BigRational>,
    pub test_functional: BigRational,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GaussReport {
    pub rows: Vec<GaussRow>,
    pub truncated: bool,
    /// Set when the center of the start lies in the exceptional set.
    pub exceptional_start: bool,
}

/// Convergence data for `d^{-k} f^{k*} δ_v`, `k = 0..=n`.
pub fn gauss_convergence_report(
    f: &RationalMapP1,
    v: &BerkPointP1,
    e: &[P1Point],
    n: usize,
    cap: usize,
) -> Result<GaussReport> {
    let it = iterate_berk_pullback(f, v, n, true, cap)?;
    let exceptional_start = match v.center() {
        None => false,
        Some(x) => f.exceptional_set()?.iter().any(|c| c.points.contains(x)),
    };
    let rows = it
        .measures
        .iter()
        .enumerate()
        .map(|(step, mu)| {
            let mut reduction_masses = BTreeMap::new();
            for (w, c) in mu.iter() {
                *reduction_masses.entry(reduction(w)).or_insert_with(BigRational::zero) +=
                    rat_int(w.orbit_size()) * c;
            }
            GaussRow {
                step,
                support_size: mu.support_size(),
                max_branch_mass: mu.max_atom_mass(),
                reduction_masses,
                test_functional: test_functional(mu, e),
            }
        })
        .collect();
    Ok(GaussReport { rows, truncated: it.truncated, exceptional_start })
}
