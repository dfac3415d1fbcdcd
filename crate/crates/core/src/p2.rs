//! Two surface constructions on `P^2`: symmetric-square maps
//! `f = Sym^2(h)` and local germs of a map at a fixed closed point.
//!
//! `P^2` is the quotient of `P^1 x P^1` by the coordinate swap `π`, so a
//! point of `P^2` is an unordered pair of geometric points of `P^1`. A
//! [`P2Point`] records the Frobenius orbits of the two coordinates and
//! whether they coincide. When both coordinates lie in one orbit, or in
//! orbits of non-coprime degrees, several Galois orbits of pairs share the
//! same record; fibers count geometric points, so [`SymFiberEntry::count`]
//! carries that information.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use crate::algebra::linalg::Echelon;
use crate::algebra::{FiniteField, FqField};
use crate::error::{Error, Result};
use crate::scheme::{P1Point, RationalMapP1};

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum P2Point {
    /// `{α, α}` for `α` in the orbit.
    Diagonal(P1Point),
    /// `{α, β}` with `α ≠ β`, `α` in the first orbit and `β` in the second;
    /// the orbits are stored in canonical order and may coincide.
    Pair(P1Point, P1Point),
}

impl P2Point {
    /// The unordered pair `{a, b}`; equal orbits of degree one give the
    /// diagonal point.
    pub fn new(a: P1Point, b: P1Point) -> Result<Self> {
        if !a.is_closed() || !b.is_closed() {
            return Err(Error::NotClosedPoint);
        }
        if a == b && a.orbit_size() == 1 {
            return Ok(P2Point::Diagonal(a));
        }
        Ok(if a <= b { P2Point::Pair(a, b) } else { P2Point::Pair(b, a) })
    }

    pub fn diagonal(a: P1Point) -> Result<Self> {
        if !a.is_closed() {
            return Err(Error::NotClosedPoint);
        }
        Ok(P2Point::Diagonal(a))
    }

    pub fn is_diagonal(&self) -> bool {
        matches!(self, P2Point::Diagonal(_))
    }

    /// Ramification of `π` at the point: 2 on the diagonal, 1 off it.
    pub fn v_pi(&self) -> usize {
        if self.is_diagonal() {
            2
        } else {
            1
        }
    }
}

/// Preimages of one geometric point of the target sharing a record and a
/// multiplicity.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct SymFiberEntry {
    pub point: P2Point,
    pub multiplicity: usize,
    pub count: usize,
}

/// `Sym^2(h)`, of degree `deg h` on `P^2`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymProdMap {
    h: RationalMapP1,
}

impl SymProdMap {
    pub fn new(h: RationalMapP1) -> Self {
        SymProdMap { h }
    }

    pub fn factor_map(&self) -> &RationalMapP1 {
        &self.h
    }

    pub fn degree(&self) -> usize {
        self.h.degree()
    }

    pub fn iterate(&self, n: usize) -> Result<SymProdMap> {
        Ok(SymProdMap { h: self.h.iterate(n)? })
    }

    /// `f(x)`. Fails when the record of `x` does not determine whether the
    /// image is diagonal.
    pub fn evaluate(&self, x: &P2Point) -> Result<P2Point> {
        match x {
            P2Point::Diagonal(a) => Ok(P2Point::Diagonal(self.h.evaluate(a))),
            P2Point::Pair(a, b) => {
                let (ha, hb) = (self.h.evaluate(a), self.h.evaluate(b));
                if ha != hb {
                    return P2Point::new(ha, hb);
                }
                if ha.orbit_size() == 1 {
                    return Ok(P2Point::Diagonal(ha));
                }
                Err(Error::UnsupportedPoint("image pair is not determined by the orbits"))
            }
        }
    }

    /// `m_f(x) = e_h(a) e_h(b) v_π(f(x)) / v_π(x)`.
    pub fn multiplicity(&self, x: &P2Point) -> Result<usize> {
        let y = self.evaluate(x)?;
        let (a, b) = match x {
            P2Point::Diagonal(a) => (a, a),
            P2Point::Pair(a, b) => (a, b),
        };
        Ok(self.h.multiplicity(a) * self.h.multiplicity(b) * y.v_pi() / x.v_pi())
    }

    /// Preimages of one geometric point of `x`, grouped by record, in
    /// canonical order. The multiplicities weighted by counts sum to `d^2`.
    pub fn sym_fiber(&self, x: &P2Point) -> Result<Vec<SymFiberEntry>> {
        self.h.require_gates()?;
        let mut acc: BTreeMap<(P2Point, usize), usize> = BTreeMap::new();
        let mut push = |p: P2Point, m: usize, c: usize| {
            if c > 0 {
                *acc.entry((p, m)).or_insert(0) += c;
            }
        };
        // Geometric points of each preimage orbit over one point of the target.
        let over = |y: &P1Point| -> Vec<(P1Point, usize, usize)> {
            self.h.fiber(y).into_iter().map(|(z, e)| (z.clone(), e, z.orbit_size() / y.orbit_size())).collect()
        };
        match x {
            P2Point::Diagonal(a) => {
                let fa = over(a);
                for (i, (y, e, c)) in fa.iter().enumerate() {
                    push(P2Point::Diagonal(y.clone()), e * e, *c);
                    push(P2Point::Pair(y.clone(), y.clone()), 2 * e * e, c * (c.saturating_sub(1)) / 2);
                    for (z, f, k) in &fa[i + 1..] {
                        push(P2Point::new(y.clone(), z.clone())?, 2 * e * f, c * k);
                    }
                }
            }
            P2Point::Pair(a, b) => {
                let (fa, fb) = (over(a), over(b));
                for (y, e, c) in &fa {
                    for (z, f, k) in &fb {
                        let p = if y == z {
                            P2Point::Pair(y.clone(), y.clone())
                        } else {
                            P2Point::new(y.clone(), z.clone())?
                        };
                        push(p, e * f, c * k);
                    }
                }
            }
        }
        Ok(acc.into_iter().map(|((point, multiplicity), count)| SymFiberEntry { point, multiplicity, count }).collect())
    }

    /// Whether the fiber of `x` is `x` itself with multiplicity `d^2`.
    pub fn is_totally_invariant_point(&self, x: &P2Point) -> Result<bool> {
        let d = self.degree();
        let fib = self.sym_fiber(x)?;
        Ok(fib == vec![SymFiberEntry { point: x.clone(), multiplicity: d * d, count: 1 }])
    }
}

/// Total weight `sum m * count` of a symmetric fiber.
pub fn sym_fiber_mass(fiber: &[SymFiberEntry]) -> usize {
    fiber.iter().map(|e| e.multiplicity * e.count).sum()
}

/// Both sides of `m_{f^n}(x) = m_{h^n}(a) m_{h^n}(b) v_π(f^n x) / v_π(x)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UedaIdentity {
    /// Product of the one-step multiplicities along the orbit, each read
    /// off a symmetric fiber.
    pub chain: usize,
    /// The product formula with multiplicities of `h^n`.
    pub formula: usize,
}

impl UedaIdentity {
    pub fn holds(&self) -> bool {
        self.chain == self.formula
    }
}

pub fn ueda_multiplicity_identity_check(h: &RationalMapP1, x: &P2Point, n: usize) -> Result<UedaIdentity> {
    let f = SymProdMap::new(h.clone());
    let mut chain = 1;
    let mut cur = x.clone();
    for _ in 0..n {
        let next = f.evaluate(&cur)?;
        let entry = f
            .sym_fiber(&next)?
            .into_iter()
            .find(|e| e.point == cur)
            .ok_or(Error::PointNotInFiber)?;
        chain *= entry.multiplicity;
        cur = next;
    }
    let hn = h.iterate(n.max(1))?;
    let (a, b) = match x {
        P2Point::Diagonal(a) => (a, a),
        P2Point::Pair(a, b) => (a, b),
    };
    let formula = if n == 0 { 1 } else { hn.multiplicity(a) * hn.multiplicity(b) * cur.v_pi() / x.v_pi() };
    Ok(UedaIdentity { chain, formula })
}

/// A polynomial in the local coordinates `u, w`, keyed by exponents.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BiPoly {
    terms: BTreeMap<(usize, usize), u64>,
}

impl BiPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn from_terms(field: &FqField, terms: impl IntoIterator<Item = ((usize, usize), u64)>) -> Self {
        let mut p = Self::zero();
        for (e, c) in terms {
            p.add_term(field, e, c);
        }
        p
    }

    pub fn u() -> Self {
        BiPoly { terms: [((1, 0), 1)].into_iter().collect() }
    }

    pub fn w() -> Self {
        BiPoly { terms: [((0, 1), 1)].into_iter().collect() }
    }

    pub fn terms(&self) -> &BTreeMap<(usize, usize), u64> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, i: usize, j: usize) -> u64 {
        self.terms.get(&(i, j)).copied().unwrap_or(0)
    }

    pub fn total_degree(&self) -> usize {
        self.terms.keys().map(|(i, j)| i + j).max().unwrap_or(0)
    }

    fn add_term(&mut self, field: &FqField, e: (usize, usize), c: u64) {
        let v = field.add(&self.coeff(e.0, e.1), &c);
        if v == 0 {
            self.terms.remove(&e);
        } else {
            self.terms.insert(e, v);
        }
    }

    pub fn add(&self, field: &FqField, other: &BiPoly) -> BiPoly {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(field, *e, *c);
        }
        out
    }

    pub fn scale(&self, field: &FqField, c: u64) -> BiPoly {
        BiPoly::from_terms(field, self.terms.iter().map(|(e, x)| (*e, field.mul(x, &c))))
    }

    /// Product with all terms of total degree `>= trunc` dropped.
    pub fn mul_trunc(&self, field: &FqField, other: &BiPoly, trunc: usize) -> BiPoly {
        let mut out = BiPoly::zero();
        for ((i, j), a) in &self.terms {
            for ((k, l), b) in &other.terms {
                if i + j + k + l < trunc {
                    out.add_term(field, (i + k, j + l), field.mul(a, b));
                }
            }
        }
        out
    }

    pub fn truncate(&self, trunc: usize) -> BiPoly {
        BiPoly { terms: self.terms.iter().filter(|((i, j), _)| i + j < trunc).map(|(e, c)| (*e, *c)).collect() }
    }

    /// `self(a, b)` truncated below total degree `trunc`.
    pub fn substitute(&self, field: &FqField, a: &BiPoly, b: &BiPoly, trunc: usize) -> BiPoly {
        let one = BiPoly { terms: [((0, 0), 1)].into_iter().collect() }.truncate(trunc);
        let max_i = self.terms.keys().map(|e| e.0).max().unwrap_or(0);
        let max_j = self.terms.keys().map(|e| e.1).max().unwrap_or(0);
        let powers = |x: &BiPoly, n: usize| {
            let mut v = vec![one.clone()];
            for k in 0..n {
                let next = v[k].mul_trunc(field, x, trunc);
                v.push(next);
            }
            v
        };
        let (pa, pb) = (powers(a, max_i), powers(b, max_j));
        let mut out = BiPoly::zero();
        for ((i, j), c) in &self.terms {
            out = out.add(field, &pa[*i].mul_trunc(field, &pb[*j], trunc).scale(field, *c));
        }
        out
    }
}

/// The germ `(u, w) -> (u'(u, w), w'(u, w))` of a degree-`d` map of `P^2`
/// at a fixed closed point.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocalMapGerm {
    field: FqField,
    u: BiPoly,
    w: BiPoly,
    degree: usize,
}

/// Dimension of the ambient space.
pub const GERM_DIM: u32 = 2;

impl LocalMapGerm {
    pub fn new(field: FqField, u: BiPoly, w: BiPoly, degree: usize) -> Result<Self> {
        if u.coeff(0, 0) != 0 || w.coeff(0, 0) != 0 {
            return Err(Error::InvalidGerm("components must vanish at the origin"));
        }
        if degree == 0 {
            return Err(Error::InvalidGerm("degree must be positive"));
        }
        Ok(LocalMapGerm { field, u, w, degree })
    }

    pub fn field(&self) -> &FqField {
        &self.field
    }

    pub fn components(&self) -> (&BiPoly, &BiPoly) {
        (&self.u, &self.w)
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// `d^m + 2`.
    pub fn truncation_cap(&self) -> usize {
        self.degree.pow(GERM_DIM) + 2
    }

    /// Linear part `[[∂u'/∂u, ∂u'/∂w], [∂w'/∂u, ∂w'/∂w]]` at the origin.
    pub fn jacobian(&self) -> [[u64; 2]; 2] {
        [[self.u.coeff(1, 0), self.u.coeff(0, 1)], [self.w.coeff(1, 0), self.w.coeff(0, 1)]]
    }

    /// `self ∘ other`, truncated below total degree `trunc`.
    pub fn compose(&self, other: &LocalMapGerm, trunc: usize) -> LocalMapGerm {
        let f = &self.field;
        LocalMapGerm {
            field: f.clone(),
            u: self.u.substitute(f, &other.u, &other.w, trunc),
            w: self.w.substitute(f, &other.u, &other.w, trunc),
            degree: self.degree * other.degree,
        }
    }
}

/// `dim k[u,w] / (I + m^n)` for the ideal `I` of the germ.
pub fn truncated_colength(g: &LocalMapGerm, n: usize) -> usize {
    let f = &g.field;
    let monomials: Vec<(usize, usize)> = (0..n).flat_map(|s| (0..=s).map(move |i| (i, s - i))).collect();
    let index: BTreeMap<(usize, usize), usize> = monomials.iter().enumerate().map(|(k, e)| (*e, k)).collect();
    let mut basis = Echelon::new(f);
    for gen in [&g.u, &g.w] {
        for &(i, j) in &monomials {
            let mut row = vec![0u64; monomials.len()];
            for ((a, b), c) in gen.terms() {
                if let Some(&k) = index.get(&(a + i, b + j)) {
                    row[k] = f.add(&row[k], c);
                }
            }
            basis.insert(row);
        }
    }
    monomials.len() - basis.len()
}

/// Colength of the germ's ideal in `k[[u, w]]`, found by increasing the
/// truncation order until consecutive values agree.
pub fn local_multiplicity(g: &LocalMapGerm) -> Result<usize> {
    let cap = g.truncation_cap();
    let mut prev = truncated_colength(g, 1);
    for n in 2..=cap {
        let cur = truncated_colength(g, n);
        if cur == prev {
            return Ok(cur);
        }
        prev = cur;
    }
    Err(Error::NonCofinite { cap })
}

/// Whether the fixed point of the germ is totally invariant, i.e. its local
/// multiplicity is `d^m`.
pub fn germ_is_totally_invariant(g: &LocalMapGerm) -> Result<bool> {
    Ok(local_multiplicity(g)? == g.degree.pow(GERM_DIM))
}

fn nilpotent(f: &FqField, j: [[u64; 2]; 2]) -> bool {
    let trace = f.add(&j[0][0], &j[1][1]);
    let det = f.sub(&f.mul(&j[0][0], &j[1][1]), &f.mul(&j[0][1], &j[1][0]));
    trace == 0 && det == 0
}

/// Whether the linear part of the germ is nilpotent.
pub fn is_superattracting_germ(g: &LocalMapGerm) -> bool {
    nilpotent(&g.field, g.jacobian())
}

/// Whether one of the first `max_iter` iterates, composed symbolically and
/// truncated at total degree `d^m + 2`, has vanishing linear part.
pub fn is_superattracting_by_iteration(g: &LocalMapGerm, max_iter: usize) -> bool {
    let trunc = g.truncation_cap();
    let mut it = LocalMapGerm { u: g.u.truncate(trunc), w: g.w.truncate(trunc), ..g.clone() };
    for _ in 0..max_iter {
        if it.jacobian() == [[0, 0], [0, 0]] {
            return true;
        }
        it = it.compose(g, trunc);
    }
    false
}

/// Default number of iterates for [`is_superattracting_by_iteration`].
pub const DEFAULT_MAX_ITER: usize = 4;

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::PolyRing;

    fn f7() -> FqField {
        FqField::prime(7).unwrap()
    }

    fn square(f: &FqField) -> SymProdMap {
        SymProdMap::new(RationalMapP1::polynomial(f.clone(), PolyRing::new(f).monomial(1, 2)).unwrap())
    }

    fn pt(f: &FqField, c: u64) -> P1Point {
        P1Point::rational(f, c)
    }

    fn germ(f: &FqField, u: &[((usize, usize), u64)], w: &[((usize, usize), u64)], d: usize) -> LocalMapGerm {
        LocalMapGerm::new(
            f.clone(),
            BiPoly::from_terms(f, u.iter().copied()),
            BiPoly::from_terms(f, w.iter().copied()),
            d,
        )
        .unwrap()
    }

    fn fs(f: &FqField) -> LocalMapGerm {
        germ(f, &[((1, 0), 1), ((0, 2), 1)], &[((2, 0), 1)], 2)
    }

    fn entry(p: P2Point, m: usize, c: usize) -> SymFiberEntry {
        SymFiberEntry { point: p, multiplicity: m, count: c }
    }

    #[test]
    fn sym_fiber_off_diagonal() {
        let f = f7();
        let fib = square(&f).sym_fiber(&P2Point::new(pt(&f, 1), pt(&f, 2)).unwrap()).unwrap();
        let mut expect: Vec<_> = [(1, 3), (1, 4), (6, 3), (6, 4)]
            .iter()
            .map(|&(a, b)| entry(P2Point::new(pt(&f, a), pt(&f, b)).unwrap(), 1, 1))
            .collect();
        expect.sort();
        assert_eq!(fib, expect);
    }

    #[test]
    fn sym_fiber_diagonal() {
        let f = f7();
        let sq = square(&f);
        let zero = P2Point::Diagonal(pt(&f, 0));
        assert_eq!(sq.sym_fiber(&zero).unwrap(), vec![entry(zero.clone(), 4, 1)]);
        // Folding P^1 x P^1 by hand: (1,1),(6,6) each once, (1,6),(6,1) fold to one pair.
        let one = P2Point::Diagonal(pt(&f, 1));
        let fib = sq.sym_fiber(&one).unwrap();
        let mut expect = vec![
            entry(P2Point::Diagonal(pt(&f, 1)), 1, 1),
            entry(P2Point::Diagonal(pt(&f, 6)), 1, 1),
            entry(P2Point::new(pt(&f, 1), pt(&f, 6)).unwrap(), 2, 1),
        ];
        expect.sort();
        assert_eq!(fib, expect);
        assert_eq!(sym_fiber_mass(&fib), 4);
    }

    #[test]
    fn sym_fiber_over_nonsplit_points() {
        // Over {-1, -1} the preimages are {i, i}, {-i, -i} and {i, -i}.
        let f = f7();
        let sq = square(&f);
        let r = PolyRing::new(&f);
        let i_orbit = P1Point::Finite(r.from_coeffs(vec![1, 0, 1]));
        let fib = sq.sym_fiber(&P2Point::Diagonal(pt(&f, 6))).unwrap();
        assert_eq!(
            fib,
            vec![entry(P2Point::Diagonal(i_orbit.clone()), 1, 2), entry(P2Point::Pair(i_orbit.clone(), i_orbit), 2, 1)]
        );
        assert_eq!(sym_fiber_mass(&fib), 4);
    }

    #[test]
    fn total_invariance_on_symmetric_square() {
        let f = f7();
        let sq = square(&f);
        assert!(sq.is_totally_invariant_point(&P2Point::Diagonal(pt(&f, 0))).unwrap());
        assert!(!sq.is_totally_invariant_point(&P2Point::Diagonal(pt(&f, 1))).unwrap());
        assert!(sq.is_totally_invariant_point(&P2Point::new(P1Point::Infinity, pt(&f, 0)).unwrap()).unwrap());
    }

    #[test]
    fn local_multiplicity_examples() {
        let f = f7();
        assert_eq!(local_multiplicity(&fs(&f)), Ok(4));
        assert_eq!(local_multiplicity(&germ(&f, &[((1, 0), 1)], &[((0, 1), 1)], 1)), Ok(1));
        assert_eq!(local_multiplicity(&germ(&f, &[((2, 0), 1)], &[((0, 3), 1)], 3)), Ok(6));
        // (u, uw) leaves the w-axis in the fiber.
        assert_eq!(
            local_multiplicity(&germ(&f, &[((1, 0), 1)], &[((1, 1), 1)], 2)),
            Err(Error::NonCofinite { cap: 6 })
        );
    }

    #[test]
    fn colength_agrees_after_return() {
        let f = f7();
        let g = fs(&f);
        let m = local_multiplicity(&g).unwrap();
        let n = (2..).find(|&n| truncated_colength(&g, n) == m).unwrap();
        assert_eq!(truncated_colength(&g, n + 1), m);
    }

    #[test]
    fn fs_point_is_totally_invariant_but_not_superattracting() {
        let f = f7();
        let g = fs(&f);
        assert!(germ_is_totally_invariant(&g).unwrap());
        assert!(!is_superattracting_germ(&g));
        assert!(!is_superattracting_by_iteration(&g, DEFAULT_MAX_ITER));
    }

    #[test]
    fn superattracting_examples() {
        let f = f7();
        let g = germ(&f, &[((0, 2), 1)], &[((2, 0), 1)], 2);
        assert!(is_superattracting_germ(&g) && is_superattracting_by_iteration(&g, 1));
        let g = germ(&f, &[((0, 1), 1)], &[((2, 0), 1)], 2);
        assert!(is_superattracting_germ(&g));
        assert!(!is_superattracting_by_iteration(&g, 1));
        assert!(is_superattracting_by_iteration(&g, 2));
    }

    #[test]
    fn germ_rejects_moving_origin() {
        let f = f7();
        let u = BiPoly::from_terms(&f, [((0, 0), 1), ((1, 0), 1)]);
        assert!(LocalMapGerm::new(f.clone(), u, BiPoly::w(), 2).is_err());
    }

    #[test]
    fn ueda_identity_examples() {
        let f = f7();
        let r = PolyRing::new(&f);
        let h = RationalMapP1::polynomial(f.clone(), r.monomial(1, 2)).unwrap();
        let id = ueda_multiplicity_identity_check(&h, &P2Point::Diagonal(pt(&f, 0)), 2).unwrap();
        assert_eq!((id.chain, id.formula), (16, 16));
        let id = ueda_multiplicity_identity_check(&h, &P2Point::new(pt(&f, 1), pt(&f, 2)).unwrap(), 1).unwrap();
        assert_eq!((id.chain, id.formula), (1, 1));
        let k = RationalMapP1::new(f.clone(), r.pow(&r.linear(&2), 2), r.monomial(1, 2)).unwrap();
        let id = ueda_multiplicity_identity_check(&k, &P2Point::Diagonal(pt(&f, 2)), 1).unwrap();
        assert_eq!((id.chain, id.formula), (4, 4));
        // Off-diagonal pair folding onto the diagonal: {1, 6} -> {1, 1}.
        let id = ueda_multiplicity_identity_check(&h, &P2Point::new(pt(&f, 1), pt(&f, 6)).unwrap(), 3).unwrap();
        assert!(id.holds());
        assert_eq!(id.chain, 2);
    }
}
