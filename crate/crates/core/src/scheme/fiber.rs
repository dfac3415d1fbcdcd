//! Images, fibers and multiplicities of closed points.
//!
//! The fiber over an orbit `g` of degree `n` is read off
//! `G = sum g_i P^i Q^(n-i)`: its roots are the finite preimages and the
//! multiplicity of a root is the ramification index there, while the drop
//! `d*n - deg G` is the index at infinity. Squarefree classes of `G` that
//! contain several orbits are split over `E = F_q[t]/(g)` by intersecting
//! with `P - tQ`, whose roots are the preimages of the single point `t`.

use alloc::vec;
use alloc::vec::Vec;

use super::{P1Point, RationalMapP1};
use crate::algebra::factor::{factor, squarefree};
use crate::algebra::linalg::krylov_relation;
use crate::algebra::{ExtField, FiniteField, FqField, Poly, PolyRing};

/// Seed for internal equal-degree splitting; fibers do not depend on it.
const SPLIT_SEED: u64 = 0x0066_6962_6572;

pub type Fiber = Vec<(P1Point, usize)>;

/// Minimal polynomial over the base field of `beta` in `e`.
pub fn minimal_polynomial(e: &ExtField<FqField>, beta: &Poly<u64>) -> Poly<u64> {
    let n = e.degree();
    let mut cur = e.one();
    let c = krylov_relation(e.base(), n, || {
        let v = e.to_vector(&cur);
        cur = e.mul(&cur, beta);
        v
    });
    monic_from_relation(e.base(), c)
}

fn monic_from_relation(f: &FqField, c: Vec<u64>) -> Poly<u64> {
    // z^k = sum c_i z^i  ->  z^k - sum c_i z^i.
    let mut coeffs: Vec<u64> = c.iter().map(|x| f.neg(x)).collect();
    coeffs.push(1);
    PolyRing::new(f).from_coeffs(coeffs)
}

/// Minimal polynomial over `F_q` of the class of `z` in `E[z]/(u)` for a
/// monic irreducible `u` over `E`.
fn orbit_of_ext_factor(e: &ExtField<FqField>, u: &Poly<Poly<u64>>) -> Poly<u64> {
    let er = PolyRing::new(e);
    let j = u.deg();
    if j == 1 {
        return minimal_polynomial(e, &e.neg(&u.coeffs()[0]));
    }
    let n = e.degree();
    let x = er.x();
    let mut cur = er.one();
    let c = krylov_relation(e.base(), n * j, || {
        let mut v = Vec::with_capacity(n * j);
        for i in 0..j {
            v.extend(e.to_vector(&er.coeff_or_zero(&cur, i)));
        }
        cur = er.mulmod(&cur, &x, u);
        v
    });
    monic_from_relation(e.base(), c)
}

impl RationalMapP1 {
    /// The extension `F_q[t]/(g)` for an orbit polynomial `g`.
    pub(crate) fn residue_field(&self, g: &Poly<u64>) -> ExtField<FqField> {
        ExtField::new_trusted(self.field().clone(), g.clone())
    }

    /// Image of a point. The generic point maps to itself.
    pub fn evaluate(&self, x: &P1Point) -> P1Point {
        let f = self.field();
        let r = self.ring();
        match x {
            P1Point::Generic => P1Point::Generic,
            P1Point::Infinity => {
                let (dp, dq) = (self.num().deg(), self.den().deg());
                if dp > dq {
                    P1Point::Infinity
                } else if dp == dq {
                    let c = f.div(self.num().leading().unwrap(), self.den().leading().unwrap());
                    P1Point::rational(f, c.unwrap())
                } else {
                    P1Point::rational(f, 0)
                }
            }
            P1Point::Finite(g) => {
                if g.deg() == 1 {
                    let c = f.neg(&g.coeffs()[0]);
                    let q = r.eval(self.den(), &c);
                    return match f.inv(&q) {
                        None => P1Point::Infinity,
                        Some(qi) => P1Point::rational(f, f.mul(&r.eval(self.num(), &c), &qi)),
                    };
                }
                let e = self.residue_field(g);
                let t = e.generator();
                let q = PolyRing::new(&e).eval(&self.lift(&e, self.den()), &t);
                match e.inv(&q) {
                    None => P1Point::Infinity,
                    Some(qi) => {
                        let p = PolyRing::new(&e).eval(&self.lift(&e, self.num()), &t);
                        P1Point::Finite(minimal_polynomial(&e, &e.mul(&p, &qi)))
                    }
                }
            }
        }
    }

    fn lift(&self, e: &ExtField<FqField>, a: &Poly<u64>) -> Poly<Poly<u64>> {
        PolyRing::new(e).from_coeffs(a.coeffs().iter().map(|c| e.embed(*c)).collect())
    }

    /// The fiber polynomial `G` of a finite orbit and the ramification
    /// index at infinity (0 when infinity is not a preimage).
    pub fn fiber_polynomial(&self, g: &Poly<u64>) -> (Poly<u64>, usize) {
        let n = g.deg();
        let big_g = self.ring().homogeneous_substitute(g, n, self.num(), self.den());
        let e_inf = self.degree() * n - big_g.deg();
        (big_g, e_inf)
    }

    /// Preimages of `y` with their multiplicities, in canonical order.
    pub fn fiber(&self, y: &P1Point) -> Fiber {
        let r = self.ring();
        let mut out: Fiber = Vec::new();
        match y {
            P1Point::Generic => return vec![(P1Point::Generic, self.degree())],
            P1Point::Infinity => {
                for (h, m) in factor(&r, self.den(), SPLIT_SEED).factors {
                    out.push((P1Point::Finite(h), m));
                }
                let (dp, dq) = (self.num().deg(), self.den().deg());
                if dp > dq {
                    out.push((P1Point::Infinity, dp - dq));
                }
            }
            P1Point::Finite(g) => {
                let (big_g, e_inf) = self.fiber_polynomial(g);
                if e_inf > 0 {
                    out.push((P1Point::Infinity, e_inf));
                }
                for (s, m) in squarefree(&r, &big_g) {
                    for h in self.split_class(g, &s) {
                        out.push((P1Point::Finite(h), m));
                    }
                }
            }
        }
        out.sort();
        out
    }

    /// Splits a squarefree product of preimage orbits of `g` into orbits.
    fn split_class(&self, g: &Poly<u64>, s: &Poly<u64>) -> Vec<Poly<u64>> {
        let n = g.deg();
        if s.deg() == n {
            return vec![s.clone()];
        }
        let r = self.ring();
        if n == 1 {
            return factor(&r, s, SPLIT_SEED).factors.into_iter().map(|(h, _)| h).collect();
        }
        let e = self.residue_field(g);
        let er = PolyRing::new(&e);
        let t = e.generator();
        let pt = er.sub(&self.lift(&e, self.num()), &er.scale(&self.lift(&e, self.den()), &t));
        let u = er.gcd(&pt, &er.rem(&self.lift(&e, s), &pt));
        debug_assert_eq!(u.deg() * n, s.deg());
        let parts = factor(&er, &u, SPLIT_SEED).factors;
        if parts.len() == 1 {
            return vec![s.clone()];
        }
        parts.iter().map(|(ui, _)| orbit_of_ext_factor(&e, ui)).collect()
    }

    /// Ramification index at a closed point; `d` at the generic point.
    pub fn multiplicity(&self, x: &P1Point) -> usize {
        let r = self.ring();
        match x {
            P1Point::Generic => self.degree(),
            P1Point::Infinity => match self.evaluate(x) {
                P1Point::Infinity => self.num().deg() - self.den().deg(),
                P1Point::Finite(h) => self.fiber_polynomial(&h).1,
                P1Point::Generic => unreachable!(),
            },
            P1Point::Finite(g) => match self.evaluate(x) {
                P1Point::Infinity => r.valuation(self.den(), g),
                P1Point::Finite(h) => r.valuation(&self.fiber_polynomial(&h).0, g),
                P1Point::Generic => unreachable!(),
            },
        }
    }

    /// Whether `m_{g∘f}(x) = m_f(x) m_g(f(x))`.
    pub fn multiplicativity_check(&self, g: &RationalMapP1, x: &P1Point) -> crate::Result<bool> {
        let gf = self.then(g)?;
        Ok(gf.multiplicity(x) == self.multiplicity(x) * g.multiplicity(&self.evaluate(x)))
    }
}

/// Number of geometric points, counted with multiplicity, in a fiber.
pub fn geometric_mass(fiber: &Fiber) -> usize {
    fiber.iter().map(|(x, m)| x.orbit_size() * m).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::factor::is_irreducible;

    fn f7() -> FqField {
        FqField::prime(7).unwrap()
    }

    fn square(f: &FqField) -> RationalMapP1 {
        RationalMapP1::polynomial(f.clone(), PolyRing::new(f).monomial(1, 2)).unwrap()
    }

    /// (z + 5)^2 / z^2.
    fn h(f: &FqField) -> RationalMapP1 {
        let r = PolyRing::new(f);
        RationalMapP1::new(f.clone(), r.pow(&r.linear(&2), 2), r.monomial(1, 2)).unwrap()
    }

    #[test]
    fn evaluate_examples() {
        let f = f7();
        let sq = square(&f);
        assert_eq!(sq.evaluate(&P1Point::rational(&f, 3)), P1Point::rational(&f, 2));
        assert_eq!(h(&f).evaluate(&P1Point::rational(&f, 0)), P1Point::Infinity);
        assert_eq!(sq.evaluate(&P1Point::Generic), P1Point::Generic);
        assert_eq!(sq.evaluate(&P1Point::Infinity), P1Point::Infinity);
        // h(oo) = 1, h(2) = 49/4 = 0.
        assert_eq!(h(&f).evaluate(&P1Point::Infinity), P1Point::rational(&f, 1));
        assert_eq!(h(&f).evaluate(&P1Point::rational(&f, 2)), P1Point::rational(&f, 0));
    }

    #[test]
    fn evaluate_on_quadratic_orbit() {
        // Roots of z^2+1 are +-i; their squares are -1.
        let f = f7();
        let r = PolyRing::new(&f);
        let x = P1Point::Finite(r.from_coeffs(vec![1, 0, 1]));
        assert_eq!(square(&f).evaluate(&x), P1Point::rational(&f, 6));
        // z^2 + z + 3 is irreducible (discriminant 1 - 12 = 3 is a non-square);
        // the image orbit under squaring is again quadratic.
        let g = r.from_coeffs(vec![3, 1, 1]);
        assert!(is_irreducible(&r, &g));
        let img = square(&f).evaluate(&P1Point::Finite(g.clone()));
        // Oracle: if a, b are the roots then a^2 + b^2 = 1 - 6 and a^2 b^2 = 9.
        assert_eq!(img, P1Point::Finite(r.from_coeffs(vec![2, 5, 1])));
    }

    #[test]
    fn fiber_examples() {
        let f = f7();
        let r = PolyRing::new(&f);
        let sq = square(&f);
        assert_eq!(
            sq.fiber(&P1Point::rational(&f, 2)),
            vec![(P1Point::rational(&f, 4), 1), (P1Point::rational(&f, 3), 1)]
        );
        assert_eq!(sq.fiber(&P1Point::rational(&f, 0)), vec![(P1Point::rational(&f, 0), 2)]);
        let fib = sq.fiber(&P1Point::Finite(r.from_coeffs(vec![1, 0, 1])));
        assert_eq!(fib.len(), 2);
        assert!(fib.iter().all(|(x, m)| x.orbit_size() == 2 && *m == 1));
        assert_eq!(sq.fiber(&P1Point::Generic), vec![(P1Point::Generic, 2)]);
        assert_eq!(sq.fiber(&P1Point::Infinity), vec![(P1Point::Infinity, 2)]);
    }

    #[test]
    fn fiber_over_infinity_and_one_for_h() {
        let f = f7();
        let hh = h(&f);
        assert_eq!(hh.fiber(&P1Point::Infinity), vec![(P1Point::rational(&f, 0), 2)]);
        // h(z) = 1 iff (z+5)^2 = z^2 iff 10 z + 25 = 0, a single finite root
        // 3z = -4, z = 1; the other preimage is infinity.
        assert_eq!(
            hh.fiber(&P1Point::rational(&f, 1)),
            vec![(P1Point::Infinity, 1), (P1Point::rational(&f, 1), 1)]
        );
    }

    #[test]
    fn fiber_split_over_extension() {
        // Preimages of an orbit of degree 2 under z^2 that split into two
        // orbits must be found via the extension route.
        let f = f7();
        let r = PolyRing::new(&f);
        let sq = square(&f);
        for y in crate::scheme::closed_points_up_to(&f, 3) {
            let fib = sq.fiber(&y);
            assert_eq!(geometric_mass(&fib), 2 * y.orbit_size(), "{y:?}");
            for (x, m) in &fib {
                assert_eq!(sq.evaluate(x), y);
                assert_eq!(sq.multiplicity(x), *m);
                if let P1Point::Finite(g) = x {
                    assert!(is_irreducible(&r, g));
                }
            }
        }
    }

    #[test]
    fn multiplicity_examples() {
        let f = f7();
        assert_eq!(square(&f).multiplicity(&P1Point::rational(&f, 0)), 2);
        assert_eq!(square(&f).multiplicity(&P1Point::rational(&f, 3)), 1);
        assert_eq!(h(&f).multiplicity(&P1Point::rational(&f, 2)), 2);
        assert_eq!(h(&f).multiplicity(&P1Point::rational(&f, 0)), 2);
        assert_eq!(h(&f).multiplicity(&P1Point::Infinity), 1);
    }

    #[test]
    fn multiplicativity_examples() {
        let f = f7();
        let sq = square(&f);
        assert!(sq.multiplicativity_check(&sq, &P1Point::rational(&f, 0)).unwrap());
        assert!(sq.multiplicativity_check(&sq, &P1Point::rational(&f, 3)).unwrap());
        // f(3) = 2 is the critical point of h.
        let x = P1Point::rational(&f, 3);
        assert_eq!(sq.then(&h(&f)).unwrap().multiplicity(&x), 2);
        assert!(sq.multiplicativity_check(&h(&f), &x).unwrap());
    }
}
