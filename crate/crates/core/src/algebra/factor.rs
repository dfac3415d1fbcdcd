//! Factorization over finite fields: squarefree decomposition,
//! distinct-degree factorization and Cantor–Zassenhaus splitting.

use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigUint;
use num_traits::One;
use rand_chacha::ChaCha8Rng;
use rand_core::SeedableRng;
use sha2::{Digest, Sha256};

use super::field::FiniteField;
use super::poly::{Poly, PolyRing};

type P<F> = Poly<<F as FiniteField>::Elem>;

/// A factorization `lc * prod g_i^{m_i}` with monic irreducible `g_i`
/// sorted in canonical order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Factorization<E> {
    pub unit: E,
    pub factors: Vec<(Poly<E>, usize)>,
}

/// Deterministic generator keyed by a seed and the coefficients of `a`.
pub fn keyed_rng<F: FiniteField>(field: &F, seed: u64, a: &P<F>) -> ChaCha8Rng {
    let mut words = Vec::with_capacity(a.len() + 2);
    words.push(a.len() as u64);
    for c in a.coeffs() {
        field.key_words(c, &mut words);
    }
    let mut h = Sha256::new();
    h.update(b"eqdist-edf");
    h.update(seed.to_le_bytes());
    for w in &words {
        h.update(w.to_le_bytes());
    }
    let digest = h.finalize();
    let mut key = [0u8; 32];
    key.copy_from_slice(&digest);
    ChaCha8Rng::from_seed(key)
}

/// Squarefree decomposition of a monic polynomial: pairs `(s_m, m)` with
/// pairwise coprime squarefree `s_m` and `a = prod s_m^m`, sorted by `m`.
pub fn squarefree<F: FiniteField>(ring: &PolyRing<'_, F>, a: &P<F>) -> Vec<(P<F>, usize)> {
    let mut out = Vec::new();
    if a.deg() == 0 {
        return out;
    }
    let a = ring.monic(a);
    squarefree_into(ring, &a, 1, &mut out);
    out.sort_by_key(|(_, m)| *m);
    out
}

fn squarefree_into<F: FiniteField>(
    ring: &PolyRing<'_, F>,
    a: &P<F>,
    scale: usize,
    out: &mut Vec<(P<F>, usize)>,
) {
    if a.deg() == 0 {
        return;
    }
    let p = ring.field.characteristic() as usize;
    let da = ring.derivative(a);
    if da.is_zero() {
        squarefree_into(ring, &ring.pth_root(a), scale * p, out);
        return;
    }
    let mut c = ring.gcd(a, &da);
    let mut w = ring.div_exact(a, &c);
    let mut i = 1;
    while w.deg() > 0 {
        let y = ring.gcd(&w, &c);
        let z = ring.div_exact(&w, &y);
        if z.deg() > 0 {
            out.push((z, i * scale));
        }
        i += 1;
        c = ring.div_exact(&c, &y);
        w = y;
    }
    if c.deg() > 0 {
        squarefree_into(ring, &ring.pth_root(&c), scale * p, out);
    }
}

/// `z^Q mod m` where `Q` is the field order.
fn frobenius_of_x<F: FiniteField>(ring: &PolyRing<'_, F>, h: &P<F>, m: &P<F>) -> P<F> {
    ring.powmod(h, &ring.field.order(), m)
}

/// Distinct-degree factorization of a monic squarefree polynomial:
/// pairs `(g_j, j)` where `g_j` is the product of all irreducible factors
/// of degree `j`.
pub fn distinct_degree<F: FiniteField>(ring: &PolyRing<'_, F>, a: &P<F>) -> Vec<(P<F>, usize)> {
    let mut out = Vec::new();
    let mut rest = ring.monic(a);
    let x = ring.x();
    let mut h = ring.rem(&x, &rest);
    let mut j = 1;
    while rest.deg() >= 2 * j {
        h = frobenius_of_x(ring, &h, &rest);
        let g = ring.gcd(&rest, &ring.sub(&h, &x));
        if g.deg() > 0 {
            rest = ring.div_exact(&rest, &g);
            h = ring.rem(&h, &rest);
            out.push((g, j));
        }
        j += 1;
    }
    if rest.deg() > 0 {
        let d = rest.deg();
        out.push((rest, d));
    }
    out
}

fn random_poly<F: FiniteField>(ring: &PolyRing<'_, F>, n: usize, rng: &mut ChaCha8Rng) -> P<F> {
    let coeffs = (0..n).map(|_| ring.field.random(rng)).collect();
    ring.from_coeffs(coeffs)
}

/// Splits a monic squarefree product of irreducibles of degree `j`.
pub fn equal_degree<F: FiniteField>(
    ring: &PolyRing<'_, F>,
    a: &P<F>,
    j: usize,
    rng: &mut ChaCha8Rng,
) -> Vec<P<F>> {
    let mut done = Vec::new();
    let mut todo = vec![ring.monic(a)];
    let odd = ring.field.characteristic() != 2;
    let qj = ring.field.order().pow(j as u32);
    let half = (&qj - BigUint::one()) >> 1u32;
    let trace_len = ring.field.absolute_degree() * j;
    while let Some(f) = todo.pop() {
        let n = f.deg();
        if n == j {
            done.push(f);
            continue;
        }
        loop {
            let r = random_poly(ring, n, rng);
            if r.deg() == 0 {
                continue;
            }
            let g0 = ring.gcd(&r, &f);
            let g = if g0.deg() > 0 {
                g0
            } else if odd {
                let b = ring.powmod(&r, &half, &f);
                ring.gcd(&ring.sub(&b, &ring.one()), &f)
            } else {
                let mut t = r.clone();
                let mut acc = r;
                for _ in 1..trace_len {
                    t = ring.mulmod(&t, &t, &f);
                    acc = ring.add(&acc, &t);
                }
                ring.gcd(&acc, &f)
            };
            if g.deg() > 0 && g.deg() < n {
                let h = ring.div_exact(&f, &g);
                todo.push(g);
                todo.push(h);
                break;
            }
        }
    }
    done
}

/// Complete factorization of a nonzero polynomial, deterministic in `seed`.
pub fn factor<F: FiniteField>(ring: &PolyRing<'_, F>, a: &P<F>, seed: u64) -> Factorization<F::Elem> {
    let unit = a.leading().cloned().expect("cannot factor the zero polynomial");
    let mut rng = keyed_rng(ring.field, seed, a);
    let mut factors = Vec::new();
    for (s, m) in squarefree(ring, a) {
        for (g, j) in distinct_degree(ring, &s) {
            if g.deg() == j {
                factors.push((g, m));
            } else {
                factors.extend(equal_degree(ring, &g, j, &mut rng).into_iter().map(|h| (h, m)));
            }
        }
    }
    factors.sort();
    Factorization { unit, factors }
}

/// Rabin's test on a polynomial of positive degree (monic or not).
pub fn is_irreducible<F: FiniteField>(ring: &PolyRing<'_, F>, a: &P<F>) -> bool {
    let n = match a.degree() {
        None | Some(0) => return false,
        Some(1) => return true,
        Some(n) => n,
    };
    let a = ring.monic(a);
    let x = ring.x();
    let primes: Vec<usize> = (2..=n).filter(|&r| n % r == 0 && (2..r).all(|s| r % s != 0)).collect();
    let mut h = ring.rem(&x, &a);
    for i in 1..=n {
        h = frobenius_of_x(ring, &h, &a);
        if i < n && primes.iter().any(|&r| i == n / r) && ring.gcd(&a, &ring.sub(&h, &x)).deg() > 0 {
            return false;
        }
    }
    h == ring.rem(&x, &a)
}

/// Number of geometric points in the Frobenius orbit cut out by `g`.
pub fn frobenius_orbit_size<F: FiniteField>(
    ring: &PolyRing<'_, F>,
    g: &P<F>,
) -> crate::error::Result<usize> {
    if g.leading() != Some(&ring.field.one()) || !is_irreducible(ring, g) {
        return Err(crate::error::Error::NotIrreducible(alloc::format!("{:?}", g.coeffs())));
    }
    Ok(g.deg())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::field::{ExtField, FqField};

    fn reconstruct<F: FiniteField>(ring: &PolyRing<'_, F>, fac: &Factorization<F::Elem>) -> P<F> {
        let mut acc = ring.constant(fac.unit.clone());
        for (g, m) in &fac.factors {
            acc = ring.mul(&acc, &ring.pow(g, *m as u64));
        }
        acc
    }

    #[test]
    fn roots_of_z2_minus_1() {
        let f = FqField::prime(7).unwrap();
        let r = PolyRing::new(&f);
        let fac = factor(&r, &r.from_coeffs(vec![6, 0, 1]), 0);
        assert_eq!(fac.factors, vec![(r.linear(&6), 1), (r.linear(&1), 1)]);
    }

    #[test]
    fn z4_plus_1_two_quadratics() {
        // Roots have order 8; 8 | 48 but 8 does not divide 6.
        let f = FqField::prime(7).unwrap();
        let r = PolyRing::new(&f);
        let a = r.from_coeffs(vec![1, 0, 0, 0, 1]);
        let fac = factor(&r, &a, 11);
        assert_eq!(fac.factors.len(), 2);
        for (g, m) in &fac.factors {
            assert_eq!((g.deg(), *m), (2, 1));
            assert!(is_irreducible(&r, g));
        }
        assert_ne!(fac.factors[0].0, fac.factors[1].0);
        assert_eq!(reconstruct(&r, &fac), a);
    }

    #[test]
    fn square_of_linear() {
        let f = FqField::prime(7).unwrap();
        let r = PolyRing::new(&f);
        let a = r.pow(&r.linear(&3), 2);
        assert_eq!(factor(&r, &a, 5).factors, vec![(r.linear(&3), 2)]);
    }

    #[test]
    fn inseparable_powers() {
        let f = FqField::prime(3).unwrap();
        let r = PolyRing::new(&f);
        // (z^2+1)^3 (z+1)^4 (z+2)
        let a = r.mul(
            &r.mul(&r.pow(&r.from_coeffs(vec![1, 0, 1]), 3), &r.pow(&r.linear(&2), 4)),
            &r.linear(&1),
        );
        let fac = factor(&r, &a, 1);
        assert_eq!(reconstruct(&r, &fac), a);
        assert_eq!(
            fac.factors,
            vec![(r.linear(&2), 4), (r.linear(&1), 1), (r.from_coeffs(vec![1, 0, 1]), 3)]
        );
    }

    #[test]
    fn characteristic_two_splitting() {
        let f = FqField::new(2, 3).unwrap();
        let r = PolyRing::new(&f);
        // z^8 - z splits over F_8 into all eight linear factors.
        let mut c = vec![0u64; 9];
        c[8] = 1;
        c[1] = 1;
        let fac = factor(&r, &r.from_coeffs(c), 2);
        assert_eq!(fac.factors.len(), 8);
        assert!(fac.factors.iter().all(|(g, m)| g.deg() == 1 && *m == 1));
    }

    #[test]
    fn orbit_sizes() {
        let f = FqField::prime(7).unwrap();
        let r = PolyRing::new(&f);
        assert_eq!(frobenius_orbit_size(&r, &r.linear(&3)), Ok(1));
        assert_eq!(frobenius_orbit_size(&r, &r.from_coeffs(vec![1, 0, 1])), Ok(2));
        assert_eq!(frobenius_orbit_size(&r, &r.from_coeffs(vec![5, 0, 0, 1])), Ok(3));
        assert!(frobenius_orbit_size(&r, &r.from_coeffs(vec![6, 0, 1])).is_err());
    }

    #[test]
    fn factor_over_extension() {
        // z^2 - t over F_7[t]/(t^2+1): t = i has square roots since i^{24} = 1.
        let base = FqField::prime(7).unwrap();
        let br = PolyRing::new(&base);
        let e = ExtField::new(base.clone(), br.from_coeffs(vec![1, 0, 1])).unwrap();
        let er = PolyRing::new(&e);
        let t = e.generator();
        let a = er.from_coeffs(vec![e.neg(&t), e.zero(), e.one()]);
        let fac = factor(&er, &a, 4);
        assert_eq!(fac.factors.len(), 2);
        assert_eq!(reconstruct(&er, &fac), a);
    }

    #[test]
    fn deterministic_given_seed() {
        let f = FqField::prime(5).unwrap();
        let r = PolyRing::new(&f);
        let a = r.from_coeffs(vec![1, 2, 3, 4, 0, 1, 1, 2, 1]);
        assert_eq!(factor(&r, &a, 77), factor(&r, &a, 77));
    }
}
