mod common;

use common::{closed_point, map};
use eqdist_core::algebra::{FiniteField, FqField};
use eqdist_core::p2::*;
use eqdist_core::Error;
use proptest::prelude::*;

fn random_germ(f: FqField, d: usize) -> impl Strategy<Value = LocalMapGerm> {
    let monomials: Vec<(usize, usize)> = (1..=d).flat_map(|s| (0..=s).map(move |i| (i, s - i))).collect();
    let n = monomials.len();
    let q = f.q();
    (prop::collection::vec(0..q, n), prop::collection::vec(0..q, n)).prop_map(move |(a, b)| {
        let terms = |c: &[u64]| monomials.iter().copied().zip(c.iter().copied()).collect::<Vec<_>>();
        LocalMapGerm::new(f.clone(), BiPoly::from_terms(&f, terms(&a)), BiPoly::from_terms(&f, terms(&b)), d).unwrap()
    })
}

fn linear(f: &FqField, m: [[u64; 2]; 2]) -> LocalMapGerm {
    let u = BiPoly::from_terms(f, [((1, 0), m[0][0]), ((0, 1), m[0][1])]);
    let w = BiPoly::from_terms(f, [((1, 0), m[1][0]), ((0, 1), m[1][1])]);
    LocalMapGerm::new(f.clone(), u, w, 1).unwrap()
}

/// The inverse of an invertible 2x2 matrix over `f`.
fn inverse(f: &FqField, m: [[u64; 2]; 2]) -> Option<[[u64; 2]; 2]> {
    let det = f.sub(&f.mul(&m[0][0], &m[1][1]), &f.mul(&m[0][1], &m[1][0]));
    let di = f.inv(&det)?;
    Some([
        [f.mul(&m[1][1], &di), f.mul(&f.neg(&m[0][1]), &di)],
        [f.mul(&f.neg(&m[1][0]), &di), f.mul(&m[0][0], &di)],
    ])
}

fn matrix() -> impl Strategy<Value = [[u64; 2]; 2]> {
    prop::array::uniform2(prop::array::uniform2(0..7u64))
}

fn germ(f: &FqField, u: &[((usize, usize), u64)], w: &[((usize, usize), u64)]) -> LocalMapGerm {
    LocalMapGerm::new(f.clone(), BiPoly::from_terms(f, u.iter().copied()), BiPoly::from_terms(f, w.iter().copied()), 2)
        .unwrap()
}

proptest! {
    #![proptest_config(common::config(50))]

    #[test]
    fn sym_fiber_mass_is_d_squared((h, a, b) in map().prop_flat_map(|h| {
        let f = h.field().clone();
        (Just(h), closed_point(&f), closed_point(&f))
    }), diag in any::<bool>()) {
        let sp = SymProdMap::new(h);
        let x = if diag { P2Point::diagonal(a).unwrap() } else { P2Point::new(a, b).unwrap() };
        let fib = sp.sym_fiber(&x).unwrap();
        prop_assert_eq!(sym_fiber_mass(&fib), sp.degree() * sp.degree());
        for e in &fib {
            if let Ok(img) = sp.evaluate(&e.point) {
                prop_assert_eq!(img, x.clone());
            }
        }
    }

    #[test]
    fn colength_bounded_and_stable(g in common::field().prop_flat_map(|f| (2..=3usize).prop_flat_map(move |d| random_germ(f.clone(), d)))) {
        let d = g.degree();
        match local_multiplicity(&g) {
            Ok(mu) => {
                prop_assert!(mu <= d * d);
                let cap = g.truncation_cap();
                prop_assert_eq!(truncated_colength(&g, cap), mu);
                prop_assert_eq!(truncated_colength(&g, cap + 1), mu);
            }
            Err(e) => prop_assert_eq!(e, Error::NonCofinite { cap: g.truncation_cap() }),
        }
    }
}

proptest! {
    #![proptest_config(common::config(20))]

    #[test]
    fn conjugation_preserves_germ_invariants(m in matrix()) {
        let f = common::f7();
        let mi = inverse(&f, m);
        prop_assume!(mi.is_some());
        let (l, li) = (linear(&f, m), linear(&f, mi.unwrap()));
        let fs = germ(&f, &[((1, 0), 1), ((0, 2), 1)], &[((2, 0), 1)]);
        let nil = germ(&f, &[((0, 2), 1)], &[((2, 0), 1)]);
        for g in [fs, nil] {
            let c = li.compose(&g, 16).compose(&l, 16);
            prop_assert_eq!(is_superattracting_germ(&c), is_superattracting_germ(&g));
            prop_assert_eq!(
                is_superattracting_by_iteration(&c, DEFAULT_MAX_ITER),
                is_superattracting_by_iteration(&g, DEFAULT_MAX_ITER)
            );
            prop_assert_eq!(local_multiplicity(&c).unwrap(), local_multiplicity(&g).unwrap());
        }
    }
}
