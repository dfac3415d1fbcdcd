mod common;

use common::{closed_point, map, map_and_point, monomial_map};
use eqdist_core::algebra::{FiniteField, PolyRing};
use eqdist_core::scheme::dynamics::{v_minus_below, v_minus_equals, DEFAULT_TREE_DEPTH_CAP};
use eqdist_core::scheme::fiber::geometric_mass;
use eqdist_core::scheme::{P1Point, RationalMapP1};
use eqdist_core::Error;
use num_bigint::BigUint;
use proptest::prelude::*;

fn fixtures() -> Vec<RationalMapP1> {
    let mut out = Vec::new();
    for f in common::fields() {
        let r = PolyRing::new(&f);
        for d in [2usize, 3] {
            if (d as u64).is_multiple_of(f.characteristic()) {
                continue;
            }
            out.push(monomial_map(&f, d));
            out.push(RationalMapP1::new(f.clone(), r.one(), r.monomial(f.one(), d)).unwrap());
        }
    }
    out
}

proptest! {
    #![proptest_config(common::config(100))]

    #[test]
    fn fiber_mass_equals_degree((f, y) in map_and_point()) {
        let fib = f.fiber(&y);
        prop_assert_eq!(geometric_mass(&fib), f.degree() * y.orbit_size());
        for (x, _) in &fib {
            prop_assert_eq!(&f.evaluate(x), &y);
        }
    }

    #[test]
    fn generic_fiber(f in map()) {
        prop_assert_eq!(f.fiber(&P1Point::Generic), vec![(P1Point::Generic, f.degree())]);
    }

    #[test]
    fn multiplicativity((f, g, x) in map().prop_flat_map(|f| {
        let fld = f.field().clone();
        (Just(f), common::map_over(&fld), closed_point(&fld))
    })) {
        prop_assert!(f.multiplicativity_check(&g, &x).unwrap());
    }

    #[test]
    fn fiber_root_multiplicity_bounded_by_degree((f, y) in map_and_point()) {
        if let P1Point::Finite(g) = &y {
            let (big_g, _) = f.fiber_polynomial(g);
            for (x, m) in f.fiber(&y) {
                if x != P1Point::Infinity {
                    prop_assert!(m * x.orbit_size() <= big_g.deg());
                }
            }
        }
    }
}

proptest! {
    #![proptest_config(common::config(50))]

    #[test]
    fn bruteforce_bounds((f, x) in map_and_point(), n in 0..=6usize) {
        let cycle = f.cycle_through(&x);
        prop_assume!(!matches!(cycle, Err(Error::CapExceeded { .. })));
        let d = BigUint::from(f.degree());
        let b = f.v_minus_n_bruteforce(&x, n, DEFAULT_TREE_DEPTH_CAP).unwrap();
        prop_assert!(b <= d.pow(n as u32));
        if let Some(c) = cycle.unwrap() {
            let k = n / c.period;
            prop_assert!(b >= c.ram_product.pow(k as u32));
        }
    }

    #[test]
    fn exceptional_dichotomy((f, x) in map_and_point()) {
        // Forward orbits longer than 2d^2 + 10 raise a hard cap error by design.
        let vm = f.v_minus(&x);
        prop_assume!(!matches!(vm, Err(Error::CapExceeded { .. })));
        let vm = vm.unwrap();
        let e = f.exceptional_set().unwrap();
        let points: Vec<P1Point> = e.iter().flat_map(|c| c.points.clone()).collect();
        prop_assert!(f.is_totally_invariant(&points));
        if points.contains(&x) {
            prop_assert!(v_minus_equals(&vm, f.degree()));
        } else {
            prop_assert!(v_minus_below(&vm, f.degree()));
        }
    }
}

#[test]
fn totally_invariant_cycles_of_monomials() {
    for f in fixtures() {
        let d = BigUint::from(f.degree());
        let e = f.exceptional_set().unwrap();
        assert!(!e.is_empty());
        for c in &e {
            for x in &c.points {
                assert!(v_minus_equals(&f.v_minus(x).unwrap(), f.degree()));
                for n in 0..=6 {
                    assert_eq!(f.v_minus_n_bruteforce(x, n, DEFAULT_TREE_DEPTH_CAP).unwrap(), d.pow(n as u32));
                }
            }
            let pts: Vec<P1Point> = e.iter().flat_map(|c| c.points.clone()).collect();
            let mut pre: Vec<P1Point> = pts.iter().flat_map(|y| f.fiber(y)).map(|(x, _)| x).collect();
            pre.sort();
            pre.dedup();
            let mut sorted = pts.clone();
            sorted.sort();
            assert_eq!(pre, sorted);
        }
    }
}
