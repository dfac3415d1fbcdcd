mod common;

use common::{field, nonzero_poly, poly};
use eqdist_core::algebra::{factor, resultant, FqField, Poly, PolyRing};
use proptest::prelude::*;

fn pair() -> impl Strategy<Value = (FqField, Poly<u64>, Poly<u64>, Poly<u64>)> {
    field().prop_flat_map(|f| (Just(f.clone()), poly(&f, 6), poly(&f, 6), nonzero_poly(&f, 3)))
}

proptest! {
    #![proptest_config(common::config(200))]

    #[test]
    fn gcd_is_greatest_common_divisor((f, a, b, c) in pair()) {
        let r = PolyRing::new(&f);
        let g = r.gcd(&a, &b);
        prop_assert!(r.divides(&g, &a) && r.divides(&g, &b));
        let (ac, bc) = (r.mul(&a, &c), r.mul(&b, &c));
        prop_assert!(r.divides(&c, &r.gcd(&ac, &bc)));
        prop_assert!(r.divides(&g, &r.gcd(&ac, &bc)));
    }

    #[test]
    fn factorization_reconstructs_input((f, a) in field().prop_flat_map(|f| (Just(f.clone()), nonzero_poly(&f, 12)))) {
        let r = PolyRing::new(&f);
        let fac = factor::factor(&r, &a, 7);
        let mut prod = r.constant(fac.unit);
        for (g, m) in &fac.factors {
            prop_assert!(factor::is_irreducible(&r, g));
            prod = r.mul(&prod, &r.pow(g, *m as u64));
        }
        prop_assert_eq!(prod, a);
    }

    #[test]
    fn resultant_vanishes_iff_common_factor((f, a, b, c) in pair(), share in any::<bool>()) {
        let r = PolyRing::new(&f);
        prop_assume!(!a.is_zero() && !b.is_zero());
        let (a, b) = if share { (r.mul(&a, &c), r.mul(&b, &c)) } else { (a, b) };
        let common = r.gcd(&a, &b).deg() >= 1;
        prop_assert_eq!(resultant(&r, &a, &b) == 0, common);
    }

    #[test]
    fn factorization_is_deterministic((f, a) in field().prop_flat_map(|f| (Just(f.clone()), nonzero_poly(&f, 12))), seed in any::<u64>()) {
        let r = PolyRing::new(&f);
        prop_assert_eq!(factor::factor(&r, &a, seed), factor::factor(&r, &a, seed));
    }
}
