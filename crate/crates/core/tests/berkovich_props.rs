mod common;

use common::{berk_point, map, rational_function, tame_point};
use eqdist_core::berkovich::*;
use eqdist_core::measures::{pullback, Atom, AtomicMeasure, DEFAULT_SUPPORT_CAP};
use eqdist_core::scheme::RationalMapP1;
use proptest::prelude::*;

fn berk_measure(f: &eqdist_core::algebra::FqField) -> impl Strategy<Value = AtomicMeasure<BerkPointP1>> {
    prop::collection::vec((berk_point(f), common::mass()), 1..=4).prop_map(AtomicMeasure::from_atoms)
}

fn map_and_measure() -> impl Strategy<Value = (RationalMapP1, AtomicMeasure<BerkPointP1>)> {
    map().prop_flat_map(|f| {
        let fld = f.field().clone();
        (Just(f), berk_measure(&fld))
    })
}

fn triple() -> impl Strategy<Value = (RationalMapP1, BerkPointP1, RationalFunction)> {
    map().prop_flat_map(|f| {
        let fld = f.field().clone();
        (Just(f), tame_point(&fld), rational_function(&fld))
    })
}

proptest! {
    #![proptest_config(common::config(100))]

    #[test]
    fn reduction_commutes_with_pullback((f, mu) in map_and_measure()) {
        let up = berk_pullback(&f, &mu).unwrap();
        prop_assert_eq!(red_push(&up), pullback(&f, &red_push(&mu)).unwrap());
        prop_assert_eq!(kernel_push(&up), pullback(&f, &kernel_push(&mu)).unwrap());
    }

    #[test]
    fn berkovich_fiber_mass((f, v) in map().prop_flat_map(|f| {
        let fld = f.field().clone();
        (Just(f), berk_point(&fld))
    })) {
        let mass: usize = berk_fiber(&f, &v).iter().map(|(w, e)| w.orbit_size() * e).sum();
        prop_assert_eq!(mass, f.degree() * v.orbit_size());
        for (w, _) in berk_fiber(&f, &v) {
            prop_assert_eq!(berk_image(&f, &w), v.clone());
        }
    }

    #[test]
    fn functoriality_of_evaluation((f, w, phi) in map().prop_flat_map(|f| {
        let fld = f.field().clone();
        (Just(f), berk_point(&fld), rational_function(&fld))
    })) {
        let lhs = semival_eval(&w, &phi.compose(&f).unwrap()).unwrap();
        let rhs = semival_eval(&berk_image(&f, &w), &phi).unwrap();
        prop_assert_eq!(lhs, rhs);
    }
}

proptest! {
    #![proptest_config(common::config(50))]

    #[test]
    fn norm_identity((f, v, phi) in triple()) {
        let id = norm_identity_check(&f, &v, &phi).unwrap();
        prop_assert!(id.holds(), "{:?}", id);
    }
}

proptest! {
    #![proptest_config(common::config(20))]

    #[test]
    fn tame_sums_bounded((f, v, phi) in triple()) {
        let tab = tame_bound_check(&f, &v, &phi, 12).unwrap();
        prop_assert!(tab.holds(), "{:?}", tab);
        let (full, truncated) = tame_bound_check_full(&f, &v, &phi, 3, DEFAULT_SUPPORT_CAP).unwrap();
        prop_assert!(!truncated);
        prop_assert_eq!(&full.sums[..], &tab.sums[..=3]);
    }
}

#[test]
fn norm_of_constant_has_trivial_divisor() {
    let f = common::f7();
    let sq = RationalMapP1::polynomial(f.clone(), eqdist_core::algebra::PolyRing::new(&f).monomial(1, 2)).unwrap();
    let c = RationalFunction::polynomial(f.clone(), eqdist_core::algebra::PolyRing::new(&f).constant(3)).unwrap();
    let n = norm(&sq, &c).unwrap();
    assert_eq!(n.degree(), 0);
}
