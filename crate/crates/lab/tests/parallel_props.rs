//! Parallel pullbacks equal the sequential ones.

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use eqdist_core::algebra::FqField;
use eqdist_core::berkovich::{berk_pullback, iterate_berk_pullback, BerkPointP1};
use eqdist_core::measures::{iterate_pullback, pullback, rat, AtomicMeasure, DEFAULT_SUPPORT_CAP};
use eqdist_lab::parallel::{par_berk_pullback, par_iterate_berk_pullback, par_iterate_pullback, par_pullback};
use eqdist_lab::suite::{random_closed_point, random_map};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(30))]

    #[test]
    fn parallel_pullback_matches(seed in any::<u64>(), p in prop::sample::select(vec![5u64, 7])) {
        let field = FqField::prime(p).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = random_map(&mut rng, &field, true);
        let mu = AtomicMeasure::from_atoms(
            (0..3).map(|i| (random_closed_point(&mut rng, &field, 3), rat(i + 1, 5))),
        );
        prop_assert_eq!(par_pullback(&f, &mu).unwrap(), pullback(&f, &mu).unwrap());
        let x = random_closed_point(&mut rng, &field, 2);
        let a = par_iterate_pullback(&f, AtomicMeasure::dirac(x.clone()), 3, true, DEFAULT_SUPPORT_CAP).unwrap();
        let b = iterate_pullback(&f, &x, 3, true, DEFAULT_SUPPORT_CAP).unwrap();
        prop_assert_eq!(a.measures, b.measures);
    }

    #[test]
    fn parallel_berk_pullback_matches(seed in any::<u64>()) {
        let field = FqField::prime(7).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = random_map(&mut rng, &field, true);
        let x = random_closed_point(&mut rng, &field, 2);
        let v = BerkPointP1::branch(x, rat(3, 2)).unwrap();
        let mu = AtomicMeasure::from_atoms([(v.clone(), rat(1, 2)), (BerkPointP1::Gauss, rat(1, 2))]);
        prop_assert_eq!(par_berk_pullback(&f, &mu).unwrap(), berk_pullback(&f, &mu).unwrap());
        let a = par_iterate_berk_pullback(&f, AtomicMeasure::dirac(v.clone()), 3, true, DEFAULT_SUPPORT_CAP).unwrap();
        let b = iterate_berk_pullback(&f, &v, 3, true, DEFAULT_SUPPORT_CAP).unwrap();
        prop_assert_eq!(a.measures, b.measures);
    }
}

#[test]
fn pool_size_does_not_change_results() {
    let field = FqField::prime(7).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let f = random_map(&mut rng, &field, true);
    let x = random_closed_point(&mut rng, &field, 2);
    let at = |threads: usize| {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        pool.install(|| par_iterate_pullback(&f, AtomicMeasure::dirac(x.clone()), 4, true, DEFAULT_SUPPORT_CAP).unwrap())
    };
    assert_eq!(at(1).measures, at(8).measures);
}
