#![allow(dead_code)]

use eqdist_core::algebra::{factor, FiniteField, FqField, Poly, PolyRing};
use eqdist_core::scheme::{P1Point, RationalMapP1};
use proptest::prelude::*;

pub fn f7() -> FqField {
    FqField::prime(7).unwrap()
}

/// Small fields exercised by the property tests: F_5, F_7, F_4, F_9.
pub fn fields() -> Vec<FqField> {
    vec![
        FqField::prime(5).unwrap(),
        FqField::prime(7).unwrap(),
        FqField::new(2, 2).unwrap(),
        FqField::new(3, 2).unwrap(),
    ]
}

pub fn field() -> impl Strategy<Value = FqField> {
    (0..4usize).prop_map(|i| fields()[i].clone())
}

pub fn poly(f: &FqField, max_len: usize) -> impl Strategy<Value = Poly<u64>> {
    let f = f.clone();
    prop::collection::vec(0..f.q(), 0..=max_len).prop_map(move |c| PolyRing::new(&f).from_coeffs(c))
}

pub fn nonzero_poly(f: &FqField, max_len: usize) -> impl Strategy<Value = Poly<u64>> {
    poly(f, max_len).prop_filter("nonzero", |p| !p.is_zero())
}

/// A map of degree 2 or 3 passing both dynamical gates.
pub fn map_over(f: &FqField) -> impl Strategy<Value = RationalMapP1> {
    let f = f.clone();
    (2..=3usize)
        .prop_flat_map(move |d| {
            let f = f.clone();
            (prop::collection::vec(0..f.q(), d + 1), prop::collection::vec(0..f.q(), 1..=d + 1), Just(f))
        })
        .prop_filter_map("nondegenerate map passing the gates", |(n, m, f)| {
            let r = PolyRing::new(&f);
            let map = RationalMapP1::new(f.clone(), r.from_coeffs(n), r.from_coeffs(m)).ok()?;
            map.require_gates().ok()?;
            Some(map)
        })
}

pub fn map() -> impl Strategy<Value = RationalMapP1> {
    field().prop_flat_map(|f| map_over(&f))
}

/// A closed point of degree at most 3, or infinity.
pub fn closed_point(f: &FqField) -> impl Strategy<Value = P1Point> {
    let f = f.clone();
    prop_oneof![
        1 => Just(P1Point::Infinity),
        6 => (1..=3usize).prop_flat_map(move |n| {
            let f = f.clone();
            (prop::collection::vec(0..f.q(), n), Just(f))
        })
        .prop_map(|(mut c, f)| {
            c.push(1);
            let r = PolyRing::new(&f);
            let g = factor::factor(&r, &r.from_coeffs(c), 0).factors.remove(0).0;
            P1Point::Finite(g)
        }),
    ]
}

/// A map together with a closed point over the same field.
pub fn map_and_point() -> impl Strategy<Value = (RationalMapP1, P1Point)> {
    map().prop_flat_map(|m| {
        let f = m.field().clone();
        (Just(m), closed_point(&f))
    })
}

pub fn monomial_map(f: &FqField, d: usize) -> RationalMapP1 {
    RationalMapP1::polynomial(f.clone(), PolyRing::new(f).monomial(f.one(), d)).unwrap()
}

pub fn config(cases: u32) -> ProptestConfig {
    ProptestConfig { cases, failure_persistence: None, ..ProptestConfig::default() }
}

pub fn mass() -> impl Strategy<Value = num_rational::BigRational> {
    (1..20i64, 1..20i64).prop_map(|(n, d)| eqdist_core::measures::rat(n, d))
}

/// A finite atomic measure with one to four atoms over `f`.
pub fn measure_over(f: &FqField) -> impl Strategy<Value = eqdist_core::measures::AtomicMeasure<P1Point>> {
    prop::collection::vec((closed_point(f), mass()), 1..=4)
        .prop_map(eqdist_core::measures::AtomicMeasure::from_atoms)
}

pub fn param() -> impl Strategy<Value = num_rational::BigRational> {
    (1..12i64, 1..12i64).prop_map(|(n, d)| eqdist_core::measures::rat(n, d))
}

/// Gauss, a branch point with finite parameter, or a classical point.
pub fn berk_point(f: &FqField) -> impl Strategy<Value = eqdist_core::berkovich::BerkPointP1> {
    use eqdist_core::berkovich::BerkPointP1;
    prop_oneof![
        1 => Just(BerkPointP1::Gauss),
        4 => (closed_point(f), param()).prop_map(|(x, t)| BerkPointP1::branch(x, t).unwrap()),
        1 => closed_point(f).prop_map(|x| BerkPointP1::classical(x).unwrap()),
    ]
}

/// A point that is a valuation: Gauss or a finite-parameter branch point.
pub fn tame_point(f: &FqField) -> impl Strategy<Value = eqdist_core::berkovich::BerkPointP1> {
    use eqdist_core::berkovich::BerkPointP1;
    prop_oneof![
        1 => Just(BerkPointP1::Gauss),
        5 => (closed_point(f), param()).prop_map(|(x, t)| BerkPointP1::branch(x, t).unwrap()),
    ]
}

pub fn rational_function(f: &FqField) -> impl Strategy<Value = eqdist_core::berkovich::RationalFunction> {
    let g = f.clone();
    (nonzero_poly(f, 4), nonzero_poly(f, 4))
        .prop_map(move |(a, b)| eqdist_core::berkovich::RationalFunction::new(g.clone(), a, b).unwrap())
}
