//! Data-parallel pullbacks over the atoms of a measure.
//!
//! Fibers are computed on the rayon pool and merged in canonical atom
//! order, so results do not depend on the number of threads.

use rayon::prelude::*;

use eqdist_core::berkovich::{berk_fiber, BerkPointP1};
use eqdist_core::measures::{iterate_with, merge_pullback_parts, Atom, AtomicMeasure, Iteration};
use eqdist_core::scheme::{P1Point, RationalMapP1};
use eqdist_core::Result;

fn par_pullback_by<T, S>(mu: &AtomicMeasure<T>, fiber: impl Fn(&T) -> Vec<(S, usize)> + Sync) -> AtomicMeasure<S>
where
    T: Atom + Sync,
    S: Atom + Send,
{
    let atoms: Vec<_> = mu.iter().collect();
    let parts: Vec<_> = atoms.par_iter().map(|(y, c)| ((*c).clone(), fiber(y))).collect();
    merge_pullback_parts(parts)
}

pub fn par_pullback(f: &RationalMapP1, mu: &AtomicMeasure<P1Point>) -> Result<AtomicMeasure<P1Point>> {
    f.require_gates()?;
    Ok(par_pullback_by(mu, |y| f.fiber(y)))
}

pub fn par_berk_pullback(f: &RationalMapP1, mu: &AtomicMeasure<BerkPointP1>) -> Result<AtomicMeasure<BerkPointP1>> {
    f.require_gates()?;
    Ok(par_pullback_by(mu, |w| berk_fiber(f, w)))
}

pub fn par_iterate_pullback(
    f: &RationalMapP1,
    start: AtomicMeasure<P1Point>,
    n: usize,
    normalize: bool,
    cap: usize,
) -> Result<Iteration<P1Point>> {
    f.require_gates()?;
    iterate_with(start, n, f.degree(), normalize, cap, |mu| Ok(par_pullback_by(mu, |y| f.fiber(y))))
}

pub fn par_iterate_berk_pullback(
    f: &RationalMapP1,
    start: AtomicMeasure<BerkPointP1>,
    n: usize,
    normalize: bool,
    cap: usize,
) -> Result<Iteration<BerkPointP1>> {
    f.require_gates()?;
    iterate_with(start, n, f.degree(), normalize, cap, |mu| Ok(par_pullback_by(mu, |w| berk_fiber(f, w))))
}
