//! Finite atomic measures with exact rational masses.
//!
//! An atom is a point together with its number of geometric points; the
//! stored mass is the mass of each geometric point, so an atom contributes
//! `orbit_size * mass` to the total.

use alloc::collections::btree_map::Entry;
use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::fmt::Debug;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::scheme::{P1Point, RationalMapP1};
use crate::Result;

/// Default cap on the number of geometric points in a support.
pub const DEFAULT_SUPPORT_CAP: usize = 1_000_000;

/// Point types that can carry atoms.
pub trait Atom: Clone + Ord + Debug {
    fn orbit_size(&self) -> usize;
}

impl Atom for P1Point {
    fn orbit_size(&self) -> usize {
        P1Point::orbit_size(self)
    }
}

pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_int(n: usize) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AtomicMeasure<T: Atom> {
    atoms: BTreeMap<T, BigRational>,
}

impl<T: Atom> Default for AtomicMeasure<T> {
    fn default() -> Self {
        Self::zero()
    }
}

impl<T: Atom> AtomicMeasure<T> {
    pub fn zero() -> Self {
        AtomicMeasure { atoms: BTreeMap::new() }
    }

    /// The probability measure spread uniformly over the orbit of `x`.
    pub fn dirac(x: T) -> Self {
        let n = x.orbit_size();
        let mut m = Self::zero();
        m.add_atom(x, BigRational::new(BigInt::one(), BigInt::from(n)));
        m
    }

    /// Adds `mass` to every geometric point of `x`.
    pub fn add_atom(&mut self, x: T, mass: BigRational) {
        if mass.is_zero() {
            return;
        }
        match self.atoms.entry(x) {
            Entry::Vacant(v) => {
                v.insert(mass);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += mass;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn from_atoms(atoms: impl IntoIterator<Item = (T, BigRational)>) -> Self {
        let mut m = Self::zero();
        for (x, c) in atoms {
            m.add_atom(x, c);
        }
        m
    }

    pub fn atoms(&self) -> &BTreeMap<T, BigRational> {
        &self.atoms
    }

    pub fn iter(&self) -> impl Iterator<Item = (&T, &BigRational)> {
        self.atoms.iter()
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    /// Mass of each geometric point of `x`.
    pub fn mass_at(&self, x: &T) -> BigRational {
        self.atoms.get(x).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn total_mass(&self) -> BigRational {
        self.atoms.iter().map(|(x, c)| c * rat_int(x.orbit_size())).sum()
    }

    /// Number of geometric points in the support.
    pub fn support_size(&self) -> usize {
        self.atoms.keys().map(Atom::orbit_size).sum()
    }

    /// Largest mass carried by a single geometric point.
    pub fn max_atom_mass(&self) -> BigRational {
        self.atoms.values().map(|c| c.abs()).max().unwrap_or_else(BigRational::zero)
    }

    /// Total mass of the atoms satisfying `pred`.
    pub fn mass_on(&self, pred: impl Fn(&T) -> bool) -> BigRational {
        self.atoms
            .iter()
            .filter(|(x, _)| pred(x))
            .map(|(x, c)| c * rat_int(x.orbit_size()))
            .sum()
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        AtomicMeasure { atoms: self.atoms.iter().map(|(x, m)| (x.clone(), m * c)).collect() }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (x, c) in &other.atoms {
            out.add_atom(x.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&-BigRational::one()))
    }

    pub fn is_positive(&self) -> bool {
        self.atoms.values().all(|c| c.is_positive())
    }

    /// Pullback along an arbitrary fiber rule: an atom with mass `c` at
    /// `y` contributes `c * m` to each preimage `(x, m)`.
    pub fn pullback_by<S: Atom>(&self, fiber: impl Fn(&T) -> Vec<(S, usize)>) -> AtomicMeasure<S> {
        merge_pullback_parts(self.atoms.iter().map(|(y, c)| (c.clone(), fiber(y))))
    }

    /// Pushforward along a point map: mass is rescaled by the ratio of
    /// orbit sizes so the total is preserved.
    pub fn pushforward_by<S: Atom>(&self, map: impl Fn(&T) -> S) -> AtomicMeasure<S> {
        let mut out = AtomicMeasure::zero();
        for (x, c) in &self.atoms {
            let y = map(x);
            let scale = BigRational::new(BigInt::from(x.orbit_size()), BigInt::from(y.orbit_size()));
            out.add_atom(y, c * scale);
        }
        out
    }
}

/// Merges per-atom fiber data `(mass, fiber)` into a measure. Addition is
/// exact, so the result does not depend on the order of the parts.
pub fn merge_pullback_parts<S: Atom>(
    parts: impl IntoIterator<Item = (BigRational, Vec<(S, usize)>)>,
) -> AtomicMeasure<S> {
    let mut out = AtomicMeasure::zero();
    for (c, fib) in parts {
        for (x, m) in fib {
            out.add_atom(x, &c * rat_int(m));
        }
    }
    out
}

/// `f^* mu`.
pub fn pullback(f: &RationalMapP1, mu: &AtomicMeasure<P1Point>) -> Result<AtomicMeasure<P1Point>> {
    f.require_gates()?;
    Ok(mu.pullback_by(|y| f.fiber(y)))
}

/// `f_* mu`.
pub fn pushforward(f: &RationalMapP1, mu: &AtomicMeasure<P1Point>) -> AtomicMeasure<P1Point> {
    mu.pushforward_by(|x| f.evaluate(x))
}

/// Output of an iterated pullback.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Iteration<T: Atom> {
    /// `measures[k]` is the `k`-th (normalized) pullback, starting at `k = 0`.
    pub measures: Vec<AtomicMeasure<T>>,
    /// Set when the support cap stopped the iteration early.
    pub truncated: bool,
}

impl<T: Atom> Iteration<T> {
    pub fn support_sizes(&self) -> Vec<usize> {
        self.measures.iter().map(AtomicMeasure::support_size).collect()
    }
}

/// Iterates a pullback step `n` times from `start`, dividing by `d` at each
/// step when `normalize` is set, stopping early when the support would
/// exceed `cap` geometric points.
pub fn iterate_with<T: Atom>(
    start: AtomicMeasure<T>,
    n: usize,
    d: usize,
    normalize: bool,
    cap: usize,
    mut step: impl FnMut(&AtomicMeasure<T>) -> Result<AtomicMeasure<T>>,
) -> Result<Iteration<T>> {
    let scale = if normalize { rat(1, d as i64) } else { BigRational::one() };
    let mut measures = alloc::vec![start];
    let mut truncated = false;
    for _ in 0..n {
        let last = measures.last().unwrap();
        if last.support_size().saturating_mul(d) > cap {
            truncated = true;
            break;
        }
        let next = step(last)?.scale(&scale);
        measures.push(next);
    }
    Ok(Iteration { measures, truncated })
}

/// `mu_k = d^{-k} f^{k*} delta_x` for `k = 0..=n` (unnormalized when
/// `normalize` is false).
pub fn iterate_pullback(
    f: &RationalMapP1,
    x: &P1Point,
    n: usize,
    normalize: bool,
    cap: usize,
) -> Result<Iteration<P1Point>> {
    f.require_gates()?;
    iterate_with(AtomicMeasure::dirac(x.clone()), n, f.degree(), normalize, cap, |mu| {
        Ok(mu.pullback_by(|y| f.fiber(y)))
    })
}

/// Running averages `nu_j = j^{-1} sum_{i<j} mu_i` for `j = 1..=len`.
pub fn cesaro_from<T: Atom>(measures: &[AtomicMeasure<T>]) -> Vec<AtomicMeasure<T>> {
    let mut out = Vec::with_capacity(measures.len());
    let mut acc = AtomicMeasure::zero();
    for (i, mu) in measures.iter().enumerate() {
        acc = acc.add(mu);
        out.push(acc.scale(&rat(1, i as i64 + 1)));
    }
    out
}

/// `nu_1, ..., nu_n` for the normalized pullbacks of `delta_x`.
pub fn cesaro_means(
    f: &RationalMapP1,
    x: &P1Point,
    n: usize,
    cap: usize,
) -> Result<(Vec<AtomicMeasure<P1Point>>, bool)> {
    let it = iterate_pullback(f, x, n.saturating_sub(1), true, cap)?;
    Ok((cesaro_from(&it.measures), it.truncated))
}

/// One row of a [`ConvergenceReport`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReportRow {
    pub step: usize,
    pub support_size: usize,
    pub max_atom_mass: BigRational,
    pub target_masses: Vec<BigRational>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConvergenceReport {
    pub rows: Vec<ReportRow>,
    /// Per target: masses never increase from one step to the next.
    pub nonincreasing: Vec<bool>,
    /// Whether the maximal atom mass never increases.
    pub max_atom_nonincreasing: bool,
}

impl ConvergenceReport {
    pub fn last(&self) -> Option<&ReportRow> {
        self.rows.last()
    }
}

/// Closed-set masses and maximal atoms along a sequence of measures.
pub fn convergence_report<T: Atom>(
    seq: &[AtomicMeasure<T>],
    targets: &[&dyn Fn(&T) -> bool],
) -> ConvergenceReport {
    let rows: Vec<ReportRow> = seq
        .iter()
        .enumerate()
        .map(|(step, mu)| ReportRow {
            step,
            support_size: mu.support_size(),
            max_atom_mass: mu.max_atom_mass(),
            target_masses: targets.iter().map(|t| mu.mass_on(t)).collect(),
        })
        .collect();
    let nonincreasing = (0..targets.len())
        .map(|j| rows.windows(2).all(|w| w[1].target_masses[j] <= w[0].target_masses[j]))
        .collect();
    let max_atom_nonincreasing = rows.windows(2).all(|w| w[1].max_atom_mass <= w[0].max_atom_mass);
    ConvergenceReport { rows, nonincreasing, max_atom_nonincreasing }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{FqField, PolyRing};
    use alloc::vec;

    fn f7() -> FqField {
        FqField::prime(7).unwrap()
    }

    fn square(f: &FqField) -> RationalMapP1 {
        RationalMapP1::polynomial(f.clone(), PolyRing::new(f).monomial(1, 2)).unwrap()
    }

    #[test]
    fn pullback_examples() {
        let f = f7();
        let sq = square(&f);
        let one = P1Point::rational(&f, 1);
        let mu = pullback(&sq, &AtomicMeasure::dirac(one.clone())).unwrap();
        let expect = AtomicMeasure::from_atoms([(one, rat(1, 1)), (P1Point::rational(&f, 6), rat(1, 1))]);
        assert_eq!(mu, expect);
        let zero = P1Point::rational(&f, 0);
        assert_eq!(
            pullback(&sq, &AtomicMeasure::dirac(zero.clone())).unwrap(),
            AtomicMeasure::dirac(zero).scale(&rat(2, 1))
        );
        assert_eq!(
            pullback(&sq, &AtomicMeasure::dirac(P1Point::Generic)).unwrap(),
            AtomicMeasure::dirac(P1Point::Generic).scale(&rat(2, 1))
        );
    }

    #[test]
    fn pushforward_examples() {
        let f = f7();
        let sq = square(&f);
        let one = AtomicMeasure::dirac(P1Point::rational(&f, 1));
        let back = pushforward(&sq, &pullback(&sq, &one).unwrap());
        assert_eq!(back, one.scale(&rat(2, 1)));
        assert_eq!(
            pushforward(&sq, &AtomicMeasure::dirac(P1Point::rational(&f, 3))),
            AtomicMeasure::dirac(P1Point::rational(&f, 2))
        );
        assert!(pushforward(&sq, &AtomicMeasure::<P1Point>::zero()).is_empty());
    }

    #[test]
    fn pushforward_of_orbit_atom_rescales() {
        // Roots of z^2 + 1 square to -1: two points of mass 1/2 land on one.
        let f = f7();
        let r = PolyRing::new(&f);
        let x = P1Point::Finite(r.from_coeffs(vec![1, 0, 1]));
        let mu = pushforward(&square(&f), &AtomicMeasure::dirac(x));
        assert_eq!(mu, AtomicMeasure::dirac(P1Point::rational(&f, 6)));
    }

    #[test]
    fn iterate_examples() {
        let f = f7();
        let sq = square(&f);
        let one = P1Point::rational(&f, 1);
        let it = iterate_pullback(&sq, &one, 3, true, DEFAULT_SUPPORT_CAP).unwrap();
        let mu3 = &it.measures[3];
        assert_eq!(mu3.support_size(), 8);
        assert!(mu3.atoms().values().all(|c| *c == rat(1, 8)));
        assert_eq!(mu3.mass_on(|x| *x == one), rat(1, 8));
        let zero = P1Point::rational(&f, 0);
        let it = iterate_pullback(&sq, &zero, 5, true, DEFAULT_SUPPORT_CAP).unwrap();
        assert_eq!(it.measures[5], AtomicMeasure::dirac(zero.clone()));
        let it = iterate_pullback(&sq, &zero, 0, true, DEFAULT_SUPPORT_CAP).unwrap();
        assert_eq!(it.measures, vec![AtomicMeasure::dirac(zero)]);
    }

    #[test]
    fn support_cap_truncates() {
        let f = f7();
        let it = iterate_pullback(&square(&f), &P1Point::rational(&f, 1), 6, true, 10).unwrap();
        assert!(it.truncated);
        assert_eq!(it.support_sizes(), vec![1, 2, 4, 8]);
    }

    #[test]
    fn cesaro_examples() {
        let f = f7();
        let sq = square(&f);
        let one = P1Point::rational(&f, 1);
        let (nu, _) = cesaro_means(&sq, &one, 1, DEFAULT_SUPPORT_CAP).unwrap();
        assert_eq!(nu, vec![AtomicMeasure::dirac(one.clone())]);
        let (nu, _) = cesaro_means(&sq, &one, 4, DEFAULT_SUPPORT_CAP).unwrap();
        // Mass at 1: (1 + 1/2 + 1/4 + 1/8) / 4.
        assert_eq!(nu[3].mass_on(|x| *x == one), rat(15, 32));
        assert_eq!(nu[3].total_mass(), rat(1, 1));
        let zero = P1Point::rational(&f, 0);
        let (nu, _) = cesaro_means(&sq, &zero, 5, DEFAULT_SUPPORT_CAP).unwrap();
        assert!(nu.iter().all(|m| *m == AtomicMeasure::dirac(zero.clone())));
    }

    #[test]
    fn mass_on_closed_sets() {
        let f = f7();
        let mu = AtomicMeasure::from_atoms([
            (P1Point::rational(&f, 0), rat(1, 1)),
            (P1Point::rational(&f, 1), rat(1, 1)),
        ]);
        assert_eq!(mu.mass_on(|x| *x == P1Point::rational(&f, 0)), rat(1, 1));
        assert_eq!(AtomicMeasure::dirac(P1Point::Infinity).mass_on(|_| true), rat(1, 1));
    }

    #[test]
    fn convergence_report_examples() {
        let f = f7();
        let one = P1Point::rational(&f, 1);
        let it = iterate_pullback(&square(&f), &one, 10, true, DEFAULT_SUPPORT_CAP).unwrap();
        let is_one = |x: &P1Point| *x == one;
        let rep = convergence_report(&it.measures, &[&is_one]);
        for row in &rep.rows {
            assert_eq!(row.target_masses[0], rat(1, 1 << row.step));
        }
        assert!(rep.nonincreasing[0] && rep.max_atom_nonincreasing);
        let zero = P1Point::rational(&f, 0);
        let seq = vec![AtomicMeasure::dirac(zero.clone()); 4];
        let is_zero = |x: &P1Point| *x == zero;
        let rep = convergence_report(&seq, &[&is_zero]);
        assert!(rep.rows.iter().all(|r| r.target_masses[0] == rat(1, 1)));
    }

    #[test]
    fn zero_mass_atoms_are_dropped() {
        let f = f7();
        let mu = AtomicMeasure::dirac(P1Point::rational(&f, 2));
        assert!(mu.sub(&mu).is_empty());
    }
}
