//! Periodic cycles, reverse asymptotic multiplicity and the exceptional set.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigUint;
use num_traits::One;

use super::{P1Point, RationalMapP1};
use crate::algebra::factor::{factor, squarefree};
use crate::algebra::Poly;
use crate::error::{Error, Result};

/// Default cap on the depth of brute-force preimage trees.
pub const DEFAULT_TREE_DEPTH_CAP: usize = 8;

/// A periodic cycle of closed points.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct CycleRecord {
    /// `f(points[i]) = points[i + 1]`, cyclically; starts at the smallest point.
    pub points: Vec<P1Point>,
    pub period: usize,
    /// Product of ramification indices along the cycle.
    pub ram_product: BigUint,
}

/// The two input gates of the dynamical operations.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GateReport {
    pub separable: bool,
    pub char_ok: bool,
}

impl GateReport {
    pub fn passes(&self) -> bool {
        self.separable && self.char_ok
    }
}

/// Length of forward orbits explored before declaring a configuration error.
pub fn forward_orbit_cap(d: usize) -> usize {
    2 * d * d + 10
}

impl RationalMapP1 {
    pub fn assumption_gate(&self) -> GateReport {
        GateReport { separable: self.is_separable(), char_ok: self.char_ok() }
    }

    /// The cycle through `x`, if `x` is periodic.
    pub fn cycle_through(&self, x: &P1Point) -> Result<Option<CycleRecord>> {
        if !x.is_closed() {
            return Err(Error::NotClosedPoint);
        }
        let cap = forward_orbit_cap(self.degree());
        let mut path = vec![x.clone()];
        let mut seen = BTreeMap::new();
        seen.insert(x.clone(), 0usize);
        loop {
            let next = self.evaluate(path.last().unwrap());
            if next == *x {
                return Ok(Some(self.cycle_record(path)));
            }
            if seen.contains_key(&next) {
                return Ok(None);
            }
            if path.len() >= cap {
                return Err(Error::CapExceeded { what: "forward orbit length", cap: cap as u64 });
            }
            seen.insert(next.clone(), path.len());
            path.push(next);
        }
    }

    fn cycle_record(&self, mut points: Vec<P1Point>) -> CycleRecord {
        let ram_product = points.iter().map(|x| BigUint::from(self.multiplicity(x))).product();
        let start = (0..points.len()).min_by_key(|&i| &points[i]).unwrap();
        points.rotate_left(start);
        CycleRecord { period: points.len(), points, ram_product }
    }

    /// Checks that `points` is a cycle of `self` in the listed order.
    pub fn verify_cycle(&self, points: &[P1Point]) -> Result<()> {
        if points.is_empty() || points.iter().any(|x| !x.is_closed()) {
            return Err(Error::NotACycle);
        }
        for (i, x) in points.iter().enumerate() {
            let next = &points[(i + 1) % points.len()];
            if self.evaluate(x) != *next {
                return Err(Error::NotACycle);
            }
        }
        let mut sorted = points.to_vec();
        sorted.sort();
        sorted.dedup();
        if sorted.len() != points.len() {
            return Err(Error::NotACycle);
        }
        Ok(())
    }

    /// `v_-(x)` as the pair `(ram_product, period)`, `(1, 1)` off cycles.
    pub fn v_minus(&self, x: &P1Point) -> Result<(BigUint, usize)> {
        self.require_gates()?;
        Ok(match self.cycle_through(x)? {
            Some(c) => (c.ram_product, c.period),
            None => (BigUint::one(), 1),
        })
    }

    /// `max v_{f^n}(x)` over all `x` with `f^n(x) = y`, by exhaustive
    /// descent. Preimages are grouped by accumulated multiplicity, so only
    /// squarefree decompositions are needed.
    pub fn v_minus_n_bruteforce(&self, y: &P1Point, n: usize, cap: usize) -> Result<BigUint> {
        if n > cap {
            return Err(Error::CapExceeded { what: "preimage tree depth", cap: cap as u64 });
        }
        if *y == P1Point::Generic {
            return Ok(BigUint::from(self.degree()).pow(n as u32));
        }
        let r = self.ring();
        let one = r.one();
        // accumulated multiplicity -> (finite preimages, infinity present)
        let mut level: BTreeMap<BigUint, (Poly<u64>, bool)> = BTreeMap::new();
        level.insert(
            BigUint::one(),
            match y {
                P1Point::Finite(g) => (g.clone(), false),
                _ => (one.clone(), true),
            },
        );
        let (dp, dq) = (self.num().deg(), self.den().deg());
        let den_classes = squarefree(&r, self.den());
        for _ in 0..n {
            let mut next: BTreeMap<BigUint, (Poly<u64>, bool)> = BTreeMap::new();
            let mut put = |acc: BigUint, s: Option<&Poly<u64>>, inf: bool| {
                let slot = next.entry(acc).or_insert_with(|| (one.clone(), false));
                if let Some(s) = s {
                    slot.0 = r.mul(&slot.0, s);
                }
                slot.1 |= inf;
            };
            for (acc, (s, inf)) in &level {
                if s.deg() > 0 {
                    let (big_g, e_inf) = self.fiber_polynomial(s);
                    for (c, m) in squarefree(&r, &big_g) {
                        put(acc * BigUint::from(m), Some(&c), false);
                    }
                    if e_inf > 0 {
                        put(acc * BigUint::from(e_inf), None, true);
                    }
                }
                if *inf {
                    for (c, m) in &den_classes {
                        put(acc * BigUint::from(*m), Some(c), false);
                    }
                    if dp > dq {
                        put(acc * BigUint::from(dp - dq), None, true);
                    }
                }
            }
            level = next;
        }
        Ok(level.into_keys().next_back().unwrap_or_else(BigUint::one))
    }

    /// All totally invariant cycles of closed points, in canonical order.
    pub fn exceptional_set(&self) -> Result<Vec<CycleRecord>> {
        self.require_gates()?;
        let d = self.degree();
        let r = self.ring();
        let mut candidates = Vec::new();
        for (g, _) in factor(&r, &self.wronskian(), 0).factors {
            let x = P1Point::Finite(g);
            if self.multiplicity(&x) == d {
                candidates.push(x);
            }
        }
        if self.multiplicity(&P1Point::Infinity) == d {
            candidates.push(P1Point::Infinity);
        }
        let geometric: usize = candidates.iter().map(P1Point::orbit_size).sum();
        let cap = 2 * d - 2;
        if geometric > cap {
            return Err(Error::CapExceeded { what: "totally ramified points", cap: cap as u64 });
        }
        let mut cycles: Vec<CycleRecord> = Vec::new();
        for c in &candidates {
            let mut path = vec![c.clone()];
            loop {
                let next = self.evaluate(path.last().unwrap());
                if next == *c {
                    let rec = self.cycle_record(path);
                    if !cycles.contains(&rec) && self.is_totally_invariant(&rec.points) {
                        cycles.push(rec);
                    }
                    break;
                }
                if !candidates.contains(&next) || path.contains(&next) {
                    break;
                }
                path.push(next);
            }
        }
        cycles.sort();
        Ok(cycles)
    }

    /// Whether `f^{-1}(S) = S` for a finite set of closed points.
    pub fn is_totally_invariant(&self, points: &[P1Point]) -> bool {
        let mut set = points.to_vec();
        set.sort();
        set.dedup();
        let mut images: Vec<P1Point> = set.iter().map(|x| self.evaluate(x)).collect();
        images.sort();
        images.dedup();
        if images != set {
            return false;
        }
        set.iter().all(|y| self.fiber(y).iter().all(|(x, _)| set.binary_search(x).is_ok()))
    }

    /// Whether some point of a verified cycle is ramified.
    pub fn is_superattracting_cycle(&self, c: &CycleRecord) -> Result<bool> {
        self.verify_cycle(&c.points)?;
        Ok(c.points.iter().any(|x| self.multiplicity(x) >= 2))
    }
}

/// `ram_product^(1/period) == d`, decided exactly.
pub fn v_minus_equals(pair: &(BigUint, usize), d: usize) -> bool {
    pair.0 == BigUint::from(d).pow(pair.1 as u32)
}

/// `ram_product^(1/period) < d`, decided exactly.
pub fn v_minus_below(pair: &(BigUint, usize), d: usize) -> bool {
    pair.0 < BigUint::from(d).pow(pair.1 as u32)
}

/// A totally invariant point is one whose only preimage is itself.
pub fn fiber_is_singleton(f: &RationalMapP1, x: &P1Point) -> bool {
    f.fiber(&f.evaluate(x)) == vec![(x.clone(), f.degree())]
}
