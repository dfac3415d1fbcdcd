//! The acceptance suite: twelve criteria over the default fixtures, each
//! with an exact check and a runtime limit.

use std::time::{Duration, Instant};

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Deserialize;

use eqdist_core::algebra::{factor, FqField, Poly, PolyRing};
use eqdist_core::berkovich::{
    berk_pullback, kernel_push, norm_identity_check, red_push, reduction, tame_bound_check,
    tame_bound_check_full, test_functional, test_functional_sequence, BerkPointP1, RationalFunction,
};
use eqdist_core::measures::{cesaro_from, pullback, rat, AtomicMeasure, DEFAULT_SUPPORT_CAP};
use eqdist_core::p2::{
    germ_is_totally_invariant, is_superattracting_by_iteration, is_superattracting_germ, local_multiplicity,
    ueda_multiplicity_identity_check, P2Point, DEFAULT_MAX_ITER,
};
use eqdist_core::reduction::{mult_sum_check, reduce_map, reduce_point, semiconjugacy_check, MultSumStatus};
use eqdist_core::scheme::dynamics::{v_minus_below, v_minus_equals};
use eqdist_core::scheme::fiber::geometric_mass;
use eqdist_core::scheme::{closed_points_up_to, P1Point, RationalMapP1};
use eqdist_core::Error;

use crate::commands::{parse_function, parse_germ, parse_map, parse_qmap, random_rationals, run_command, status_name};
use crate::config::{ExperimentConfig, FieldSpec, Params};
use crate::error::{LabError, LabResult};
use crate::expr::rational_string;
use crate::format::{p2_string, parse_berk, parse_point, parse_qpoint, point_string, qpoint_string};
use crate::parallel::{par_iterate_berk_pullback, par_iterate_pullback};

/// The fixtures shipped with the crate.
pub const DEFAULT_FIXTURES: &str = include_str!("../fixtures/suite.json");

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapFixture {
    pub p: u64,
    #[serde(default = "one")]
    pub k: usize,
    pub map: String,
}

fn one() -> usize {
    1
}

impl MapFixture {
    fn field(&self) -> LabResult<FqField> {
        FqField::new(self.p, self.k).map_err(LabError::config)
    }

    fn build(&self) -> LabResult<(FqField, RationalMapP1)> {
        let field = self.field()?;
        let f = parse_map(&field, &self.map)?;
        Ok((field, f))
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExceptionalFixture {
    #[serde(flatten)]
    pub map: MapFixture,
    /// Expected cycles, each a list of point strings.
    pub expected: Vec<Vec<String>>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SequenceFixture {
    #[serde(flatten)]
    pub map: MapFixture,
    pub start: String,
    pub berk_start: String,
    pub n: usize,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TameFixture {
    #[serde(flatten)]
    pub map: MapFixture,
    pub start: String,
    pub phi: String,
    pub n: usize,
    pub expected_sum: String,
    pub random_triples: usize,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CesaroFixture {
    #[serde(flatten)]
    pub map: MapFixture,
    pub start: String,
    pub exceptional: Vec<String>,
    pub preperiodic_start: String,
    pub preperiodic_exceptional: Vec<String>,
    pub n: usize,
    pub threshold: String,
    pub full_route_steps: usize,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GermFixture {
    pub p: u64,
    pub u: String,
    pub w: String,
    pub degree: usize,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HenselFixture {
    pub map: String,
    /// Rational points whose images are the targets.
    pub preimages: Vec<String>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReductionFixture {
    pub p: u64,
    pub map: String,
    pub bad_map: String,
    pub samples: usize,
    pub hensel: Vec<HenselFixture>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Fixtures {
    pub fiber_maps: Vec<MapFixture>,
    pub targets_per_map: usize,
    pub composition_primes: Vec<u64>,
    pub composition_triples: usize,
    pub exceptional: Vec<ExceptionalFixture>,
    pub frobenius: MapFixture,
    pub v_minus_maps: Vec<MapFixture>,
    pub v_minus_samples: usize,
    pub bruteforce_depth: usize,
    pub equidistribution: SequenceFixture,
    pub random_fields: Vec<FieldSpec>,
    pub compatibility_measures: usize,
    pub norm_triples: usize,
    pub tame: TameFixture,
    pub cesaro: CesaroFixture,
    pub germ: GermFixture,
    pub ueda: Vec<MapFixture>,
    pub ueda_n: usize,
    pub reduction: ReductionFixture,
}

impl Fixtures {
    /// Parses and validates a fixture document: every map, point and
    /// function in it must build.
    pub fn from_json(text: &str) -> LabResult<Self> {
        let fx: Fixtures =
            serde_json::from_str(text).map_err(|e| LabError::Config(format!("invalid fixture file: {e}")))?;
        fx.validate()?;
        Ok(fx)
    }

    fn validate(&self) -> LabResult<()> {
        for m in self.fiber_maps.iter().chain(&self.v_minus_maps).chain(&self.ueda) {
            m.build()?;
        }
        for e in &self.exceptional {
            let (field, _) = e.map.build()?;
            for c in &e.expected {
                for s in c {
                    parse_point(&field, s).map_err(LabError::Config)?;
                }
            }
        }
        self.frobenius.field()?;
        let (field, _) = self.equidistribution.map.build()?;
        parse_point(&field, &self.equidistribution.start).map_err(LabError::Config)?;
        parse_berk(&field, &self.equidistribution.berk_start).map_err(LabError::Config)?;
        for s in &self.random_fields {
            s.build()?;
        }
        let (field, _) = self.tame.map.build()?;
        parse_berk(&field, &self.tame.start).map_err(LabError::Config)?;
        parse_function(&field, &self.tame.phi)?;
        parse_rational_fixture(&self.tame.expected_sum)?;
        let (field, _) = self.cesaro.map.build()?;
        parse_berk(&field, &self.cesaro.start).map_err(LabError::Config)?;
        parse_berk(&field, &self.cesaro.preperiodic_start).map_err(LabError::Config)?;
        for s in self.cesaro.exceptional.iter().chain(&self.cesaro.preperiodic_exceptional) {
            parse_point(&field, s).map_err(LabError::Config)?;
        }
        parse_rational_fixture(&self.cesaro.threshold)?;
        let gf = FqField::prime(self.germ.p).map_err(LabError::config)?;
        parse_germ(&gf, &self.germ.u, &self.germ.w, self.germ.degree)?;
        let r = &self.reduction;
        parse_qmap(&r.map, r.p)?;
        parse_qmap(&r.bad_map, r.p)?;
        for h in &r.hensel {
            parse_qmap(&h.map, r.p)?;
            for s in &h.preimages {
                parse_qpoint(s).map_err(LabError::Config)?;
            }
        }
        Ok(())
    }
}

fn parse_rational_fixture(s: &str) -> LabResult<BigRational> {
    crate::expr::parse_rational(s).ok_or_else(|| LabError::Config(format!("'{s}' is not a rational number")))
}

/// Result of one criterion.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CriterionResult {
    pub id: usize,
    pub name: &'static str,
    pub pass: bool,
    /// Measured values; deterministic for a fixed seed.
    pub detail: String,
    pub elapsed: Duration,
    pub limit: Option<Duration>,
    /// Report files `(name, contents)` written by the `suite` command.
    pub files: Vec<(String, String)>,
}

impl CriterionResult {
    /// The criterion line without timing.
    pub fn deterministic_line(&self) -> String {
        format!("{} {:>2} {}: {}", if self.pass { "PASS" } else { "FAIL" }, self.id, self.name, self.detail)
    }

    pub fn line(&self) -> String {
        let limit = self.limit.map_or_else(String::new, |l| format!(", limit {} s", l.as_secs()));
        format!("{} ({:.2} s{limit})", self.deterministic_line(), self.elapsed.as_secs_f64())
    }
}

#[derive(Clone, Debug, Default)]
pub struct SuiteReport {
    pub results: Vec<CriterionResult>,
}

impl SuiteReport {
    pub fn all_pass(&self) -> bool {
        self.results.iter().all(|r| r.pass)
    }

    pub fn render(&self) -> String {
        self.results.iter().map(|r| r.line() + "\n").collect()
    }

    pub fn render_deterministic(&self) -> String {
        let mut s: String = self.results.iter().map(|r| r.deterministic_line() + "\n").collect();
        for r in &self.results {
            for (name, body) in &r.files {
                s.push_str(&format!("== {name}\n{body}"));
            }
        }
        s
    }
}

struct Outcome {
    pass: bool,
    detail: String,
    files: Vec<(String, String)>,
}

impl Outcome {
    fn new(pass: bool, detail: String) -> Self {
        Outcome { pass, detail, files: Vec::new() }
    }
}

type Check = fn(&Fixtures, u64) -> LabResult<Outcome>;

const CRITERIA: [(&str, u64, Check); 11] = [
    ("fiber-count exactness", 10, c1_fiber_count),
    ("multiplicativity", 10, c2_multiplicativity),
    ("exceptional sets", 5, c3_exceptional),
    ("equality criterion for v_-", 30, c4_v_minus),
    ("equidistribution diagnostics", 60, c5_equidistribution),
    ("reduction compatibility", 20, c6_compatibility),
    ("norm identity", 20, c7_norm),
    ("tame bound", 30, c8_tame),
    ("Cesaro means and superattraction", 60, c9_cesaro),
    ("surface fixtures", 30, c10_surface),
    ("good reduction", 20, c11_reduction),
];

const DETERMINISM_LIMIT: u64 = 600;

fn rng_for(seed: u64, id: usize) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed.wrapping_mul(0x9e37_79b9_7f4a_7c15).wrapping_add(id as u64))
}

fn run_one(fx: &Fixtures, seed: u64, id: usize) -> CriterionResult {
    let (name, limit, check) = CRITERIA[id - 1];
    let t0 = Instant::now();
    let outcome = check(fx, seed).unwrap_or_else(|e| Outcome::new(false, format!("error: {e}")));
    let elapsed = t0.elapsed();
    let limit = Duration::from_secs(limit);
    let mut detail = outcome.detail;
    let pass = outcome.pass && elapsed < limit;
    if outcome.pass && !pass {
        detail.push_str("; exceeded the runtime limit");
    }
    CriterionResult { id, name, pass, detail, elapsed, limit: Some(limit), files: outcome.files }
}

/// Criteria 1 to 11.
pub fn run_checks(fx: &Fixtures, seed: u64) -> Vec<CriterionResult> {
    (1..=CRITERIA.len()).map(|id| run_one(fx, seed, id)).collect()
}

/// Criteria 1 to 11 on a dedicated pool of `threads` workers.
pub fn run_checks_on(fx: &Fixtures, seed: u64, threads: usize) -> LabResult<Vec<CriterionResult>> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| LabError::Config(format!("thread pool: {e}")))?;
    Ok(pool.install(|| run_checks(fx, seed)))
}

fn deterministic(rs: &[CriterionResult]) -> String {
    SuiteReport { results: rs.to_vec() }.render_deterministic()
}

/// A command run used by the determinism criterion.
fn sample_command_output(fx: &Fixtures) -> LabResult<String> {
    let e = &fx.equidistribution;
    let cfg = ExperimentConfig {
        field: Some(FieldSpec { p: e.map.p, k: e.map.k }),
        map: Some(e.map.map.clone()),
        params: Params { start: Some(e.berk_start.clone()), n: Some(e.n.min(8)), ..Params::default() },
        ..ExperimentConfig::default()
    };
    let out = run_command("equidistribute", &cfg, 0)?;
    Ok(out.files.iter().map(|(k, v)| format!("== {k}\n{v}")).collect())
}

/// Criterion 12: criteria 1 to 11 and one command rerun at parallelism 1
/// and 8 must reproduce `baseline` byte for byte.
pub fn determinism(fx: &Fixtures, seed: u64, baseline: &[CriterionResult]) -> CriterionResult {
    let t0 = Instant::now();
    let run = || -> LabResult<(bool, String)> {
        let base = deterministic(baseline);
        let mut digests = Vec::new();
        let mut same = true;
        let mut cmd_outputs = Vec::new();
        for threads in [1usize, 8] {
            let rs = run_checks_on(fx, seed, threads)?;
            let text = deterministic(&rs);
            same &= text == base;
            digests.push(format!("{threads}: {}", &crate::manifest::config_hash(text.as_bytes())[..16]));
            let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().map_err(LabError::config)?;
            cmd_outputs.push(pool.install(|| sample_command_output(fx))?);
        }
        same &= cmd_outputs[0] == cmd_outputs[1];
        Ok((same, format!("report digests {}; command outputs identical: {}", digests.join(", "), cmd_outputs[0] == cmd_outputs[1])))
    };
    let (pass, detail) = run().unwrap_or_else(|e| (false, format!("error: {e}")));
    let elapsed = t0.elapsed();
    let limit = Duration::from_secs(DETERMINISM_LIMIT);
    CriterionResult {
        id: 12,
        name: "determinism",
        pass: pass && elapsed < limit,
        detail,
        elapsed,
        limit: Some(limit),
        files: Vec::new(),
    }
}

/// All twelve criteria.
pub fn run_suite(fx: &Fixtures, seed: u64) -> SuiteReport {
    let mut results = run_checks(fx, seed);
    let d = determinism(fx, seed, &results);
    results.push(d);
    SuiteReport { results }
}

fn prefix_means(v: &[BigRational]) -> Vec<BigRational> {
    let mut acc = BigRational::zero();
    v.iter()
        .enumerate()
        .map(|(i, x)| {
            acc += x;
            &acc / BigRational::from_integer(BigInt::from(i + 1))
        })
        .collect()
}

fn random_element(rng: &mut ChaCha8Rng, field: &FqField) -> u64 {
    rng.random_range(0..field.q())
}

/// Infinity, or the first irreducible factor of a random monic polynomial
/// of degree at most `max_deg`.
pub fn random_closed_point(rng: &mut ChaCha8Rng, field: &FqField, max_deg: usize) -> P1Point {
    if rng.random_range(0..8) == 0 {
        return P1Point::Infinity;
    }
    let r = PolyRing::new(field);
    let n = rng.random_range(1..=max_deg);
    let mut c: Vec<u64> = (0..n).map(|_| random_element(rng, field)).collect();
    c.push(1);
    let g = factor(&r, &r.from_coeffs(c), 0).factors.remove(0).0;
    P1Point::Finite(g)
}

fn random_poly(rng: &mut ChaCha8Rng, field: &FqField, max_len: usize) -> Poly<u64> {
    let len = rng.random_range(1..=max_len);
    PolyRing::new(field).from_coeffs((0..len).map(|_| random_element(rng, field)).collect())
}

/// A map of degree 2 or 3; with `gates` set it also passes both gates.
pub fn random_map(rng: &mut ChaCha8Rng, field: &FqField, gates: bool) -> RationalMapP1 {
    loop {
        let d = rng.random_range(2..=3);
        let r = PolyRing::new(field);
        let num = r.from_coeffs((0..=d).map(|_| random_element(rng, field)).collect());
        let den = random_poly(rng, field, d + 1);
        if let Ok(f) = RationalMapP1::new(field.clone(), num, den) {
            if !gates || f.require_gates().is_ok() {
                return f;
            }
        }
    }
}

fn random_function(rng: &mut ChaCha8Rng, field: &FqField) -> RationalFunction {
    loop {
        let (a, b) = (random_poly(rng, field, 4), random_poly(rng, field, 4));
        if let Ok(phi) = RationalFunction::new(field.clone(), a, b) {
            return phi;
        }
    }
}

fn random_param(rng: &mut ChaCha8Rng) -> BigRational {
    rat(rng.random_range(1..12), rng.random_range(1..12))
}

fn random_tame_point(rng: &mut ChaCha8Rng, field: &FqField) -> BerkPointP1 {
    if rng.random_range(0..6) == 0 {
        return BerkPointP1::Gauss;
    }
    let x = random_closed_point(rng, field, 3);
    BerkPointP1::branch(x, random_param(rng)).expect("closed center and positive parameter")
}

fn random_berk_measure(rng: &mut ChaCha8Rng, field: &FqField) -> AtomicMeasure<BerkPointP1> {
    let n = rng.random_range(1..=4);
    let atoms: Vec<(BerkPointP1, BigRational)> = (0..n)
        .map(|_| {
            let v = match rng.random_range(0..6) {
                0 => BerkPointP1::Gauss,
                1 => BerkPointP1::classical(random_closed_point(rng, field, 3)).expect("closed point"),
                _ => random_tame_point(rng, field),
            };
            (v, random_param(rng))
        })
        .collect();
    AtomicMeasure::from_atoms(atoms)
}

fn random_fields(fx: &Fixtures) -> LabResult<Vec<FqField>> {
    fx.random_fields.iter().map(FieldSpec::build).collect()
}

fn c1_fiber_count(fx: &Fixtures, seed: u64) -> LabResult<Outcome> {
    let mut rng = rng_for(seed, 1);
    let mut jobs = Vec::new();
    for m in &fx.fiber_maps {
        let (field, f) = m.build()?;
        f.require_gates()?;
        for _ in 0..fx.targets_per_map {
            jobs.push((f.clone(), random_closed_point(&mut rng, &field, 3)));
        }
    }
    let bad: usize = jobs
        .par_iter()
        .map(|(f, y)| usize::from(geometric_mass(&f.fiber(y)) != f.degree() * y.orbit_size()))
        .sum();
    Ok(Outcome::new(
        bad == 0,
        format!("{} maps x {} targets, {} sums differ from d", fx.fiber_maps.len(), fx.targets_per_map, bad),
    ))
}

fn c2_multiplicativity(fx: &Fixtures, seed: u64) -> LabResult<Outcome> {
    let mut rng = rng_for(seed, 2);
    let fields: Vec<FqField> =
        fx.composition_primes.iter().map(|&p| FqField::prime(p).map_err(LabError::config)).collect::<LabResult<_>>()?;
    let triples: Vec<_> = (0..fx.composition_triples)
        .map(|i| {
            let field = &fields[i % fields.len()];
            let f = random_map(&mut rng, field, false);
            let g = random_map(&mut rng, field, false);
            let x = random_closed_point(&mut rng, field, 2);
            (f, g, x)
        })
        .collect();
    let results: Vec<bool> =
        triples.par_iter().map(|(f, g, x)| f.multiplicativity_check(g, x)).collect::<Result<_, _>>()?;
    let bad = results.iter().filter(|ok| !**ok).count();
    Ok(Outcome::new(bad == 0, format!("{} triples, {} mismatches", triples.len(), bad)))
}

fn cycle_sets(field: &FqField, f: &RationalMapP1) -> LabResult<Vec<Vec<String>>> {
    let mut out: Vec<Vec<String>> = f
        .exceptional_set()?
        .iter()
        .map(|c| {
            let mut v: Vec<String> = c.points.iter().map(|x| point_string(field, x)).collect();
            v.sort();
            v
        })
        .collect();
    out.sort();
    Ok(out)
}

fn show_sets(sets: &[Vec<String>]) -> String {
    if sets.is_empty() {
        return "empty".into();
    }
    sets.iter().map(|c| format!("{{{}}}", c.join(", "))).collect::<Vec<_>>().join(" ")
}

fn c3_exceptional(fx: &Fixtures, _seed: u64) -> LabResult<Outcome> {
    let mut pass = true;
    let mut parts = Vec::new();
    for e in &fx.exceptional {
        let (field, f) = e.map.build()?;
        let got = cycle_sets(&field, &f)?;
        let mut want: Vec<Vec<String>> = e
            .expected
            .iter()
            .map(|c| {
                let mut v: Vec<String> =
                    c.iter().map(|s| point_string(&field, &parse_point(&field, s).expect("validated"))).collect();
                v.sort();
                v
            })
            .collect();
        want.sort();
        pass &= got == want;
        parts.push(format!("{} over F_{}: {}", e.map.map, field.q(), show_sets(&got)));
    }
    let field = fx.frobenius.field()?;
    let frob = match parse_map(&field, &fx.frobenius.map) {
        Ok(f) => f.exceptional_set().err(),
        Err(LabError::Gate(_)) => Some(Error::InseparableMap),
        Err(e) => return Err(e),
    };
    let rejected = frob == Some(Error::InseparableMap);
    pass &= rejected;
    parts.push(format!("{} rejected as inseparable: {rejected}", fx.frobenius.map));
    Ok(Outcome::new(pass, parts.join("; ")))
}

fn c4_v_minus(fx: &Fixtures, seed: u64) -> LabResult<Outcome> {
    let mut rng = rng_for(seed, 4);
    let depth = fx.bruteforce_depth;
    let mut exceptional = Vec::new();
    let mut pool = Vec::new();
    for m in &fx.v_minus_maps {
        let (field, f) = m.build()?;
        let cycles = f.exceptional_set()?;
        for c in &cycles {
            for x in &c.points {
                exceptional.push((f.clone(), x.clone()));
            }
        }
        for x in closed_points_up_to(&field, 2) {
            if !cycles.iter().any(|c| c.points.contains(&x)) {
                pool.push((f.clone(), x));
            }
        }
    }
    let sample: Vec<_> = (0..fx.v_minus_samples)
        .map(|_| pool.swap_remove(rng.random_range(0..pool.len())))
        .collect();
    let exc_ok: Vec<bool> = exceptional
        .par_iter()
        .map(|(f, x)| -> LabResult<bool> {
            let d = f.degree();
            let mut ok = v_minus_equals(&f.v_minus(x)?, d);
            for n in 1..=depth {
                ok &= f.v_minus_n_bruteforce(x, n, depth)? == BigUint::from(d).pow(n as u32);
            }
            Ok(ok)
        })
        .collect::<LabResult<_>>()?;
    let non_ok: Vec<bool> = sample
        .par_iter()
        .map(|(f, x)| -> LabResult<bool> {
            let d = f.degree();
            let v = f.v_minus(x)?;
            let mut ok = v_minus_below(&v, d);
            let brute: Vec<BigUint> =
                (1..=depth).map(|n| f.v_minus_n_bruteforce(x, n, depth)).collect::<Result<_, _>>()?;
            ok &= brute[depth - 1] < BigUint::from(d).pow(depth as u32);
            // On a cycle of period s the backward orbit along the cycle
            // realizes ram^(floor(n/s)).
            for (i, b) in brute.iter().enumerate() {
                ok &= *b >= v.0.pow(((i + 1) / v.1) as u32);
            }
            Ok(ok)
        })
        .collect::<LabResult<_>>()?;
    let exc_bad = exc_ok.iter().filter(|b| !**b).count();
    let non_bad = non_ok.iter().filter(|b| !**b).count();
    Ok(Outcome::new(
        exc_bad == 0 && non_bad == 0,
        format!(
            "{} exceptional points with v_- = d ({} failures); {} sampled points with v_- < d ({} failures); brute force to depth {depth}",
            exceptional.len(),
            exc_bad,
            sample.len(),
            non_bad
        ),
    ))
}

fn c5_equidistribution(fx: &Fixtures, _seed: u64) -> LabResult<Outcome> {
    let e = &fx.equidistribution;
    let (field, f) = e.map.build()?;
    let n = e.n;
    let expected = BigRational::new(BigInt::one(), BigInt::from(f.degree()).pow(n as u32));
    let x = parse_point(&field, &e.start).map_err(LabError::Config)?;
    let it = par_iterate_pullback(&f, AtomicMeasure::dirac(x), n, true, DEFAULT_SUPPORT_CAP)?;
    let last = it.measures.last().expect("start measure");
    let classical_ok = !it.truncated && last.max_atom_mass() == expected && last.total_mass().is_one();
    let v = parse_berk(&field, &e.berk_start).map_err(LabError::Config)?;
    let bt = par_iterate_berk_pullback(&f, AtomicMeasure::dirac(v), n, true, DEFAULT_SUPPORT_CAP)?;
    let blast = bt.measures.last().expect("start measure");
    let mut rows = Vec::new();
    let mut red_ok = true;
    let red = blast.pushforward_by(reduction);
    for (y, c) in red.iter() {
        let mass = c * BigRational::from_integer(BigInt::from(y.orbit_size()));
        let want = &expected * BigRational::from_integer(BigInt::from(y.orbit_size()));
        red_ok &= mass == want;
        rows.push(format!("{},{},{}\n", point_string(&field, y), y.orbit_size(), rational_string(&mass)));
    }
    let berk_ok = !bt.truncated && blast.max_atom_mass() == expected && red_ok;
    let mut out = Outcome::new(
        classical_ok && berk_ok,
        format!(
            "classical max atom mass {} (want {}), support {}; Berkovich max branch mass {}, {} reduction orbits with mass 2^-{n} per geometric point: {}",
            rational_string(&last.max_atom_mass()),
            rational_string(&expected),
            last.support_size(),
            rational_string(&blast.max_atom_mass()),
            red.len(),
            red_ok
        ),
    );
    let mut csv = String::from("reduction,orbit_size,mass\n");
    csv.extend(rows);
    out.files.push(("c5_reduction_masses.csv".into(), csv));
    Ok(out)
}

fn c6_compatibility(fx: &Fixtures, seed: u64) -> LabResult<Outcome> {
    let mut rng = rng_for(seed, 6);
    let fields = random_fields(fx)?;
    let jobs: Vec<_> = (0..fx.compatibility_measures)
        .map(|i| {
            let field = &fields[i % fields.len()];
            (random_map(&mut rng, field, true), random_berk_measure(&mut rng, field))
        })
        .collect();
    let results: Vec<(bool, bool)> = jobs
        .par_iter()
        .map(|(f, mu)| -> LabResult<(bool, bool)> {
            let up = berk_pullback(f, mu)?;
            Ok((red_push(&up) == pullback(f, &red_push(mu))?, kernel_push(&up) == pullback(f, &kernel_push(mu))?))
        })
        .collect::<LabResult<_>>()?;
    let red_bad = results.iter().filter(|r| !r.0).count();
    let ker_bad = results.iter().filter(|r| !r.1).count();
    Ok(Outcome::new(
        red_bad == 0 && ker_bad == 0,
        format!("{} measures; reduction mismatches {red_bad}, kernel mismatches {ker_bad}", jobs.len()),
    ))
}

fn c7_norm(fx: &Fixtures, seed: u64) -> LabResult<Outcome> {
    let mut rng = rng_for(seed, 7);
    let fields = random_fields(fx)?;
    let jobs: Vec<_> = (0..fx.norm_triples)
        .map(|i| {
            let field = &fields[i % fields.len()];
            (random_map(&mut rng, field, true), random_tame_point(&mut rng, field), random_function(&mut rng, field))
        })
        .collect();
    let ok: Vec<bool> =
        jobs.par_iter().map(|(f, v, phi)| norm_identity_check(f, v, phi).map(|id| id.holds())).collect::<Result<_, _>>()?;
    let bad = ok.iter().filter(|b| !**b).count();
    Ok(Outcome::new(bad == 0, format!("{} triples, {bad} mismatches", jobs.len())))
}

fn c8_tame(fx: &Fixtures, seed: u64) -> LabResult<Outcome> {
    let t = &fx.tame;
    let (field, f) = t.map.build()?;
    let v = parse_berk(&field, &t.start).map_err(LabError::Config)?;
    let phi = parse_function(&field, &t.phi)?;
    let want = parse_rational_fixture(&t.expected_sum)?;
    let table = tame_bound_check(&f, &v, &phi, t.n)?;
    let (full, truncated) = tame_bound_check_full(&f, &v, &phi, t.n, DEFAULT_SUPPORT_CAP)?;
    let fixture_ok = !truncated && table.sums.iter().all(|s| *s == want) && full.sums == table.sums && table.holds();
    let mut rng = rng_for(seed, 8);
    let fields = random_fields(fx)?;
    let jobs: Vec<_> = (0..t.random_triples)
        .map(|i| {
            let field = &fields[i % fields.len()];
            (random_map(&mut rng, field, true), random_tame_point(&mut rng, field), random_function(&mut rng, field))
        })
        .collect();
    let ok: Vec<bool> =
        jobs.par_iter().map(|(f, v, phi)| tame_bound_check(f, v, phi, t.n).map(|t| t.holds())).collect::<Result<_, _>>()?;
    let bad = ok.iter().filter(|b| !**b).count();
    Ok(Outcome::new(
        fixture_ok && bad == 0,
        format!(
            "fixture sums for n <= {}: {} (full route agrees: {}); {} random triples, {bad} above C(phi)",
            t.n,
            table.sums.iter().map(rational_string).collect::<Vec<_>>().join(" "),
            full.sums == table.sums,
            jobs.len()
        ),
    ))
}

fn c9_cesaro(fx: &Fixtures, _seed: u64) -> LabResult<Outcome> {
    let c = &fx.cesaro;
    let (field, f) = c.map.build()?;
    let pts = |v: &[String]| -> LabResult<Vec<P1Point>> {
        v.iter().map(|s| parse_point(&field, s).map_err(LabError::Config)).collect()
    };
    let (e1, e2) = (pts(&c.exceptional)?, pts(&c.preperiodic_exceptional)?);
    let v1 = parse_berk(&field, &c.start).map_err(LabError::Config)?;
    let v2 = parse_berk(&field, &c.preperiodic_start).map_err(LabError::Config)?;
    let threshold = parse_rational_fixture(&c.threshold)?;
    // Clause 1: Cesaro means from v1 against E1.
    let seq1 = test_functional_sequence(&f, &v1, &e1, c.n)?;
    let means1 = prefix_means(&seq1);
    let clause1 = means1.iter().all(Zero::is_zero);
    // The restricted sequence must match the functional on the full pullbacks.
    let full = par_iterate_berk_pullback(&f, AtomicMeasure::dirac(v1), c.full_route_steps, true, DEFAULT_SUPPORT_CAP)?;
    let full_means: Vec<BigRational> = cesaro_from(&full.measures).iter().map(|m| test_functional(m, &e1)).collect();
    let agree1 = full_means[..] == means1[..full_means.len()];
    // Clause 2: the functional from v2 against E2 falls below the threshold.
    let seq2 = test_functional_sequence(&f, &v2, &e2, c.n)?;
    let full2 = par_iterate_berk_pullback(&f, AtomicMeasure::dirac(v2), c.full_route_steps, true, DEFAULT_SUPPORT_CAP)?;
    let full_seq2: Vec<BigRational> = full2.measures.iter().map(|m| test_functional(m, &e2)).collect();
    let agree2 = full_seq2[..] == seq2[..full_seq2.len()];
    let below_from = (0..=c.n).find(|&k| seq2[k..].iter().all(|s| *s < threshold));
    let clause2 = below_from.is_some();
    let means2 = prefix_means(&seq2);
    Ok(Outcome::new(
        clause1 && clause2 && agree1 && agree2,
        format!(
            "clause 1 Cesaro functional zero for all n <= {}: {clause1}; clause 2 functional {} stays below {} from n = {}; last Cesaro mean {} (reported); full route agrees for n <= {}: {}",
            c.n,
            seq2.iter().map(rational_string).collect::<Vec<_>>().join(" "),
            rational_string(&threshold),
            below_from.map_or_else(|| "never".into(), |k| k.to_string()),
            rational_string(means2.last().expect("n >= 0")),
            c.full_route_steps,
            agree1 && agree2
        ),
    ))
}

fn c10_surface(fx: &Fixtures, _seed: u64) -> LabResult<Outcome> {
    let g = &fx.germ;
    let field = FqField::prime(g.p).map_err(LabError::config)?;
    let germ = parse_germ(&field, &g.u, &g.w, g.degree)?;
    let mu = local_multiplicity(&germ)?;
    let ti = germ_is_totally_invariant(&germ)?;
    let sa = is_superattracting_germ(&germ) || is_superattracting_by_iteration(&germ, DEFAULT_MAX_ITER);
    let germ_ok = mu == g.degree * g.degree && ti && !sa;
    let mut checks = 0usize;
    let mut bad = Vec::new();
    for m in &fx.ueda {
        let (field, h) = m.build()?;
        let pts = closed_points_up_to(&field, 1);
        let mut targets = Vec::new();
        for (i, a) in pts.iter().enumerate() {
            for b in &pts[i..] {
                targets.push(P2Point::new(a.clone(), b.clone())?);
            }
        }
        let results: Vec<(P2Point, usize, bool)> = targets
            .par_iter()
            .flat_map(|x| (0..=fx.ueda_n).into_par_iter().map(move |n| (x.clone(), n)))
            .map(|(x, n)| ueda_multiplicity_identity_check(&h, &x, n).map(|id| (x, n, id.holds())))
            .collect::<Result<_, _>>()?;
        checks += results.len();
        for (x, n, ok) in results {
            if !ok {
                bad.push(format!("{} at {} n={n}", m.map, p2_string(&field, &x)));
            }
        }
    }
    Ok(Outcome::new(
        germ_ok && bad.is_empty(),
        format!(
            "germ ({}, {}): colength {mu}, totally invariant {ti}, superattracting {sa}; Ueda identity {} checks, failures [{}]",
            g.u,
            g.w,
            checks,
            bad.join(", ")
        ),
    ))
}

fn c11_reduction(fx: &Fixtures, seed: u64) -> LabResult<Outcome> {
    let r = &fx.reduction;
    let f = parse_qmap(&r.map, r.p)?;
    let sample = random_rationals(seed, r.samples);
    let rows: Vec<bool> = sample
        .par_iter()
        .map(|x| semiconjugacy_check(&f, std::slice::from_ref(x)).map(|v| v[0].holds()))
        .collect::<Result<_, _>>()?;
    let semi_bad = rows.iter().filter(|b| !**b).count();
    let bad_map = parse_qmap(&r.bad_map, r.p)?;
    let gate = reduce_map(&bad_map).err();
    let gate_ok = matches!(gate, Some(Error::GoodReductionFailure { .. }));
    let mut lifts = 0;
    let mut lift_bad = Vec::new();
    for h in &r.hensel {
        let g = parse_qmap(&h.map, r.p)?;
        for s in &h.preimages {
            let x0 = parse_qpoint(s).map_err(LabError::Config)?;
            let y = g.evaluate(&x0);
            let xt = reduce_point(&x0, r.p)?;
            let rec = mult_sum_check(&g, &y, &xt)?;
            lifts += 1;
            let ok = rec.status == MultSumStatus::Verified
                && rec.holds
                && rec.count == rec.reduced_multiplicity
                && rec.lifts.iter().any(|l| l.point == x0);
            if !ok {
                lift_bad.push(format!("{} at {}: {}", h.map, qpoint_string(&x0), status_name(&rec.status)));
            }
        }
    }
    Ok(Outcome::new(
        semi_bad == 0 && gate_ok && lift_bad.is_empty(),
        format!(
            "semiconjugacy on {} points, {semi_bad} failures; {} fails the gate: {gate_ok}; {lifts} Hensel fixtures, failures [{}]",
            sample.len(),
            r.bad_map,
            lift_bad.join(", ")
        ),
    ))
}
