//! The experiment commands. Each command turns a config and a seed into
//! report files; nothing here touches the file system.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use eqdist_core::algebra::FqField;
use eqdist_core::berkovich::{
    berk_pullback, is_tame, kernel_push, norm_identity_check, red_push, reduction, tame_bound_check, test_functional,
    BerkPointP1, Param, RationalFunction,
};
use eqdist_core::measures::{cesaro_from, pullback, Atom, AtomicMeasure, Iteration, DEFAULT_SUPPORT_CAP};
use eqdist_core::p2::{
    is_superattracting_by_iteration, is_superattracting_germ, local_multiplicity, sym_fiber_mass,
    ueda_multiplicity_identity_check, LocalMapGerm, SymProdMap, DEFAULT_MAX_ITER,
};
use eqdist_core::reduction::{
    mult_sum_check, reduce_map, reduce_point, semiconjugacy_check, MultSumStatus, QProjPoint, QRationalMapP1,
};
use eqdist_core::scheme::dynamics::{v_minus_equals, CycleRecord};
use eqdist_core::scheme::fiber::geometric_mass;
use eqdist_core::scheme::{P1Point, RationalMapP1};

use crate::config::ExperimentConfig;
use crate::error::{LabError, LabResult};
use crate::expr::{self, rational_string};
use crate::format::{
    berk_string, is_berk_string, measure_lines, p2_string, parse_berk, parse_p2, parse_point, parse_qpoint,
    point_string, qpoint_string,
};
use crate::parallel::{par_iterate_berk_pullback, par_iterate_pullback};
use crate::report::{csv_table, json_lines, RunOutput};

/// Command names accepted on the command line, in documentation order.
pub const COMMANDS: [&str; 13] = [
    "fiber",
    "multiplicity",
    "exceptional",
    "superattracting",
    "equidistribute",
    "cesaro",
    "berk-pullback",
    "norm-check",
    "tame-bound",
    "reduction-check",
    "sym-fiber",
    "local-mult",
    "suite",
];

/// Runs one command other than `suite`.
pub fn run_command(name: &str, cfg: &ExperimentConfig, seed: u64) -> LabResult<RunOutput> {
    if let Some(c) = &cfg.command {
        if c != name {
            return Err(LabError::Config(format!("config is for command '{c}', not '{name}'")));
        }
    }
    match name {
        "fiber" => cmd_fiber(cfg),
        "multiplicity" => cmd_multiplicity(cfg),
        "exceptional" => cmd_exceptional(cfg),
        "superattracting" => cmd_superattracting(cfg),
        "equidistribute" => cmd_equidistribute(cfg),
        "cesaro" => cmd_cesaro(cfg),
        "berk-pullback" => cmd_berk_pullback(cfg),
        "norm-check" => cmd_norm_check(cfg),
        "tame-bound" => cmd_tame_bound(cfg),
        "reduction-check" => cmd_reduction_check(cfg, seed),
        "sym-fiber" => cmd_sym_fiber(cfg),
        "local-mult" => cmd_local_mult(cfg),
        _ => Err(LabError::Config(format!("unknown command '{name}'"))),
    }
}

/// A map over `field` from its expression.
pub fn parse_map(field: &FqField, src: &str) -> LabResult<RationalMapP1> {
    let (num, den) = expr::parse_rational_map(src).map_err(|e| LabError::Config(format!("map '{src}': {e}")))?;
    let num = expr::reduce_coeffs(field, &num).map_err(LabError::Config)?;
    let den = expr::reduce_coeffs(field, &den).map_err(LabError::Config)?;
    Ok(RationalMapP1::new(field.clone(), num, den)?)
}

pub fn parse_function(field: &FqField, src: &str) -> LabResult<RationalFunction> {
    let (num, den) = expr::parse_rational_map(src).map_err(|e| LabError::Config(format!("function '{src}': {e}")))?;
    let num = expr::reduce_coeffs(field, &num).map_err(LabError::Config)?;
    let den = expr::reduce_coeffs(field, &den).map_err(LabError::Config)?;
    Ok(RationalFunction::new(field.clone(), num, den)?)
}

/// A map over `Q` from its expression.
pub fn parse_qmap(src: &str, p: u64) -> LabResult<QRationalMapP1> {
    let (num, den) = expr::parse_rational_map(src).map_err(|e| LabError::Config(format!("map '{src}': {e}")))?;
    Ok(QRationalMapP1::new(num, den, p)?)
}

pub fn parse_germ(field: &FqField, u: &str, w: &str, degree: usize) -> LabResult<LocalMapGerm> {
    let comp = |s: &str| -> LabResult<_> {
        let t = expr::parse_bivariate(s).map_err(|e| LabError::Config(format!("germ '{s}': {e}")))?;
        expr::reduce_bivariate(field, &t).map_err(LabError::Config)
    };
    Ok(LocalMapGerm::new(field.clone(), comp(u)?, comp(w)?, degree)?)
}

fn field_and_map(cfg: &ExperimentConfig) -> LabResult<(FqField, RationalMapP1)> {
    let field = cfg.field()?;
    let f = parse_map(&field, cfg.map_expr()?)?;
    Ok((field, f))
}

fn points(field: &FqField, list: &[String], what: &str) -> LabResult<Vec<P1Point>> {
    if list.is_empty() {
        return Err(LabError::Config(format!("'params.{what}' is empty")));
    }
    list.iter().map(|s| parse_point(field, s).map_err(LabError::Config)).collect()
}

fn cycle_strings(field: &FqField, c: &CycleRecord) -> Vec<String> {
    c.points.iter().map(|x| point_string(field, x)).collect()
}

fn start_string(cfg: &ExperimentConfig) -> LabResult<&str> {
    cfg.params.start.as_deref().ok_or_else(|| LabError::config("missing 'params.start'"))
}

fn in_exceptional_set(f: &RationalMapP1, x: &P1Point) -> LabResult<bool> {
    Ok(f.exceptional_set()?.iter().any(|c| c.points.contains(x)))
}

fn cap_note(out: &mut RunOutput, truncated: bool, cap: usize) {
    if truncated {
        out.note(format!("truncated: support would exceed {cap} geometric points"));
        out.cap_hit = Some(format!("support cap {cap} reached"));
    }
}

#[derive(Serialize)]
struct FiberRecord {
    target: String,
    point: String,
    multiplicity: usize,
    orbit_size: usize,
}

fn cmd_fiber(cfg: &ExperimentConfig) -> LabResult<RunOutput> {
    let (field, f) = field_and_map(cfg)?;
    f.require_gates()?;
    let targets = points(&field, &cfg.params.targets, "targets")?;
    let mut out = RunOutput::default();
    let mut records = Vec::new();
    let mut rows = Vec::new();
    let mut all = true;
    for y in &targets {
        let fib = f.fiber(y);
        for (x, m) in &fib {
            records.push(FiberRecord {
                target: point_string(&field, y),
                point: point_string(&field, x),
                multiplicity: *m,
                orbit_size: x.orbit_size(),
            });
        }
        let sum = geometric_mass(&fib) / y.orbit_size();
        let holds = sum == f.degree();
        all &= holds;
        rows.push(vec![
            point_string(&field, y),
            fib.len().to_string(),
            sum.to_string(),
            f.degree().to_string(),
            holds.to_string(),
        ]);
    }
    out.file("fiber.jsonl", json_lines(&records));
    out.file("fiber_summary.csv", csv_table(&["target", "records", "sum", "degree", "holds"], &rows));
    out.note(format!("fiber: {} targets, sum = d at every target: {all}", targets.len()));
    Ok(out)
}

fn cmd_multiplicity(cfg: &ExperimentConfig) -> LabResult<RunOutput> {
    let (field, f) = field_and_map(cfg)?;
    let xs = points(&field, &cfg.params.points, "points")?;
    let gs: Vec<RationalMapP1> = cfg.maps.iter().map(|s| parse_map(&field, s)).collect::<LabResult<_>>()?;
    let mut out = RunOutput::default();
    let rows: Vec<Vec<String>> = xs
        .iter()
        .map(|x| {
            let y = f.evaluate(x);
            vec![point_string(&field, x), point_string(&field, &y), f.multiplicity(x).to_string()]
        })
        .collect();
    out.file("multiplicity.csv", csv_table(&["point", "image", "multiplicity"], &rows));
    if !gs.is_empty() {
        let mut rows = Vec::new();
        let mut all = true;
        for (i, g) in gs.iter().enumerate() {
            let gf = f.then(g)?;
            for x in &xs {
                let (mf, mg, mgf) = (f.multiplicity(x), g.multiplicity(&f.evaluate(x)), gf.multiplicity(x));
                all &= mgf == mf * mg;
                rows.push(vec![
                    (i + 1).to_string(),
                    point_string(&field, x),
                    mf.to_string(),
                    mg.to_string(),
                    mgf.to_string(),
                    (mgf == mf * mg).to_string(),
                ]);
            }
        }
        out.file(
            "multiplicativity.csv",
            csv_table(&["map", "point", "m_f", "m_g_at_image", "m_composite", "holds"], &rows),
        );
        out.note(format!("multiplicativity holds at every point: {all}"));
    }
    Ok(out)
}

#[derive(Serialize)]
struct CycleOut {
    points: Vec<String>,
    period: usize,
    ram_product: String,
    v_minus_equals_degree: bool,
    superattracting: bool,
}

fn cmd_exceptional(cfg: &ExperimentConfig) -> LabResult<RunOutput> {
    let (field, f) = field_and_map(cfg)?;
    let cycles = f.exceptional_set()?;
    let d = f.degree();
    let mut records = Vec::new();
    for c in &cycles {
        records.push(CycleOut {
            points: cycle_strings(&field, c),
            period: c.period,
            ram_product: c.ram_product.to_string(),
            v_minus_equals_degree: v_minus_equals(&(c.ram_product.clone(), c.period), d),
            superattracting: f.is_superattracting_cycle(c)?,
        });
    }
    let mut out = RunOutput::default();
    out.file("exceptional.jsonl", json_lines(&records));
    if !cfg.params.points.is_empty() {
        let mut rows = Vec::new();
        for x in points(&field, &cfg.params.points, "points")? {
            let v = f.v_minus(&x)?;
            let exc = cycles.iter().any(|c| c.points.contains(&x));
            rows.push(vec![
                point_string(&field, &x),
                v.0.to_string(),
                v.1.to_string(),
                v_minus_equals(&v, d).to_string(),
                exc.to_string(),
            ]);
        }
        out.file("v_minus.csv", csv_table(&["point", "ram_product", "period", "v_minus_equals_d", "exceptional"], &rows));
    }
    let names: Vec<String> = records.iter().map(|r| format!("{{{}}}", r.points.join(", "))).collect();
    out.note(if names.is_empty() { "exceptional set: empty".into() } else { format!("exceptional set: {}", names.join(" ")) });
    Ok(out)
}

fn cmd_superattracting(cfg: &ExperimentConfig) -> LabResult<RunOutput> {
    let mut out = RunOutput::default();
    let field = cfg.field()?;
    if let Some(g) = &cfg.params.germ {
        let germ = parse_germ(&field, &g.u, &g.w, g.degree)?;
        let max_iter = cfg.params.max_iter.unwrap_or(DEFAULT_MAX_ITER);
        let (lin, it) = (is_superattracting_germ(&germ), is_superattracting_by_iteration(&germ, max_iter));
        let j = germ.jacobian();
        let rows = vec![vec![
            format!("[[{},{}],[{},{}]]", j[0][0], j[0][1], j[1][0], j[1][1]),
            lin.to_string(),
            max_iter.to_string(),
            it.to_string(),
        ]];
        out.file("superattracting.csv", csv_table(&["jacobian", "nilpotent", "max_iter", "by_iteration"], &rows));
        out.note(format!("germ superattracting: {lin}"));
        return Ok(out);
    }
    let f = parse_map(&field, cfg.map_expr()?)?;
    f.require_gates()?;
    let mut cycles: Vec<CycleRecord> = f.exceptional_set()?;
    for x in cfg.params.points.iter().map(|s| parse_point(&field, s).map_err(LabError::Config)) {
        let x = x?;
        match f.cycle_through(&x)? {
            Some(c) => cycles.push(c),
            None => return Err(LabError::Config(format!("{} is not periodic", point_string(&field, &x)))),
        }
    }
    cycles.sort();
    cycles.dedup();
    let mut rows = Vec::new();
    for c in &cycles {
        rows.push(vec![
            cycle_strings(&field, c).join(" "),
            c.period.to_string(),
            c.ram_product.to_string(),
            f.is_superattracting_cycle(c)?.to_string(),
        ]);
    }
    out.file("superattracting.csv", csv_table(&["cycle", "period", "ram_product", "superattracting"], &rows));
    out.note(format!("{} cycles examined", cycles.len()));
    Ok(out)
}

enum Start {
    Classical(P1Point),
    Berkovich(BerkPointP1),
}

fn parse_start(field: &FqField, s: &str) -> LabResult<Start> {
    if is_berk_string(s) {
        Ok(Start::Berkovich(parse_berk(field, s).map_err(LabError::Config)?))
    } else {
        Ok(Start::Classical(parse_point(field, s).map_err(LabError::Config)?))
    }
}

fn classical_rows(field: &FqField, seq: &[AtomicMeasure<P1Point>], targets: &[P1Point], first: usize) -> String {
    let mut header = vec!["step".to_string(), "support_size".into(), "max_atom_mass".into()];
    header.extend(targets.iter().map(|t| format!("mass[{}]", point_string(field, t))));
    let rows: Vec<Vec<String>> = seq
        .iter()
        .enumerate()
        .map(|(k, mu)| {
            let mut r = vec![(k + first).to_string(), mu.support_size().to_string(), rational_string(&mu.max_atom_mass())];
            r.extend(targets.iter().map(|t| rational_string(&mu.mass_on(|x| x == t))));
            r
        })
        .collect();
    let h: Vec<&str> = header.iter().map(String::as_str).collect();
    csv_table(&h, &rows)
}

fn branch_params(mu: &AtomicMeasure<BerkPointP1>) -> (Option<BigRational>, Option<BigRational>) {
    let ts: Vec<&BigRational> = mu
        .iter()
        .filter_map(|(w, _)| match w {
            BerkPointP1::Branch { t: Param::Finite(t), .. } => Some(t),
            _ => None,
        })
        .collect();
    (ts.iter().min().map(|t| (*t).clone()), ts.iter().max().map(|t| (*t).clone()))
}

fn berk_rows(
    field: &FqField,
    seq: &[AtomicMeasure<BerkPointP1>],
    targets: &[P1Point],
    e: &[P1Point],
    first: usize,
) -> String {
    let mut header = vec![
        "step".to_string(),
        "support_size".into(),
        "max_branch_mass".into(),
        "gauss_mass".into(),
        "min_t".into(),
        "max_t".into(),
        "test_functional".into(),
    ];
    header.extend(targets.iter().map(|t| format!("red_mass[{}]", point_string(field, t))));
    let opt = |t: Option<BigRational>| t.map_or_else(|| "-".to_string(), |t| rational_string(&t));
    let rows: Vec<Vec<String>> = seq
        .iter()
        .enumerate()
        .map(|(k, mu)| {
            let (lo, hi) = branch_params(mu);
            let branch_max = mu
                .iter()
                .filter(|(w, _)| **w != BerkPointP1::Gauss)
                .map(|(_, c)| c.clone())
                .max()
                .unwrap_or_else(BigRational::zero);
            let mut r = vec![
                (k + first).to_string(),
                mu.support_size().to_string(),
                rational_string(&branch_max),
                rational_string(&mu.mass_at(&BerkPointP1::Gauss)),
                opt(lo),
                opt(hi),
                rational_string(&test_functional(mu, e)),
            ];
            r.extend(targets.iter().map(|t| rational_string(&mu.mass_on(|w| reduction(w) == *t))));
            r
        })
        .collect();
    let h: Vec<&str> = header.iter().map(String::as_str).collect();
    csv_table(&h, &rows)
}

struct Sequence {
    field: FqField,
    f: RationalMapP1,
    targets: Vec<P1Point>,
    e: Vec<P1Point>,
    cap: usize,
    start: Start,
}

fn sequence_setup(cfg: &ExperimentConfig) -> LabResult<Sequence> {
    let (field, f) = field_and_map(cfg)?;
    f.require_gates()?;
    let start = parse_start(&field, start_string(cfg)?)?;
    let parse_all = |v: &[String]| -> LabResult<Vec<P1Point>> {
        v.iter().map(|s| parse_point(&field, s).map_err(LabError::Config)).collect()
    };
    let targets = parse_all(&cfg.params.targets)?;
    let e = parse_all(&cfg.params.exceptional)?;
    Ok(Sequence { field, f, targets, e, cap: cfg.params.cap.unwrap_or(DEFAULT_SUPPORT_CAP), start })
}

fn note_start(out: &mut RunOutput, s: &Sequence) -> LabResult<()> {
    let center = match &s.start {
        Start::Classical(x) => Some(x),
        Start::Berkovich(v) => v.center(),
    };
    if let Some(x) = center {
        if x.is_closed() && in_exceptional_set(&s.f, x)? {
            out.note("exceptional start: the start lies on a totally invariant cycle");
        }
    }
    Ok(())
}

fn cmd_equidistribute(cfg: &ExperimentConfig) -> LabResult<RunOutput> {
    let s = sequence_setup(cfg)?;
    let n = cfg.n()?;
    let mut out = RunOutput::default();
    note_start(&mut out, &s)?;
    match &s.start {
        Start::Classical(x) => {
            let it = par_iterate_pullback(&s.f, AtomicMeasure::dirac(x.clone()), n, true, s.cap)?;
            out.file("equidistribute.csv", classical_rows(&s.field, &it.measures, &s.targets, 0));
            finish_sequence(&mut out, &it, |x| point_string(&s.field, x), s.cap);
        }
        Start::Berkovich(v) => {
            let it = par_iterate_berk_pullback(&s.f, AtomicMeasure::dirac(v.clone()), n, true, s.cap)?;
            out.file("equidistribute.csv", berk_rows(&s.field, &it.measures, &s.targets, &s.e, 0));
            finish_sequence(&mut out, &it, |w| berk_string(&s.field, w), s.cap);
        }
    }
    Ok(out)
}

fn finish_sequence<T: Atom>(out: &mut RunOutput, it: &Iteration<T>, show: impl Fn(&T) -> String, cap: usize) {
    let last = it.measures.last().expect("start measure");
    out.file("final_measure.tsv", measure_lines(last, show));
    out.note(format!(
        "steps: {}, final support: {}, final max atom mass: {}",
        it.measures.len() - 1,
        last.support_size(),
        rational_string(&last.max_atom_mass())
    ));
    cap_note(out, it.truncated, cap);
}

fn cmd_cesaro(cfg: &ExperimentConfig) -> LabResult<RunOutput> {
    let s = sequence_setup(cfg)?;
    let n = cfg.n()?.max(1);
    let mut out = RunOutput::default();
    note_start(&mut out, &s)?;
    match &s.start {
        Start::Classical(x) => {
            let it = par_iterate_pullback(&s.f, AtomicMeasure::dirac(x.clone()), n - 1, true, s.cap)?;
            let means = cesaro_from(&it.measures);
            out.file("cesaro.csv", classical_rows(&s.field, &means, &s.targets, 1));
            cap_note(&mut out, it.truncated, s.cap);
        }
        Start::Berkovich(v) => {
            let it = par_iterate_berk_pullback(&s.f, AtomicMeasure::dirac(v.clone()), n - 1, true, s.cap)?;
            let means = cesaro_from(&it.measures);
            out.file("cesaro.csv", berk_rows(&s.field, &means, &s.targets, &s.e, 1));
            let last = means.last().expect("at least one mean");
            out.note(format!("final test functional: {}", rational_string(&test_functional(last, &s.e))));
            cap_note(&mut out, it.truncated, s.cap);
        }
    }
    Ok(out)
}

fn berk_points(field: &FqField, cfg: &ExperimentConfig) -> LabResult<Vec<BerkPointP1>> {
    let mut list: Vec<&String> = cfg.params.start.iter().collect();
    list.extend(&cfg.params.points);
    if list.is_empty() {
        return Err(LabError::config("missing 'params.start' or 'params.points'"));
    }
    list.into_iter().map(|s| parse_berk(field, s).map_err(LabError::Config)).collect()
}

fn cmd_berk_pullback(cfg: &ExperimentConfig) -> LabResult<RunOutput> {
    let (field, f) = field_and_map(cfg)?;
    f.require_gates()?;
    let ft = &f;
    let vs = berk_points(&field, cfg)?;
    let n = cfg.params.n.unwrap_or(1);
    let cap = cfg.params.cap.unwrap_or(DEFAULT_SUPPORT_CAP);
    let mut mu = AtomicMeasure::zero();
    for v in &vs {
        mu = mu.add(&AtomicMeasure::dirac(v.clone()));
    }
    let mu = mu.scale(&BigRational::new(BigInt::from(1), BigInt::from(vs.len())));
    let it = par_iterate_berk_pullback(ft, mu, n, true, cap)?;
    let mut rows = Vec::new();
    for (k, pair) in it.measures.windows(2).enumerate() {
        let up = berk_pullback(ft, &pair[0])?;
        let red_ok = red_push(&up) == pullback(ft, &red_push(&pair[0]))?;
        let ker_ok = kernel_push(&up) == pullback(ft, &kernel_push(&pair[0]))?;
        rows.push(vec![
            (k + 1).to_string(),
            pair[1].support_size().to_string(),
            rational_string(&pair[1].total_mass()),
            red_ok.to_string(),
            ker_ok.to_string(),
        ]);
    }
    let mut out = RunOutput::default();
    out.file(
        "berk_pullback.csv",
        csv_table(&["step", "support_size", "total_mass", "reduction_compatible", "kernel_compatible"], &rows),
    );
    finish_sequence(&mut out, &it, |w| berk_string(&field, w), cap);
    Ok(out)
}

#[derive(Serialize)]
struct NormRecord {
    point: String,
    phi: String,
    lhs: String,
    rhs: String,
    holds: bool,
}

fn phi_of(cfg: &ExperimentConfig, field: &FqField) -> LabResult<(String, RationalFunction)> {
    let s = cfg.params.phi.as_deref().ok_or_else(|| LabError::config("missing 'params.phi'"))?;
    Ok((s.to_string(), parse_function(field, s)?))
}

fn cmd_norm_check(cfg: &ExperimentConfig) -> LabResult<RunOutput> {
    let (field, f) = field_and_map(cfg)?;
    let (phi_s, phi) = phi_of(cfg, &field)?;
    let vs = berk_points(&field, cfg)?;
    let records: Vec<NormRecord> = vs
        .par_iter()
        .map(|v| {
            let id = norm_identity_check(&f, v, &phi)?;
            Ok(NormRecord {
                point: berk_string(&field, v),
                phi: phi_s.clone(),
                lhs: rational_string(&id.lhs),
                rhs: rational_string(&id.rhs),
                holds: id.holds(),
            })
        })
        .collect::<LabResult<_>>()?;
    let all = records.iter().all(|r| r.holds);
    let mut out = RunOutput::default();
    out.file("norm_check.jsonl", json_lines(&records));
    out.note(format!("norm identity holds at all {} points: {all}", records.len()));
    Ok(out)
}

fn cmd_tame_bound(cfg: &ExperimentConfig) -> LabResult<RunOutput> {
    let (field, f) = field_and_map(cfg)?;
    let (_, phi) = phi_of(cfg, &field)?;
    let v = parse_berk(&field, start_string(cfg)?).map_err(LabError::Config)?;
    let n = cfg.params.n.unwrap_or(12);
    let table = tame_bound_check(&f, &v, &phi, n)?;
    let rows: Vec<Vec<String>> = table
        .sums
        .iter()
        .enumerate()
        .map(|(k, s)| vec![k.to_string(), rational_string(s), rational_string(&table.bound), (*s <= table.bound).to_string()])
        .collect();
    let mut out = RunOutput::default();
    out.file("tame_bound.csv", csv_table(&["step", "sum", "bound", "holds"], &rows));
    let witness = is_tame(&v).1.map_or_else(|| "-".into(), |c| rational_string(&c));
    out.note(format!("tame witness C = {witness}, sup = {}, bound holds: {}", rational_string(&table.sup()), table.holds()));
    Ok(out)
}

#[derive(Serialize)]
struct MultSumOut {
    target: String,
    preimage: String,
    reduced_multiplicity: usize,
    lifts: Vec<String>,
    count: usize,
    status: String,
    precision: Option<u32>,
    holds: bool,
}

/// `count` random rational points `a/b` with `|a| <= 1000`, `1 <= b <= 1000`.
pub fn random_rationals(seed: u64, count: usize) -> Vec<QProjPoint> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let a: i64 = rng.random_range(-1000..=1000);
            let b: i64 = rng.random_range(1..=1000);
            QProjPoint::new(BigInt::from(a), BigInt::from(b)).expect("b is nonzero")
        })
        .collect()
}

fn cmd_reduction_check(cfg: &ExperimentConfig, seed: u64) -> LabResult<RunOutput> {
    let p = cfg.params.prime.ok_or_else(|| LabError::config("missing 'params.prime'"))?;
    let f = parse_qmap(cfg.map_expr()?, p)?;
    let mut out = RunOutput::default();
    let gate_rows = vec![vec![
        p.to_string(),
        f.resultant().to_string(),
        f.resultant_valuation().to_string(),
        f.has_good_reduction().to_string(),
    ]];
    out.file("reduction_gate.csv", csv_table(&["prime", "resultant", "valuation", "good_reduction"], &gate_rows));
    let ft = match reduce_map(&f) {
        Ok(ft) => ft,
        Err(e) => {
            out.note(e.to_string());
            out.gate_failure = Some(e.to_string());
            return Ok(out);
        }
    };
    let fp = ft.field().clone();
    let mut sample: Vec<QProjPoint> =
        cfg.params.points.iter().map(|s| parse_qpoint(s).map_err(LabError::Config)).collect::<LabResult<_>>()?;
    sample.extend(random_rationals(seed, cfg.params.samples.unwrap_or(0)));
    let chunks: Vec<_> = sample
        .par_iter()
        .map(|x| semiconjugacy_check(&f, std::slice::from_ref(x)))
        .collect::<Result<Vec<_>, _>>()?;
    let rows: Vec<Vec<String>> = chunks
        .into_iter()
        .flatten()
        .map(|r| {
            vec![
                qpoint_string(&r.point),
                point_string(&fp, &r.reduced_image),
                point_string(&fp, &r.image_of_reduction),
                r.holds().to_string(),
            ]
        })
        .collect();
    let all = rows.iter().all(|r| r[3] == "true");
    out.file("semiconjugacy.csv", csv_table(&["point", "reduced_image", "image_of_reduction", "holds"], &rows));
    out.note(format!("semiconjugacy holds at all {} points: {all}", rows.len()));
    let mut records = Vec::new();
    for s in &cfg.params.targets {
        let y = parse_qpoint(s).map_err(LabError::Config)?;
        let yt = reduce_point(&y, p)?;
        for (xt, _) in ft.fiber(&yt) {
            let base = |status: String| MultSumOut {
                target: qpoint_string(&y),
                preimage: point_string(&fp, &xt),
                reduced_multiplicity: ft.multiplicity(&xt),
                lifts: vec![],
                count: 0,
                status,
                precision: None,
                holds: false,
            };
            records.push(match mult_sum_check(&f, &y, &xt) {
                Ok(r) => MultSumOut {
                    lifts: r.lifts.iter().map(|l| format!("{}^{}", qpoint_string(&l.point), l.multiplicity)).collect(),
                    count: r.count,
                    status: status_name(&r.status).into(),
                    precision: r.precision,
                    holds: r.holds,
                    ..base(String::new())
                },
                Err(e @ eqdist_core::Error::Precondition(_)) => base(format!("skipped: {e}")),
                Err(e) => return Err(e.into()),
            });
        }
    }
    if !records.is_empty() {
        out.file("mult_sum.jsonl", json_lines(&records));
    }
    Ok(out)
}

pub fn status_name(s: &MultSumStatus) -> &'static str {
    match s {
        MultSumStatus::Verified => "VERIFIED",
        MultSumStatus::Inconclusive => "INCONCLUSIVE",
        MultSumStatus::SkippedIrrational => "SKIPPED-IRRATIONAL",
    }
}

#[derive(Serialize)]
struct SymRecord {
    target: String,
    point: String,
    multiplicity: usize,
    count: usize,
}

fn cmd_sym_fiber(cfg: &ExperimentConfig) -> LabResult<RunOutput> {
    let (field, h) = field_and_map(cfg)?;
    let sp = SymProdMap::new(h.clone());
    if cfg.params.targets.is_empty() {
        return Err(LabError::config("'params.targets' is empty"));
    }
    let targets: Vec<_> =
        cfg.params.targets.iter().map(|s| parse_p2(&field, s).map_err(LabError::Config)).collect::<LabResult<_>>()?;
    let fibers: Vec<_> = targets.par_iter().map(|x| sp.sym_fiber(x)).collect::<Result<Vec<_>, _>>()?;
    let mut records = Vec::new();
    let mut rows = Vec::new();
    let d2 = sp.degree() * sp.degree();
    for (x, fib) in targets.iter().zip(&fibers) {
        for e in fib {
            records.push(SymRecord {
                target: p2_string(&field, x),
                point: p2_string(&field, &e.point),
                multiplicity: e.multiplicity,
                count: e.count,
            });
        }
        let mass = sym_fiber_mass(fib);
        rows.push(vec![p2_string(&field, x), mass.to_string(), d2.to_string(), (mass == d2).to_string()]);
    }
    let mut out = RunOutput::default();
    out.file("sym_fiber.jsonl", json_lines(&records));
    out.file("sym_fiber_summary.csv", csv_table(&["target", "mass", "d_squared", "holds"], &rows));
    if let Some(n) = cfg.params.n {
        let mut rows = Vec::new();
        for x in &targets {
            for k in 0..=n {
                let id = ueda_multiplicity_identity_check(&h, x, k)?;
                rows.push(vec![
                    p2_string(&field, x),
                    k.to_string(),
                    id.chain.to_string(),
                    id.formula.to_string(),
                    id.holds().to_string(),
                ]);
            }
        }
        out.file("ueda.csv", csv_table(&["point", "n", "chain", "formula", "holds"], &rows));
    }
    Ok(out)
}

fn cmd_local_mult(cfg: &ExperimentConfig) -> LabResult<RunOutput> {
    let field = cfg.field()?;
    let g = cfg.params.germ.as_ref().ok_or_else(|| LabError::config("missing 'params.germ'"))?;
    let germ = parse_germ(&field, &g.u, &g.w, g.degree)?;
    let mu = local_multiplicity(&germ)?;
    let d2 = g.degree * g.degree;
    let max_iter = cfg.params.max_iter.unwrap_or(DEFAULT_MAX_ITER);
    let rows = vec![vec![
        g.u.clone(),
        g.w.clone(),
        g.degree.to_string(),
        mu.to_string(),
        (mu == d2).to_string(),
        is_superattracting_germ(&germ).to_string(),
        is_superattracting_by_iteration(&germ, max_iter).to_string(),
    ]];
    let mut out = RunOutput::default();
    out.file(
        "local_mult.csv",
        csv_table(
            &["u", "w", "degree", "local_multiplicity", "totally_invariant", "superattracting", "superattracting_by_iteration"],
            &rows,
        ),
    );
    out.note(format!("local multiplicity {mu} (d^2 = {d2})"));
    Ok(out)
}
