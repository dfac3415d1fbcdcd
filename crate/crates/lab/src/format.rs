//! Canonical text forms of points and measures.
//!
//! | object            | form                                             |
//! |-------------------|--------------------------------------------------|
//! | rational point    | field element code, e.g. `3`                     |
//! | closed point      | ascending coefficients of the monic irreducible, e.g. `[1,0,1]` |
//! | infinity, generic | `inf`, `generic`                                 |
//! | Berkovich point   | `gauss`, `branch(<point>, n/d)`, `classical(<point>)` |
//! | point of `P^2`    | `diag(<point>)`, `pair(<point>; <point>)`        |
//! | point over `Q`    | `a/b`, `a` or `inf`                              |
//!
//! Field elements are coded as integers `0..q` whose base-`p` digits are the
//! coordinates in the power basis of the defining modulus.
//!
//! A measure file holds one atom per line, tab separated:
//! `<point>\t<orbit_size>\t<mass numerator>\t<mass denominator>`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use eqdist_core::algebra::{FqField, PolyRing};
use eqdist_core::berkovich::{BerkPointP1, Param};
use eqdist_core::measures::{Atom, AtomicMeasure};
use eqdist_core::p2::P2Point;
use eqdist_core::reduction::QProjPoint;
use eqdist_core::scheme::P1Point;

use crate::expr::{self, rational_string};

pub fn point_string(field: &FqField, x: &P1Point) -> String {
    match x {
        P1Point::Infinity => "inf".into(),
        P1Point::Generic => "generic".into(),
        P1Point::Finite(g) => match x.as_rational(field) {
            Some(c) => c.to_string(),
            None => {
                let c: Vec<String> = g.coeffs().iter().map(u64::to_string).collect();
                format!("[{}]", c.join(","))
            }
        },
    }
}

/// Parses a point given canonically or as a monic irreducible polynomial
/// expression in `z` with integer coefficients.
pub fn parse_point(field: &FqField, s: &str) -> Result<P1Point, String> {
    let s = s.trim();
    match s {
        "inf" | "∞" => return Ok(P1Point::Infinity),
        "generic" => return Ok(P1Point::Generic),
        _ => {}
    }
    let r = PolyRing::new(field);
    if let Some(inner) = s.strip_prefix('[').and_then(|t| t.strip_suffix(']')) {
        let coeffs: Result<Vec<u64>, String> = inner
            .split(',')
            .map(|c| {
                let v: u64 = c.trim().parse().map_err(|_| format!("bad coefficient '{c}' in '{s}'"))?;
                field.element(v).map_err(|e| e.to_string())
            })
            .collect();
        return P1Point::orbit(field, r.from_coeffs(coeffs?)).map_err(|e| format!("'{s}': {e}"));
    }
    if let Ok(c) = s.parse::<u64>() {
        let c = field.element(c).map_err(|e| e.to_string())?;
        return Ok(P1Point::rational(field, c));
    }
    let coeffs = expr::parse_polynomial(s).map_err(|e| format!("point '{s}': {e}"))?;
    let g = expr::reduce_coeffs(field, &coeffs)?;
    P1Point::orbit(field, g).map_err(|e| format!("'{s}': {e}"))
}

pub fn berk_string(field: &FqField, v: &BerkPointP1) -> String {
    match v {
        BerkPointP1::Gauss => "gauss".into(),
        BerkPointP1::Branch { center, t: Param::Infinite } => format!("classical({})", point_string(field, center)),
        BerkPointP1::Branch { center, t: Param::Finite(t) } => {
            format!("branch({}, {})", point_string(field, center), rational_string(t))
        }
    }
}

fn call<'a>(s: &'a str, name: &str) -> Option<&'a str> {
    s.strip_prefix(name)?.trim_start().strip_prefix('(')?.strip_suffix(')')
}

pub fn parse_berk(field: &FqField, s: &str) -> Result<BerkPointP1, String> {
    let s = s.trim();
    if s == "gauss" {
        return Ok(BerkPointP1::Gauss);
    }
    if let Some(inner) = call(s, "classical") {
        return BerkPointP1::classical(parse_point(field, inner)?).map_err(|e| e.to_string());
    }
    if let Some(inner) = call(s, "branch") {
        let (pt, t) = inner.rsplit_once(',').ok_or_else(|| format!("'{s}': expected branch(<point>, <t>)"))?;
        let t = expr::parse_rational(t).ok_or_else(|| format!("'{s}': bad parameter"))?;
        return BerkPointP1::branch(parse_point(field, pt)?, t).map_err(|e| format!("'{s}': {e}"));
    }
    Err(format!("'{s}' is not a Berkovich point"))
}

/// Whether `s` names a Berkovich point rather than a classical one.
pub fn is_berk_string(s: &str) -> bool {
    let s = s.trim();
    s == "gauss" || s.starts_with("branch") || s.starts_with("classical")
}

pub fn p2_string(field: &FqField, x: &P2Point) -> String {
    match x {
        P2Point::Diagonal(a) => format!("diag({})", point_string(field, a)),
        P2Point::Pair(a, b) => format!("pair({}; {})", point_string(field, a), point_string(field, b)),
    }
}

pub fn parse_p2(field: &FqField, s: &str) -> Result<P2Point, String> {
    let s = s.trim();
    if let Some(inner) = call(s, "diag") {
        return P2Point::diagonal(parse_point(field, inner)?).map_err(|e| e.to_string());
    }
    if let Some(inner) = call(s, "pair") {
        let (a, b) = inner.split_once(';').ok_or_else(|| format!("'{s}': expected pair(<point>; <point>)"))?;
        return P2Point::new(parse_point(field, a)?, parse_point(field, b)?).map_err(|e| e.to_string());
    }
    Err(format!("'{s}' is not a point of P^2"))
}

pub fn qpoint_string(x: &QProjPoint) -> String {
    match x.affine() {
        None => "inf".into(),
        Some(z) if z.is_integer() => z.numer().to_string(),
        Some(z) => rational_string(&z),
    }
}

pub fn parse_qpoint(s: &str) -> Result<QProjPoint, String> {
    let s = s.trim();
    if s == "inf" {
        return Ok(QProjPoint::infinity());
    }
    expr::parse_rational(s).map(|z| QProjPoint::from_rational(&z)).ok_or_else(|| format!("'{s}' is not a rational point"))
}

/// One line per atom, in canonical atom order.
pub fn measure_lines<T: Atom>(mu: &AtomicMeasure<T>, show: impl Fn(&T) -> String) -> String {
    let mut out = String::new();
    for (x, c) in mu.iter() {
        out.push_str(&format!("{}\t{}\t{}\t{}\n", show(x), x.orbit_size(), c.numer(), c.denom()));
    }
    out
}

/// Inverse of [`measure_lines`]; blank lines and `#` comments are skipped.
pub fn parse_measure_lines<T: Atom>(
    text: &str,
    parse: impl Fn(&str) -> Result<T, String>,
) -> Result<AtomicMeasure<T>, String> {
    let mut mu = AtomicMeasure::zero();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        let [pt, n, num, den] = fields[..] else {
            return Err(format!("line {}: expected 4 tab-separated fields", i + 1));
        };
        let x = parse(pt).map_err(|e| format!("line {}: {e}", i + 1))?;
        let n: usize = n.trim().parse().map_err(|_| format!("line {}: bad orbit size", i + 1))?;
        if n != x.orbit_size() {
            return Err(format!("line {}: orbit size {n} does not match the point", i + 1));
        }
        let num: BigInt = num.trim().parse().map_err(|_| format!("line {}: bad numerator", i + 1))?;
        let den: BigInt = den.trim().parse().map_err(|_| format!("line {}: bad denominator", i + 1))?;
        if den.is_zero() || den.is_negative() {
            return Err(format!("line {}: denominator must be positive", i + 1));
        }
        let c = BigRational::new(num, den);
        if c.is_negative() {
            return Err(format!("line {}: negative mass", i + 1));
        }
        mu.add_atom(x, c);
    }
    Ok(mu)
}

#[cfg(test)]
mod tests {
    use super::*;
    use eqdist_core::measures::rat;

    fn f7() -> FqField {
        FqField::prime(7).unwrap()
    }

    #[test]
    fn point_round_trips() {
        let f = f7();
        for s in ["inf", "generic", "0", "6", "[1,0,1]", "[3,1,1]"] {
            let x = parse_point(&f, s).unwrap();
            assert_eq!(point_string(&f, &x), s);
        }
        assert_eq!(parse_point(&f, "z - 1").unwrap(), P1Point::rational(&f, 1));
        assert_eq!(parse_point(&f, "z^2+1").unwrap(), parse_point(&f, "[1,0,1]").unwrap());
        assert!(parse_point(&f, "[1,0,6]").is_err());
        assert!(parse_point(&f, "z^2-1").is_err());
        assert!(parse_point(&f, "9").is_err());
    }

    #[test]
    fn extension_field_points() {
        let f9 = FqField::new(3, 2).unwrap();
        for c in 0..9 {
            let x = P1Point::rational(&f9, c);
            assert_eq!(parse_point(&f9, &point_string(&f9, &x)).unwrap(), x);
        }
    }

    #[test]
    fn berkovich_round_trips() {
        let f = f7();
        for s in ["gauss", "branch(1, 1/1)", "branch([1,0,1], 3/2)", "classical(inf)"] {
            let v = parse_berk(&f, s).unwrap();
            assert_eq!(berk_string(&f, &v), s);
        }
        assert_eq!(parse_berk(&f, "branch(1, 2)").unwrap(), parse_berk(&f, "branch(1, 2/1)").unwrap());
        assert!(parse_berk(&f, "branch(1, 0)").is_err());
        assert!(parse_berk(&f, "branch(generic, 1)").is_err());
    }

    #[test]
    fn p2_and_rational_points() {
        let f = f7();
        for s in ["diag(0)", "pair(2; 1)", "pair([1,0,1]; [1,0,1])"] {
            assert_eq!(p2_string(&f, &parse_p2(&f, s).unwrap()), s);
        }
        assert_eq!(parse_p2(&f, "pair(3; 3)").unwrap(), parse_p2(&f, "diag(3)").unwrap());
        assert_eq!(parse_p2(&f, "pair(1; 2)").unwrap(), parse_p2(&f, "pair(2; 1)").unwrap());
        for s in ["inf", "0", "-3", "5/7", "-1/2"] {
            assert_eq!(qpoint_string(&parse_qpoint(s).unwrap()), s);
        }
    }

    #[test]
    fn measure_lines_round_trip() {
        let f = f7();
        let i = parse_point(&f, "[1,0,1]").unwrap();
        let mu = AtomicMeasure::from_atoms([(P1Point::Infinity, rat(1, 4)), (i, rat(3, 8))]);
        let text = measure_lines(&mu, |x| point_string(&f, x));
        assert_eq!(text, "inf\t1\t1\t4\n[1,0,1]\t2\t3\t8\n");
        assert_eq!(parse_measure_lines(&text, |s| parse_point(&f, s)).unwrap(), mu);
        assert!(parse_measure_lines("inf\t2\t1\t4\n", |s| parse_point(&f, s)).is_err());
        assert!(parse_measure_lines("inf\t1\t1\n", |s| parse_point(&f, s)).is_err());
    }
}
