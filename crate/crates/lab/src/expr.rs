//! Plain-text polynomial expressions.
//!
//! ```text
//! expr   := ['+' | '-'] term (('+' | '-') term)*
//! term   := factor (('*' | '/') factor | factor)*
//! factor := atom ('^' integer)?
//! atom   := integer | variable | '(' expr ')'
//! ```
//!
//! Juxtaposition multiplies, so `3z^2` and `(z+1)(z-1)` are accepted.
//! Coefficients are integers; `n/m` between constants gives a rational
//! coefficient. Division by a non-constant is allowed only in map
//! expressions `P(z)/Q(z)`, whose numerator and denominator are kept
//! without cancellation.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use eqdist_core::algebra::{FqField, Poly, PolyRing};
use eqdist_core::p2::BiPoly;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseError {
    pub pos: usize,
    pub msg: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "at offset {}: {}", self.pos, self.msg)
    }
}

impl std::error::Error for ParseError {}

type Exps = Vec<u32>;

/// Multivariate polynomial over `Q`, keyed by exponent vectors.
#[derive(Clone, Debug, PartialEq, Eq)]
struct MPoly(BTreeMap<Exps, BigRational>);

impl MPoly {
    fn constant(c: BigRational, nvars: usize) -> Self {
        let mut m = BTreeMap::new();
        if !c.is_zero() {
            m.insert(vec![0; nvars], c);
        }
        MPoly(m)
    }

    fn var(i: usize, nvars: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        MPoly(BTreeMap::from([(e, BigRational::one())]))
    }

    fn as_constant(&self) -> Option<BigRational> {
        match self.0.len() {
            0 => Some(BigRational::zero()),
            1 => self.0.iter().next().filter(|(e, _)| e.iter().all(|&k| k == 0)).map(|(_, c)| c.clone()),
            _ => None,
        }
    }

    fn add(&self, o: &MPoly) -> MPoly {
        let mut m = self.0.clone();
        for (e, c) in &o.0 {
            let s = m.remove(e).unwrap_or_else(BigRational::zero) + c;
            if !s.is_zero() {
                m.insert(e.clone(), s);
            }
        }
        MPoly(m)
    }

    fn neg(&self) -> MPoly {
        MPoly(self.0.iter().map(|(e, c)| (e.clone(), -c)).collect())
    }

    fn mul(&self, o: &MPoly) -> MPoly {
        let mut out = MPoly(BTreeMap::new());
        for (e1, c1) in &self.0 {
            for (e2, c2) in &o.0 {
                let e: Exps = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                out = out.add(&MPoly(BTreeMap::from([(e, c1 * c2)])));
            }
        }
        out
    }

    fn scale(&self, c: &BigRational) -> MPoly {
        MPoly(self.0.iter().map(|(e, x)| (e.clone(), x * c)).filter(|(_, x)| !x.is_zero()).collect())
    }
}

/// `num / den`, kept unreduced.
#[derive(Clone, Debug)]
struct Frac {
    num: MPoly,
    den: MPoly,
}

impl Frac {
    fn poly(p: MPoly, nvars: usize) -> Self {
        Frac { num: p, den: MPoly::constant(BigRational::one(), nvars) }
    }

    /// Folds a constant denominator into the numerator.
    fn normalize(mut self, nvars: usize) -> Self {
        if let Some(c) = self.den.as_constant() {
            self.num = self.num.scale(&(BigRational::one() / c));
            self.den = MPoly::constant(BigRational::one(), nvars);
        }
        self
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    vars: &'a [&'a str],
    allow_division: bool,
}

impl<'a> Parser<'a> {
    fn err<T>(&self, msg: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError { pos: self.pos, msg: msg.into() })
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn integer(&mut self) -> Result<BigInt, ParseError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return self.err("expected an integer");
        }
        let s = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        Ok(s.parse().unwrap())
    }

    fn expr(&mut self) -> Result<Frac, ParseError> {
        let neg = if self.eat(b'-') {
            true
        } else {
            self.eat(b'+');
            false
        };
        let mut acc = self.term()?;
        if neg {
            acc.num = acc.num.neg();
        }
        loop {
            let sign = if self.eat(b'+') {
                false
            } else if self.eat(b'-') {
                true
            } else {
                return Ok(acc);
            };
            let mut t = self.term()?;
            if sign {
                t.num = t.num.neg();
            }
            acc = Frac {
                num: acc.num.mul(&t.den).add(&t.num.mul(&acc.den)),
                den: acc.den.mul(&t.den),
            }
            .normalize(self.vars.len());
        }
    }

    fn starts_factor(&mut self) -> bool {
        match self.peek() {
            Some(c) if c.is_ascii_digit() || c == b'(' => true,
            Some(c) if c.is_ascii_alphabetic() => true,
            _ => false,
        }
    }

    fn term(&mut self) -> Result<Frac, ParseError> {
        let mut acc = self.factor()?;
        loop {
            if self.eat(b'*') || self.starts_factor() {
                let f = self.factor()?;
                acc = Frac { num: acc.num.mul(&f.num), den: acc.den.mul(&f.den) };
            } else if self.peek() == Some(b'/') {
                let at = self.pos;
                self.pos += 1;
                let f = self.factor()?;
                if f.num.as_constant().is_none() && !self.allow_division {
                    self.pos = at;
                    return self.err("division by a non-constant");
                }
                if f.num.as_constant().is_some_and(|c| c.is_zero()) {
                    self.pos = at;
                    return self.err("division by zero");
                }
                acc = Frac { num: acc.num.mul(&f.den), den: acc.den.mul(&f.num) }.normalize(self.vars.len());
            } else {
                return Ok(acc);
            }
        }
    }

    fn factor(&mut self) -> Result<Frac, ParseError> {
        let base = self.atom()?;
        if !self.eat(b'^') {
            return Ok(base);
        }
        let e = self.integer()?.to_u32().filter(|&e| e <= 4096);
        let Some(e) = e else { return self.err("exponent out of range") };
        let nvars = self.vars.len();
        let mut num = MPoly::constant(BigRational::one(), nvars);
        let mut den = MPoly::constant(BigRational::one(), nvars);
        for _ in 0..e {
            num = num.mul(&base.num);
            den = den.mul(&base.den);
        }
        Ok(Frac { num, den }.normalize(nvars))
    }

    fn atom(&mut self) -> Result<Frac, ParseError> {
        let nvars = self.vars.len();
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let inner = self.expr()?;
                if !self.eat(b')') {
                    return self.err("expected ')'");
                }
                Ok(inner)
            }
            Some(c) if c.is_ascii_digit() => {
                let n = self.integer()?;
                Ok(Frac::poly(MPoly::constant(BigRational::from_integer(n), nvars), nvars))
            }
            Some(c) if c.is_ascii_alphabetic() => {
                let start = self.pos;
                while self.pos < self.src.len() && self.src[self.pos].is_ascii_alphabetic() {
                    self.pos += 1;
                }
                let name = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
                // A run like "uw" is read as the product of single-letter variables.
                let mut out = MPoly::constant(BigRational::one(), nvars);
                for ch in name.chars() {
                    let Some(i) = self.vars.iter().position(|v| v.len() == 1 && v.starts_with(ch)) else {
                        self.pos = start;
                        return self.err(format!("unknown variable '{name}'"));
                    };
                    out = out.mul(&MPoly::var(i, nvars));
                }
                Ok(Frac::poly(out, nvars))
            }
            Some(c) => self.err(format!("unexpected '{}'", c as char)),
            None => self.err("unexpected end of input"),
        }
    }
}

fn parse(src: &str, vars: &[&str], allow_division: bool) -> Result<Frac, ParseError> {
    let mut p = Parser { src: src.as_bytes(), pos: 0, vars, allow_division };
    let out = p.expr()?;
    if p.peek().is_some() {
        return p.err("trailing input");
    }
    Ok(out)
}

fn univariate(p: &MPoly) -> Vec<BigRational> {
    let deg = p.0.keys().map(|e| e[0] as usize).max().unwrap_or(0);
    let mut out = vec![BigRational::zero(); deg + 1];
    for (e, c) in &p.0 {
        out[e[0] as usize] = c.clone();
    }
    while out.len() > 1 && out.last().is_some_and(Zero::is_zero) {
        out.pop();
    }
    out
}

/// Ascending rational coefficients of the numerator and denominator of a
/// map in `z`.
pub fn parse_rational_map(src: &str) -> Result<(Vec<BigRational>, Vec<BigRational>), ParseError> {
    let f = parse(src, &["z"], true)?;
    Ok((univariate(&f.num), univariate(&f.den)))
}

/// Ascending rational coefficients of a polynomial in `z`.
pub fn parse_polynomial(src: &str) -> Result<Vec<BigRational>, ParseError> {
    let f = parse(src, &["z"], false)?;
    Ok(univariate(&f.num))
}

/// Terms `((i, j), c)` of `c u^i w^j`.
pub type BiTerms = Vec<((usize, usize), BigRational)>;

pub fn parse_bivariate(src: &str) -> Result<BiTerms, ParseError> {
    let f = parse(src, &["u", "w"], false)?;
    Ok(f.num.0.into_iter().map(|(e, c)| ((e[0] as usize, e[1] as usize), c)).collect())
}

/// The image of `c` in the prime field `F_p`, if its denominator is a unit.
pub fn reduce_rational(c: &BigRational, p: u64) -> Option<u64> {
    let pb = BigInt::from(p);
    let n = c.numer().mod_floor(&pb);
    let d = c.denom().mod_floor(&pb);
    if d.is_zero() {
        return None;
    }
    let inv = d.extended_gcd(&pb).x.mod_floor(&pb);
    (n * inv).mod_floor(&pb).to_u64()
}

/// Coefficients reduced into the prime subfield of `field`.
pub fn reduce_coeffs(field: &FqField, c: &[BigRational]) -> Result<Poly<u64>, String> {
    let p = field.p();
    let out: Option<Vec<u64>> = c.iter().map(|x| reduce_rational(x, p).map(|v| field.from_i64(v as i64))).collect();
    let out = out.ok_or_else(|| format!("a coefficient denominator is divisible by {p}"))?;
    Ok(PolyRing::new(field).from_coeffs(out))
}

/// A germ component over `field`.
pub fn reduce_bivariate(field: &FqField, terms: &[((usize, usize), BigRational)]) -> Result<BiPoly, String> {
    let p = field.p();
    let mut out = Vec::with_capacity(terms.len());
    for (e, c) in terms {
        let v = reduce_rational(c, p).ok_or_else(|| format!("a coefficient denominator is divisible by {p}"))?;
        out.push((*e, field.from_i64(v as i64)));
    }
    Ok(BiPoly::from_terms(field, out))
}

/// `c` rendered as `n/d`.
pub fn rational_string(c: &BigRational) -> String {
    format!("{}/{}", c.numer(), c.denom())
}

/// Parses `n`, `-n` or `n/d`.
pub fn parse_rational(s: &str) -> Option<BigRational> {
    let s = s.trim();
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim().parse::<BigInt>().ok()?, d.trim().parse::<BigInt>().ok()?),
        None => (s.parse::<BigInt>().ok()?, BigInt::one()),
    };
    if d.is_zero() {
        return None;
    }
    Some(BigRational::new(n, d))
}
