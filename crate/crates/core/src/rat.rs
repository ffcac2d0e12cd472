//! Exact rational scalars and the shared `m:v0,v1,...` literal format.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, Zero};
use thiserror::Error;

/// Exact rational scalar used everywhere in this crate.
pub type Rat = BigRational;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("empty rational literal")]
    Empty,
    #[error("invalid integer `{0}`")]
    BadInt(String),
    #[error("zero denominator in `{0}`")]
    ZeroDenominator(String),
    #[error("malformed literal `{0}`: expected `m:v0,v1,...`")]
    BadLiteral(String),
    #[error("literal declares {declared} values but lists {found}")]
    LengthMismatch { declared: usize, found: usize },
}

pub fn rat(num: i64, den: i64) -> Rat {
    Rat::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(num: i64) -> Rat {
    Rat::from_integer(BigInt::from(num))
}

/// Parses `p` or `p/q`. The result is normalized (gcd 1, positive denominator).
pub fn parse_rat(s: &str) -> Result<Rat, ParseError> {
    let s = s.trim();
    if s.is_empty() {
        return Err(ParseError::Empty);
    }
    let (num, den) = match s.split_once('/') {
        None => (s, "1"),
        Some((n, d)) => (n, d),
    };
    let n: BigInt = num
        .parse()
        .map_err(|_| ParseError::BadInt(num.to_string()))?;
    let d: BigInt = den
        .parse()
        .map_err(|_| ParseError::BadInt(den.to_string()))?;
    if d.is_zero() {
        return Err(ParseError::ZeroDenominator(s.to_string()));
    }
    Ok(Rat::new(n, d))
}

/// Normalized display: `p/q` with q > 1, plain `p` otherwise.
pub fn format_rat(r: &Rat) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Parses the shared literal format `m:v0,v1,...,v(m-1)`.
pub fn parse_literal(s: &str) -> Result<(usize, Vec<Rat>), ParseError> {
    let (head, tail) = s
        .split_once(':')
        .ok_or_else(|| ParseError::BadLiteral(s.to_string()))?;
    let m: usize = head
        .trim()
        .parse()
        .map_err(|_| ParseError::BadLiteral(s.to_string()))?;
    let values: Result<Vec<Rat>, ParseError> = tail.split(',').map(parse_rat).collect();
    let values = values?;
    if values.len() != m {
        return Err(ParseError::LengthMismatch {
            declared: m,
            found: values.len(),
        });
    }
    Ok((m, values))
}

/// Parses `n:v...` without requiring the list length to equal `n` (used by
/// the divisor literal, whose list holds the coefficients `a_2..a_{n/2}`).
pub fn parse_literal_header(s: &str) -> Result<(usize, Vec<Rat>), ParseError> {
    let (head, tail) = s
        .split_once(':')
        .ok_or_else(|| ParseError::BadLiteral(s.to_string()))?;
    let n: usize = head
        .trim()
        .parse()
        .map_err(|_| ParseError::BadLiteral(s.to_string()))?;
    let values: Result<Vec<Rat>, ParseError> = tail.split(',').map(parse_rat).collect();
    Ok((n, values?))
}

pub fn format_literal(m: usize, values: &[Rat]) -> String {
    let body: Vec<String> = values.iter().map(format_rat).collect();
    format!("{}:{}", m, body.join(","))
}

/// Least common multiple of the denominators, as a positive integer.
pub fn denominator_lcm(values: &[Rat]) -> BigInt {
    let mut acc = BigInt::one();
    for v in values {
        acc = num::integer::lcm(acc, v.denom().abs());
    }
    acc
}

/// Scales rationals to integers by the denominator lcm; returns (integers, scale).
pub fn scale_to_integers(values: &[Rat]) -> (Vec<BigInt>, BigInt) {
    let scale = denominator_lcm(values);
    let ints = values
        .iter()
        .map(|v| (v * Rat::from_integer(scale.clone())).to_integer())
        .collect();
    (ints, scale)
}
