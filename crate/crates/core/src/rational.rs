//! Exact rationals and their text forms.

use num::{BigInt, BigRational, One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Q = BigRational;

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn qf(num: i64, den: i64) -> Q {
    Q::new(BigInt::from(num), BigInt::from(den))
}

/// Parses `"3/2"`, `"-4"` or `"−1/2"` (U+2212 minus accepted).
pub fn parse_rational(s: &str) -> Result<Q> {
    let t = s.trim().replace('\u{2212}', "-");
    if t.is_empty() {
        return Err(Error::Config("empty rational literal".into()));
    }
    let bad = || Error::Config(format!("invalid rational literal '{s}'"));
    let (num, den) = match t.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (t.as_str(), "1"),
    };
    let num: BigInt = num.parse().map_err(|_| bad())?;
    let den: BigInt = den.parse().map_err(|_| bad())?;
    if den.is_zero() {
        return Err(Error::Config(format!("zero denominator in '{s}'")));
    }
    Ok(Q::new(num, den))
}

/// Parses a comma-separated vector of exact rationals.
pub fn parse_vector(s: &str) -> Result<Vec<Q>> {
    s.split(',').map(parse_rational).collect()
}

pub fn format_rational(x: &Q) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

pub fn format_vector(v: &[Q]) -> String {
    v.iter().map(format_rational).collect::<Vec<_>>().join(",")
}

pub fn to_f64(x: &Q) -> f64 {
    x.to_f64().unwrap_or_else(|| {
        // ratio of huge integers: scale both down first
        let n = x.numer().to_f64().unwrap_or(f64::INFINITY);
        let d = x.denom().to_f64().unwrap_or(f64::INFINITY);
        if x.is_negative() {
            -(n.abs() / d)
        } else {
            n / d
        }
    })
}

pub fn dot(a: &[Q], b: &[Q]) -> Q {
    a.iter().zip(b).fold(Q::zero(), |acc, (x, y)| acc + x * y)
}

/// Binomial coefficient as an exact integer.
pub fn binomial(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}
