//! Exact step-size literals such as `1/80`, `0.025` or `1e-4`.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// A positive or negative rational `num / den` in lowest terms, `den > 0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Fraction {
    num: i64,
    den: i64,
}

fn gcd(mut a: i64, mut b: i64) -> i64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a.abs()
}

impl Fraction {
    pub fn new(num: i64, den: i64) -> Result<Self> {
        if den == 0 {
            return Err(Error::Parse(format!("zero denominator in {num}/{den}")));
        }
        let g = gcd(num, den).max(1);
        let sign = den.signum();
        Ok(Fraction { num: sign * num / g, den: sign * den / g })
    }

    pub fn num(self) -> i64 {
        self.num
    }

    pub fn den(self) -> i64 {
        self.den
    }

    /// Nearest double; exact for dyadic values, correctly rounded otherwise.
    pub fn value(self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

fn pow10(e: u32) -> Result<i64> {
    10i64.checked_pow(e).ok_or_else(|| Error::Parse(format!("exponent {e} too large")))
}

fn parse_decimal(s: &str) -> Result<Fraction> {
    let bad = || Error::Parse(format!("invalid number '{s}'"));
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().map_err(|_| bad())?),
        None => (s, 0),
    };
    let (neg, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int, frac) = digits.split_once('.').unwrap_or((digits, ""));
    if int.is_empty() && frac.is_empty() || !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let all = format!("{int}{frac}");
    let mut num: i64 = all.parse().map_err(|_| bad())?;
    let scale = exp - frac.len() as i32;
    let mut den = 1i64;
    if scale >= 0 {
        num = num.checked_mul(pow10(scale as u32)?).ok_or_else(bad)?;
    } else {
        den = pow10((-scale) as u32)?;
    }
    Fraction::new(if neg { -num } else { num }, den)
}

impl FromStr for Fraction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        match s.split_once('/') {
            Some((a, b)) => {
                let a = parse_decimal(a.trim())?;
                let b = parse_decimal(b.trim())?;
                if b.num == 0 {
                    return Err(Error::Parse(format!("zero denominator in '{s}'")));
                }
                let num = a.num.checked_mul(b.den);
                let den = a.den.checked_mul(b.num);
                match (num, den) {
                    (Some(n), Some(d)) => Fraction::new(n, d),
                    _ => Err(Error::Parse(format!("'{s}' overflows"))),
                }
            }
            None => parse_decimal(s),
        }
    }
}

impl fmt::Display for Fraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == 1 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}
