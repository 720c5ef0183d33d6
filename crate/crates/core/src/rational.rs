//! Exact probabilities.

use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// An exact probability, always stored in lowest terms.
pub type Prob = BigRational;

pub fn zero() -> Prob {
    Prob::zero()
}

pub fn one() -> Prob {
    Prob::one()
}

pub fn ratio(num: u64, den: u64) -> Prob {
    Prob::new(BigInt::from(num), BigInt::from(den))
}

/// Parses `"num/den"` or a bare integer. Negative values and zero
/// denominators are rejected.
pub fn parse_prob(s: &str) -> Option<Prob> {
    let s = s.trim();
    let value = match s.split_once('/') {
        Some((n, d)) => {
            let n = BigInt::from_str(n.trim()).ok()?;
            let d = BigInt::from_str(d.trim()).ok()?;
            if d.is_zero() {
                return None;
            }
            Prob::new(n, d)
        }
        None => Prob::from_integer(BigInt::from_str(s).ok()?),
    };
    if value.is_negative() {
        None
    } else {
        Some(value)
    }
}

/// Formats in lowest terms; integers are printed without a denominator.
pub fn format_prob(p: &Prob) -> String {
    p.to_string()
}

pub fn factorial(n: usize) -> u64 {
    (1..=n as u64).product()
}
