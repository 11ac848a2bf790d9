//! Exact rationals and helpers for `p`-power denominators.

use alloc::format;
use alloc::string::String;

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};

/// Exact rational number.
pub type Q = Ratio<i64>;

#[inline]
pub fn q(n: i64, d: i64) -> Q {
    Q::new(n, d)
}

#[inline]
pub fn qi(n: i64) -> Q {
    Q::from_integer(n)
}

/// Serializes as `"a/b"`, always with an explicit denominator.
pub fn fmt_q(x: Q) -> String {
    format!("{}/{}", x.numer(), x.denom())
}

/// Shortest form: `"3"` for integers, `"3/2"` otherwise.
pub fn fmt_q_short(x: Q) -> String {
    if x.is_integer() {
        format!("{}", x.numer())
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Bound on numerator and denominator of parsed input, so sums and
/// products of a few inputs stay inside `i64`.
pub const MAX_INPUT_COMPONENT: i64 = 1 << 24;

/// Rejects rationals whose reduced numerator or denominator exceeds [`MAX_INPUT_COMPONENT`].
pub fn check_input_size(x: Q) -> Result<Q> {
    if x.numer().abs() > MAX_INPUT_COMPONENT || *x.denom() > MAX_INPUT_COMPONENT {
        return Err(Error::Unsupported(format!("rational {} outside ±2^24 components", fmt_q(x))));
    }
    Ok(x)
}

/// Accepts `"a/b"`, `"a"` and surrounding whitespace.
pub fn parse_q(s: &str) -> Result<Q> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational: {s:?}"));
    let x = match s.split_once('/') {
        Some((n, d)) => {
            let n: i64 = n.trim().parse().map_err(|_| bad())?;
            let d: i64 = d.trim().parse().map_err(|_| bad())?;
            if d == 0 {
                return Err(bad());
            }
            Q::new(n, d)
        }
        None => qi(s.parse().map_err(|_| bad())?),
    };
    check_input_size(x)
}

/// Smallest `k` with `d | p^k`, if `d` is a power of `p`.
pub fn p_power_exponent(d: i64, p: i64) -> Option<u32> {
    let mut d = d.abs();
    if d == 0 {
        return None;
    }
    let mut k = 0;
    while d % p == 0 {
        d /= p;
        k += 1;
    }
    (d == 1).then_some(k)
}

/// Root level of a rational: the `k` with denominator `p^k`.
pub fn level_of(x: Q, p: i64) -> Option<u32> {
    p_power_exponent(*x.denom(), p)
}

/// `x · p^level` as an integer, if exact.
pub fn scaled(x: Q, scale: i64) -> Option<i64> {
    let n = x.numer().checked_mul(scale)?;
    let (quo, rem) = n.div_rem(x.denom());
    rem.is_zero().then_some(quo)
}

pub fn abs(x: Q) -> Q {
    x.abs()
}

pub fn pow_i64(base: i64, exp: u32) -> i64 {
    base.checked_pow(exp).expect("integer power overflow")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_format() {
        assert_eq!(parse_q(" 6/4 ").unwrap(), q(3, 2));
        assert_eq!(fmt_q_short(q(3, 2)), "3/2");
        assert_eq!(fmt_q_short(qi(3)), "3");
        assert_eq!(fmt_q(qi(3)), "3/1");
        assert!(parse_q("1/0").is_err() && parse_q("a").is_err());
    }

    #[test]
    fn oversized_input_is_rejected() {
        assert!(parse_q("16777216/3").is_ok());
        assert!(parse_q("16777217").is_err());
        assert!(parse_q("1/99999999").is_err());
        assert_eq!(parse_q("33554432/2").unwrap(), qi(16777216));
    }
}
