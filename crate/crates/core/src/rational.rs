//! Small helpers on exact rationals: reduction mod 1, circle distances,
//! minimal-representative lifts, and the `p/q` text form used by the file
//! formats.

use crate::{Error, Result};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Exact rational scalar used throughout the crate.
pub type Rat = BigRational;

pub fn rat(num: i64, den: i64) -> Rat {
    Rat::new(BigInt::from(num), BigInt::from(den))
}

pub fn rat_int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// Reduce into the canonical fundamental domain `[0, 1)`.
pub fn mod1(x: &Rat) -> Rat {
    x - x.floor()
}

/// Distance from `x` to the nearest integer, i.e. the circle metric to 0.
pub fn circle_norm(x: &Rat) -> Rat {
    let f = mod1(x);
    let complement = Rat::one() - &f;
    if f <= complement {
        f
    } else {
        complement
    }
}

/// Circle distance between two reals mod 1.
pub fn circle_dist(a: &Rat, b: &Rat) -> Rat {
    circle_norm(&(a - b))
}

/// Minimal representative of `x` mod 1, taken in `(-1/2, 1/2]`.
///
/// The tie at exactly 1/2 goes to +1/2.
pub fn min_rep(x: &Rat) -> Rat {
    let f = mod1(x);
    if &f * BigInt::from(2) > Rat::one() {
        f - Rat::one()
    } else {
        f
    }
}

/// Parse a rational in `p/q` or plain integer form.
pub fn parse_rat(s: &str) -> Result<Rat> {
    let s = s.trim();
    let parse_int = |t: &str| -> Result<BigInt> {
        t.trim()
            .parse::<BigInt>()
            .map_err(|e| Error::Parse(format!("bad integer {t:?}: {e}")))
    };
    match s.split_once('/') {
        Some((num, den)) => {
            let d = parse_int(den)?;
            if d.is_zero() {
                return Err(Error::Parse(format!("zero denominator in {s:?}")));
            }
            Ok(Rat::new(parse_int(num)?, d))
        }
        None => Ok(Rat::from_integer(parse_int(s)?)),
    }
}

/// Format as `num/den`, always with an explicit denominator.
pub fn format_rat(x: &Rat) -> String {
    format!("{}/{}", x.numer(), x.denom())
}

/// Decimal approximation with `digits` fractional digits (round to nearest,
/// half away from zero). Exact rationals print losslessly when they happen
/// to be decimal.
pub fn decimal_string(x: &Rat, digits: u32) -> String {
    let scale = BigInt::from(10u8).pow(digits);
    let scaled = x * &scale;
    let rounded = scaled.round().to_integer();
    let negative = rounded.is_negative();
    let abs = rounded.magnitude().to_string();
    let (int_part, frac_part) = if abs.len() > digits as usize {
        let split = abs.len() - digits as usize;
        (abs[..split].to_string(), abs[split..].to_string())
    } else {
        (
            "0".to_string(),
            format!("{:0>width$}", abs, width = digits as usize),
        )
    };
    let sign = if negative { "-" } else { "" };
    if digits == 0 {
        format!("{sign}{int_part}")
    } else {
        format!("{sign}{int_part}.{frac_part}")
    }
}
