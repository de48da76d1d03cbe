//! High-precision evaluation with rigorous rational error bounds.
//!
//! Character integrals against non-subgroup measures need `cos(2 pi r)`
//! for exact rationals `r`; there is no closed rational form, so the
//! value is computed to a requested number of bits together with an
//! explicit error bound. All intermediate arithmetic is fixed-point over
//! `BigInt` mantissas, and every rounding step is accounted for in the
//! bound, so the returned interval is sound rather than heuristic.

use crate::rational::Rat;
use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::str::FromStr;

/// `PI_NUM / 2^384` approximates pi with error below `2^-384`.
const PI_NUM: &str = "123785053203292407819553701039137184435442376711719744927844101526111311422332618694237111830548352286187237239491693";
const PI_BITS: u32 = 384;

fn pi_approx() -> Rat {
    Rat::new(
        BigInt::from_str(PI_NUM).expect("valid pi constant"),
        BigInt::one() << PI_BITS,
    )
}

/// Round a rational to the grid `2^-bits` (nearest, ties up); the
/// rounding error is at most `2^-(bits+1)`.
pub fn round_to_bits(x: &Rat, bits: u32) -> Rat {
    let scale = BigInt::one() << bits;
    let scaled = x * Rat::from_integer(scale.clone());
    let half = Rat::new(BigInt::one(), BigInt::from(2));
    Rat::new((scaled + half).floor().to_integer(), scale)
}

/// A value together with a rigorous absolute error bound.
#[derive(Debug, Clone)]
pub struct Approx {
    pub value: Rat,
    pub error: Rat,
}

impl Approx {
    pub fn exact(value: Rat) -> Self {
        Self {
            value,
            error: Rat::zero(),
        }
    }

    pub fn to_f64(&self) -> f64 {
        self.value.to_f64().unwrap_or(f64::NAN)
    }
}

enum Reduced {
    /// `sign * cos(2 pi t)` with `t in [0, 1/8]`.
    CosEighth(i8, Rat),
    /// `sign * sin(2 pi t)` with `t in [0, 1/8]`.
    SinEighth(i8, Rat),
    ExactZero,
    ExactOne(i8),
}

/// `cos(2 pi x)` for exact rational `x`, to roughly `bits` of precision.
///
/// Quadrant reduction happens exactly on the rational argument, so
/// boundary values like `x = 1/4` come out exactly 0; only the final
/// Taylor evaluation on `[0, 1/8]` is approximate.
pub fn cos_2pi(x: &Rat, bits: u32) -> Approx {
    match reduce_to_eighth(x) {
        Reduced::CosEighth(s, t) => {
            let mut approx = cos_2pi_small(&t, bits);
            if s < 0 {
                approx.value = -approx.value;
            }
            approx
        }
        Reduced::SinEighth(s, t) => {
            let mut approx = sin_2pi_small(&t, bits);
            if s < 0 {
                approx.value = -approx.value;
            }
            approx
        }
        Reduced::ExactZero => Approx::exact(Rat::zero()),
        Reduced::ExactOne(s) => Approx::exact(if s < 0 { -Rat::one() } else { Rat::one() }),
    }
}

/// `sin(2 pi x)` via the cosine phase shift.
pub fn sin_2pi(x: &Rat, bits: u32) -> Approx {
    let quarter = Rat::new(BigInt::one(), BigInt::from(4));
    cos_2pi(&(&quarter - x), bits)
}

/// Reduce `cos(2 pi x)` to the first eighth-period using exact rational
/// comparisons only.
fn reduce_to_eighth(x: &Rat) -> Reduced {
    let f = x - x.floor(); // in [0, 1)
    let half = Rat::new(BigInt::one(), BigInt::from(2));
    // cos is even around 0: fold to [0, 1/2]
    let folded = if f > half { Rat::one() - f } else { f };
    let quarter = Rat::new(BigInt::one(), BigInt::from(4));
    let eighth = Rat::new(BigInt::one(), BigInt::from(8));
    if folded == quarter {
        Reduced::ExactZero
    } else if folded.is_zero() {
        Reduced::ExactOne(1)
    } else if folded == half {
        Reduced::ExactOne(-1)
    } else if folded <= eighth {
        Reduced::CosEighth(1, folded)
    } else if folded < quarter {
        // cos(2 pi t) = sin(2 pi (1/4 - t))
        Reduced::SinEighth(1, &quarter - &folded)
    } else if &folded - &quarter <= eighth {
        // cos(2 pi t) = -sin(2 pi (t - 1/4))
        Reduced::SinEighth(-1, &folded - &quarter)
    } else {
        // cos(2 pi t) = -cos(2 pi (1/2 - t))
        Reduced::CosEighth(-1, &half - &folded)
    }
}

fn cos_2pi_small(t: &Rat, bits: u32) -> Approx {
    let work = bits + 32;
    let (arg, arg_err) = two_pi_times(t, work);
    // |d cos / du| <= 1, so the argument error passes straight through
    taylor_eval(&arg, work, bits, arg_err, false)
}

fn sin_2pi_small(t: &Rat, bits: u32) -> Approx {
    let work = bits + 32;
    let (arg, arg_err) = two_pi_times(t, work);
    taylor_eval(&arg, work, bits, arg_err, true)
}

/// `2 pi t` rounded to `work` bits, with its error bound; `|t| <= 1/8`.
fn two_pi_times(t: &Rat, work: u32) -> (Rat, Rat) {
    let two_pi = pi_approx() * Rat::from_integer(BigInt::from(2));
    let product = round_to_bits(&(&two_pi * t), work);
    let err = Rat::new(BigInt::one(), BigInt::one() << (PI_BITS - 4))
        + Rat::new(BigInt::one(), BigInt::one() << work);
    (product, err)
}

/// Evaluate the cosine (or sine) Taylor series at `arg in [0, 0.79]`,
/// rounding every term to `work` bits and folding all rounding and
/// truncation errors into the reported bound.
fn taylor_eval(arg: &Rat, work: u32, bits: u32, arg_err: Rat, sine: bool) -> Approx {
    let arg2 = round_to_bits(&(arg * arg), work);
    let mut term = if sine { arg.clone() } else { Rat::one() };
    let mut sum = term.clone();
    let mut k: u64 = 0;
    let mut rounding_err = Rat::zero();
    let grid = Rat::new(BigInt::one(), BigInt::one() << work);
    // terms decrease monotonically since arg < 1; the alternating-series
    // truncation error is bounded by the first dropped term, itself < grid
    loop {
        k += 1;
        let (d1, d2) = if sine {
            (2 * k, 2 * k + 1)
        } else {
            (2 * k - 1, 2 * k)
        };
        let denom = BigInt::from(d1) * BigInt::from(d2);
        term = round_to_bits(&(-(term * &arg2) / Rat::from_integer(denom)), work);
        rounding_err += &grid;
        if term.abs() < grid {
            break;
        }
        sum += &term;
        if k > 200 {
            break; // unreachable for arg < 1; defensive cap
        }
    }
    let truncation = &grid * Rat::from_integer(BigInt::from(2));
    let error = arg_err + rounding_err + truncation;
    Approx {
        value: round_to_bits(&sum, bits + 8),
        error: error + Rat::new(BigInt::one(), BigInt::one() << (bits + 8)),
    }
}

/// Upper bound on `sqrt(x)` within `2^-bits`, for nonnegative `x`;
/// turns `re^2 + im^2` into a sound modulus bound.
pub fn sqrt_upper(x: &Rat, bits: u32) -> Rat {
    assert!(!x.is_negative(), "sqrt of negative rational");
    if x.is_zero() {
        return Rat::zero();
    }
    let tolerance = Rat::new(BigInt::one(), BigInt::one() << bits);
    // Newton from above stays above; round up to preserve the bound
    let seed = {
        let f = x.to_f64().unwrap_or(1.0);
        if f.is_finite() && f > 0.0 {
            let s = Rat::from_float(f.sqrt() * 1.01).unwrap_or_else(Rat::one);
            if &s * &s >= *x {
                s
            } else {
                x + Rat::one()
            }
        } else {
            x + Rat::one()
        }
    };
    let two = Rat::from_integer(BigInt::from(2));
    let mut r = seed;
    loop {
        let next = round_up_to_bits(&((&r + x / &r) / &two), bits + 16);
        if &r - &next < tolerance {
            return next;
        }
        r = next;
    }
}

fn round_up_to_bits(x: &Rat, bits: u32) -> Rat {
    let scale = BigInt::one() << bits;
    let scaled = x * Rat::from_integer(scale.clone());
    Rat::new(scaled.ceil().to_integer(), scale)
}
