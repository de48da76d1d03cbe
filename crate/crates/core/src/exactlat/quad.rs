//! Exact arithmetic in the real quadratic field Q(sqrt(D)).
//!
//! A value is `p + q*sqrt(D)` with exact rational `p`, `q` and a fixed
//! positive non-square discriminant `D`. Field operations, the total
//! order, and integer floor are all exact; this is where the expanding
//! eigenvalue and the corrections of the shadowing solver live.

use crate::rational::{decimal_string, Rat};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuadNumber {
    p: Rat,
    q: Rat,
    delta: BigInt,
}

impl QuadNumber {
    /// `p + q*sqrt(delta)`; `delta` must be positive and non-square.
    pub fn new(p: Rat, q: Rat, delta: BigInt) -> Self {
        debug_assert!(delta.is_positive(), "discriminant must be positive");
        debug_assert!(
            {
                let s = delta.sqrt();
                &s * &s != delta
            },
            "discriminant must not be a perfect square"
        );
        Self { p, q, delta }
    }

    pub fn from_rat(p: Rat, delta: BigInt) -> Self {
        Self::new(p, Rat::zero(), delta)
    }

    pub fn from_int(n: i64, delta: BigInt) -> Self {
        Self::from_rat(Rat::from_integer(BigInt::from(n)), delta)
    }

    pub fn zero(delta: BigInt) -> Self {
        Self::from_int(0, delta)
    }

    pub fn one(delta: BigInt) -> Self {
        Self::from_int(1, delta)
    }

    pub fn sqrt_delta(delta: BigInt) -> Self {
        Self::new(Rat::zero(), Rat::one(), delta)
    }

    pub fn rational_part(&self) -> &Rat {
        &self.p
    }

    pub fn radical_part(&self) -> &Rat {
        &self.q
    }

    pub fn delta(&self) -> &BigInt {
        &self.delta
    }

    pub fn is_zero(&self) -> bool {
        self.p.is_zero() && self.q.is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.q.is_zero()
    }

    /// Exact rational value, if the radical part vanishes.
    pub fn to_rat(&self) -> Option<Rat> {
        self.is_rational().then(|| self.p.clone())
    }

    /// Galois conjugate `p - q*sqrt(D)`.
    pub fn conj(&self) -> Self {
        Self::new(self.p.clone(), -self.q.clone(), self.delta.clone())
    }

    /// Field norm `p^2 - q^2 D`, a rational.
    pub fn field_norm(&self) -> Rat {
        &self.p * &self.p - &self.q * &self.q * Rat::from_integer(self.delta.clone())
    }

    /// Exact sign: -1, 0, or +1.
    pub fn signum(&self) -> i8 {
        let sp = rat_sign(&self.p);
        let sq = rat_sign(&self.q);
        if sq == 0 {
            return sp;
        }
        if sp == 0 {
            return sq;
        }
        if sp == sq {
            return sp;
        }
        // opposite signs: compare p^2 against q^2 D
        let p2 = &self.p * &self.p;
        let q2d = &self.q * &self.q * Rat::from_integer(self.delta.clone());
        match p2.cmp(&q2d) {
            Ordering::Greater => sp,
            Ordering::Less => sq,
            Ordering::Equal => 0,
        }
    }

    pub fn is_positive(&self) -> bool {
        self.signum() > 0
    }

    pub fn is_negative(&self) -> bool {
        self.signum() < 0
    }

    pub fn abs(&self) -> Self {
        if self.is_negative() {
            -self
        } else {
            self.clone()
        }
    }

    pub fn inv(&self) -> Self {
        assert!(!self.is_zero(), "inverse of zero quadratic number");
        let n = self.field_norm();
        Self::new(&self.p / &n, -&self.q / &n, self.delta.clone())
    }

    /// Integer power; negative exponents go through the exact inverse.
    pub fn pow(&self, e: i64) -> Self {
        let base = if e < 0 { self.inv() } else { self.clone() };
        let mut result = Self::one(self.delta.clone());
        let mut b = base;
        let mut k = e.unsigned_abs();
        while k > 0 {
            if k & 1 == 1 {
                result = &result * &b;
            }
            b = &b * &b;
            k >>= 1;
        }
        result
    }

    /// Exact integer floor.
    pub fn floor(&self) -> BigInt {
        // start from floor(p) + floor(q sqrt(D)) and correct by exact sign
        // comparisons; the estimate is off by at most 1.
        let mut g = self.p.floor().to_integer() + floor_sqrt_term(&self.q, &self.delta);
        loop {
            let low = self - &Self::from_rat(Rat::from_integer(g.clone()), self.delta.clone());
            if low.is_negative() {
                g -= 1;
                continue;
            }
            let high = self
                - &Self::from_rat(
                    Rat::from_integer(&g + BigInt::one()),
                    self.delta.clone(),
                );
            if !high.is_negative() {
                g += 1;
                continue;
            }
            return g;
        }
    }

    /// Fractional part in `[0, 1)`.
    pub fn mod1(&self) -> Self {
        self - &Self::from_rat(Rat::from_integer(self.floor()), self.delta.clone())
    }

    /// Distance to the nearest integer (circle metric to 0), exact.
    pub fn circle_norm(&self) -> Self {
        let f = self.mod1();
        let c = Self::one(self.delta.clone()) - f.clone();
        if f <= c {
            f
        } else {
            c
        }
    }

    /// Nearest dyadic rational with denominator `2^bits` (ties up).
    pub fn round_to_bits(&self, bits: u32) -> Rat {
        let scale = BigInt::one() << bits;
        let scaled = self * &Self::from_rat(Rat::from_integer(scale.clone()), self.delta.clone());
        let half_up = &scaled
            + &Self::from_rat(
                Rat::new(BigInt::one(), BigInt::from(2)),
                self.delta.clone(),
            );
        Rat::new(half_up.floor(), scale)
    }

    /// Double-precision approximation, good enough for reporting.
    pub fn to_f64(&self) -> f64 {
        let d = self.delta.to_f64().unwrap_or(f64::NAN);
        rat_to_f64(&self.p) + rat_to_f64(&self.q) * d.sqrt()
    }

    /// Decimal expansion with `digits` fractional digits, correctly rounded
    /// via the exact floor.
    pub fn decimal_string(&self, digits: u32) -> String {
        decimal_string(&self.round_to_bits(96), digits)
    }
}

fn rat_sign(x: &Rat) -> i8 {
    if x.is_zero() {
        0
    } else if x.is_positive() {
        1
    } else {
        -1
    }
}

fn rat_to_f64(x: &Rat) -> f64 {
    x.to_f64().unwrap_or_else(|| {
        // fall back to a scaled quotient when numerator/denominator
        // individually overflow f64
        let scaled = (x * BigInt::from(1u64 << 53)).to_integer();
        scaled.to_f64().unwrap_or(f64::NAN) / (1u64 << 53) as f64
    })
}

/// floor(q * sqrt(D)) for rational q, exact.
fn floor_sqrt_term(q: &Rat, delta: &BigInt) -> BigInt {
    if q.is_zero() {
        return BigInt::zero();
    }
    // q sqrt(D) = sign(q) * sqrt(q^2 D); for x = sqrt(n/d),
    // floor(x) = isqrt(n*d) / d (integer division).
    let q2d_num = q.numer() * q.numer() * delta;
    let q2d_den = q.denom() * q.denom();
    let root = (&q2d_num * &q2d_den).sqrt();
    let fl = root.div_floor(&q2d_den);
    if q.is_positive() {
        fl
    } else {
        // floor(-x) = -ceil(x) = -floor(x) - 1 for irrational x
        -fl - BigInt::one()
    }
}

impl PartialOrd for QuadNumber {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for QuadNumber {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self - other).signum() {
            -1 => Ordering::Less,
            0 => Ordering::Equal,
            _ => Ordering::Greater,
        }
    }
}

macro_rules! same_delta {
    ($a:expr, $b:expr) => {
        debug_assert_eq!($a.delta, $b.delta, "mixed discriminants")
    };
}

impl Add for &QuadNumber {
    type Output = QuadNumber;
    fn add(self, rhs: &QuadNumber) -> QuadNumber {
        same_delta!(self, rhs);
        QuadNumber::new(&self.p + &rhs.p, &self.q + &rhs.q, self.delta.clone())
    }
}

impl Sub for &QuadNumber {
    type Output = QuadNumber;
    fn sub(self, rhs: &QuadNumber) -> QuadNumber {
        same_delta!(self, rhs);
        QuadNumber::new(&self.p - &rhs.p, &self.q - &rhs.q, self.delta.clone())
    }
}

impl Mul for &QuadNumber {
    type Output = QuadNumber;
    fn mul(self, rhs: &QuadNumber) -> QuadNumber {
        same_delta!(self, rhs);
        let d = Rat::from_integer(self.delta.clone());
        QuadNumber::new(
            &self.p * &rhs.p + &self.q * &rhs.q * d,
            &self.p * &rhs.q + &self.q * &rhs.p,
            self.delta.clone(),
        )
    }
}

impl Div for &QuadNumber {
    type Output = QuadNumber;
    #[allow(clippy::suspicious_arithmetic_impl)] // division through the exact inverse
    fn div(self, rhs: &QuadNumber) -> QuadNumber {
        self * &rhs.inv()
    }
}

impl Neg for &QuadNumber {
    type Output = QuadNumber;
    fn neg(self) -> QuadNumber {
        QuadNumber::new(-self.p.clone(), -self.q.clone(), self.delta.clone())
    }
}

macro_rules! forward_owned {
    ($trait:ident, $method:ident) => {
        impl $trait for QuadNumber {
            type Output = QuadNumber;
            fn $method(self, rhs: QuadNumber) -> QuadNumber {
                (&self).$method(&rhs)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
forward_owned!(Div, div);

impl Neg for QuadNumber {
    type Output = QuadNumber;
    fn neg(self) -> QuadNumber {
        -&self
    }
}

impl fmt::Display for QuadNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.q.is_zero() {
            write!(f, "{}", self.p)
        } else if self.p.is_zero() {
            write!(f, "{}*sqrt({})", self.q, self.delta)
        } else {
            write!(f, "{} + {}*sqrt({})", self.p, self.q, self.delta)
        }
    }
}
