//! 2x2 integer matrices over unbounded integers.
//!
//! Traces of powers grow like the expanding eigenvalue, so fixed-width
//! words overflow around n = 45 for the classical example; `BigInt`
//! entries keep every formula exact at any depth.

use crate::rational::Rat;
use crate::{Error, Result};
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use std::fmt;

/// Row-major 2x2 integer matrix.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct IntMatrix2 {
    pub a: BigInt,
    pub b: BigInt,
    pub c: BigInt,
    pub d: BigInt,
}

impl IntMatrix2 {
    pub fn new(a: impl Into<BigInt>, b: impl Into<BigInt>, c: impl Into<BigInt>, d: impl Into<BigInt>) -> Self {
        Self {
            a: a.into(),
            b: b.into(),
            c: c.into(),
            d: d.into(),
        }
    }

    pub fn identity() -> Self {
        Self::new(1, 0, 0, 1)
    }

    pub fn zero() -> Self {
        Self::new(0, 0, 0, 0)
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero() && self.c.is_zero() && self.d.is_zero()
    }

    pub fn det(&self) -> BigInt {
        &self.a * &self.d - &self.b * &self.c
    }

    pub fn trace(&self) -> BigInt {
        &self.a + &self.d
    }

    pub fn neg(&self) -> Self {
        Self::new(-&self.a, -&self.b, -&self.c, -&self.d)
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        Self::new(
            &self.a * &rhs.a + &self.b * &rhs.c,
            &self.a * &rhs.b + &self.b * &rhs.d,
            &self.c * &rhs.a + &self.d * &rhs.c,
            &self.c * &rhs.b + &self.d * &rhs.d,
        )
    }

    pub fn add(&self, rhs: &Self) -> Self {
        Self::new(
            &self.a + &rhs.a,
            &self.b + &rhs.b,
            &self.c + &rhs.c,
            &self.d + &rhs.d,
        )
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        Self::new(
            &self.a - &rhs.a,
            &self.b - &rhs.b,
            &self.c - &rhs.c,
            &self.d - &rhs.d,
        )
    }

    /// Exact matrix power by repeated squaring; `pow(0)` is the identity.
    pub fn pow(&self, n: u32) -> Self {
        let mut result = Self::identity();
        let mut base = self.clone();
        let mut e = n;
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        result
    }

    /// Inverse of a unimodular matrix (det must be +1 or -1).
    pub fn inverse_unimodular(&self) -> Result<Self> {
        let det = self.det();
        if det == BigInt::one() {
            Ok(Self::new(
                self.d.clone(),
                -&self.b,
                -&self.c,
                self.a.clone(),
            ))
        } else if det == -BigInt::one() {
            Ok(Self::new(
                -&self.d,
                self.b.clone(),
                self.c.clone(),
                -&self.a,
            ))
        } else {
            Err(Error::NotUnimodular(det.to_string()))
        }
    }

    /// Exact image of a rational vector (no reduction mod 1).
    pub fn apply_vec(&self, x: &Rat, y: &Rat) -> (Rat, Rat) {
        (
            Rat::from_integer(self.a.clone()) * x + Rat::from_integer(self.b.clone()) * y,
            Rat::from_integer(self.c.clone()) * x + Rat::from_integer(self.d.clone()) * y,
        )
    }

    /// Max row sum of absolute values, the operator norm for the sup metric.
    pub fn sup_operator_norm(&self) -> BigInt {
        let r0 = self.a.abs() + self.b.abs();
        let r1 = self.c.abs() + self.d.abs();
        r0.max(r1)
    }

    /// The hyperbolicity check used by the whole artifact: det +1 and
    /// trace > 2, so both eigenvalues are positive with one above 1.
    pub fn is_hyperbolic_positive(&self) -> bool {
        self.det().is_one() && self.trace() > BigInt::from(2)
    }

    pub fn require_hyperbolic_positive(&self) -> Result<()> {
        if self.is_hyperbolic_positive() {
            Ok(())
        } else {
            Err(Error::NotHyperbolic(format!(
                "need det = 1 and trace > 2, got det = {}, trace = {} for {}",
                self.det(),
                self.trace(),
                self
            )))
        }
    }

    /// Parse the `a b c d` row-major literal used by the CLI and configs.
    pub fn parse(text: &str) -> Result<Self> {
        let entries: Vec<BigInt> = text
            .split_whitespace()
            .map(|t| {
                t.parse::<BigInt>()
                    .map_err(|e| Error::Parse(format!("bad matrix entry {t:?}: {e}")))
            })
            .collect::<Result<_>>()?;
        if entries.len() != 4 {
            return Err(Error::Parse(format!(
                "matrix literal needs 4 integers, got {} in {text:?}",
                entries.len()
            )));
        }
        let mut it = entries.into_iter();
        Ok(Self {
            a: it.next().unwrap(),
            b: it.next().unwrap(),
            c: it.next().unwrap(),
            d: it.next().unwrap(),
        })
    }

    /// The classical example `[[2,1],[1,1]]`.
    pub fn cat_map() -> Self {
        Self::new(2, 1, 1, 1)
    }
}

impl fmt::Display for IntMatrix2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {} {}", self.a, self.b, self.c, self.d)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pow_matches_direct_multiplication() {
        let a = IntMatrix2::cat_map();
        assert_eq!(a.pow(2), IntMatrix2::new(5, 3, 3, 2));
        assert_eq!(a.pow(0), IntMatrix2::identity());
    }

    #[test]
    fn pow_trace_recurrence() {
        // t_{n+1} = 3 t_n - t_{n-1}, t_0 = 2, t_1 = 3 for the cat map
        let a = IntMatrix2::cat_map();
        let mut t_prev = BigInt::from(2);
        let mut t = BigInt::from(3);
        for n in 2..=20u32 {
            let next = BigInt::from(3) * &t - &t_prev;
            t_prev = t;
            t = next;
            assert_eq!(a.pow(n).trace(), t, "trace recurrence at n = {n}");
        }
        assert_eq!(a.pow(5).trace(), BigInt::from(123));
    }

    #[test]
    fn unimodular_inverse() {
        let a = IntMatrix2::cat_map();
        let inv = a.inverse_unimodular().unwrap();
        assert_eq!(a.mul(&inv), IntMatrix2::identity());
        let m = IntMatrix2::new(1, 1, 1, 0); // det -1
        let minv = m.inverse_unimodular().unwrap();
        assert_eq!(m.mul(&minv), IntMatrix2::identity());
        assert!(IntMatrix2::new(2, 0, 0, 2).inverse_unimodular().is_err());
    }

    #[test]
    fn matrix_literal_roundtrip() {
        let a = IntMatrix2::parse("2 1 1 1").unwrap();
        assert_eq!(a, IntMatrix2::cat_map());
        assert_eq!(IntMatrix2::parse(&a.to_string()).unwrap(), a);
        assert!(IntMatrix2::parse("1 2 3").is_err());
        assert!(IntMatrix2::parse("1 2 3 x").is_err());
    }

    #[test]
    fn hyperbolicity_gate() {
        assert!(IntMatrix2::cat_map().is_hyperbolic_positive());
        assert!(IntMatrix2::new(3, 2, 1, 1).is_hyperbolic_positive());
        // identity: trace 2 is excluded
        assert!(!IntMatrix2::identity().is_hyperbolic_positive());
        // det -1 is excluded even though it is hyperbolic in the wide sense
        assert!(!IntMatrix2::new(1, 1, 1, 0).is_hyperbolic_positive());
        // negative trace is excluded
        assert!(!IntMatrix2::new(-2, -1, -1, -1).is_hyperbolic_positive());
    }
}
