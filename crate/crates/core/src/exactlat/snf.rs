//! Smith normal form of nonzero 2x2 integer matrices.
//!
//! `U * M * V = diag(d1, d2)` with unimodular `U`, `V`, canonical
//! `d1 >= 1`, `d1 | d2`, `d2 >= 0`. A fixed elimination order makes the
//! output deterministic, which the enumeration layer relies on for
//! reproducible point orderings.

use super::matrix::IntMatrix2;
use crate::{Error, Result};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SnfDecomposition {
    pub u: IntMatrix2,
    pub d1: BigInt,
    pub d2: BigInt,
    pub v: IntMatrix2,
}

impl SnfDecomposition {
    pub fn diagonal(&self) -> IntMatrix2 {
        IntMatrix2::new(self.d1.clone(), 0, 0, self.d2.clone())
    }
}

pub fn smith_normal_form(m: &IntMatrix2) -> Result<SnfDecomposition> {
    if m.is_zero() {
        return Err(Error::ZeroMatrix);
    }
    let mut w = m.clone();
    let mut u = IntMatrix2::identity();
    let mut v = IntMatrix2::identity();

    // row op: left-multiply by L; col op: right-multiply by R
    let lmul = |l: &IntMatrix2, w: &mut IntMatrix2, u: &mut IntMatrix2| {
        *w = l.mul(w);
        *u = l.mul(u);
    };
    let rmul = |r: &IntMatrix2, w: &mut IntMatrix2, v: &mut IntMatrix2| {
        *w = w.mul(r);
        *v = v.mul(r);
    };

    if w.a.is_zero() {
        // bring a nonzero entry to the pivot; prefer a column swap, then a
        // row swap (fixed order keeps the output canonical)
        if !w.b.is_zero() {
            rmul(&IntMatrix2::new(0, 1, 1, 0), &mut w, &mut v);
        } else if !w.c.is_zero() {
            lmul(&IntMatrix2::new(0, 1, 1, 0), &mut w, &mut u);
        } else {
            rmul(&IntMatrix2::new(0, 1, 1, 0), &mut w, &mut v);
            lmul(&IntMatrix2::new(0, 1, 1, 0), &mut w, &mut u);
        }
    }

    // extended gcd with the sign fixed so the pivot replacement is
    // positive; negating (g, x, y) together keeps the Bezout identity
    let egcd = |a: &BigInt, b: &BigInt| -> (BigInt, BigInt, BigInt) {
        let e = a.extended_gcd(b);
        if e.gcd.is_negative() {
            (-e.gcd, -e.x, -e.y)
        } else {
            (e.gcd, e.x, e.y)
        }
    };

    // outer loop: eliminate off-diagonal entries, then fold the second
    // column back in if d1 does not divide d2 yet
    loop {
        // when the pivot divides the target a plain shear clears it without
        // touching the opposite entry; otherwise a gcd step strictly
        // shrinks the pivot, so the elimination terminates
        loop {
            if !w.c.is_zero() {
                if (&w.c % &w.a).is_zero() {
                    let q = &w.c / &w.a;
                    lmul(&IntMatrix2::new(1, 0, -q, 1), &mut w, &mut u);
                } else {
                    let (g, x, y) = egcd(&w.a, &w.c);
                    // [[x, y], [-c/g, a/g]] has determinant 1, sends (a, c) to (g, 0)
                    let l = IntMatrix2::new(x, y, -(&w.c / &g), &w.a / &g);
                    lmul(&l, &mut w, &mut u);
                }
                debug_assert!(w.c.is_zero());
                continue;
            }
            if !w.b.is_zero() {
                if (&w.b % &w.a).is_zero() {
                    let q = &w.b / &w.a;
                    rmul(&IntMatrix2::new(1, -q, 0, 1), &mut w, &mut v);
                } else {
                    let (g, x, y) = egcd(&w.a, &w.b);
                    let r = IntMatrix2::new(x, -(&w.b / &g), y, &w.a / &g);
                    rmul(&r, &mut w, &mut v);
                }
                debug_assert!(w.b.is_zero());
                continue;
            }
            break;
        }
        if w.d.is_zero() || (&w.d % &w.a).is_zero() {
            break;
        }
        // d1 does not divide d2: fold col2 into col1 and re-eliminate;
        // the new pivot is gcd(d1, d2), so this happens at most once more
        rmul(&IntMatrix2::new(1, 0, 1, 1), &mut w, &mut v);
    }

    // canonical signs: d1 >= 1, d2 >= 0
    if w.a.is_negative() {
        lmul(&IntMatrix2::new(-1, 0, 0, 1), &mut w, &mut u);
    }
    if w.d.is_negative() {
        lmul(&IntMatrix2::new(1, 0, 0, -1), &mut w, &mut u);
    }

    debug_assert!(w.b.is_zero() && w.c.is_zero());
    debug_assert!(w.a.is_positive());
    debug_assert!((&w.d % &w.a).is_zero());
    debug_assert_eq!(u.det().abs(), BigInt::one());
    debug_assert_eq!(v.det().abs(), BigInt::one());
    debug_assert_eq!(u.mul(m).mul(&v), IntMatrix2::new(w.a.clone(), 0, 0, w.d.clone()));

    Ok(SnfDecomposition {
        u,
        d1: w.a,
        d2: w.d,
        v,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check(m: &IntMatrix2) -> SnfDecomposition {
        let snf = smith_normal_form(m).unwrap();
        assert_eq!(snf.u.mul(m).mul(&snf.v), snf.diagonal(), "U M V = D for {m}");
        assert_eq!(snf.u.det().abs(), BigInt::one());
        assert_eq!(snf.v.det().abs(), BigInt::one());
        assert!(snf.d1.is_positive());
        assert!(!snf.d2.is_negative());
        assert!((&snf.d2 % &snf.d1).is_zero());
        assert_eq!(&snf.d1 * &snf.d2, m.det().abs());
        snf
    }

    #[test]
    fn unimodular_input_gives_trivial_group() {
        let snf = check(&IntMatrix2::new(1, 1, 1, 0));
        assert_eq!((snf.d1, snf.d2), (BigInt::one(), BigInt::one()));
    }

    #[test]
    fn determinant_five() {
        let snf = check(&IntMatrix2::new(3, 1, 1, 2));
        assert_eq!((snf.d1, snf.d2), (BigInt::one(), BigInt::from(5)));
    }

    #[test]
    fn already_diagonal() {
        let snf = check(&IntMatrix2::new(2, 0, 0, 2));
        assert_eq!((snf.d1, snf.d2), (BigInt::from(2), BigInt::from(2)));
    }

    #[test]
    fn divisibility_is_enforced() {
        let snf = check(&IntMatrix2::new(2, 0, 0, 3));
        assert_eq!((snf.d1, snf.d2), (BigInt::one(), BigInt::from(6)));
        let snf = check(&IntMatrix2::new(4, 0, 0, 6));
        assert_eq!((snf.d1, snf.d2), (BigInt::from(2), BigInt::from(12)));
    }

    #[test]
    fn singular_and_zero_inputs() {
        let snf = check(&IntMatrix2::new(2, 4, 1, 2));
        assert_eq!(snf.d2, BigInt::zero());
        assert!(smith_normal_form(&IntMatrix2::zero()).is_err());
    }

    #[test]
    fn deterministic_output() {
        let m = IntMatrix2::new(12, 8, 8, 4);
        let s1 = smith_normal_form(&m).unwrap();
        let s2 = smith_normal_form(&m).unwrap();
        assert_eq!(s1, s2);
        assert_eq!((s1.d1.clone(), s1.d2.clone()), (BigInt::from(4), BigInt::from(4)));
    }
}
