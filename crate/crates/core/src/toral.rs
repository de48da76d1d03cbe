//! The Anosov system on the 2-torus: exact dynamics on rational points,
//! periodic and antipodal-periodic point enumeration through Smith normal
//! form, and the closed-form counts they must match.
//!
//! Solutions of `(A^n -+ I) x = 0 mod Z^2` form a finite subgroup; with
//! `U M V = diag(d1, d2)` its points are exactly `V (k1/d1, k2/d2) mod Z^2`,
//! so enumeration costs O(1) per point regardless of `n`.

use crate::exactlat::{smith_normal_form, IntMatrix2};
use crate::par;
use crate::rational::{circle_dist, format_rat, mod1, parse_rat, Rat};
use crate::{Error, Result};
use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};
use std::fmt;

/// Exact rational point of the torus in canonical `[0,1)^2` form.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TorusPoint {
    x: Rat,
    y: Rat,
}

impl TorusPoint {
    pub fn new(x: Rat, y: Rat) -> Self {
        Self {
            x: mod1(&x),
            y: mod1(&y),
        }
    }

    pub fn from_i64(xn: i64, xd: i64, yn: i64, yd: i64) -> Self {
        Self::new(
            Rat::new(BigInt::from(xn), BigInt::from(xd)),
            Rat::new(BigInt::from(yn), BigInt::from(yd)),
        )
    }

    pub fn origin() -> Self {
        Self::new(Rat::zero(), Rat::zero())
    }

    pub fn x(&self) -> &Rat {
        &self.x
    }

    pub fn y(&self) -> &Rat {
        &self.y
    }

    /// Exact image under the toral automorphism induced by `m`.
    pub fn apply(&self, m: &IntMatrix2) -> Self {
        let (x, y) = m.apply_vec(&self.x, &self.y);
        Self::new(x, y)
    }

    /// The antipodal point `-p mod Z^2`.
    pub fn antipode(&self) -> Self {
        Self::new(-self.x.clone(), -self.y.clone())
    }

    pub fn is_self_antipodal(&self) -> bool {
        *self == self.antipode()
    }

    /// Sup metric on the torus: max of coordinatewise circle distances.
    pub fn dist(&self, other: &Self) -> Rat {
        let dx = circle_dist(&self.x, &other.x);
        let dy = circle_dist(&self.y, &other.y);
        dx.max(dy)
    }

    /// Translation by a rational vector, reduced mod 1.
    pub fn translate(&self, dx: &Rat, dy: &Rat) -> Self {
        Self::new(&self.x + dx, &self.y + dy)
    }

    /// Parse the `p/q r/s` text form.
    pub fn parse(text: &str) -> Result<Self> {
        let parts: Vec<&str> = text.split_whitespace().collect();
        if parts.len() != 2 {
            return Err(Error::Parse(format!(
                "torus point needs two fractions, got {text:?}"
            )));
        }
        Ok(Self::new(parse_rat(parts[0])?, parse_rat(parts[1])?))
    }
}

impl fmt::Display for TorusPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", format_rat(&self.x), format_rat(&self.y))
    }
}

/// Which fixed-point equation a periodic set solves.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PeriodicKind {
    /// `f^n(p) = p`, the kernel of `A^n - I` on the torus.
    Periodic,
    /// `f^n(p) = -p`, the kernel of `A^n + I`.
    Antipodal,
}

impl PeriodicKind {
    pub fn as_str(self) -> &'static str {
        match self {
            PeriodicKind::Periodic => "periodic",
            PeriodicKind::Antipodal => "antipodal",
        }
    }
}

/// A fully enumerated periodic (or antipodal-periodic) point set,
/// lexicographically sorted for reproducible output.
#[derive(Debug, Clone)]
pub struct PeriodicSet {
    pub period: u32,
    pub kind: PeriodicKind,
    pub points: Vec<TorusPoint>,
}

impl PeriodicSet {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn contains(&self, p: &TorusPoint) -> bool {
        self.points.binary_search(p).is_ok()
    }

    /// CSV rows `n,kind,x_num,x_den,y_num,y_den` with a header line.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,kind,x_num,x_den,y_num,y_den\n");
        for p in &self.points {
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                self.period,
                self.kind.as_str(),
                p.x().numer(),
                p.x().denom(),
                p.y().numer(),
                p.y().denom()
            ));
        }
        out
    }
}

const ENUMERATION_LIMIT: u64 = 20_000_000;

/// All solutions of `M x = 0 mod Z^2` for a nonsingular integer matrix,
/// enumerated over Smith normal form cosets and sorted.
pub fn kernel_points(m: &IntMatrix2) -> Result<Vec<TorusPoint>> {
    let snf = smith_normal_form(m)?;
    let size = (&snf.d1 * &snf.d2)
        .to_u64()
        .filter(|&s| s <= ENUMERATION_LIMIT)
        .ok_or_else(|| {
            Error::EnumerationTooLarge((&snf.d1 * &snf.d2).to_string(), ENUMERATION_LIMIT)
        })?;
    if size == 0 {
        return Err(Error::CountMismatch(format!(
            "matrix {m} is singular on the torus"
        )));
    }
    let d1 = snf.d1.to_u64().unwrap();
    let d2 = snf.d2.to_u64().unwrap();
    let v = snf.v.clone();
    let d1_big = BigInt::from(d1);
    let d2_big = BigInt::from(d2);

    let mut points = par::map_range_collect(size as usize, |idx| {
        let k1 = BigInt::from(idx as u64 / d2);
        let k2 = BigInt::from(idx as u64 % d2);
        let y1 = Rat::new(k1, d1_big.clone());
        let y2 = Rat::new(k2, d2_big.clone());
        let (x, y) = v.apply_vec(&y1, &y2);
        TorusPoint::new(x, y)
    });
    points.sort_unstable();
    debug_assert!(points.windows(2).all(|w| w[0] != w[1]), "coset points must be distinct");
    Ok(points)
}

/// Sequential variant of [`kernel_points`], kept as the benchmark baseline.
pub fn kernel_points_seq(m: &IntMatrix2) -> Result<Vec<TorusPoint>> {
    let snf = smith_normal_form(m)?;
    let size = (&snf.d1 * &snf.d2)
        .to_u64()
        .filter(|&s| s <= ENUMERATION_LIMIT)
        .ok_or_else(|| {
            Error::EnumerationTooLarge((&snf.d1 * &snf.d2).to_string(), ENUMERATION_LIMIT)
        })?;
    let d1 = snf.d1.to_u64().unwrap();
    let d2 = snf.d2.to_u64().unwrap();
    let d1_big = BigInt::from(d1);
    let d2_big = BigInt::from(d2);
    let mut points = par::map_range_collect_seq(size as usize, |idx| {
        let k1 = BigInt::from(idx as u64 / d2);
        let k2 = BigInt::from(idx as u64 % d2);
        let (x, y) = snf
            .v
            .apply_vec(&Rat::new(k1, d1_big.clone()), &Rat::new(k2, d2_big.clone()));
        TorusPoint::new(x, y)
    });
    points.sort_unstable();
    Ok(points)
}

/// `P_n(f_A)`: the set of `n`-periodic points, `|P_n| = |det(A^n - I)|`.
pub fn periodic_points(a: &IntMatrix2, n: u32) -> Result<PeriodicSet> {
    assert!(n >= 1, "period must be positive");
    a.require_hyperbolic_positive()?;
    let m = a.pow(n).sub(&IntMatrix2::identity());
    let points = kernel_points(&m)?;
    let expected = m.det().abs();
    if BigInt::from(points.len()) != expected {
        return Err(Error::CountMismatch(format!(
            "enumerated {} period-{n} points, determinant says {expected}",
            points.len()
        )));
    }
    Ok(PeriodicSet {
        period: n,
        kind: PeriodicKind::Periodic,
        points,
    })
}

/// `P_n^-(f_A)`: solutions of `f^n(p) = -p`, `|P_n^-| = |det(A^n + I)|`.
pub fn antipodal_periodic_points(a: &IntMatrix2, n: u32) -> Result<PeriodicSet> {
    assert!(n >= 1, "period must be positive");
    a.require_hyperbolic_positive()?;
    let m = a.pow(n).add(&IntMatrix2::identity());
    let points = kernel_points(&m)?;
    let expected = m.det().abs();
    if BigInt::from(points.len()) != expected {
        return Err(Error::CountMismatch(format!(
            "enumerated {} antipodal period-{n} points, determinant says {expected}",
            points.len()
        )));
    }
    Ok(PeriodicSet {
        period: n,
        kind: PeriodicKind::Antipodal,
        points,
    })
}

/// Closed-form counts `(Per_n, Per_n^-) = (trace(A^n) - 2, trace(A^n) + 2)`.
pub fn per_counts(a: &IntMatrix2, n: u32) -> (BigInt, BigInt) {
    let t = a.pow(n).trace();
    (&t - BigInt::from(2), t + BigInt::from(2))
}

/// Forward orbit `[p, f(p), ..., f^{n-1}(p)]`, exact.
pub fn orbit(a: &IntMatrix2, p: &TorusPoint, n: usize) -> Vec<TorusPoint> {
    let mut out = Vec::with_capacity(n);
    let mut current = p.clone();
    for _ in 0..n {
        let next = current.apply(a);
        out.push(current);
        current = next;
    }
    out
}

/// Outcome of a bounded least-period search.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LeastPeriod {
    Exact(u32),
    ExceedsBound(u32),
}

/// Smallest `m <= bound` with `f^m(p) = p`, or `ExceedsBound`.
pub fn least_period(a: &IntMatrix2, p: &TorusPoint, bound: u32) -> LeastPeriod {
    let mut current = p.clone();
    for m in 1..=bound {
        current = current.apply(a);
        if current == *p {
            return LeastPeriod::Exact(m);
        }
    }
    LeastPeriod::ExceedsBound(bound)
}
