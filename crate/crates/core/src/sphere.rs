//! The antipodal quotient of the torus: a topological 2-sphere carrying
//! the factor dynamics of the toral automorphism.
//!
//! A sphere point is the class `{x, -x}`, stored through its canonical
//! representative (the lexicographically smaller of the two canonical
//! torus representatives). The four self-antipodal classes are the
//! spines: the branch points of the 2-fold quotient, each with a single
//! separatrix. The quotient metric is the minimum of the torus sup
//! metric over lifts, so every comparison stays exact on rationals.

use crate::exactlat::IntMatrix2;
use crate::par;
use crate::rational::Rat;
use crate::toral::{self, TorusPoint};
use crate::{Error, Result};
use num_bigint::BigInt;
use std::collections::BTreeMap;
use std::fmt;

/// Antipodal equivalence class `{x, -x}` in canonical representative form.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SpherePoint {
    rep: TorusPoint,
}

impl SpherePoint {
    /// Quotient projection; `project(p) == project(-p)` by construction.
    pub fn project(p: &TorusPoint) -> Self {
        let q = p.antipode();
        Self {
            rep: if *p <= q { p.clone() } else { q },
        }
    }

    pub fn rep(&self) -> &TorusPoint {
        &self.rep
    }

    /// The fiber over this class: two torus points, or one for a spine.
    pub fn lift(&self) -> Vec<TorusPoint> {
        let anti = self.rep.antipode();
        if anti == self.rep {
            vec![self.rep.clone()]
        } else {
            vec![self.rep.clone(), anti]
        }
    }

    /// True exactly for the four self-antipodal classes
    /// (0,0), (1/2,0), (0,1/2), (1/2,1/2); detected structurally.
    pub fn is_spine(&self) -> bool {
        self.rep.is_self_antipodal()
    }

    /// Factor dynamics: well defined because the matrix commutes with
    /// negation.
    pub fn apply(&self, a: &IntMatrix2) -> Self {
        Self::project(&self.rep.apply(a))
    }

    /// Quotient metric: min over lifts of the torus sup metric.
    pub fn dist(&self, other: &Self) -> Rat {
        let direct = self.rep.dist(&other.rep);
        let crossed = self.rep.dist(&other.rep.antipode());
        direct.min(crossed)
    }

    /// The four spine classes in lexicographic order.
    pub fn spines() -> Vec<SpherePoint> {
        [(0, 1, 0, 1), (0, 1, 1, 2), (1, 2, 0, 1), (1, 2, 1, 2)]
            .iter()
            .map(|&(a, b, c, d)| SpherePoint::project(&TorusPoint::from_i64(a, b, c, d)))
            .collect()
    }

    pub fn parse(text: &str) -> Result<Self> {
        Ok(Self::project(&TorusPoint::parse(text)?))
    }
}

impl fmt::Display for SpherePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.rep)
    }
}

/// Periodic points of the sphere factor at depth `n`, with the 2-to-1
/// fiber certificate over the union of the upstairs solution sets.
#[derive(Debug, Clone)]
pub struct SpherePeriodicSet {
    pub period: u32,
    pub points: Vec<SpherePoint>,
    /// Number of members of the disjoint union `P_n u P_n^-` over each
    /// class; the projection is 2-to-1 exactly when all entries are 2.
    pub fiber_sizes: Vec<usize>,
}

impl SpherePeriodicSet {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn contains(&self, s: &SpherePoint) -> bool {
        self.points.binary_search(s).is_ok()
    }

    pub fn two_to_one(&self) -> bool {
        self.fiber_sizes.iter().all(|&c| c == 2)
    }

    /// CSV rows `n,x_num,x_den,y_num,y_den,spine`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,x_num,x_den,y_num,y_den,spine\n");
        for s in &self.points {
            let p = s.rep();
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                self.period,
                p.x().numer(),
                p.x().denom(),
                p.y().numer(),
                p.y().denom(),
                s.is_spine()
            ));
        }
        out
    }
}

/// `P_n(g_A)` as the projection of `P_n(f_A) u P_n^-(f_A)`, deduplicated
/// exactly; the cardinality must equal `trace(A^n)` and every fiber of the
/// disjoint union must have exactly two members (spines contribute one
/// from each upstairs set).
pub fn sphere_periodic_points(a: &IntMatrix2, n: u32) -> Result<SpherePeriodicSet> {
    let per = toral::periodic_points(a, n)?;
    let anti = toral::antipodal_periodic_points(a, n)?;

    let mut fibers: BTreeMap<SpherePoint, usize> = BTreeMap::new();
    let projected = par::map_range_collect(per.len() + anti.len(), |i| {
        if i < per.len() {
            SpherePoint::project(&per.points[i])
        } else {
            SpherePoint::project(&anti.points[i - per.len()])
        }
    });
    for s in projected {
        *fibers.entry(s).or_insert(0) += 1;
    }

    let expected = a.pow(n).trace();
    if BigInt::from(fibers.len()) != expected {
        return Err(Error::CountMismatch(format!(
            "sphere period-{n} classes: got {}, trace says {expected}",
            fibers.len()
        )));
    }
    let (points, fiber_sizes): (Vec<_>, Vec<_>) = fibers.into_iter().unzip();
    Ok(SpherePeriodicSet {
        period: n,
        points,
        fiber_sizes,
    })
}
