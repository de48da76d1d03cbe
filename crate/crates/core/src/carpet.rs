//! The carpet system: finitely many periodic orbits of the sphere factor
//! blown up into circles of radial directions.
//!
//! A registry fixes which orbits are blown. Points of the resulting
//! system are determined by one coordinate: either an untouched sphere
//! point or a circle datum (orbit, position, direction class). Circle
//! dynamics is the projectivized differential: directions map by the
//! linear action, with a sign twist once per period on orbits whose torus
//! lift is antipodal-periodic. The four periodic direction classes per
//! circle are exactly the stable/unstable rays.
//!
//! The paper's ledger for the blown system counts each contributing orbit
//! as `4 n_k` circle points of period `n_k`; on antipodal-lift orbits the
//! projectivized return map is `-A^{n_k}`, which swaps the rays pairwise
//! and doubles the direction return time to `2 n_k`. [`PeriodMode`] keeps
//! both bookkeepings available without ever mixing them: `BasePeriod` is
//! the default ledger, `DirectionPeriod` counts by the exact direction
//! return time.

use crate::exactlat::{EigenData, IntMatrix2, QuadNumber};
use crate::measures::EmpiricalMeasure;
use crate::rational::Rat;
use crate::sphere::{sphere_periodic_points, SpherePoint};
use crate::toral::TorusPoint;
use crate::{Error, Result};
use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use std::collections::BTreeSet;
use std::fmt;

/// How the torus lift of a sphere orbit closes up.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LiftType {
    /// `f^{n_k}(x) = x` for a lift `x` of the base point.
    Periodic,
    /// `f^{n_k}(x) = -x`; the lift closes only after `2 n_k` steps.
    Antipodal,
}

impl LiftType {
    pub fn as_str(self) -> &'static str {
        match self {
            LiftType::Periodic => "periodic",
            LiftType::Antipodal => "antipodal",
        }
    }
}

/// One blown orbit: a genuine periodic orbit of the sphere factor.
#[derive(Debug, Clone)]
pub struct BlownOrbit {
    pub base: SpherePoint,
    pub period: u32,
    pub points: Vec<SpherePoint>,
    pub lift: LiftType,
}

/// The list of blown orbits defining the carpet system.
#[derive(Debug, Clone)]
pub struct BlowupRegistry {
    pub orbits: Vec<BlownOrbit>,
}

/// Validation outcome per registry condition; the density conditions are
/// not finitely checkable and are reported as sampled coverage only.
#[derive(Debug, Clone)]
pub struct RegistryReport {
    pub no_spines: bool,
    pub distinct_periods: bool,
    pub disjoint: bool,
    pub genuine_orbits: bool,
    pub violations: Vec<String>,
    /// Sampled mesh for "the blown set is dense": max over a reference
    /// grid of the distance to the nearest registry point.
    pub blown_coverage: Option<Rat>,
    /// Sampled mesh for "the complement of the blown set is dense in the
    /// periodic points": same, against a periodic set disjoint from the
    /// registry.
    pub complement_coverage: Option<Rat>,
    pub coverage_note: String,
}

impl RegistryReport {
    pub fn passed(&self) -> bool {
        self.no_spines && self.distinct_periods && self.disjoint && self.genuine_orbits
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "no_spines": self.no_spines,
            "distinct_periods": self.distinct_periods,
            "disjoint": self.disjoint,
            "genuine_orbits": self.genuine_orbits,
            "passed": self.passed(),
            "violations": self.violations,
            "blown_coverage": self.blown_coverage.as_ref().map(crate::rational::format_rat),
            "complement_coverage": self.complement_coverage.as_ref().map(crate::rational::format_rat),
            "coverage_note": self.coverage_note,
        })
    }
}

const ORBIT_PERIOD_BOUND: u32 = 64;

fn orbit_of(a: &IntMatrix2, base: &SpherePoint) -> Result<BlownOrbit> {
    let mut points = vec![base.clone()];
    let mut current = base.apply(a);
    while current != *base {
        if points.len() as u32 >= ORBIT_PERIOD_BOUND {
            return Err(Error::RegistryInvalid(format!(
                "orbit of {base} exceeds the period bound {ORBIT_PERIOD_BOUND}"
            )));
        }
        points.push(current.clone());
        current = current.apply(a);
    }
    let period = points.len() as u32;
    // lift type: iterate the canonical lift upstairs
    let mut lift = base.rep().clone();
    for _ in 0..period {
        lift = lift.apply(a);
    }
    let lift_type = if lift == *base.rep() {
        LiftType::Periodic
    } else if lift == base.rep().antipode() {
        LiftType::Antipodal
    } else {
        return Err(Error::RegistryInvalid(format!(
            "orbit of {base} does not close upstairs; projection bug"
        )));
    };
    Ok(BlownOrbit {
        base: base.clone(),
        period,
        points,
        lift: lift_type,
    })
}

impl BlowupRegistry {
    /// Build and validate a registry from base points. Hard conditions
    /// (no spines, pairwise distinct periods, disjointness, genuine
    /// orbits) reject the registry; the density conditions are sampled
    /// and reported only.
    pub fn build(a: &IntMatrix2, bases: &[SpherePoint]) -> Result<(Self, RegistryReport)> {
        let mut violations = Vec::new();
        let mut orbits = Vec::new();
        for base in bases {
            match orbit_of(a, base) {
                Ok(o) => orbits.push(o),
                Err(e) => violations.push(e.to_string()),
            }
        }

        let mut no_spines = true;
        for o in &orbits {
            if let Some(spine) = o.points.iter().find(|p| p.is_spine()) {
                no_spines = false;
                violations.push(format!(
                    "orbit of {} passes through the spine {spine}",
                    o.base
                ));
            }
        }

        let mut distinct_periods = true;
        let mut seen = BTreeSet::new();
        for o in &orbits {
            if !seen.insert(o.period) {
                distinct_periods = false;
                violations.push(format!("two orbits share the period {}", o.period));
            }
        }

        let mut disjoint = true;
        let mut all_points: BTreeSet<SpherePoint> = BTreeSet::new();
        for o in &orbits {
            for p in &o.points {
                if !all_points.insert(p.clone()) {
                    disjoint = false;
                    violations.push(format!("orbits overlap at {p}"));
                }
            }
        }

        // genuine orbits were verified by construction in orbit_of; a
        // re-check by exact iteration keeps the report self-contained
        let mut genuine_orbits = true;
        for o in &orbits {
            let mut s = o.base.clone();
            for _ in 0..o.period {
                s = s.apply(a);
            }
            if s != o.base {
                genuine_orbits = false;
                violations.push(format!("orbit of {} is not periodic", o.base));
            }
        }

        let registry = Self { orbits };
        let (blown, complement) = registry.coverage_sample(a);
        let report = RegistryReport {
            no_spines,
            distinct_periods,
            disjoint,
            genuine_orbits,
            violations: violations.clone(),
            blown_coverage: blown,
            complement_coverage: complement,
            coverage_note: "density conditions are not finitely verifiable; values are \
                            sampled coverage radii over a 1/16 reference grid"
                .into(),
        };
        if report.passed() {
            Ok((registry, report))
        } else {
            Err(Error::RegistryInvalid(violations.join("; ")))
        }
    }

    /// Coverage radii for the density conditions, sampled on a 1/16 grid:
    /// how far a grid class can be from the registry (condition 2) and
    /// from periodic points outside the registry (condition 3).
    fn coverage_sample(&self, a: &IntMatrix2) -> (Option<Rat>, Option<Rat>) {
        if self.orbits.is_empty() {
            return (None, None);
        }
        let mut grid = Vec::new();
        for i in 0..16i64 {
            for j in 0..16i64 {
                grid.push(SpherePoint::project(&TorusPoint::from_i64(i, 16, j, 16)));
            }
        }
        grid.sort_unstable();
        grid.dedup();

        let registry_points: Vec<&SpherePoint> =
            self.orbits.iter().flat_map(|o| o.points.iter()).collect();
        let blown = grid
            .iter()
            .map(|g| {
                registry_points
                    .iter()
                    .map(|p| g.dist(p))
                    .min()
                    .expect("registry nonempty")
            })
            .max();

        // reference periodic set with a period distinct from every blown
        // orbit, hence disjoint from the registry as a set of least-period
        // orbits need not be -- disjointness is enforced by filtering
        let m = self.orbits.iter().map(|o| o.period).max().unwrap_or(1) + 1;
        let complement = sphere_periodic_points(a, m).ok().and_then(|set| {
            let in_registry: BTreeSet<&SpherePoint> = registry_points.iter().copied().collect();
            let outside: Vec<&SpherePoint> = set
                .points
                .iter()
                .filter(|p| !in_registry.contains(p))
                .collect();
            if outside.is_empty() {
                return None;
            }
            grid.iter()
                .map(|g| outside.iter().map(|p| g.dist(p)).min().unwrap())
                .max()
        });
        (blown, complement)
    }

    /// Orbit index containing the class, if any.
    pub fn orbit_containing(&self, s: &SpherePoint) -> Option<(usize, u32)> {
        for (k, o) in self.orbits.iter().enumerate() {
            if let Some(pos) = o.points.iter().position(|p| p == s) {
                return Some((k, pos as u32));
            }
        }
        None
    }

    /// Registry file: one base point per line, `x_num/x_den y_num/y_den`;
    /// blank lines and `#` comments ignored.
    pub fn parse_bases(text: &str) -> Result<Vec<SpherePoint>> {
        text.lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .map(SpherePoint::parse)
            .collect()
    }

    pub fn to_file_string(&self) -> String {
        let mut out = String::new();
        for o in &self.orbits {
            out.push_str(&format!("{}\n", o.base));
        }
        out
    }
}

/// Exact direction class on a blown circle: a ray in the quadratic
/// field's plane, canonicalized up to positive scaling.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Direction {
    /// Canonical representative: first nonzero coordinate is +-1.
    pub v: [QuadNumber; 2],
}

impl Direction {
    pub fn new(x: QuadNumber, y: QuadNumber) -> Self {
        assert!(
            !(x.is_zero() && y.is_zero()),
            "direction needs a nonzero vector"
        );
        if x.is_zero() {
            let sign = if y.is_positive() { 1 } else { -1 };
            let delta = y.delta().clone();
            Self {
                v: [
                    QuadNumber::zero(delta.clone()),
                    QuadNumber::from_int(sign, delta),
                ],
            }
        } else {
            let scale = x.abs();
            Self {
                v: [&x / &scale, &y / &scale],
            }
        }
    }

    /// Image under the linear map, re-canonicalized.
    pub fn apply(&self, m: &IntMatrix2, negate: bool) -> Self {
        let delta = self.v[0].delta().clone();
        let lift = |n: &BigInt| QuadNumber::from_rat(Rat::from_integer(n.clone()), delta.clone());
        let mut x = &(&lift(&m.a) * &self.v[0]) + &(&lift(&m.b) * &self.v[1]);
        let mut y = &(&lift(&m.c) * &self.v[0]) + &(&lift(&m.d) * &self.v[1]);
        if negate {
            x = -x;
            y = -y;
        }
        Self::new(x, y)
    }

    pub fn antipode(&self) -> Self {
        Self::new(-self.v[0].clone(), -self.v[1].clone())
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}; {}]", self.v[0], self.v[1])
    }
}

/// A point of the carpet system, by its determining coordinate.
#[derive(Debug, Clone, PartialEq, Eq)]
#[allow(clippy::large_enum_variant)] // circle data carries exact field scalars
pub enum CarpetPoint {
    /// A sphere point not on any blown orbit.
    Base(SpherePoint),
    /// A direction on circle `pos` of blown orbit `orbit`.
    Circle {
        orbit: usize,
        pos: u32,
        dir: Direction,
    },
}

/// One step of the carpet dynamics.
pub fn carpet_apply(
    a: &IntMatrix2,
    reg: &BlowupRegistry,
    p: &CarpetPoint,
) -> Result<CarpetPoint> {
    match p {
        CarpetPoint::Base(s) => {
            if reg.orbit_containing(s).is_some() {
                return Err(Error::MalformedCarpetPoint(format!(
                    "{s} lies on a blown orbit; it must be a circle point"
                )));
            }
            Ok(CarpetPoint::Base(s.apply(a)))
        }
        CarpetPoint::Circle { orbit, pos, dir } => {
            let o = reg
                .orbits
                .get(*orbit)
                .ok_or_else(|| Error::MalformedCarpetPoint(format!("orbit index {orbit}")))?;
            if *pos >= o.period {
                return Err(Error::MalformedCarpetPoint(format!(
                    "position {pos} on an orbit of period {}",
                    o.period
                )));
            }
            // the sign twist lands on the wrap step for antipodal lifts,
            // making the full return map -A^{n_k}
            let wrapping = *pos == o.period - 1;
            let negate = wrapping && o.lift == LiftType::Antipodal;
            Ok(CarpetPoint::Circle {
                orbit: *orbit,
                pos: (*pos + 1) % o.period,
                dir: dir.apply(a, negate),
            })
        }
    }
}

/// The four exact periodic direction classes: the stable/unstable rays.
pub fn periodic_directions(a: &IntMatrix2) -> Result<Vec<Direction>> {
    let eig = EigenData::for_matrix(a)?;
    let u = Direction::new(eig.v_u[0].clone(), eig.v_u[1].clone());
    let s = Direction::new(eig.v_s[0].clone(), eig.v_s[1].clone());
    Ok(vec![u.clone(), u.antipode(), s.clone(), s.antipode()])
}

/// Which period the circle points are booked under.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PeriodMode {
    /// The ledger's accounting: every contributing orbit adds `4 n_k`
    /// circle points of period `n_k`.
    BasePeriod,
    /// Count by the exact direction return time: `n_k` on periodic-lift
    /// orbits, `2 n_k` on antipodal-lift orbits (the `-A^{n_k}` return
    /// map swaps the rays pairwise).
    DirectionPeriod,
}

impl PeriodMode {
    pub fn as_str(self) -> &'static str {
        match self {
            PeriodMode::BasePeriod => "base-period",
            PeriodMode::DirectionPeriod => "direction-period",
        }
    }
}

#[derive(Debug, Clone)]
pub struct OrbitContribution {
    pub orbit_index: usize,
    pub period: u32,
    pub lift: LiftType,
    /// Base points of this orbit removed from the sphere count (they are
    /// circles now): `n_k` when `n_k | n`, else 0.
    pub removed: u32,
    /// Circle points of period dividing `n` added back.
    pub added: u32,
}

/// The carpet periodic-point ledger at depth `n`.
#[derive(Debug, Clone)]
pub struct CarpetCount {
    pub n: u32,
    pub mode: PeriodMode,
    /// `Per_n` of the sphere factor, `trace(A^n)`.
    pub sphere_count: BigInt,
    pub carpet_count: BigInt,
    pub contributions: Vec<OrbitContribution>,
    /// `|carpet - sphere| <= 4 n^2`, exact.
    pub difference_bound_ok: bool,
    /// `carpet >= sphere >= lambda^n`, exact in the quadratic field
    /// (asserted in base-period mode; in direction-period mode the first
    /// inequality can genuinely fail and is reported as found).
    pub lower_bound_ok: bool,
}

impl CarpetCount {
    pub fn csv_row(&self) -> String {
        let detail: Vec<String> = self
            .contributions
            .iter()
            .map(|c| {
                format!(
                    "k{}:p{}:{}:-{}+{}",
                    c.orbit_index,
                    c.period,
                    c.lift.as_str(),
                    c.removed,
                    c.added
                )
            })
            .collect();
        format!(
            "{},{},{},{},{},{}",
            self.n,
            self.sphere_count,
            self.carpet_count,
            self.difference_bound_ok,
            self.lower_bound_ok,
            detail.join(";")
        )
    }
}

pub fn carpet_periodic_count(
    a: &IntMatrix2,
    reg: &BlowupRegistry,
    n: u32,
    mode: PeriodMode,
) -> Result<CarpetCount> {
    assert!(n >= 1);
    a.require_hyperbolic_positive()?;
    let sphere_count = a.pow(n).trace();
    let mut carpet_count = sphere_count.clone();
    let mut contributions = Vec::new();
    for (k, o) in reg.orbits.iter().enumerate() {
        let divides = n.is_multiple_of(o.period);
        let removed = if divides { o.period } else { 0 };
        let added = match (mode, o.lift) {
            (PeriodMode::BasePeriod, _) => {
                if divides {
                    4 * o.period
                } else {
                    0
                }
            }
            (PeriodMode::DirectionPeriod, LiftType::Periodic) => {
                if divides {
                    4 * o.period
                } else {
                    0
                }
            }
            (PeriodMode::DirectionPeriod, LiftType::Antipodal) => {
                if n.is_multiple_of(2 * o.period) {
                    4 * o.period
                } else {
                    0
                }
            }
        };
        carpet_count = carpet_count - BigInt::from(removed) + BigInt::from(added);
        contributions.push(OrbitContribution {
            orbit_index: k,
            period: o.period,
            lift: o.lift,
            removed,
            added,
        });
    }

    let diff = (&carpet_count - &sphere_count).abs();
    let difference_bound_ok = diff <= BigInt::from(4u64) * BigInt::from(n) * BigInt::from(n);

    let eig = EigenData::for_matrix(a)?;
    let lambda_n = eig.lambda.pow(n as i64);
    let carpet_q = QuadNumber::from_rat(Rat::from_integer(carpet_count.clone()), eig.delta.clone());
    let sphere_q = QuadNumber::from_rat(Rat::from_integer(sphere_count.clone()), eig.delta.clone());
    let lower_bound_ok =
        carpet_count >= sphere_count && sphere_q >= lambda_n && carpet_q >= lambda_n;

    Ok(CarpetCount {
        n,
        mode,
        sphere_count,
        carpet_count,
        contributions,
        difference_bound_ok,
        lower_bound_ok,
    })
}

/// The projected carpet periodic measure: base periodic points keep
/// weight `1/Per_n(G)`, each contributing blown orbit carries the four
/// collapsed circle weights `4/Per_n(G)` at each of its base locations.
/// Returns the measure and the exact circle-supported mass fraction.
pub fn carpet_periodic_measure(
    a: &IntMatrix2,
    reg: &BlowupRegistry,
    n: u32,
    mode: PeriodMode,
) -> Result<(EmpiricalMeasure, Rat)> {
    let count = carpet_periodic_count(a, reg, n, mode)?;
    let sphere_set = sphere_periodic_points(a, n)?;
    let total = Rat::from_integer(count.carpet_count.clone());
    let mut atoms = Vec::with_capacity(sphere_set.len());
    let mut circle_mass = Rat::zero();
    for p in sphere_set.points {
        match reg.orbit_containing(&p) {
            Some((k, _)) => {
                let added = count.contributions[k].added;
                if added > 0 {
                    // 4 circle points collapse onto this base location
                    let w = Rat::from_integer(BigInt::from(4)) / &total;
                    circle_mass += &w;
                    atoms.push((p, w));
                }
                // non-contributing blown orbits carry no carpet periodic
                // points at this depth; the class is dropped entirely
            }
            None => {
                atoms.push((p, Rat::from_integer(BigInt::from(1)) / &total));
            }
        }
    }
    let measure = EmpiricalMeasure::from_sphere_atoms(atoms);
    Ok((measure, circle_mass))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;
    use crate::Space;
    use num_traits::One;

    fn cat() -> IntMatrix2 {
        IntMatrix2::cat_map()
    }

    /// Registry with sphere periods {1, 2}: the antipodal fixed class and
    /// a period-2 class on the 1/3 lattice; both have antipodal lifts.
    fn registry_12() -> BlowupRegistry {
        let bases = [
            SpherePoint::project(&TorusPoint::from_i64(2, 5, 4, 5)),
            SpherePoint::project(&TorusPoint::from_i64(1, 3, 1, 3)),
        ];
        let (reg, report) = BlowupRegistry::build(&cat(), &bases).unwrap();
        assert!(report.passed());
        reg
    }

    /// Registry with sphere periods {3, 4}; the period-3 orbit has a
    /// periodic lift (it sits inside P_3(f)).
    fn registry_34() -> BlowupRegistry {
        let bases = [
            SpherePoint::project(&TorusPoint::from_i64(1, 4, 0, 1)),
            first_class_of_least_period(4),
        ];
        let (reg, report) = BlowupRegistry::build(&cat(), &bases).unwrap();
        assert!(report.passed());
        reg
    }

    fn first_class_of_least_period(n: u32) -> SpherePoint {
        let set = sphere_periodic_points(&cat(), n).unwrap();
        set.points
            .iter()
            .find(|s| {
                !s.is_spine() && {
                    let mut t = (*s).clone();
                    let mut least = 0;
                    for m in 1..=n {
                        t = t.apply(&cat());
                        if t == **s {
                            least = m;
                            break;
                        }
                    }
                    least == n
                }
            })
            .expect("class of full least period exists")
            .clone()
    }

    #[test]
    fn registry_periods_and_lifts() {
        let reg = registry_12();
        assert_eq!(reg.orbits[0].period, 1);
        assert_eq!(reg.orbits[0].lift, LiftType::Antipodal);
        assert_eq!(reg.orbits[1].period, 2);
        assert_eq!(reg.orbits[1].lift, LiftType::Antipodal);

        let reg = registry_34();
        assert_eq!(reg.orbits[0].period, 3);
        assert_eq!(reg.orbits[0].lift, LiftType::Periodic);
        assert_eq!(reg.orbits[1].period, 4);
    }

    #[test]
    fn registry_rejections() {
        // a spine is rejected
        let spine = SpherePoint::project(&TorusPoint::origin());
        assert!(BlowupRegistry::build(&cat(), &[spine]).is_err());
        // equal periods are rejected: two distinct period-2 classes
        let b1 = SpherePoint::project(&TorusPoint::from_i64(1, 3, 1, 3));
        let b2 = SpherePoint::project(&TorusPoint::from_i64(1, 3, 0, 1));
        let err = BlowupRegistry::build(&cat(), &[b1, b2]);
        assert!(matches!(err, Err(Error::RegistryInvalid(_))));
        // the same orbit twice is rejected for overlap as well
        let c1 = SpherePoint::project(&TorusPoint::from_i64(2, 5, 4, 5));
        let c2 = SpherePoint::project(&TorusPoint::from_i64(1, 5, 2, 5));
        let err = BlowupRegistry::build(&cat(), &[c1, c2]);
        assert!(err.is_err());
    }

    #[test]
    fn accepted_registry_reports_coverage() {
        let bases = [
            SpherePoint::project(&TorusPoint::from_i64(2, 5, 4, 5)),
            SpherePoint::project(&TorusPoint::from_i64(1, 3, 1, 3)),
        ];
        let (_, report) = BlowupRegistry::build(&cat(), &bases).unwrap();
        assert!(report.passed());
        assert!(report.blown_coverage.is_some());
        assert!(report.complement_coverage.is_some());
        let json = report.to_json();
        assert_eq!(json["passed"], serde_json::json!(true));
    }

    #[test]
    fn carpet_dynamics_on_base_points() {
        let reg = registry_12();
        let a = cat();
        // spine classes are never blown, so they stay base points
        let spine = SpherePoint::project(&TorusPoint::origin());
        let image = carpet_apply(&a, &reg, &CarpetPoint::Base(spine.clone())).unwrap();
        assert_eq!(image, CarpetPoint::Base(spine));
        // base points on a blown orbit are malformed
        let blown = CarpetPoint::Base(reg.orbits[0].base.clone());
        assert!(carpet_apply(&a, &reg, &blown).is_err());
    }

    #[test]
    fn unstable_direction_returns_after_period() {
        let a = cat();
        let eig = EigenData::for_matrix(&a).unwrap();
        let reg = registry_34();
        // periodic lift: v_u returns after n_k steps
        let start = CarpetPoint::Circle {
            orbit: 0,
            pos: 0,
            dir: Direction::new(eig.v_u[0].clone(), eig.v_u[1].clone()),
        };
        let mut p = start.clone();
        for _ in 0..3 {
            p = carpet_apply(&a, &reg, &p).unwrap();
        }
        assert_eq!(p, start, "A fixes the unstable ray");

        // antipodal lift: v_u needs 2 n_k steps; after n_k it is reversed
        let reg = registry_12();
        let start = CarpetPoint::Circle {
            orbit: 1,
            pos: 0,
            dir: Direction::new(eig.v_u[0].clone(), eig.v_u[1].clone()),
        };
        let mut p = start.clone();
        for _ in 0..2 {
            p = carpet_apply(&a, &reg, &p).unwrap();
        }
        match (&p, &start) {
            (
                CarpetPoint::Circle { dir: d, pos: 0, .. },
                CarpetPoint::Circle { dir: d0, .. },
            ) => assert_eq!(*d, d0.antipode(), "-A^2 reverses the ray"),
            _ => panic!("wrong shape"),
        }
        for _ in 0..2 {
            p = carpet_apply(&a, &reg, &p).unwrap();
        }
        assert_eq!(p, start, "direction period doubles on antipodal lifts");
    }

    #[test]
    fn exactly_four_periodic_directions() {
        let a = cat();
        let dirs = periodic_directions(&a).unwrap();
        assert_eq!(dirs.len(), 4);
        // each is fixed as a ray by the plain linear action
        for d in &dirs {
            assert_eq!(d.apply(&a, false), *d);
        }
        // and they are pairwise distinct
        for i in 0..4 {
            for j in (i + 1)..4 {
                assert_ne!(dirs[i], dirs[j]);
            }
        }
    }

    #[test]
    fn empty_registry_count_is_the_sphere_count() {
        let a = cat();
        let reg = BlowupRegistry { orbits: vec![] };
        for n in 1..=6u32 {
            let c = carpet_periodic_count(&a, &reg, n, PeriodMode::BasePeriod).unwrap();
            assert_eq!(c.carpet_count, a.pow(n).trace());
        }
    }

    #[test]
    fn ledger_formula_examples() {
        let a = cat();
        // periods {1,2}, n = 2: trace(A^2) + 3 (1 + 2) = 7 + 9 = 16
        let reg = registry_12();
        let c = carpet_periodic_count(&a, &reg, 2, PeriodMode::BasePeriod).unwrap();
        assert_eq!(c.carpet_count, BigInt::from(16));
        assert!(c.difference_bound_ok && c.lower_bound_ok);
        // periods {3,4}, n = 12: 103682 + 3 (3 + 4) = 103703
        let reg = registry_34();
        let c = carpet_periodic_count(&a, &reg, 12, PeriodMode::BasePeriod).unwrap();
        assert_eq!(c.carpet_count, BigInt::from(103703));
        assert!(c.difference_bound_ok && c.lower_bound_ok);
    }

    #[test]
    fn direction_mode_skips_unclosed_antipodal_orbits() {
        let a = cat();
        let reg = registry_12();
        // n = 1: the period-1 antipodal orbit contributes nothing, and its
        // base point is gone: 3 - 1 = 2
        let c = carpet_periodic_count(&a, &reg, 1, PeriodMode::DirectionPeriod).unwrap();
        assert_eq!(c.carpet_count, BigInt::from(2));
        // n = 2: orbit 1 (period 1, antipodal) now closes at 2 and
        // contributes 4; orbit 2 (period 2, antipodal) does not: 7 - 1 - 2 + 4 = 8
        let c = carpet_periodic_count(&a, &reg, 2, PeriodMode::DirectionPeriod).unwrap();
        assert_eq!(c.carpet_count, BigInt::from(8));
        // n = 4: both close: 47 - 1 - 2 + 4 + 8 = 56
        let c = carpet_periodic_count(&a, &reg, 4, PeriodMode::DirectionPeriod).unwrap();
        assert_eq!(c.carpet_count, BigInt::from(56));
    }

    #[test]
    fn measure_weights_and_circle_fraction() {
        let a = cat();
        let reg = registry_12();
        for n in 1..=8u32 {
            let (measure, circle_mass) =
                carpet_periodic_measure(&a, &reg, n, PeriodMode::BasePeriod).unwrap();
            assert!(measure.total_mass().is_one(), "mass at n = {n}");
            // circle fraction is bounded by 4 n^2 / trace(A^n)
            let bound = rat(4 * (n as i64) * (n as i64), 1)
                / Rat::from_integer(a.pow(n).trace());
            assert!(circle_mass <= bound, "fraction at n = {n}");
        }
        // at n = 10 with registry periods {3, 4} nothing divides: fraction 0
        let reg34 = registry_34();
        let (_, circle_mass) =
            carpet_periodic_measure(&a, &reg34, 10, PeriodMode::BasePeriod).unwrap();
        assert!(circle_mass.is_zero());
    }

    #[test]
    fn empty_registry_measure_matches_sphere_measure() {
        let a = cat();
        let reg = BlowupRegistry { orbits: vec![] };
        let (measure, circle) =
            carpet_periodic_measure(&a, &reg, 3, PeriodMode::BasePeriod).unwrap();
        assert!(circle.is_zero());
        let plain = EmpiricalMeasure::periodic(&a, 3, Space::Sphere, false).unwrap();
        assert_eq!(measure.to_csv(), plain.to_csv());
    }

    #[test]
    fn ledger_growth_rate_is_unchanged() {
        // the circle corrections are polynomial, so the exponential rate
        // of the carpet counts is still log(lambda)
        let a = cat();
        let reg = registry_34();
        let log_lambda = ((3.0 + 5.0f64.sqrt()) / 2.0).ln();
        let c = carpet_periodic_count(&a, &reg, 20, PeriodMode::BasePeriod).unwrap();
        let rate = c.carpet_count.to_string().parse::<f64>().unwrap().ln() / 20.0;
        assert!((rate - log_lambda).abs() < 2e-4, "rate {rate}");
    }

    #[test]
    fn registry_file_roundtrip() {
        let reg = registry_34();
        let text = reg.to_file_string();
        let bases = BlowupRegistry::parse_bases(&text).unwrap();
        let (reg2, _) = BlowupRegistry::build(&cat(), &bases).unwrap();
        assert_eq!(reg.orbits.len(), reg2.orbits.len());
        for (a, b) in reg.orbits.iter().zip(&reg2.orbits) {
            assert_eq!(a.base, b.base);
            assert_eq!(a.period, b.period);
        }
        let with_comments = format!("# registry\n\n{text}");
        assert_eq!(
            BlowupRegistry::parse_bases(&with_comments).unwrap().len(),
            2
        );
    }
}
