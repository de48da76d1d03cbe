//! Periodic pseudo-orbits and the exact spectral shadowing solver.
//!
//! For the linear model the shadowing point can be written down in closed
//! form: lift the jump errors to their minimal representatives, split them
//! along the stable/unstable eigendirections, and solve the periodic
//! correction recurrence `w_{i+1} = A w_i - e_i` by geometric series — the
//! unstable component summed forward with weights `lambda^{-(k+1)}`, the
//! stable component backward with weights `lambda^{-k}`, both wrapped by
//! the finite-sum factor `1/(1 - lambda^{-N})`. Everything stays in the
//! quadratic field, so `f^N(z0) = z0` is verified as an identity, and the
//! achieved shadowing distance obeys
//! `epsilon <= C * delta` with the published constant
//! `C = kappa * (1/(lambda-1) + 1/(1-lambda^{-1}))`.
//!
//! On the sphere the pseudo-orbit is lifted jump-by-jump (unambiguous when
//! `delta < 1/4`); lifts either close up periodically or antipodally, and
//! in the second case the doubled lift is solved and projected back.
//!
//! Orbit-segment gluing (`connect_segments`) intersects the unstable line
//! of the outgoing endpoint with the pulled-back stable line of the
//! incoming one over a bounded lattice search, and the specification
//! constructor chains those connections into one periodic pseudo-orbit.

use crate::exactlat::{EigenData, IntMatrix2, QuadNumber};
use crate::rational::Rat;
use crate::sphere::SpherePoint;
use crate::toral::TorusPoint;
use crate::{Error, Result, Space};
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::fmt;

/// Point of the torus with coordinates in a fixed quadratic field,
/// canonicalized into `[0,1)^2`. Shadowing points are generically
/// irrational, so they live here rather than in [`TorusPoint`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuadPoint {
    pub x: QuadNumber,
    pub y: QuadNumber,
}

impl QuadPoint {
    pub fn new(x: QuadNumber, y: QuadNumber) -> Self {
        Self {
            x: x.mod1(),
            y: y.mod1(),
        }
    }

    pub fn from_torus(p: &TorusPoint, delta: &BigInt) -> Self {
        Self {
            x: QuadNumber::from_rat(p.x().clone(), delta.clone()),
            y: QuadNumber::from_rat(p.y().clone(), delta.clone()),
        }
    }

    pub fn to_torus(&self) -> Option<TorusPoint> {
        match (self.x.to_rat(), self.y.to_rat()) {
            (Some(x), Some(y)) => Some(TorusPoint::new(x, y)),
            _ => None,
        }
    }

    pub fn apply(&self, a: &IntMatrix2) -> Self {
        let delta = self.x.delta().clone();
        let lift = |n: &BigInt| QuadNumber::from_rat(Rat::from_integer(n.clone()), delta.clone());
        Self::new(
            &(&lift(&a.a) * &self.x) + &(&lift(&a.b) * &self.y),
            &(&lift(&a.c) * &self.x) + &(&lift(&a.d) * &self.y),
        )
    }

    pub fn antipode(&self) -> Self {
        Self::new(-self.x.clone(), -self.y.clone())
    }

    /// Sup circle metric, exact in the quadratic field.
    pub fn dist(&self, other: &Self) -> QuadNumber {
        let dx = (&self.x - &other.x).circle_norm();
        let dy = (&self.y - &other.y).circle_norm();
        if dx >= dy {
            dx
        } else {
            dy
        }
    }

    pub fn dist_to_torus(&self, p: &TorusPoint) -> QuadNumber {
        self.dist(&Self::from_torus(p, self.x.delta()))
    }

    /// Quotient metric against a sphere class.
    pub fn sphere_dist(&self, s: &SpherePoint) -> QuadNumber {
        let direct = self.dist_to_torus(s.rep());
        let crossed = self.dist_to_torus(&s.rep().antipode());
        if direct <= crossed {
            direct
        } else {
            crossed
        }
    }

    /// Canonical representative of the antipodal class of this point
    /// (lexicographic minimum of the pair, exact comparison).
    pub fn sphere_rep(&self) -> Self {
        let anti = self.antipode();
        let smaller = match self.x.cmp(&anti.x) {
            std::cmp::Ordering::Less => true,
            std::cmp::Ordering::Greater => false,
            std::cmp::Ordering::Equal => self.y <= anti.y,
        };
        if smaller {
            self.clone()
        } else {
            anti
        }
    }
}

impl fmt::Display for QuadPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

/// A finite pseudo-orbit on the torus or the sphere.
#[derive(Debug, Clone)]
pub enum OrbitPoints {
    Torus(Vec<TorusPoint>),
    Sphere(Vec<SpherePoint>),
}

#[derive(Debug, Clone)]
pub struct PseudoOrbit {
    pub points: OrbitPoints,
    /// Whether the sequence is meant to close up (`x_N = x_0` as a jump).
    pub periodic: bool,
    /// Set when a requested periodic closure could not be met.
    pub diagnostic: Option<String>,
}

impl PseudoOrbit {
    pub fn space(&self) -> Space {
        match self.points {
            OrbitPoints::Torus(_) => Space::Torus,
            OrbitPoints::Sphere(_) => Space::Sphere,
        }
    }

    pub fn len(&self) -> usize {
        match &self.points {
            OrbitPoints::Torus(v) => v.len(),
            OrbitPoints::Sphere(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Jump error `d(f(x_i), x_{i+1})`, indices mod N when periodic.
    /// For the last index of a non-periodic orbit there is no jump.
    pub fn jump_error(&self, a: &IntMatrix2, i: usize) -> Option<Rat> {
        let n = self.len();
        let next = if i + 1 < n {
            i + 1
        } else if self.periodic {
            0
        } else {
            return None;
        };
        Some(match &self.points {
            OrbitPoints::Torus(v) => v[i].apply(a).dist(&v[next]),
            OrbitPoints::Sphere(v) => v[i].apply(a).dist(&v[next]),
        })
    }

    /// `delta = max_i d(f(x_i), x_{i+1})`, the pseudo-orbit quality.
    pub fn delta(&self, a: &IntMatrix2) -> Rat {
        let mut worst = Rat::zero();
        for i in 0..self.len() {
            if let Some(j) = self.jump_error(a, i) {
                if j > worst {
                    worst = j;
                }
            }
        }
        worst
    }

    /// Text format: header `space N periodic|nonperiodic`, then one point
    /// per line in `p/q r/s` form.
    pub fn to_file_string(&self) -> String {
        let mut out = format!(
            "{} {} {}\n",
            self.space().as_str(),
            self.len(),
            if self.periodic { "periodic" } else { "nonperiodic" }
        );
        match &self.points {
            OrbitPoints::Torus(v) => {
                for p in v {
                    out.push_str(&format!("{p}\n"));
                }
            }
            OrbitPoints::Sphere(v) => {
                for s in v {
                    out.push_str(&format!("{s}\n"));
                }
            }
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("empty pseudo-orbit file".into()))?;
        let parts: Vec<&str> = header.split_whitespace().collect();
        if parts.len() != 3 {
            return Err(Error::Parse(format!(
                "pseudo-orbit header must be `space N periodic|nonperiodic`, got {header:?}"
            )));
        }
        let space = Space::parse(parts[0])?;
        let n: usize = parts[1]
            .parse()
            .map_err(|e| Error::Parse(format!("bad length {:?}: {e}", parts[1])))?;
        let periodic = match parts[2] {
            "periodic" => true,
            "nonperiodic" => false,
            other => return Err(Error::Parse(format!("bad periodicity flag {other:?}"))),
        };
        let body: Vec<&str> = lines.collect();
        if body.len() != n {
            return Err(Error::Parse(format!(
                "header says {n} points, file has {}",
                body.len()
            )));
        }
        let points = match space {
            Space::Torus => OrbitPoints::Torus(
                body.iter()
                    .map(|l| TorusPoint::parse(l))
                    .collect::<Result<_>>()?,
            ),
            Space::Sphere => OrbitPoints::Sphere(
                body.iter()
                    .map(|l| SpherePoint::parse(l))
                    .collect::<Result<_>>()?,
            ),
        };
        Ok(Self {
            points,
            periodic,
            diagnostic: None,
        })
    }
}

/// Seeded rational noise in `[-scale, scale]` on a fixed denominator grid,
/// so that long orbits keep a common denominator.
fn noise_component(rng: &mut ChaCha8Rng, scale: &Rat) -> Rat {
    const GRID: i64 = 1 << 16;
    let j = rng.random_range(-GRID..=GRID);
    scale * Rat::new(BigInt::from(j), BigInt::from(GRID))
}

/// Build a pseudo-orbit from `x0` with per-step noise at most `noise`.
///
/// When `x0` is exactly `n`-periodic the orbit is generated as the true
/// orbit plus bounded wobble, which both respects the per-step noise bound
/// and closes up periodically. Otherwise a forward noisy orbit is
/// generated and the closure jump is checked against `noise`; if it fails
/// the orbit is returned non-periodic with a diagnostic.
pub fn make_pseudo_orbit(
    a: &IntMatrix2,
    x0: &TorusPoint,
    n: usize,
    noise: &Rat,
    seed: u64,
) -> PseudoOrbit {
    assert!(n >= 1, "pseudo-orbit length must be positive");
    assert!(!noise.is_negative(), "noise must be nonnegative");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut fn_x0 = x0.clone();
    for _ in 0..n {
        fn_x0 = fn_x0.apply(a);
    }
    if fn_x0 == *x0 {
        // true periodic orbit plus wobble; the per-step jump of the result
        // is eta_{i+1} - A eta_i, so scale down by 1 + |A|
        let op_norm = Rat::from_integer(a.sup_operator_norm()) + Rat::one();
        let scale = noise / op_norm;
        let mut points = Vec::with_capacity(n);
        let mut base = x0.clone();
        for i in 0..n {
            let (dx, dy) = (
                noise_component(&mut rng, &scale),
                noise_component(&mut rng, &scale),
            );
            // keep the anchor point exact so the orbit visibly starts at x0
            if i == 0 {
                points.push(base.clone());
            } else {
                points.push(base.translate(&dx, &dy));
            }
            base = base.apply(a);
        }
        return PseudoOrbit {
            points: OrbitPoints::Torus(points),
            periodic: true,
            diagnostic: None,
        };
    }

    // forward noisy walk
    let mut points = Vec::with_capacity(n);
    let mut current = x0.clone();
    for i in 0..n {
        points.push(current.clone());
        if i + 1 < n {
            let (dx, dy) = (
                noise_component(&mut rng, noise),
                noise_component(&mut rng, noise),
            );
            current = current.apply(a).translate(&dx, &dy);
        }
    }
    let closure = points[n - 1].apply(a).dist(&points[0]);
    let periodic = closure <= *noise;
    let diagnostic = (!periodic).then(|| {
        format!(
            "closure impossible within noise: final jump {} exceeds {}",
            closure, noise
        )
    });
    PseudoOrbit {
        points: OrbitPoints::Torus(points),
        periodic,
        diagnostic,
    }
}

/// A seeded exactly-`n`-periodic starting point: a nonzero Smith coset
/// member of the kernel of `A^n - I`, chosen by the seed. The coset
/// moduli grow like `lambda^{n/2}`, so they are sampled as big integers.
pub fn seeded_periodic_point(a: &IntMatrix2, n: u32, seed: u64) -> Result<TorusPoint> {
    let snf = crate::exactlat::smith_normal_form(&a.pow(n).sub(&IntMatrix2::identity()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut below = |bound: &BigInt, nonzero: bool| -> BigInt {
        if *bound <= BigInt::from(1) {
            return BigInt::zero();
        }
        // assemble enough random 64-bit limbs and reduce; the tiny
        // modular bias is irrelevant for test-input generation
        let limbs = (bound.bits() as usize).div_ceil(64) + 1;
        let mut v = BigInt::zero();
        for _ in 0..limbs {
            v = (v << 64) + BigInt::from(rng.random::<u64>());
        }
        let r = v % bound;
        if nonzero && r.is_zero() {
            BigInt::one()
        } else {
            r
        }
    };
    let k1 = below(&snf.d1, false);
    let k2 = below(&snf.d2, true);
    let (x, y) = snf.v.apply_vec(
        &Rat::new(k1, snf.d1.clone()),
        &Rat::new(k2, snf.d2.clone()),
    );
    Ok(TorusPoint::new(x, y))
}

/// Sphere variant of [`make_pseudo_orbit`] around a class `s0` with
/// `g^n(s0) = s0`: the wobbled true sphere orbit.
pub fn make_sphere_pseudo_orbit(
    a: &IntMatrix2,
    s0: &SpherePoint,
    n: usize,
    noise: &Rat,
    seed: u64,
) -> Result<PseudoOrbit> {
    assert!(n >= 1);
    let mut gn = s0.clone();
    for _ in 0..n {
        gn = gn.apply(a);
    }
    if gn != *s0 {
        return Err(Error::NotPeriodic(format!(
            "class {s0} is not {n}-periodic on the sphere"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let op_norm = Rat::from_integer(a.sup_operator_norm()) + Rat::one();
    let scale = noise / op_norm;
    let mut points = Vec::with_capacity(n);
    let mut base = s0.rep().clone();
    for i in 0..n {
        let (dx, dy) = (
            noise_component(&mut rng, &scale),
            noise_component(&mut rng, &scale),
        );
        let wobbled = if i == 0 {
            base.clone()
        } else {
            base.translate(&dx, &dy)
        };
        points.push(SpherePoint::project(&wobbled));
        base = base.apply(a);
    }
    Ok(PseudoOrbit {
        points: OrbitPoints::Sphere(points),
        periodic: true,
        diagnostic: None,
    })
}

/// Arithmetic mode of the solver. `Exact` certifies `f^N(z0) = z0` as a
/// field identity; `HighPrec` rounds the correction series to dyadic
/// rationals of the given precision and reports the exact residual of the
/// rounded point instead.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ArithmeticMode {
    #[default]
    Exact,
    HighPrec { bits: u32 },
}

/// Output of the periodic shadowing solver.
#[derive(Debug, Clone)]
pub struct ShadowResult {
    pub z0: QuadPoint,
    /// Length of the solved pseudo-orbit; `f^period(z0) = z0`.
    pub period: usize,
    /// Max over the certificate, i.e. the achieved shadowing distance.
    pub epsilon: QuadNumber,
    /// Per-index exact distances `d(f^k(z0), x_k)`.
    pub certificate: Vec<QuadNumber>,
    /// Measured pseudo-orbit quality.
    pub delta: Rat,
    /// Published bound constant `C`; `epsilon <= C * delta` is guaranteed.
    pub constant: QuadNumber,
    /// Whether `f^period(z0) = z0` holds identically (always in exact
    /// mode; in high-precision mode see `residual`).
    pub exact_periodic: bool,
    /// Exact residual `d(f^period(z0), z0)` of the rounded solution
    /// (high-precision mode only).
    pub residual: Option<Rat>,
    /// Set when `C * delta` is too large for the bound to mean anything.
    pub warning: Option<String>,
    /// Sphere runs: the torus lift closed antipodally and was solved at
    /// doubled length before projecting back.
    pub lift_doubled: bool,
}

impl ShadowResult {
    /// JSON document with `z0`, `epsilon`, `period`, `certificate`; exact
    /// values ride along as strings.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "z0": {
                "x": { "decimal": self.z0.x.decimal_string(30), "exact": self.z0.x.to_string() },
                "y": { "decimal": self.z0.y.decimal_string(30), "exact": self.z0.y.to_string() },
            },
            "epsilon": self.epsilon.decimal_string(30),
            "period": self.period,
            "certificate": self.certificate.iter().map(|c| c.decimal_string(30)).collect::<Vec<_>>(),
            "delta": crate::rational::format_rat(&self.delta),
            "constant": self.constant.decimal_string(12),
            "exact_periodic": self.exact_periodic,
            "residual": self.residual.as_ref().map(crate::rational::format_rat),
            "warning": self.warning,
            "lift_doubled": self.lift_doubled,
        })
    }
}

/// Core periodic solve over quadratic-field points. `points` is the
/// pseudo-orbit (rational points embed losslessly); the result shadows it
/// with the closed-form correction.
pub fn shadow_periodic_quad(
    a: &IntMatrix2,
    points: &[QuadPoint],
    mode: ArithmeticMode,
) -> Result<ShadowResult> {
    let n = points.len();
    if n == 0 {
        return Err(Error::NotPeriodic("empty pseudo-orbit".into()));
    }
    let eig = EigenData::for_matrix(a)?;
    let delta_disc = eig.delta.clone();
    let half = QuadNumber::from_rat(Rat::new(BigInt::one(), BigInt::from(2)), delta_disc.clone());

    // minimal-representative jump errors e_i = lift(x_{i+1} - A x_i),
    // each component in (-1/2, 1/2]
    let mut e_u = Vec::with_capacity(n);
    let mut e_s = Vec::with_capacity(n);
    let mut delta_measured = QuadNumber::zero(delta_disc.clone());
    for i in 0..n {
        let image = points[i].apply(a);
        let next = &points[(i + 1) % n];
        let lift_coord = |u: &QuadNumber| -> QuadNumber {
            let f = u.mod1();
            if f > half {
                &f - &QuadNumber::one(delta_disc.clone())
            } else {
                f
            }
        };
        let ex = lift_coord(&(&next.x - &image.x));
        let ey = lift_coord(&(&next.y - &image.y));
        let sup = if ex.abs() >= ey.abs() {
            ex.abs()
        } else {
            ey.abs()
        };
        if sup > delta_measured {
            delta_measured = sup;
        }
        let (cu, cs) = eig.decompose_quad(&ex, &ey);
        e_u.push(cu);
        e_s.push(cs);
    }

    // unstable: w_0^u = (sum_{k=0}^{N-1} lambda^{-(k+1)} e_k^u) / (1 - lambda^{-N})
    // stable:   w_0^s = -(sum_{k=1}^{N} lambda^{-(k-1)} e_{N-k}^s) / (1 - lambda^{-N})
    // evaluated by Horner in lambda^{-1}
    let li = &eig.lambda_inv;
    let mut sum_u = QuadNumber::zero(delta_disc.clone());
    for k in (0..n).rev() {
        sum_u = &(&sum_u * li) + &e_u[k];
    }
    sum_u = &sum_u * li; // every term carries at least one lambda^{-1}
    let mut sum_s = QuadNumber::zero(delta_disc.clone());
    for k in (1..=n).rev() {
        // Horner from k = N down to 1; term for k has weight lambda^{-(k-1)}
        sum_s = &(&sum_s * li) + &e_s[n - k];
    }
    let one = QuadNumber::one(delta_disc.clone());
    let wrap = &one - &li.pow(n as i64);
    let w0_u = &sum_u / &wrap;
    let w0_s = &(-&sum_s) / &wrap;

    let correction = eig.compose(&w0_u, &w0_s);

    let (z0, residual) = match mode {
        ArithmeticMode::Exact => (
            QuadPoint::new(&points[0].x + &correction[0], &points[0].y + &correction[1]),
            None,
        ),
        ArithmeticMode::HighPrec { bits } => {
            // round the irrational correction onto the dyadic grid; the
            // rounded point is rational, so its defect is an exact number
            let zx = (&points[0].x + &correction[0]).round_to_bits(bits);
            let zy = (&points[0].y + &correction[1]).round_to_bits(bits);
            let z = QuadPoint::new(
                QuadNumber::from_rat(zx, delta_disc.clone()),
                QuadNumber::from_rat(zy, delta_disc.clone()),
            );
            let mut iter = z.clone();
            for _ in 0..n {
                iter = iter.apply(a);
            }
            let res = iter.dist(&z).to_rat().expect("rational orbit");
            (z, Some(res))
        }
    };

    // certificate by exact iteration; also verifies periodicity
    let mut certificate = Vec::with_capacity(n);
    let mut iter = z0.clone();
    for point in points.iter() {
        certificate.push(iter.dist(point));
        iter = iter.apply(a);
    }
    let exact_periodic = iter == z0;
    if matches!(mode, ArithmeticMode::Exact) {
        debug_assert!(exact_periodic, "closed-form solve must close up exactly");
    }
    let epsilon = certificate
        .iter()
        .cloned()
        .max()
        .unwrap_or_else(|| QuadNumber::zero(delta_disc.clone()));

    let constant = eig.shadowing_constant();
    let delta_rat = delta_measured
        .to_rat()
        .unwrap_or_else(|| delta_measured.round_to_bits(96));
    let bound = &constant * &delta_measured;
    let quarter = QuadNumber::from_rat(Rat::new(BigInt::one(), BigInt::from(4)), delta_disc);
    let warning = (bound >= quarter).then(|| {
        format!(
            "C * delta = {} reaches half the space diameter; the shadowing bound is vacuous",
            bound.decimal_string(6)
        )
    });

    Ok(ShadowResult {
        z0,
        period: n,
        epsilon,
        certificate,
        delta: delta_rat,
        constant,
        exact_periodic,
        residual,
        warning,
        lift_doubled: false,
    })
}

/// Shadow a periodic torus pseudo-orbit by an exactly periodic point.
pub fn shadow_periodic(
    a: &IntMatrix2,
    po: &PseudoOrbit,
    mode: ArithmeticMode,
) -> Result<ShadowResult> {
    if !po.periodic {
        return Err(Error::NotPeriodic(
            po.diagnostic
                .clone()
                .unwrap_or_else(|| "input flagged non-periodic".into()),
        ));
    }
    let points = match &po.points {
        OrbitPoints::Torus(v) => v,
        OrbitPoints::Sphere(_) => {
            return Err(Error::NotPeriodic(
                "sphere pseudo-orbit passed to the torus solver; use shadow_periodic_sphere".into(),
            ))
        }
    };
    let eig = EigenData::for_matrix(a)?;
    let quad_points: Vec<QuadPoint> = points
        .iter()
        .map(|p| QuadPoint::from_torus(p, &eig.delta))
        .collect();
    shadow_periodic_quad(a, &quad_points, mode)
}

/// Shadow a periodic sphere pseudo-orbit: lift to the torus choosing the
/// jump-minimizing lift at every step, solve either the periodic or the
/// doubled antipodal closure, and project back. Requires `delta < 1/4` so
/// the minimal lift is unique.
pub fn shadow_periodic_sphere(
    a: &IntMatrix2,
    po: &PseudoOrbit,
    mode: ArithmeticMode,
) -> Result<ShadowResult> {
    if !po.periodic {
        return Err(Error::NotPeriodic("input flagged non-periodic".into()));
    }
    let classes = match &po.points {
        OrbitPoints::Sphere(v) => v,
        OrbitPoints::Torus(_) => {
            return Err(Error::NotPeriodic(
                "torus pseudo-orbit passed to the sphere solver".into(),
            ))
        }
    };
    let n = classes.len();
    if n == 0 {
        return Err(Error::NotPeriodic("empty pseudo-orbit".into()));
    }
    let delta = po.delta(a);
    let quarter = Rat::new(BigInt::one(), BigInt::from(4));
    if delta >= quarter {
        return Err(Error::LiftAmbiguous(delta.to_string()));
    }

    // lift jump-by-jump, then decide how the lift closes
    let mut lifts: Vec<TorusPoint> = Vec::with_capacity(2 * n);
    lifts.push(classes[0].rep().clone());
    for i in 1..n {
        let image = lifts[i - 1].apply(a);
        let r = classes[i].rep().clone();
        let alt = r.antipode();
        lifts.push(if image.dist(&r) <= image.dist(&alt) {
            r
        } else {
            alt
        });
    }
    let image = lifts[n - 1].apply(a);
    let first = lifts[0].clone();
    let doubled = image.dist(&first) > image.dist(&first.antipode());
    if doubled {
        // antipodal closure: solve the doubled lift; by central symmetry
        // the solution satisfies f^N(z) = -z exactly
        for i in 0..n {
            lifts.push(lifts[i].antipode());
        }
    }

    let eig = EigenData::for_matrix(a)?;
    let quad_lifts: Vec<QuadPoint> = lifts
        .iter()
        .map(|p| QuadPoint::from_torus(p, &eig.delta))
        .collect();
    let torus_result = shadow_periodic_quad(a, &quad_lifts, mode)?;

    // project: certificate and epsilon are re-measured in the quotient
    // metric against the prescribed classes
    let z0 = torus_result.z0.sphere_rep();
    let mut certificate = Vec::with_capacity(n);
    let mut iter = z0.clone();
    for class in classes.iter() {
        certificate.push(iter.sphere_dist(class));
        iter = iter.apply(a);
    }
    // g^n fixes the class iff the torus iterate returns to z0 or its antipode
    let exact_periodic = iter == z0 || iter == z0.antipode();
    let epsilon = certificate
        .iter()
        .cloned()
        .max()
        .unwrap_or_else(|| QuadNumber::zero(eig.delta.clone()));

    Ok(ShadowResult {
        z0,
        period: n,
        epsilon,
        certificate,
        delta,
        constant: torus_result.constant,
        exact_periodic: exact_periodic && torus_result.exact_periodic,
        residual: torus_result.residual,
        warning: torus_result.warning,
        lift_doubled: doubled,
    })
}

/// Exact connecting point between orbit segments: `z` on the unstable
/// line of `p_end` whose `gap`-th image lies on the stable line of
/// `q_start`, with the integer lattice shift chosen by a bounded search
/// minimizing `|t| + |s|`.
#[derive(Debug, Clone)]
pub struct ConnectResult {
    pub z: QuadPoint,
    /// Unstable coefficient: `z = p_end + t v_u` (mod lattice).
    pub t: QuadNumber,
    /// Stable coefficient: `f^gap(z) = q_start + s v_s` (mod lattice).
    pub s: QuadNumber,
    pub lattice_shift: (i64, i64),
    /// `d(z, p_end)`, exact.
    pub err_start: QuadNumber,
    /// `d(f^gap(z), q_start)`, exact.
    pub err_end: QuadNumber,
}

/// Documented decay envelope for the connection errors: both endpoint
/// distances come out below `CONNECT_ENVELOPE * lambda^{-gap/2}`; the
/// search radius grows like `3 lambda^{gap/2}`, which makes the bound
/// attainable for every `gap >= 1` (search exhaustion is an error, not a
/// silent degradation).
pub const CONNECT_ENVELOPE: f64 = 4.0;

pub fn connect_segments(
    a: &IntMatrix2,
    p_end: &TorusPoint,
    q_start: &TorusPoint,
    gap: u32,
) -> Result<ConnectResult> {
    assert!(gap >= 1, "gap must be positive");
    let eig = EigenData::for_matrix(a)?;
    let a_inv = a.inverse_unimodular()?;
    // r0 = A^{-gap} q_start, exact rational
    let r0 = {
        let m = a_inv.pow(gap);
        q_start.apply(&m)
    };

    // alpha(m) = alpha0 - m1 du - m2 dv in the unstable coordinate;
    // beta(m) likewise in the stable coordinate
    let (alpha0, beta0) = eig.decompose(&(r0.x() - p_end.x()), &(r0.y() - p_end.y()));
    let (du_a, du_b) = eig.decompose(&Rat::one(), &Rat::zero());
    let (dv_a, dv_b) = eig.decompose(&Rat::zero(), &Rat::one());

    let lambda_f = eig.lambda.to_f64();
    let lam_pow_l = lambda_f.powi(gap as i32);
    let radius = (3.0 * lambda_f.powf(gap as f64 / 2.0)).ceil() as i64;

    let a0 = alpha0.to_f64();
    let b0 = beta0.to_f64();
    let (ua, ub) = (du_a.to_f64(), du_b.to_f64());
    let (va, vb) = (dv_a.to_f64(), dv_b.to_f64());

    // shortlist by floating objective, then settle exactly
    let mut shortlist: Vec<(f64, i64, i64)> = Vec::new();
    const KEEP: usize = 16;
    for m2 in -radius..=radius {
        let target = a0 - va * m2 as f64;
        let m1_star = (target / ua).round() as i64;
        for m1 in [m1_star - 1, m1_star, m1_star + 1] {
            let alpha = a0 - ua * m1 as f64 - va * m2 as f64;
            let beta = b0 - ub * m1 as f64 - vb * m2 as f64;
            let objective = alpha.abs() + beta.abs() / lam_pow_l;
            if shortlist.len() < KEEP {
                shortlist.push((objective, m1, m2));
                shortlist.sort_by(|x, y| x.0.total_cmp(&y.0));
            } else if objective < shortlist[KEEP - 1].0 {
                shortlist[KEEP - 1] = (objective, m1, m2);
                shortlist.sort_by(|x, y| x.0.total_cmp(&y.0));
            }
        }
    }

    let lam_inv_l = eig.lambda_inv.pow(gap as i64);
    let mut best: Option<(QuadNumber, i64, i64, QuadNumber, QuadNumber)> = None;
    for &(_, m1, m2) in &shortlist {
        let mq = |v: i64| QuadNumber::from_rat(Rat::from_integer(BigInt::from(v)), eig.delta.clone());
        let alpha = &(&alpha0 - &(&mq(m1) * &du_a)) - &(&mq(m2) * &dv_a);
        let beta = &(&beta0 - &(&mq(m1) * &du_b)) - &(&mq(m2) * &dv_b);
        let t = alpha;
        let s = &(-&beta) * &lam_inv_l;
        let objective = &t.abs() + &s.abs();
        let better = match &best {
            None => true,
            Some((cur, ..)) => objective < *cur,
        };
        if better {
            best = Some((objective, m1, m2, t, s));
        }
    }
    let (_, m1, m2, t, s) = best.expect("shortlist is nonempty");

    // z = p_end + t v_u, and the certificate distances by exact iteration
    let pe = QuadPoint::from_torus(p_end, &eig.delta);
    let z = QuadPoint::new(
        &pe.x + &(&t * &eig.v_u[0]),
        &pe.y + &(&t * &eig.v_u[1]),
    );
    let err_start = z.dist_to_torus(p_end);
    let mut fz = z.clone();
    for _ in 0..gap {
        fz = fz.apply(a);
    }
    let err_end = fz.dist_to_torus(q_start);

    // decay envelope check: c * lambda^{-gap/2}
    let envelope = CONNECT_ENVELOPE * lambda_f.powf(-(gap as f64) / 2.0);
    let worst = if err_start >= err_end {
        err_start.to_f64()
    } else {
        err_end.to_f64()
    };
    if worst > envelope {
        return Err(Error::SearchExhausted {
            gap,
            achieved: format!("{worst:.3e}"),
            wanted: format!("{envelope:.3e}"),
        });
    }

    Ok(ConnectResult {
        z,
        t,
        s,
        lattice_shift: (m1, m2),
        err_start,
        err_end,
    })
}

/// A specification request: exact orbit segments `(start, length)` to be
/// realized within one periodic orbit, with equal gaps of `gap` steps
/// between consecutive segments (and wrapping around).
#[derive(Debug, Clone)]
pub struct SpecificationRequest {
    pub segments: Vec<(TorusPoint, usize)>,
    pub gap: u32,
}

#[derive(Debug, Clone)]
pub struct SpecificationResult {
    pub shadow: ShadowResult,
    /// `[a_j, b_j]` index ranges of the prescribed segments inside the
    /// composite periodic orbit.
    pub segment_ranges: Vec<(usize, usize)>,
    /// Max distance from the shadowing orbit to each prescribed segment.
    pub segment_errors: Vec<QuadNumber>,
    /// Endpoint errors of each connection, for decay diagnostics.
    pub connection_errors: Vec<(QuadNumber, QuadNumber)>,
}

/// Chain the segments with [`connect_segments`] into one periodic
/// pseudo-orbit of total length `b_m + gap` and shadow it; the certificate
/// is reported over the prescribed segment indices only.
#[allow(clippy::needless_range_loop)] // j walks two parallel segment tables
pub fn periodic_specification(
    a: &IntMatrix2,
    req: &SpecificationRequest,
) -> Result<SpecificationResult> {
    if req.segments.is_empty() {
        return Err(Error::NotPeriodic("specification needs at least one segment".into()));
    }
    assert!(req.gap >= 1);
    for (_, len) in &req.segments {
        assert!(*len >= 1, "segments must have positive length");
    }
    let eig = EigenData::for_matrix(a)?;
    let m = req.segments.len();

    // exact orbit segments
    let segments: Vec<Vec<TorusPoint>> = req
        .segments
        .iter()
        .map(|(start, len)| crate::toral::orbit(a, start, *len))
        .collect();

    // connect segment j to segment j+1 (wrapping), gluing end -> start
    let mut connections = Vec::with_capacity(m);
    for j in 0..m {
        let end_of_j = segments[j].last().unwrap();
        let start_of_next = &req.segments[(j + 1) % m].0;
        connections.push(connect_segments(a, end_of_j, start_of_next, req.gap)?);
    }

    // composite pseudo-orbit: segment points at their indices, connector
    // orbits in the gaps
    let mut points: Vec<QuadPoint> = Vec::new();
    let mut segment_ranges = Vec::with_capacity(m);
    for j in 0..m {
        let a_j = points.len();
        for p in &segments[j] {
            points.push(QuadPoint::from_torus(p, &eig.delta));
        }
        let b_j = points.len() - 1;
        segment_ranges.push((a_j, b_j));
        // gap points f(z_j), ..., f^{gap-1}(z_j)
        let mut w = connections[j].z.apply(a);
        for _ in 1..req.gap {
            points.push(w.clone());
            w = w.apply(a);
        }
    }
    let total = points.len();
    debug_assert_eq!(
        total,
        segments.iter().map(Vec::len).sum::<usize>() + m * (req.gap as usize - 1)
    );

    let shadow = shadow_periodic_quad(a, &points, ArithmeticMode::Exact)?;

    let segment_errors = segment_ranges
        .iter()
        .map(|&(a_j, b_j)| {
            shadow.certificate[a_j..=b_j]
                .iter()
                .cloned()
                .max()
                .unwrap()
        })
        .collect();
    let connection_errors = connections
        .iter()
        .map(|c| (c.err_start.clone(), c.err_end.clone()))
        .collect();

    Ok(SpecificationResult {
        shadow,
        segment_ranges,
        segment_errors,
        connection_errors,
    })
}
