//! Periodic-orbit empirical measures and their weak* diagnostics.
//!
//! The measures are finite rational atom lists with mass exactly 1.
//! Convergence against the reference (Haar on the torus, its pushforward
//! on the sphere) is certified on the character family up to a frequency
//! cutoff: torus characters integrate to exactly 0 or 1 against the
//! kernel measures (a dual-lattice membership test), sphere measures use
//! antipodally symmetric cosine characters, and anything without a closed
//! form is evaluated in high precision with a sound error bound.
//!
//! Bowen dynamical balls have exactly decidable membership for rational
//! data, which powers the ball-mass homogeneity probe.

use crate::exactlat::IntMatrix2;
use crate::highprec::{cos_2pi, sqrt_upper, Approx};
use crate::par;
use crate::rational::{format_rat, mod1, Rat};
use crate::sphere::{sphere_periodic_points, SpherePoint};
use crate::toral::{antipodal_periodic_points, periodic_points, orbit, TorusPoint};
use crate::{Error, Result, Space};
use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;

/// Exact-evaluation shortcuts for character integrals.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum CharacterShortcut {
    /// Uniform on the kernel of `A^n - I`: integrals are exactly 0/1 by
    /// subgroup orthogonality.
    TorusKernel(u32),
    /// Uniform on `P_n(g)`: upstairs this is the union of two kernels, so
    /// symmetric-character integrals have an exact closed form.
    SphereUnion(u32),
    None,
}

#[derive(Debug, Clone)]
pub enum Atoms {
    Torus(Vec<(TorusPoint, Rat)>),
    Sphere(Vec<(SpherePoint, Rat)>),
}

/// Weighted finite point measure with total mass exactly 1.
#[derive(Debug, Clone)]
pub struct EmpiricalMeasure {
    pub atoms: Atoms,
    shortcut: CharacterShortcut,
    /// The matrix whose dynamics produced the measure (for shortcuts).
    matrix: Option<IntMatrix2>,
}

impl EmpiricalMeasure {
    pub fn space(&self) -> Space {
        match self.atoms {
            Atoms::Torus(_) => Space::Torus,
            Atoms::Sphere(_) => Space::Sphere,
        }
    }

    pub fn len(&self) -> usize {
        match &self.atoms {
            Atoms::Torus(v) => v.len(),
            Atoms::Sphere(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn total_mass(&self) -> Rat {
        let sum = |ws: &mut dyn Iterator<Item = Rat>| ws.fold(Rat::zero(), |a, b| a + b);
        match &self.atoms {
            Atoms::Torus(v) => sum(&mut v.iter().map(|(_, w)| w.clone())),
            Atoms::Sphere(v) => sum(&mut v.iter().map(|(_, w)| w.clone())),
        }
    }

    /// Build a sphere measure from explicit atoms (weights must sum to 1).
    pub fn from_sphere_atoms(atoms: Vec<(SpherePoint, Rat)>) -> Self {
        let m = Self {
            atoms: Atoms::Sphere(atoms),
            shortcut: CharacterShortcut::None,
            matrix: None,
        };
        debug_assert!(m.total_mass().is_one());
        m
    }

    /// The Dirac average over a periodic point set.
    ///
    /// * torus, plain: uniform on `P_n(f)` (a subgroup of the torus);
    /// * torus, starred: uniform on `P_n^*(f)`, the preimage of the
    ///   non-spine sphere classes inside `P_n u P_n^-`;
    /// * sphere, plain: uniform on `P_n(g)`;
    /// * sphere, starred: uniform on the non-spine classes `P_n^*(g)`,
    ///   with `|Per_n - Per_n^*| <= 4`.
    pub fn periodic(a: &IntMatrix2, n: u32, space: Space, starred: bool) -> Result<Self> {
        match (space, starred) {
            (Space::Torus, false) => {
                let set = periodic_points(a, n)?;
                let w = Rat::new(BigInt::one(), BigInt::from(set.len()));
                Ok(Self {
                    atoms: Atoms::Torus(set.points.into_iter().map(|p| (p, w.clone())).collect()),
                    shortcut: CharacterShortcut::TorusKernel(n),
                    matrix: Some(a.clone()),
                })
            }
            (Space::Torus, true) => {
                let per = periodic_points(a, n)?;
                let anti = antipodal_periodic_points(a, n)?;
                let mut points: Vec<TorusPoint> = per
                    .points
                    .into_iter()
                    .chain(anti.points)
                    .filter(|p| !p.is_self_antipodal())
                    .collect();
                points.sort_unstable();
                points.dedup(); // non-spines cannot be in both sets; defensive
                let w = Rat::new(BigInt::one(), BigInt::from(points.len()));
                Ok(Self {
                    atoms: Atoms::Torus(points.into_iter().map(|p| (p, w.clone())).collect()),
                    shortcut: CharacterShortcut::None,
                    matrix: Some(a.clone()),
                })
            }
            (Space::Sphere, false) => {
                let set = sphere_periodic_points(a, n)?;
                let w = Rat::new(BigInt::one(), BigInt::from(set.len()));
                Ok(Self {
                    atoms: Atoms::Sphere(set.points.into_iter().map(|p| (p, w.clone())).collect()),
                    shortcut: CharacterShortcut::SphereUnion(n),
                    matrix: Some(a.clone()),
                })
            }
            (Space::Sphere, true) => {
                let set = sphere_periodic_points(a, n)?;
                let total = set.len();
                let points: Vec<SpherePoint> =
                    set.points.into_iter().filter(|s| !s.is_spine()).collect();
                debug_assert!(total - points.len() <= 4);
                let w = Rat::new(BigInt::one(), BigInt::from(points.len()));
                Ok(Self {
                    atoms: Atoms::Sphere(points.into_iter().map(|p| (p, w.clone())).collect()),
                    shortcut: CharacterShortcut::None,
                    matrix: Some(a.clone()),
                })
            }
        }
    }

    /// Pushforward of a torus measure under the antipodal quotient,
    /// merging fiber weights exactly.
    pub fn pushforward_to_sphere(&self) -> Result<Self> {
        let atoms = match &self.atoms {
            Atoms::Torus(v) => v,
            Atoms::Sphere(_) => {
                return Err(Error::Parse("measure already lives on the sphere".into()))
            }
        };
        let mut merged: BTreeMap<SpherePoint, Rat> = BTreeMap::new();
        for (p, w) in atoms {
            let class = SpherePoint::project(p);
            merged
                .entry(class)
                .and_modify(|acc| *acc += w)
                .or_insert_with(|| w.clone());
        }
        Ok(Self {
            atoms: Atoms::Sphere(merged.into_iter().collect()),
            shortcut: CharacterShortcut::None,
            matrix: self.matrix.clone(),
        })
    }

    /// `integral of chi_k` against the measure. On the torus
    /// `chi_k(x) = exp(2 pi i k . x)`; on the sphere the antipodally
    /// symmetric cosine `cos(2 pi k . x)` evaluated on either lift.
    /// Exact whenever the measure structure allows, high-precision with a
    /// sound error bound otherwise. `k = (0,0)` returns exactly 1.
    pub fn character_integral(&self, k: (i64, i64), bits: u32) -> CharValue {
        if k == (0, 0) {
            return CharValue {
                re: Approx::exact(self.total_mass()),
                im: Approx::exact(Rat::zero()),
                exact: true,
                trivial: true,
            };
        }
        match (self.shortcut, &self.matrix) {
            (CharacterShortcut::TorusKernel(n), Some(a)) => {
                let value = if torus_kernel_character(a, n, k) {
                    Rat::one()
                } else {
                    Rat::zero()
                };
                CharValue {
                    re: Approx::exact(value),
                    im: Approx::exact(Rat::zero()),
                    exact: true,
                    trivial: false,
                }
            }
            (CharacterShortcut::SphereUnion(n), Some(a)) => CharValue {
                re: Approx::exact(sphere_union_character(a, n, k)),
                im: Approx::exact(Rat::zero()),
                exact: true,
                trivial: false,
            },
            _ => self.character_numeric(k, bits),
        }
    }

    /// Sequential reference path of the numeric character sum; the
    /// benchmarks compare it against the parallel default.
    pub fn character_integral_seq(&self, k: (i64, i64), bits: u32) -> CharValue {
        if k == (0, 0) {
            return CharValue {
                re: Approx::exact(self.total_mass()),
                im: Approx::exact(Rat::zero()),
                exact: true,
                trivial: true,
            };
        }
        self.character_numeric_impl(k, bits, false)
    }

    fn character_numeric(&self, k: (i64, i64), bits: u32) -> CharValue {
        self.character_numeric_impl(k, bits, true)
    }

    fn character_numeric_impl(&self, k: (i64, i64), bits: u32, parallel: bool) -> CharValue {
        // group atoms by the exact fractional part of k . x; atoms sharing
        // an argument share one high-precision evaluation
        let mut args: BTreeMap<Rat, Rat> = BTreeMap::new();
        let mut insert = |p: &TorusPoint, w: &Rat| {
            let phase = mod1(
                &(Rat::from_integer(BigInt::from(k.0)) * p.x()
                    + Rat::from_integer(BigInt::from(k.1)) * p.y()),
            );
            args.entry(phase)
                .and_modify(|acc| *acc += w)
                .or_insert_with(|| w.clone());
        };
        let sphere = match &self.atoms {
            Atoms::Torus(v) => {
                for (p, w) in v {
                    insert(p, w);
                }
                false
            }
            Atoms::Sphere(v) => {
                for (s, w) in v {
                    insert(s.rep(), w);
                }
                true
            }
        };
        let keys: Vec<Rat> = args.keys().cloned().collect();
        let map = |f: &(dyn Fn(usize) -> Approx + Sync + Send)| -> Vec<Approx> {
            if parallel {
                par::map_range_collect(keys.len(), f)
            } else {
                par::map_range_collect_seq(keys.len(), f)
            }
        };
        let cos_vals = map(&|i| cos_2pi(&keys[i], bits));
        let mut re = Rat::zero();
        let mut re_err = Rat::zero();
        for (key, cos) in keys.iter().zip(&cos_vals) {
            let w = &args[key];
            re += w * &cos.value;
            re_err += w * &cos.error;
        }
        if sphere {
            // sine integrals vanish by antipodal symmetry; the cosine sum
            // is the whole integral
            return CharValue {
                re: Approx { value: re, error: re_err },
                im: Approx::exact(Rat::zero()),
                exact: false,
                trivial: false,
            };
        }
        let sin_vals = map(&|i| crate::highprec::sin_2pi(&keys[i], bits));
        let mut im = Rat::zero();
        let mut im_err = Rat::zero();
        for (key, sin) in keys.iter().zip(&sin_vals) {
            let w = &args[key];
            im += w * &sin.value;
            im_err += w * &sin.error;
        }
        CharValue {
            re: Approx { value: re, error: re_err },
            im: Approx { value: im, error: im_err },
            exact: false,
            trivial: false,
        }
    }

    /// `D_K`: max over `0 < |k|_inf <= K` of the modulus of the character
    /// integral minus the reference (0 for Haar and its pushforward).
    pub fn discrepancy(&self, kmax: i64, bits: u32) -> DiscrepancyReport {
        assert!(kmax >= 1);
        let mut entries = Vec::new();
        let mut max_abs = Rat::zero();
        let mut max_err = Rat::zero();
        for k1 in -kmax..=kmax {
            for k2 in -kmax..=kmax {
                if (k1, k2) == (0, 0) {
                    continue;
                }
                let value = self.character_integral((k1, k2), bits);
                let (abs, err) = value.modulus_upper(bits);
                if abs > max_abs {
                    max_abs = abs.clone();
                    max_err = err.clone();
                }
                entries.push(DiscrepancyEntry {
                    k: (k1, k2),
                    value,
                    modulus: abs,
                    modulus_error: err,
                });
            }
        }
        DiscrepancyReport {
            kmax,
            entries,
            max_abs,
            max_abs_error: max_err,
        }
    }

    /// Exact mass of a Bowen ball: sum of the weights of atoms whose
    /// first `depth` iterates all stay within `radius` of the center's.
    pub fn ball_mass(&self, a: &IntMatrix2, ball: &BowenBall) -> Rat {
        let depth = ball.depth as usize;
        let radius = &ball.radius;
        match (&self.atoms, &ball.center) {
            (Atoms::Torus(v), BallCenter::Torus(c)) => {
                let center_orbit = orbit(a, c, depth);
                let masses = par::map_range_collect(v.len(), |i| {
                    let (p, w) = &v[i];
                    let mut q = p.clone();
                    for co in center_orbit.iter() {
                        if q.dist(co) > *radius {
                            return Rat::zero();
                        }
                        q = q.apply(a);
                    }
                    w.clone()
                });
                masses.into_iter().fold(Rat::zero(), |acc, m| acc + m)
            }
            (Atoms::Sphere(v), BallCenter::Sphere(c)) => {
                let mut center_orbit = Vec::with_capacity(depth);
                let mut s = c.clone();
                for _ in 0..depth {
                    let next = s.apply(a);
                    center_orbit.push(s);
                    s = next;
                }
                let masses = par::map_range_collect(v.len(), |i| {
                    let (p, w) = &v[i];
                    let mut q = p.clone();
                    for co in center_orbit.iter() {
                        if q.dist(co) > *radius {
                            return Rat::zero();
                        }
                        q = q.apply(a);
                    }
                    w.clone()
                });
                masses.into_iter().fold(Rat::zero(), |acc, m| acc + m)
            }
            _ => panic!("ball center space does not match the measure"),
        }
    }

    /// CSV export `x,y,weight` in exact fractions.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("x,y,weight\n");
        match &self.atoms {
            Atoms::Torus(v) => {
                for (p, w) in v {
                    out.push_str(&format!(
                        "{},{},{}\n",
                        format_rat(p.x()),
                        format_rat(p.y()),
                        format_rat(w)
                    ));
                }
            }
            Atoms::Sphere(v) => {
                for (s, w) in v {
                    out.push_str(&format!(
                        "{},{},{}\n",
                        format_rat(s.rep().x()),
                        format_rat(s.rep().y()),
                        format_rat(w)
                    ));
                }
            }
        }
        out
    }
}

/// A character integral value: real and imaginary parts with error bounds.
#[derive(Debug, Clone)]
pub struct CharValue {
    pub re: Approx,
    pub im: Approx,
    /// True when both parts are exact rationals (no numeric error).
    pub exact: bool,
    /// True for the `k = 0` total-mass case.
    pub trivial: bool,
}

impl CharValue {
    /// Sound upper bound on the modulus, with the propagated error.
    pub fn modulus_upper(&self, bits: u32) -> (Rat, Rat) {
        let err = &self.re.error + &self.im.error;
        if self.im.value.is_zero() {
            return (self.re.value.abs(), err);
        }
        let sq = &self.re.value * &self.re.value + &self.im.value * &self.im.value;
        let modulus = sqrt_upper(&sq, bits);
        let extra = Rat::new(BigInt::one(), BigInt::one() << bits);
        (modulus, err + extra)
    }
}

#[derive(Debug, Clone)]
pub struct DiscrepancyEntry {
    pub k: (i64, i64),
    pub value: CharValue,
    pub modulus: Rat,
    pub modulus_error: Rat,
}

#[derive(Debug, Clone)]
pub struct DiscrepancyReport {
    pub kmax: i64,
    pub entries: Vec<DiscrepancyEntry>,
    pub max_abs: Rat,
    pub max_abs_error: Rat,
}

impl DiscrepancyReport {
    /// JSON keyed by `k`, exact values as strings.
    pub fn to_json(&self) -> serde_json::Value {
        let mut map = serde_json::Map::new();
        for e in &self.entries {
            map.insert(
                format!("{},{}", e.k.0, e.k.1),
                serde_json::json!({
                    "re": format_rat(&e.value.re.value),
                    "im": format_rat(&e.value.im.value),
                    "modulus": format_rat(&e.modulus),
                    "error": format_rat(&e.modulus_error),
                    "exact": e.value.exact,
                }),
            );
        }
        serde_json::json!({
            "kmax": self.kmax,
            "max": format_rat(&self.max_abs),
            "max_error": format_rat(&self.max_abs_error),
            "entries": map,
        })
    }
}

/// Does `k` lie in the dual lattice `M^T Z^2`? Decides exactly whether
/// the character `chi_k` is trivial on the kernel of `M` on the torus.
pub fn dual_lattice_contains(m: &IntMatrix2, k: (i64, i64)) -> bool {
    // solve M^T y = k over the rationals and test integrality
    let det = m.det();
    assert!(!det.is_zero());
    let (k1, k2) = (BigInt::from(k.0), BigInt::from(k.1));
    // M^T = [[a, c], [b, d]]; adj(M^T) = [[d, -c], [-b, a]]
    let y1 = &m.d * &k1 - &m.c * &k2;
    let y2 = -&m.b * &k1 + &m.a * &k2;
    (&y1 % &det).is_zero() && (&y2 % &det).is_zero()
}

/// Exact 0/1 character integral against the uniform measure on the
/// kernel of `A^n - I` (two independent routes, asserted equal in tests):
/// dual-lattice membership here, atom-scan orthogonality in the tests.
pub fn torus_kernel_character(a: &IntMatrix2, n: u32, k: (i64, i64)) -> bool {
    let m = a.pow(n).sub(&IntMatrix2::identity());
    dual_lattice_contains(&m, k)
}

/// Exact symmetric-character integral against the uniform measure on
/// `P_n(g)`: upstairs the class measure lifts to the average over the
/// disjoint union of the two kernel groups, each contributing 0 or its
/// cardinality.
pub fn sphere_union_character(a: &IntMatrix2, n: u32, k: (i64, i64)) -> Rat {
    let t = a.pow(n).trace();
    let m_minus = a.pow(n).sub(&IntMatrix2::identity());
    let m_plus = a.pow(n).add(&IntMatrix2::identity());
    let per = &t - BigInt::from(2);
    let per_minus = &t + BigInt::from(2);
    let mut total = Rat::zero();
    if dual_lattice_contains(&m_minus, k) {
        total += Rat::from_integer(per);
    }
    if dual_lattice_contains(&m_plus, k) {
        total += Rat::from_integer(per_minus);
    }
    total / Rat::from_integer(BigInt::from(2) * t)
}

/// Independent orthogonality route for tests: scan the atoms; if every
/// phase `k . x` is an integer the integral is 1, and if any atom has a
/// non-integer phase the subgroup average is exactly 0.
pub fn torus_kernel_character_by_scan(a: &IntMatrix2, n: u32, k: (i64, i64)) -> Result<bool> {
    let set = periodic_points(a, n)?;
    Ok(set.points.iter().all(|p| {
        let phase = Rat::from_integer(BigInt::from(k.0)) * p.x()
            + Rat::from_integer(BigInt::from(k.1)) * p.y();
        phase.is_integer()
    }))
}

/// Center of a Bowen ball, matching the measure's space.
#[derive(Debug, Clone)]
pub enum BallCenter {
    Torus(TorusPoint),
    Sphere(SpherePoint),
}

/// Bowen dynamical ball `B_n(x, r)`: the set of points whose first `depth`
/// iterates stay within `radius` of the center's. Membership of rational
/// points is exactly decidable by iteration.
#[derive(Debug, Clone)]
pub struct BowenBall {
    pub center: BallCenter,
    pub depth: u32,
    pub radius: Rat,
}

impl BowenBall {
    pub fn new(center: BallCenter, depth: u32, radius: Rat) -> Self {
        assert!(depth >= 1, "a Bowen ball needs at least one iterate");
        Self {
            center,
            depth,
            radius,
        }
    }

    /// Exact membership test for a torus point.
    pub fn contains_torus(&self, a: &IntMatrix2, p: &TorusPoint) -> bool {
        let BallCenter::Torus(c) = &self.center else {
            panic!("torus membership against a sphere-centered ball");
        };
        let mut q = p.clone();
        let mut x = c.clone();
        for _ in 0..self.depth {
            if q.dist(&x) > self.radius {
                return false;
            }
            q = q.apply(a);
            x = x.apply(a);
        }
        true
    }
}

/// One row of the homogeneity probe table.
#[derive(Debug, Clone)]
pub struct ProbeRow {
    pub center_index: usize,
    pub depth: u32,
    pub mass: Rat,
    /// `e^{h n} * mass` with `h = log(lambda)`, for cross-depth reading.
    pub normalized: f64,
    pub empty: bool,
}

#[derive(Debug, Clone)]
pub struct HomogeneityProbe {
    pub measure_period: u32,
    pub epsilon: Rat,
    pub rows: Vec<ProbeRow>,
    /// Per depth: (n, max/min of nonzero masses, number of empty balls).
    pub ratios: Vec<(u32, f64, usize)>,
}

impl HomogeneityProbe {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("center,n,mass,normalized,empty\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{:.6},{}\n",
                r.center_index,
                r.depth,
                format_rat(&r.mass),
                r.normalized,
                r.empty
            ));
        }
        for (n, ratio, empties) in &self.ratios {
            out.push_str(&format!("# n={n} ratio={ratio:.4} empty={empties}\n"));
        }
        out
    }
}

/// Normalized Bowen-ball masses `e^{h n} mu_r(B_n(x, eps))` over seeded
/// centers, and the max/min ratio per depth. Empty balls are recorded and
/// excluded from the ratio.
#[allow(clippy::too_many_arguments)] // mirrors the probe's parameter list
pub fn homogeneity_probe(
    a: &IntMatrix2,
    r: u32,
    n_range: std::ops::RangeInclusive<u32>,
    eps: &Rat,
    num_centers: usize,
    seed: u64,
    space: Space,
    starred: bool,
) -> Result<HomogeneityProbe> {
    assert!(
        *n_range.end() < r,
        "probe depth must stay below the measure period"
    );
    let measure = EmpiricalMeasure::periodic(a, r, space, starred)?;
    let h = {
        let eig = crate::exactlat::EigenData::for_matrix(a)?;
        eig.lambda.to_f64().ln()
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    const CENTER_DEN: i64 = 1 << 12;
    let centers: Vec<BallCenter> = (0..num_centers)
        .map(|_| {
            let x = rng.random_range(0..CENTER_DEN);
            let y = rng.random_range(0..CENTER_DEN);
            let p = TorusPoint::from_i64(x, CENTER_DEN, y, CENTER_DEN);
            match space {
                Space::Torus => BallCenter::Torus(p),
                Space::Sphere => BallCenter::Sphere(SpherePoint::project(&p)),
            }
        })
        .collect();

    // atom orbits are shared across all centers and depths
    let n_max = *n_range.end() as usize;
    let (atom_orbits, weights): (Vec<Vec<TorusPoint>>, Vec<Rat>) = match (&measure.atoms, space) {
        (Atoms::Torus(v), _) => (
            par::map_range_collect(v.len(), |i| orbit(a, &v[i].0, n_max)),
            v.iter().map(|(_, w)| w.clone()).collect(),
        ),
        (Atoms::Sphere(v), _) => (
            // sphere orbits tracked through canonical lifts; distances
            // below use the quotient metric
            par::map_range_collect(v.len(), |i| orbit(a, v[i].0.rep(), n_max)),
            v.iter().map(|(_, w)| w.clone()).collect(),
        ),
    };
    let sphere_metric = space == Space::Sphere;
    let center_orbits: Vec<Vec<TorusPoint>> = centers
        .iter()
        .map(|c| match c {
            BallCenter::Torus(p) => orbit(a, p, n_max),
            BallCenter::Sphere(s) => orbit(a, s.rep(), n_max),
        })
        .collect();

    let dist = |x: &TorusPoint, y: &TorusPoint| -> Rat {
        if sphere_metric {
            let direct = x.dist(y);
            let crossed = x.dist(&y.antipode());
            direct.min(crossed)
        } else {
            x.dist(y)
        }
    };

    let mut rows = Vec::new();
    let mut ratios = Vec::new();
    for n in n_range {
        let mut masses = Vec::with_capacity(centers.len());
        for (idx, center_orbit) in center_orbits.iter().enumerate() {
            let contributions = par::map_range_collect(atom_orbits.len(), |i| {
                let inside = atom_orbits[i][..n as usize]
                    .iter()
                    .zip(&center_orbit[..n as usize])
                    .all(|(p, c)| dist(p, c) <= *eps);
                if inside {
                    weights[i].clone()
                } else {
                    Rat::zero()
                }
            });
            let mass = contributions.into_iter().fold(Rat::zero(), |a, b| a + b);
            let empty = mass.is_zero();
            let normalized = (h * n as f64).exp() * mass.to_f64().unwrap_or(f64::NAN);
            rows.push(ProbeRow {
                center_index: idx,
                depth: n,
                mass: mass.clone(),
                normalized,
                empty,
            });
            masses.push(mass);
        }
        let nonzero: Vec<&Rat> = masses.iter().filter(|m| !m.is_zero()).collect();
        let empties = masses.len() - nonzero.len();
        let ratio = if nonzero.is_empty() {
            f64::NAN
        } else {
            let max = nonzero.iter().max().unwrap();
            let min = nonzero.iter().min().unwrap();
            (*max / *min).to_f64().unwrap_or(f64::NAN)
        };
        ratios.push((n, ratio, empties));
    }
    Ok(HomogeneityProbe {
        measure_period: r,
        epsilon: eps.clone(),
        rows,
        ratios,
    })
}
