//! Separated-set entropy estimation and the exact periodic-growth
//! sandwich.
//!
//! Separated subsets are grown greedily in a deterministic candidate
//! order, which makes every reported set sound by construction: a point
//! is kept only after an exact check against everything already kept.
//! Candidates and their orbits live on a common-denominator integer
//! lattice, so the `(n, delta)`-separation predicate is an integer
//! comparison — no floating point anywhere in the counts.
//!
//! Greedy maximal sets are lower bounds for `s_n(delta)`; confirming the
//! growth exponent needs nothing stronger, while exact maximal
//! cardinality would be a combinatorial search with no payoff here.

use crate::exactlat::{EigenData, IntMatrix2, QuadNumber};
use crate::par;
use crate::rational::Rat;
use crate::sphere::{sphere_periodic_points, SpherePoint};
use crate::toral::{periodic_points, TorusPoint};
use crate::{Error, Result, Space};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive};
use std::fmt;
use std::ops::RangeInclusive;

/// Largest common denominator accepted by the integer separation lane.
/// Every candidate scheme the artifact generates (uniform grids, periodic
/// sets up to the enumeration limit) fits far below this.
const DENOMINATOR_LIMIT: u64 = 1 << 22;

/// Orbits of all candidates for `n` steps on the `1/q` integer lattice.
struct LatticeOrbits {
    q: i64,
    steps: usize,
    /// `flat[i * steps + k]` is the k-th iterate of candidate i.
    flat: Vec<(i64, i64)>,
    count: usize,
    sphere: bool,
}

impl LatticeOrbits {
    fn circ(&self, v: i64) -> i64 {
        let m = v.rem_euclid(self.q);
        m.min(self.q - m)
    }

    fn torus_dist(&self, a: (i64, i64), b: (i64, i64)) -> i64 {
        self.circ(a.0 - b.0).max(self.circ(a.1 - b.1))
    }

    fn point_dist(&self, a: (i64, i64), b: (i64, i64)) -> i64 {
        if self.sphere {
            let anti = ((self.q - b.0).rem_euclid(self.q), (self.q - b.1).rem_euclid(self.q));
            self.torus_dist(a, b).min(self.torus_dist(a, anti))
        } else {
            self.torus_dist(a, b)
        }
    }

    /// Exact `(n, delta)`-separation of candidates `i` and `j`:
    /// some iterate is strictly farther than `delta`.
    fn separated(&self, i: usize, j: usize, delta_num: i64, delta_den: i64) -> bool {
        let oi = &self.flat[i * self.steps..(i + 1) * self.steps];
        let oj = &self.flat[j * self.steps..(j + 1) * self.steps];
        for k in 0..self.steps {
            let d = self.point_dist(oi[k], oj[k]);
            // d/q > delta_num/delta_den
            if (d as i128) * (delta_den as i128) > (delta_num as i128) * (self.q as i128) {
                return true;
            }
        }
        false
    }
}

fn common_denominator(points: impl Iterator<Item = (BigInt, BigInt)>) -> Result<i64> {
    let mut q = BigInt::one();
    for (dx, dy) in points {
        q = q.lcm(&dx).lcm(&dy);
        if q > BigInt::from(DENOMINATOR_LIMIT) {
            return Err(Error::DenominatorTooLarge(q.to_string()));
        }
    }
    Ok(q.to_i64().unwrap())
}

fn scaled_coords(p: &TorusPoint, q: i64) -> (i64, i64) {
    let scale = |r: &Rat| -> i64 {
        let v = r * Rat::from_integer(BigInt::from(q));
        debug_assert!(v.is_integer());
        v.to_integer().to_i64().unwrap()
    };
    (scale(p.x()), scale(p.y()))
}

fn build_orbits_torus(
    map: &IntMatrix2,
    candidates: &[TorusPoint],
    n: u32,
) -> Result<LatticeOrbits> {
    let q = common_denominator(
        candidates
            .iter()
            .map(|p| (p.x().denom().clone(), p.y().denom().clone())),
    )?;
    build_orbits_scaled(map, candidates.iter().map(|p| scaled_coords(p, q)), q, n, false)
}

fn build_orbits_sphere(
    map: &IntMatrix2,
    candidates: &[SpherePoint],
    n: u32,
) -> Result<LatticeOrbits> {
    let q = common_denominator(
        candidates
            .iter()
            .map(|s| (s.rep().x().denom().clone(), s.rep().y().denom().clone())),
    )?;
    build_orbits_scaled(
        map,
        candidates.iter().map(|s| scaled_coords(s.rep(), q)),
        q,
        n,
        true,
    )
}

fn build_orbits_scaled(
    map: &IntMatrix2,
    starts: impl Iterator<Item = (i64, i64)>,
    q: i64,
    n: u32,
    sphere: bool,
) -> Result<LatticeOrbits> {
    // matrix entries act mod q on the scaled lattice
    let reduce = |v: &BigInt| -> i64 { v.mod_floor(&BigInt::from(q)).to_i64().unwrap() };
    let (ma, mb, mc, md) = (
        reduce(&map.a),
        reduce(&map.b),
        reduce(&map.c),
        reduce(&map.d),
    );
    let steps = n as usize;
    let mut flat = Vec::new();
    let mut count = 0;
    for (mut x, mut y) in starts {
        count += 1;
        for _ in 0..steps {
            let canon = if sphere {
                // canonical class representative: lexicographic min of the
                // point and its antipode on the lattice
                let anti = ((q - x).rem_euclid(q), (q - y).rem_euclid(q));
                (x, y).min(anti)
            } else {
                (x, y)
            };
            flat.push(canon);
            let nx = (ma * x + mb * y).rem_euclid(q);
            let ny = (mc * x + md * y).rem_euclid(q);
            x = nx;
            y = ny;
        }
    }
    Ok(LatticeOrbits {
        q,
        steps,
        flat,
        count,
        sphere,
    })
}

fn delta_fraction(delta: &Rat) -> Result<(i64, i64)> {
    let num = delta
        .numer()
        .to_i64()
        .ok_or_else(|| Error::DenominatorTooLarge(delta.to_string()))?;
    let den = delta
        .denom()
        .to_i64()
        .ok_or_else(|| Error::DenominatorTooLarge(delta.to_string()))?;
    Ok((num, den))
}

/// Greedy maximal separated subset in candidate order, optionally seeded
/// with an already-separated kept set (used for the monotone estimates).
#[allow(clippy::needless_range_loop)] // the kept mask is mutated inside the loop
fn greedy_separated(
    orbits: &LatticeOrbits,
    delta_num: i64,
    delta_den: i64,
    seed_kept: Vec<usize>,
) -> Vec<usize> {
    let mut in_kept = vec![false; orbits.count];
    for &i in &seed_kept {
        in_kept[i] = true;
    }
    let mut kept = seed_kept;
    for i in 0..orbits.count {
        if in_kept[i] {
            continue;
        }
        let ok = par::all_range(kept.len(), |j| {
            orbits.separated(i, kept[j], delta_num, delta_den)
        });
        if ok {
            kept.push(i);
            in_kept[i] = true;
        }
    }
    kept.sort_unstable();
    kept
}

/// Result of one separated-set computation.
#[derive(Debug, Clone)]
pub struct SeparationReport<P> {
    pub n: u32,
    pub delta: Rat,
    pub scheme: String,
    pub candidate_count: usize,
    /// The greedy maximal separated subset found (a lower-bound witness).
    pub witness: Vec<P>,
}

impl<P> SeparationReport<P> {
    pub fn count(&self) -> usize {
        self.witness.len()
    }

    pub fn csv_row(&self) -> String {
        format!(
            "{},{}/{},{},{}",
            self.n,
            self.delta.numer(),
            self.delta.denom(),
            self.count(),
            self.scheme
        )
    }
}

impl<P: fmt::Display> SeparationReport<P> {
    /// Witness export, one point per line, for audit.
    pub fn witness_lines(&self) -> String {
        let mut out = String::new();
        for p in &self.witness {
            out.push_str(&format!("{p}\n"));
        }
        out
    }
}

/// Greedy maximal `(n, delta)`-separated subset of torus candidates under
/// the toral map of `map` (any integer matrix; identity is allowed).
pub fn separated_set_torus(
    map: &IntMatrix2,
    candidates: &[TorusPoint],
    n: u32,
    delta: &Rat,
) -> Result<SeparationReport<TorusPoint>> {
    assert!(n >= 1 && delta.is_positive());
    let mut sorted: Vec<TorusPoint> = candidates.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    let orbits = build_orbits_torus(map, &sorted, n)?;
    let (dn, dd) = delta_fraction(delta)?;
    let kept = greedy_separated(&orbits, dn, dd, Vec::new());
    Ok(SeparationReport {
        n,
        delta: delta.clone(),
        scheme: format!("custom[{}]", sorted.len()),
        candidate_count: sorted.len(),
        witness: kept.into_iter().map(|i| sorted[i].clone()).collect(),
    })
}

/// Sphere variant of [`separated_set_torus`], metric taken in the quotient.
pub fn separated_set_sphere(
    map: &IntMatrix2,
    candidates: &[SpherePoint],
    n: u32,
    delta: &Rat,
) -> Result<SeparationReport<SpherePoint>> {
    assert!(n >= 1 && delta.is_positive());
    let mut sorted: Vec<SpherePoint> = candidates.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    let orbits = build_orbits_sphere(map, &sorted, n)?;
    let (dn, dd) = delta_fraction(delta)?;
    let kept = greedy_separated(&orbits, dn, dd, Vec::new());
    Ok(SeparationReport {
        n,
        delta: delta.clone(),
        scheme: format!("custom[{}]", sorted.len()),
        candidate_count: sorted.len(),
        witness: kept.into_iter().map(|i| sorted[i].clone()).collect(),
    })
}

/// Verify that EVERY pair of `candidates` is `(n, delta)`-separated;
/// returns the first offending pair otherwise. This is the full pairwise
/// certificate (not a greedy lower bound).
#[allow(clippy::result_large_err)] // the witness pair is the payload
pub fn verify_pairwise_separated_torus(
    map: &IntMatrix2,
    points: &[TorusPoint],
    n: u32,
    delta: &Rat,
) -> Result<std::result::Result<(), (TorusPoint, TorusPoint)>> {
    let orbits = build_orbits_torus(map, points, n)?;
    let (dn, dd) = delta_fraction(delta)?;
    let count = orbits.count;
    // scan upper-triangle pairs; report the lexicographically first failure
    let failure = par::first_failure(count, |i| {
        ((i + 1)..count).all(|j| orbits.separated(i, j, dn, dd))
    });
    Ok(pairwise_verdict(&orbits, points, failure, dn, dd))
}

/// Sequential reference path of [`verify_pairwise_separated_torus`]; the
/// benchmarks compare the two.
#[allow(clippy::result_large_err)]
pub fn verify_pairwise_separated_torus_seq(
    map: &IntMatrix2,
    points: &[TorusPoint],
    n: u32,
    delta: &Rat,
) -> Result<std::result::Result<(), (TorusPoint, TorusPoint)>> {
    let orbits = build_orbits_torus(map, points, n)?;
    let (dn, dd) = delta_fraction(delta)?;
    let count = orbits.count;
    let failure =
        (0..count).find(|&i| !((i + 1)..count).all(|j| orbits.separated(i, j, dn, dd)));
    Ok(pairwise_verdict(&orbits, points, failure, dn, dd))
}

#[allow(clippy::result_large_err)] // the witness pair is the payload
fn pairwise_verdict(
    orbits: &LatticeOrbits,
    points: &[TorusPoint],
    failure: Option<usize>,
    dn: i64,
    dd: i64,
) -> std::result::Result<(), (TorusPoint, TorusPoint)> {
    match failure {
        None => Ok(()),
        Some(i) => {
            let j = ((i + 1)..orbits.count)
                .find(|&j| !orbits.separated(i, j, dn, dd))
                .expect("failure index has a witness partner");
            Err((points[i].clone(), points[j].clone()))
        }
    }
}

/// Sphere variant of the full pairwise certificate.
#[allow(clippy::result_large_err)]
pub fn verify_pairwise_separated_sphere(
    map: &IntMatrix2,
    points: &[SpherePoint],
    n: u32,
    delta: &Rat,
) -> Result<std::result::Result<(), (SpherePoint, SpherePoint)>> {
    let orbits = build_orbits_sphere(map, points, n)?;
    let (dn, dd) = delta_fraction(delta)?;
    let count = orbits.count;
    let failure = par::first_failure(count, |i| {
        ((i + 1)..count).all(|j| orbits.separated(i, j, dn, dd))
    });
    Ok(match failure {
        None => Ok(()),
        Some(i) => {
            let j = ((i + 1)..count)
                .find(|&j| !orbits.separated(i, j, dn, dd))
                .expect("failure index has a witness partner");
            Err((points[i].clone(), points[j].clone()))
        }
    })
}

/// Candidate schemes for the entropy estimate.
#[derive(Debug, Clone)]
pub enum CandidateScheme {
    /// Uniform rational grid of mesh `1/mesh`.
    Grid { mesh: u32 },
    /// Periodic points of period `n` (scheme depends on the depth).
    Periodic,
}

impl CandidateScheme {
    pub fn label(&self) -> String {
        match self {
            CandidateScheme::Grid { mesh } => format!("grid-1/{mesh}"),
            CandidateScheme::Periodic => "periodic".to_string(),
        }
    }
}

/// Least-squares fit of `log s_n(delta)` against `n`.
#[derive(Debug, Clone)]
pub struct EntropyFit {
    pub space: Space,
    pub scheme: String,
    pub delta: Rat,
    pub rows: Vec<(u32, usize)>,
    pub slope: f64,
    pub intercept: f64,
    pub max_residual: f64,
    /// Set when the counts carry no growth signal (all equal).
    pub degenerate: bool,
}

impl EntropyFit {
    /// CSV with columns `n,delta,count,scheme` and a trailing comment row
    /// carrying the fit.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,delta,count,scheme\n");
        for (n, count) in &self.rows {
            out.push_str(&format!(
                "{},{}/{},{},{}\n",
                n,
                self.delta.numer(),
                self.delta.denom(),
                count,
                self.scheme
            ));
        }
        out.push_str(&format!(
            "# slope={:.6} intercept={:.6} max_residual={:.6} degenerate={}\n",
            self.slope, self.intercept, self.max_residual, self.degenerate
        ));
        out
    }
}

fn torus_grid(mesh: u32) -> Vec<TorusPoint> {
    let m = mesh as i64;
    let mut pts = Vec::with_capacity((mesh as usize).pow(2));
    for i in 0..m {
        for j in 0..m {
            pts.push(TorusPoint::from_i64(i, m, j, m));
        }
    }
    pts
}

fn sphere_grid(mesh: u32) -> Vec<SpherePoint> {
    let mut classes: Vec<SpherePoint> = torus_grid(mesh)
        .iter()
        .map(SpherePoint::project)
        .collect();
    classes.sort_unstable();
    classes.dedup();
    classes
}

/// Slope of `log s_n(delta)` over `n_range`.
///
/// For the grid scheme the candidate set is fixed and the greedy sets are
/// grown monotonically across `n` (a set separated at depth `n` stays
/// separated at `n+1`, so the previous witness seeds the next search).
/// For the periodic scheme candidates are `P_n` resp. `P_n(g)` per depth.
pub fn entropy_estimate(
    map: &IntMatrix2,
    space: Space,
    scheme: &CandidateScheme,
    delta: &Rat,
    n_range: RangeInclusive<u32>,
) -> Result<EntropyFit> {
    assert!(
        n_range.end() >= n_range.start(),
        "empty depth range for the entropy fit"
    );
    let (dn, dd) = delta_fraction(delta)?;
    let mut rows: Vec<(u32, usize)> = Vec::new();

    match (scheme, space) {
        (CandidateScheme::Grid { mesh }, Space::Torus) => {
            let candidates = torus_grid(*mesh);
            let n_max = *n_range.end();
            let orbits = build_orbits_torus(map, &candidates, n_max)?;
            let mut kept: Vec<usize> = Vec::new();
            for n in n_range.clone() {
                let restricted = LatticeOrbits {
                    q: orbits.q,
                    steps: orbits.steps,
                    flat: restrict_depth(&orbits, n as usize),
                    count: orbits.count,
                    sphere: false,
                };
                kept = greedy_separated(&restricted, dn, dd, kept);
                rows.push((n, kept.len()));
            }
        }
        (CandidateScheme::Grid { mesh }, Space::Sphere) => {
            let candidates = sphere_grid(*mesh);
            let n_max = *n_range.end();
            let orbits = build_orbits_sphere(map, &candidates, n_max)?;
            let mut kept: Vec<usize> = Vec::new();
            for n in n_range.clone() {
                let restricted = LatticeOrbits {
                    q: orbits.q,
                    steps: orbits.steps,
                    flat: restrict_depth(&orbits, n as usize),
                    count: orbits.count,
                    sphere: true,
                };
                kept = greedy_separated(&restricted, dn, dd, kept);
                rows.push((n, kept.len()));
            }
        }
        (CandidateScheme::Periodic, Space::Torus) => {
            for n in n_range.clone() {
                let set = periodic_points(map, n)?;
                let orbits = build_orbits_torus(map, &set.points, n)?;
                let kept = greedy_separated(&orbits, dn, dd, Vec::new());
                rows.push((n, kept.len()));
            }
        }
        (CandidateScheme::Periodic, Space::Sphere) => {
            for n in n_range.clone() {
                let set = sphere_periodic_points(map, n)?;
                let orbits = build_orbits_sphere(map, &set.points, n)?;
                let kept = greedy_separated(&orbits, dn, dd, Vec::new());
                rows.push((n, kept.len()));
            }
        }
    }

    let degenerate = rows.windows(2).all(|w| w[0].1 == w[1].1);
    let (slope, intercept, max_residual) = fit_log_counts(&rows);
    Ok(EntropyFit {
        space,
        scheme: scheme.label(),
        delta: delta.clone(),
        rows,
        slope,
        intercept,
        max_residual,
        degenerate,
    })
}

/// Copy of the orbit table truncated to the first `n` iterates; the
/// stride stays the same so index math is shared.
fn restrict_depth(orbits: &LatticeOrbits, n: usize) -> Vec<(i64, i64)> {
    let mut flat = Vec::with_capacity(orbits.count * orbits.steps);
    for i in 0..orbits.count {
        let base = i * orbits.steps;
        for k in 0..orbits.steps {
            // repeat the last used step beyond depth n; distances repeat,
            // so separation at depth n is unchanged
            let k_eff = k.min(n - 1);
            flat.push(orbits.flat[base + k_eff]);
        }
    }
    flat
}

fn fit_log_counts(rows: &[(u32, usize)]) -> (f64, f64, f64) {
    let m = rows.len() as f64;
    if rows.len() < 2 {
        return (0.0, rows.first().map(|r| (r.1 as f64).ln()).unwrap_or(0.0), 0.0);
    }
    let xs: Vec<f64> = rows.iter().map(|&(n, _)| n as f64).collect();
    let ys: Vec<f64> = rows.iter().map(|&(_, c)| (c as f64).ln()).collect();
    let x_mean = xs.iter().sum::<f64>() / m;
    let y_mean = ys.iter().sum::<f64>() / m;
    let sxx: f64 = xs.iter().map(|x| (x - x_mean).powi(2)).sum();
    let sxy: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (x - x_mean) * (y - y_mean))
        .sum();
    let slope = if sxx == 0.0 { 0.0 } else { sxy / sxx };
    let intercept = y_mean - slope * x_mean;
    let max_residual = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - (intercept + slope * x)).abs())
        .fold(0.0, f64::max);
    (slope, intercept, max_residual)
}

/// One row of the exact periodic-growth sandwich
/// `lambda^n <= Per_n(g) <= 2 lambda^n`.
#[derive(Debug, Clone)]
pub struct GrowthRow {
    pub n: u32,
    /// `Per_n(g) = trace(A^n)`, exact.
    pub sphere_count: BigInt,
    /// `lambda^n <= count`, decided in quadratic-field arithmetic.
    pub lower_ok: bool,
    /// `count <= 2 lambda^n`, decided in quadratic-field arithmetic.
    pub upper_ok: bool,
    /// `log(count) / n`.
    pub log_rate: f64,
}

/// Exact two-sided growth check for `n = 1..=n_max`, plus the trace
/// identity `lambda^n + lambda^{-n} = trace(A^n)` as an internal
/// cross-check of the quadratic arithmetic.
pub fn periodic_growth(a: &IntMatrix2, n_max: u32) -> Result<Vec<GrowthRow>> {
    let eig = EigenData::for_matrix(a)?;
    let mut rows = Vec::with_capacity(n_max as usize);
    for n in 1..=n_max {
        let trace = a.pow(n).trace();
        let lambda_n = eig.lambda.pow(n as i64);
        let identity = &lambda_n + &eig.lambda_inv.pow(n as i64);
        if identity.to_rat() != Some(Rat::from_integer(trace.clone())) {
            return Err(Error::CountMismatch(format!(
                "trace identity failed at n = {n}"
            )));
        }
        let count_q = QuadNumber::from_rat(Rat::from_integer(trace.clone()), eig.delta.clone());
        let two_lambda_n = &QuadNumber::from_int(2, eig.delta.clone()) * &lambda_n;
        let log_rate = trace.to_f64().map(|t| t.ln()).unwrap_or(f64::NAN) / n as f64;
        rows.push(GrowthRow {
            n,
            sphere_count: trace,
            lower_ok: lambda_n <= count_q,
            upper_ok: count_q <= two_lambda_n,
            log_rate,
        });
    }
    Ok(rows)
}
