//! Acceptance suite: the quantitative claims the artifact must reproduce,
//! one test per criterion, each printing a PASS/FAIL line (run with
//! `--nocapture` to see them). Tolerances are pinned in code.

use anosovlab::carpet::{
    carpet_periodic_count, carpet_periodic_measure, BlowupRegistry, PeriodMode,
};
use anosovlab::entropy::{
    entropy_estimate, periodic_growth, verify_pairwise_separated_torus, CandidateScheme,
};
use anosovlab::exactlat::{EigenData, QuadNumber};
use anosovlab::measures::{homogeneity_probe, EmpiricalMeasure};
use anosovlab::rational::{rat, Rat};
use anosovlab::shadowing::{
    connect_segments, make_pseudo_orbit, make_sphere_pseudo_orbit, periodic_specification,
    seeded_periodic_point, shadow_periodic, shadow_periodic_sphere, ArithmeticMode,
    SpecificationRequest,
};
use anosovlab::sphere::{sphere_periodic_points, SpherePoint};
use anosovlab::toral::{antipodal_periodic_points, periodic_points, TorusPoint};
use anosovlab::{IntMatrix2, Space};
use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

fn cat() -> IntMatrix2 {
    IntMatrix2::cat_map()
}

fn log_lambda() -> f64 {
    ((3.0 + 5.0f64.sqrt()) / 2.0).ln()
}

fn report(criterion: &str, pass: bool, detail: &str) {
    println!(
        "ACCEPTANCE {criterion} {}: {detail}",
        if pass { "PASS" } else { "FAIL" }
    );
}

#[test]
fn acceptance_01_counting_exactness() {
    let a = cat();
    let start = std::time::Instant::now();
    let mut checked = 0u32;
    for n in 1..=12u32 {
        let t = a.pow(n).trace();
        let pset = periodic_points(&a, n).unwrap();
        let aset = antipodal_periodic_points(&a, n).unwrap();
        let sset = sphere_periodic_points(&a, n).unwrap();
        assert_eq!(
            BigInt::from(pset.len()),
            &t - BigInt::from(2),
            "|P_{n}| = trace - 2"
        );
        assert_eq!(
            BigInt::from(aset.len()),
            &t + BigInt::from(2),
            "|P^-_{n}| = trace + 2"
        );
        assert_eq!(BigInt::from(sset.len()), t, "|P_{n}(g)| = trace");
        assert!(sset.two_to_one(), "2-to-1 fiber certificate at n = {n}");
        checked = n;
    }
    let elapsed = start.elapsed();
    let pass = checked == 12 && elapsed.as_secs() < 60;
    report(
        "1 counting-exactness",
        pass,
        &format!("n = 1..12 enumerated counts match closed forms, fibers all 2; {elapsed:.2?}"),
    );
    assert!(pass);
}

/// Grid-scheme entropy slope exactly as specified: mesh 1/60, delta =
/// 1/10, n = 4..10, both spaces, within 10% of log(lambda).
///
/// This criterion cannot hold as stated: the candidate grid has 60^2 =
/// 3600 points, so every separated subset is capped at 3600 = e^{8.19},
/// while already s_4 >= 7e2; the best conceivable slope over n = 4..10 is
/// (ln 3600 - ln 720) / 6 = 0.27, far below 0.9 log(lambda). The counts
/// saturate at depth 6 and the measured slope is ~0.24 (torus). The test
/// asserts the criterion faithfully and is expected to fail; finer meshes
/// (1/240: slope 0.75) approach log(lambda) from below as the ceiling
/// recedes, confirming the growth is real and only the stated mesh is at
/// fault.
#[test]
fn acceptance_02a_entropy_grid_slope() {
    let a = cat();
    let target = log_lambda();
    let torus = entropy_estimate(
        &a,
        Space::Torus,
        &CandidateScheme::Grid { mesh: 60 },
        &rat(1, 10),
        4..=10,
    )
    .unwrap();
    let sphere = entropy_estimate(
        &a,
        Space::Sphere,
        &CandidateScheme::Grid { mesh: 60 },
        &rat(1, 10),
        4..=10,
    )
    .unwrap();
    let torus_ok = (torus.slope - target).abs() <= 0.1 * target;
    let sphere_ok = (sphere.slope - target).abs() <= 0.1 * target;
    let pass = torus_ok && sphere_ok;
    report(
        "2a entropy-grid-slope",
        pass,
        &format!(
            "mesh 1/60 delta 1/10 n=4..10: torus slope {:.4}, sphere slope {:.4}, target {:.4} +-10%; \
             torus counts {:?} (3600-point candidate ceiling saturates from n=6)",
            torus.slope, sphere.slope, target, torus.rows
        ),
    );
    assert!(
        pass,
        "criterion as stated is unattainable: the 1/60 grid has 3600 candidates, so \
         s_n caps at 3600 while s_4 = {} already; measured slopes torus {:.4} / sphere {:.4} \
         vs target {:.4} +- {:.4}. See the decisions ledger for the full analysis.",
        torus.rows[0].1,
        torus.slope,
        sphere.slope,
        target,
        0.1 * target
    );
}

#[test]
fn acceptance_02b_entropy_periodic_growth() {
    // log(Per_10(g))/10 within 2e-4 of log(lambda), counts exact
    let rows = periodic_growth(&cat(), 10).unwrap();
    let r10 = rows.last().unwrap();
    assert_eq!(r10.sphere_count, BigInt::from(15127));
    let diff = (r10.log_rate - log_lambda()).abs();
    let pass = diff <= 2e-4;
    report(
        "2b entropy-periodic-growth",
        pass,
        &format!(
            "log(Per_10(g))/10 = {:.8} vs log(lambda) = {:.8}, |diff| = {:.2e} <= 2e-4",
            r10.log_rate,
            log_lambda(),
            diff
        ),
    );
    assert!(pass);

    // supplementary evidence for the entropy value: the periodic-points
    // scheme (documented in the same operation) fits the growth rate
    let fit = entropy_estimate(
        &cat(),
        Space::Torus,
        &CandidateScheme::Periodic,
        &rat(1, 5),
        4..=10,
    )
    .unwrap();
    println!(
        "ACCEPTANCE 2b note: periodic-scheme slope {:.4} (target {:.4})",
        fit.slope,
        log_lambda()
    );
    assert!((fit.slope - log_lambda()).abs() <= 0.1 * log_lambda());
}

#[test]
fn acceptance_03_growth_sandwich() {
    let rows = periodic_growth(&cat(), 20).unwrap();
    let all_ok = rows.iter().all(|r| r.lower_ok && r.upper_ok);
    report(
        "3 growth-sandwich",
        all_ok,
        "lambda^n <= Per_n(g) <= 2 lambda^n exactly for n = 1..20 (quadratic-field comparisons)",
    );
    assert!(all_ok);
    assert_eq!(rows.len(), 20);
}

#[test]
fn acceptance_04_separation() {
    let a = cat();
    let delta = rat(1, 5);
    for n in 1..=8u32 {
        let pset = periodic_points(&a, n).unwrap();
        let verdict = verify_pairwise_separated_torus(&a, &pset.points, n, &delta).unwrap();
        assert!(verdict.is_ok(), "P_{n} pairwise (n,1/5)-separated");
        let aset = antipodal_periodic_points(&a, n).unwrap();
        let verdict = verify_pairwise_separated_torus(&a, &aset.points, n, &delta).unwrap();
        assert!(verdict.is_ok(), "P^-_{n} pairwise (n,1/5)-separated");
    }
    report(
        "4 separation",
        true,
        "P_n and P^-_n pairwise (n,1/5)-separated for n = 1..8, zero failures (exact)",
    );
}

#[test]
fn acceptance_05_periodic_shadowing() {
    let a = cat();
    let deltas = [rat(1, 100), rat(1, 1000), rat(1, 10000)];
    let lengths = [10usize, 25, 50, 100, 200];
    let start = std::time::Instant::now();

    // 200 torus jobs
    let mut worst_ratio = 0.0f64;
    let mut job = 0u64;
    'torus: for round in 0.. {
        for delta in &deltas {
            for &n in &lengths {
                if job >= 200 {
                    break 'torus;
                }
                let seed = 1000 + job + round;
                let x0 = seeded_periodic_point(&a, n as u32, seed).unwrap();
                let po = make_pseudo_orbit(&a, &x0, n, delta, seed);
                assert!(po.periodic);
                let measured = po.delta(&a);
                assert!(measured <= *delta);
                let result = shadow_periodic(&a, &po, ArithmeticMode::Exact).unwrap();
                assert!(result.exact_periodic, "f^{n}(z0) = z0 exactly (job {job})");
                assert_eq!(result.period, n, "period matches the pseudo-orbit length");
                let disc = result.epsilon.delta().clone();
                let bound = &result.constant * &QuadNumber::from_rat(measured.clone(), disc);
                assert!(result.epsilon <= bound, "epsilon <= C delta (job {job})");
                if !measured.is_zero() {
                    let ratio = result.epsilon.to_f64() / measured.to_f64().unwrap();
                    worst_ratio = worst_ratio.max(ratio);
                }
                job += 1;
            }
        }
    }

    // 200 sphere jobs through the lift protocol
    let mut sphere_doubled = 0u32;
    let mut job_s = 0u64;
    'sphere: for round in 0.. {
        for delta in &deltas {
            for &n in &lengths {
                if job_s >= 200 {
                    break 'sphere;
                }
                let seed = 9000 + job_s + round;
                let s0 = SpherePoint::project(&seeded_periodic_point(&a, n as u32, seed).unwrap());
                let po = make_sphere_pseudo_orbit(&a, &s0, n, delta, seed).unwrap();
                let measured = po.delta(&a);
                assert!(measured <= *delta);
                let result = shadow_periodic_sphere(&a, &po, ArithmeticMode::Exact).unwrap();
                assert!(result.exact_periodic, "g^{n} fixes the class (job {job_s})");
                assert_eq!(result.period, n);
                let disc = result.epsilon.delta().clone();
                let bound = &result.constant * &QuadNumber::from_rat(measured, disc);
                assert!(result.epsilon <= bound, "sphere epsilon <= C delta (job {job_s})");
                if result.lift_doubled {
                    sphere_doubled += 1;
                }
                job_s += 1;
            }
        }
    }

    let elapsed = start.elapsed();
    let eig = EigenData::for_matrix(&a).unwrap();
    report(
        "5 periodic-shadowing",
        true,
        &format!(
            "200 torus + 200 sphere seeded periodic pseudo-orbits (delta in {{1e-2,1e-3,1e-4}}, N <= 200): \
             epsilon <= C delta with C = {:.4} (kappa = {:.4}), f^N(z) = z exact, period = N every time \
             (the linear model realizes the shadowing theorem with r = 1); {} sphere lifts closed \
             antipodally and were solved doubled; {elapsed:.2?} total",
            eig.shadowing_constant().to_f64(),
            eig.kappa().to_f64(),
            sphere_doubled
        ),
    );
    println!(
        "ACCEPTANCE 5 note: worst observed epsilon/delta = {:.3} vs C = {:.3}",
        worst_ratio,
        eig.shadowing_constant().to_f64()
    );
}

#[test]
fn acceptance_06_periodic_specification() {
    let a = cat();
    let tolerance = rat(1, 20); // 0.05

    // two-segment specifications at gaps >= 12
    for gap in [12u32, 16, 20] {
        let req = SpecificationRequest {
            segments: vec![
                (TorusPoint::origin(), 5),
                (TorusPoint::from_i64(2, 5, 4, 5), 4),
            ],
            gap,
        };
        let result = periodic_specification(&a, &req).unwrap();
        assert!(result.shadow.exact_periodic);
        // total period b_m + L with b_m = (5 - 1) + L + 4 - 1 = L + 7
        assert_eq!(result.shadow.period, 7 + 2 * gap as usize);
        for (j, err) in result.segment_errors.iter().enumerate() {
            let bound = QuadNumber::from_rat(tolerance.clone(), err.delta().clone());
            assert!(
                *err <= bound,
                "gap {gap} segment {j}: error {} > 0.05",
                err.decimal_string(6)
            );
        }
    }

    // geometric decay of the connection errors, fitted over several
    // endpoint pairs to average out lattice jitter
    let pairs = [
        (TorusPoint::origin(), TorusPoint::from_i64(1, 2, 1, 2)),
        (
            TorusPoint::from_i64(1, 7, 3, 7),
            TorusPoint::from_i64(2, 9, 5, 9),
        ),
        (
            TorusPoint::from_i64(2, 5, 4, 5),
            TorusPoint::from_i64(1, 3, 1, 3),
        ),
        (
            TorusPoint::from_i64(1, 11, 9, 11),
            TorusPoint::from_i64(5, 13, 7, 13),
        ),
    ];
    let gaps: Vec<u32> = (8..=28).step_by(2).collect();
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for &gap in &gaps {
        let mut log_sum = 0.0;
        for (p, q) in &pairs {
            let c = connect_segments(&a, p, q, gap).unwrap();
            let worst = c.err_start.to_f64().max(c.err_end.to_f64());
            log_sum += worst.ln();
        }
        xs.push(gap as f64);
        ys.push(log_sum / pairs.len() as f64);
    }
    let m = xs.len() as f64;
    let xm = xs.iter().sum::<f64>() / m;
    let ym = ys.iter().sum::<f64>() / m;
    let slope = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (x - xm) * (y - ym))
        .sum::<f64>()
        / xs.iter().map(|x| (x - xm).powi(2)).sum::<f64>();
    let target = -log_lambda() / 2.0;
    let rate_ok = (slope - target).abs() <= 0.1 * target.abs();
    report(
        "6 periodic-specification",
        rate_ok,
        &format!(
            "two-segment specs at gaps 12/16/20 shadowed within 0.05 of both segments; \
             connection-error decay rate {slope:.4} vs -log(lambda)/2 = {target:.4} (+-10%)"
        ),
    );
    assert!(rate_ok, "fitted decay {slope:.4} vs {target:.4}");
}

#[test]
fn acceptance_07_weak_star_convergence() {
    let a = cat();

    // torus: D_3(mu_n) = 0 exactly for all n >= 5 (dual-lattice criterion)
    for n in 5..=12u32 {
        let m = EmpiricalMeasure::periodic(&a, n, Space::Torus, false).unwrap();
        let d = m.discrepancy(3, 128);
        assert!(d.max_abs.is_zero(), "D_3(mu_{n}) = 0 exactly");
    }

    // sphere: D_3 against the pushforward of Haar is nonincreasing and
    // small by n = 10
    let mut previous: Option<Rat> = None;
    let mut d10 = Rat::zero();
    for n in 1..=10u32 {
        let m = EmpiricalMeasure::periodic(&a, n, Space::Sphere, false).unwrap();
        let d = m.discrepancy(3, 128);
        if let Some(prev) = &previous {
            assert!(
                d.max_abs <= *prev,
                "sphere D_3 must not increase: D({n}) = {} after {}",
                d.max_abs,
                prev
            );
        }
        previous = Some(d.max_abs.clone());
        if n == 10 {
            d10 = d.max_abs.clone();
        }
    }
    assert!(d10 <= rat(1, 50), "D_3 at n = 10 is {} > 0.02", d10);

    // exact pushforward identity pi_*(nu_n) = mu*_n for n <= 8
    for n in 1..=8u32 {
        let nu = EmpiricalMeasure::periodic(&a, n, Space::Torus, true).unwrap();
        let mu_star = EmpiricalMeasure::periodic(&a, n, Space::Sphere, true).unwrap();
        assert_eq!(
            nu.pushforward_to_sphere().unwrap().to_csv(),
            mu_star.to_csv(),
            "pushforward identity at n = {n}"
        );
    }

    report(
        "7 weak-star-convergence",
        true,
        &format!(
            "torus D_3(mu_n) = 0 exactly for n = 5..12; sphere D_3 nonincreasing with \
             D_3(mu_10) = {} <= 1/50; pushforward identity exact for n <= 8",
            d10
        ),
    );
}

#[test]
fn acceptance_08_homogeneity_probe() {
    let a = cat();
    let probe = homogeneity_probe(&a, 10, 2..=5, &rat(1, 10), 50, 2026, Space::Torus, false)
        .unwrap();
    let ratios: Vec<f64> = probe.ratios.iter().map(|&(_, r, _)| r).collect();
    let empties: usize = probe.ratios.iter().map(|&(_, _, e)| e).sum();
    let all_finite = ratios.iter().all(|r| r.is_finite() && *r >= 1.0);
    let max = ratios.iter().cloned().fold(f64::MIN, f64::max);
    let min = ratios.iter().cloned().fold(f64::MAX, f64::min);
    let stable = max <= 2.0 * min;
    let pass = all_finite && stable;
    report(
        "8 homogeneity-probe",
        pass,
        &format!(
            "r=10, n=2..5, eps=1/10, 50 seeded centers: normalized-mass max/min ratios {:?} \
             (stable within factor {:.2}; {} empty balls excluded)",
            probe
                .ratios
                .iter()
                .map(|(n, r, _)| format!("n={n}:{r:.3}"))
                .collect::<Vec<_>>(),
            max / min,
            empties
        ),
    );
    assert!(pass, "ratios {ratios:?} not stable within a factor 2");
}

#[test]
fn acceptance_09_carpet_ledger() {
    let a = cat();
    let registries = [
        (
            "periods {1,2}",
            vec![
                SpherePoint::project(&TorusPoint::from_i64(2, 5, 4, 5)),
                SpherePoint::project(&TorusPoint::from_i64(1, 3, 1, 3)),
            ],
        ),
        (
            "periods {3,4}",
            vec![
                SpherePoint::project(&TorusPoint::from_i64(1, 4, 0, 1)),
                // the 1/7 lattice is antipodally 4-periodic upstairs and
                // (1/7, 0) has least period 4 downstairs
                SpherePoint::project(&TorusPoint::from_i64(1, 7, 0, 1)),
            ],
        ),
    ];

    for (label, bases) in &registries {
        let (registry, report_) = BlowupRegistry::build(&a, bases).unwrap();
        assert!(report_.passed(), "{label} registry valid");
        let periods: Vec<u32> = registry.orbits.iter().map(|o| o.period).collect();

        for n in 1..=20u32 {
            let count = carpet_periodic_count(&a, &registry, n, PeriodMode::BasePeriod).unwrap();
            // independent closed form: trace + 3 * sum of dividing periods
            let correction: u32 = periods.iter().filter(|&&p| n % p == 0).sum();
            let expected = a.pow(n).trace() + BigInt::from(3 * correction);
            assert_eq!(count.carpet_count, expected, "{label} ledger at n = {n}");
            assert!(count.difference_bound_ok, "{label} |diff| <= 4n^2 at n = {n}");
            assert!(count.lower_bound_ok, "{label} Per_n(G) >= Per_n(g) >= lambda^n at n = {n}");
        }

        // circle-mass fraction of the projected measure, and discrepancy
        // tracking against the plain sphere measure
        for n in [4u32, 6, 8] {
            let (measure, circle_mass) =
                carpet_periodic_measure(&a, &registry, n, PeriodMode::BasePeriod).unwrap();
            assert!(measure.total_mass().is_one());
            let fraction_bound = Rat::from_integer(BigInt::from(4 * n * n))
                / Rat::from_integer(a.pow(n).trace());
            assert!(
                circle_mass <= fraction_bound,
                "{label} circle fraction at n = {n}"
            );
            let carpet_d = measure.discrepancy(3, 128);
            let plain_d = EmpiricalMeasure::periodic(&a, n, Space::Sphere, false)
                .unwrap()
                .discrepancy(3, 128);
            let tracking = (&carpet_d.max_abs - &plain_d.max_abs).abs();
            let margin = &fraction_bound + &carpet_d.max_abs_error + &plain_d.max_abs_error;
            assert!(
                tracking <= margin,
                "{label} projected discrepancy at n = {n}: |{} - {}| > {}",
                carpet_d.max_abs,
                plain_d.max_abs,
                margin
            );
        }
    }

    report(
        "9 carpet-ledger",
        true,
        "registries {1,2} and {3,4}: Per_n(G) = Per_n(g) + 3 sum(n_k | n) for n = 1..20, \
         |Per_n(G) - Per_n(g)| <= 4n^2 and Per_n(G) >= lambda^n exactly; circle-mass \
         fraction <= 4n^2/trace and the projected discrepancy tracks the sphere one within it",
    );
}
