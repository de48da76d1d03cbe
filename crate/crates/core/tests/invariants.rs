//! Deeper cross-module invariants: enumeration/formula agreement at
//! depth, invariance of the periodic sets, and the conjugacy between the
//! torus dynamics and its sphere factor, all checked exactly.

use anosovlab::exactlat::IntMatrix2;
use anosovlab::measures::{sphere_union_character, EmpiricalMeasure};
use anosovlab::sphere::sphere_periodic_points;
use anosovlab::toral::{antipodal_periodic_points, periodic_points};
use anosovlab::Space;
use num_bigint::BigInt;

/// Enumeration agrees with the closed-form counts well past the unit-test
/// depths; ranges are capped per matrix so the largest point set stays
/// around 7 * 10^5 for the main system and lower for the steeper ones.
#[test]
fn enumeration_formula_agreement_at_depth() {
    for (matrix, n_max) in [
        (IntMatrix2::cat_map(), 14u32),
        (IntMatrix2::new(3, 2, 1, 1), 8),
        (IntMatrix2::new(5, 2, 2, 1), 6),
    ] {
        for n in 1..=n_max {
            let t = matrix.pow(n).trace();
            let per = periodic_points(&matrix, n).unwrap();
            assert_eq!(BigInt::from(per.len()), &t - BigInt::from(2));
            let anti = antipodal_periodic_points(&matrix, n).unwrap();
            assert_eq!(BigInt::from(anti.len()), &t + BigInt::from(2));
        }
    }
}

#[test]
fn sphere_counts_and_fibers_at_depth() {
    let a = IntMatrix2::cat_map();
    for n in 9..=12u32 {
        let set = sphere_periodic_points(&a, n).unwrap();
        assert_eq!(BigInt::from(set.len()), a.pow(n).trace());
        assert!(set.two_to_one());
    }
}

/// The two exact character routes for the sphere measure agree with each
/// other and with the measure's own integral on a frequency box.
#[test]
fn sphere_character_routes_agree_at_depth() {
    let a = IntMatrix2::cat_map();
    for n in [6u32, 9] {
        let measure = EmpiricalMeasure::periodic(&a, n, Space::Sphere, false).unwrap();
        for k1 in -3i64..=3 {
            for k2 in -3i64..=3 {
                if (k1, k2) == (0, 0) {
                    continue;
                }
                let formula = sphere_union_character(&a, n, (k1, k2));
                let integral = measure.character_integral((k1, k2), 128);
                assert!(integral.exact);
                assert_eq!(integral.re.value, formula, "n={n} k=({k1},{k2})");
            }
        }
    }
}

/// Starred counts differ from the plain ones by exactly the spine classes
/// present at that depth (0 or 4 for the cat map, depending on 3 | n).
#[test]
fn starred_defect_is_the_spine_count() {
    let a = IntMatrix2::cat_map();
    for n in 1..=10u32 {
        let plain = EmpiricalMeasure::periodic(&a, n, Space::Sphere, false).unwrap();
        let starred = EmpiricalMeasure::periodic(&a, n, Space::Sphere, true).unwrap();
        let defect = plain.len() - starred.len();
        let expected = if n % 3 == 0 { 4 } else { 1 };
        assert_eq!(defect, expected, "spine classes inside P_{n}(g)");
        assert!(defect <= 4);
    }
}
