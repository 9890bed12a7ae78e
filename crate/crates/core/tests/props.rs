//! Randomized invariants over the exact-arithmetic core.

use num_bigint::BigInt;
use proptest::prelude::*;

use semitorus::angle::{eval_angle, AngleSpec};
use semitorus::arith::{
    circle_distance, preimage_arcs, reduce_mod1, times_n, Arc, Rational, TorusPoint,
};
use semitorus::equidist::{star_discrepancy, weyl_sum, CertTorus};
use semitorus::measure::{arc_mass, MeasureModel};
use semitorus::semigroup::{contains, enumerate_up_to, GeneratorSet};

fn rational() -> impl Strategy<Value = Rational> {
    (any::<i64>(), 1..100_000i64)
        .prop_map(|(n, d)| Rational::new(BigInt::from(n), BigInt::from(d)))
}

fn point() -> impl Strategy<Value = TorusPoint> {
    rational().prop_map(|r| reduce_mod1(&r))
}

fn arc() -> impl Strategy<Value = Arc> {
    (point(), 1..10_000i64, 1..10_000i64).prop_map(|(s, a, b)| {
        let len = Rational::new(BigInt::from(a.min(b)), BigInt::from(a.max(b).max(2)));
        Arc::new(s, len).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    // T_m(T_n(x)) = T_{mn}(x)
    #[test]
    fn action_composes(x in point(), m in 2u64..500, n in 2u64..500) {
        prop_assert_eq!(times_n(&times_n(&x, n), m), times_n(&x, m * n));
    }

    // circle distance is a metric bounded by 1/2
    #[test]
    fn distance_metric(x in point(), y in point(), z in point()) {
        let d = circle_distance(&x, &y);
        prop_assert!(d >= Rational::new(BigInt::from(0), BigInt::from(1)));
        prop_assert!(d <= Rational::new(BigInt::from(1), BigInt::from(2)));
        prop_assert_eq!(circle_distance(&y, &x), d.clone());
        prop_assert_eq!(d.clone() == Rational::new(BigInt::from(0), BigInt::from(1)), x == y);
        let dz = circle_distance(&x, &z) + circle_distance(&z, &y);
        prop_assert!(d <= dz);
    }

    // the q preimage arcs of an arc are disjoint and T_q maps them back in
    #[test]
    fn preimages_partition(a in arc(), q in 2u64..30) {
        let pres = preimage_arcs(&a, q).unwrap();
        prop_assert_eq!(pres.len(), q as usize);
        for (i, p) in pres.iter().enumerate() {
            for other in &pres[i + 1..] {
                prop_assert!(!p.intersects(other));
            }
            // arc endpoints map onto the original's endpoints
            prop_assert!(a.contains(&times_n(&p.end(), q)));
        }
        // Lebesgue mass is preserved by the preimage decomposition
        let total: Rational = pres
            .iter()
            .map(|p| arc_mass(&MeasureModel::Lebesgue, p).unwrap())
            .sum();
        prop_assert_eq!(total, arc_mass(&MeasureModel::Lebesgue, &a).unwrap());
    }

    // splitting an arc in two preserves every model's mass
    #[test]
    fn arc_mass_additive(a in arc(), num in 1i64..99) {
        let cut = a.length() * Rational::new(BigInt::from(num), BigInt::from(100));
        let first = Arc::new(a.start().clone(), cut.clone()).unwrap();
        let second = Arc::new(first.end(), a.length() - &cut).unwrap();
        for mu in [
            MeasureModel::Lebesgue,
            MeasureModel::cantor(),
            MeasureModel::atomic(vec![
                (reduce_mod1(&Rational::new(BigInt::from(1), BigInt::from(7))),
                 Rational::new(BigInt::from(2), BigInt::from(5))),
                (reduce_mod1(&Rational::new(BigInt::from(3), BigInt::from(4))),
                 Rational::new(BigInt::from(3), BigInt::from(5))),
            ]).unwrap(),
        ] {
            let whole = arc_mass(&mu, &a).unwrap();
            let parts = arc_mass(&mu, &first).unwrap() + arc_mass(&mu, &second).unwrap();
            prop_assert_eq!(whole, parts);
        }
    }

    // enumeration and the divisibility-based membership test agree
    #[test]
    fn contains_matches_enumeration(gens in proptest::collection::vec(2u64..30, 1..4)) {
        let gens = GeneratorSet::new(gens).unwrap();
        let members: std::collections::HashSet<u64> =
            enumerate_up_to(&gens, 500).collect();
        for n in 1..=500u64 {
            prop_assert_eq!(members.contains(&n), contains(&gens, n), "n = {}", n);
        }
    }

    // doubling the precision keeps the certified enclosure nested
    #[test]
    fn angle_refinement_nested(b in 1i64..50, c in 1i64..50, d in 2u64..80) {
        prop_assume!(!is_square(d));
        let spec = AngleSpec::quadratic(0, b, c, d).unwrap();
        let coarse = eval_angle(&spec, 64).unwrap();
        let fine = eval_angle(&spec, 256).unwrap();
        let (clo, chi) = (coarse.value() - coarse.error_radius(),
                         coarse.value() + coarse.error_radius());
        let (flo, fhi) = (fine.value() - fine.error_radius(),
                         fine.value() + fine.error_radius());
        prop_assert!(clo <= flo && fhi <= chi);
    }

    // |weyl_sum| <= 1 within certified error
    #[test]
    fn weyl_modulus_bound(xs in proptest::collection::vec(point(), 1..12), h in 1i64..5) {
        let pts: Vec<CertTorus> = xs.iter().map(CertTorus::exact).collect();
        let z = weyl_sum(&pts, h).unwrap();
        let slack = Rational::new(BigInt::from(101), BigInt::from(100));
        prop_assert!(z.modulus_squared_upper() <= slack);
    }

    // discrepancy: permutation invariant and >= 1/(2N)
    #[test]
    fn discrepancy_bounds(mut xs in proptest::collection::vec(point(), 1..20)) {
        let pts: Vec<CertTorus> = xs.iter().map(CertTorus::exact).collect();
        let a = star_discrepancy(&pts).unwrap();
        xs.reverse();
        let pts: Vec<CertTorus> = xs.iter().map(CertTorus::exact).collect();
        let b = star_discrepancy(&pts).unwrap();
        prop_assert_eq!(&a.d_star_exact, &b.d_star_exact);
        prop_assert!(a.d_star >= 1.0 / (2.0 * xs.len() as f64) - 1e-12);
        prop_assert!(a.d_star <= 1.0);
    }
}

fn is_square(d: u64) -> bool {
    let r = (d as f64).sqrt() as u64;
    (r.saturating_sub(1)..=r + 1).any(|k| k * k == d)
}
