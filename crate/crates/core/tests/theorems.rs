use proptest::prelude::*;
use talbot_core::{
    conjecture_scan, detect_plateaux, fragmentation_layout, has_fragmentation,
    nonfrag_prediction, rational::factorize, two_n_lambda_odd, PlateauKind, Rational, WellParams,
};

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

#[test]
fn fragmentation_layouts_match_detector() {
    let lambdas = [Rational::frac(107, 10), Rational::frac(21, 2), Rational::integer(8)];
    let mut checked = 0;
    for lambda in &lambdas {
        for q in 1..=15i64 {
            for a in (0..q).filter(|&a| gcd(a, q) == 1) {
                for n in 1..=3 {
                    let p = WellParams::new(lambda.clone(), n, Rational::frac(a, q)).unwrap();
                    if !has_fragmentation(&p) {
                        continue;
                    }
                    let layout = fragmentation_layout(&p).unwrap();
                    let rep = detect_plateaux(&p).unwrap();
                    assert!(rep.fragmentation);
                    assert_eq!(rep.positive().count(), 0, "{p}");
                    let got: Vec<_> = rep.zero_level().map(|i| (i.lo.clone(), i.hi.clone())).collect();
                    assert_eq!(got, layout.intervals(), "{p}");
                    checked += 1;
                }
            }
        }
    }
    assert!(checked > 100);
}

fn squarefree(q: u64) -> bool {
    factorize(q).iter().all(|&(_, e)| e == 1)
}

#[test]
fn scan_subgrids_follow_the_proven_cases() {
    let recs = conjecture_scan(4, &Rational::integer(4), 15, 2).unwrap();
    for rec in &recs {
        let q = rec.params.q();
        let factors = factorize(q);
        if factors.len() == 1 && factors[0].1 == 1 {
            assert!(rec.consistent, "prime q: {} {:?}", rec.params, rec.issues);
        }
        let two_nl = &Rational::integer(2) * rec.params.n_lambda();
        let even_integer = two_nl.is_integer() && !two_n_lambda_odd(&rec.params);
        if squarefree(q) && factors.len() > 1 && even_integer {
            assert!(rec.detected.intervals.is_empty(), "{}", rec.params);
        }
    }
}

#[test]
fn scan_record_serializes_with_exact_endpoints() {
    let p = WellParams::from_parts(5, 2, 1, 1, 3).unwrap();
    let rec = talbot_core::scan_one(&p).unwrap();
    assert!(rec.predicted_exists && rec.consistent);
    let json = serde_json::to_value(&rec).unwrap();
    assert_eq!(json["detected"]["intervals"][0]["lo"], "2/15");
    assert_eq!(json["detected"]["intervals"][0]["hi"], "1/5");
    assert_eq!(json["params"]["lambda"], "5/2");
    assert_eq!(json["detected"]["intervals"][0]["kind"], "Positive");
}

/// Configurations with `2NΛ = 2j + 1`, reduced `a/q`, and no fragmentation.
fn nonfrag_odd_config() -> impl Strategy<Value = WellParams> {
    (1u64..=20, 0i64..20, 1u32..=4, 0i64..40).prop_filter_map(
        "need a reduced, non-fragmented configuration",
        |(q, a, n, j)| {
            let a = a % q as i64;
            if gcd(a, q as i64) != 1 {
                return None;
            }
            let lambda = Rational::new(2 * j + 1, 2 * n as i64).ok()?;
            let p = WellParams::new(lambda, n, Rational::frac(a, q as i64)).ok()?;
            (!has_fragmentation(&p)).then_some(p)
        },
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn odd_two_n_lambda_gives_the_predicted_plateau(p in nonfrag_odd_config()) {
        let pred = nonfrag_prediction(&p).unwrap();
        let rep = detect_plateaux(&p).unwrap();
        prop_assert_eq!(rep.intervals.len(), 1);
        let got = &rep.intervals[0];
        let (lo, hi) = pred.interval();
        prop_assert_eq!(&got.lo, &lo);
        prop_assert_eq!(&got.hi, &hi);
        prop_assert_eq!(pred.zero_level, got.kind == PlateauKind::ZeroLevel);
    }

    #[test]
    fn layouts_are_within_bounds(num in 11i64..200, q in 1i64..40, n in 1u32..4) {
        let lambda = Rational::new(num, 4).unwrap();
        let p = WellParams::new(lambda, n, Rational::frac(1, q)).unwrap();
        if has_fragmentation(&p) {
            let layout = fragmentation_layout(&p).unwrap();
            prop_assert!(layout.radius > Rational::zero());
            for c in &layout.centers {
                prop_assert!(c >= &Rational::zero() && c <= &Rational::half());
            }
            for w in layout.intervals().windows(2) {
                prop_assert!(w[0].1 < w[1].0);
            }
        } else {
            prop_assert!(fragmentation_layout(&p).is_err());
        }
    }
}

#[test]
fn every_reference_panel_matches_its_prediction() {
    for panel in talbot_core::PANELS.iter().filter(|p| !p.fragmented) {
        let p = panel.params().unwrap();
        let pred = nonfrag_prediction(&p).unwrap();
        let rep = detect_plateaux(&p).unwrap();
        assert_eq!(rep.intervals.len(), 1, "{}", panel.name);
        assert_eq!((rep.intervals[0].lo.clone(), rep.intervals[0].hi.clone()), pred.interval());
    }
}
