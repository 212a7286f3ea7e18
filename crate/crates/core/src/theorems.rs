//! Closed-form plateau predictions and the grid scan that checks them against
//! the exact detector.

use num_integer::Integer;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::plateau::{detect_plateaux, PlateauKind, PlateauReport, VanishingSide};
use crate::rational::Rational;
use crate::wavefield::WellParams;

/// `Λ > q` for odd `q`, `Λ > q/2` for even `q`.
pub fn has_fragmentation(params: &WellParams) -> bool {
    params.lambda() > &params.threshold()
}

/// Whether `2NΛ` is an odd integer.
pub fn two_n_lambda_odd(params: &WellParams) -> bool {
    let t = &Rational::integer(2) * params.n_lambda();
    t.is_integer() && t.numer().is_odd()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum FragmentationCase {
    OddQ,
    QMod4Is0,
    QMod4Is2,
}

/// An end interval cut in half by the boundary of `[0, 1/2]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClippedEnd {
    pub center: Rational,
    pub lo: Rational,
    pub hi: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FragmentationLayout {
    pub case: FragmentationCase,
    pub centers: Vec<Rational>,
    pub radius: Rational,
    pub clipped: Vec<ClippedEnd>,
}

impl FragmentationLayout {
    /// The zero-density intervals `[c - r, c + r] ∩ [0, 1/2]`, sorted.
    pub fn intervals(&self) -> Vec<(Rational, Rational)> {
        self.centers
            .iter()
            .map(|c| clip(c, &self.radius))
            .collect()
    }
}

fn clip(center: &Rational, radius: &Rational) -> (Rational, Rational) {
    (
        (center - radius).max(Rational::zero()),
        (center + radius).min(Rational::half()),
    )
}

pub fn fragmentation_layout(params: &WellParams) -> Result<FragmentationLayout> {
    if !has_fragmentation(params) {
        return Err(Error::Precondition(format!("{params} is not fragmented")));
    }
    let q = params.q() as i64;
    let h = params.half_support();
    let (case, centers, radius): (_, Vec<Rational>, _) = if q % 2 == 1 {
        let centers = (0..(q + 1) / 2).map(|m| Rational::frac(2 * m + 1, 2 * q)).collect();
        (FragmentationCase::OddQ, centers, &Rational::frac(1, 2 * q) - &h)
    } else if q % 4 == 0 {
        let centers = (0..q / 4).map(|m| Rational::frac(2 * m + 1, q)).collect();
        (FragmentationCase::QMod4Is0, centers, &Rational::frac(1, q) - &h)
    } else {
        let centers = (0..(q + 2) / 4).map(|m| Rational::frac(2 * m, q)).collect();
        (FragmentationCase::QMod4Is2, centers, &Rational::frac(1, q) - &h)
    };
    let clipped = centers
        .iter()
        .filter_map(|c: &Rational| {
            let (lo, hi) = clip(c, &radius);
            (&hi - &lo != &radius + &radius).then(|| ClippedEnd {
                center: c.clone(),
                lo,
                hi,
            })
        })
        .collect();
    Ok(FragmentationLayout {
        case,
        centers,
        radius,
        clipped,
    })
}

/// The unique plateau when `2NΛ` is odd and there is no fragmentation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NonFragPrediction {
    pub center: Rational,
    pub radius: Rational,
    pub zero_level: bool,
}

impl NonFragPrediction {
    pub fn interval(&self) -> (Rational, Rational) {
        clip(&self.center, &self.radius)
    }
}

pub fn nonfrag_prediction(params: &WellParams) -> Result<NonFragPrediction> {
    if has_fragmentation(params) {
        return Err(Error::Precondition(format!("{params} is fragmented")));
    }
    if !two_n_lambda_odd(params) {
        return Err(Error::Precondition(format!("2NΛ is not an odd integer for {params}")));
    }
    let q = Rational::integer(params.q());
    let two = Rational::integer(2);
    let half = Rational::half();
    let nl = params.n_lambda();
    let center = (&(&(&two * &Rational::integer(params.a())) * nl) / &q + &half).dist_nearest_int();
    let radius = if params.q() % 2 == 1 {
        (&(&q / &(&two * params.lambda())) + &half).dist_nearest_int() / q.clone()
    } else {
        let four = Rational::integer(4);
        &two * &(&(&q / &(&four * params.lambda())) + &half).dist_nearest_int() / q.clone()
    };
    let four_nl = &Rational::integer(4) * nl;
    let zero_level = four_nl.numer().is_multiple_of(&q.numer().clone());
    Ok(NonFragPrediction {
        center,
        radius,
        zero_level,
    })
}

/// `qN` peaks for odd `q`, `qN/2` for even `q`.
pub fn peak_count(params: &WellParams) -> Result<u64> {
    if !has_fragmentation(params) {
        return Err(Error::Precondition(format!("{params} is not fragmented")));
    }
    let qn = params.q() * params.n_state() as u64;
    Ok(if params.q() % 2 == 1 { qn } else { qn / 2 })
}

/// Outcome of checking one configuration against the predicted plateau.
#[derive(Debug, Clone, Serialize)]
pub struct ScanRecord {
    pub params: WellParams,
    pub predicted_exists: bool,
    pub prediction: Option<NonFragPrediction>,
    pub detected: PlateauReport,
    pub consistent: bool,
    pub issues: Vec<String>,
    /// Which sum vanished on the detected plateau; informational only.
    pub vanishing_side: Option<VanishingSide>,
    pub sums_checked: usize,
    pub zero_test_disagreements: usize,
    pub max_shadow_residual: f64,
    pub galois_checks: usize,
    pub galois_failures: usize,
}

/// Units modulo `order` used to spot-check Galois stability in scans.
fn sample_units(order: usize) -> Vec<i64> {
    let m = order as i64;
    let mut units = vec![m - 1];
    units.extend((2..m).filter(|u| u.gcd(&m) == 1).take(5));
    units
}

pub fn scan_one(params: &WellParams) -> Result<ScanRecord> {
    let detected = detect_plateaux(params)?;
    let predicted_exists = two_n_lambda_odd(params);
    let prediction = if predicted_exists {
        Some(nonfrag_prediction(params)?)
    } else {
        None
    };
    let mut issues = Vec::new();
    let found = detected.intervals.len();
    match &prediction {
        None if found > 0 => issues.push(format!(
            "2NΛ is not an odd integer but {found} plateau(x) were detected"
        )),
        Some(_) if found == 0 => issues.push("2NΛ is odd but no plateau was detected".into()),
        Some(_) if found > 1 => issues.push(format!("expected a unique plateau, found {found}")),
        Some(pred) => {
            let got = &detected.intervals[0];
            let (lo, hi) = pred.interval();
            if got.lo != lo || got.hi != hi {
                issues.push(format!(
                    "predicted [{lo}, {hi}], detected [{}, {}]",
                    got.lo, got.hi
                ));
            }
            if pred.zero_level != (got.kind == PlateauKind::ZeroLevel) {
                issues.push(format!(
                    "zero-level predicted {}, detected {:?}",
                    pred.zero_level, got.kind
                ));
            }
        }
        None => {}
    }

    let units = detected
        .cells
        .first()
        .map(|v| sample_units(v.s_plus.order()))
        .unwrap_or_default();
    let mut sums_checked = 0;
    let mut zero_test_disagreements = 0;
    let mut max_shadow_residual = 0.0f64;
    let mut galois_checks = 0;
    let mut galois_failures = 0;
    for v in &detected.cells {
        sums_checked += 2;
        zero_test_disagreements += v.zero_test_disagreements();
        max_shadow_residual = max_shadow_residual.max(v.shadow_residual);
        for (s, zero) in [(&v.s_plus, v.plus_zero), (&v.s_minus, v.minus_zero)] {
            if !zero || s.is_trivially_zero() {
                continue;
            }
            for &u in &units {
                galois_checks += 1;
                if !s.galois_conjugate(u)?.is_zero() {
                    galois_failures += 1;
                }
            }
        }
    }
    if zero_test_disagreements > 0 {
        issues.push(format!("{zero_test_disagreements} exact/float zero-test disagreement(s)"));
    }
    if galois_failures > 0 {
        issues.push(format!("{galois_failures} Galois conjugate(s) of a zero sum are nonzero"));
    }

    Ok(ScanRecord {
        params: params.clone(),
        predicted_exists,
        prediction,
        vanishing_side: detected.intervals.first().map(|i| i.vanishing_side),
        consistent: issues.is_empty(),
        issues,
        detected,
        sums_checked,
        zero_test_disagreements,
        max_shadow_residual,
        galois_checks,
        galois_failures,
    })
}

/// Non-fragmented configurations `Λ = u/v` (`v <= lambda_den`, `1 < Λ <= lambda_max`),
/// reduced `a/q` with `0 <= a < q <= q_max`, and `1 <= N <= n_max`, ordered by
/// `(Λ, q, a, N)`.
pub fn scan_grid(
    lambda_den: u64,
    lambda_max: &Rational,
    q_max: u64,
    n_max: u32,
) -> Result<Vec<WellParams>> {
    let mut lambdas = Vec::new();
    for v in 1..=lambda_den as i64 {
        let top = (lambda_max * &Rational::integer(v)).floor();
        let top: i64 = i64::try_from(&top).map_err(|_| Error::Overflow("scan bound"))?;
        for u in (v + 1)..=top {
            if u.gcd(&v) == 1 {
                lambdas.push(Rational::frac(u, v));
            }
        }
    }
    lambdas.sort();
    let mut grid = Vec::new();
    for lambda in &lambdas {
        for q in 1..=q_max as i64 {
            for a in (0..q).filter(|a| a.gcd(&q) == 1) {
                for n in 1..=n_max {
                    let p = WellParams::new(lambda.clone(), n, Rational::frac(a, q))?;
                    if !has_fragmentation(&p) {
                        grid.push(p);
                    }
                }
            }
        }
    }
    Ok(grid)
}

/// Runs [`scan_one`] over [`scan_grid`] in parallel; output order is the grid order.
pub fn conjecture_scan(
    lambda_den: u64,
    lambda_max: &Rational,
    q_max: u64,
    n_max: u32,
) -> Result<Vec<ScanRecord>> {
    if lambda_den == 0 || q_max == 0 || n_max == 0 || lambda_max <= &Rational::one() {
        return Err(Error::InvalidParams("scan bounds must be positive and Λ_max > 1".into()));
    }
    scan_grid(lambda_den, lambda_max, q_max, n_max)?
        .par_iter()
        .map(scan_one)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(ln: i64, ld: i64, n: u32, a: i64, q: i64) -> WellParams {
        WellParams::from_parts(ln, ld, n, a, q).unwrap()
    }

    fn r(n: i64, d: i64) -> Rational {
        Rational::frac(n, d)
    }

    #[test]
    fn fragmentation_threshold() {
        assert!(has_fragmentation(&params(107, 10, 1, 2, 7)));
        assert!(has_fragmentation(&params(107, 10, 1, 1, 12)));
        assert!(!has_fragmentation(&params(5, 2, 1, 1, 3)));
        assert!(!has_fragmentation(&params(3, 1, 1, 1, 3)));
        assert!(!has_fragmentation(&params(3, 1, 1, 1, 6)));
    }

    #[test]
    fn layout_odd() {
        let l = fragmentation_layout(&params(107, 10, 1, 2, 7)).unwrap();
        assert_eq!(l.case, FragmentationCase::OddQ);
        assert_eq!(l.radius, r(1, 14) - r(5, 107));
        assert_eq!(l.centers, vec![r(1, 14), r(3, 14), r(5, 14), r(1, 2)]);
        assert_eq!(l.clipped.len(), 1);
        assert_eq!(l.clipped[0].lo, r(1, 2) + r(5, 107) - r(1, 14));
        assert_eq!(l.clipped[0].hi, r(1, 2));
    }

    #[test]
    fn layout_even() {
        let l = fragmentation_layout(&params(107, 10, 2, 1, 12)).unwrap();
        assert_eq!(l.case, FragmentationCase::QMod4Is0);
        assert_eq!(l.centers, vec![r(1, 12), r(3, 12), r(5, 12)]);
        assert_eq!(l.radius, r(1, 12) - r(5, 107));
        assert!(l.clipped.is_empty());

        let l = fragmentation_layout(&params(107, 10, 1, 3, 10)).unwrap();
        assert_eq!(l.case, FragmentationCase::QMod4Is2);
        assert_eq!(l.centers, vec![r(0, 1), r(1, 5), r(2, 5)]);
        assert_eq!(l.clipped[0].lo, r(0, 1));
        assert_eq!(l.clipped[0].hi, r(1, 10) - r(5, 107));

        assert!(fragmentation_layout(&params(5, 2, 1, 1, 3)).is_err());
    }

    #[test]
    fn predictions() {
        let p = nonfrag_prediction(&params(5, 2, 1, 1, 3)).unwrap();
        assert_eq!((p.center.clone(), p.radius.clone()), (r(1, 6), r(1, 30)));
        assert_eq!(p.interval(), (r(2, 15), r(1, 5)));
        assert!(!p.zero_level);
        let p = nonfrag_prediction(&params(5, 4, 2, 11, 6)).unwrap();
        assert_eq!(p.interval(), (r(7, 30), r(13, 30)));
        let p = nonfrag_prediction(&params(3, 2, 3, 7, 18)).unwrap();
        assert!(p.zero_level);
        assert_eq!(p.interval(), (r(0, 1), r(1, 18)));
        assert!(nonfrag_prediction(&params(5, 2, 2, 1, 3)).is_err());
        assert!(nonfrag_prediction(&params(107, 10, 1, 2, 7)).is_err());
    }

    #[test]
    fn peaks() {
        assert_eq!(peak_count(&params(107, 10, 1, 2, 7)).unwrap(), 7);
        assert_eq!(peak_count(&params(107, 10, 2, 1, 12)).unwrap(), 12);
        assert_eq!(peak_count(&params(107, 10, 1, 3, 10)).unwrap(), 5);
        assert!(peak_count(&params(5, 2, 1, 1, 3)).is_err());
    }

    #[test]
    fn critical_case_has_no_plateau() {
        for (ln, q) in [(3, 3), (5, 5), (3, 6), (2, 4)] {
            for a in (1..q).filter(|a: &i64| a.gcd(&q) == 1) {
                for n in 1..=3 {
                    let p = params(ln, 1, n, a, q);
                    assert!(!has_fragmentation(&p));
                    assert!(detect_plateaux(&p).unwrap().intervals.is_empty(), "{p}");
                }
            }
        }
    }

    #[test]
    fn small_scan_is_consistent() {
        let recs = conjecture_scan(2, &r(3, 1), 6, 2).unwrap();
        assert!(!recs.is_empty());
        for rec in &recs {
            assert!(rec.consistent, "{}: {:?}", rec.params, rec.issues);
        }
        let again = conjecture_scan(2, &r(3, 1), 6, 2).unwrap();
        let a: Vec<_> = recs.iter().map(|r| r.params.clone()).collect();
        let b: Vec<_> = again.iter().map(|r| r.params.clone()).collect();
        assert_eq!(a, b);
        assert!(conjecture_scan(0, &r(3, 1), 6, 2).is_err());
    }
}
