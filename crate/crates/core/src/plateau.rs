//! Exact plateau detection.
//!
//! Between consecutive singular points the window `I(x)` is fixed and
//! `p = (Λ/q)|S₋ e(2NΛx) − S₊|²`, so `p` is locally constant exactly when one
//! of the two sums vanishes. Both sums are built in `Z[ζ_M]` and tested exactly.

use num_complex::Complex64;
use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::Serialize;

use crate::cyclotomic::CycInt;
use crate::error::{Error, Result};
use crate::gauss::{CoefficientKind, GaussTable};
use crate::rational::{lcm_u64, Rational};
use crate::theorems::has_fragmentation;
use crate::wavefield::{interval_I, WellParams};

/// Float threshold used only for the shadow cross-check of the exact test.
pub const FLOAT_ZERO_THRESHOLD: f64 = 1e-9;

/// Whether `k` carries a nonzero coefficient `c(k)`.
fn supported(k: i64, q: u64) -> bool {
    q % 2 == 1 || (k + (q / 2) as i64).rem_euclid(2) == 0
}

/// Points of `(0, 1/2)` where some supported `k/q` enters or leaves the window.
pub fn singular_points(params: &WellParams) -> Vec<Rational> {
    let q = params.q() as i64;
    let h = params.half_support();
    let half = Rational::half();
    let mut out: Vec<Rational> = (-q..=q + 1)
        .filter(|&k| supported(k, params.q()))
        .flat_map(|k| {
            let c = Rational::frac(k, q);
            [&c - &h, &c + &h]
        })
        .filter(|x| !x.is_negative() && !x.is_zero() && x < &half)
        .collect();
    out.sort();
    out.dedup();
    out
}

/// An open interval between consecutive singular points.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Cell {
    pub lo: Rational,
    pub hi: Rational,
    pub members: Vec<i64>,
}

impl Cell {
    /// Computes the supported window members at the midpoint and rejects the
    /// cell if either quarter point sees a different window.
    pub fn new(lo: Rational, hi: Rational, params: &WellParams) -> Result<Cell> {
        if lo >= hi {
            return Err(Error::InvalidParams(format!("empty cell ({lo}, {hi})")));
        }
        let members_at = |x: &Rational| -> Vec<i64> {
            interval_I(x, params)
                .into_iter()
                .filter(|&k| supported(k, params.q()))
                .collect()
        };
        let width = &hi - &lo;
        let quarter = &width / &Rational::integer(4);
        let mid = &lo + &(&width / &Rational::integer(2));
        let members = members_at(&mid);
        let q1 = &lo + &quarter;
        let q3 = &hi - &quarter;
        if members_at(&q1) != members || members_at(&q3) != members {
            return Err(Error::CorruptCell {
                lo: lo.to_string(),
                hi: hi.to_string(),
            });
        }
        Ok(Cell { lo, hi, members })
    }

    pub fn midpoint(&self) -> Rational {
        &(&self.lo + &self.hi) / &Rational::integer(2)
    }
}

/// All cells partitioning `[0, 1/2]`.
pub fn cells(params: &WellParams) -> Result<Vec<Cell>> {
    let mut bounds = vec![Rational::zero()];
    bounds.extend(singular_points(params));
    bounds.push(Rational::half());
    bounds
        .windows(2)
        .map(|w| Cell::new(w[0].clone(), w[1].clone(), params))
        .collect()
}

/// Precomputed data for assembling `S±` of one parameter set.
#[derive(Debug, Clone)]
pub struct SumContext {
    table: GaussTable,
    q: u64,
    order: usize,
    /// `NΛ = r / s`
    r: i64,
    s: u64,
    n_lambda: f64,
}

impl SumContext {
    pub fn new(params: &WellParams) -> Result<Self> {
        let table = GaussTable::new(params.a(), params.q())?;
        let q = params.q();
        let s = params.s();
        let qs = q.checked_mul(s).ok_or(Error::Overflow("q·s"))?;
        let order = lcm_u64(lcm_u64(8, 4 * q), qs);
        let order = usize::try_from(order).map_err(|_| Error::Overflow("cyclotomic order"))?;
        let r = params
            .n_lambda()
            .numer()
            .to_i64()
            .ok_or(Error::Overflow("NΛ numerator"))?;
        Ok(SumContext {
            table,
            q,
            order,
            r,
            s,
            n_lambda: params.n_lambda().to_f64(),
        })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn table(&self) -> &GaussTable {
        &self.table
    }

    /// Exact `(S₊, S₋)` over the given members.
    pub fn sums(&self, members: &[i64]) -> (CycInt, CycInt) {
        let m = self.order as i64;
        let eighth = m / 8;
        let shift_unit = m / (self.q * self.s) as i64;
        let mut plus = CycInt::zero(self.order);
        let mut minus = CycInt::zero(self.order);
        for &k in members {
            let coeff = self.table.coefficient(k);
            let (num, den) = match self.table.exponent(k) {
                Some(e) => e,
                None => continue,
            };
            let base = num as i64 * (m / den as i64);
            let shift = (self.r * k).rem_euclid(m) * shift_unit;
            for (target, sign) in [(&mut plus, 1), (&mut minus, -1)] {
                let j = base + sign * shift;
                match coeff.kind {
                    CoefficientKind::Zero => {}
                    CoefficientKind::Plain => target.add_root(j, 1),
                    CoefficientKind::Sqrt2 => {
                        target.add_root(j + eighth, 1);
                        target.add_root(j - eighth, 1);
                    }
                }
            }
        }
        (plus, minus)
    }

    /// Independent float evaluation of `(S₊, S₋)` from the complex coefficients.
    pub fn sums_float(&self, members: &[i64]) -> (Complex64, Complex64) {
        let q = self.q as f64;
        members.iter().fold(
            (Complex64::default(), Complex64::default()),
            |(p, m), &k| {
                let c = self.table.coefficient_complex(k);
                let theta = std::f64::consts::TAU * (self.n_lambda * k as f64 / q).fract();
                let e = Complex64::from_polar(1.0, theta);
                (p + c * e, m + c * e.conj())
            },
        )
    }
}

/// Exact `(S₊, S₋)` on a cell.
pub fn s_pair(cell: &Cell, params: &WellParams) -> Result<(CycInt, CycInt)> {
    Ok(SumContext::new(params)?.sums(&cell.members))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum PlateauKind {
    ZeroLevel,
    Positive,
}

/// Which sum vanishes on a plateau.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum VanishingSide {
    Splus,
    Sminus,
    Both,
}

#[derive(Debug, Clone, Serialize)]
pub struct PlateauInterval {
    pub lo: Rational,
    pub hi: Rational,
    pub level: f64,
    /// `|S∓|²` as an element of `Z[ζ_M]`.
    #[serde(skip)]
    pub level_exact: CycInt,
    /// The surviving sum on the first cell of the interval.
    #[serde(skip)]
    pub surviving: CycInt,
    pub kind: PlateauKind,
    pub vanishing_side: VanishingSide,
}

impl PlateauInterval {
    pub fn length(&self) -> Rational {
        &self.hi - &self.lo
    }

    pub fn midpoint(&self) -> Rational {
        &(&self.lo + &self.hi) / &Rational::integer(2)
    }
}

/// Exact and float verdicts for one cell.
#[derive(Debug, Clone)]
pub struct CellVerdict {
    pub cell: Cell,
    pub s_plus: CycInt,
    pub s_minus: CycInt,
    pub plus_zero: bool,
    pub minus_zero: bool,
    pub plus_float: Complex64,
    pub minus_float: Complex64,
    /// Largest `|to_complex(S) - direct float S|` over both signs.
    pub shadow_residual: f64,
}

impl CellVerdict {
    pub fn qualifies(&self) -> bool {
        self.plus_zero || self.minus_zero
    }

    /// Number of sums whose exact and float zero tests disagree.
    pub fn zero_test_disagreements(&self) -> usize {
        let plus = self.plus_zero != (self.plus_float.norm() < FLOAT_ZERO_THRESHOLD);
        let minus = self.minus_zero != (self.minus_float.norm() < FLOAT_ZERO_THRESHOLD);
        plus as usize + minus as usize
    }

    fn side(&self) -> Option<VanishingSide> {
        match (self.plus_zero, self.minus_zero) {
            (true, true) => Some(VanishingSide::Both),
            (true, false) => Some(VanishingSide::Splus),
            (false, true) => Some(VanishingSide::Sminus),
            (false, false) => None,
        }
    }

    fn surviving(&self) -> &CycInt {
        if self.plus_zero {
            &self.s_minus
        } else {
            &self.s_plus
        }
    }
}

fn evaluate_cell(ctx: &SumContext, cell: Cell) -> CellVerdict {
    let (s_plus, s_minus) = ctx.sums(&cell.members);
    let (direct_plus, direct_minus) = ctx.sums_float(&cell.members);
    let plus_float = s_plus.to_complex();
    let minus_float = s_minus.to_complex();
    let shadow_residual = (plus_float - direct_plus)
        .norm()
        .max((minus_float - direct_minus).norm());
    CellVerdict {
        plus_zero: s_plus.is_zero(),
        minus_zero: s_minus.is_zero(),
        s_plus,
        s_minus,
        plus_float,
        minus_float,
        shadow_residual,
        cell,
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct PlateauReport {
    pub params: WellParams,
    pub intervals: Vec<PlateauInterval>,
    pub fragmentation: bool,
    #[serde(skip)]
    pub cells: Vec<CellVerdict>,
}

impl PlateauReport {
    pub fn positive(&self) -> impl Iterator<Item = &PlateauInterval> {
        self.intervals.iter().filter(|i| i.kind == PlateauKind::Positive)
    }

    pub fn zero_level(&self) -> impl Iterator<Item = &PlateauInterval> {
        self.intervals.iter().filter(|i| i.kind == PlateauKind::ZeroLevel)
    }
}

/// Finds every maximal interval of `[0, 1/2]` on which `p` is constant.
///
/// Adjacent qualifying cells are merged when their exact levels `|S∓|²` agree,
/// which keeps intervals maximal even when the surviving sums differ by a phase.
pub fn detect_plateaux(params: &WellParams) -> Result<PlateauReport> {
    let ctx = SumContext::new(params)?;
    let verdicts: Vec<CellVerdict> = cells(params)?
        .into_par_iter()
        .map(|cell| evaluate_cell(&ctx, cell))
        .collect();

    let lambda_over_q = params.lambda_f64() / params.q() as f64;
    let mut intervals: Vec<PlateauInterval> = Vec::new();
    let mut extendable = false;
    for v in &verdicts {
        let Some(side) = v.side() else {
            extendable = false;
            continue;
        };
        let surviving = if side == VanishingSide::Both {
            CycInt::zero(ctx.order())
        } else {
            v.surviving().clone()
        };
        let level_exact = surviving.norm_sqr();
        if extendable {
            let last = intervals.last_mut().expect("extendable implies an interval");
            if last.level_exact == level_exact {
                last.hi = v.cell.hi.clone();
                continue;
            }
        }
        let zero = side == VanishingSide::Both;
        intervals.push(PlateauInterval {
            lo: v.cell.lo.clone(),
            hi: v.cell.hi.clone(),
            level: if zero {
                0.0
            } else {
                lambda_over_q * surviving.to_complex().norm_sqr()
            },
            level_exact,
            surviving,
            kind: if zero {
                PlateauKind::ZeroLevel
            } else {
                PlateauKind::Positive
            },
            vanishing_side: side,
        });
        extendable = true;
    }

    Ok(PlateauReport {
        params: params.clone(),
        intervals,
        fragmentation: has_fragmentation(params),
        cells: verdicts,
    })
}

/// `(Λ/q)|S∓|²` from the interval's surviving sum.
pub fn plateau_level(interval: &PlateauInterval, params: &WellParams) -> f64 {
    if interval.kind == PlateauKind::ZeroLevel {
        return 0.0;
    }
    params.lambda_f64() / params.q() as f64 * interval.surviving.to_complex().norm_sqr()
}
