//! Generalized quadratic Gauss sums `G(a, k, q) = Σ_{ℓ<q} e((aℓ² + kℓ)/q)`.
//!
//! Besides direct summation this module provides the exact magnitude law and
//! the factorization `G*(a,k,q) = √q e^{iα} c(k)`, where the coefficient `c(k)`
//! is either zero, a root of unity, or `√2` times a root of unity and the
//! phase `α` does not depend on `k`.

use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::Serialize;

use crate::cyclotomic::CycInt;
use crate::error::{Error, Result};
use crate::rational::{gcd_u64, mod_inverse_u64, Rational};

/// Largest residual accepted by the factorization self-check.
pub const FACTORIZATION_TOLERANCE: f64 = 1e-9;

fn require_coprime(a: i64, q: u64) -> Result<()> {
    if q == 0 || gcd_u64(a.rem_euclid(q as i64) as u64, q) != 1 {
        return Err(Error::NotInvertible {
            a: a.to_string(),
            q: q.to_string(),
        });
    }
    Ok(())
}

/// `e(num/den)` with the numerator reduced first, so large exponents keep full precision.
pub(crate) fn unit(num: i128, den: u64) -> Complex64 {
    let r = num.rem_euclid(den as i128) as f64;
    Complex64::from_polar(1.0, TAU * r / den as f64)
}

pub fn gauss_sum_direct(a: i64, k: i64, q: u64) -> Result<Complex64> {
    require_coprime(a, q)?;
    let (a, k, qq) = (a as i128, k as i128, q as i128);
    Ok((0..qq)
        .map(|l| unit((a * l * l + k * l).rem_euclid(qq), q))
        .sum())
}

/// Exact value of `|G(a,k,q)|`: `0` or `√radicand`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", content = "radicand", rename_all = "snake_case")]
pub enum GaussMagnitude {
    Zero,
    Sqrt(u64),
}

impl GaussMagnitude {
    pub fn to_f64(self) -> f64 {
        match self {
            GaussMagnitude::Zero => 0.0,
            GaussMagnitude::Sqrt(n) => (n as f64).sqrt(),
        }
    }
}

impl std::fmt::Display for GaussMagnitude {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            GaussMagnitude::Zero => write!(f, "0"),
            GaussMagnitude::Sqrt(n) => write!(f, "sqrt({n})"),
        }
    }
}

fn even_case_vanishes(k: i64, q: u64) -> bool {
    (k + (q / 2) as i64).rem_euclid(2) == 1
}

/// Magnitude law; assumes `gcd(a, q) = 1`.
pub fn gauss_abs(a: i64, k: i64, q: u64) -> GaussMagnitude {
    debug_assert!(require_coprime(a, q).is_ok());
    let _ = a;
    if q % 2 == 1 {
        GaussMagnitude::Sqrt(q)
    } else if even_case_vanishes(k, q) {
        GaussMagnitude::Zero
    } else {
        GaussMagnitude::Sqrt(2 * q)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CoefficientKind {
    Zero,
    Plain,
    Sqrt2,
}

/// `c(k)`: zero, `e(exponent)`, or `√2 e(exponent)`, with the exponent in `[0, 1)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GaussCoefficient {
    pub kind: CoefficientKind,
    pub exponent: Rational,
}

impl GaussCoefficient {
    fn zero() -> Self {
        GaussCoefficient {
            kind: CoefficientKind::Zero,
            exponent: Rational::zero(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.kind == CoefficientKind::Zero
    }

    pub fn to_complex(&self) -> Complex64 {
        let phase = Complex64::from_polar(1.0, TAU * self.exponent.to_f64());
        match self.kind {
            CoefficientKind::Zero => Complex64::new(0.0, 0.0),
            CoefficientKind::Plain => phase,
            CoefficientKind::Sqrt2 => phase * 2f64.sqrt(),
        }
    }

    /// Exact value in `Z[ζ_order]`; `order` must be a multiple of the exponent
    /// denominator, and of 8 when the √2 factor is present.
    pub fn to_cycint(&self, order: usize) -> Result<CycInt> {
        let den = self
            .exponent
            .denom()
            .try_into()
            .map_err(|_| Error::Overflow("coefficient exponent"))?;
        let num: i64 = self
            .exponent
            .numer()
            .try_into()
            .map_err(|_| Error::Overflow("coefficient exponent"))?;
        let den: usize = den;
        let mismatch = || Error::OrderMismatch {
            from: den,
            to: order,
        };
        if !order.is_multiple_of(den) {
            return Err(mismatch());
        }
        let j = num * (order / den) as i64;
        match self.kind {
            CoefficientKind::Zero => Ok(CycInt::zero(order)),
            CoefficientKind::Plain => Ok(CycInt::root(order, j)),
            CoefficientKind::Sqrt2 => {
                if !order.is_multiple_of(8) {
                    return Err(Error::OrderMismatch { from: 8, to: order });
                }
                let eighth = (order / 8) as i64;
                let mut z = CycInt::zero(order);
                z.add_root(j + eighth, 1);
                z.add_root(j + 7 * eighth, 1);
                Ok(z)
            }
        }
    }
}

/// The modular inverse entering `c(k)`: of `4a` modulo odd `q`, of `a` modulo even `q`.
fn coefficient_inverse(a: i64, q: u64) -> Result<u64> {
    require_coprime(a, q)?;
    if q % 2 == 1 {
        mod_inverse_u64(4 * a.rem_euclid(q as i64), q)
    } else {
        mod_inverse_u64(a, q)
    }
}

/// Numerator over `q` (odd) or `4q` (even) of the exponent of `c(k)`, or
/// `None` for a vanishing coefficient.
fn coefficient_exponent(inverse: u64, q: u64, k: i64) -> Option<(u64, u64)> {
    if q % 2 == 1 {
        let kk = k.rem_euclid(q as i64) as u128;
        let num = (inverse as u128 * kk * kk) % q as u128;
        Some((num as u64, q))
    } else if even_case_vanishes(k, q) {
        None
    } else {
        // the exponent k²/(4q) has period 2q in k
        let kk = k.rem_euclid(2 * q as i64) as u128;
        let den = 4 * q as u128;
        let num = (inverse as u128 * kk * kk) % den;
        Some((num as u64, 4 * q))
    }
}

fn build_coefficient(inverse: u64, q: u64, k: i64) -> GaussCoefficient {
    match coefficient_exponent(inverse, q, k) {
        None => GaussCoefficient::zero(),
        Some((num, den)) => GaussCoefficient {
            kind: if q % 2 == 1 {
                CoefficientKind::Plain
            } else {
                CoefficientKind::Sqrt2
            },
            exponent: Rational::frac(num as i64, den as i64),
        },
    }
}

pub fn coefficient_c(a: i64, q: u64, k: i64) -> Result<GaussCoefficient> {
    let inverse = coefficient_inverse(a, q)?;
    Ok(build_coefficient(inverse, q, k))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GaussPhase {
    /// Radians, in `(-π, π]`.
    pub alpha: f64,
}

impl GaussPhase {
    pub fn unit(&self) -> Complex64 {
        Complex64::from_polar(1.0, self.alpha)
    }
}

pub fn phase_alpha(a: i64, q: u64) -> Result<GaussPhase> {
    let inverse = coefficient_inverse(a, q)?;
    phase_from_inverse(a, q, inverse)
}

fn phase_from_inverse(a: i64, q: u64, inverse: u64) -> Result<GaussPhase> {
    let k = if q % 2 == 1 { 0 } else { (q / 2) as i64 };
    let g = gauss_sum_direct(a, k, q)?.conj();
    let c = build_coefficient(inverse, q, k).to_complex();
    let e = g / (c * (q as f64).sqrt());
    Ok(GaussPhase { alpha: e.arg() })
}

/// All the Gauss data for one reduced fraction `a/q`, validated on construction.
#[derive(Debug, Clone)]
pub struct GaussTable {
    a: i64,
    q: u64,
    inverse: u64,
    phase: GaussPhase,
    /// `G*(a, k, q)` for `0 <= k < q`.
    conj_sums: Vec<Complex64>,
    max_residual: f64,
}

impl GaussTable {
    /// Computes the coefficients and the phase and checks
    /// `|G*(a,k,q) - √q e^{iα} c(k)| < 1e-9` for every residue class of `k`
    /// (modulo `2q` when `q` is even). A failure is a hard error.
    pub fn new(a: i64, q: u64) -> Result<Self> {
        let inverse = coefficient_inverse(a, q)?;
        let phase = phase_from_inverse(a, q, inverse)?;
        let conj_sums: Vec<Complex64> = (0..q as i64)
            .map(|k| gauss_sum_direct(a, k, q).map(|g| g.conj()))
            .collect::<Result<_>>()?;
        let scale = phase.unit() * (q as f64).sqrt();
        let period = if q % 2 == 1 { q } else { 2 * q } as i64;
        let mut max_residual = 0.0f64;
        for k in 0..period {
            let c = build_coefficient(inverse, q, k).to_complex();
            let residual = (conj_sums[(k % q as i64) as usize] - scale * c).norm();
            if residual.is_nan() || residual >= FACTORIZATION_TOLERANCE {
                return Err(Error::GaussSelfCheck { a, q, k, residual });
            }
            max_residual = max_residual.max(residual);
        }
        Ok(GaussTable {
            a,
            q,
            inverse,
            phase,
            conj_sums,
            max_residual,
        })
    }

    pub fn a(&self) -> i64 {
        self.a
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn phase(&self) -> GaussPhase {
        self.phase
    }

    pub fn max_residual(&self) -> f64 {
        self.max_residual
    }

    pub fn coefficient(&self, k: i64) -> GaussCoefficient {
        build_coefficient(self.inverse, self.q, k)
    }

    /// Exponent of `c(k)` as `(numerator, denominator)`, or `None` when `c(k) = 0`.
    pub fn exponent(&self, k: i64) -> Option<(u64, u64)> {
        coefficient_exponent(self.inverse, self.q, k)
    }

    pub fn coefficient_complex(&self, k: i64) -> Complex64 {
        self.coefficient(k).to_complex()
    }

    /// `G*(a, k, q)`, periodic in `k`.
    pub fn conj_sum(&self, k: i64) -> Complex64 {
        self.conj_sums[k.rem_euclid(self.q as i64) as usize]
    }
}
