//! Wave function and probability density of the expanded well at fractional times.
//!
//! Coordinates are rescaled so that the expanded well `[0, Λ]` becomes
//! `[0, 1/2]`; the physical coordinate is `2Λx`. Time enters only as the
//! reduced fraction `t/T = a/q`.

use std::collections::BTreeMap;
use std::f64::consts::{PI, SQRT_2, TAU};

use num_complex::Complex64;
use num_integer::Integer;
use num_traits::ToPrimitive;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::gauss::GaussTable;
use crate::rational::Rational;

/// One experiment: expansion factor `Λ`, initial eigenstate `N`, time `t/T = a/q`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct WellParams {
    lambda: Rational,
    n_state: u32,
    tau: Rational,
    a: i64,
    q: u64,
    n_lambda: Rational,
}

impl WellParams {
    pub fn new(lambda: Rational, n_state: u32, tau: Rational) -> Result<Self> {
        if lambda <= Rational::one() {
            return Err(Error::InvalidParams(format!("expansion factor {lambda} must exceed 1")));
        }
        if n_state == 0 {
            return Err(Error::InvalidParams("eigenstate index must be positive".into()));
        }
        if tau.is_negative() {
            return Err(Error::InvalidParams(format!("time fraction {tau} is negative")));
        }
        let a = tau
            .numer()
            .to_i64()
            .ok_or(Error::Overflow("time numerator"))?;
        let q = tau
            .denom()
            .to_u64()
            .filter(|&q| q <= u32::MAX as u64)
            .ok_or(Error::Overflow("time denominator"))?;
        if lambda.numer().to_i64().is_none() || lambda.denom().to_i64().is_none() {
            return Err(Error::Overflow("expansion factor"));
        }
        let n_lambda = &Rational::integer(n_state) * &lambda;
        Ok(WellParams {
            lambda,
            n_state,
            tau,
            a,
            q,
            n_lambda,
        })
    }

    /// Shorthand for tests and tables: `Λ = ln/ld`, `t/T = a/q`.
    pub fn from_parts(ln: i64, ld: i64, n_state: u32, a: i64, q: i64) -> Result<Self> {
        Self::new(Rational::new(ln, ld)?, n_state, Rational::new(a, q)?)
    }

    pub fn lambda(&self) -> &Rational {
        &self.lambda
    }

    pub fn n_state(&self) -> u32 {
        self.n_state
    }

    pub fn tau(&self) -> &Rational {
        &self.tau
    }

    pub fn a(&self) -> i64 {
        self.a
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    /// `NΛ` as an exact fraction.
    pub fn n_lambda(&self) -> &Rational {
        &self.n_lambda
    }

    /// Denominator of `NΛ` in lowest terms.
    pub fn s(&self) -> u64 {
        self.n_lambda.denom().to_u64().expect("checked on construction")
    }

    /// `q` for odd `q`, `q/2` for even `q`.
    pub fn threshold(&self) -> Rational {
        if self.q % 2 == 1 {
            Rational::integer(self.q)
        } else {
            Rational::integer(self.q / 2)
        }
    }

    pub fn lambda_f64(&self) -> f64 {
        self.lambda.to_f64()
    }

    /// Half-width `1/(2Λ)` of the support of the initial condition.
    pub fn half_support(&self) -> Rational {
        Rational::one() / (&Rational::integer(2) * &self.lambda)
    }
}

impl std::fmt::Debug for WellParams {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "(Λ={}, N={}, t/T={})", self.lambda, self.n_state, self.tau)
    }
}

impl std::fmt::Display for WellParams {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        std::fmt::Debug::fmt(self, f)
    }
}

impl Serialize for WellParams {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = serializer.serialize_struct("WellParams", 3)?;
        st.serialize_field("lambda", &self.lambda)?;
        st.serialize_field("n", &self.n_state)?;
        st.serialize_field("tau", &self.tau)?;
        st.end()
    }
}

/// A sample location given either exactly or as a float.
#[derive(Debug, Clone)]
pub enum Abscissa {
    Exact(Rational),
    Float(f64),
}

impl Abscissa {
    pub fn to_f64(&self) -> f64 {
        match self {
            Abscissa::Exact(r) => r.to_f64(),
            Abscissa::Float(x) => *x,
        }
    }
}

impl From<f64> for Abscissa {
    fn from(x: f64) -> Self {
        Abscissa::Float(x)
    }
}

impl From<Rational> for Abscissa {
    fn from(x: Rational) -> Self {
        Abscissa::Exact(x)
    }
}

impl From<&Rational> for Abscissa {
    fn from(x: &Rational) -> Self {
        Abscissa::Exact(x.clone())
    }
}

/// The initial condition in rescaled form, extended to an odd 1-periodic function.
pub fn initial_g(x: f64, lambda: &Rational, n_state: u32) -> f64 {
    initial_g_f64(x, lambda.to_f64(), n_state)
}

fn initial_g_f64(x: f64, lambda: f64, n_state: u32) -> f64 {
    let d = x - x.round();
    if d.abs() <= 0.5 / lambda {
        (TAU * n_state as f64 * lambda * d).sin()
    } else {
        0.0
    }
}

/// All integers `k` with `|x - k/q| <= 1/(2Λ)`, by exact comparison.
#[allow(non_snake_case)]
pub fn interval_I(x: &Rational, params: &WellParams) -> Vec<i64> {
    let q = Rational::integer(params.q());
    let center = x * &q;
    let radius = &q * &params.half_support();
    let lo = (&center - &radius).ceil();
    let hi = (&center + &radius).floor();
    let lo = lo.to_i64().expect("window within i64");
    let hi = hi.to_i64().expect("window within i64");
    (lo..=hi).collect()
}

/// Float evaluator that reuses one validated Gauss table across many points.
#[derive(Debug, Clone)]
pub struct Wavefield {
    params: WellParams,
    table: GaussTable,
    lambda: f64,
    n_lambda: f64,
}

impl Wavefield {
    pub fn new(params: &WellParams) -> Result<Self> {
        let table = GaussTable::new(params.a(), params.q())?;
        Ok(Wavefield {
            params: params.clone(),
            table,
            lambda: params.lambda_f64(),
            n_lambda: params.n_lambda().to_f64(),
        })
    }

    pub fn params(&self) -> &WellParams {
        &self.params
    }

    pub fn table(&self) -> &GaussTable {
        &self.table
    }

    /// `Ψ(2Λx, aT/q) = (√2/q) Σ_k G*(a,k,q) g(x + k/q)`.
    pub fn psi(&self, x: f64) -> Complex64 {
        let q = self.params.q();
        let sum: Complex64 = (0..q as i64)
            .map(|k| {
                let g = initial_g_f64(x + k as f64 / q as f64, self.lambda, self.params.n_state());
                self.table.conj_sum(k) * g
            })
            .sum();
        sum * (SQRT_2 / q as f64)
    }

    fn window_sum(&self, x: f64, ks: impl Iterator<Item = i64>) -> Complex64 {
        let q = self.params.q() as f64;
        ks.map(|k| {
            let c = self.table.coefficient_complex(k);
            c * (TAU * self.n_lambda * (x - k as f64 / q)).sin()
        })
        .sum()
    }

    /// Normalized density `p(x) = (4Λ/q) |Σ_{k∈I(x)} c(k) sin(2πNΛ(x - k/q))|²`.
    pub fn density(&self, x: impl Into<Abscissa>) -> f64 {
        let q = self.params.q() as f64;
        let x = x.into();
        let sum = match &x {
            Abscissa::Exact(r) => self.window_sum(r.to_f64(), interval_I(r, &self.params).into_iter()),
            Abscissa::Float(xf) => {
                // A term sitting exactly on the window edge contributes sin(±πN) = 0,
                // so float rounding of the edges cannot change the value.
                let radius = 0.5 * q / self.lambda;
                let lo = (xf * q - radius).ceil() as i64;
                let hi = (xf * q + radius).floor() as i64;
                self.window_sum(*xf, lo..=hi)
            }
        };
        4.0 * self.lambda / q * sum.norm_sqr()
    }
}

pub fn psi_fractional(x: f64, params: &WellParams) -> Result<Complex64> {
    Ok(Wavefield::new(params)?.psi(x))
}

pub fn density_p(x: impl Into<Abscissa>, params: &WellParams) -> Result<f64> {
    Ok(Wavefield::new(params)?.density(x))
}

/// Sampled density on `[0, 1/2]`.
#[derive(Debug, Clone)]
pub struct DensitySamples {
    pub xs: Vec<f64>,
    pub ps: Vec<f64>,
}

impl DensitySamples {
    /// `n` samples at `x_i = (i + 1/2) / (2n)`, which never hit a rational
    /// singular point with denominator coprime to `2n`.
    pub fn midpoint_grid(params: &WellParams, n: usize) -> Result<Self> {
        let field = Wavefield::new(params)?;
        let xs: Vec<f64> = (0..n).map(|i| (i as f64 + 0.5) / (2.0 * n as f64)).collect();
        let ps = xs.iter().map(|&x| field.density(x)).collect();
        Ok(DensitySamples { xs, ps })
    }

    /// `n` equally spaced samples including both endpoints.
    pub fn uniform_grid(params: &WellParams, n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidParams("need at least two samples".into()));
        }
        let field = Wavefield::new(params)?;
        let xs: Vec<f64> = (0..n).map(|i| 0.5 * i as f64 / (n - 1) as f64).collect();
        let ps = xs.iter().map(|&x| field.density(x)).collect();
        Ok(DensitySamples { xs, ps })
    }

    pub fn len(&self) -> usize {
        self.xs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xs.is_empty()
    }

    /// Strict local maxima among interior samples.
    pub fn count_local_maxima(&self) -> usize {
        self.ps
            .windows(3)
            .filter(|w| w[1] > w[0] && w[1] > w[2])
            .count()
    }
}

fn simpson(f: impl Fn(f64) -> f64, lo: f64, hi: f64, panels: usize) -> f64 {
    debug_assert!(panels.is_multiple_of(2) && panels > 0);
    let h = (hi - lo) / panels as f64;
    let mut acc = f(lo) + f(hi);
    for i in 1..panels {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * f(lo + h * i as f64);
    }
    acc * h / 3.0
}

/// `∫_0^{1/2} p` by composite Simpson over about `points` nodes, split at the
/// kinks of `p` so that no panel straddles one.
pub fn integrate_density(params: &WellParams, points: usize) -> Result<f64> {
    let field = Wavefield::new(params)?;
    let mut breaks = vec![0.0];
    breaks.extend(
        crate::plateau::singular_points(params)
            .iter()
            .map(Rational::to_f64),
    );
    breaks.push(0.5);
    let panels_total = points.saturating_sub(1).max(2);
    Ok(breaks
        .windows(2)
        .map(|w| {
            let share = ((w[1] - w[0]) / 0.5 * panels_total as f64).round() as usize;
            let panels = (share.max(2) + 1) & !1;
            simpson(|x| field.density(x), w[0], w[1], panels)
        })
        .sum())
}

/// Truncated expansion of the solution in eigenfunctions `√(2/Λ) sin(nπx/Λ)`
/// of the expanded well, in physical coordinates `0 <= x <= Λ`.
#[derive(Debug, Clone)]
pub struct EigenSeries {
    lambda: f64,
    n_state: u32,
    /// Overlaps `c_n` for `n = 1..=cutoff` (index `n - 1`).
    coeffs: Vec<f64>,
}

impl EigenSeries {
    /// Overlap of the initial state `√2 sin(Nπx)` on `[0,1]` with the n-th
    /// eigenfunction, from the closed-form product-to-sum antiderivative.
    pub fn overlap(lambda: f64, n_state: u32, n: u64) -> f64 {
        let a = n_state as f64 * PI;
        let b = n as f64 * PI / lambda;
        let sinc = |t: f64| if t.abs() < 1e-8 { 1.0 - t * t / 6.0 } else { t.sin() / t };
        let integral = 0.5 * (sinc(a - b) - sinc(a + b));
        (2.0 / lambda).sqrt() * SQRT_2 * integral
    }

    /// Chooses the cutoff so the squared L² norm of the discarded coefficients
    /// is below `tol`, and so the summation-by-parts bound on the pointwise
    /// tail, `envelope / cutoff²`, is also below `tol`.
    pub fn new(lambda: f64, n_state: u32, tol: f64) -> Result<Self> {
        if tol.is_nan() || tol <= 0.0 {
            return Err(Error::InvalidTolerance(tol));
        }
        if lambda.is_nan() || lambda < 1.0 {
            return Err(Error::InvalidParams(format!("expansion factor {lambda} below 1")));
        }
        let nl = n_state as f64 * lambda;
        // |c_n| <= amp / |n² - N²Λ²|
        let amp = 2.0 * nl * lambda.sqrt() / PI;
        let floor = (2.0 * nl).ceil() + 1.0;
        let l2 = (16.0 * amp * amp / (27.0 * tol)).cbrt().ceil();
        let envelope = 4.0 / 3.0 * amp * (2.0 / lambda).sqrt();
        let pointwise = (envelope / tol).sqrt().ceil();
        let cutoff = floor.max(l2).max(pointwise) as u64;
        let coeffs = (1..=cutoff)
            .map(|n| Self::overlap(lambda, n_state, n))
            .collect();
        Ok(EigenSeries {
            lambda,
            n_state,
            coeffs,
        })
    }

    pub fn cutoff(&self) -> usize {
        self.coeffs.len()
    }

    pub fn n_state(&self) -> u32 {
        self.n_state
    }

    pub fn coefficient(&self, n: u64) -> f64 {
        match n {
            0 => 0.0,
            n if (n as usize) <= self.coeffs.len() => self.coeffs[n as usize - 1],
            n => Self::overlap(self.lambda, self.n_state, n),
        }
    }

    /// `Σ c_n²` over the retained modes.
    pub fn norm_sqr(&self) -> f64 {
        self.coeffs.iter().map(|c| c * c).sum()
    }

    /// `Σ |c_n e(-n² t/T)|²`, which must not depend on `t`.
    pub fn evolved_norm_sqr(&self, t_over_t: f64) -> f64 {
        self.modes(t_over_t).map(|(c, ph)| (ph * c).norm_sqr()).sum()
    }

    fn modes(&self, t_over_t: f64) -> impl Iterator<Item = (f64, Complex64)> + '_ {
        // n² t mod 1 via (n+1)² t = n² t + (2n+1) t, keeping the phase reduced
        let mut phase = 0.0f64;
        self.coeffs.iter().enumerate().map(move |(i, &c)| {
            let n = (i + 1) as f64;
            phase = (phase + ((2.0 * n - 1.0) * t_over_t).fract()).fract();
            (c, Complex64::from_polar(1.0, -TAU * phase))
        })
    }

    /// `Ψ(x, t) = Σ_n c_n √(2/Λ) sin(nπx/Λ) e(-n² t/T)`.
    pub fn eval(&self, x_phys: f64, t_over_t: f64) -> Complex64 {
        let w = PI * x_phys / self.lambda;
        let norm = (2.0 / self.lambda).sqrt();
        let sum: Complex64 = self
            .modes(t_over_t)
            .enumerate()
            .map(|(i, (c, ph))| ph * (c * ((i + 1) as f64 * w).sin()))
            .sum();
        sum * norm
    }
}

/// Independent eigen-expansion value of `Ψ(x, t)` at physical `x ∈ [0, Λ]`.
pub fn series_oracle(x_phys: f64, t_over_t: f64, params: &WellParams, tol: f64) -> Result<Complex64> {
    let series = EigenSeries::new(params.lambda_f64(), params.n_state(), tol)?;
    Ok(series.eval(x_phys, t_over_t))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpecialTime {
    Half,
    Quarter,
    Eighth,
}

/// `F(x,t) = Σ a_n e(nx/(2Λ) - n² t)`, `t` in units of `T`.
fn free_evolution(coeffs: &BTreeMap<i64, Complex64>, lambda: f64, x: f64, t: f64) -> Complex64 {
    coeffs
        .iter()
        .map(|(&n, &a)| {
            let n = n as f64;
            a * Complex64::from_polar(1.0, TAU * (n * x / (2.0 * lambda) - (n * n * t).fract()))
        })
        .sum()
}

/// Checks the closed forms of `F` at `T/2`, `T/4`, `T/8` for antisymmetric
/// coefficients and returns `|LHS - RHS|`.
pub fn corollary_identity_check(
    which: SpecialTime,
    coeffs: &BTreeMap<i64, Complex64>,
    lambda: f64,
    x: f64,
) -> Result<f64> {
    for (&n, &a) in coeffs {
        let partner = coeffs.get(&-n).copied().unwrap_or_default();
        if a != -partner {
            return Err(Error::NotAntisymmetric(n));
        }
    }
    let f0 = |y: f64| free_evolution(coeffs, lambda, y, 0.0);
    let (lhs, rhs) = match which {
        SpecialTime::Half => (free_evolution(coeffs, lambda, x, 0.5), -f0(lambda - x)),
        SpecialTime::Quarter => {
            let lhs = free_evolution(coeffs, lambda, x, 0.25);
            let rhs = Complex64::new(0.5, -0.5) * f0(x) - Complex64::new(0.5, 0.5) * f0(lambda - x);
            (lhs, rhs)
        }
        SpecialTime::Eighth => {
            let lhs = free_evolution(coeffs, lambda, x, 0.125);
            let w = Complex64::new(1.0, -1.0) / (2.0 * SQRT_2);
            let rhs = w * f0(x) + 0.5 * f0(x + lambda / 2.0) + w * f0(lambda - x)
                - 0.5 * f0(lambda / 2.0 - x);
            (lhs, rhs)
        }
    };
    Ok((lhs - rhs).norm())
}

/// `gcd` helper re-exported for callers building tables of reduced fractions.
pub fn coprime(a: i64, q: u64) -> bool {
    (a.rem_euclid(q as i64) as u64).gcd(&q) == 1
}
