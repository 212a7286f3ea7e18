//! Exact arithmetic in the cyclotomic integers `Z[ζ_M]`.
//!
//! A [`CycInt`] stores one integer coefficient per power `ζ_M^j`, `0 <= j < M`.
//! That representation is redundant (a given number has many coefficient
//! vectors), so [`CycInt::is_zero`] reduces it to a canonical basis before
//! deciding. The reduction uses the factorization `M = ∏ p^e`: by the Chinese
//! remainder theorem `Z[ζ_M]` is the tensor product of the rings `Z[ζ_{p^e}]`,
//! and in each factor the relation `Φ_{p^e}(y) = Σ_{t<p} y^{t p^{e-1}} = 0`
//! eliminates the top `p^{e-1}` powers. What survives is a Z-basis, so the
//! element vanishes exactly when every surviving coefficient does. This agrees
//! with the remainder modulo the M-th cyclotomic polynomial, which is exposed
//! separately as [`CycInt::rem_cyclotomic`] for cross-checking.

use std::collections::HashMap;
use std::f64::consts::TAU;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Arc, OnceLock, RwLock};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::rational::{factorize, gcd_u64, lcm_u64};

/// Integer polynomial with ascending coefficients and no trailing zeros.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntPoly {
    coeffs: Vec<i64>,
}

impl IntPoly {
    pub fn new(mut coeffs: Vec<i64>) -> Self {
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        IntPoly { coeffs }
    }

    pub fn zero() -> Self {
        IntPoly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        IntPoly { coeffs: vec![1] }
    }

    /// `x^n - 1`.
    pub fn x_pow_minus_one(n: usize) -> Self {
        let mut coeffs = vec![0; n + 1];
        coeffs[0] = -1;
        coeffs[n] += 1;
        IntPoly::new(coeffs)
    }

    pub fn coeffs(&self) -> &[i64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_monic(&self) -> bool {
        self.coeffs.last() == Some(&1)
    }

    pub fn mul(&self, other: &IntPoly) -> IntPoly {
        if self.is_zero() || other.is_zero() {
            return IntPoly::zero();
        }
        let mut out = vec![0i64; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] = checked_mul_add(out[i + j], a, b);
            }
        }
        IntPoly::new(out)
    }

    /// Quotient and remainder by a monic divisor; exact over the integers.
    pub fn div_rem_monic(&self, divisor: &IntPoly) -> (IntPoly, IntPoly) {
        assert!(divisor.is_monic(), "divisor must be monic");
        let d = divisor.coeffs.len() - 1;
        let mut rem = self.coeffs.clone();
        if rem.len() <= d {
            return (IntPoly::zero(), IntPoly::new(rem));
        }
        let mut quot = vec![0i64; rem.len() - d];
        for top in (d..rem.len()).rev() {
            let lead = rem[top];
            if lead == 0 {
                continue;
            }
            quot[top - d] = lead;
            for (j, &c) in divisor.coeffs.iter().enumerate() {
                let idx = top - d + j;
                rem[idx] = checked_mul_add(rem[idx], -lead, c);
            }
        }
        rem.truncate(d);
        (IntPoly::new(quot), IntPoly::new(rem))
    }

    pub fn rem_monic(&self, divisor: &IntPoly) -> IntPoly {
        self.div_rem_monic(divisor).1
    }
}

impl fmt::Debug for IntPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, &c) in self.coeffs.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            let sign = if c < 0 { "-" } else if first { "" } else { "+" };
            let mag = c.unsigned_abs();
            let body = match (i, mag) {
                (0, m) => format!("{m}"),
                (1, 1) => "x".to_string(),
                (1, m) => format!("{m}x"),
                (e, 1) => format!("x^{e}"),
                (e, m) => format!("{m}x^{e}"),
            };
            if first {
                write!(f, "{sign}{body}")?;
            } else {
                write!(f, " {sign} {body}")?;
            }
            first = false;
        }
        Ok(())
    }
}

fn checked_mul_add(acc: i64, a: i64, b: i64) -> i64 {
    a.checked_mul(b)
        .and_then(|p| acc.checked_add(p))
        .expect("cyclotomic coefficient overflow")
}

fn poly_cache() -> &'static RwLock<HashMap<usize, Arc<IntPoly>>> {
    static CACHE: OnceLock<RwLock<HashMap<usize, Arc<IntPoly>>>> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(HashMap::new()))
}

fn divisors(n: usize) -> Vec<usize> {
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut i = 1;
    while i * i <= n {
        if n.is_multiple_of(i) {
            small.push(i);
            if i != n / i {
                large.push(n / i);
            }
        }
        i += 1;
    }
    small.extend(large.into_iter().rev());
    small
}

/// The M-th cyclotomic polynomial, memoized across threads.
///
/// Computed as `(x^M - 1) / ∏_{d | M, d < M} C_d(x)` by exact division.
pub fn cyclotomic_poly(order: usize) -> Arc<IntPoly> {
    assert!(order >= 1, "cyclotomic order must be positive");
    if let Some(p) = poly_cache().read().expect("cache poisoned").get(&order) {
        return Arc::clone(p);
    }
    let mut acc = IntPoly::x_pow_minus_one(order);
    for d in divisors(order) {
        if d == order {
            continue;
        }
        let (q, r) = acc.div_rem_monic(&cyclotomic_poly(d));
        debug_assert!(r.is_zero());
        acc = q;
    }
    let poly = Arc::new(acc);
    poly_cache()
        .write()
        .expect("cache poisoned")
        .entry(order)
        .or_insert_with(|| Arc::clone(&poly));
    poly
}

/// An element `Σ coeffs[j] ζ_M^j` of `Z[ζ_M]`.
///
/// `==` compares values, not coefficient vectors; operands of different orders
/// are embedded into the least common multiple first.
#[derive(Clone)]
pub struct CycInt {
    order: usize,
    coeffs: Vec<i64>,
}

impl CycInt {
    pub fn zero(order: usize) -> Self {
        assert!(order >= 1, "order must be positive");
        CycInt {
            order,
            coeffs: vec![0; order],
        }
    }

    pub fn one(order: usize) -> Self {
        Self::root(order, 0)
    }

    /// `ζ_M^exp` for any integer exponent.
    pub fn root(order: usize, exp: i64) -> Self {
        let mut z = Self::zero(order);
        z.add_root(exp, 1);
        z
    }

    /// `√2 = ζ_8 + ζ_8^7`.
    pub fn sqrt2() -> Self {
        let mut z = Self::zero(8);
        z.add_root(1, 1);
        z.add_root(7, 1);
        z
    }

    pub fn from_coeffs(order: usize, coeffs: Vec<i64>) -> Result<Self> {
        if order == 0 || coeffs.len() != order {
            return Err(Error::InvalidParams(format!(
                "coefficient vector of length {} for order {order}",
                coeffs.len()
            )));
        }
        Ok(CycInt { order, coeffs })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn coeffs(&self) -> &[i64] {
        &self.coeffs
    }

    /// Adds `c * ζ_M^exp` in place.
    pub fn add_root(&mut self, exp: i64, c: i64) {
        let j = exp.rem_euclid(self.order as i64) as usize;
        self.coeffs[j] = self.coeffs[j]
            .checked_add(c)
            .expect("cyclotomic coefficient overflow");
    }

    pub fn is_trivially_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    pub fn nonzero_terms(&self) -> impl Iterator<Item = (usize, i64)> + '_ {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0)
            .map(|(j, &c)| (j, c))
    }

    /// Coefficients in the canonical tensor basis; length `M`, with the
    /// eliminated positions set to zero.
    pub fn canonical_coeffs(&self) -> Vec<i64> {
        let mut arr = vec![0i64; self.order];
        let factors: Vec<(usize, usize)> = factorize(self.order as u64)
            .into_iter()
            .map(|(p, e)| (p as usize, (p as usize).pow(e)))
            .collect();
        let mut strides = Vec::with_capacity(factors.len());
        let mut s = 1usize;
        for &(_, m) in &factors {
            strides.push(s);
            s *= m;
        }
        for (j, &c) in self.coeffs.iter().enumerate() {
            if c == 0 {
                continue;
            }
            let idx: usize = factors
                .iter()
                .zip(&strides)
                .map(|(&(_, m), &st)| (j % m) * st)
                .sum();
            arr[idx] += c;
        }
        for (&(p, m), &stride) in factors.iter().zip(&strides) {
            let pe1 = m / p;
            let block = stride * m;
            let top = (p - 1) * pe1;
            for hi in (0..self.order).step_by(block) {
                for u in top..m {
                    for lo in 0..stride {
                        let pos = hi + u * stride + lo;
                        let v = arr[pos];
                        if v == 0 {
                            continue;
                        }
                        arr[pos] = 0;
                        for t1 in 0..p - 1 {
                            let target = pos - (p - 1 - t1) * pe1 * stride;
                            arr[target] = arr[target]
                                .checked_sub(v)
                                .expect("cyclotomic coefficient overflow");
                        }
                    }
                }
            }
        }
        arr
    }

    /// Exact zero test.
    pub fn is_zero(&self) -> bool {
        if self.is_trivially_zero() {
            return true;
        }
        self.canonical_coeffs().iter().all(|&c| c == 0)
    }

    /// Remainder of `Σ coeffs[j] x^j` modulo the M-th cyclotomic polynomial.
    pub fn rem_cyclotomic(&self) -> IntPoly {
        IntPoly::new(self.coeffs.clone()).rem_monic(&cyclotomic_poly(self.order))
    }

    /// Applies `ζ_M ↦ ζ_M^m`; `m` must be a unit modulo `M`.
    pub fn galois_conjugate(&self, m: i64) -> Result<CycInt> {
        let order = self.order as i64;
        let mm = m.rem_euclid(order);
        if gcd_u64(mm as u64, self.order as u64) != 1 {
            return Err(Error::NotAUnit {
                m,
                order: self.order,
            });
        }
        let mut out = CycInt::zero(self.order);
        for (j, c) in self.nonzero_terms() {
            let target = ((j as i64 * mm) % order) as usize;
            out.coeffs[target] = c;
        }
        Ok(out)
    }

    /// Complex conjugate, i.e. the conjugation `m = -1`.
    pub fn conj(&self) -> CycInt {
        self.galois_conjugate(-1).expect("-1 is always a unit")
    }

    /// Re-expresses the element in `Z[ζ_{target}]`; `M` must divide `target`.
    pub fn embed(&self, target: usize) -> Result<CycInt> {
        if target == 0 || !target.is_multiple_of(self.order) {
            return Err(Error::OrderMismatch {
                from: self.order,
                to: target,
            });
        }
        let factor = target / self.order;
        let mut out = CycInt::zero(target);
        for (j, c) in self.nonzero_terms() {
            out.coeffs[j * factor] = c;
        }
        Ok(out)
    }

    pub fn to_complex(&self) -> Complex64 {
        let m = self.order as f64;
        self.nonzero_terms()
            .map(|(j, c)| Complex64::from_polar(c as f64, TAU * j as f64 / m))
            .sum()
    }

    pub fn scale(&self, k: i64) -> CycInt {
        CycInt {
            order: self.order,
            coeffs: self
                .coeffs
                .iter()
                .map(|&c| c.checked_mul(k).expect("cyclotomic coefficient overflow"))
                .collect(),
        }
    }

    /// `z * conj(z) = |z|^2`, itself an element of `Z[ζ_M]`.
    pub fn norm_sqr(&self) -> CycInt {
        self * &self.conj()
    }

    fn common(a: &CycInt, b: &CycInt) -> (CycInt, CycInt) {
        if a.order == b.order {
            return (a.clone(), b.clone());
        }
        let l = lcm_u64(a.order as u64, b.order as u64) as usize;
        (
            a.embed(l).expect("lcm is a multiple"),
            b.embed(l).expect("lcm is a multiple"),
        )
    }
}

impl fmt::Debug for CycInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CycInt<{}>[", self.order)?;
        let mut first = true;
        for (j, c) in self.nonzero_terms() {
            if !first {
                write!(f, ", ")?;
            }
            write!(f, "{c}·ζ^{j}")?;
            first = false;
        }
        write!(f, "]")
    }
}

impl PartialEq for CycInt {
    fn eq(&self, other: &Self) -> bool {
        (self - other).is_zero()
    }
}

impl Eq for CycInt {}

impl Add for &CycInt {
    type Output = CycInt;
    fn add(self, rhs: &CycInt) -> CycInt {
        let (mut a, b) = CycInt::common(self, rhs);
        for (x, y) in a.coeffs.iter_mut().zip(&b.coeffs) {
            *x = x.checked_add(*y).expect("cyclotomic coefficient overflow");
        }
        a
    }
}

impl Sub for &CycInt {
    type Output = CycInt;
    fn sub(self, rhs: &CycInt) -> CycInt {
        let (mut a, b) = CycInt::common(self, rhs);
        for (x, y) in a.coeffs.iter_mut().zip(&b.coeffs) {
            *x = x.checked_sub(*y).expect("cyclotomic coefficient overflow");
        }
        a
    }
}

impl Neg for &CycInt {
    type Output = CycInt;
    fn neg(self) -> CycInt {
        self.scale(-1)
    }
}

impl Mul for &CycInt {
    type Output = CycInt;
    fn mul(self, rhs: &CycInt) -> CycInt {
        let (a, b) = CycInt::common(self, rhs);
        let m = a.order;
        let mut out = CycInt::zero(m);
        let bt: Vec<(usize, i64)> = b.nonzero_terms().collect();
        for (i, x) in a.nonzero_terms() {
            for &(j, y) in &bt {
                let k = (i + j) % m;
                out.coeffs[k] = checked_mul_add(out.coeffs[k], x, y);
            }
        }
        out
    }
}

macro_rules! owned_binop {
    ($trait:ident, $method:ident) => {
        impl $trait for CycInt {
            type Output = CycInt;
            fn $method(self, rhs: CycInt) -> CycInt {
                (&self).$method(&rhs)
            }
        }
    };
}

owned_binop!(Add, add);
owned_binop!(Sub, sub);
owned_binop!(Mul, mul);
