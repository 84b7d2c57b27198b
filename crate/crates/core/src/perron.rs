//! Generalized Perron saddle-point expansion with parameter-dependent
//! coefficients.
//!
//! For `int f(x) exp(-phi(x)/lambda) dx` with `phi = a2 x^2 + sum_{n>=3} a_n x^n`
//! and `f = sum b_n x^n`, the table `c_{n,k}` collects
//! `f(z) exp(-w sum_{n>=3} a_n z^(n-2)) = sum_n (sum_k c_{n,k} w^k) z^n`
//! and each Gaussian moment contributes
//! `Gamma(n+k+1/2) c_{2n,k} / a2^(n+k+1/2) * lambda^(n+1/2)`.

use rug::Float;
use serde::{Deserialize, Serialize};

use crate::bigcomplex::{BigComplex, Precision};
use crate::error::{Error, Result};
use crate::quadrature::float_string;
use crate::series::{HalfExp, PuiseuxSeries};

/// The ring operations the expansion engine needs. Implemented for plain
/// numbers (coefficients at a fixed parameter) and for series in `tau`.
pub trait Coefficient: Clone {
    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;
    fn add(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn scale(&self, c: &BigComplex) -> Self;
    fn div(&self, other: &Self) -> Result<Self>;
    fn is_zero(&self) -> bool;
    fn precision(&self) -> Precision;
    /// `self^-(j + 1/2)` on the principal branch. Errors unless the value
    /// (or the constant term) has positive real part.
    fn inv_half_power(&self, j: u32) -> Result<Self>;
}

impl Coefficient for BigComplex {
    fn zero_like(&self) -> Self {
        BigComplex::zero(self.precision())
    }
    fn one_like(&self) -> Self {
        BigComplex::one(self.precision())
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn scale(&self, c: &BigComplex) -> Self {
        self * c
    }
    fn div(&self, other: &Self) -> Result<Self> {
        if other.is_zero() {
            return Err(Error::domain("division by zero coefficient"));
        }
        Ok(self / other)
    }
    fn is_zero(&self) -> bool {
        BigComplex::is_zero(self)
    }
    fn precision(&self) -> Precision {
        BigComplex::precision(self)
    }
    fn inv_half_power(&self, j: u32) -> Result<Self> {
        if *self.re() <= 0 {
            return Err(Error::domain(format!(
                "Gaussian coefficient a2 = {} needs a positive real part",
                self.to_string_digits(12)
            )));
        }
        let e = BigComplex::from_ratio(-(2 * i64::from(j) + 1), 2, self.precision());
        self.powc(&e)
    }
}

impl Coefficient for PuiseuxSeries {
    fn zero_like(&self) -> Self {
        PuiseuxSeries::zero(HalfExp::ZERO, self.trunc_order(), self.precision())
    }
    fn one_like(&self) -> Self {
        PuiseuxSeries::one(self.trunc_order(), self.precision())
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn scale(&self, c: &BigComplex) -> Self {
        PuiseuxSeries::scale(self, c)
    }
    fn div(&self, other: &Self) -> Result<Self> {
        self.div_series(other)
    }
    fn is_zero(&self) -> bool {
        self.coeffs().iter().all(|c| c.is_zero())
    }
    fn precision(&self) -> Precision {
        PuiseuxSeries::precision(self)
    }
    fn inv_half_power(&self, j: u32) -> Result<Self> {
        let s = self.normalized();
        let lead_ok = s.base_exponent() == HalfExp::ZERO && s.coeffs().first().is_some_and(|c| *c.re() > 0);
        if !lead_ok {
            return Err(Error::domain(
                "Gaussian coefficient series needs a constant term with positive real part",
            ));
        }
        s.pow(-(2 * i64::from(j) + 1), 2)
    }
}

/// Lower-triangular table `c_{n,k}`, `0 <= k <= n <= order`.
#[derive(Clone, Debug)]
pub struct CnkTable<T> {
    order: usize,
    rows: Vec<Vec<T>>,
}

impl<T: Coefficient> CnkTable<T> {
    pub fn order(&self) -> usize {
        self.order
    }

    /// `c_{n,k}`; `None` above the diagonal or beyond the order.
    pub fn get(&self, n: usize, k: usize) -> Option<&T> {
        self.rows.get(n).and_then(|r| r.get(k))
    }

    pub fn row(&self, n: usize) -> &[T] {
        &self.rows[n]
    }

    /// `P_n(w) = sum_k c_{n,k} w^k`.
    pub fn polynomial_at(&self, n: usize, w: &BigComplex) -> BigComplex
    where
        T: Into<BigComplex>,
    {
        let row = &self.rows[n];
        let mut acc = BigComplex::zero(w.precision());
        for c in row.iter().rev() {
            acc = &acc * w + &c.clone().into();
        }
        acc
    }
}

/// Builds `c_{n,k}` by truncated bivariate multiplication.
///
/// `b[n]` holds `b_n` from `n = 0`; `a[j]` holds `a_{j+3}`. Missing entries
/// count as zero. The grading `k <= n` is checked on the full square before
/// the triangle is kept.
pub fn cnk_table<T: Coefficient>(b: &[T], a: &[T], order: usize) -> Result<CnkTable<T>> {
    let proto = b
        .first()
        .or_else(|| a.first())
        .ok_or_else(|| Error::domain("cnk table needs at least one coefficient"))?;
    let zero = proto.zero_like();
    let one = proto.one_like();
    let prec = proto.precision();
    let n1 = order + 1;

    // S(z) = sum_{j>=1} a_{j+2} z^j
    let s: Vec<T> = (0..n1)
        .map(|j| if j == 0 { zero.clone() } else { a.get(j - 1).cloned().unwrap_or_else(|| zero.clone()) })
        .collect();

    // e[n][m] = [z^n w^m] exp(-w S)
    let mut e = vec![vec![zero.clone(); n1]; n1];
    let mut power = vec![zero.clone(); n1];
    power[0] = one;
    let mut factor = BigComplex::one(prec);
    for m in 0..n1 {
        for n in 0..n1 {
            if !power[n].is_zero() {
                e[n][m] = power[n].scale(&factor);
            }
        }
        let mut next = vec![zero.clone(); n1];
        for (i, p) in power.iter().enumerate() {
            if p.is_zero() {
                continue;
            }
            for j in 1..n1 - i {
                if s[j].is_zero() {
                    continue;
                }
                next[i + j] = next[i + j].add(&p.mul(&s[j]));
            }
        }
        power = next;
        factor = (-factor).div_int(m as i64 + 1);
    }

    let mut rows = Vec::with_capacity(n1);
    for n in 0..n1 {
        let mut full = vec![zero.clone(); n1];
        for i in 0..=n {
            let bi = match b.get(i) {
                Some(x) if !x.is_zero() => x,
                _ => continue,
            };
            for (k, slot) in full.iter_mut().enumerate() {
                let ek = &e[n - i][k];
                if !ek.is_zero() {
                    *slot = slot.add(&bi.mul(ek));
                }
            }
        }
        if let Some(k) = (n + 1..n1).find(|&k| !full[k].is_zero()) {
            return Err(Error::Internal(format!("cnk grading violated at n = {n}, k = {k}")));
        }
        full.truncate(n + 1);
        rows.push(full);
    }
    Ok(CnkTable { order, rows })
}

fn gamma_half(m: usize, prec: Precision) -> BigComplex {
    let x = Float::with_val(prec.bits(), m as f64 + 0.5);
    BigComplex::from_real(&x.gamma())
}

/// Assembled coefficients `sum_{k<=2n} Gamma(n+k+1/2) c_{2n,k} a2^-(n+k+1/2)`
/// for `n = 0..count`.
pub fn perron_terms<T: Coefficient>(table: &CnkTable<T>, a2: &T, count: usize) -> Result<Vec<T>> {
    if count == 0 {
        return Ok(Vec::new());
    }
    if 2 * (count - 1) > table.order {
        return Err(Error::domain(format!(
            "{count} terms need a table of order {}, got {}",
            2 * (count - 1),
            table.order
        )));
    }
    let prec = a2.precision();
    let max_j = 3 * (count - 1);
    let powers: Vec<T> = (0..=max_j as u32).map(|j| a2.inv_half_power(j)).collect::<Result<_>>()?;
    let mut out = Vec::with_capacity(count);
    for n in 0..count {
        let mut acc = a2.zero_like();
        for (k, c) in table.row(2 * n).iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let g = gamma_half(n + k, prec);
            acc = acc.add(&c.mul(&powers[n + k]).scale(&g));
        }
        out.push(acc);
    }
    Ok(out)
}

/// `int_R x^n exp(-a2 x^2 / lambda) dx`: zero for odd `n`, otherwise
/// `Gamma((n+1)/2) (lambda/a2)^((n+1)/2)`.
pub fn gaussian_moment(n: u32, a2: &BigComplex, lambda: &Float) -> Result<BigComplex> {
    let prec = a2.precision();
    if n % 2 == 1 {
        return Ok(BigComplex::zero(prec));
    }
    let inv = a2.inv_half_power(n / 2)?;
    let l = Float::with_val(prec.bits(), lambda.pow_ref_half(n));
    Ok(gamma_half(n as usize / 2, prec) * inv.mul_real(&l))
}

trait HalfPow {
    fn pow_ref_half(&self, n: u32) -> Float;
}

impl HalfPow for Float {
    /// `self^((n+1)/2)`
    fn pow_ref_half(&self, n: u32) -> Float {
        let s = Float::with_val(self.prec(), self.sqrt_ref());
        Float::with_val(self.prec(), rug::ops::Pow::pow(&s, n + 1))
    }
}

/// A truncated expansion `prefactor * sum c_e x^e` together with the size
/// of what was dropped.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticResult {
    /// `(exponent, coefficient)` in the expansion variable, increasing.
    pub terms: Vec<(HalfExp, BigComplex)>,
    /// Exponent of the first dropped term.
    pub truncation_exponent: HalfExp,
    pub prefactor: BigComplex,
    pub value_at: Option<Evaluation>,
    /// Magnitude of the dropped tail, estimated from the first two dropped terms.
    #[serde(with = "float_string")]
    pub remainder_estimate: Float,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Evaluation {
    #[serde(with = "float_string")]
    pub tau: Float,
    pub value: BigComplex,
}

impl AsymptoticResult {
    /// `prefactor * sum c_e x^e` at a positive `x`.
    pub fn evaluate(&self, x: &Float) -> BigComplex {
        let prec = self.prefactor.precision();
        let s = Float::with_val(prec.bits(), x.sqrt_ref());
        let mut acc = BigComplex::zero(prec);
        for (e, c) in &self.terms {
            let p = Float::with_val(prec.bits(), rug::ops::Pow::pow(&s, e.halves()));
            acc = acc + c.mul_real(&p);
        }
        &self.prefactor * &acc
    }

    pub fn value(&self) -> Option<&BigComplex> {
        self.value_at.as_ref().map(|e| &e.value)
    }
}

/// Evaluates the expansion of `int f exp(-phi/lambda)` with `count` terms.
/// The table must reach order `2 * (count + 1)` so the first two dropped
/// terms can be measured.
pub fn perron_sum(table: &CnkTable<BigComplex>, a2: &BigComplex, lambda: &Float, count: usize) -> Result<AsymptoticResult> {
    if *lambda <= 0 {
        return Err(Error::domain("expansion parameter must be positive"));
    }
    let all = perron_terms(table, a2, count + 2)?;
    let prec = a2.precision();
    let terms: Vec<(HalfExp, BigComplex)> = all
        .iter()
        .take(count)
        .enumerate()
        .map(|(n, c)| (HalfExp::from_halves(2 * n as i32 + 1), c.clone()))
        .collect();
    let lam = Float::with_val(prec.bits(), lambda);
    let sq = Float::with_val(prec.bits(), lam.sqrt_ref());
    let mut remainder = Float::new(prec.bits());
    for (n, c) in all.iter().enumerate().skip(count) {
        let p = Float::with_val(prec.bits(), rug::ops::Pow::pow(&sq, 2 * n as u32 + 1));
        remainder += c.abs() * p;
    }
    let mut out = AsymptoticResult {
        terms,
        truncation_exponent: HalfExp::from_halves(2 * count as i32 + 1),
        prefactor: BigComplex::one(prec),
        value_at: None,
        remainder_estimate: remainder,
    };
    let value = out.evaluate(&lam);
    out.value_at = Some(Evaluation { tau: lam, value });
    Ok(out)
}

/// Outcome of the empirical search for `min Re phi` away from the saddle.
#[derive(Clone, Debug, Serialize)]
pub struct ConditionReport {
    pub rho: f64,
    pub segment: (f64, f64),
    pub minimum: f64,
    pub argmin: f64,
    pub positive: bool,
}

/// Minimizes `re_phi` over `[a, b]` minus `(-rho, rho)` on a grid of step
/// `1e-3`, then refines around the best grid point by golden-section search.
pub fn verify_condition_c<F: Fn(f64) -> f64>(re_phi: F, rho: f64, segment: (f64, f64)) -> Result<ConditionReport> {
    let (a, b) = segment;
    if !(a < 0.0 && 0.0 < b && rho > 0.0 && rho < b.min(-a)) {
        return Err(Error::domain(format!("need a < -rho < 0 < rho < b, got [{a}, {b}], rho = {rho}")));
    }
    const STEP: f64 = 1e-3;
    let pieces = [(a, -rho), (rho, b)];
    let mut best = (f64::INFINITY, 0.0, (a, b));
    for (lo, hi) in pieces {
        let n = ((hi - lo) / STEP).ceil().max(1.0) as usize;
        for i in 0..=n {
            let x = lo + (hi - lo) * i as f64 / n as f64;
            let v = re_phi(x);
            if !v.is_finite() {
                return Err(Error::NonFinite(format!("Re phi at x = {x}")));
            }
            if v < best.0 {
                best = (v, x, (lo, hi));
            }
        }
    }
    let (mut fmin, mut xmin, (lo, hi)) = best;
    let l = (xmin - STEP).max(lo);
    let r = (xmin + STEP).min(hi);
    let (x, v) = golden_min(&re_phi, l, r);
    if v < fmin {
        fmin = v;
        xmin = x;
    }
    Ok(ConditionReport {
        rho,
        segment,
        minimum: fmin,
        argmin: xmin,
        positive: fmin > 0.0,
    })
}

fn golden_min<F: Fn(f64) -> f64>(f: &F, mut l: f64, mut r: f64) -> (f64, f64) {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = r - g * (r - l);
    let mut x2 = l + g * (r - l);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..60 {
        if f1 < f2 {
            r = x2;
            x2 = x1;
            f2 = f1;
            x1 = r - g * (r - l);
            f1 = f(x1);
        } else {
            l = x1;
            x1 = x2;
            f1 = f2;
            x2 = l + g * (r - l);
            f2 = f(x2);
        }
    }
    let candidates = [(l, f(l)), (r, f(r)), (x1, f1), (x2, f2)];
    candidates
        .into_iter()
        .fold((l, f64::INFINITY), |acc, c| if c.1 < acc.1 { c } else { acc })
}
