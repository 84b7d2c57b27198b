//! Truncated power series in `tau^(1/2)` with arbitrary-precision coefficients.
//!
//! A [`PuiseuxSeries`] stores the coefficients of `tau^(base + k/2)` for
//! `k = 0..len`. The first exponent that is *not* represented is
//! `trunc_order = base + len/2`; every operation propagates the tightest
//! truncation of its inputs so results never claim terms they do not know.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::bigcomplex::{precision_for_decimal, BigComplex, Precision};
use crate::error::{Error, Result};

/// An exponent on the half-integer grid, stored as a count of halves.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct HalfExp(i32);

impl HalfExp {
    pub const ZERO: HalfExp = HalfExp(0);

    pub const fn from_halves(halves: i32) -> Self {
        HalfExp(halves)
    }

    pub const fn int(n: i32) -> Self {
        HalfExp(2 * n)
    }

    pub const fn halves(self) -> i32 {
        self.0
    }

    pub fn is_integer(self) -> bool {
        self.0 % 2 == 0
    }

    pub fn to_f64(self) -> f64 {
        f64::from(self.0) / 2.0
    }
}

impl Add for HalfExp {
    type Output = HalfExp;
    fn add(self, rhs: HalfExp) -> HalfExp {
        HalfExp(self.0 + rhs.0)
    }
}

impl Sub for HalfExp {
    type Output = HalfExp;
    fn sub(self, rhs: HalfExp) -> HalfExp {
        HalfExp(self.0 - rhs.0)
    }
}

impl Serialize for HalfExp {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for HalfExp {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(deserializer)?.parse().map_err(serde::de::Error::custom)
    }
}

impl fmt::Display for HalfExp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integer() {
            write!(f, "{}", self.0 / 2)
        } else {
            write!(f, "{}/2", self.0)
        }
    }
}

impl FromStr for HalfExp {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::Parse(format!("bad exponent {s:?}"));
        match s.split_once('/') {
            Some((num, "2")) => num.trim().parse::<i32>().map(HalfExp).map_err(|_| bad()),
            Some((num, "1")) => num.trim().parse::<i32>().map(HalfExp::int).map_err(|_| bad()),
            Some(_) => Err(bad()),
            None => s.parse::<i32>().map(HalfExp::int).map_err(|_| bad()),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PuiseuxSeries {
    base: HalfExp,
    coeffs: Vec<BigComplex>,
    prec: Precision,
}

impl PuiseuxSeries {
    pub fn new(base: HalfExp, coeffs: Vec<BigComplex>, prec: Precision) -> Self {
        PuiseuxSeries { base, coeffs, prec }
    }

    /// Builds a series from sparse `(exponent, coefficient)` pairs; exponents
    /// at or beyond `trunc` are rejected.
    pub fn from_terms(
        terms: &[(HalfExp, BigComplex)],
        base: HalfExp,
        trunc: HalfExp,
        prec: Precision,
    ) -> Result<Self> {
        let mut s = PuiseuxSeries::zero(base, trunc, prec);
        for (e, c) in terms {
            if *e < base || *e >= trunc {
                return Err(Error::structural(format!(
                    "term tau^{e} outside [{base}, {trunc})"
                )));
            }
            let k = (*e - base).halves() as usize;
            s.coeffs[k] = &s.coeffs[k] + c;
        }
        Ok(s)
    }

    pub fn zero(base: HalfExp, trunc: HalfExp, prec: Precision) -> Self {
        let len = (trunc - base).halves().max(0) as usize;
        PuiseuxSeries {
            base,
            coeffs: vec![BigComplex::zero(prec); len],
            prec,
        }
    }

    /// The constant `c` known through `trunc`.
    pub fn constant(c: BigComplex, trunc: HalfExp) -> Self {
        let prec = c.precision();
        let mut s = PuiseuxSeries::zero(HalfExp::ZERO, trunc, prec);
        if let Some(first) = s.coeffs.first_mut() {
            *first = c;
        }
        s
    }

    pub fn one(trunc: HalfExp, prec: Precision) -> Self {
        PuiseuxSeries::constant(BigComplex::one(prec), trunc)
    }

    /// `c * tau^e`, known through `trunc`.
    pub fn monomial(c: BigComplex, e: HalfExp, trunc: HalfExp) -> Self {
        let prec = c.precision();
        let mut s = PuiseuxSeries::zero(e, trunc, prec);
        if let Some(first) = s.coeffs.first_mut() {
            *first = c;
        }
        s
    }

    pub fn base_exponent(&self) -> HalfExp {
        self.base
    }

    pub fn trunc_order(&self) -> HalfExp {
        self.base + HalfExp(self.coeffs.len() as i32)
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeffs(&self) -> &[BigComplex] {
        &self.coeffs
    }

    pub fn precision(&self) -> Precision {
        self.prec
    }

    /// Coefficient of `tau^e`; `None` when `e` is at or beyond the truncation.
    pub fn coeff(&self, e: HalfExp) -> Option<BigComplex> {
        if e >= self.trunc_order() {
            None
        } else if e < self.base {
            Some(BigComplex::zero(self.prec))
        } else {
            Some(self.coeffs[(e - self.base).halves() as usize].clone())
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (HalfExp, &BigComplex)> {
        self.coeffs
            .iter()
            .enumerate()
            .map(move |(k, c)| (self.base + HalfExp(k as i32), c))
    }

    /// Terms with nonzero coefficients.
    pub fn nonzero_terms(&self) -> Vec<(HalfExp, BigComplex)> {
        self.terms()
            .filter(|(_, c)| !c.is_zero())
            .map(|(e, c)| (e, c.clone()))
            .collect()
    }

    /// Drops every term at or beyond `trunc`.
    pub fn truncate(&self, trunc: HalfExp) -> Self {
        let keep = (trunc - self.base).halves().clamp(0, self.coeffs.len() as i32) as usize;
        PuiseuxSeries {
            base: self.base,
            coeffs: self.coeffs[..keep].to_vec(),
            prec: self.prec,
        }
    }

    /// Re-expresses the series on a grid starting at `base <= self.base`.
    fn rebase(&self, base: HalfExp) -> Self {
        debug_assert!(base <= self.base);
        let pad = (self.base - base).halves() as usize;
        let mut coeffs = vec![BigComplex::zero(self.prec); pad];
        coeffs.extend(self.coeffs.iter().cloned());
        PuiseuxSeries {
            base,
            coeffs,
            prec: self.prec,
        }
    }

    /// Strips exactly-zero leading coefficients, raising the base exponent.
    pub fn normalized(&self) -> Self {
        let lead = self.coeffs.iter().position(|c| !c.is_zero());
        match lead {
            Some(k) => PuiseuxSeries {
                base: self.base + HalfExp(k as i32),
                coeffs: self.coeffs[k..].to_vec(),
                prec: self.prec,
            },
            None => PuiseuxSeries {
                base: self.trunc_order(),
                coeffs: Vec::new(),
                prec: self.prec,
            },
        }
    }

    pub fn scale(&self, c: &BigComplex) -> Self {
        PuiseuxSeries {
            base: self.base,
            coeffs: self.coeffs.iter().map(|x| x * c).collect(),
            prec: self.prec.max(c.precision()),
        }
    }

    /// Multiplication by `tau^e`.
    pub fn shift(&self, e: HalfExp) -> Self {
        PuiseuxSeries {
            base: self.base + e,
            coeffs: self.coeffs.clone(),
            prec: self.prec,
        }
    }

    fn add_impl(&self, other: &Self, negate: bool) -> Self {
        let base = self.base.min(other.base);
        let trunc = self.trunc_order().min(other.trunc_order());
        let a = self.rebase(base).truncate(trunc);
        let b = other.rebase(base).truncate(trunc);
        let len = (trunc - base).halves().max(0) as usize;
        let prec = self.prec.max(other.prec);
        let coeffs = (0..len)
            .map(|k| {
                let x = a.coeffs.get(k).cloned().unwrap_or_else(|| BigComplex::zero(prec));
                let y = b.coeffs.get(k).cloned().unwrap_or_else(|| BigComplex::zero(prec));
                if negate {
                    x - y
                } else {
                    x + y
                }
            })
            .collect();
        PuiseuxSeries { base, coeffs, prec }
    }

    /// Cauchy product; the relative length is the shorter of the two.
    pub fn mul_series(&self, other: &Self) -> Self {
        let len = self.coeffs.len().min(other.coeffs.len());
        let prec = self.prec.max(other.prec);
        let mut coeffs = vec![BigComplex::zero(prec); len];
        for (i, a) in self.coeffs.iter().take(len).enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().take(len - i).enumerate() {
                coeffs[i + j] = &coeffs[i + j] + &(a * b);
            }
        }
        PuiseuxSeries {
            base: self.base + other.base,
            coeffs,
            prec,
        }
    }

    /// `exp` of the series via `g' = a' g`. Requires no negative powers.
    pub fn exp(&self) -> Result<Self> {
        if self.base < HalfExp::ZERO {
            return Err(Error::structural(format!(
                "exp of a series with negative exponent tau^{}",
                self.base
            )));
        }
        let a = self.rebase(HalfExp::ZERO);
        let n = a.coeffs.len();
        if n == 0 {
            return Ok(a);
        }
        let mut g = vec![BigComplex::zero(self.prec); n];
        g[0] = a.coeffs[0].exp();
        for k in 1..n {
            let mut acc = BigComplex::zero(self.prec);
            for j in 1..=k {
                if a.coeffs[j].is_zero() {
                    continue;
                }
                acc = acc + a.coeffs[j].mul_int(j as i64) * &g[k - j];
            }
            g[k] = acc.div_int(k as i64);
        }
        Ok(PuiseuxSeries {
            base: HalfExp::ZERO,
            coeffs: g,
            prec: self.prec,
        })
    }

    /// Principal logarithm. Requires a nonzero constant term and no
    /// fractional monomial factor (a `log tau` term is not representable).
    pub fn ln(&self) -> Result<Self> {
        let s = self.normalized();
        if s.coeffs.is_empty() {
            return Err(Error::structural("log of a series with no known nonzero term"));
        }
        if s.base != HalfExp::ZERO {
            return Err(Error::structural(format!(
                "log of a series with leading monomial tau^{}",
                s.base
            )));
        }
        let c0 = s.coeffs[0].clone();
        let h: Vec<BigComplex> = s.coeffs.iter().map(|c| c / &c0).collect();
        let n = h.len();
        let mut g = vec![BigComplex::zero(self.prec); n];
        g[0] = c0.ln()?;
        for k in 1..n {
            let mut acc = h[k].mul_int(k as i64);
            for j in 1..k {
                if h[k - j].is_zero() {
                    continue;
                }
                acc = acc - g[j].mul_int(j as i64) * &h[k - j];
            }
            g[k] = acc.div_int(k as i64);
        }
        Ok(PuiseuxSeries {
            base: HalfExp::ZERO,
            coeffs: g,
            prec: self.prec,
        })
    }

    /// `self^(num/den)` with the principal power of the leading coefficient.
    /// The leading monomial `tau^b` becomes `tau^(b*num/den)`, which must stay
    /// on the half-integer grid.
    pub fn pow(&self, num: i64, den: i64) -> Result<Self> {
        if den <= 0 {
            return Err(Error::structural("power with non-positive denominator"));
        }
        let s = self.normalized();
        if s.coeffs.is_empty() {
            return Err(Error::structural("power of a series with zero constant term"));
        }
        let scaled = i64::from(s.base.halves()) * num;
        if scaled % den != 0 {
            return Err(Error::structural(format!(
                "tau^{} raised to {num}/{den} leaves the half-integer grid",
                s.base
            )));
        }
        let new_base = HalfExp((scaled / den) as i32);
        let prec = self.prec;
        let alpha = BigComplex::from_ratio(num, den, prec);
        let c0 = s.coeffs[0].clone();
        let h: Vec<BigComplex> = s.coeffs.iter().map(|c| c / &c0).collect();
        let n = h.len();
        let mut g = vec![BigComplex::zero(prec); n];
        g[0] = BigComplex::one(prec);
        let alpha_plus_one = alpha.add_real(&rug::Float::with_val(prec.bits(), 1));
        for k in 1..n {
            let mut acc = BigComplex::zero(prec);
            for j in 1..=k {
                if h[j].is_zero() {
                    continue;
                }
                let weight = alpha_plus_one.mul_int(j as i64) - BigComplex::from_int(k as i64, prec);
                acc = acc + weight * &h[j] * &g[k - j];
            }
            g[k] = acc.div_int(k as i64);
        }
        let lead = c0.powc(&alpha)?;
        Ok(PuiseuxSeries {
            base: new_base,
            coeffs: g.into_iter().map(|c| c * &lead).collect(),
            prec,
        })
    }

    pub fn recip(&self) -> Result<Self> {
        self.pow(-1, 1)
    }

    pub fn div_series(&self, other: &Self) -> Result<Self> {
        Ok(self.mul_series(&other.recip()?))
    }

    /// `outer(inner(tau))` where `outer` is a truncated series in its own
    /// variable with non-negative integer exponents and `inner` vanishes at
    /// `tau = 0`.
    pub fn compose(outer: &Self, inner: &Self) -> Result<Self> {
        let (poly, outer_trunc) = outer.integer_coefficients()?;
        let inner_n = inner.normalized();
        if inner_n.coeffs.is_empty() || inner_n.base <= HalfExp::ZERO {
            return Err(Error::structural(format!(
                "composition needs an inner series with positive leading exponent, got tau^{}",
                inner_n.base
            )));
        }
        let v = inner_n.base;
        let mut trunc = HalfExp(outer_trunc * v.halves());
        if let Some(kmin) = poly.iter().skip(1).position(|c| !c.is_zero()) {
            trunc = trunc.min(inner.trunc_order() + HalfExp(kmin as i32 * v.halves()));
        }
        Ok(horner(&poly, &inner_n, trunc, outer.prec.max(inner.prec)))
    }

    /// `p(inner(tau))` for an exact polynomial `p` given by its coefficients.
    pub fn compose_polynomial(poly: &[BigComplex], inner: &Self) -> Self {
        let prec = inner.prec;
        let inner_n = inner.normalized();
        let v = inner_n.base.min(HalfExp::ZERO.max(inner_n.base));
        let v = if inner_n.coeffs.is_empty() { HalfExp::ZERO } else { v };
        let kmin = poly.iter().skip(1).position(|c| !c.is_zero()).unwrap_or(0);
        let trunc = inner.trunc_order() + HalfExp(kmin as i32 * v.halves());
        let inner_used = if inner_n.coeffs.is_empty() { inner.clone() } else { inner_n };
        horner(poly, &inner_used, trunc, prec)
    }

    /// Coefficients of `z^0..z^M` when all exponents are non-negative integers,
    /// together with `M + 1`, the first unknown power.
    fn integer_coefficients(&self) -> Result<(Vec<BigComplex>, i32)> {
        if self.base < HalfExp::ZERO {
            return Err(Error::structural("outer series has negative powers"));
        }
        let full = self.rebase(HalfExp::ZERO);
        let mut poly = Vec::new();
        for (k, c) in full.coeffs.iter().enumerate() {
            if k % 2 == 1 {
                if !c.is_zero() {
                    return Err(Error::structural(
                        "outer series of a composition has half-integer powers",
                    ));
                }
            } else {
                poly.push(c.clone());
            }
        }
        // first unknown integer power of z
        let trunc = (self.trunc_order().halves() + 1) / 2;
        poly.truncate(trunc.max(0) as usize);
        Ok((poly, trunc))
    }

    /// Evaluates the truncated sum at `tau`, using the principal square root
    /// for half-integer powers.
    pub fn evaluate(&self, tau: &BigComplex) -> BigComplex {
        let prec = self.prec.max(tau.precision());
        let s = tau.sqrt();
        let mut acc = BigComplex::zero(prec);
        let step_has_halves = self.base.halves() % 2 != 0
            || self.coeffs.iter().skip(1).step_by(2).any(|c| !c.is_zero());
        if step_has_halves {
            let mut power = s.powi(self.base.halves());
            for c in &self.coeffs {
                acc = acc + c * &power;
                power = &power * &s;
            }
        } else {
            // integer powers only: Horner in tau
            let even: Vec<&BigComplex> = self.coeffs.iter().step_by(2).collect();
            for c in even.iter().rev() {
                acc = &acc * tau + *c;
            }
            acc = acc * tau.powi(self.base.halves() / 2);
        }
        acc
    }

    /// Magnitude `|c_e| |tau|^e` of a single term.
    pub fn term_magnitude(&self, e: HalfExp, tau: &BigComplex) -> Option<rug::Float> {
        let c = self.coeff(e)?;
        let s = tau.sqrt();
        Some((c * s.powi(e.halves())).abs())
    }

    /// Splits off the terms with exponent `<= e`, returning them and the rest
    /// (the rest keeps the truncation order of `self`).
    pub fn split_at(&self, e: HalfExp) -> (Vec<(HalfExp, BigComplex)>, Self) {
        let head: Vec<(HalfExp, BigComplex)> = self
            .terms()
            .filter(|(x, _)| *x <= e)
            .map(|(x, c)| (x, c.clone()))
            .collect();
        let new_base = (e + HalfExp(1)).max(self.base);
        let skip = (new_base - self.base).halves().max(0) as usize;
        let tail = PuiseuxSeries {
            base: new_base,
            coeffs: self.coeffs.iter().skip(skip).cloned().collect(),
            prec: self.prec,
        };
        (head, tail)
    }

    pub fn with_precision(&self, prec: Precision) -> Self {
        PuiseuxSeries {
            base: self.base,
            coeffs: self.coeffs.iter().map(|c| c.with_precision(prec)).collect(),
            prec,
        }
    }

    pub fn to_json(&self) -> SeriesJson {
        SeriesJson {
            base_exponent: self.base.to_string(),
            coeffs: self.coeffs.iter().map(|c| c.to_decimal_strings()).collect(),
            trunc_order: self.trunc_order().to_string(),
        }
    }

    pub fn from_json(json: &SeriesJson) -> Result<Self> {
        let base: HalfExp = json.base_exponent.parse()?;
        let trunc: HalfExp = json.trunc_order.parse()?;
        if trunc - base != HalfExp(json.coeffs.len() as i32) {
            return Err(Error::Parse(format!(
                "trunc_order {trunc} inconsistent with base {base} and {} coefficients",
                json.coeffs.len()
            )));
        }
        let strings: Vec<&str> = json
            .coeffs
            .iter()
            .flat_map(|(r, i)| [r.as_str(), i.as_str()])
            .collect();
        let prec = precision_for_decimal(&strings);
        let coeffs = json
            .coeffs
            .iter()
            .map(|(r, i)| BigComplex::parse(r, i, prec))
            .collect::<Result<Vec<_>>>()?;
        Ok(PuiseuxSeries { base, coeffs, prec })
    }
}

fn horner(poly: &[BigComplex], inner: &PuiseuxSeries, trunc: HalfExp, prec: Precision) -> PuiseuxSeries {
    let base = HalfExp::ZERO.min(inner.base);
    let mut acc = PuiseuxSeries::zero(base, trunc, prec);
    let rel = (trunc - base).halves().max(0);
    // inner padded so that products keep enough relative length
    let padded = extend_to(inner, inner.base + HalfExp(rel));
    for c in poly.iter().rev() {
        acc = acc.mul_series(&padded).rebase_or_truncate(base, trunc);
        let cst = PuiseuxSeries::constant(c.clone(), trunc).rebase_or_truncate(base, trunc);
        acc = acc.add_impl(&cst, false);
    }
    acc.truncate(trunc)
}

fn extend_to(s: &PuiseuxSeries, trunc: HalfExp) -> PuiseuxSeries {
    if s.trunc_order() >= trunc {
        return s.clone();
    }
    // Only used internally where the caller has already capped the final
    // truncation; the padding zeros never reach a claimed coefficient.
    let mut out = s.clone();
    let extra = (trunc - s.trunc_order()).halves() as usize;
    out.coeffs.extend(std::iter::repeat_with(|| BigComplex::zero(s.prec)).take(extra));
    out
}

impl PuiseuxSeries {
    fn rebase_or_truncate(&self, base: HalfExp, trunc: HalfExp) -> Self {
        let s = if self.base > base { self.rebase(base) } else { self.clone() };
        let s = extend_to(&s, trunc);
        s.truncate(trunc)
    }
}

impl Add for &PuiseuxSeries {
    type Output = PuiseuxSeries;
    fn add(self, rhs: &PuiseuxSeries) -> PuiseuxSeries {
        self.add_impl(rhs, false)
    }
}

impl Sub for &PuiseuxSeries {
    type Output = PuiseuxSeries;
    fn sub(self, rhs: &PuiseuxSeries) -> PuiseuxSeries {
        self.add_impl(rhs, true)
    }
}

impl Mul for &PuiseuxSeries {
    type Output = PuiseuxSeries;
    fn mul(self, rhs: &PuiseuxSeries) -> PuiseuxSeries {
        self.mul_series(rhs)
    }
}

impl Neg for &PuiseuxSeries {
    type Output = PuiseuxSeries;
    fn neg(self) -> PuiseuxSeries {
        PuiseuxSeries {
            base: self.base,
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
            prec: self.prec,
        }
    }
}

/// Wire form: decimal strings for every number.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeriesJson {
    pub base_exponent: String,
    pub coeffs: Vec<(String, String)>,
    pub trunc_order: String,
}

impl Serialize for PuiseuxSeries {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_json().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for PuiseuxSeries {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let json = SeriesJson::deserialize(deserializer)?;
        PuiseuxSeries::from_json(&json).map_err(serde::de::Error::custom)
    }
}

impl fmt::Display for PuiseuxSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let digits = f.precision().unwrap_or(12);
        let mut first = true;
        for (e, c) in self.terms() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({})·τ^{}", c.to_string_digits(digits), e)?;
        }
        if first {
            write!(f, "0")?;
        }
        write!(f, " + O(τ^{})", self.trunc_order())
    }
}
