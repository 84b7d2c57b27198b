//! Arbitrary-precision complex scalar.
//!
//! [`BigComplex`] is a thin layer over an MPC complex number that tracks its
//! working precision in decimal digits. Binary operations round to the larger
//! precision of their two operands.

use std::cmp::max;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use rug::float::Constant;
use rug::ops::Pow;
use rug::{Assign, Complex, Float};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

const LOG2_10: f64 = std::f64::consts::LOG2_10;
const GUARD_BITS: u32 = 8;

/// Working precision in decimal digits.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Precision(u32);

impl Precision {
    pub const MIN_DIGITS: u32 = 30;
    pub const DEFAULT_DIGITS: u32 = 50;

    pub fn new(digits: u32) -> Result<Self> {
        if digits < Self::MIN_DIGITS {
            return Err(Error::Precision {
                got: digits,
                min: Self::MIN_DIGITS,
            });
        }
        Ok(Precision(digits))
    }

    pub fn digits(self) -> u32 {
        self.0
    }

    pub fn bits(self) -> u32 {
        (f64::from(self.0) * LOG2_10).ceil() as u32 + GUARD_BITS
    }

    /// Largest digit count representable in `bits`.
    pub fn from_bits(bits: u32) -> Self {
        let d = (f64::from(bits.saturating_sub(GUARD_BITS)) / LOG2_10).floor() as u32;
        Precision(d.max(Self::MIN_DIGITS))
    }

    /// Same precision plus `extra` guard digits.
    pub fn with_guard(self, extra: u32) -> Self {
        Precision(self.0 + extra)
    }
}

impl Default for Precision {
    fn default() -> Self {
        Precision(Self::DEFAULT_DIGITS)
    }
}

impl fmt::Display for Precision {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} digits", self.0)
    }
}

pub fn pi(prec: Precision) -> Float {
    Float::with_val(prec.bits(), Constant::Pi)
}

pub fn real(value: f64, prec: Precision) -> Float {
    Float::with_val(prec.bits(), value)
}

/// `num/den` rounded once at the requested precision.
pub fn ratio(num: i64, den: i64, prec: Precision) -> Float {
    Float::with_val(prec.bits(), num) / den
}

/// Parses a decimal string such as `-1.25e-3`.
pub fn parse_real(s: &str, prec: Precision) -> Result<Float> {
    let parsed = Float::parse(s.trim()).map_err(|e| Error::Parse(format!("{s:?}: {e}")))?;
    let value = Float::with_val(prec.bits(), parsed);
    if !value.is_finite() {
        return Err(Error::NonFinite(s.to_string()));
    }
    Ok(value)
}

/// The working precision whose round-trip decimal output has as many
/// significant digits as the longest of `strings`.
pub fn precision_for_decimal(strings: &[&str]) -> Precision {
    let n = strings
        .iter()
        .map(|s| {
            let mantissa = s.trim().split(['e', 'E']).next().unwrap_or("");
            mantissa.chars().filter(|c| c.is_ascii_digit()).count() as u32
        })
        .max()
        .unwrap_or(0);
    let mut d = Precision::MIN_DIGITS;
    loop {
        let p = Precision(d);
        let printed = 1 + (f64::from(p.bits()) * std::f64::consts::LOG10_2).ceil() as u32;
        if printed >= n {
            return p;
        }
        d += 1;
    }
}

/// Decimal string with enough digits to round-trip the value exactly.
pub fn real_to_string(x: &Float) -> String {
    x.to_string_radix(10, None)
}

#[derive(Clone, PartialEq)]
pub struct BigComplex {
    inner: Complex,
}

impl BigComplex {
    pub fn new(re: Float, im: Float) -> Result<Self> {
        if !re.is_finite() || !im.is_finite() {
            return Err(Error::NonFinite(format!("({re}, {im})")));
        }
        let bits = max(re.prec(), im.prec());
        Ok(BigComplex {
            inner: Complex::with_val(bits, (re, im)),
        })
    }

    pub fn from_f64(re: f64, im: f64, prec: Precision) -> Result<Self> {
        if !re.is_finite() || !im.is_finite() {
            return Err(Error::NonFinite(format!("({re}, {im})")));
        }
        Ok(BigComplex {
            inner: Complex::with_val(prec.bits(), (re, im)),
        })
    }

    pub fn from_real(re: &Float) -> Self {
        BigComplex {
            inner: Complex::with_val(re.prec(), (re, 0)),
        }
    }

    pub fn from_parts(re: &Float, im: &Float) -> Self {
        let bits = max(re.prec(), im.prec());
        BigComplex {
            inner: Complex::with_val(bits, (re, im)),
        }
    }

    pub fn from_int(n: i64, prec: Precision) -> Self {
        BigComplex {
            inner: Complex::with_val(prec.bits(), (n, 0)),
        }
    }

    pub fn from_ratio(num: i64, den: i64, prec: Precision) -> Self {
        BigComplex::from_real(&ratio(num, den, prec))
    }

    pub fn parse(re: &str, im: &str, prec: Precision) -> Result<Self> {
        Self::new(parse_real(re, prec)?, parse_real(im, prec)?)
    }

    pub fn zero(prec: Precision) -> Self {
        Self::from_int(0, prec)
    }

    pub fn one(prec: Precision) -> Self {
        Self::from_int(1, prec)
    }

    pub fn i(prec: Precision) -> Self {
        BigComplex {
            inner: Complex::with_val(prec.bits(), (0, 1)),
        }
    }

    /// `exp(i*theta)` for real `theta`.
    pub fn cis(theta: &Float) -> Self {
        let (s, c) = theta.clone().sin_cos(Float::new(theta.prec()));
        BigComplex::from_parts(&c, &s)
    }

    /// `e^(i*pi*num/den)`.
    pub fn exp_i_pi(num: i64, den: i64, prec: Precision) -> Self {
        let theta = pi(prec) * num / den;
        Self::cis(&theta)
    }

    pub fn as_complex(&self) -> &Complex {
        &self.inner
    }

    pub fn re(&self) -> &Float {
        self.inner.real()
    }

    pub fn im(&self) -> &Float {
        self.inner.imag()
    }

    pub fn bits(&self) -> u32 {
        self.inner.prec().0
    }

    pub fn precision(&self) -> Precision {
        Precision::from_bits(self.bits())
    }

    /// Rounds (or extends) to another working precision.
    pub fn with_precision(&self, prec: Precision) -> Self {
        BigComplex {
            inner: Complex::with_val(prec.bits(), &self.inner),
        }
    }

    pub fn is_finite(&self) -> bool {
        self.re().is_finite() && self.im().is_finite()
    }

    pub fn check_finite(self, what: &str) -> Result<Self> {
        if self.is_finite() {
            Ok(self)
        } else {
            Err(Error::NonFinite(what.to_string()))
        }
    }

    pub fn is_zero(&self) -> bool {
        self.re().is_zero() && self.im().is_zero()
    }

    pub fn abs(&self) -> Float {
        Float::with_val(self.bits(), self.inner.abs_ref())
    }

    /// Principal argument in `(-pi, pi]`.
    pub fn arg(&self) -> Float {
        Float::with_val(self.bits(), self.inner.arg_ref())
    }

    pub fn conj(&self) -> Self {
        BigComplex {
            inner: self.inner.clone().conj(),
        }
    }

    pub fn exp(&self) -> Self {
        BigComplex {
            inner: self.inner.clone().exp(),
        }
    }

    /// Principal logarithm, imaginary part in `(-pi, pi]`.
    pub fn ln(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::domain("logarithm of zero"));
        }
        Ok(BigComplex {
            inner: self.inner.clone().ln(),
        })
    }

    /// Logarithm with imaginary part in `(-pi/2, 3pi/2]`, the branch of the
    /// plane cut along the negative imaginary axis.
    pub fn ln_upper(&self) -> Result<Self> {
        if self.re().is_zero() && !self.im().is_sign_positive() || self.is_zero() {
            return Err(Error::domain(format!(
                "{self} lies on the cut -i[0, inf) of the upper logarithm"
            )));
        }
        let mut l = self.inner.clone().ln();
        let half_pi: Float = pi(self.precision()) / 2u32;
        if *l.imag() <= -half_pi.clone() {
            let two_pi = half_pi * 4;
            let im = Float::with_val(l.imag().prec(), l.imag() + &two_pi);
            l.mut_imag().assign(im);
        }
        Ok(BigComplex { inner: l })
    }

    /// Principal square root.
    pub fn sqrt(&self) -> Self {
        BigComplex {
            inner: self.inner.clone().sqrt(),
        }
    }

    /// `self^w = exp(w log self)` on the principal branch.
    pub fn powc(&self, w: &BigComplex) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::domain("complex power of zero"));
        }
        let bits = max(self.bits(), w.bits());
        let base = Complex::with_val(bits, &self.inner);
        Ok(BigComplex {
            inner: base.pow(&w.inner),
        })
    }

    pub fn powi(&self, n: i32) -> Self {
        BigComplex {
            inner: self.inner.clone().pow(n),
        }
    }

    pub fn recip(&self) -> Self {
        BigComplex {
            inner: self.inner.clone().recip(),
        }
    }

    pub fn mul_real(&self, x: &Float) -> Self {
        let bits = max(self.bits(), x.prec());
        BigComplex {
            inner: Complex::with_val(bits, &self.inner * x),
        }
    }

    pub fn div_real(&self, x: &Float) -> Self {
        let bits = max(self.bits(), x.prec());
        BigComplex {
            inner: Complex::with_val(bits, &self.inner / x),
        }
    }

    pub fn add_real(&self, x: &Float) -> Self {
        let bits = max(self.bits(), x.prec());
        BigComplex {
            inner: Complex::with_val(bits, &self.inner + x),
        }
    }

    pub fn mul_int(&self, n: i64) -> Self {
        BigComplex {
            inner: Complex::with_val(self.bits(), &self.inner * n),
        }
    }

    pub fn div_int(&self, n: i64) -> Self {
        BigComplex {
            inner: Complex::with_val(self.bits(), &self.inner / n),
        }
    }

    /// Multiplication by `i`.
    pub fn mul_i(&self) -> Self {
        BigComplex {
            inner: self.inner.clone().mul_i(false),
        }
    }

    /// `log10 |self|`, usable far outside the f64 exponent range.
    pub fn log10_abs(&self) -> f64 {
        if self.is_zero() {
            return f64::NEG_INFINITY;
        }
        self.abs().log10().to_f64()
    }

    /// Nearest double-precision pair.
    pub fn to_f64_pair(&self) -> (f64, f64) {
        (self.re().to_f64(), self.im().to_f64())
    }

    /// Decimal strings `(re, im)` with enough digits for exact round-trip.
    pub fn to_decimal_strings(&self) -> (String, String) {
        (real_to_string(self.re()), real_to_string(self.im()))
    }

    /// Human-readable form with `digits` significant digits per component.
    pub fn to_string_digits(&self, digits: usize) -> String {
        let re = self.re().to_string_radix(10, Some(digits));
        let im = self.im();
        let sign = if im.is_sign_negative() { '-' } else { '+' };
        let im_abs = Float::with_val(im.prec(), im.abs_ref());
        format!("{re} {sign} {}i", im_abs.to_string_radix(10, Some(digits)))
    }

    /// Absolute distance `|self - other|`.
    pub fn dist(&self, other: &BigComplex) -> Float {
        (self - other).abs()
    }

    /// Number of leading decimal digits on which `self` and `other` agree,
    /// measured as `-log10(|self - other| / |other|)`.
    pub fn agreeing_digits(&self, other: &BigComplex) -> f64 {
        let diff = self - other;
        if diff.is_zero() {
            return f64::INFINITY;
        }
        other.log10_abs() - diff.log10_abs()
    }
}

impl fmt::Display for BigComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let digits = f.precision().unwrap_or(20);
        write!(f, "{}", self.to_string_digits(digits))
    }
}

impl fmt::Debug for BigComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BigComplex({})", self.to_string_digits(25))
    }
}

impl Serialize for BigComplex {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_decimal_strings().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for BigComplex {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let (re, im) = <(String, String)>::deserialize(deserializer)?;
        let prec = precision_for_decimal(&[&re, &im]);
        BigComplex::parse(&re, &im, prec).map_err(serde::de::Error::custom)
    }
}

macro_rules! binop {
    ($trait:ident, $method:ident, $op:tt) => {
        impl<'a> $trait<&'a BigComplex> for &'a BigComplex {
            type Output = BigComplex;
            fn $method(self, rhs: &'a BigComplex) -> BigComplex {
                let bits = max(self.bits(), rhs.bits());
                BigComplex {
                    inner: Complex::with_val(bits, &self.inner $op &rhs.inner),
                }
            }
        }
        impl<'a> $trait<&'a BigComplex> for BigComplex {
            type Output = BigComplex;
            fn $method(self, rhs: &'a BigComplex) -> BigComplex {
                (&self).$method(rhs)
            }
        }
        impl<'a> $trait<BigComplex> for &'a BigComplex {
            type Output = BigComplex;
            fn $method(self, rhs: BigComplex) -> BigComplex {
                self.$method(&rhs)
            }
        }
        impl $trait<BigComplex> for BigComplex {
            type Output = BigComplex;
            fn $method(self, rhs: BigComplex) -> BigComplex {
                (&self).$method(&rhs)
            }
        }
    };
}

binop!(Add, add, +);
binop!(Sub, sub, -);
binop!(Mul, mul, *);
binop!(Div, div, /);

impl Neg for BigComplex {
    type Output = BigComplex;
    fn neg(self) -> BigComplex {
        BigComplex { inner: -self.inner }
    }
}

impl Neg for &BigComplex {
    type Output = BigComplex;
    fn neg(self) -> BigComplex {
        BigComplex {
            inner: -self.inner.clone(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p() -> Precision {
        Precision::default()
    }

    #[test]
    fn precision_floor() {
        assert!(Precision::new(29).is_err());
        let prec = Precision::new(30).unwrap();
        assert_eq!(Precision::from_bits(prec.bits()).digits(), 30);
        assert_eq!(Precision::from_bits(p().bits()), p());
    }

    #[test]
    fn rejects_non_finite() {
        assert!(BigComplex::from_f64(f64::NAN, 0.0, p()).is_err());
        assert!(BigComplex::from_f64(0.0, f64::INFINITY, p()).is_err());
        assert!(BigComplex::parse("inf", "0", p()).is_err());
    }

    #[test]
    fn mixed_precision_uses_max() {
        let a = BigComplex::one(Precision::new(30).unwrap());
        let b = BigComplex::one(Precision::new(80).unwrap());
        assert_eq!((&a + &b).bits(), b.bits());
        assert_eq!((&b * &a).bits(), b.bits());
    }

    #[test]
    fn upper_log_branch() {
        let prec = p();
        // arg(-1) = pi, arg(-1 - i) = 5pi/4 on this branch
        let l = BigComplex::from_f64(-1.0, -1.0, prec).unwrap().ln_upper().unwrap();
        let expected = pi(prec) * 5 / 4;
        assert!((Float::with_val(prec.bits(), l.im() - &expected)).abs() < 1e-45);
        let l = BigComplex::from_f64(1.0, -1.0, prec).unwrap().ln_upper().unwrap();
        assert!(l.im().to_f64() < 0.0);
        assert!(BigComplex::from_f64(0.0, -2.0, prec).unwrap().ln_upper().is_err());
        assert!(BigComplex::zero(prec).ln_upper().is_err());
    }

    #[test]
    fn decimal_round_trip() {
        let prec = p();
        let z = BigComplex::from_ratio(1, 3, prec) + BigComplex::i(prec).mul_real(&pi(prec));
        let (re, im) = z.to_decimal_strings();
        let back = BigComplex::parse(&re, &im, prec).unwrap();
        assert_eq!(back, z);
        let json = serde_json::to_string(&z).unwrap();
        let back: BigComplex = serde_json::from_str(&json).unwrap();
        assert_eq!(back, z);
    }

    #[test]
    fn tiny_magnitudes_stay_representable() {
        let prec = p();
        let z = BigComplex::from_f64(-3077.0, 0.0, prec).unwrap().exp();
        assert!(!z.is_zero());
        assert!((z.log10_abs() + 3077.0 / std::f64::consts::LN_10).abs() < 1e-9);
    }
}
