//! Adaptive Gauss–Legendre quadrature at arbitrary precision.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use rug::float::Constant;
use rug::ops::Pow;
use rug::Float;
use serde::{Deserialize, Serialize};

use crate::bigcomplex::{real_to_string, BigComplex, Precision};
use crate::error::{Error, Result};

pub const GL_POINTS: usize = 40;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadratureResult {
    pub value: BigComplex,
    #[serde(with = "float_string")]
    pub error_estimate: Float,
    pub evaluations: u64,
}

impl QuadratureResult {
    pub fn zero(prec: Precision) -> Self {
        QuadratureResult {
            value: BigComplex::zero(prec),
            error_estimate: Float::new(prec.bits()),
            evaluations: 0,
        }
    }

    pub fn neg(&self) -> Self {
        QuadratureResult {
            value: -&self.value,
            error_estimate: self.error_estimate.clone(),
            evaluations: self.evaluations,
        }
    }

    /// Sum of two results; error estimates add.
    pub fn combine(&self, other: &Self) -> Self {
        QuadratureResult {
            value: &self.value + &other.value,
            error_estimate: Float::with_val(
                self.error_estimate.prec().max(other.error_estimate.prec()),
                &self.error_estimate + &other.error_estimate,
            ),
            evaluations: self.evaluations + other.evaluations,
        }
    }

    /// `value` rounded to `prec`, with the rounding added to the error.
    pub fn rounded(value: &BigComplex, error: Float, evaluations: u64, prec: Precision) -> Self {
        let value = value.with_precision(prec);
        let ulp = Float::with_val(prec.bits(), 1u32) >> (prec.bits() as i32 - 1);
        let error = Float::with_val(prec.bits(), value.abs() * ulp + error);
        QuadratureResult {
            value,
            error_estimate: error,
            evaluations,
        }
    }

    pub fn error_log10(&self) -> f64 {
        if self.error_estimate.is_zero() {
            return f64::NEG_INFINITY;
        }
        let mut l = self.error_estimate.clone();
        l.log10_mut();
        l.to_f64()
    }
}

pub(crate) mod float_string {
    use rug::Float;
    use serde::{Deserialize, Deserializer, Serializer};

    use crate::bigcomplex::{parse_real, precision_for_decimal, real_to_string};

    pub fn serialize<S: Serializer>(x: &Float, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&real_to_string(x))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Float, D::Error> {
        let s = String::deserialize(d)?;
        let prec = precision_for_decimal(&[&s]);
        parse_real(&s, prec).map_err(serde::de::Error::custom)
    }
}

struct Rule {
    nodes: Vec<Float>,
    weights: Vec<Float>,
}

fn rule(points: usize, bits: u32) -> Arc<Rule> {
    static CACHE: OnceLock<Mutex<HashMap<(usize, u32), Arc<Rule>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(r) = cache.lock().expect("rule cache poisoned").get(&(points, bits)) {
        return r.clone();
    }
    let r = Arc::new(legendre_rule(points, bits));
    cache
        .lock()
        .expect("rule cache poisoned")
        .entry((points, bits))
        .or_insert(r)
        .clone()
}

/// `(P_n(x), P_n'(x))` by the three-term recurrence.
fn legendre(n: usize, x: &Float, bits: u32) -> (Float, Float) {
    let mut p0 = Float::with_val(bits, 1);
    let mut p1 = x.clone();
    for k in 2..=n {
        let kf = k as u32;
        let p2 = (Float::with_val(bits, x * &p1) * (2 * kf - 1) - Float::with_val(bits, &p0 * (kf - 1))) / kf;
        p0 = p1;
        p1 = p2;
    }
    // P_n' = n (x P_n - P_{n-1}) / (x^2 - 1)
    let num = (Float::with_val(bits, x * &p1) - &p0) * n as u32;
    let den = Float::with_val(bits, x * x) - 1u32;
    let dp = num / den;
    (p1, dp)
}

fn legendre_rule(n: usize, bits: u32) -> Rule {
    let work = bits + 32;
    let pi = Float::with_val(work, Constant::Pi);
    let mut nodes = Vec::with_capacity(n);
    let mut weights = Vec::with_capacity(n);
    for i in 1..=n {
        let seed = Float::with_val(work, &pi * (i as f64 - 0.25)) / (n as f64 + 0.5);
        let mut x = seed.cos();
        for _ in 0..100 {
            let (p, dp) = legendre(n, &x, work);
            let dx = p / &dp;
            x -= &dx;
            if dx.is_zero() || dx.get_exp().unwrap_or(i32::MIN) < -(bits as i32) - 16 {
                break;
            }
        }
        let (_, dp) = legendre(n, &x, work);
        let one_minus = Float::with_val(work, 1u32) - Float::with_val(work, &x * &x);
        let w = Float::with_val(work, 2u32) / (one_minus * dp.square());
        nodes.push(Float::with_val(bits, &x));
        weights.push(Float::with_val(bits, &w));
    }
    Rule { nodes, weights }
}

/// Configuration for the adaptive integrator.
#[derive(Clone, Debug)]
pub struct Integrator {
    pub prec: Precision,
    /// Gauss–Legendre points per panel.
    pub points: usize,
    /// Target relative accuracy in decimal digits, measured against the L1
    /// norm of the integrand.
    pub tol_digits: u32,
    pub initial_panels: usize,
    pub max_depth: u32,
    pub max_panels: usize,
    /// Extra digits carried internally so the tolerance sits above the
    /// rounding floor.
    pub guard_digits: u32,
}

impl Integrator {
    pub fn new(prec: Precision) -> Self {
        Integrator {
            prec,
            points: GL_POINTS,
            tol_digits: prec.digits(),
            initial_panels: 16,
            max_depth: 30,
            max_panels: 40_000,
            guard_digits: 10,
        }
    }

    pub fn with_tolerance(mut self, digits: u32) -> Self {
        self.tol_digits = digits;
        self
    }

    pub fn with_points(mut self, points: usize) -> Self {
        self.points = points.max(2);
        self
    }

    pub fn with_initial_panels(mut self, panels: usize) -> Self {
        self.initial_panels = panels.max(1);
        self
    }

    /// Integrates a complex-valued `f` over the real interval `[lo, hi]`.
    pub fn integrate<F>(&self, f: F, lo: &Float, hi: &Float) -> Result<QuadratureResult>
    where
        F: Fn(&Float) -> Result<BigComplex>,
    {
        let work = self.prec.with_guard(self.guard_digits);
        let bits = work.bits();
        if lo == hi {
            return Ok(QuadratureResult::zero(self.prec));
        }
        let rule = rule(self.points, bits);
        let mut evals: u64 = 0;
        let mut eval_panel = |a: &Float, b: &Float| -> Result<(BigComplex, Float)> {
            let half = Float::with_val(bits, b - a) / 2u32;
            let mid = Float::with_val(bits, a + b) / 2u32;
            let mut acc = BigComplex::zero(work);
            let mut l1 = Float::new(bits);
            for (x, w) in rule.nodes.iter().zip(&rule.weights) {
                let point = Float::with_val(bits, &mid + Float::with_val(bits, x * &half));
                let v = f(&point)?;
                evals += 1;
                l1 += Float::with_val(bits, v.abs() * w);
                acc = acc + v.mul_real(w);
            }
            let hs = Float::with_val(bits, half.abs_ref());
            Ok((acc.mul_real(&half), l1 * hs))
        };

        struct Panel {
            a: Float,
            b: Float,
            depth: u32,
            // 40-point values on the two halves and their L1 norms
            left: (BigComplex, Float),
            right: (BigComplex, Float),
            err: Float,
        }

        let make = |a: Float,
                    b: Float,
                    depth: u32,
                    whole: BigComplex,
                    eval: &mut dyn FnMut(&Float, &Float) -> Result<(BigComplex, Float)>|
         -> Result<Panel> {
            let mid = Float::with_val(bits, &a + &b) / 2u32;
            let left = eval(&a, &mid)?;
            let right = eval(&mid, &b)?;
            let err = (&whole - &left.0 - &right.0).abs();
            Ok(Panel {
                a,
                b,
                depth,
                left,
                right,
                err,
            })
        };

        let n0 = self.initial_panels;
        let width = Float::with_val(bits, hi - lo) / n0 as u32;
        let mut panels = Vec::with_capacity(n0);
        for k in 0..n0 {
            let a = Float::with_val(bits, lo + Float::with_val(bits, &width * k as u32));
            let b = if k + 1 == n0 {
                hi.clone()
            } else {
                Float::with_val(bits, lo + Float::with_val(bits, &width * (k + 1) as u32))
            };
            let whole = eval_panel(&a, &b)?.0;
            panels.push(make(a, b, 0, whole, &mut eval_panel)?);
        }

        let ten = Float::with_val(bits, 10u32);
        let rel_tol = Float::with_val(bits, (&ten).pow(-(self.tol_digits as i32)));
        loop {
            let mut total_err = Float::new(bits);
            let mut l1 = Float::new(bits);
            let mut worst = 0usize;
            for (k, p) in panels.iter().enumerate() {
                total_err += &p.err;
                l1 += &p.left.1;
                l1 += &p.right.1;
                if p.err > panels[worst].err {
                    worst = k;
                }
            }
            let target = Float::with_val(bits, &l1 * &rel_tol);
            let done = total_err <= target;
            let exhausted = panels[worst].depth >= self.max_depth || panels.len() >= self.max_panels;
            if done || exhausted {
                let mut value = BigComplex::zero(work);
                for p in &panels {
                    value = value + &p.left.0 + &p.right.0;
                }
                // rounding floor of the working precision
                let floor = Float::with_val(bits, &l1 * Float::with_val(bits, (&ten).pow(-(work.digits() as i32))));
                let value = value.check_finite("quadrature sum")?;
                let result = QuadratureResult::rounded(&value, total_err + floor, evals, self.prec);
                if done {
                    return Ok(result);
                }
                return Err(Error::Accuracy {
                    message: format!(
                        "quadrature stalled at {} panels (depth {}), error {:.3e}",
                        panels.len(),
                        panels[worst].depth,
                        result.error_estimate.to_f64()
                    ),
                    best: Some(Box::new(result)),
                });
            }
            let p = panels.swap_remove(worst);
            let mid = Float::with_val(bits, &p.a + &p.b) / 2u32;
            let l = make(p.a, mid.clone(), p.depth + 1, p.left.0, &mut eval_panel)?;
            let r = make(mid, p.b, p.depth + 1, p.right.0, &mut eval_panel)?;
            panels.push(l);
            panels.push(r);
        }
    }

    /// `∫_a^b g(z) dz` along the straight segment from `a` to `b`.
    pub fn integrate_segment<G>(&self, g: G, a: &BigComplex, b: &BigComplex) -> Result<QuadratureResult>
    where
        G: Fn(&BigComplex) -> Result<BigComplex>,
    {
        if a == b {
            return Ok(QuadratureResult::zero(self.prec));
        }
        let work = self.prec.with_guard(self.guard_digits);
        let bits = work.bits();
        let a = a.with_precision(work);
        let dz = &b.with_precision(work) - &a;
        let f = |s: &Float| -> Result<BigComplex> {
            let z = &a + &dz.mul_real(s);
            g(&z)
        };
        let r = self.integrate(f, &Float::with_val(bits, 0), &Float::with_val(bits, 1))?;
        let scale = dz.abs();
        Ok(QuadratureResult::rounded(&(&r.value * &dz), r.error_estimate * scale, r.evaluations, self.prec))
    }
}

impl std::fmt::Display for QuadratureResult {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "{} (err {}, {} evals)",
            self.value,
            real_to_string(&Float::with_val(24, &self.error_estimate)),
            self.evaluations
        )
    }
}
