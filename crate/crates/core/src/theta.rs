//! The theta-derived weight `psi`, its simple stand-in `psi0`, the reference
//! integral `J(t)` with the true weight, and the leading form of `Z0`.

use rug::ops::Pow;
use rug::Float;
use serde::{Deserialize, Serialize};

use crate::bigcomplex::{pi, BigComplex, Precision};
use crate::contour::{psi0_weight, realline_integral};
use crate::error::{Error, Result};
use crate::quadrature::{float_string, QuadratureResult};

/// Largest `t` accepted by [`eval_j_reference`].
pub const REFERENCE_T_MAX: f64 = 2000.0;

/// `psi(x)` summed both ways.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PsiEval {
    #[serde(with = "float_string")]
    pub x: Float,
    /// `-2 pi sum (-1)^n n^2 exp(-pi n^2 x)`
    pub value_theta: BigComplex,
    /// `(1/(2 x^(5/2))) sum ((2n+1)^2 pi - 2x) exp(-pi (2n+1)^2 / (4x))`
    pub value_dual: BigComplex,
    pub terms_used: (usize, usize),
}

impl PsiEval {
    /// Whether the two sums agree to `digits - 5` digits.
    pub fn consistent(&self, prec: Precision) -> bool {
        let diff = self.value_theta.dist(&self.value_dual);
        let scale = self.value_theta.abs().to_f64().max(1.0);
        diff.to_f64() < 10f64.powi(-(prec.digits() as i32 - 5)) * scale
    }
}

fn check_positive(x: &Float) -> Result<()> {
    if !x.is_finite() || *x <= 0 {
        return Err(Error::domain(format!("x must be positive, got {}", x.to_f64())));
    }
    Ok(())
}

fn theta_sum(x: &Float, bits: u32, cutoff: &Float) -> (Float, usize) {
    let p = Float::with_val(bits, rug::float::Constant::Pi);
    let mut sum = Float::with_val(bits, 0u32);
    let mut n = 1u64;
    loop {
        let n2 = Float::with_val(bits, n * n);
        let e = Float::with_val(bits, -Float::with_val(bits, &p * &n2) * x).exp();
        let term = Float::with_val(bits, &e * &n2);
        if term < *cutoff {
            break;
        }
        if n % 2 == 1 {
            sum += &term;
        } else {
            sum -= &term;
        }
        n += 1;
    }
    (sum * Float::with_val(bits, &p * 2u32), (n - 1) as usize)
}

fn dual_sum(x: &Float, bits: u32, cutoff: &Float) -> (Float, usize) {
    let p = Float::with_val(bits, rug::float::Constant::Pi);
    let pref = Float::with_val(bits, x.clone().pow(-2.5f64)) / 2u32;
    let two_x = Float::with_val(bits, x * 2u32);
    let mut sum = Float::with_val(bits, 0u32);
    let mut n = 0u64;
    loop {
        let m2 = Float::with_val(bits, (2 * n + 1) * (2 * n + 1));
        let pm2 = Float::with_val(bits, &p * &m2);
        let e = Float::with_val(bits, -Float::with_val(bits, &pm2 / 4u32) / x).exp();
        let term = Float::with_val(bits, &pm2 - &two_x) * e * &pref;
        // terms are eventually positive and decreasing; the first may be small when x is large
        if n > 0 && term.clone().abs() < *cutoff {
            break;
        }
        sum += &term;
        n += 1;
    }
    (sum, n as usize)
}

/// `psi(x)` evaluated independently from both series.
pub fn psi(x: &Float, prec: Precision) -> Result<PsiEval> {
    check_positive(x)?;
    let work = prec.with_guard(10);
    let bits = work.bits();
    let xw = Float::with_val(bits, x);
    let cutoff = Float::with_val(bits, 10u32).pow(-((prec.digits() + 10) as i32));
    let (theta, nt) = theta_sum(&xw, bits, &cutoff);
    let (dual, nd) = dual_sum(&xw, bits, &cutoff);
    Ok(PsiEval {
        x: x.clone(),
        value_theta: BigComplex::from_real(&theta).with_precision(prec),
        value_dual: BigComplex::from_real(&dual).with_precision(prec),
        terms_used: (nt, nd),
    })
}

/// `psi(x)` at the precision of `x`, using whichever series converges faster.
pub fn psi_value(x: &Float) -> Float {
    let bits = x.prec();
    let cutoff = Float::with_val(bits, 2u32).pow(-(bits as i32) - 16);
    if *x >= 1 {
        theta_sum(x, bits, &cutoff).0
    } else {
        dual_sum(x, bits, &cutoff).0
    }
}

/// `2 pi (1 + x^(-5/2)/4) exp(-pi x - pi/(4x))`.
pub fn psi0(x: &Float, prec: Precision) -> Result<BigComplex> {
    check_positive(x)?;
    let xw = Float::with_val(prec.with_guard(5).bits(), x);
    Ok(BigComplex::from_real(&psi0_weight(&xw)).with_precision(prec))
}

/// Modulus `g(x,t)` and phase `f(x,t)` of the integrand of `J(t)`.
pub fn gf_weights(x: &Float, t: &Float, prec: Precision) -> Result<(Float, Float)> {
    check_positive(x)?;
    let bits = prec.with_guard(10).bits();
    let x = Float::with_val(bits, x);
    let t = Float::with_val(bits, t);
    let atan = Float::with_val(bits, x.atan_ref());
    let one_x2 = Float::with_val(bits, x.square_ref()) + 1u32;
    let g = Float::with_val(bits, one_x2.clone().pow(0.125f64))
        * Float::with_val(bits, Float::with_val(bits, &t * &atan) / 2u32).exp()
        * psi_value(&x);
    let fphase = Float::with_val(bits, &t * one_x2.ln()) / 4u32 - atan / 4u32;
    Ok((
        Float::with_val(prec.bits(), g),
        Float::with_val(prec.bits(), fphase),
    ))
}

/// Which weight multiplies `(1 - ix)^kappa` in the real-line integral.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Weight {
    /// The theta-derived `psi`.
    Psi,
    /// The stand-in `psi0`, giving `J0`.
    Psi0,
}

/// `J(t) = int_0^inf g(x,t) exp(i f(x,t)) dx` by direct quadrature.
pub fn eval_j_reference(t: &Float, prec: Precision) -> Result<QuadratureResult> {
    eval_j_weighted(t, prec, Weight::Psi)
}

/// The real-line integral at `t` with either weight.
pub fn eval_j_weighted(t: &Float, prec: Precision, weight: Weight) -> Result<QuadratureResult> {
    if !t.is_finite() || *t <= 0 {
        return Err(Error::domain("t must be positive"));
    }
    if t.to_f64() > REFERENCE_T_MAX {
        return Err(Error::domain(format!(
            "direct quadrature is limited to t <= {REFERENCE_T_MAX}"
        )));
    }
    let bits = prec.with_guard(10).bits();
    let tau = Float::with_val(bits, Float::with_val(bits, pi(prec.with_guard(10)) * 2u32) / t).sqrt();
    match weight {
        // psi/psi0 stays below 5/4 on (0, inf)
        Weight::Psi => realline_integral(&tau, prec, 0.25, psi_value),
        Weight::Psi0 => realline_integral(&tau, prec, 0.0, psi0_weight),
    }
}

fn z0_phase(t: f64) -> f64 {
    let tp = t / (2.0 * std::f64::consts::PI);
    t / 2.0 * tp.ln() - t / 2.0 - std::f64::consts::PI / 8.0
}

/// `Re{(2/sqrt pi) e^{i theta(t)} + 2 (2 pi t)^(-1/4) e^{pi i sqrt(t/2pi)}}`.
pub fn z0_leading(t: f64) -> Result<f64> {
    if !t.is_finite() || t <= 2.0 * std::f64::consts::PI {
        return Err(Error::domain(format!("z0 needs t > 2 pi, got {t}")));
    }
    let first = 2.0 / std::f64::consts::PI.sqrt() * z0_phase(t).cos();
    let second = 2.0 / (2.0 * std::f64::consts::PI * t).powf(0.25)
        * (std::f64::consts::PI * (t / (2.0 * std::f64::consts::PI)).sqrt()).cos();
    Ok(first + second)
}

/// `(t, z0_leading(t))` on `n` equally spaced points of `[a, b]`.
pub fn z0_grid(a: f64, b: f64, n: usize) -> Result<Vec<(f64, f64)>> {
    if n < 2 || b <= a {
        return Err(Error::domain("grid needs n >= 2 and a < b"));
    }
    (0..n)
        .map(|k| {
            let t = a + (b - a) * k as f64 / (n - 1) as f64;
            z0_leading(t).map(|z| (t, z))
        })
        .collect()
}

/// Sign changes of `z0_leading` seen on a grid of `samples` points.
pub fn z0_sign_changes(a: f64, b: f64, samples: usize) -> Result<usize> {
    let grid = z0_grid(a, b, samples)?;
    Ok(grid
        .windows(2)
        .filter(|w| (w[0].1 < 0.0) != (w[1].1 < 0.0))
        .count())
}

/// Zero count predicted by the phase of the dominant term: one zero per `pi`.
pub fn z0_phase_count(a: f64, b: f64) -> Result<f64> {
    z0_leading(a)?;
    z0_leading(b)?;
    Ok((z0_phase(b) - z0_phase(a)) / std::f64::consts::PI)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p() -> Precision {
        Precision::new(40).unwrap()
    }

    fn f(x: f64) -> Float {
        Float::with_val(p().bits(), x)
    }

    #[test]
    fn two_series_agree() {
        for x in [0.02, 0.3, 1.0, 2.5, 5.0] {
            let e = psi(&f(x), p()).unwrap();
            assert!(e.consistent(p()), "x = {x}");
            let v = psi_value(&Float::with_val(p().bits(), x));
            assert!((v - e.value_theta.re()).abs() < 1e-35);
        }
    }

    #[test]
    fn psi_domain() {
        assert!(psi(&f(0.0), p()).is_err());
        assert!(psi0(&f(-1.0), p()).is_err());
        assert!(z0_leading(6.0).is_err());
    }

    #[test]
    fn phase_at_one() {
        let (g, ph) = gf_weights(&f(1.0), &f(10.0), p()).unwrap();
        let want = 2.5 * 2f64.ln() - std::f64::consts::PI / 16.0;
        assert!((ph.to_f64() - want).abs() < 1e-14);
        assert!(g > 0);
    }
}
