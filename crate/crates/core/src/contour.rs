//! The phase `phi`, the amplitude, the broken-line contour through the two
//! relevant saddles, and the quadratures along it.

use std::fmt;
use std::str::FromStr;

use rug::ops::Pow;
use rug::Float;
use serde::{Deserialize, Serialize};

use crate::bigcomplex::{pi, BigComplex, Precision};
use crate::error::{Error, Result};
use crate::quadrature::{Integrator, QuadratureResult, GL_POINTS};
use crate::saddle::{check_tau_range, solve_saddles, SaddleSet};

/// `kappa = (1/2 + 2 pi i / tau^2) / 2`, the coefficient of `log(1 - iz)`.
pub fn kappa(tau: &Float, prec: Precision) -> BigComplex {
    let bits = prec.bits();
    let tau = Float::with_val(bits, tau);
    let im = pi(prec) / Float::with_val(bits, tau.square_ref());
    BigComplex::from_parts(&Float::with_val(bits, 0.25), &im)
}

fn check_phi_domain(z: &BigComplex) -> Result<()> {
    if z.is_zero() {
        return Err(Error::domain("phi is singular at z = 0"));
    }
    // 1 - iz is real and <= 0 exactly on -i[1, inf)
    if z.re().is_zero() && *z.im() <= -1 {
        return Err(Error::domain(format!("{z} lies on the cut of log(1 - iz)")));
    }
    Ok(())
}

/// Constants of the phase at a fixed `tau` and precision.
#[derive(Clone, Debug)]
pub struct Phase {
    pub tau: Float,
    pub prec: Precision,
    kappa: BigComplex,
    pi: Float,
    quarter_pi: Float,
    two_pi: Float,
    one: BigComplex,
}

impl Phase {
    pub fn new(tau: &Float, prec: Precision) -> Self {
        let bits = prec.bits();
        let p = pi(prec);
        Phase {
            tau: Float::with_val(bits, tau),
            prec,
            kappa: kappa(tau, prec),
            quarter_pi: Float::with_val(bits, &p / 4u32),
            two_pi: Float::with_val(bits, &p * 2u32),
            pi: p,
            one: BigComplex::one(prec),
        }
    }

    pub fn kappa(&self) -> &BigComplex {
        &self.kappa
    }

    /// `phi(z) = -pi z - pi/(4z) + kappa log(1 - iz)` with the principal logarithm.
    pub fn phi(&self, z: &BigComplex) -> Result<BigComplex> {
        check_phi_domain(z)?;
        let log = (&self.one - &z.mul_i()).ln()?;
        let v = -z.mul_real(&self.pi) - z.recip().mul_real(&self.quarter_pi) + &self.kappa * &log;
        v.check_finite("phi")
    }

    /// `2 pi f(z) e^(phi(z))`, refusing points where `1 - iz` leaves the
    /// right half-plane (the contour must stay where the principal log is
    /// analytic).
    pub fn integrand(&self, z: &BigComplex) -> Result<BigComplex> {
        if *z.im() <= -1 {
            return Err(Error::domain(format!("contour point {z} crosses the branch of log(1 - iz)")));
        }
        Ok((f_amp(z)? * self.phi(z)?.exp()).mul_real(&self.two_pi))
    }
}

/// `phi(z) = -pi z - pi/(4z) + kappa log(1 - iz)` with the principal logarithm.
pub fn phi(z: &BigComplex, tau: &Float) -> Result<BigComplex> {
    Phase::new(tau, z.precision()).phi(z)
}

/// `phi^(n)(z)` for `n >= 1` from the closed form
/// `(-1)^(n+1) n! pi / (4 z^(n+1)) - kappa i^n (n-1)! / (1 - iz)^n`, plus `-pi` when `n = 1`.
pub fn phi_derivative(n: u32, z: &BigComplex, tau: &Float) -> Result<BigComplex> {
    if n == 0 {
        return phi(z, tau);
    }
    check_phi_domain(z)?;
    let prec = z.precision();
    let bits = z.bits();
    let p = pi(prec);
    let fact_n = Float::with_val(bits, Float::factorial(n));
    let fact_n1 = Float::with_val(bits, Float::factorial(n - 1));
    let sign = if n % 2 == 1 { 1i64 } else { -1 };
    let first = z
        .powi(-(n as i32) - 1)
        .mul_real(&Float::with_val(bits, &fact_n * &p))
        .div_int(4)
        .mul_int(sign);
    let i_n = BigComplex::exp_i_pi(n as i64, 2, prec);
    let one_minus_iz = BigComplex::one(prec) - z.mul_i();
    let second = (kappa(tau, prec) * i_n * one_minus_iz.powi(-(n as i32))).mul_real(&fact_n1);
    let mut v = first - second;
    if n == 1 {
        v = v - BigComplex::from_real(&p);
    }
    v.check_finite("phi derivative")
}

/// `f(z) = 1 + z^(-5/2)/4` with `arg z` in `(-pi/2, 3pi/2]`.
pub fn f_amp(z: &BigComplex) -> Result<BigComplex> {
    let log = z.ln_upper()?;
    let pow = log.mul_real(&Float::with_val(z.bits(), -2.5)).exp();
    Ok(BigComplex::one(z.precision()) + pow.div_int(4))
}

/// `2 pi f(z) e^(phi(z))`; see [`Phase::integrand`].
pub fn integrand(z: &BigComplex, tau: &Float) -> Result<BigComplex> {
    Phase::new(tau, z.precision()).integrand(z)
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PathVariant {
    /// `q2+ = q2 + e^(3 pi i/4) tau / 4`, symmetric about `q2`.
    #[default]
    Quarter,
    /// `q2+ = q2 + e^(3 pi i/4) tau / 2`.
    Half,
}

impl fmt::Display for PathVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PathVariant::Quarter => "quarter",
            PathVariant::Half => "half",
        })
    }
}

impl FromStr for PathVariant {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "quarter" => Ok(PathVariant::Quarter),
            "half" => Ok(PathVariant::Half),
            _ => Err(Error::Parse(format!("unknown path variant {s:?}"))),
        }
    }
}

#[derive(Clone, Debug)]
pub struct ContourPath {
    pub tau: Float,
    pub precision: Precision,
    pub variant: PathVariant,
    /// `[0, q2-, q2+, q1-, q1+, q1+ + T]`
    pub nodes: Vec<BigComplex>,
    pub t_len: Float,
    /// Bound on the integral discarded beyond `q1+ + T`.
    pub tail_bound: Float,
    pub saddles: SaddleSet,
}

impl ContourPath {
    pub fn segment(&self, k: usize) -> (&BigComplex, &BigComplex) {
        (&self.nodes[k], &self.nodes[k + 1])
    }
}

/// Upper bound for `Re phi'` on the ray `z0 + x`, `x >= 0`, valid when
/// `Re z0 > 0` and `Im z0 > 0` (then `|z|` and `|1 - iz|` grow with `x`).
fn ray_slope_bound(z: &BigComplex, tau: &Float) -> Float {
    let bits = z.bits();
    let prec = z.precision();
    let p = pi(prec);
    let z_abs = z.abs();
    let w_abs = (BigComplex::one(prec) - z.mul_i()).abs();
    let k_abs = kappa(tau, prec).abs();
    let curv = Float::with_val(bits, &p / (Float::with_val(bits, z_abs.square_ref()) * 4u32));
    -p + curv + k_abs / w_abs
}

/// Chooses the ray length `T` so that the discarded tail of the last segment
/// is below `target`; returns `(T, bound)`.
fn choose_tail(start: &BigComplex, tau: &Float, target: &Float) -> Result<(Float, Float)> {
    let bits = start.bits();
    let prec = start.precision();
    let two_pi = Float::with_val(bits, pi(prec) * 2u32);
    let at = |x: &Float| -> BigComplex { start + &BigComplex::from_real(x) };
    // |integrand| beyond z is at most 2 pi |f| e^(Re phi) / |slope|, and the
    // bound only improves further out
    let tail = |x: &Float| -> Result<Option<Float>> {
        let z = at(x);
        let slope = ray_slope_bound(&z, tau);
        if slope >= 0 {
            return Ok(None);
        }
        let f_bound = Float::with_val(bits, Float::with_val(bits, z.abs().pow(-2.5f64)) / 4u32) + 1u32;
        let re_phi = phi(&z, tau)?.re().clone();
        let mag = Float::with_val(bits, re_phi.exp() * &f_bound) * &two_pi;
        Ok(Some(mag / (-slope)))
    };
    let ok = |x: &Float| -> Result<bool> { Ok(matches!(tail(x)?, Some(b) if b <= *target)) };
    let mut hi = Float::with_val(bits, 1u32);
    let mut guard = 0;
    while !ok(&hi)? {
        hi *= 2u32;
        guard += 1;
        if guard > 200 {
            return Err(Error::Internal("no ray length meets the tail bound".into()));
        }
    }
    let mut lo = Float::with_val(bits, 0u32);
    for _ in 0..60 {
        let mid = Float::with_val(bits, &lo + &hi) / 2u32;
        if ok(&mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let bound = tail(&hi)?.expect("accepted ray length has a bound");
    Ok((hi, bound))
}

pub fn build_path(tau: &Float, prec: Precision, variant: PathVariant) -> Result<ContourPath> {
    check_tau_range(tau)?;
    let saddles = solve_saddles(tau, prec)?;
    let bits = prec.bits();
    let tau_p = Float::with_val(bits, tau);
    let q1 = saddles.q1()?.with_precision(prec);
    let q2 = saddles.q2()?.with_precision(prec);
    let eps = BigComplex::exp_i_pi(1, 4, prec);
    let eps3 = BigComplex::exp_i_pi(3, 4, prec);
    let inv_tau2 = Float::with_val(bits, tau_p.square_ref()).recip();
    let q2_step = eps3.mul_real(&tau_p);
    let q2m = &q2 - &q2_step.div_int(4);
    let q2p = match variant {
        PathVariant::Quarter => &q2 + &q2_step.div_int(4),
        PathVariant::Half => &q2 + &q2_step.div_int(2),
    };
    let q1_step = eps.mul_real(&inv_tau2).div_int(2);
    let q1m = &q1 - &q1_step;
    let q1p = &q1 + &q1_step;
    for (name, z) in [("q2-", &q2m), ("q2+", &q2p), ("q1-", &q1m), ("q1+", &q1p)] {
        if *z.im() <= 0 {
            return Err(Error::domain(format!("path node {name} = {z} is not in the upper half-plane")));
        }
    }

    // scale of J4 from the Gaussian approximation at q1
    let phi1 = phi(&q1, &tau_p)?;
    let phi2 = phi_derivative(2, &q1, &tau_p)?;
    let two_pi = Float::with_val(bits, pi(prec) * 2u32);
    let gauss = Float::with_val(bits, Float::with_val(bits, &two_pi / phi2.abs()).sqrt() * &two_pi);
    let j4_scale = Float::with_val(bits, phi1.re().clone().exp() * gauss);
    let start_scale = integrand(&q1p, &tau_p)?.abs();
    let scale = if start_scale < j4_scale { start_scale } else { j4_scale };
    let ten = Float::with_val(bits, 10u32);
    let target = scale * Float::with_val(bits, Pow::pow(&ten, -((prec.digits() + 5) as i32)));
    let (t_len, tail_bound) = choose_tail(&q1p, &tau_p, &target)?;
    let end = &q1p + &BigComplex::from_real(&t_len);

    Ok(ContourPath {
        tau: tau_p,
        precision: prec,
        variant,
        nodes: vec![BigComplex::zero(prec), q2m, q2p, q1m, q1p, end],
        t_len,
        tail_bound,
        saddles,
    })
}

/// `int_a^b 2 pi f(z) e^(phi(z)) dz` along the straight segment.
pub fn integrate_segment(a: &BigComplex, b: &BigComplex, tau: &Float, prec: Precision) -> Result<QuadratureResult> {
    let q = Integrator::new(prec);
    let phase = Phase::new(tau, prec.with_guard(q.guard_digits));
    q.integrate_segment(|z| phase.integrand(z), a, b)
}

#[derive(Clone, Debug)]
pub struct Components {
    /// `J1..J5`
    pub parts: Vec<QuadratureResult>,
    /// Their sum, `J0` by Cauchy's theorem.
    pub total: QuadratureResult,
    pub path: ContourPath,
}

/// The five segment integrals, run concurrently. `J5` carries the tail
/// bound in its error estimate.
pub fn eval_components(tau: &Float, prec: Precision, variant: PathVariant) -> Result<Components> {
    let path = build_path(tau, prec, variant)?;
    let results: Vec<Result<QuadratureResult>> = std::thread::scope(|s| {
        let handles: Vec<_> = (0..5)
            .map(|k| {
                let path = &path;
                s.spawn(move || {
                    let (a, b) = path.segment(k);
                    integrate_segment(a, b, &path.tau, prec)
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().unwrap_or_else(|_| Err(Error::Internal("segment worker panicked".into()))))
            .collect()
    });
    let mut parts = results.into_iter().collect::<Result<Vec<_>>>()?;
    let bits = prec.bits();
    parts[4].error_estimate = Float::with_val(bits, &parts[4].error_estimate + &path.tail_bound);
    let mut total = QuadratureResult::zero(prec);
    for p in &parts {
        total = total.combine(p);
    }
    Ok(Components { parts, total, path })
}

/// Smallest `tau` accepted by [`eval_j0_realline`].
pub const REALLINE_TAU_MIN: f64 = 0.05;

/// Direct quadrature of the defining integral over `(0, inf)`.
pub fn eval_j0_realline(tau: &Float, prec: Precision) -> Result<QuadratureResult> {
    realline_integral(tau, prec, 0.0, |x: &Float| psi0_weight(x))
}

/// `psi0(x) = 2 pi (1 + x^(-5/2)/4) exp(-pi x - pi/(4x))` at the precision of `x`.
pub fn psi0_weight(x: &Float) -> Float {
    let bits = x.prec();
    let p = Float::with_val(bits, rug::float::Constant::Pi);
    let amp = Float::with_val(bits, Float::with_val(bits, x.pow(-2.5f64)) / 4u32) + 1u32;
    let quarter = Float::with_val(bits, Float::with_val(bits, &p / 4u32) / x);
    let damp = Float::with_val(bits, -Float::with_val(bits, &p * x) - quarter).exp();
    amp * damp * (p * 2u32)
}

/// `int_0^inf w(x) (1 - ix)^kappa dx` for a positive weight `w` that behaves
/// like `psi0` at both ends; `log_slack` bounds `ln(w/psi0)` from above.
///
/// The integrand reaches `exp(pi tau^-2 arctan x - pi x)` in size while the
/// result is of moderate size, so the quadrature runs with that many extra digits.
pub fn realline_integral<W>(tau: &Float, prec: Precision, log_slack: f64, weight: W) -> Result<QuadratureResult>
where
    W: Fn(&Float) -> Float + Sync,
{
    if !tau.is_finite() || *tau <= 0 {
        return Err(Error::domain("tau must be positive"));
    }
    if *tau < REALLINE_TAU_MIN {
        return Err(Error::domain(format!(
            "direct quadrature needs tau >= {REALLINE_TAU_MIN}, got {}",
            tau.to_f64()
        )));
    }
    let t = tau.to_f64();
    let x_peak = (1.0 / (t * t) - 1.0).max(0.0).sqrt();
    let log_peak = (std::f64::consts::PI / (t * t) * x_peak.atan() - std::f64::consts::PI * x_peak).max(0.0)
        / std::f64::consts::LN_10;
    let excess = log_peak.ceil() as u32 + 2;
    let work = prec.with_guard(excess + 10);
    let bits = work.bits();
    let tau_w = Float::with_val(bits, tau);
    let expo = kappa(&tau_w, work);
    let g = |x: &Float| -> Result<BigComplex> {
        let w = BigComplex::from_parts(&Float::with_val(bits, 1u32), &-x.clone());
        let power = (&expo * &w.ln()?).exp();
        Ok(power.mul_real(&weight(x)))
    };
    // beyond x0 the log-derivative of |g| is below -pi/2
    let x0 = (2.0 / (t * t) - 1.0).max(1.0).sqrt();
    let log_g = |x: f64| -> f64 {
        std::f64::consts::PI / (t * t) * x.atan() - std::f64::consts::PI * x
            + 0.125 * (1.0 + x * x).ln()
            + (1.0 + x.powf(-2.5) / 4.0).ln()
            + (2.0 * std::f64::consts::PI).ln()
            + log_slack
    };
    let target = -((prec.digits() + 8) as f64) * std::f64::consts::LN_10;
    let mut x_end = x0.max(1.0);
    while log_g(x_end) + (2.0 / std::f64::consts::PI).ln() > target {
        x_end += 1.0;
    }
    let tail = Float::with_val(bits, (log_g(x_end) + (2.0 / std::f64::consts::PI).ln()).exp());
    let q = Integrator::new(work)
        .with_tolerance(prec.digits() + excess)
        .with_points(((prec.digits() + excess) as usize / 2).max(GL_POINTS))
        .with_initial_panels((x_end.ceil() as usize).max(16));
    let r = q.integrate(g, &Float::with_val(bits, 0u32), &Float::with_val(bits, x_end))?;
    Ok(QuadratureResult::rounded(&r.value, r.error_estimate + tail, r.evaluations, prec))
}
