//! Local expansions at the saddles `q1` and `q2`: the coefficient series
//! `A_n`, `B_n`, `E`, `F`, and the asymptotic formulas for `J4` and `J2`.
//!
//! At `q1` the Gaussian weight is `exp(-(pi A2/2) x^2 / tau^2)`, so the
//! expansion parameter is `tau^2`; at `q2` it is `exp(-2 pi A2 x^2 / tau)`
//! and the parameter is `tau`. Both go through [`crate::perron`].

use std::fmt;
use std::str::FromStr;

use rug::Float;
use serde::{Deserialize, Serialize};

use crate::bigcomplex::{pi, BigComplex, Precision};
use crate::contour::{phi, phi_derivative};
use crate::error::{Error, Result};
use crate::perron::{cnk_table, perron_terms, verify_condition_c, AsymptoticResult, Coefficient, ConditionReport, Evaluation};
use crate::saddle::{check_tau_range, normalized_saddle_series, solve_saddles, Which};
use crate::series::{HalfExp, PuiseuxSeries};

fn main_saddle(which: Which) -> Result<()> {
    match which {
        Which::Q1 | Which::Q2 => Ok(()),
        Which::Q3 => Err(Error::domain("local expansions exist for q1 and q2 only")),
    }
}

/// `binom(-5/2, n)`.
pub fn binom_m52(n: usize, prec: Precision) -> BigComplex {
    let mut acc = BigComplex::one(prec);
    for j in 0..n as i64 {
        acc = acc.mul_int(-5 - 2 * j).div_int(2 * (j + 1));
    }
    acc
}

fn trunc_of(order: usize) -> HalfExp {
    HalfExp::from_halves(order as i32)
}

fn monomial(c: BigComplex, e: HalfExp, order: usize) -> PuiseuxSeries {
    PuiseuxSeries::monomial(c, e, trunc_of(order))
}

/// `1 + tau^2/(4 pi i)`.
fn kappa_factor(order: usize, prec: Precision) -> PuiseuxSeries {
    let one = PuiseuxSeries::one(trunc_of(order), prec);
    let c = BigComplex::from_parts(&Float::new(prec.bits()), &-(pi(prec) * 4u32).recip());
    &one + &monomial(c, HalfExp::int(2), order)
}

/// `A_n(tau)` as a series with `order` half-steps.
///
/// At `q1`: `(Q1 + tau^2)^-n (1 + tau^2/(4 pi i)) - n tau^4 / (4 Q1^(n+1))`.
/// At `q2`: `Q2^-(n+1) - (1 + tau^2/(4 pi i)) tau^(n-1) / (n 2^(n-1) (1 + tau Q2/2)^n)`.
pub fn an_series(which: Which, n: usize, order: usize, prec: Precision) -> Result<PuiseuxSeries> {
    main_saddle(which)?;
    if n < 2 {
        return Err(Error::domain("A_n is defined for n >= 2"));
    }
    let q = normalized_saddle_series(which, order, prec)?;
    let ni = n as i64;
    let kf = kappa_factor(order, prec);
    match which {
        Which::Q1 => {
            let shifted = &q + &monomial(BigComplex::one(prec), HalfExp::int(2), order);
            let first = shifted.pow(-ni, 1)?.mul_series(&kf);
            let second = q
                .pow(-(ni + 1), 1)?
                .scale(&BigComplex::from_ratio(ni, 4, prec))
                .shift(HalfExp::int(4));
            Ok(&first - &second)
        }
        _ => {
            let first = q.pow(-(ni + 1), 1)?;
            let one = PuiseuxSeries::one(trunc_of(order), prec);
            let inner = &one + &q.scale(&BigComplex::from_ratio(1, 2, prec)).shift(HalfExp::int(1));
            let den = BigComplex::from_int(ni << (n - 1), prec);
            let second = inner
                .pow(-ni, 1)?
                .mul_series(&kf)
                .scale(&den.recip())
                .shift(HalfExp::int(n as i32 - 1));
            Ok(&first - &second)
        }
    }
}

/// `B_n(tau)`: `Q^(-5/2-n)`, and at `q2` the constant `B_0` also carries
/// `4 (i tau/2)^(5/2)`.
pub fn bn_series(which: Which, n: usize, order: usize, prec: Precision) -> Result<PuiseuxSeries> {
    main_saddle(which)?;
    let q = normalized_saddle_series(which, order, prec)?;
    let b = q.pow(-(5 + 2 * n as i64), 2)?;
    if which == Which::Q2 && n == 0 {
        // 4 (i/2)^(5/2) = 2^(-1/2) e^(5 pi i/4)
        let half = Float::with_val(prec.bits(), 0.5f64).sqrt();
        let c = BigComplex::exp_i_pi(5, 4, prec).mul_real(&half);
        return Ok(&b + &monomial(c, HalfExp::from_halves(5), order));
    }
    Ok(b)
}

/// The series `E(tau)` with `E(0) = 1` that remains of `e^(phi(q, tau))` once
/// the logarithmic terms and the non-positive powers are taken out.
pub fn e_series(which: Which, order: usize, prec: Precision) -> Result<PuiseuxSeries> {
    main_saddle(which)?;
    let i_pi = BigComplex::from_parts(&Float::new(prec.bits()), &pi(prec));
    let one = PuiseuxSeries::one(trunc_of(order + 4), prec);
    let (s, expected) = match which {
        Which::Q1 => {
            // q1 = i tau^-2 Q1; 1 - i q1 = tau^-2 (Q1 + tau^2)
            let q = normalized_saddle_series(which, order + 4, prec)?;
            let l = (&q + &monomial(BigComplex::one(prec), HalfExp::int(2), order + 4)).ln()?;
            let a = q.scale(&-&i_pi).shift(HalfExp::int(-2));
            let b = q.recip()?.scale(&i_pi.div_int(4)).shift(HalfExp::int(2));
            let c = l.scale(&BigComplex::from_ratio(1, 4, prec));
            let d = l.scale(&i_pi).shift(HalfExp::int(-2));
            let s = &(&(&a + &b) + &c) + &d;
            (s, vec![(HalfExp::int(-2), -&i_pi), (HalfExp::ZERO, i_pi.clone())])
        }
        _ => {
            // q2 = (i tau/2) Q2; 1 - i q2 = 1 + tau Q2/2
            let q = normalized_saddle_series(which, order + 2, prec)?;
            let half = BigComplex::from_ratio(1, 2, prec);
            let l = (&one + &q.scale(&half).shift(HalfExp::int(1))).ln()?;
            let a = q.scale(&-&i_pi.div_int(2)).shift(HalfExp::int(1));
            let b = q.recip()?.scale(&i_pi.div_int(2)).shift(HalfExp::int(-1));
            let c = l.scale(&BigComplex::from_ratio(1, 4, prec));
            let d = l.scale(&i_pi).shift(HalfExp::int(-2));
            let s = &(&(&a + &b) + &c) + &d;
            (s, vec![(HalfExp::int(-1), i_pi.clone()), (HalfExp::ZERO, -&i_pi.div_int(8))])
        }
    };
    let (head, tail) = s.split_at(HalfExp::ZERO);
    let tol = Float::with_val(prec.bits(), Float::i_exp(1, -(prec.bits() as i32) + 40));
    for (e, c) in &head {
        let want = expected
            .iter()
            .find(|(x, _)| x == e)
            .map(|(_, v)| v.clone())
            .unwrap_or_else(|| BigComplex::zero(prec));
        if c.dist(&want) > tol {
            return Err(Error::Internal(format!("unexpected tau^{e} term {c} in phi at the saddle")));
        }
    }
    Ok(tail.exp()?.truncate(trunc_of(order)))
}

/// `F(tau)` expanded as a series: the first `terms` Perron terms with the
/// `A_n`, `B_n` series substituted, normalized so that `F(0) = 1`.
pub fn f_series(which: Which, terms: usize, order: usize, prec: Precision) -> Result<PuiseuxSeries> {
    main_saddle(which)?;
    if terms == 0 {
        return Err(Error::domain("F needs at least one term"));
    }
    let n_table = 2 * (terms - 1);
    let a_list: Vec<PuiseuxSeries> = (3..=n_table + 2)
        .map(|n| Ok(an_series(which, n, order, prec)?.scale(&a_weight(which, n, prec))))
        .collect::<Result<_>>()?;
    let a2 = an_series(which, 2, order, prec)?.scale(&a2_weight(which, prec));
    let b_list: Vec<PuiseuxSeries> = match which {
        Which::Q1 => vec![PuiseuxSeries::one(trunc_of(order), prec)],
        _ => (0..=n_table)
            .map(|n| Ok(bn_series(which, n, order, prec)?.scale(&b_weight(n, prec))))
            .collect::<Result<_>>()?,
    };
    let table = cnk_table(&b_list, &a_list, n_table)?;
    let t = perron_terms(&table, &a2, terms)?;
    let step = if which == Which::Q1 { 2 } else { 1 };
    let mut f = PuiseuxSeries::zero(HalfExp::ZERO, trunc_of(order), prec);
    for (n, tn) in t.iter().enumerate() {
        f = &f + &tn.div(&t[0])?.shift(HalfExp::int(step * n as i32));
    }
    Ok(f)
}

/// Factor turning `A_n` into the Perron coefficient `a_n`.
fn a_weight(which: Which, n: usize, prec: Precision) -> BigComplex {
    let i_pi = BigComplex::from_parts(&Float::new(prec.bits()), &pi(prec));
    match which {
        // pi i eps^(3n) / n
        Which::Q1 => (i_pi * BigComplex::exp_i_pi(3 * n as i64, 4, prec)).div_int(n as i64),
        // -(pi i/2) 2^n eps^(-3n)
        _ => (-i_pi.div_int(2)).mul_int(1 << n) * BigComplex::exp_i_pi(-3 * n as i64, 4, prec),
    }
}

fn a2_weight(which: Which, prec: Precision) -> BigComplex {
    match which {
        Which::Q1 => BigComplex::from_real(&(pi(prec) / 2u32)),
        _ => BigComplex::from_real(&(pi(prec) * 2u32)),
    }
}

/// `binom(-5/2, n) (2 eps)^n` for the amplitude at `q2`.
fn b_weight(n: usize, prec: Precision) -> BigComplex {
    binom_m52(n, prec).mul_int(1 << n) * BigComplex::exp_i_pi(n as i64, 4, prec)
}

/// Values at one `tau` of everything the local expansion needs.
#[derive(Clone, Debug)]
pub struct SaddleCoefficients {
    pub which: Which,
    pub tau: Float,
    pub q: BigComplex,
    /// `a[n] = A_n` for `n >= 2`; entries 0 and 1 are zero.
    pub a: Vec<BigComplex>,
    /// `b[n] = B_n`.
    pub b: Vec<BigComplex>,
    /// `E(tau)` computed from the exact `e^(phi(q))`.
    pub e: BigComplex,
}

/// Exact `A_n`, `B_n` (`n <= n_max`) and `E` at the numerically located saddle.
pub fn saddle_coefficients(which: Which, tau: &Float, n_max: usize, prec: Precision) -> Result<SaddleCoefficients> {
    main_saddle(which)?;
    check_tau_range(tau)?;
    let set = solve_saddles(tau, prec)?;
    let q = set.get(which)?.with_precision(prec);
    let bits = prec.bits();
    let tau = Float::with_val(bits, tau);
    let p = pi(prec);
    let i = BigComplex::i(prec);
    let mut a = vec![BigComplex::zero(prec); n_max + 1];
    let mut b = Vec::with_capacity(n_max + 1);
    let tau2 = Float::with_val(bits, tau.square_ref());
    match which {
        Which::Q1 => {
            // A_n = phi^(n)(q1) / (pi (i tau^2)^(n-1) (n-1)!)
            let it2 = i.mul_real(&tau2);
            for (n, slot) in a.iter_mut().enumerate().skip(2) {
                let d = phi_derivative(n as u32, &q, &tau)?;
                let fact = Float::with_val(bits, Float::factorial(n as u32 - 1));
                let den = it2.powi(n as i32 - 1).mul_real(&Float::with_val(bits, &fact * &p));
                *slot = d / den;
            }
            // B_n = Q1^(-5/2-n), Q1 = q1 / (i tau^-2)
            let lq = (q.mul_real(&tau2) / &i).ln()?;
            for n in 0..=n_max {
                let e = Float::with_val(bits, -2.5 - n as f64);
                b.push(lq.mul_real(&e).exp());
            }
        }
        _ => {
            // A_n = 4 phi^(n)(q2) / (pi 2^(n+1) (i/tau)^(n+1) n!)
            let i_over_tau = i.div_real(&tau);
            for (n, slot) in a.iter_mut().enumerate().skip(2) {
                let d = phi_derivative(n as u32, &q, &tau)?;
                let fact = Float::with_val(bits, Float::factorial(n as u32));
                let den = i_over_tau
                    .powi(n as i32 + 1)
                    .mul_real(&Float::with_val(bits, &fact * &p))
                    .mul_int(1 << (n + 1));
                *slot = d.mul_int(4) / den;
            }
            // B_n = q2^(-5/2-n) / (i tau/2)^(-5/2-n), both on the upper branch
            let base = i.mul_real(&tau).div_int(2);
            let lq = q.ln_upper()? - base.ln_upper()?;
            for n in 0..=n_max {
                let e = Float::with_val(bits, -2.5 - n as f64);
                b.push(lq.mul_real(&e).exp());
            }
            let extra = base.ln_upper()?.mul_real(&Float::with_val(bits, 2.5)).exp().mul_int(4);
            b[0] = &b[0] + &extra;
        }
    }
    let e = exact_e(which, &q, &tau, prec)?;
    Ok(SaddleCoefficients { which, tau, q, a, b, e })
}

/// `theta1 = (-2 pi log tau - pi) / tau^2`, the fast phase at `q1`.
fn q1_phase(tau: &Float, prec: Precision) -> Float {
    let bits = prec.bits();
    let p = pi(prec);
    let l = Float::with_val(bits, tau.ln_ref());
    let num = Float::with_val(bits, -(Float::with_val(bits, &p * 2u32) * l) - &p);
    num / Float::with_val(bits, tau.square_ref())
}

fn exact_e(which: Which, q: &BigComplex, tau: &Float, prec: Precision) -> Result<BigComplex> {
    let bits = prec.bits();
    let ephi = phi(q, tau)?.exp();
    Ok(match which {
        Which::Q1 => {
            // e^phi = -tau^(-1/2) e^(i theta1) E
            let s = Float::with_val(bits, tau.sqrt_ref());
            -(ephi.mul_real(&s) * BigComplex::cis(&-q1_phase(tau, prec)))
        }
        _ => {
            // e^phi = e^(pi i (1/tau - 1/8)) E
            let th = Float::with_val(bits, pi(prec) * (Float::with_val(bits, tau.recip_ref()) - 0.125f64));
            ephi * BigComplex::cis(&-th)
        }
    })
}

/// How the amplitude `f = 1 + z^(-5/2)/4` enters the `J4` expansion.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Amplitude {
    /// `f` replaced by 1, as in the closed form with `E F / sqrt(A2)`.
    #[default]
    Printed,
    /// The full Taylor expansion of `f` at `q1`.
    Full,
}

impl fmt::Display for Amplitude {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Amplitude::Printed => "printed",
            Amplitude::Full => "full",
        })
    }
}

impl FromStr for Amplitude {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "printed" => Ok(Amplitude::Printed),
            "full" => Ok(Amplitude::Full),
            other => Err(Error::Parse(format!("unknown amplitude mode {other:?}"))),
        }
    }
}

/// Working precision for the drivers: the fast phase at `q1` is of size
/// `tau^-2 log(1/tau)`.
fn driver_precision(tau: &Float, prec: Precision) -> Precision {
    let t = tau.to_f64();
    prec.with_guard(10 + (2.0 * (1.0 / t).log10()).ceil().max(0.0) as u32)
}

fn assemble(
    prefactor: BigComplex,
    f_terms: &[BigComplex],
    step: i32,
    count: usize,
    tau: &Float,
    extra_remainder: Float,
    prec: Precision,
) -> AsymptoticResult {
    let bits = prec.bits();
    let terms: Vec<(HalfExp, BigComplex)> = f_terms
        .iter()
        .take(count)
        .enumerate()
        .map(|(n, c)| (HalfExp::int(step * n as i32), c.with_precision(prec)))
        .collect();
    let mut remainder = extra_remainder;
    let pabs = prefactor.abs();
    for (n, c) in f_terms.iter().enumerate().skip(count) {
        let tp = Float::with_val(bits, rug::ops::Pow::pow(tau, step as u32 * n as u32));
        remainder += Float::with_val(bits, &pabs * c.abs()) * tp;
    }
    let mut out = AsymptoticResult {
        terms,
        truncation_exponent: HalfExp::int(step * count as i32),
        prefactor: prefactor.with_precision(prec),
        value_at: None,
        remainder_estimate: Float::with_val(bits, remainder),
    };
    let value = out.evaluate(tau);
    out.value_at = Some(Evaluation { tau: Float::with_val(bits, tau), value });
    out
}

/// `J4 ~ -2 pi sqrt(2) tau^(-3/2) exp(i(theta1 + pi/4)) E F / sqrt(A2)` with
/// `F` truncated after `count` terms (powers `tau^0, tau^2, ...`).
pub fn j4_asymptotic(tau: &Float, count: usize, amplitude: Amplitude, prec: Precision) -> Result<AsymptoticResult> {
    check_tau_range(tau)?;
    if count == 0 {
        return Err(Error::domain("at least one term is required"));
    }
    let work = driver_precision(tau, prec);
    let bits = work.bits();
    let tau_w = Float::with_val(bits, tau);
    let n_table = 2 * (count + 1);
    let sc = saddle_coefficients(Which::Q1, &tau_w, n_table + 2, work)?;
    let a_list: Vec<BigComplex> = (3..=n_table + 2).map(|n| &sc.a[n] * &a_weight(Which::Q1, n, work)).collect();
    let a2 = &sc.a[2] * &a2_weight(Which::Q1, work);

    // f(q1 + eps tau^-2 x) = 1 + sum_n binom(-5/2,n)/4 q1^(-5/2-n) (eps tau^-2)^n x^n
    let tau2 = Float::with_val(bits, tau_w.square_ref());
    let step = BigComplex::exp_i_pi(1, 4, work).div_real(&tau2);
    let lq = sc.q.ln_upper()?;
    let full_b: Vec<BigComplex> = (0..=n_table)
        .map(|n| {
            let pw = lq.mul_real(&Float::with_val(bits, -2.5 - n as f64)).exp();
            let mut c = binom_m52(n, work) * pw * step.powi(n as i32);
            c = c.div_int(4);
            if n == 0 {
                c = c + BigComplex::one(work);
            }
            c
        })
        .collect();
    let unit_b = vec![BigComplex::one(work)];

    // normalize by sqrt(2/A2) = Gamma(1/2) a2^(-1/2) so the printed F starts at 1
    let norm = (sc.a[2].recip().mul_int(2)).sqrt();
    let full_t: Vec<BigComplex> = perron_terms(&cnk_table(&full_b, &a_list, n_table)?, &a2, count + 2)?
        .into_iter()
        .map(|t| t / &norm)
        .collect();

    let theta = q1_phase(&tau_w, work);
    let quarter = Float::with_val(bits, pi(work) / 4u32);
    let phase = BigComplex::cis(&Float::with_val(bits, &theta + &quarter));
    let s = Float::with_val(bits, tau_w.sqrt_ref());
    let tau_m32 = Float::with_val(bits, &s * &tau_w).recip();
    let two_pi_sqrt2 = Float::with_val(bits, pi(work) * 2u32) * Float::with_val(bits, 2u32).sqrt();
    let prefactor = (phase * &sc.e / sc.a[2].sqrt()).mul_real(&(-(two_pi_sqrt2 * tau_m32)));

    Ok(match amplitude {
        Amplitude::Full => assemble(prefactor, &full_t, 2, count, &tau_w, Float::new(bits), prec),
        Amplitude::Printed => {
            let unit_t: Vec<BigComplex> = perron_terms(&cnk_table(&unit_b, &a_list, n_table)?, &a2, count)?
                .into_iter()
                .map(|t| t / &norm)
                .collect();
            // the dropped amplitude correction, summed over the kept orders
            let mut diff = BigComplex::zero(work);
            for n in 0..count {
                let tp = Float::with_val(bits, rug::ops::Pow::pow(&tau_w, 2 * n as u32));
                diff = diff + (&full_t[n] - &unit_t[n]).mul_real(&tp);
            }
            let extra = Float::with_val(bits, (&prefactor * &diff).abs());
            let mut all = unit_t;
            all.extend(full_t.into_iter().skip(count));
            assemble(prefactor, &all, 2, count, &tau_w, extra, prec)
        }
    })
}

/// `J2 ~ (2 pi / tau) exp(pi i (1/tau - 5/8)) B0 E F / sqrt(A2)` with `F`
/// truncated after `count` terms (powers `tau^0, tau^1, ...`).
pub fn j2_asymptotic(tau: &Float, count: usize, prec: Precision) -> Result<AsymptoticResult> {
    check_tau_range(tau)?;
    if count == 0 {
        return Err(Error::domain("at least one term is required"));
    }
    let work = driver_precision(tau, prec);
    let bits = work.bits();
    let tau_w = Float::with_val(bits, tau);
    let n_table = 2 * (count + 1);
    let sc = saddle_coefficients(Which::Q2, &tau_w, n_table + 2, work)?;
    let a_list: Vec<BigComplex> = (3..=n_table + 2).map(|n| &sc.a[n] * &a_weight(Which::Q2, n, work)).collect();
    let a2 = &sc.a[2] * &a2_weight(Which::Q2, work);
    let b_list: Vec<BigComplex> = (0..=n_table).map(|n| &sc.b[n] * &b_weight(n, work)).collect();
    let t = perron_terms(&cnk_table(&b_list, &a_list, n_table)?, &a2, count + 2)?;
    let f_terms: Vec<BigComplex> = t.iter().map(|x| x / &t[0]).collect();

    let th = Float::with_val(bits, pi(work) * (Float::with_val(bits, tau_w.recip_ref()) - 0.625f64));
    let two_pi_over_tau = Float::with_val(bits, pi(work) * 2u32) / &tau_w;
    let prefactor = (BigComplex::cis(&th) * &sc.b[0] * &sc.e / sc.a[2].sqrt()).mul_real(&two_pi_over_tau);
    Ok(assemble(prefactor, &f_terms, 1, count, &tau_w, Float::new(bits), prec))
}

/// `Re` of the rescaled phase along the `J4` segment,
/// `-tau^2 (phi(q1 + eps tau^-2 x) - phi(q1))`, minimized over
/// `[-1/2, 1/2]` minus `(-rho, rho)`.
pub fn condition_c_q1(tau: &Float, rho: f64, prec: Precision) -> Result<ConditionReport> {
    check_tau_range(tau)?;
    let work = driver_precision(tau, prec);
    let bits = work.bits();
    let tau_w = Float::with_val(bits, tau);
    let q = solve_saddles(&tau_w, work)?.q1()?.with_precision(work);
    let phi0 = phi(&q, &tau_w)?;
    let tau2 = Float::with_val(bits, tau_w.square_ref());
    let dir = BigComplex::exp_i_pi(1, 4, work).div_real(&tau2);
    rescaled_condition(&q, &phi0, &dir, &tau2, &tau_w, rho, (-0.5, 0.5))
}

/// Same search for the `J2` segment with `-tau (phi(q2 + eps^3 tau x) - phi(q2))`
/// over `[-11/40, 11/40]`.
pub fn condition_c_q2(tau: &Float, rho: f64, prec: Precision) -> Result<ConditionReport> {
    check_tau_range(tau)?;
    let work = driver_precision(tau, prec);
    let bits = work.bits();
    let tau_w = Float::with_val(bits, tau);
    let q = solve_saddles(&tau_w, work)?.q2()?.with_precision(work);
    let phi0 = phi(&q, &tau_w)?;
    let dir = BigComplex::exp_i_pi(3, 4, work).mul_real(&tau_w);
    rescaled_condition(&q, &phi0, &dir, &tau_w, &tau_w, rho, (-R0_Q2, R0_Q2))
}

/// Radius used for the `q2` segment.
pub const R0_Q2: f64 = 11.0 / 40.0;

fn rescaled_condition(
    q: &BigComplex,
    phi0: &BigComplex,
    dir: &BigComplex,
    scale: &Float,
    tau: &Float,
    rho: f64,
    segment: (f64, f64),
) -> Result<ConditionReport> {
    let bits = q.bits();
    let f = |x: f64| -> f64 {
        let z = q + &dir.mul_real(&Float::with_val(bits, x));
        match phi(&z, tau) {
            Ok(v) => {
                let d = (v - phi0).mul_real(scale);
                -d.re().to_f64()
            }
            Err(_) => f64::NAN,
        }
    };
    verify_condition_c(f, rho, segment)
}

/// Lower bound for `Re phi` on the `J4` segment:
/// `pi x (137 x + 144)/128 + pi log(1 - 9x/8)`.
pub fn u_minorant_q1(x: f64) -> f64 {
    let p = std::f64::consts::PI;
    p * x * (137.0 * x + 144.0) / 128.0 + p * (1.0 - 9.0 * x / 8.0).ln()
}

/// Lower bound for `Re phi` on the `J2` segment. The `x^6` and `x^7` terms
/// carry the factor `pi` of the bound they come from,
/// `16 pi (9/5) x^6 + (pi/2) sum_{n>=7} (11/10)^n (2x)^n`.
pub fn u_minorant_q2(x: f64) -> f64 {
    let p = std::f64::consts::PI;
    let s2 = std::f64::consts::SQRT_2;
    9.0 * p * x.powi(2) / 5.0 - 2.0 * p * s2 * x.powi(3) - 4.0 * p * x.powi(4) / 5.0 - 8.0 * p * s2 * x.powi(5)
        - 144.0 * p * x.powi(6) / 5.0
        - 19487171.0 * p * x.powi(7) / (31250.0 * (5.0 - 11.0 * x))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p() -> Precision {
        Precision::default()
    }

    #[test]
    fn binomial_values() {
        let b2 = binom_m52(2, p());
        assert!(b2.dist(&BigComplex::from_ratio(35, 8, p())) < 1e-45);
        let b3 = binom_m52(3, p());
        assert!(b3.dist(&BigComplex::from_ratio(-105, 16, p())) < 1e-45);
    }

    #[test]
    fn a_and_b_series_start_at_one() {
        for which in [Which::Q1, Which::Q2] {
            for n in 2..6 {
                let a = an_series(which, n, 10, p()).unwrap();
                assert!(a.coeff(HalfExp::ZERO).unwrap().dist(&BigComplex::one(p())) < 1e-45);
            }
            let b = bn_series(which, 1, 10, p()).unwrap();
            assert!(b.coeff(HalfExp::ZERO).unwrap().dist(&BigComplex::one(p())) < 1e-45);
        }
    }

    #[test]
    fn f_series_starts_at_one() {
        for which in [Which::Q1, Which::Q2] {
            let f = f_series(which, 3, 8, p()).unwrap();
            assert!(f.coeff(HalfExp::ZERO).unwrap().dist(&BigComplex::one(p())) < 1e-40);
        }
    }

    #[test]
    fn q3_has_no_local_expansion() {
        assert!(matches!(an_series(Which::Q3, 2, 8, p()), Err(Error::Domain(_))));
    }

    #[test]
    fn minorant_values() {
        assert!((u_minorant_q1(0.5) - 0.01068).abs() < 5e-6);
        assert!((u_minorant_q2(11.0 / 40.0) - 0.0154654).abs() < 5e-8);
    }
}
