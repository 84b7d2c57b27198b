//! The three saddle points of the phase, their series in `tau`, and the
//! ramification points of the saddle curve.

use std::fmt;

use rug::Float;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::bigcomplex::{pi, real_to_string, BigComplex, Precision};
use crate::error::{Error, Result};
use crate::poly::Poly;
use crate::series::{HalfExp, PuiseuxSeries};

/// Upper end of the range where the localization results hold.
pub const TAU_MAX: f64 = 0.25;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Which {
    Q1,
    Q2,
    Q3,
}

impl Which {
    pub const ALL: [Which; 3] = [Which::Q1, Which::Q2, Which::Q3];
}

impl fmt::Display for Which {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Which::Q1 => "q1",
            Which::Q2 => "q2",
            Which::Q3 => "q3",
        })
    }
}

impl std::str::FromStr for Which {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "q1" => Ok(Which::Q1),
            "q2" => Ok(Which::Q2),
            "q3" => Ok(Which::Q3),
            _ => Err(Error::Parse(format!("unknown saddle {s:?}"))),
        }
    }
}

/// Checks `0 < tau <= 1/4`.
pub fn check_tau_range(tau: &Float) -> Result<()> {
    if !tau.is_finite() || *tau <= 0 {
        return Err(Error::domain(format!("tau must be positive, got {}", tau.to_f64())));
    }
    if *tau > TAU_MAX {
        return Err(Error::domain(format!(
            "tau = {} is outside (0, 1/4]",
            tau.to_f64()
        )));
    }
    Ok(())
}

/// Coefficients of `P(z, tau) = z^3 + (i - 1/(4 pi) - i/tau^2) z^2 - z/4 - i/4`.
pub fn saddle_polynomial(tau: &Float, prec: Precision) -> Poly {
    let bits = prec.bits();
    let tau = Float::with_val(bits, tau);
    let inv_tau2 = Float::with_val(bits, tau.square_ref()).recip();
    let quarter_pi_inv = Float::with_val(bits, pi(prec) * 4u32).recip();
    let b = BigComplex::from_parts(&(-quarter_pi_inv), &(Float::with_val(bits, 1u32) - inv_tau2));
    Poly::new(vec![
        BigComplex::from_parts(&Float::new(bits), &Float::with_val(bits, -0.25)),
        BigComplex::from_ratio(-1, 4, prec),
        b,
        BigComplex::one(prec),
    ])
}

/// Working precision used for roots at this `tau`: the leading saddle grows
/// like `tau^-2`, so `P` loses about `6 log10(1/tau)` digits to cancellation.
pub fn root_precision(tau: &Float, prec: Precision) -> Precision {
    let t = tau.to_f64();
    let extra = if t < 1.0 { (6.0 * (1.0 / t).log10()).ceil() as u32 } else { 0 };
    prec.with_guard(10 + extra)
}

/// Leading-order location predicted for each saddle.
pub fn prediction(which: Which, tau: &Float, prec: Precision) -> BigComplex {
    let bits = prec.bits();
    let tau = Float::with_val(bits, tau);
    match which {
        Which::Q1 => {
            let inv_tau2 = Float::with_val(bits, tau.square_ref()).recip();
            let re = Float::with_val(bits, pi(prec) * 4u32).recip();
            BigComplex::from_parts(&re, &(inv_tau2 - 1u32))
        }
        Which::Q2 => BigComplex::from_parts(&Float::new(bits), &(tau / 2u32)),
        Which::Q3 => BigComplex::from_parts(&Float::new(bits), &(-tau / 2u32)),
    }
}

#[derive(Clone, Debug)]
pub struct Root {
    pub z: BigComplex,
    pub residual: Float,
    pub label: Option<Which>,
    /// Distance to the series prediction of the assigned label.
    pub prediction_distance: Option<Float>,
}

#[derive(Clone, Debug)]
pub struct SaddleSet {
    pub tau: Float,
    pub precision: Precision,
    pub roots: Vec<Root>,
}

impl SaddleSet {
    pub fn get(&self, which: Which) -> Result<&BigComplex> {
        self.roots
            .iter()
            .find(|r| r.label == Some(which))
            .map(|r| &r.z)
            .ok_or_else(|| Error::Classification(format!("no root labeled {which} at this tau")))
    }

    pub fn q1(&self) -> Result<&BigComplex> {
        self.get(Which::Q1)
    }

    pub fn q2(&self) -> Result<&BigComplex> {
        self.get(Which::Q2)
    }

    pub fn q3(&self) -> Result<&BigComplex> {
        self.get(Which::Q3)
    }

    pub fn is_labeled(&self) -> bool {
        self.roots.iter().all(|r| r.label.is_some())
    }

    pub fn max_residual(&self) -> Float {
        self.roots
            .iter()
            .map(|r| r.residual.clone())
            .fold(Float::new(self.precision.bits()), |a, b| if b > a { b } else { a })
    }

    pub fn to_json(&self, digits: usize) -> Value {
        let roots: Vec<Value> = self
            .roots
            .iter()
            .map(|r| {
                json!({
                    "label": r.label.map(|l| l.to_string()),
                    "re": digits_string(r.z.re(), digits),
                    "im": digits_string(r.z.im(), digits),
                    "residual": real_to_string(&Float::with_val(32, &r.residual)),
                    "prediction_distance": r.prediction_distance.as_ref().map(|d| real_to_string(&Float::with_val(32, d))),
                })
            })
            .collect();
        json!({ "tau": real_to_string(&self.tau), "roots": roots })
    }
}

fn digits_string(x: &Float, digits: usize) -> String {
    x.to_string_radix(10, Some(digits))
}

/// The three roots of `P(z, tau)`, Newton-polished at [`root_precision`] and
/// labeled by proximity to the series predictions when `0 < tau <= 1/4`.
pub fn solve_saddles(tau: &Float, prec: Precision) -> Result<SaddleSet> {
    if !tau.is_finite() || *tau <= 0 {
        return Err(Error::domain(format!("tau must be positive, got {}", tau.to_f64())));
    }
    let work = root_precision(tau, prec);
    let tau_w = Float::with_val(work.bits(), tau);
    let poly = saddle_polynomial(&tau_w, work);
    let zs = poly.roots(work)?;
    let mut roots: Vec<Root> = zs
        .into_iter()
        .map(|z| Root {
            residual: poly.eval(&z).abs(),
            z,
            label: None,
            prediction_distance: None,
        })
        .collect();
    if tau_w <= TAU_MAX {
        label_roots(&mut roots, &tau_w, work)?;
        roots.sort_by_key(|r| r.label.map(|l| l as u8));
    }
    Ok(SaddleSet {
        tau: tau_w,
        precision: work,
        roots,
    })
}

fn label_roots(roots: &mut [Root], tau: &Float, prec: Precision) -> Result<()> {
    for which in Which::ALL {
        let p = prediction(which, tau, prec);
        let mut dist: Vec<(usize, Float)> = roots.iter().enumerate().map(|(k, r)| (k, r.z.dist(&p))).collect();
        dist.sort_by(|a, b| a.1.partial_cmp(&b.1).expect("finite distances"));
        let (best, ref d0) = dist[0];
        let d1 = &dist[1].1;
        // the runner-up must be clearly farther
        if Float::with_val(prec.bits(), d0 * 1.000001f64) >= *d1 {
            return Err(Error::Classification(format!(
                "two roots are equidistant from the {which} prediction at tau = {}",
                tau.to_f64()
            )));
        }
        if let Some(prev) = roots[best].label {
            return Err(Error::Classification(format!(
                "one root is nearest to both the {prev} and {which} predictions"
            )));
        }
        roots[best].label = Some(which);
        roots[best].prediction_distance = Some(d0.clone());
    }
    Ok(())
}

/// The normalized saddle series: `Q1` with `q1 = i tau^-2 Q1`, and `Q2`, `Q3`
/// with `q = (i tau / 2) Q`. `order` is the number of half-steps kept.
pub fn normalized_saddle_series(which: Which, order: usize, prec: Precision) -> Result<PuiseuxSeries> {
    let trunc = HalfExp::from_halves(order as i32);
    let term = |e: i32, c: BigComplex| (HalfExp::int(e), c);
    let one = BigComplex::one(prec);
    let c_ratio = {
        // 1 + i/(4 pi)
        let x = Float::with_val(prec.bits(), pi(prec) * 4u32).recip();
        BigComplex::from_parts(&Float::with_val(prec.bits(), 1u32), &x)
    };
    let build = |terms: Vec<(HalfExp, BigComplex)>| -> Result<PuiseuxSeries> {
        let kept: Vec<_> = terms.into_iter().filter(|(e, _)| *e < trunc).collect();
        PuiseuxSeries::from_terms(&kept, HalfExp::ZERO, trunc, prec)
    };
    // polynomial in Q with series coefficients, ascending powers of Q
    let (coeffs, seed) = match which {
        Which::Q1 => (
            vec![
                build(vec![term(6, BigComplex::from_ratio(1, 4, prec))])?,
                build(vec![term(4, BigComplex::from_ratio(1, 4, prec))])?,
                build(vec![term(0, -&one), term(2, c_ratio.clone())])?,
                build(vec![term(0, one.clone())])?,
            ],
            one.clone(),
        ),
        Which::Q2 | Which::Q3 => (
            vec![
                build(vec![term(0, -&one)])?,
                build(vec![(HalfExp::from_halves(2), BigComplex::from_ratio(-1, 2, prec))])?,
                build(vec![term(0, one.clone()), term(2, -&c_ratio)])?,
                build(vec![(HalfExp::int(3), BigComplex::from_ratio(-1, 2, prec))])?,
            ],
            if which == Which::Q2 { one.clone() } else { -&one },
        ),
    };
    series_newton(&coeffs, PuiseuxSeries::constant(seed, trunc), prec)
}

fn eval_poly(coeffs: &[PuiseuxSeries], q: &PuiseuxSeries) -> PuiseuxSeries {
    let mut acc = coeffs.last().expect("nonempty polynomial").clone();
    for c in coeffs.iter().rev().skip(1) {
        acc = &(&acc * q) + c;
    }
    acc
}

fn derivative(coeffs: &[PuiseuxSeries]) -> Vec<PuiseuxSeries> {
    coeffs
        .iter()
        .enumerate()
        .skip(1)
        .map(|(k, c)| c.scale(&BigComplex::from_int(k as i64, c.precision())))
        .collect()
}

/// Newton iteration `Q <- Q - G(Q)/G'(Q)` in the series ring.
fn series_newton(coeffs: &[PuiseuxSeries], mut q: PuiseuxSeries, prec: Precision) -> Result<PuiseuxSeries> {
    let dcoeffs = derivative(coeffs);
    let tol = Float::with_val(prec.bits(), Float::i_exp(1, -(prec.bits() as i32) + 16));
    for _ in 0..64 {
        let g = eval_poly(coeffs, &q);
        let dg = eval_poly(&dcoeffs, &q);
        let step = g
            .div_series(&dg)
            .map_err(|e| Error::Internal(format!("series Newton step failed: {e}")))?;
        q = &q - &step;
        let scale = q.coeffs().iter().map(|c| c.abs()).fold(Float::with_val(prec.bits(), 1u32), |a, b| {
            if b > a {
                b
            } else {
                a
            }
        });
        let worst = step
            .coeffs()
            .iter()
            .map(|c| c.abs())
            .fold(Float::new(prec.bits()), |a, b| if b > a { b } else { a });
        if worst <= Float::with_val(prec.bits(), &scale * &tol) {
            return Ok(q);
        }
    }
    Err(Error::Internal("series Newton iteration did not settle".into()))
}

/// The saddle `q_j(tau)` as a series; `order` half-steps of the normalized
/// series are kept.
pub fn saddle_series(which: Which, order: usize, prec: Precision) -> Result<PuiseuxSeries> {
    let q = normalized_saddle_series(which, order, prec)?;
    let i = BigComplex::i(prec);
    Ok(match which {
        Which::Q1 => q.scale(&i).shift(HalfExp::int(-2)),
        Which::Q2 | Which::Q3 => q.scale(&i.div_int(2)).shift(HalfExp::int(1)),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct LocalizationReport {
    pub tau: f64,
    /// `|q2 - i tau/2| / tau`, required below 1/10.
    pub q2_offset_ratio: f64,
    pub q2_unique: bool,
    pub q2_pass: bool,
    /// `|q1 - (i/tau^2 + 1/(4 pi) - i)|`, required at most `tau^2/2`.
    pub q1_offset: f64,
    pub q1_bound: f64,
    pub q1_unique: bool,
    pub q1_pass: bool,
    /// Polar form of `q2- = q2 - e^(3 pi i/4) tau/4`.
    pub q2_minus_modulus: f64,
    pub q2_minus_modulus_bound: f64,
    pub q2_minus_arg: f64,
    pub q2_minus_arg_bound: f64,
    pub q2_minus_pass: bool,
}

impl LocalizationReport {
    pub fn all_pass(&self) -> bool {
        self.q1_pass && self.q2_pass && self.q2_minus_pass
    }
}

pub fn verify_localizations(tau: &Float, prec: Precision) -> Result<LocalizationReport> {
    check_tau_range(tau)?;
    let set = solve_saddles(tau, prec)?;
    let work = set.precision;
    let bits = work.bits();
    let tau_w = &set.tau;

    let p2 = prediction(Which::Q2, tau_w, work);
    let q2 = set.q2()?;
    let r2 = Float::with_val(bits, tau_w / 10u32);
    let d2 = q2.dist(&p2);
    let in_disc2 = set.roots.iter().filter(|r| r.z.dist(&p2) < r2).count();

    let p1 = prediction(Which::Q1, tau_w, work);
    let q1 = set.q1()?;
    let r1 = Float::with_val(bits, tau_w.square_ref()) / 2u32;
    let d1 = q1.dist(&p1);
    let in_disc1 = set.roots.iter().filter(|r| r.z.dist(&p1) <= r1).count();

    let eps3 = BigComplex::exp_i_pi(3, 4, work);
    let q2m = q2 - &eps3.mul_real(&Float::with_val(bits, tau_w / 4u32));
    let modulus = q2m.abs();
    let arg = q2m.arg();
    let sqrt2 = Float::with_val(bits, 2u32).sqrt();
    let five_sqrt2 = Float::with_val(bits, &sqrt2 * 5u32);
    let arg_bound = Float::with_val(bits, (Float::with_val(bits, 24u32) - &five_sqrt2) / (five_sqrt2.clone() - 4u32)).atan();
    let mod_bound = Float::with_val(bits, tau_w * 15u32) / 32u32;
    let q2_minus_pass = modulus > 0 && modulus <= mod_bound && arg > 0 && arg <= arg_bound;

    Ok(LocalizationReport {
        tau: tau_w.to_f64(),
        q2_offset_ratio: Float::with_val(bits, &d2 / tau_w).to_f64(),
        q2_unique: in_disc2 == 1,
        q2_pass: d2 < r2 && in_disc2 == 1,
        q1_offset: d1.to_f64(),
        q1_bound: r1.to_f64(),
        q1_unique: in_disc1 == 1,
        q1_pass: d1 <= r1 && in_disc1 == 1,
        q2_minus_modulus: modulus.to_f64(),
        q2_minus_modulus_bound: mod_bound.to_f64(),
        q2_minus_arg: arg.to_f64(),
        q2_minus_arg_bound: arg_bound.to_f64(),
        q2_minus_pass,
    })
}

#[derive(Clone, Debug)]
pub struct RamificationSet {
    /// `rho_1, rho_2, rho_3` (imaginary part >= 0, by decreasing modulus)
    /// followed by their negatives.
    pub roots: Vec<BigComplex>,
    /// `|disc P(., tau)| * tau^6` at each root.
    pub residuals: Vec<Float>,
}

impl RamificationSet {
    pub fn principal(&self) -> &[BigComplex] {
        &self.roots[..3]
    }
}

/// `tau^6` times the discriminant of `P(., tau)`, as a cubic in `s = tau^2`.
pub fn scaled_discriminant(prec: Precision) -> Poly {
    // a z^3 + b z^2 + c z + d with a = 1, b = beta - i/s, c = -1/4, d = -i/4;
    // with B = beta s - i:  disc * s^3 = 18 c d B s^2 - 4 d B^3 + c^2 B^2 s - (4 c^3 + 27 d^2) s^3
    let bits = prec.bits();
    let beta = BigComplex::from_parts(
        &-Float::with_val(bits, pi(prec) * 4u32).recip(),
        &Float::with_val(bits, 1u32),
    );
    let c = BigComplex::from_ratio(-1, 4, prec);
    let d = BigComplex::i(prec).mul_real(&Float::with_val(bits, -0.25));
    let i = BigComplex::i(prec);
    let zero = BigComplex::zero(prec);
    // B(s) = -i + beta s
    let b_poly = [-&i, beta.clone()];
    let mul = |p: &[BigComplex], q: &[BigComplex]| -> Vec<BigComplex> {
        let mut out = vec![zero.clone(); p.len() + q.len() - 1];
        for (k, x) in p.iter().enumerate() {
            for (j, y) in q.iter().enumerate() {
                out[k + j] = &out[k + j] + &(x * y);
            }
        }
        out
    };
    let b2 = mul(&b_poly, &b_poly);
    let b3 = mul(&b2, &b_poly);
    let mut acc = vec![zero.clone(); 4];
    let add = |acc: &mut Vec<BigComplex>, p: &[BigComplex], scale: &BigComplex, shift: usize| {
        for (k, x) in p.iter().enumerate() {
            acc[k + shift] = &acc[k + shift] + &(x * scale);
        }
    };
    add(&mut acc, &b_poly, &(&c * &d).mul_int(18), 2);
    add(&mut acc, &b3, &d.mul_int(-4), 0);
    add(&mut acc, &b2, &(&c * &c), 1);
    let k3 = -(&(&c * &c * &c).mul_int(4) + &(&d * &d).mul_int(27));
    acc[3] = &acc[3] + &k3;
    Poly::new(acc)
}

pub fn ramification_points(prec: Precision) -> Result<RamificationSet> {
    let work = prec.with_guard(10);
    let disc = scaled_discriminant(work);
    let s_roots = disc.roots(work)?;
    let mut reps: Vec<BigComplex> = s_roots
        .iter()
        .map(|s| {
            let r = s.sqrt();
            if r.im().is_sign_negative() {
                -&r
            } else {
                r
            }
        })
        .collect();
    reps.sort_by(|a, b| b.abs().partial_cmp(&a.abs()).expect("finite moduli"));
    let mut roots = reps.clone();
    roots.extend(reps.iter().map(|r| -r));
    let residuals = roots.iter().map(|r| disc.eval(&(r * r)).abs()).collect();
    Ok(RamificationSet { roots, residuals })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p() -> Precision {
        Precision::default()
    }

    fn tau(x: f64) -> Float {
        Float::with_val(p().bits(), x)
    }

    #[test]
    fn rejects_nonpositive_tau() {
        assert!(matches!(solve_saddles(&tau(0.0), p()), Err(Error::Domain(_))));
        assert!(matches!(solve_saddles(&tau(-1.0), p()), Err(Error::Domain(_))));
    }

    #[test]
    fn roots_have_tiny_residuals() {
        let set = solve_saddles(&tau(0.1), p()).unwrap();
        assert!(set.is_labeled());
        for r in &set.roots {
            assert!(r.residual < 1e-40, "{}", r.residual);
        }
        let q2 = set.q2().unwrap();
        let d = q2.dist(&BigComplex::from_f64(0.0, 0.05, p()).unwrap());
        assert!(d < 0.01);
    }

    #[test]
    fn outside_range_is_unlabeled() {
        let set = solve_saddles(&tau(0.5), p()).unwrap();
        assert!(!set.is_labeled());
        assert!(matches!(set.q1(), Err(Error::Classification(_))));
    }

    #[test]
    fn q2_series_matches_printed_coefficients() {
        let q = saddle_series(Which::Q2, 12, p()).unwrap();
        let pi_f = pi(p()).to_f64();
        let expect = [
            (1, (0.0, 0.5)),
            (2, (0.0, 0.125)),
            (3, (-4.0 / (64.0 * pi_f), 17.0 / 64.0)),
            (4, (-1.0 / (32.0 * pi_f), 0.25)),
        ];
        for (e, (re, im)) in expect {
            let c = q.coeff(HalfExp::int(e)).unwrap();
            let err = c.dist(&BigComplex::from_f64(re, im, p()).unwrap()).to_f64();
            assert!(err < 1e-15, "tau^{e}: {c}");
        }
    }

    #[test]
    fn q3_mirrors_q2_at_first_order() {
        let q2 = saddle_series(Which::Q2, 8, p()).unwrap();
        let q3 = saddle_series(Which::Q3, 8, p()).unwrap();
        let c2 = q2.coeff(HalfExp::int(1)).unwrap();
        let c3 = q3.coeff(HalfExp::int(1)).unwrap();
        assert!((&c2 + &c3).abs() < 1e-45);
        let d2 = q3.coeff(HalfExp::int(2)).unwrap();
        assert!(d2.dist(&BigComplex::from_f64(0.0, 0.125, p()).unwrap()) < 1e-45);
    }

    #[test]
    fn q1_series_matches_root() {
        // four terms, through tau^4
        let q = saddle_series(Which::Q1, 16, p()).unwrap().truncate(HalfExp::from_halves(9));
        let t = tau(0.01);
        let set = solve_saddles(&t, p()).unwrap();
        let v = q.evaluate(&BigComplex::from_real(&t));
        assert!(v.dist(set.q1().unwrap()) < 10.0 * 1e-12);
    }

    #[test]
    fn localizations_at_quarter() {
        let r = verify_localizations(&tau(0.25), p()).unwrap();
        assert!(r.all_pass(), "{r:?}");
        assert!(verify_localizations(&tau(0.3), p()).is_err());
    }

    #[test]
    fn ramification_points_are_closed_under_negation() {
        let r = ramification_points(p()).unwrap();
        assert_eq!(r.roots.len(), 6);
        for k in 0..3 {
            assert!((&r.roots[k] + &r.roots[k + 3]).abs() < 1e-45);
        }
        for res in &r.residuals {
            assert!(*res < 1e-40);
        }
    }
}
