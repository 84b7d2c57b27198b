//! Published reference values: integrals, truncated coefficient series and
//! the closed forms of `F` in terms of `A_n`, `B_n`.

use std::f64::consts::PI;

use num_complex::Complex64;

use serde::Serialize;

use crate::asymptotic::{an_series, bn_series, e_series, f_series};
use crate::bigcomplex::{BigComplex, Precision};
use crate::error::{Error, Result};
use crate::saddle::{normalized_saddle_series, saddle_series, Which};
use crate::series::{HalfExp, PuiseuxSeries};

/// A decimal complex value as printed.
#[derive(Clone, Copy, Debug)]
pub struct PrintedValue {
    pub name: &'static str,
    pub re: &'static str,
    pub im: &'static str,
}

impl PrintedValue {
    pub fn value(&self, prec: Precision) -> Result<BigComplex> {
        BigComplex::parse(self.re, self.im, prec)
    }

    /// Significant digits carried by the shorter of the two printed parts.
    pub fn digits(&self) -> usize {
        let count = |s: &str| {
            let mantissa = s.split(['e', 'E']).next().unwrap_or("");
            mantissa
                .chars()
                .filter(char::is_ascii_digit)
                .skip_while(|c| *c == '0')
                .count()
        };
        count(self.re).min(count(self.im))
    }
}

const fn pv(name: &'static str, re: &'static str, im: &'static str) -> PrintedValue {
    PrintedValue { name, re, im }
}

/// `J0` and its five parts at `t = 1000`.
pub const T1000: [PrintedValue; 6] = [
    pv("J0", "-319.76248420342571671", "-1.02579761304794517"),
    pv("J1", "-0.05168313643128113065585765", "-0.03340921720926301938390691"),
    pv("J2", "78.07970774521689754364494", "-10.25770863057151828557739"),
    pv("J3", "0.2647574910872026449990598", "0.0894564497179051642560343"),
    pv("J4", "-398.0552663032985357719259", "9.1758637850149309735293"),
    pv("J5", "9.875178129540771845045695e-21", "2.184235417038277932562643e-21"),
];

/// `J0` and its five parts at `tau = 1/100`.
pub const TAU_HUNDREDTH: [PrintedValue; 6] = [
    pv("J0", "-4374.3775328031826011", "7291.8275606814665335"),
    pv("J1", "-2.912092702349396595101662e-20", "-2.964824098450459727389800e-19"),
    pv("J2", "-247.5225899909764227411730", "-577.4737675485197328678266"),
    pv("J3", "2.253839879398274199016479e-12", "-4.183940256870270401904834e-11"),
    pv("J4", "-4126.854942812208432198568", "7869.301328230028105733987"),
    pv("J5", "2.972203110707883327466376e-1337", "6.798356476800169197964932e-1337"),
];

/// Three-term expansion of `J4` at `tau = 1/100`.
pub const J4_ASYMPTOTIC: PrintedValue =
    pv("J4", "-4126.8549427460263959626901037", "7869.3013284421422271264692398");

/// Three-term expansion of `J2` at `tau = 1/100`.
pub const J2_ASYMPTOTIC: PrintedValue =
    pv("J2", "-247.52258999098767254607433770", "-577.47376754856685343451669512");

/// Ramification points `rho_1, rho_2, rho_3`, six significant digits.
pub const RAMIFICATION: [(f64, f64); 3] = [(0.95762, 0.691421), (-0.851115, 0.652642), (-0.633938, 0.010142)];

/// `|rho_3|` as printed.
pub const RHO3_MODULUS: f64 = 0.634019;

/// Minorant values at the right end of the condition-(c) windows.
pub const U_Q1_HALF: f64 = 0.01068;
pub const U_Q2_R0: f64 = 0.0154654;

/// Which printed truncation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SeriesId {
    /// Saddle `q_j`.
    Saddle(Which),
    /// Normalized saddle `Q1` or `Q2`.
    Normalized(Which),
    /// `A_n` at `q1` or `q2`, `n = 2..=6`.
    A(Which, usize),
    /// `B_n` at `q2`, `n = 0..=4`.
    B(usize),
    /// `E` at `q1` or `q2`.
    E(Which),
}

/// A truncated series with numeric coefficients; `omitted` is the order of the `O(.)` term.
#[derive(Clone, Debug)]
pub struct PrintedSeries {
    pub terms: Vec<(HalfExp, Complex64)>,
    pub omitted: HalfExp,
}

impl PrintedSeries {
    pub fn evaluate(&self, tau: f64) -> Complex64 {
        self.terms.iter().map(|(e, c)| c * tau.powf(e.to_f64())).sum()
    }

    pub fn coeff(&self, e: HalfExp) -> Complex64 {
        self.terms
            .iter()
            .find(|(x, _)| *x == e)
            .map(|(_, c)| *c)
            .unwrap_or_default()
    }
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// `(a + b i pi + c pi^2) / (d pi^2)`
fn quad_pi(a: f64, b: f64, cc: f64, d: f64) -> Complex64 {
    c((a + cc * PI * PI) / (d * PI * PI), b / (d * PI))
}

fn ints(list: Vec<(i32, Complex64)>, omitted: i32) -> PrintedSeries {
    PrintedSeries {
        terms: list.into_iter().map(|(e, v)| (HalfExp::int(e), v)).collect(),
        omitted: HalfExp::int(omitted),
    }
}

pub fn printed_series(id: SeriesId) -> Result<PrintedSeries> {
    let one = c(1.0, 0.0);
    let p = PI;
    let p2 = PI * PI;
    let p3 = p2 * PI;
    let p4 = p2 * p2;
    Ok(match id {
        SeriesId::Saddle(Which::Q1) => ints(
            vec![
                (-2, c(0.0, 1.0)),
                (0, c(1.0 / (4.0 * p), -1.0)),
                (2, c(0.0, -0.25)),
                (4, c(1.0 / (16.0 * p), -0.5)),
            ],
            6,
        ),
        SeriesId::Saddle(Which::Q2) => ints(
            vec![
                (1, c(0.0, 0.5)),
                (2, c(0.0, 0.125)),
                (3, c(-1.0 / (16.0 * p), 17.0 / 64.0)),
                (4, c(-1.0 / (32.0 * p), 0.25)),
            ],
            5,
        ),
        SeriesId::Saddle(Which::Q3) => ints(
            vec![
                (1, c(0.0, -0.5)),
                (2, c(0.0, 0.125)),
                (3, c(1.0 / (16.0 * p), -17.0 / 64.0)),
                (4, c(-1.0 / (32.0 * p), 0.25)),
            ],
            5,
        ),
        SeriesId::Normalized(Which::Q1) => ints(
            vec![
                (0, one),
                (2, c(-1.0, -1.0 / (4.0 * p))),
                (4, c(-0.25, 0.0)),
                (6, c(-0.5, -1.0 / (16.0 * p))),
            ],
            7,
        ),
        SeriesId::Normalized(Which::Q2) => ints(
            vec![
                (0, one),
                (1, c(0.25, 0.0)),
                (2, c(17.0 / 32.0, 1.0 / (8.0 * p))),
                (3, c(0.5, 1.0 / (16.0 * p))),
            ],
            4,
        ),
        SeriesId::A(Which::Q1, n) => {
            let rows: [[Complex64; 4]; 5] = [
                [
                    c(0.0, 1.0 / (4.0 * p)),
                    c(-1.0 / (16.0 * p2), 0.0),
                    c(-0.5, -1.0 / (64.0 * p3)),
                    c((-400.0 + 1.0 / p4) / 256.0, -0.5 / p),
                ],
                [
                    c(0.0, 1.0 / (2.0 * p)),
                    c(-3.0 / (16.0 * p2), 0.0),
                    c(-1.5, -1.0 / (16.0 * p3)),
                    c(-87.0 / 16.0 + 5.0 / (256.0 * p4), -15.0 / (8.0 * p)),
                ],
                [
                    c(0.0, 3.0 / (4.0 * p)),
                    c(-3.0 / (8.0 * p2), 0.0),
                    c(-3.0, -5.0 / (32.0 * p3)),
                    c(-99.0 / 8.0 + 15.0 / (256.0 * p4), -4.5 / p),
                ],
                [
                    c(0.0, 1.0 / p),
                    c(-5.0 / (8.0 * p2), 0.0),
                    c(-5.0, -5.0 / (16.0 * p3)),
                    c(5.0 / 256.0 * (-1184.0 + 7.0 / p4), -5.0 * 448.0 / (256.0 * p)),
                ],
                [
                    c(0.0, 5.0 / (4.0 * p)),
                    c(-15.0 / (16.0 * p2), 0.0),
                    c(-5.0 * 96.0 / 64.0, -35.0 / (64.0 * p3)),
                    c(615.0 / 16.0 - 35.0 / (128.0 * p4), -15.0 / p),
                ],
            ];
            let row = check_index(n, 2, 6, "A_n")?;
            let r = rows[row];
            ints(vec![(0, one), (2, r[0]), (4, r[1]), (6, r[2]), (8, r[3])], 10)
        }
        SeriesId::A(Which::Q2, n) => {
            let rows: [[Complex64; 4]; 5] = [
                [
                    c(-1.0, 0.0),
                    c(-31.0 / 32.0, -3.0 / (8.0 * p)),
                    c(-3.0 / 16.0, 1.0 / (4.0 * p)),
                    quad_pi(-48.0, 248.0, 1215.0, 2048.0),
                ],
                [
                    c(-1.0, 0.0),
                    c(-19.0 / 12.0, -1.0 / (2.0 * p)),
                    c(15.0 / 32.0, 3.0 / (8.0 * p)),
                    quad_pi(-3.0, 19.0, 45.0, 48.0),
                ],
                [
                    c(-1.25, 0.0),
                    c(-55.0 / 32.0, -5.0 / (8.0 * p)),
                    c(29.0 / 32.0, 5.0 / (8.0 * p)),
                    quad_pi(-240.0, 1320.0, 3663.0, 2048.0),
                ],
                [
                    c(-1.5, 0.0),
                    c(-15.0 / 8.0, -3.0 / (4.0 * p)),
                    c(109.0 / 64.0, 60.0 / (64.0 * p)),
                    quad_pi(-15.0, 75.0, 194.0, 80.0),
                ],
                [
                    c(-1.75, 0.0),
                    c(-63.0 / 32.0, -7.0 / (8.0 * p)),
                    c(21.0 / 8.0, 21.0 / (16.0 * p)),
                    quad_pi(-560.0, 2520.0, 6335.0, 2048.0),
                ],
            ];
            let row = check_index(n, 2, 6, "A_n")?;
            let r = rows[row];
            ints(vec![(0, one), (1, r[0]), (2, r[1]), (3, r[2]), (4, r[3])], 5)
        }
        SeriesId::B(n) => {
            let rows: [[Complex64; 4]; 5] = [
                [
                    c(-5.0 / 8.0, 0.0),
                    c(-135.0 / 128.0, -40.0 / (128.0 * p)),
                    c(-195.0 / 1024.0, 120.0 / (1024.0 * p)),
                    quad_pi(-320.0, 2160.0, 6155.0, 32768.0),
                ],
                [
                    c(-7.0 / 8.0, 0.0),
                    c(-175.0 / 128.0, -56.0 / (128.0 * p)),
                    c(119.0 / 1024.0, 280.0 / (1024.0 * p)),
                    quad_pi(-1344.0, 8400.0, 23387.0, 32768.0),
                ],
                [
                    c(-9.0 / 8.0, 0.0),
                    c(-207.0 / 128.0, -72.0 / (128.0 * p)),
                    c(633.0 / 1024.0, 504.0 / (1024.0 * p)),
                    quad_pi(-2880.0, 16560.0, 44955.0, 32768.0),
                ],
                [
                    c(-11.0 / 8.0, 0.0),
                    c(-231.0 / 128.0, -88.0 / (128.0 * p)),
                    c(1331.0 / 1024.0, 792.0 / (1024.0 * p)),
                    quad_pi(-4928.0, 25872.0, 68299.0, 32768.0),
                ],
                [
                    c(-13.0 / 8.0, 0.0),
                    c(-247.0 / 128.0, -104.0 / (128.0 * p)),
                    c(2197.0 / 1024.0, 1144.0 / (1024.0 * p)),
                    quad_pi(-7488.0, 35568.0, 90987.0, 32768.0),
                ],
            ];
            let row = check_index(n, 0, 4, "B_n")?;
            let r = rows[row];
            let mut s = ints(vec![(0, one), (1, r[0]), (2, r[1]), (3, r[2]), (4, r[3])], 5);
            if n == 0 {
                s.terms.insert(3, (HalfExp::from_halves(5), c(-0.5, -0.5)));
            }
            s
        }
        SeriesId::E(Which::Q1) => ints(
            vec![
                (0, one),
                (2, c(0.0, (8.0 * p2 - 1.0) / (32.0 * p))),
                (4, c(-7.0 / 128.0 + 13.0 / (6144.0 * p2) - p2 / 32.0, p / 4.0)),
            ],
            5,
        ),
        SeriesId::E(Which::Q2) => ints(
            vec![
                (0, one),
                (1, c(0.125, -47.0 * p / 96.0)),
                (2, c((144.0 - 2209.0 * p2) / 18432.0, -3432.0 * p / 18432.0)),
            ],
            3,
        ),
        other => return Err(Error::domain(format!("no printed series for {other:?}"))),
    })
}

fn check_index(n: usize, lo: usize, hi: usize, what: &str) -> Result<usize> {
    if n < lo || n > hi {
        return Err(Error::domain(format!("{what} is printed for n = {lo}..={hi}, got {n}")));
    }
    Ok(n - lo)
}

/// The printed closed form of `F` at `q1` (through `tau^4`) or `q2` (through
/// `tau^2`), given `a = [A2..A6]` and, at `q2`, `b = [B0..B4]`.
/// Returns the value and the order of the omitted term.
pub fn printed_f(which: Which, a: &[Complex64; 5], b: &[Complex64; 5], tau: f64) -> Result<(Complex64, HalfExp)> {
    let [a2, a3, a4, a5, a6] = *a;
    let i = Complex64::i();
    let p = PI;
    let p2 = PI * PI;
    match which {
        Which::Q1 => {
            let f1 = i * 3.0 * a4 / (4.0 * p * a2.powi(2)) - i * 5.0 * a3.powi(2) / (6.0 * p * a2.powi(3));
            let f2 = -385.0 * a3.powi(4) / (72.0 * p2 * a2.powi(6)) + 105.0 * a4 * a3.powi(2) / (8.0 * p2 * a2.powi(5))
                - 7.0 * a5 * a3 / (p2 * a2.powi(4))
                - 105.0 * a4.powi(2) / (32.0 * p2 * a2.powi(4))
                + 5.0 * a6 / (2.0 * p2 * a2.powi(3));
            Ok((1.0 + f1 * tau.powi(2) + f2 * tau.powi(4), HalfExp::int(6)))
        }
        Which::Q2 => {
            let [b0, b1, b2, b3, b4] = *b;
            let f1 = i
                * (-15.0 * a3 * b1 / (4.0 * p * a2.powi(2) * b0) + 35.0 * b2 / (8.0 * p * a2 * b0)
                    + 15.0 * a3.powi(2) / (8.0 * p * a2.powi(3))
                    - 3.0 * a4 / (2.0 * p * a2.powi(2)));
            let f2 = (1575.0 * a3.powi(3) * b1 / (32.0 * a2.powi(5) * b0)
                - 3675.0 * a3.powi(2) * b2 / (64.0 * a2.powi(4) * b0)
                - 525.0 * a4 * a3 * b1 / (8.0 * a2.powi(4) * b0)
                + 1575.0 * a3 * b3 / (32.0 * a2.powi(3) * b0)
                + 75.0 * a5 * b1 / (4.0 * a2.powi(3) * b0)
                + 525.0 * a4 * b2 / (16.0 * a2.powi(3) * b0)
                - 3465.0 * b4 / (128.0 * a2.powi(2) * b0)
                - 3465.0 * a3.powi(4) / (128.0 * a2.powi(6))
                + 945.0 * a4 * a3.powi(2) / (16.0 * a2.powi(5))
                - 105.0 * a5 * a3 / (4.0 * a2.powi(4))
                - 105.0 * a4.powi(2) / (8.0 * a2.powi(4))
                + 15.0 * a6 / (2.0 * a2.powi(3)))
                / p2;
            Ok((1.0 + f1 * tau + f2 * tau * tau, HalfExp::int(3)))
        }
        Which::Q3 => Err(Error::domain("F is printed for q1 and q2 only")),
    }
}

/// The generated series behind a printed truncation, with `order` half-steps.
pub fn generated_series(id: SeriesId, order: usize, prec: Precision) -> Result<PuiseuxSeries> {
    match id {
        SeriesId::Saddle(w) => saddle_series(w, order, prec),
        SeriesId::Normalized(w) => normalized_saddle_series(w, order, prec),
        SeriesId::A(w, n) => an_series(w, n, order, prec),
        SeriesId::B(n) => bn_series(Which::Q2, n, order, prec),
        SeriesId::E(w) => e_series(w, order, prec),
    }
}

/// Generated against printed, evaluated at one `tau`.
#[derive(Clone, Debug, Serialize)]
pub struct SeriesComparison {
    pub label: String,
    pub tau: f64,
    pub generated: (f64, f64),
    pub printed: (f64, f64),
    pub difference: f64,
    /// Size of the first generated term at or past the printed `O(.)` order.
    pub omitted_term: f64,
    /// Largest coefficient mismatch over the printed orders.
    pub coefficient_mismatch: f64,
}

impl SeriesComparison {
    /// Difference within twice the first omitted term.
    pub fn within_omitted(&self) -> bool {
        self.difference <= 2.0 * self.omitted_term + 1e-14
    }
}

fn to_c64(z: &BigComplex) -> Complex64 {
    let (re, im) = z.to_f64_pair();
    Complex64::new(re, im)
}

fn first_omitted(s: &PuiseuxSeries, from: HalfExp, tau: f64) -> f64 {
    s.nonzero_terms()
        .into_iter()
        .find(|(e, c)| *e >= from && c.abs().to_f64() > 1e-30)
        .map(|(e, c)| c.abs().to_f64() * tau.powf(e.to_f64()))
        .unwrap_or(0.0)
}

fn label(id: SeriesId) -> String {
    match id {
        SeriesId::Saddle(w) => format!("{w}"),
        SeriesId::Normalized(Which::Q1) => "Q1".into(),
        SeriesId::Normalized(_) => "Q2".into(),
        SeriesId::A(w, n) => format!("A{n}({w})"),
        SeriesId::B(n) => format!("B{n}(q2)"),
        SeriesId::E(w) => format!("E({w})"),
    }
}

/// Evaluate the generated and printed forms of `id` at `tau`.
pub fn compare_series(id: SeriesId, tau: f64, order: usize, prec: Precision) -> Result<SeriesComparison> {
    let printed = printed_series(id)?;
    let generated = generated_series(id, order, prec)?;
    let t = BigComplex::from_f64(tau, 0.0, prec)?;
    let g = to_c64(&generated.evaluate(&t));
    let pv = printed.evaluate(tau);
    let mut mismatch = 0.0f64;
    for (e, c) in generated.nonzero_terms() {
        if e < printed.omitted {
            mismatch = mismatch.max((to_c64(&c) - printed.coeff(e)).norm());
        }
    }
    for (e, c) in &printed.terms {
        if generated.coeff(*e).is_none() {
            mismatch = mismatch.max(c.norm());
        }
    }
    Ok(SeriesComparison {
        label: label(id),
        tau,
        generated: (g.re, g.im),
        printed: (pv.re, pv.im),
        difference: (g - pv).norm(),
        omitted_term: first_omitted(&generated, printed.omitted, tau),
        coefficient_mismatch: mismatch,
    })
}

/// The generated `F` series against the printed closed form, both at `tau`,
/// with the closed form fed the generated `A_n`, `B_n`.
pub fn compare_f(which: Which, tau: f64, order: usize, prec: Precision) -> Result<SeriesComparison> {
    let t = BigComplex::from_f64(tau, 0.0, prec)?;
    let mut a = [Complex64::default(); 5];
    let mut b = [Complex64::new(1.0, 0.0); 5];
    for n in 2..=6 {
        a[n - 2] = to_c64(&an_series(which, n, order, prec)?.evaluate(&t));
    }
    if which == Which::Q2 {
        for (n, slot) in b.iter_mut().enumerate() {
            *slot = to_c64(&bn_series(which, n, order, prec)?.evaluate(&t));
        }
    }
    let (pv, omitted) = printed_f(which, &a, &b, tau)?;
    // the printed form carries three Perron terms; the fourth is the first one omitted
    let generated = f_series(which, 5, order, prec)?;
    let three = f_series(which, 3, order, prec)?;
    let four = f_series(which, 4, order, prec)?;
    let g = to_c64(&generated.evaluate(&t));
    let next = (to_c64(&four.evaluate(&t)) - to_c64(&three.evaluate(&t))).norm();
    Ok(SeriesComparison {
        label: format!("F({which})"),
        tau,
        generated: (g.re, g.im),
        printed: (pv.re, pv.im),
        difference: (g - pv).norm(),
        omitted_term: next.max(first_omitted(&generated, omitted, tau)),
        coefficient_mismatch: 0.0,
    })
}

/// Every printed series, in a fixed order.
pub fn all_series() -> Vec<SeriesId> {
    let mut v = vec![
        SeriesId::Saddle(Which::Q1),
        SeriesId::Saddle(Which::Q2),
        SeriesId::Saddle(Which::Q3),
        SeriesId::Normalized(Which::Q1),
        SeriesId::Normalized(Which::Q2),
    ];
    for w in [Which::Q1, Which::Q2] {
        v.extend((2..=6).map(|n| SeriesId::A(w, n)));
    }
    v.extend((0..=4).map(SeriesId::B));
    v.push(SeriesId::E(Which::Q1));
    v.push(SeriesId::E(Which::Q2));
    v
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn printed_digits() {
        assert_eq!(T1000[0].digits(), 18);
        assert_eq!(J4_ASYMPTOTIC.digits(), 29);
    }

    #[test]
    fn q2_scaled_by_q2_normalized() {
        let q = printed_series(SeriesId::Saddle(Which::Q2)).unwrap();
        let n = printed_series(SeriesId::Normalized(Which::Q2)).unwrap();
        for k in 1..=4 {
            let want = Complex64::new(0.0, 0.5) * n.coeff(HalfExp::int(k - 1));
            assert!((q.coeff(HalfExp::int(k)) - want).norm() < 1e-15);
        }
    }

    #[test]
    fn f_at_zero_is_one() {
        let a = [Complex64::new(1.0, 0.0); 5];
        let (f, _) = printed_f(Which::Q2, &a, &a, 0.0).unwrap();
        assert_eq!(f, Complex64::new(1.0, 0.0));
        assert!(printed_series(SeriesId::A(Which::Q1, 7)).is_err());
    }
}
