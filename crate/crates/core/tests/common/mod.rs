#![allow(dead_code)]

use naive_integral::asymptotic::f_series;
use naive_integral::contour::{build_path, integrate_segment, PathVariant};
use naive_integral::{BigComplex, HalfExp, Precision, Which};
use num_complex::Complex64;
use proptest::prelude::*;
use rug::Float;

pub fn coeffs(len: usize, scale: f64) -> impl Strategy<Value = Vec<Complex64>> {
    prop::collection::vec((-scale..scale, -scale..scale), len)
        .prop_map(|v| v.into_iter().map(|(re, im)| Complex64::new(re, im)).collect())
}

/// `[z^n w^k] (sum b_n z^n) exp(-w sum_{n>=3} a_n z^(n-2))` by expanding the
/// exponential as a power series in `w` with plain `f64` arithmetic.
pub fn brute_force(b: &[Complex64], a: &[Complex64], order: usize) -> Vec<Vec<Complex64>> {
    let n1 = order + 1;
    let zero = Complex64::default();
    let mut s = vec![zero; n1];
    for (j, c) in a.iter().enumerate() {
        if j + 1 < n1 {
            s[j + 1] = *c;
        }
    }
    // bivariate array e[n][m]
    let mut e = vec![vec![zero; n1]; n1];
    let mut power = vec![zero; n1];
    power[0] = Complex64::new(1.0, 0.0);
    let mut fact = 1.0;
    for m in 0..n1 {
        let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
        for n in 0..n1 {
            e[n][m] = power[n] * sign / fact;
        }
        let mut next = vec![zero; n1];
        for i in 0..n1 {
            for j in 0..n1 - i {
                next[i + j] += power[i] * s[j];
            }
        }
        power = next;
        fact *= (m + 1) as f64;
    }
    let mut out = vec![vec![zero; n1]; n1];
    for n in 0..n1 {
        for i in 0..=n.min(b.len().saturating_sub(1)) {
            for k in 0..n1 {
                out[n][k] += b[i] * e[n - i][k];
            }
        }
    }
    out
}

/// `tau` rounded from its decimal form, so 0.01 means exactly 1/100.
pub fn tau(x: f64, prec: Precision) -> Float {
    Float::with_val(prec.bits(), Float::parse(x.to_string()).unwrap())
}

pub fn tau_of_t(t: u32, prec: Precision) -> Float {
    let two_pi = Float::with_val(prec.bits(), rug::float::Constant::Pi) * 2u32;
    Float::with_val(prec.bits(), two_pi / t).sqrt()
}

/// Segment `k` of the default path (1 = J2, 3 = J4).
pub fn segment(tau: &Float, k: usize, prec: Precision) -> BigComplex {
    let path = build_path(tau, prec, PathVariant::Quarter).unwrap();
    let (a, b) = path.segment(k);
    integrate_segment(a, b, &path.tau, prec).unwrap().value
}

/// Leading power of what the first `count` Perron terms leave out, read off
/// the generated `F` series. The kept terms are evaluated exactly in `tau`, so
/// this can sit above `tau^count`.
pub fn first_dropped_power(which: Which, count: usize, prec: Precision) -> f64 {
    let kept = f_series(which, count, 20, prec).unwrap();
    let more = f_series(which, count + 2, 20, prec).unwrap();
    assert_eq!(kept.base_exponent(), HalfExp::ZERO);
    let i = kept
        .coeffs()
        .iter()
        .zip(more.coeffs())
        .position(|(a, b)| a.dist(b) > 1e-30)
        .unwrap();
    i as f64 / 2.0
}

/// Observed relative-error ratio across each halving of `tau` (against
/// segment `k` of the contour), divided by the ratio `2^power` predicts.
pub fn halving_ratios<F: Fn(&Float) -> BigComplex>(taus: &[f64], k: usize, asym: F, power: f64, prec: Precision) -> Vec<f64> {
    let errs: Vec<f64> = taus
        .iter()
        .map(|&x| {
            let t = tau(x, prec);
            let exact = segment(&t, k, prec);
            asym(&t).dist(&exact).to_f64() / exact.abs().to_f64()
        })
        .collect();
    errs.windows(2).map(|w| (w[0] / w[1]) / 2f64.powf(power)).collect()
}
