use naive_integral::asymptotic::{an_series, condition_c_q1, condition_c_q2};
use naive_integral::bigcomplex::pi;
use naive_integral::contour::phi_derivative;
use naive_integral::perron::{cnk_table, gaussian_moment, perron_sum, verify_condition_c};
use naive_integral::saddle::solve_saddles;
use naive_integral::{BigComplex, Integrator, Precision, Which};
use num_complex::Complex64;
use proptest::prelude::*;
use rug::Float;

mod common;
use common::{brute_force, coeffs};

fn p() -> Precision {
    Precision::new(40).unwrap()
}

fn big(z: Complex64) -> BigComplex {
    BigComplex::from_f64(z.re, z.im, p()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn tables_are_triangular(order in 0usize..10, b in coeffs(10, 3.0), a in coeffs(10, 3.0)) {
        let bb: Vec<_> = b.iter().map(|z| big(*z)).collect();
        let aa: Vec<_> = a.iter().map(|z| big(*z)).collect();
        let t = cnk_table(&bb, &aa, order).unwrap();
        for n in 0..=order {
            prop_assert_eq!(t.row(n).len(), n + 1);
            prop_assert!(t.get(n, n + 1).is_none());
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(30))]

    #[test]
    fn table_matches_brute_force_at_order_eight(b in coeffs(9, 1.0), a in coeffs(8, 1.0)) {
        let order = 8;
        let bb: Vec<_> = b.iter().map(|z| big(*z)).collect();
        let aa: Vec<_> = a.iter().map(|z| big(*z)).collect();
        let t = cnk_table(&bb, &aa, order).unwrap();
        let oracle = brute_force(&b, &a, order);
        for n in 0..=order {
            for k in 0..=order {
                let want = oracle[n][k];
                match t.get(n, k) {
                    Some(c) => {
                        let (re, im) = c.to_f64_pair();
                        prop_assert!((Complex64::new(re, im) - want).norm() < 1e-12);
                    }
                    None => prop_assert!(want.norm() < 1e-12, "c[{}][{}] = {}", n, k, want),
                }
            }
        }
    }

    #[test]
    fn no_exponential_leaves_the_amplitude(b in coeffs(7, 2.0)) {
        let bb: Vec<_> = b.iter().map(|z| big(*z)).collect();
        let t = cnk_table(&bb, &[], 6).unwrap();
        for n in 0..=6 {
            prop_assert!(t.get(n, 0).unwrap().dist(&bb[n]) < 1e-35);
            for k in 1..=n {
                prop_assert!(t.get(n, k).unwrap().is_zero());
            }
        }
    }

    /// With |b_n|, |a_n| <= 1 the amplitude is at most 2 and `|w S|` at most 2
    /// on the circle of radius `min(1/2, 1/|w|)`, so Cauchy's inequality gives
    /// `|P_n(w)| <= 2 e^2 (|w|^n + 2^n)`.
    #[test]
    fn polynomial_bound(b in coeffs(9, 0.7), a in coeffs(8, 0.7), wr in -10.0f64..10.0, wi in -10.0f64..10.0) {
        let bb: Vec<_> = b.iter().map(|z| big(*z)).collect();
        let aa: Vec<_> = a.iter().map(|z| big(*z)).collect();
        let t = cnk_table(&bb, &aa, 8).unwrap();
        let w = BigComplex::from_f64(wr, wi, p()).unwrap();
        let wm = Complex64::new(wr, wi).norm();
        for n in 0..=8 {
            let v = t.polynomial_at(n, &w).abs().to_f64();
            let bound = 2.0 * 1f64.exp().powi(2) * (wm.powi(n as i32) + 2f64.powi(n as i32));
            prop_assert!(v <= bound, "n = {}: {} > {}", n, v, bound);
        }
    }
}

#[test]
fn gaussian_moments_match_quadrature() {
    let lambda = Float::with_val(p().bits(), 0.04);
    let a2 = BigComplex::from_f64(1.3, 0.4, p()).unwrap();
    for n in 0..7u32 {
        let m = gaussian_moment(n, &a2, &lambda).unwrap();
        let q = Integrator::new(p()).with_initial_panels(32);
        let lo = Float::with_val(p().bits(), -3);
        let hi = Float::with_val(p().bits(), 3);
        let r = q
            .integrate(
                |x| {
                    let xb = BigComplex::from_real(x);
                    let e = (&a2 * &xb * &xb).div_real(&lambda);
                    Ok((-e).exp() * xb.powi(n as i32))
                },
                &lo,
                &hi,
            )
            .unwrap();
        // the mass beyond |x| = 3 is about exp(-1.3 * 9 / 0.04)
        assert!(m.dist(&r.value) < 1e-35, "n = {n}: {m} vs {}", r.value);
    }
}

#[test]
fn unit_gaussian_leading_term() {
    let t = cnk_table(&[BigComplex::one(p())], &[], 8).unwrap();
    let lambda = Float::with_val(p().bits(), 0.01);
    let r = perron_sum(&t, &BigComplex::one(p()), &lambda, 2).unwrap();
    let want = Float::with_val(p().bits(), pi(p()) * &lambda).sqrt();
    assert!(r.value().unwrap().dist(&BigComplex::from_real(&want)) < 1e-38);
    assert!(r.terms[1].1.is_zero());
    assert!(r.remainder_estimate.is_zero());
}

#[test]
fn one_plus_z_squared_against_quadrature() {
    let b = [BigComplex::one(p()), BigComplex::zero(p()), BigComplex::one(p())];
    let t = cnk_table(&b, &[], 8).unwrap();
    let tau = Float::with_val(p().bits(), 0.04);
    let r = perron_sum(&t, &BigComplex::one(p()), &tau, 2).unwrap();
    let pt = Float::with_val(p().bits(), pi(p()) * &tau).sqrt();
    let closed = Float::with_val(p().bits(), &tau / 2u32) + 1u32;
    let closed = BigComplex::from_real(&Float::with_val(p().bits(), pt * closed));
    assert!(r.value().unwrap().dist(&closed) < 1e-38);
    let q = Integrator::new(p());
    let lo = Float::with_val(p().bits(), -1);
    let hi = Float::with_val(p().bits(), 1);
    let direct = q
        .integrate(
            |x| {
                let x2 = Float::with_val(p().bits(), x.square_ref());
                let v = Float::with_val(p().bits(), -Float::with_val(p().bits(), &x2 / &tau)).exp() * (x2 + 1u32);
                Ok(BigComplex::from_real(&v))
            },
            &lo,
            &hi,
        )
        .unwrap();
    // all Perron terms past the second vanish; what differs is the mass beyond |x| = 1
    let endpoint = (-1.0 / 0.04f64).exp();
    let diff = r.value().unwrap().dist(&direct.value).to_f64();
    assert!(diff < endpoint, "{diff}");
    assert!(diff > 1e-3 * endpoint);
}

fn factorial(n: u32) -> f64 {
    (1..=n).map(f64::from).product()
}

#[test]
fn a_series_match_derivatives_at_five_hundredths() {
    let t = 0.05f64;
    let tau = Float::with_val(p().bits(), t);
    let set = solve_saddles(&tau, p()).unwrap();
    let tb = BigComplex::from_real(&tau);
    let pi_b = BigComplex::from_real(&pi(p()));
    for n in 2..=6u32 {
        let q1 = set.q1().unwrap();
        let d = phi_derivative(n, q1, &tau).unwrap();
        // pi (i tau^2)^(n-1) (n-1)!
        let den = (&pi_b * &BigComplex::from_f64(0.0, t * t, p()).unwrap().powi(n as i32 - 1))
            .mul_real(&Float::with_val(p().bits(), factorial(n - 1)));
        let want = &d / &den;
        let got = an_series(Which::Q1, n as usize, 28, p()).unwrap().evaluate(&tb);
        assert!(got.dist(&want) < 1e-12, "q1, n = {n}: {got} vs {want}");

        let q2 = set.q2().unwrap();
        let d = phi_derivative(n, q2, &tau).unwrap();
        // pi 2^(n+1) (i/tau)^(n+1) n! / 4
        let den = (&pi_b * &BigComplex::from_f64(0.0, 1.0 / t, p()).unwrap().powi(n as i32 + 1))
            .mul_real(&Float::with_val(p().bits(), 2f64.powi(n as i32 + 1) * factorial(n) / 4.0));
        let want = &d / &den;
        let got = an_series(Which::Q2, n as usize, 28, p()).unwrap().evaluate(&tb);
        assert!(got.dist(&want) < 1e-9, "q2, n = {n}: {got} vs {want}");
    }
}

#[test]
fn condition_c_minima_are_positive() {
    for t in [0.05, 0.1, 0.25] {
        let tau = Float::with_val(p().bits(), t);
        let r1 = condition_c_q1(&tau, 0.05, p()).unwrap();
        let r2 = condition_c_q2(&tau, 0.05, p()).unwrap();
        assert!(r1.positive && r2.positive, "tau = {t}: {r1:?} {r2:?}");
    }
}

#[test]
fn quadratic_condition_c() {
    for rho in [0.05, 0.2, 0.5] {
        let r = verify_condition_c(|x| x * x, rho, (-1.0, 1.0)).unwrap();
        assert!((r.minimum - rho * rho).abs() < 1e-9, "{r:?}");
        assert!(r.positive);
    }
}

#[test]
fn single_cubic_term_table() {
    let alpha = BigComplex::from_f64(0.3, -1.2, p()).unwrap();
    let t = cnk_table(&[BigComplex::one(p())], &[alpha.clone()], 4).unwrap();
    assert!(t.get(1, 1).unwrap().dist(&-&alpha) < 1e-38);
    let half_sq = (&alpha * &alpha).div_int(2);
    assert!(t.get(2, 2).unwrap().dist(&half_sq) < 1e-38);
    assert!(t.get(1, 0).unwrap().is_zero());

    let beta = BigComplex::from_f64(-0.7, 0.1, p()).unwrap();
    let t = cnk_table(&[BigComplex::one(p()), beta.clone()], &[], 3).unwrap();
    assert!(t.get(0, 0).unwrap().dist(&BigComplex::one(p())) < 1e-40);
    assert!(t.get(1, 0).unwrap().dist(&beta) < 1e-40);
    assert!(t.get(1, 1).unwrap().is_zero());
}
