use naive_integral::asymptotic::an_series;
use naive_integral::bigcomplex::pi;
use naive_integral::contour::phi;
use naive_integral::saddle::{normalized_saddle_series, saddle_series, solve_saddles};
use naive_integral::{BigComplex, HalfExp, Precision, PuiseuxSeries, Which};
use proptest::prelude::*;
use rug::Float;

fn p() -> Precision {
    Precision::new(40).unwrap()
}

const LEN: usize = 12;

fn series_from(coeffs: &[(f64, f64)], base: i32) -> PuiseuxSeries {
    let c = coeffs
        .iter()
        .map(|&(re, im)| BigComplex::from_f64(re, im, p()).unwrap())
        .collect();
    PuiseuxSeries::new(HalfExp::from_halves(base), c, p())
}

fn unit_series() -> impl Strategy<Value = PuiseuxSeries> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), LEN - 1).prop_map(|mut v| {
        v.insert(0, (1.0, 0.0));
        series_from(&v, 0)
    })
}

fn any_series() -> impl Strategy<Value = PuiseuxSeries> {
    prop::collection::vec((-2.0f64..2.0, -2.0f64..2.0), LEN).prop_map(|v| series_from(&v, 0))
}

fn max_diff(a: &PuiseuxSeries, b: &PuiseuxSeries) -> f64 {
    assert_eq!(a.base_exponent(), b.base_exponent());
    a.coeffs()
        .iter()
        .zip(b.coeffs())
        .map(|(x, y)| x.dist(y).to_f64())
        .fold(0.0, f64::max)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn exp_inverts_ln(s in unit_series()) {
        let back = s.ln().unwrap().exp().unwrap();
        prop_assert_eq!(back.trunc_order(), s.trunc_order());
        prop_assert!(max_diff(&back, &s) < 1e-30);
    }

    #[test]
    fn opposite_powers_cancel(s in unit_series(), num in 1i64..7, den in 1i64..4) {
        let prod = s.pow(num, den).unwrap().mul_series(&s.pow(-num, den).unwrap());
        let one = PuiseuxSeries::one(s.trunc_order(), p());
        prop_assert!(max_diff(&prod, &one) < 1e-30);
    }

    #[test]
    fn product_matches_naive_convolution(a in any_series(), b in any_series(), shift in -3i32..3) {
        let a = a.shift(HalfExp::from_halves(shift));
        let prod = a.mul_series(&b);
        prop_assert_eq!(prod.base_exponent(), a.base_exponent() + b.base_exponent());
        for n in 0..LEN {
            let mut want = BigComplex::zero(p());
            for i in 0..=n {
                want = &want + &(&a.coeffs()[i] * &b.coeffs()[n - i]);
            }
            prop_assert!(prod.coeffs()[n].dist(&want) < 1e-35);
        }
    }

    #[test]
    fn product_never_claims_more_than_its_inputs(a in any_series(), cut in 1usize..LEN) {
        let short = a.truncate(HalfExp::from_halves(cut as i32));
        let prod = a.mul_series(&short);
        prop_assert!(prod.trunc_order() <= short.trunc_order());
    }
}

/// Error of a truncated `exp(tau/2)` against the function, at `tau` and `tau/2`.
#[test]
fn truncation_error_shrinks_at_the_predicted_rate() {
    let mut c = vec![(0.0, 0.0); 10];
    c[2] = (0.5, 0.0);
    let x = series_from(&c, 0);
    assert_eq!(x.trunc_order(), HalfExp::int(5));
    let e = x.exp().unwrap();
    let err = |tau: f64| {
        let v = e.evaluate(&BigComplex::from_f64(tau, 0.0, p()).unwrap());
        let exact = Float::with_val(p().bits(), tau / 2.0).exp();
        v.dist(&BigComplex::from_real(&exact)).to_f64()
    };
    let ratio = err(0.02) / err(0.01);
    let predicted = 2f64.powi(5);
    assert!((ratio / predicted - 1.0).abs() < 0.2, "ratio {ratio}");
}

#[test]
fn q2_squared_leading_terms() {
    let q = normalized_saddle_series(Which::Q2, 8, p()).unwrap();
    let sq = q.mul_series(&q);
    let c1 = sq.coeff(HalfExp::int(1)).unwrap();
    assert!(c1.dist(&BigComplex::from_f64(0.5, 0.0, p()).unwrap()) < 1e-35);
    // (1 + x/4 + c2 x^2)^2 has x^2 coefficient 2 c2 + 1/16
    let c2 = q.coeff(HalfExp::int(2)).unwrap();
    let want = c2.mul_int(2).add_real(&Float::with_val(p().bits(), 0.0625));
    assert!(sq.coeff(HalfExp::int(2)).unwrap().dist(&want) < 1e-35);
}

#[test]
fn inverse_square_root_of_a2() {
    let a2 = an_series(Which::Q1, 2, 8, p()).unwrap();
    let r = a2.pow(-1, 2).unwrap();
    let c = r.coeff(HalfExp::int(2)).unwrap();
    let want = BigComplex::from_real(&Float::with_val(p().bits(), -(pi(p()) * 8u32).recip())).mul_i();
    assert!(c.dist(&want) < 1e-35, "{c}");
    assert!(r.coeff(HalfExp::ZERO).unwrap().dist(&BigComplex::one(p())) < 1e-35);
}

#[test]
fn phase_at_q2_imaginary_leading_terms() {
    // phi at the numeric q2 against the leading printed terms
    let tau = Float::with_val(p().bits(), 0.01);
    let set = solve_saddles(&tau, p()).unwrap();
    let v = phi(set.q2().unwrap(), &tau).unwrap();
    let t = 0.01f64;
    let pi = std::f64::consts::PI;
    let lead = pi / t - pi / 8.0 - 47.0 * pi * t / 96.0 - pi * t * t / 8.0;
    assert!((v.im().to_f64() - lead).abs() < 1e-4, "{}", v.im());
}

#[test]
fn q1_series_tracks_root_at_five_hundredths() {
    let order = 16;
    let q = saddle_series(Which::Q1, order, p()).unwrap();
    let tau = Float::with_val(p().bits(), 0.05);
    let set = solve_saddles(&tau, p()).unwrap();
    let v = q.evaluate(&BigComplex::from_real(&tau));
    // the series is relative to tau^-2, known through tau^(order/2 - 2)
    let bound = 10.0 * 0.05f64.powf(order as f64 / 2.0 - 2.0);
    assert!(v.dist(set.q1().unwrap()).to_f64() < bound);
}
