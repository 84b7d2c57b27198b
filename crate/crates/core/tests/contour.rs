use naive_integral::contour::{build_path, eval_components, integrand, integrate_segment, PathVariant};
use naive_integral::reference::{T1000, TAU_HUNDREDTH};
use naive_integral::{BigComplex, Precision};
use rug::Float;

fn p() -> Precision {
    Precision::new(50).unwrap()
}

fn tau(x: &str) -> Float {
    Float::with_val(p().bits(), Float::parse(x).unwrap())
}

fn tau_of_t(t: u32) -> Float {
    let two_pi = Float::with_val(p().bits(), rug::float::Constant::Pi) * 2u32;
    Float::with_val(p().bits(), two_pi / t).sqrt()
}

#[test]
fn path_geometry() {
    let t = tau("0.05");
    let path = build_path(&t, p(), PathVariant::Quarter).unwrap();
    assert_eq!(path.nodes.len(), 6);
    assert!(path.nodes[0].is_zero());
    for z in &path.nodes[1..] {
        assert!(*z.im() > 0);
    }
    let q1 = path.saddles.q1().unwrap();
    let q2 = path.saddles.q2().unwrap();
    // each saddle sits at the midpoint of its segment
    let mid = |a: &BigComplex, b: &BigComplex| (a + b).div_int(2);
    assert!(mid(&path.nodes[1], &path.nodes[2]).dist(q2) < 1e-45);
    assert!(mid(&path.nodes[3], &path.nodes[4]).dist(q1) < 1e-40);
    // q2 segment has length tau/2, q1 segment tau^-2
    let len = |k: usize| path.nodes[k + 1].dist(&path.nodes[k]).to_f64();
    assert!((len(1) - 0.025).abs() < 1e-15);
    assert!((len(3) - 400.0).abs() < 1e-10);
    // the last segment is horizontal
    assert!((path.nodes[5].im() - path.nodes[4].im().clone()).abs() < 1e-40);
    assert!(path.t_len > 0);

    let half = build_path(&t, p(), PathVariant::Half).unwrap();
    assert!(half.nodes[2].dist(q2).to_f64() > 0.024);
    assert!(half.nodes[1].dist(&path.nodes[1]) < 1e-45);
}

#[test]
fn tau_outside_the_range_is_rejected() {
    assert!(build_path(&tau("0.3"), p(), PathVariant::Quarter).is_err());
    assert!(build_path(&tau("0"), p(), PathVariant::Quarter).is_err());
    assert!(eval_components(&tau("-0.1"), p(), PathVariant::Quarter).is_err());
}

#[test]
fn splitting_a_segment_is_additive() {
    let t = tau("0.1");
    let path = build_path(&t, p(), PathVariant::Quarter).unwrap();
    for k in [0, 2] {
        let (a, b) = path.segment(k);
        let m = (a + &b.mul_int(2)).div_int(3);
        let whole = integrate_segment(a, b, &t, p()).unwrap();
        let left = integrate_segment(a, &m, &t, p()).unwrap();
        let right = integrate_segment(&m, b, &t, p()).unwrap();
        let d = whole.value.dist(&(&left.value + &right.value));
        assert!(d.to_f64() < 1e-40 * whole.value.abs().to_f64().max(1.0), "segment {k}: {d}");
    }
}

#[test]
fn reversing_a_segment_flips_the_sign() {
    let t = tau("0.1");
    let path = build_path(&t, p(), PathVariant::Quarter).unwrap();
    let (a, b) = path.segment(1);
    let f = integrate_segment(a, b, &t, p()).unwrap();
    let r = integrate_segment(b, a, &t, p()).unwrap();
    assert!((&f.value + &r.value).abs() < 1e-40);
}

#[test]
fn components_at_t_1000() {
    let c = eval_components(&tau_of_t(1000), p(), PathVariant::Quarter).unwrap();
    for (k, part) in c.parts.iter().enumerate() {
        let want = T1000[k + 1].value(p()).unwrap();
        let digits = part.value.agreeing_digits(&want);
        // J5 is printed to 25 digits but is itself only 1e-20
        let need = if k == 4 { 5.0 } else { 15.0 };
        assert!(digits >= need, "J{}: {digits} digits", k + 1);
        assert!(part.error_estimate < 1e-40 * part.value.abs().to_f64().max(1e-30));
    }
    let j0 = T1000[0].value(p()).unwrap();
    assert!(c.total.value.agreeing_digits(&j0) >= 15.0);
}

#[test]
fn half_offset_gives_the_wrong_components_at_t_1000() {
    let c = eval_components(&tau_of_t(1000), p(), PathVariant::Half).unwrap();
    let j2 = &c.parts[1].value;
    let (re, _) = j2.to_f64_pair();
    assert!((re - 78.3447).abs() < 1e-3, "{j2}");
    assert!(j2.dist(&T1000[2].value(p()).unwrap()).to_f64() > 0.1);
    // J2 + J3 is the same on both paths: only where q2+ sits changes
    let q = eval_components(&tau_of_t(1000), p(), PathVariant::Quarter).unwrap();
    let s_half = &c.parts[1].value + &c.parts[2].value;
    let s_quarter = &q.parts[1].value + &q.parts[2].value;
    assert!(s_half.dist(&s_quarter) < 1e-30);
}

#[test]
fn components_at_one_hundredth() {
    let c = eval_components(&tau("0.01"), p(), PathVariant::Quarter).unwrap();
    for k in [1, 3] {
        let want = TAU_HUNDREDTH[k + 1].value(p()).unwrap();
        assert!(c.parts[k].value.agreeing_digits(&want) >= 15.0, "J{}", k + 1);
    }
    // J1 and J3 are exponentially small next to J2 and J4
    assert!(c.parts[0].value.abs() < 1e-18);
    assert!(c.parts[2].value.abs() < 1e-10);
    let l = c.parts[4].value.log10_abs();
    assert!((l + 1336.13).abs() < 0.5, "{l}");
}

#[test]
fn integrand_vanishes_at_the_start_of_the_path() {
    // along 0 -> q2- the direction has positive real part, so Re(-pi/(4z)) -> -inf
    let t = tau("0.1");
    let path = build_path(&t, p(), PathVariant::Quarter).unwrap();
    let dir = path.nodes[1].div_real(&path.nodes[1].abs());
    assert!(*dir.re() > 0.1);
    let z = dir.div_int(1000);
    assert!(integrand(&z, &t).unwrap().abs() < 1e-100);
}
