use naive_integral::reference::{RAMIFICATION, RHO3_MODULUS};
use naive_integral::saddle::{ramification_points, saddle_polynomial, solve_saddles, verify_localizations};
use naive_integral::{BigComplex, Precision, Which};
use rug::Float;

fn p() -> Precision {
    Precision::new(50).unwrap()
}

fn tau(x: f64) -> Float {
    Float::with_val(p().bits(), x)
}

fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|k| (lo.ln() + (hi.ln() - lo.ln()) * (k + 1) as f64 / n as f64).exp())
        .collect()
}

#[test]
fn localizations_hold_on_a_log_grid() {
    for t in log_grid(1e-3, 0.25, 50) {
        let r = verify_localizations(&tau(t), p()).unwrap();
        assert!(r.all_pass(), "tau = {t}: {r:?}");
        let set = solve_saddles(&tau(t), p()).unwrap();
        assert!(set.max_residual() < 1e-40, "tau = {t}");
    }
}

#[test]
fn labels_move_continuously() {
    let grid = log_grid(1e-3, 0.25, 50);
    let sets: Vec<_> = grid.iter().map(|&t| solve_saddles(&tau(t), p()).unwrap()).collect();
    for w in sets.windows(2) {
        for which in [Which::Q1, Which::Q2, Which::Q3] {
            let a = w[0].get(which).unwrap();
            let b = w[1].get(which).unwrap();
            // nearest neighbour of each labeled root in the next set is the same label
            let nearest = [Which::Q1, Which::Q2, Which::Q3]
                .into_iter()
                .min_by(|x, y| {
                    let dx = a.dist(w[1].get(*x).unwrap());
                    let dy = a.dist(w[1].get(*y).unwrap());
                    dx.partial_cmp(&dy).unwrap()
                })
                .unwrap();
            assert_eq!(nearest, which, "label swap near tau = {}", w[0].tau.to_f64());
            assert!(a.dist(b) < a.abs() * 0.3 + 0.05);
        }
    }
}

#[test]
fn residual_shrinks_with_precision() {
    let t = 0.1;
    let low = Precision::new(40).unwrap();
    let high = Precision::new(80).unwrap();
    let a = solve_saddles(&Float::with_val(high.bits(), t), low).unwrap();
    let b = solve_saddles(&Float::with_val(high.bits(), t), high).unwrap();
    let ra = a.max_residual().to_f64().max(1e-300).log10();
    let rb = b.max_residual().to_f64().max(1e-300).log10();
    assert!(ra - rb >= 10.0, "{ra} vs {rb}");
}

#[test]
fn residuals_at_one_tenth() {
    let t = tau(0.1);
    let set = solve_saddles(&t, p()).unwrap();
    let poly = saddle_polynomial(&set.tau, set.precision);
    for r in &set.roots {
        assert!(poly.eval(&r.z).abs() < 1e-40);
    }
    let q2 = set.q2().unwrap();
    assert!(q2.dist(&BigComplex::from_f64(0.0, 0.05, p()).unwrap()) < 0.01);
}

#[test]
fn q3_mirrors_q2() {
    for t in [0.01, 0.1] {
        let set = solve_saddles(&tau(t), p()).unwrap();
        let q2 = set.q2().unwrap();
        let q3 = set.q3().unwrap();
        // q3 = -i tau/2 + O(tau^2): both conj(q2) and -q2 agree at first order
        assert!(q2.conj().dist(q3).to_f64() < t * t);
        assert!((q2 + q3).abs().to_f64() < t * t);
    }
}

#[test]
fn localization_examples() {
    let r = verify_localizations(&tau(0.01), p()).unwrap();
    // dominated by i tau^2/8, so the ratio is close to tau/8
    assert!((r.q2_offset_ratio - 0.00125).abs() < 0.0002, "{}", r.q2_offset_ratio);
    let r = verify_localizations(&tau(0.2), p()).unwrap();
    assert!(r.q1_pass && r.q1_offset <= r.q1_bound);
    let r = verify_localizations(&tau(0.25), p()).unwrap();
    assert!(r.q2_minus_pass);
}

#[test]
fn ramification_points_match_printed() {
    let r = ramification_points(p()).unwrap();
    for (root, (re, im)) in r.principal().iter().zip(RAMIFICATION) {
        let (x, y) = root.to_f64_pair();
        // six significant digits in each printed part
        let tol = |v: f64| 0.5 * 10f64.powi(v.abs().log10().floor() as i32 - 5);
        assert!((x - re).abs() <= tol(re), "{x} vs {re}");
        assert!((y - im).abs() <= tol(im), "{y} vs {im}");
    }
    let m = r.principal()[2].abs().to_f64();
    assert!((m - RHO3_MODULUS).abs() < 5e-7, "{m}");
    for k in 0..3 {
        assert!((&r.roots[k] + &r.roots[k + 3]).abs() < 1e-45);
    }
    for res in &r.residuals {
        assert!(*res < 1e-40);
    }
}
