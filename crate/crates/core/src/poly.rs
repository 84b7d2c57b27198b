//! Dense polynomials with [`BigComplex`] coefficients.

use rug::Float;

use crate::bigcomplex::{BigComplex, Precision};
use crate::error::{Error, Result};

/// Coefficients in ascending order: `c[0] + c[1] z + ...`.
#[derive(Clone, Debug, PartialEq)]
pub struct Poly {
    coeffs: Vec<BigComplex>,
}

impl Poly {
    pub fn new(coeffs: Vec<BigComplex>) -> Self {
        Poly { coeffs }
    }

    pub fn coeffs(&self) -> &[BigComplex] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn eval(&self, z: &BigComplex) -> BigComplex {
        let mut acc = BigComplex::zero(z.precision());
        for c in self.coeffs.iter().rev() {
            acc = &acc * z + c;
        }
        acc
    }

    /// Value and first derivative.
    pub fn eval_with_derivative(&self, z: &BigComplex) -> (BigComplex, BigComplex) {
        let mut p = BigComplex::zero(z.precision());
        let mut dp = BigComplex::zero(z.precision());
        for c in self.coeffs.iter().rev() {
            dp = &dp * z + &p;
            p = &p * z + c;
        }
        (p, dp)
    }

    /// All roots by Weierstrass (Durand–Kerner) iteration, each then
    /// Newton-polished. Roots come back in no particular order.
    pub fn roots(&self, prec: Precision) -> Result<Vec<BigComplex>> {
        let n = self.degree();
        let lead = self
            .coeffs
            .last()
            .filter(|c| !c.is_zero())
            .ok_or_else(|| Error::domain("polynomial has a zero leading coefficient"))?
            .with_precision(prec);
        let monic: Vec<BigComplex> = self.coeffs.iter().map(|c| c.with_precision(prec) / &lead).collect();
        let monic = Poly::new(monic);
        // Cauchy bound on the root moduli
        let mut bound = Float::with_val(prec.bits(), 0);
        for c in &monic.coeffs[..n] {
            let a = c.abs();
            if a > bound {
                bound = a;
            }
        }
        bound += 1u32;
        let seed = BigComplex::from_f64(0.4, 0.9, prec)?;
        let mut z: Vec<BigComplex> = (0..n)
            .map(|k| seed.powi(k as i32).mul_real(&bound))
            .collect();
        let tol = Float::with_val(prec.bits(), Float::i_exp(1, -(prec.bits() as i32) + 8));
        let mut converged = false;
        for _ in 0..2000 {
            let mut max_step = Float::with_val(prec.bits(), 0);
            for i in 0..n {
                let mut den = BigComplex::one(prec);
                for (j, zj) in z.iter().enumerate() {
                    if i != j {
                        den = den * (&z[i] - zj);
                    }
                }
                if den.is_zero() {
                    den = BigComplex::from_f64(1e-30, 1e-30, prec)?;
                }
                let step = monic.eval(&z[i]) / den;
                let rel = Float::with_val(prec.bits(), step.abs() / (z[i].abs() + 1u32));
                if rel > max_step {
                    max_step = rel;
                }
                z[i] = &z[i] - &step;
            }
            if max_step < tol {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(Error::Internal("root iteration did not converge".into()));
        }
        z.into_iter().map(|r| monic.newton_polish(r, 60)).collect()
    }

    /// Newton iteration from `z` until the step stops shrinking.
    pub fn newton_polish(&self, mut z: BigComplex, max_iter: usize) -> Result<BigComplex> {
        let bits = z.bits();
        let tiny = Float::with_val(bits, Float::i_exp(1, -(bits as i32) + 4));
        for _ in 0..max_iter {
            let (p, dp) = self.eval_with_derivative(&z);
            if p.is_zero() {
                return Ok(z);
            }
            if dp.is_zero() {
                return Err(Error::Internal("Newton step hit a critical point".into()));
            }
            let step = p / dp;
            z = &z - &step;
            let rel = Float::with_val(bits, step.abs() / (z.abs() + 1u32));
            if rel < tiny {
                break;
            }
        }
        z.check_finite("Newton iterate")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cubic_with_spread_roots() {
        let p = Precision::default();
        let roots = [1.0 / 1024.0, 2.0, -524288.0];
        let c = |x: f64| BigComplex::from_f64(x, 0.0, p).unwrap();
        // (z - r0)(z - r1)(z - r2)
        let poly = Poly::new(vec![
            c(-roots[0] * roots[1] * roots[2]),
            c(roots[0] * roots[1] + roots[0] * roots[2] + roots[1] * roots[2]),
            c(-(roots[0] + roots[1] + roots[2])),
            c(1.0),
        ]);
        let found = poly.roots(p).unwrap();
        for r in roots {
            let best = found
                .iter()
                .map(|z| (z - &c(r)).abs().to_f64() / r.abs())
                .fold(f64::INFINITY, f64::min);
            assert!(best < 1e-40, "root {r}: {best}");
        }
    }
}
