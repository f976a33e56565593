//! Error radii transferring finite spectra to the rotation-algebra operator.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::ApproxError;
use crate::constants::{
    from_f64, pi_lower, pi_upper, sqrt5_upper, sqrt_3pi_upper, sqrt_6pi_upper, sqrt_lower, sqrt_upper, to_f64_down,
    to_f64_up,
};
use crate::contfrac::ContinuedFractionExpansion;
use crate::matmodel::{CanonicalCoefficients, OperatorSpec};

/// Rational upper bound for `|z|` of a complex coefficient.
fn modulus_upper(re: f64, im: f64) -> BigRational {
    if im == 0.0 || re == 0.0 {
        return from_f64(re.abs().max(im.abs()));
    }
    // hypot is faithfully rounded; one ulp up covers it
    from_f64(re.hypot(im).next_up())
}

fn canonical(spec: &OperatorSpec) -> Result<&CanonicalCoefficients, ApproxError> {
    spec.canonical_coefficients().ok_or(ApproxError::NonCanonicalSpec)
}

/// Upper bound for `M = max |α±1|, |β±1|` as a rational.
pub fn coefficient_bound_upper(spec: &OperatorSpec) -> Result<BigRational, ApproxError> {
    let c = canonical(spec)?;
    Ok([c.alpha_plus, c.alpha_minus, c.beta_plus, c.beta_minus]
        .iter()
        .map(|z| modulus_upper(z.re, z.im))
        .fold(BigRational::zero(), |m, x| if x > m { x } else { m }))
}

fn inverse_q(exp: &ContinuedFractionExpansion, k: usize) -> Result<BigRational, ApproxError> {
    let q = exp.q(k).map_err(|_| ApproxError::IndexOutOfRange { index: k, available: exp.len() })?;
    Ok(BigRational::new(BigInt::one(), q.clone()))
}

fn require_level(n: usize) -> Result<(), ApproxError> {
    if n == 0 {
        Err(ApproxError::InvalidInput("level n must be at least 1".into()))
    } else {
        Ok(())
    }
}

/// The bound the two-sided estimate is derived from, before majorization:
///
/// `(|α₁|+|α₋₁|)·[2π(1/q_{n−1} + 1/q_n) + π(5+√5)/q_{n+1}]
///  + (|β₁|+|β₋₁|)·[π/q_{n−1} + 5π/q_n + (5π(5+√5)/2)/q_{n+1}]`
///
/// rounded outward. `π(5+√5) = 4π√5/(√5−1)` is the Fibonacci tail constant
/// times `2π`. Needs `q_{n+1}`, so `n + 1` partial quotients.
pub fn sharp_bound_exact(spec: &OperatorSpec, exp: &ContinuedFractionExpansion, n: usize) -> Result<BigRational, ApproxError> {
    require_level(n)?;
    let c = canonical(spec)?;
    let (x, y, z) = (inverse_q(exp, n - 1)?, inverse_q(exp, n)?, inverse_q(exp, n + 1)?);
    let a = modulus_upper(c.alpha_plus.re, c.alpha_plus.im) + modulus_upper(c.alpha_minus.re, c.alpha_minus.im);
    let b = modulus_upper(c.beta_plus.re, c.beta_plus.im) + modulus_upper(c.beta_minus.re, c.beta_minus.im);
    let pi = pi_upper();
    let int = |k: i64| BigRational::from_integer(BigInt::from(k));
    let tail = &pi * (int(5) + sqrt5_upper());
    let u_part = &int(2) * &pi * (&x + &y) + &tail * &z;
    let v_part = &pi * &x + &int(5) * &pi * &y + &tail * int(5) / int(2) * &z;
    Ok(a * u_part + b * v_part)
}

pub fn sharp_bound(spec: &OperatorSpec, exp: &ContinuedFractionExpansion, n: usize) -> Result<f64, ApproxError> {
    Ok(to_f64_up(&sharp_bound_exact(spec, exp, n)?))
}

/// `204·M·(1/q_{n−1} + 1/q_n)` rounded outward.
pub fn clean_bound_exact(spec: &OperatorSpec, exp: &ContinuedFractionExpansion, n: usize) -> Result<BigRational, ApproxError> {
    require_level(n)?;
    let m = coefficient_bound_upper(spec)?;
    Ok(BigRational::from_integer(BigInt::from(204)) * m * (inverse_q(exp, n - 1)? + inverse_q(exp, n)?))
}

/// [`clean_bound_exact`] as `f64`; when `q_{n+1}` is available it also checks
/// that the sharp bound does not exceed it.
pub fn clean_bound(spec: &OperatorSpec, exp: &ContinuedFractionExpansion, n: usize) -> Result<f64, ApproxError> {
    let clean = clean_bound_exact(spec, exp, n)?;
    if n < exp.len() {
        let sharp = sharp_bound_exact(spec, exp, n)?;
        if sharp > clean {
            return Err(ApproxError::BoundOrder { sharp: to_f64_up(&sharp), clean: to_f64_up(&clean) });
        }
    }
    Ok(to_f64_up(&clean))
}

/// Upper enclosure of `C₁ = 36·M·√(3π)`.
pub fn one_sided_constant(spec: &OperatorSpec) -> Result<f64, ApproxError> {
    Ok(to_f64_up(&one_sided_constant_exact(spec)?))
}

fn one_sided_constant_exact(spec: &OperatorSpec) -> Result<BigRational, ApproxError> {
    Ok(BigRational::from_integer(BigInt::from(36)) * coefficient_bound_upper(spec)? * sqrt_3pi_upper())
}

/// `C₁/√n`, rounded outward.
pub fn one_sided_radius(spec: &OperatorSpec, n: u64) -> Result<f64, ApproxError> {
    if n == 0 {
        return Err(ApproxError::InvalidInput("denominator n must be at least 1".into()));
    }
    let root = sqrt_lower(&BigRational::from_integer(BigInt::from(n)));
    Ok(to_f64_up(&(one_sided_constant_exact(spec)? / root)))
}

/// `9·√(6π·|θ − θ′|)`, rounded outward.
pub fn haagerup_rordam_bound(theta: f64, theta_prime: f64) -> Result<f64, ApproxError> {
    for t in [theta, theta_prime] {
        if !(0.0..1.0).contains(&t) {
            return Err(ApproxError::InvalidInput(format!("rotation parameter {t} is not in [0, 1)")));
        }
    }
    let diff = from_f64(theta) - from_f64(theta_prime);
    let diff = if diff < BigRational::zero() { -diff } else { diff };
    if diff.is_zero() {
        return Ok(0.0);
    }
    // √(6π|Δ|) ≤ √(6π)_up · √|Δ|_up
    let bound = BigRational::from_integer(BigInt::from(9)) * sqrt_6pi_upper() * sqrt_upper(&diff);
    Ok(to_f64_up(&bound))
}

/// `(Σ|c_jk|)·9√(6π|θ − θ′|)`: how far the spectrum of a four-term
/// operator can move between the two parameters, via the triangle
/// inequality over its terms.
pub fn spectral_variation_bound(spec: &OperatorSpec, theta: f64, theta_prime: f64) -> Result<f64, ApproxError> {
    let c = canonical(spec)?;
    let weight = [c.alpha_plus, c.alpha_minus, c.beta_plus, c.beta_minus]
        .iter()
        .map(|z| modulus_upper(z.re, z.im))
        .fold(BigRational::zero(), |s, x| s + x);
    let g = haagerup_rordam_bound(theta, theta_prime)?;
    Ok(to_f64_up(&(weight * from_f64(g))))
}

/// `π/(2(q_{n−1} + q_n))`, rounded down: the smallest possible Hausdorff
/// distance between `q_{n−1} + q_n` points and the unit circle.
pub fn sharpness_floor(q_prev: u64, q_n: u64) -> f64 {
    let denom = BigRational::from_integer(BigInt::from(2) * (BigInt::from(q_prev) + BigInt::from(q_n)));
    to_f64_down(&(pi_lower() / denom))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::contfrac::{expand, RealNumberInput};
    use num_complex::Complex64;

    fn golden(terms: usize) -> ContinuedFractionExpansion {
        expand(&RealNumberInput::golden(), terms).unwrap()
    }

    #[test]
    fn sharp_examples() {
        let e = golden(20);
        let am = OperatorSpec::almost_mathieu(1.0);
        assert!((sharp_bound(&am, &e, 5).unwrap() - 21.50).abs() < 0.01);
        let u_only = OperatorSpec::canonical_real(1.0, 0.0, 0.0, 0.0);
        assert!((sharp_bound(&u_only, &e, 5).unwrap() - 3.790).abs() < 0.001);
        let zero = OperatorSpec::canonical_real(0.0, 0.0, 0.0, 0.0);
        assert_eq!(sharp_bound(&zero, &e, 5).unwrap(), 0.0);
    }

    #[test]
    fn sharp_by_hand() {
        // direct f64 evaluation of the formula at n = 5 (5, 8, 13)
        let pi = std::f64::consts::PI;
        let t = pi * (5.0 + 5f64.sqrt());
        let u = 2.0 * pi * (1.0 / 5.0 + 1.0 / 8.0) + t / 13.0;
        let v = pi / 5.0 + 5.0 * pi / 8.0 + 2.5 * t / 13.0;
        let got = sharp_bound(&OperatorSpec::almost_mathieu(1.0), &golden(10), 5).unwrap();
        assert!(got >= 2.0 * (u + v) && got - 2.0 * (u + v) < 1e-12);
        let c = OperatorSpec::canonical(Complex64::new(0.3, 0.4), Complex64::new(0.0, 1.0), Complex64::new(-2.0, 0.0), Complex64::new(0.0, 0.0));
        let got = sharp_bound(&c, &golden(10), 5).unwrap();
        assert!((got - (1.5 * u + 2.0 * v)).abs() < 1e-12);
    }

    #[test]
    fn clean_examples() {
        let e = golden(20);
        let am = OperatorSpec::almost_mathieu(1.0);
        let b = clean_bound(&am, &e, 10).unwrap();
        assert!((b - 204.0 * (1.0 / 55.0 + 1.0 / 89.0)).abs() < 1e-12);
        assert!((b - 6.001).abs() < 0.001);
        let zero = OperatorSpec::canonical_real(0.0, 0.0, 0.0, 0.0);
        assert_eq!(clean_bound(&zero, &e, 10).unwrap(), 0.0);
        // q₀ = q₁ = 1 for golden θ
        assert_eq!(clean_bound(&am, &e, 1).unwrap(), 408.0);
    }

    #[test]
    fn index_and_spec_errors() {
        let e = golden(6);
        let am = OperatorSpec::almost_mathieu(1.0);
        assert!(matches!(sharp_bound(&am, &e, 6), Err(ApproxError::IndexOutOfRange { .. })));
        assert!(clean_bound(&am, &e, 6).is_ok());
        assert!(matches!(clean_bound(&am, &e, 7), Err(ApproxError::IndexOutOfRange { .. })));
        assert!(matches!(clean_bound(&am, &e, 0), Err(ApproxError::InvalidInput(_))));
        let general = OperatorSpec::from_terms(vec![crate::matmodel::Term { u: 1, v: 1, coeff: Complex64::new(1.0, 0.0) }]);
        assert!(matches!(sharp_bound(&general, &e, 3), Err(ApproxError::NonCanonicalSpec)));
    }

    #[test]
    fn one_sided_constants() {
        let am = OperatorSpec::almost_mathieu(1.0);
        let c1 = one_sided_constant(&am).unwrap();
        // 36√(3π) = 110.51928…
        assert!((c1 - 110.519284).abs() < 5e-6);
        assert!((c1 - 36.0 * (3.0 * std::f64::consts::PI).sqrt()).abs() < 1e-12);
        assert!((one_sided_radius(&am, 10).unwrap() - 34.949).abs() < 0.001);
        assert!((one_sided_radius(&am, 100).unwrap() - 11.05).abs() < 0.01);
        assert!((one_sided_radius(&am, 1000).unwrap() - 3.50).abs() < 0.01);
        assert_eq!(one_sided_radius(&am, 1).unwrap(), c1);
        let zero = OperatorSpec::canonical_real(0.0, 0.0, 0.0, 0.0);
        assert_eq!(one_sided_radius(&zero, 10).unwrap(), 0.0);
    }

    #[test]
    fn haagerup_rordam_examples() {
        assert_eq!(haagerup_rordam_bound(0.3, 0.3).unwrap(), 0.0);
        let b = haagerup_rordam_bound(0.51, 0.5).unwrap();
        // 9√(0.06π) = 3.90745…
        assert!((b - 3.90745).abs() < 1e-5);
        let b = haagerup_rordam_bound(0.5 + 1.0 / 100.0, 0.5).unwrap();
        assert!((b - 9.0 * (3.0 * std::f64::consts::PI / 50.0).sqrt()).abs() < 1e-6);
        assert!(haagerup_rordam_bound(1.0, 0.5).is_err());
        let am = OperatorSpec::almost_mathieu(1.0);
        let v = spectral_variation_bound(&am, 0.51, 0.5).unwrap();
        assert!((v - 4.0 * b).abs() < 1e-6);
    }

    #[test]
    fn floor_value() {
        assert!((sharpness_floor(5, 8) - std::f64::consts::PI / 26.0).abs() < 1e-15);
        assert!(sharpness_floor(5, 8) <= std::f64::consts::PI / 26.0);
    }
}
