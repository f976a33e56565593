//! Outward-rounded rational enclosures of the irrational constants that enter
//! the certified bounds.
//!
//! Every constant is held at 30 significant digits. Upper bounds round toward
//! +∞ and lower bounds toward −∞, so a bound assembled from `*_upper` values
//! stays a true upper bound after the final conversion to `f64`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Significant digits carried by every constant enclosure.
pub const SIGNIFICANT_DIGITS: u32 = 30;

// 50 correct decimals, truncated.
const PI_DIGITS: &str = "314159265358979323846264338327950288419716939937510";

fn pow10(k: u32) -> BigInt {
    BigInt::from(10u32).pow(k)
}

/// Number of decimal digits in the integer part of a positive rational (at least 1).
fn int_digits(r: &BigRational) -> u32 {
    let int = r.to_integer().abs();
    if int.is_zero() {
        1
    } else {
        int.to_string().len() as u32
    }
}

/// Round a positive rational up to `digits` significant digits.
pub fn round_up(r: &BigRational, digits: u32) -> BigRational {
    let frac = digits.saturating_sub(int_digits(r));
    let scale = pow10(frac);
    let scaled = r * BigRational::from_integer(scale.clone());
    BigRational::new(scaled.ceil().to_integer(), scale)
}

/// Round a positive rational down to `digits` significant digits.
pub fn round_down(r: &BigRational, digits: u32) -> BigRational {
    let frac = digits.saturating_sub(int_digits(r));
    let scale = pow10(frac);
    let scaled = r * BigRational::from_integer(scale.clone());
    BigRational::new(scaled.floor().to_integer(), scale)
}

/// Upper enclosure of `sqrt(r)` at 30 significant digits, for `r >= 0`.
pub fn sqrt_upper(r: &BigRational) -> BigRational {
    let k = SIGNIFICANT_DIGITS;
    let n = (r * BigRational::from_integer(pow10(2 * k))).floor().to_integer();
    let root = n.sqrt() + BigInt::one();
    round_up(&BigRational::new(root, pow10(k)), k)
}

/// Lower enclosure of `sqrt(r)` at 30 significant digits, for `r >= 0`.
pub fn sqrt_lower(r: &BigRational) -> BigRational {
    let k = SIGNIFICANT_DIGITS;
    let n = (r * BigRational::from_integer(pow10(2 * k))).floor().to_integer();
    round_down(&BigRational::new(n.sqrt(), pow10(k)), k)
}

pub fn pi_lower() -> BigRational {
    let n: BigInt = PI_DIGITS.parse().expect("static digits");
    round_down(
        &BigRational::new(n, pow10(PI_DIGITS.len() as u32 - 1)),
        SIGNIFICANT_DIGITS,
    )
}

pub fn pi_upper() -> BigRational {
    let n: BigInt = PI_DIGITS.parse().expect("static digits");
    let truncated = BigRational::new(n + BigInt::one(), pow10(PI_DIGITS.len() as u32 - 1));
    round_up(&truncated, SIGNIFICANT_DIGITS)
}

pub fn sqrt5_upper() -> BigRational {
    sqrt_upper(&BigRational::from_integer(5.into()))
}

pub fn sqrt5_lower() -> BigRational {
    sqrt_lower(&BigRational::from_integer(5.into()))
}

/// Upper enclosure of `2√5/(√5 − 1)`, the Fibonacci reciprocal-sum constant.
///
/// Evaluated through the identity `2√5/(√5 − 1) = (5 + √5)/2`, which is
/// increasing in `√5`.
pub fn fibonacci_sum_constant_upper() -> BigRational {
    let two = BigRational::from_integer(2.into());
    let five = BigRational::from_integer(5.into());
    round_up(&((five + sqrt5_upper()) / two), SIGNIFICANT_DIGITS)
}

pub fn fibonacci_sum_constant_lower() -> BigRational {
    let two = BigRational::from_integer(2.into());
    let five = BigRational::from_integer(5.into());
    round_down(&((five + sqrt5_lower()) / two), SIGNIFICANT_DIGITS)
}

/// Upper enclosure of `14π(3√5 − 1)/(√5 − 1) = 7π(7 + √5)`, the constant the
/// clean two-sided bound majorizes by 204.
pub fn clean_majorant_upper() -> BigRational {
    let seven = BigRational::from_integer(7.into());
    round_up(
        &(seven.clone() * pi_upper() * (seven + sqrt5_upper())),
        SIGNIFICANT_DIGITS,
    )
}

/// Upper enclosure of `√(3π)`.
pub fn sqrt_3pi_upper() -> BigRational {
    sqrt_upper(&(BigRational::from_integer(3.into()) * pi_upper()))
}

/// Upper enclosure of `√(6π)`.
pub fn sqrt_6pi_upper() -> BigRational {
    sqrt_upper(&(BigRational::from_integer(6.into()) * pi_upper()))
}

/// Nearest `f64` that is `>=` the rational.
pub fn to_f64_up(r: &BigRational) -> f64 {
    let f = r.to_f64().unwrap_or(f64::INFINITY);
    if !f.is_finite() {
        return f;
    }
    match BigRational::from_float(f) {
        Some(exact) if exact < *r => f.next_up(),
        _ => f,
    }
}

/// Nearest `f64` that is `<=` the rational.
pub fn to_f64_down(r: &BigRational) -> f64 {
    let f = r.to_f64().unwrap_or(f64::NEG_INFINITY);
    if !f.is_finite() {
        return f;
    }
    match BigRational::from_float(f) {
        Some(exact) if exact > *r => f.next_down(),
        _ => f,
    }
}

/// Exact rational of a finite `f64`.
pub fn from_f64(x: f64) -> BigRational {
    BigRational::from_float(x).expect("finite float")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pi_enclosure_brackets_float_pi() {
        let lo = to_f64_down(&pi_lower());
        let hi = to_f64_up(&pi_upper());
        assert!(lo <= std::f64::consts::PI && std::f64::consts::PI <= hi);
        assert!(pi_lower() < pi_upper());
        let width = pi_upper() - pi_lower();
        assert!(width < BigRational::new(1.into(), pow10(28)));
    }

    #[test]
    fn sqrt_enclosures_square_correctly() {
        let five = BigRational::from_integer(5.into());
        let up = sqrt5_upper();
        let lo = sqrt5_lower();
        assert!(&up * &up > five);
        assert!(&lo * &lo < five);
        assert!((up - lo) < BigRational::new(1.into(), pow10(28)));
    }

    #[test]
    fn fibonacci_constant_value() {
        let hi = to_f64_up(&fibonacci_sum_constant_upper());
        let lo = to_f64_down(&fibonacci_sum_constant_lower());
        let direct = 2.0 * 5f64.sqrt() / (5f64.sqrt() - 1.0);
        assert!(lo <= direct + 1e-15 && direct - 1e-15 <= hi);
        assert!((hi - 3.618034).abs() < 5e-7);
    }

    #[test]
    fn clean_majorant_is_below_204() {
        let c = to_f64_up(&clean_majorant_upper());
        assert!((c - 203.10).abs() < 0.02, "{c}");
        assert!(clean_majorant_upper() <= BigRational::from_integer(204.into()));
    }

    #[test]
    fn rounding_is_outward() {
        let third = BigRational::new(1.into(), 3.into());
        assert!(round_up(&third, 5) > third);
        assert!(round_down(&third, 5) < third);
        assert!(to_f64_up(&third) >= 1.0 / 3.0);
        assert!(from_f64(to_f64_up(&third)) >= third);
        assert!(from_f64(to_f64_down(&third)) <= third);
    }
}
