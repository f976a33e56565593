use std::cmp::Ordering;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::{ContFracError, ContinuedFractionExpansion, QuadraticValue, RealNumberInput, Result};
use crate::constants;

/// `|θ − p_n/q_n|`, exact or enclosed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GapValue {
    Exact(QuadraticValue),
    /// Decimal inputs: the gap lies in `[lo, hi]`.
    Enclosure { lo: BigRational, hi: BigRational },
}

impl GapValue {
    pub fn to_f64(&self) -> f64 {
        match self {
            GapValue::Exact(v) => v.to_f64(),
            GapValue::Enclosure { lo, hi } => {
                ((lo + hi) / BigRational::from_integer(2.into())).to_f64().unwrap_or(f64::NAN)
            }
        }
    }

    /// Strict `gap < r`, certified; an enclosure counts only if its upper end does.
    fn certainly_below(&self, r: &BigRational) -> bool {
        match self {
            GapValue::Exact(v) => v.cmp_rational(r) == Ordering::Less,
            GapValue::Enclosure { hi, .. } => hi < r,
        }
    }
}

#[derive(Clone, Debug)]
pub struct ConvergentGap {
    pub n: usize,
    pub gap: GapValue,
    /// `1/(q_n q_{n+1})`.
    pub bound: BigRational,
    /// `1/q_n²`.
    pub square_bound: BigRational,
    /// `gap < bound < square_bound`, decided exactly.
    pub holds: bool,
}

fn require(exp: &ContinuedFractionExpansion, index: usize) -> Result<()> {
    if index > exp.len() {
        Err(ContFracError::IndexOutOfRange { index, available: exp.len() })
    } else {
        Ok(())
    }
}

fn abs_distance(theta: &RealNumberInput, r: &BigRational) -> GapValue {
    match theta.exact_value() {
        Some(v) => GapValue::Exact(v.sub_rational(r).abs()),
        None => {
            let RealNumberInput::Decimal(d) = theta else { unreachable!() };
            let (lo, hi) = d.enclosure();
            let (a, b) = (lo - r, hi - r);
            let (a_abs, b_abs) = (a.abs(), b.abs());
            let upper = a_abs.clone().max(b_abs.clone());
            let lower = if a.is_negative() != b.is_negative() && !a.is_zero() && !b.is_zero() {
                BigRational::zero()
            } else {
                a_abs.min(b_abs)
            };
            GapValue::Enclosure { lo: lower, hi: upper }
        }
    }
}

/// The convergent error `|θ − p_n/q_n|` against `1/(q_n q_{n+1}) < 1/q_n²`.
///
/// Requires `1 <= n` and `n + 1 <= N`. For a terminating rational expansion
/// the last step is an equality, so `holds` is false there.
pub fn convergent_gap(exp: &ContinuedFractionExpansion, n: usize) -> Result<ConvergentGap> {
    if n == 0 {
        return Err(ContFracError::IndexOutOfRange { index: 0, available: exp.len() });
    }
    require(exp, n + 1)?;
    let (p, q) = exp.convergent(n)?;
    let q_next = exp.q(n + 1)?;
    let gap = abs_distance(exp.theta(), &BigRational::new(p.clone(), q.clone()));
    let bound = BigRational::new(BigInt::one(), q * q_next);
    let square_bound = BigRational::new(BigInt::one(), q * q);
    let holds = gap.certainly_below(&bound) && bound < square_bound;
    Ok(ConvergentGap { n, gap, bound, square_bound, holds })
}

/// Upper bound `(1/q_n)·2√5/(√5 − 1)` on `Σ_{k≥0} 1/q_{n+k}`, with the constant
/// rounded up.
pub fn tail_sum_bound(exp: &ContinuedFractionExpansion, n: usize) -> Result<BigRational> {
    if n == 0 {
        return Err(ContFracError::IndexOutOfRange { index: 0, available: exp.len() });
    }
    require(exp, n)?;
    let q = exp.q(n)?;
    Ok(constants::fibonacci_sum_constant_upper() / BigRational::from_integer(q.clone()))
}

/// Fibonacci numbers with `F(0) = F(1) = 1`.
pub fn fibonacci(k: usize) -> BigInt {
    let (mut a, mut b) = (BigInt::one(), BigInt::one());
    for _ in 0..k {
        let next = &a + &b;
        a = std::mem::replace(&mut b, next);
    }
    a
}

/// `q_{n+k} >= F(k)·q_n`.
pub fn fibonacci_growth_check(exp: &ContinuedFractionExpansion, n: usize, k: usize) -> Result<bool> {
    if n == 0 {
        return Err(ContFracError::IndexOutOfRange { index: 0, available: exp.len() });
    }
    require(exp, n + k)?;
    Ok(*exp.q(n + k)? >= fibonacci(k) * exp.q(n)?)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Membership {
    Yes(usize),
    No,
}

fn validate_fraction(p: &BigInt, q: &BigInt) -> Result<()> {
    if !p.is_positive() || p >= q {
        return Err(ContFracError::InvalidInput(format!("need 0 < p < q, got {p}/{q}")));
    }
    Ok(())
}

/// Exact membership of `p/q` in the convergent list.
pub fn is_convergent(p: &BigInt, q: &BigInt, exp: &ContinuedFractionExpansion) -> Result<Membership> {
    validate_fraction(p, q)?;
    if !p.gcd(q).is_one() {
        return Err(ContFracError::InvalidInput(format!("{p}/{q} is not reduced")));
    }
    for (k, (pk, qk)) in exp.convergents().iter().enumerate().skip(1) {
        match qk.cmp(q) {
            Ordering::Less => continue,
            Ordering::Equal if pk == p => return Ok(Membership::Yes(k)),
            _ => return Ok(Membership::No),
        }
    }
    if exp.is_terminated() {
        return Ok(Membership::No);
    }
    let reached = exp.convergents().last().map(|c| c.1.clone()).unwrap_or_default();
    Err(ContFracError::InsufficientTerms { reached, needed: q.clone() })
}

/// `|θ − p/q| < 1/(2q²)`, the classical sufficient condition for `p/q` to be a
/// convergent. Decimal enclosures answer true only when the whole enclosure
/// satisfies it.
pub fn sufficient_condition_check(p: &BigInt, q: &BigInt, theta: &RealNumberInput) -> Result<bool> {
    validate_fraction(p, q)?;
    let gap = abs_distance(theta, &BigRational::new(p.clone(), q.clone()));
    let limit = BigRational::new(BigInt::one(), BigInt::from(2) * q * q);
    Ok(gap.certainly_below(&limit))
}
