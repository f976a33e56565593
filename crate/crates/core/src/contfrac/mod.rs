//! Continued-fraction expansion of a rotation parameter `θ ∈ (0,1)`.
//!
//! Convention: `θ = 1/(a_1 + 1/(a_2 + …))` with convergents `p_k/q_k`,
//! `p_0 = 0, q_0 = 1, p_1 = 1, q_1 = a_1` and the usual three-term recursion.
//! Everything here is exact integer or rational arithmetic.

mod bounds;
mod quadratic;

pub use bounds::{
    convergent_gap, fibonacci, fibonacci_growth_check, is_convergent, sufficient_condition_check,
    tail_sum_bound, ConvergentGap, GapValue, Membership,
};
pub use quadratic::QuadraticValue;

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ContFracError {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("decimal precision exhausted after {certified} certified partial quotients")]
    PrecisionExhausted { certified: usize },
    #[error("index {index} out of range: expansion has {available} partial quotients")]
    IndexOutOfRange { index: usize, available: usize },
    #[error("expansion only reaches q = {reached}; membership of a denominator {needed} is undecidable")]
    InsufficientTerms { reached: BigInt, needed: BigInt },
}

pub type Result<T> = std::result::Result<T, ContFracError>;

/// A validated quadratic irrational `(a + b√d)/c`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuadraticSurd {
    a: BigInt,
    b: BigInt,
    c: BigInt,
    d: BigInt,
}

impl QuadraticSurd {
    pub fn new(a: BigInt, b: BigInt, c: BigInt, d: BigInt) -> Result<Self> {
        if c.is_zero() {
            return Err(ContFracError::InvalidInput("surd denominator is zero".into()));
        }
        if d < BigInt::from(2) {
            return Err(ContFracError::InvalidInput(format!("radicand {d} must be at least 2")));
        }
        let r = d.sqrt();
        if &r * &r == d {
            return Err(ContFracError::InvalidInput(format!("radicand {d} is a perfect square")));
        }
        if b.is_zero() {
            return Err(ContFracError::InvalidInput("surd has zero irrational part".into()));
        }
        Ok(Self { a, b, c, d })
    }

    pub fn value(&self) -> QuadraticValue {
        QuadraticValue::new(self.a.clone(), self.b.clone(), self.c.clone(), self.d.clone())
    }
}

/// A decimal literal, optionally with an uncertainty of `10^-precision`.
///
/// Without a precision the literal is taken as the exact terminating decimal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecimalString {
    digits: String,
    value: BigRational,
    precision: Option<u32>,
}

impl DecimalString {
    pub fn new(digits: &str, precision: Option<u32>) -> Result<Self> {
        let digits = digits.trim();
        let bad = || ContFracError::InvalidInput(format!("malformed decimal '{digits}'"));
        let (neg, body) = match digits.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, digits.strip_prefix('+').unwrap_or(digits)),
        };
        let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
        if int_part.is_empty() && frac_part.is_empty() {
            return Err(bad());
        }
        if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let mantissa: BigInt = format!("0{int_part}{frac_part}").parse().map_err(|_| bad())?;
        let scale = BigInt::from(10u32).pow(frac_part.len() as u32);
        let mut value = BigRational::new(mantissa, scale);
        if neg {
            value = -value;
        }
        Ok(Self { digits: digits.to_string(), value, precision })
    }

    pub fn value(&self) -> &BigRational {
        &self.value
    }

    pub fn precision(&self) -> Option<u32> {
        self.precision
    }

    /// Closed interval guaranteed to contain the intended real.
    pub fn enclosure(&self) -> (BigRational, BigRational) {
        match self.precision {
            None => (self.value.clone(), self.value.clone()),
            Some(p) => {
                let r = BigRational::new(BigInt::one(), BigInt::from(10u32).pow(p));
                (&self.value - &r, &self.value + &r)
            }
        }
    }
}

/// Exact (or exactly enclosed) real input.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RealNumberInput {
    Rational(BigRational),
    QuadraticSurd(QuadraticSurd),
    Decimal(DecimalString),
}

impl RealNumberInput {
    pub fn rational(numer: impl Into<BigInt>, denom: impl Into<BigInt>) -> Result<Self> {
        let denom = denom.into();
        if denom.is_zero() {
            return Err(ContFracError::InvalidInput("zero denominator".into()));
        }
        Ok(Self::Rational(BigRational::new(numer.into(), denom)))
    }

    pub fn surd(
        a: impl Into<BigInt>,
        b: impl Into<BigInt>,
        c: impl Into<BigInt>,
        d: impl Into<BigInt>,
    ) -> Result<Self> {
        QuadraticSurd::new(a.into(), b.into(), c.into(), d.into()).map(Self::QuadraticSurd)
    }

    pub fn decimal(digits: &str, precision: Option<u32>) -> Result<Self> {
        DecimalString::new(digits, precision).map(Self::Decimal)
    }

    /// `(√5 − 1)/2`.
    pub fn golden() -> Self {
        Self::surd(-1, 1, 2, 5).expect("valid surd")
    }

    /// `√2 − 1`.
    pub fn silver() -> Self {
        Self::surd(-1, 1, 1, 2).expect("valid surd")
    }

    /// The value as an exact quadratic number, when it is known exactly.
    pub fn exact_value(&self) -> Option<QuadraticValue> {
        match self {
            Self::Rational(r) => Some(QuadraticValue::from_rational(r)),
            Self::QuadraticSurd(s) => Some(s.value()),
            Self::Decimal(d) if d.precision.is_none() => Some(QuadraticValue::from_rational(&d.value)),
            Self::Decimal(_) => None,
        }
    }

    /// `Some(true)` for surds, `Some(false)` for rationals, `None` when a
    /// decimal leaves the question open.
    pub fn is_irrational(&self) -> Option<bool> {
        match self {
            Self::Rational(_) => Some(false),
            Self::QuadraticSurd(_) => Some(true),
            Self::Decimal(_) => None,
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Self::Rational(r) => r.to_f64().unwrap_or(f64::NAN),
            Self::QuadraticSurd(s) => s.value().to_f64(),
            Self::Decimal(d) => d.value.to_f64().unwrap_or(f64::NAN),
        }
    }

    /// Exact three-way comparison with a rational, or `None` when a decimal
    /// enclosure straddles it.
    pub fn cmp_rational(&self, r: &BigRational) -> Option<std::cmp::Ordering> {
        if let Some(v) = self.exact_value() {
            return Some(v.cmp_rational(r));
        }
        let Self::Decimal(d) = self else { unreachable!() };
        let (lo, hi) = d.enclosure();
        if hi < *r {
            Some(std::cmp::Ordering::Less)
        } else if lo > *r {
            Some(std::cmp::Ordering::Greater)
        } else {
            None
        }
    }

    /// Check that the represented value lies in `(0, 1)`.
    pub fn check_rotation_parameter(&self) -> Result<()> {
        let zero = BigRational::zero();
        let one = BigRational::one();
        let inside = match self {
            Self::Decimal(d) => d.value > zero && d.value < one,
            _ => {
                let v = self.exact_value().expect("exact");
                v.cmp_rational(&zero).is_gt() && v.cmp_rational(&one).is_lt()
            }
        };
        if inside {
            Ok(())
        } else {
            Err(ContFracError::InvalidInput(format!("θ = {self} is not in (0,1)")))
        }
    }
}

impl fmt::Display for RealNumberInput {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Rational(r) => write!(f, "rational:{}/{}", r.numer(), r.denom()),
            Self::QuadraticSurd(s) => {
                let sign = if s.b.is_negative() { '-' } else { '+' };
                write!(f, "surd:({}{}{}*sqrt({}))/{}", s.a, sign, s.b.abs(), s.d, s.c)
            }
            Self::Decimal(d) => match d.precision {
                None => write!(f, "decimal:{}", d.digits),
                Some(p) => write!(f, "decimal:{}@{}", d.digits, p),
            },
        }
    }
}

fn parse_int(s: &str) -> Result<BigInt> {
    s.trim()
        .parse()
        .map_err(|_| ContFracError::InvalidInput(format!("'{s}' is not an integer")))
}

/// Grammar: `rational:<p>/<q>`, `surd:(<a>+<b>*sqrt(<d>))/<c>` (`-` allowed in
/// place of `+`), `decimal:<digits>` or `decimal:<digits>@<precision>`.
impl FromStr for RealNumberInput {
    type Err = ContFracError;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || ContFracError::InvalidInput(format!("cannot parse θ '{s}'"));
        let (kind, body) = s.split_once(':').ok_or_else(bad)?;
        match kind {
            "rational" => {
                let (p, q) = body.split_once('/').ok_or_else(bad)?;
                Self::rational(parse_int(p)?, parse_int(q)?)
            }
            "surd" => {
                let body: String = body.chars().filter(|c| !c.is_whitespace()).collect();
                let inner = body.strip_prefix('(').ok_or_else(bad)?;
                let (inner, c) = inner.rsplit_once(")/").ok_or_else(bad)?;
                let (lhs, radicand) = inner.split_once("*sqrt(").ok_or_else(bad)?;
                let radicand = radicand.strip_suffix(')').ok_or_else(bad)?;
                // split "a+b" / "a-b" at the last sign that is not leading
                let split = lhs
                    .char_indices()
                    .filter(|&(i, ch)| i > 0 && (ch == '+' || ch == '-'))
                    .map(|(i, _)| i)
                    .next_back()
                    .ok_or_else(bad)?;
                let (a, b) = lhs.split_at(split);
                let b = b.strip_prefix('+').unwrap_or(b);
                Self::surd(parse_int(a)?, parse_int(b)?, parse_int(c)?, parse_int(radicand)?)
            }
            "decimal" => match body.split_once('@') {
                Some((digits, p)) => {
                    let p: u32 = p.trim().parse().map_err(|_| bad())?;
                    Self::decimal(digits, Some(p))
                }
                None => Self::decimal(body, None),
            },
            _ => Err(bad()),
        }
    }
}

impl Serialize for RealNumberInput {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for RealNumberInput {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Preperiod and period lengths (in partial quotients) of a surd expansion.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Periodicity {
    pub preperiod: usize,
    pub period: usize,
}

#[derive(Clone, Debug)]
pub struct ContinuedFractionExpansion {
    theta: RealNumberInput,
    quotients: Vec<BigInt>,
    // (p_k, q_k) for k = 0..=N
    convergents: Vec<(BigInt, BigInt)>,
    exact: bool,
    terminated: bool,
    periodic_part: Option<Periodicity>,
}

impl ContinuedFractionExpansion {
    fn from_quotients(theta: RealNumberInput, quotients: Vec<BigInt>, exact: bool, terminated: bool) -> Self {
        let mut convergents = Vec::with_capacity(quotients.len() + 1);
        convergents.push((BigInt::zero(), BigInt::one()));
        let (mut p_prev, mut q_prev) = (BigInt::one(), BigInt::zero());
        for a in &quotients {
            let (p, q) = convergents.last().cloned().expect("nonempty");
            let next = (a * &p + &p_prev, a * &q + &q_prev);
            p_prev = p;
            q_prev = q;
            convergents.push(next);
        }
        Self { theta, quotients, convergents, exact, terminated, periodic_part: None }
    }

    pub fn theta(&self) -> &RealNumberInput {
        &self.theta
    }

    /// `a_1..a_N`.
    pub fn partial_quotients(&self) -> &[BigInt] {
        &self.quotients
    }

    /// Number of partial quotients `N`.
    pub fn len(&self) -> usize {
        self.quotients.len()
    }

    pub fn is_empty(&self) -> bool {
        self.quotients.is_empty()
    }

    /// `a_k` for `1 <= k <= N`.
    pub fn quotient(&self, k: usize) -> Result<&BigInt> {
        if k == 0 || k > self.len() {
            return Err(ContFracError::IndexOutOfRange { index: k, available: self.len() });
        }
        Ok(&self.quotients[k - 1])
    }

    /// `(p_k, q_k)` for `0 <= k <= N`.
    pub fn convergent(&self, k: usize) -> Result<(&BigInt, &BigInt)> {
        self.convergents
            .get(k)
            .map(|(p, q)| (p, q))
            .ok_or(ContFracError::IndexOutOfRange { index: k, available: self.len() })
    }

    pub fn p(&self, k: usize) -> Result<&BigInt> {
        self.convergent(k).map(|c| c.0)
    }

    pub fn q(&self, k: usize) -> Result<&BigInt> {
        self.convergent(k).map(|c| c.1)
    }

    pub fn convergent_ratio(&self, k: usize) -> Result<BigRational> {
        let (p, q) = self.convergent(k)?;
        Ok(BigRational::new(p.clone(), q.clone()))
    }

    pub fn convergents(&self) -> &[(BigInt, BigInt)] {
        &self.convergents
    }

    /// False for precision-limited decimal input.
    pub fn is_exact(&self) -> bool {
        self.exact
    }

    /// True when the expansion of a rational reached its last quotient.
    pub fn is_terminated(&self) -> bool {
        self.terminated
    }

    pub fn periodic_part(&self) -> Option<Periodicity> {
        self.periodic_part
    }
}

/// Expand `theta` into at most `max_terms` partial quotients.
pub fn expand(theta: &RealNumberInput, max_terms: usize) -> Result<ContinuedFractionExpansion> {
    if max_terms == 0 {
        return Err(ContFracError::InvalidInput("max_terms must be positive".into()));
    }
    theta.check_rotation_parameter()?;
    match theta {
        RealNumberInput::Rational(r) => {
            let (quotients, terminated) = expand_interval(r.clone(), r.clone(), max_terms)?;
            Ok(ContinuedFractionExpansion::from_quotients(theta.clone(), quotients, true, terminated))
        }
        RealNumberInput::Decimal(d) => {
            let (lo, hi) = d.enclosure();
            let (quotients, terminated) = expand_interval(lo, hi, max_terms)?;
            Ok(ContinuedFractionExpansion::from_quotients(
                theta.clone(),
                quotients,
                d.precision.is_none(),
                terminated,
            ))
        }
        RealNumberInput::QuadraticSurd(s) => {
            let (quotients, periodicity) = expand_surd(s, max_terms);
            let mut exp = ContinuedFractionExpansion::from_quotients(theta.clone(), quotients, true, false);
            exp.periodic_part = periodicity;
            Ok(exp)
        }
    }
}

/// Euclid on an enclosure `[lo, hi] ⊂ (0,1)`; a quotient is emitted only when
/// both ends agree. `lo == hi` is the exact rational case.
fn expand_interval(mut lo: BigRational, mut hi: BigRational, max_terms: usize) -> Result<(Vec<BigInt>, bool)> {
    let mut quotients = Vec::new();
    while quotients.len() < max_terms {
        if lo == hi && lo.is_zero() {
            return Ok((quotients, true));
        }
        if !lo.is_positive() {
            return Err(ContFracError::PrecisionExhausted { certified: quotients.len() });
        }
        let t_lo = hi.recip();
        let t_hi = lo.recip();
        let a = t_lo.floor().to_integer();
        if t_hi.floor().to_integer() != a || a.is_zero() {
            return Err(ContFracError::PrecisionExhausted { certified: quotients.len() });
        }
        let a_rat = BigRational::from_integer(a.clone());
        lo = t_lo - &a_rat;
        hi = t_hi - a_rat;
        quotients.push(a);
    }
    let terminated = lo == hi && lo.is_zero();
    Ok((quotients, terminated))
}

/// Periodic algorithm on states `(P + √D)/Q` with `Q | D − P²`.
fn expand_surd(s: &QuadraticSurd, max_terms: usize) -> (Vec<BigInt>, Option<Periodicity>) {
    // θ = (a + b√d)/c  →  (P + √D)/Q with D = b²d and sign(b) moved into (P, Q).
    let mut big_d = &s.b * &s.b * &s.d;
    let (mut p, mut q) = if s.b.is_positive() {
        (s.a.clone(), s.c.clone())
    } else {
        (-&s.a, -&s.c)
    };
    if !(&big_d - &p * &p).is_multiple_of(&q) {
        let m = q.abs();
        p *= &m;
        big_d *= &m * &m;
        q *= &m;
    }
    // state of 1/θ
    let mut state_p = -p.clone();
    let mut state_q = (&big_d - &p * &p) / &q;

    let mut quotients = Vec::new();
    let mut seen: HashMap<(BigInt, BigInt), usize> = HashMap::new();
    let mut periodicity = None;
    while quotients.len() < max_terms {
        let k = quotients.len() + 1;
        if periodicity.is_none() {
            if let Some(&j) = seen.get(&(state_p.clone(), state_q.clone())) {
                periodicity = Some(Periodicity { preperiod: j - 1, period: k - j });
            } else {
                seen.insert((state_p.clone(), state_q.clone()), k);
            }
        }
        let a = QuadraticValue::new(state_p.clone(), BigInt::one(), state_q.clone(), big_d.clone()).floor();
        let next_p = &a * &state_q - &state_p;
        let next_q = (&big_d - &next_p * &next_p) / &state_q;
        quotients.push(a);
        state_p = next_p;
        state_q = next_q;
    }
    if periodicity.is_none() && seen.contains_key(&(state_p.clone(), state_q.clone())) {
        let j = seen[&(state_p, state_q)];
        periodicity = Some(Periodicity { preperiod: j - 1, period: quotients.len() + 1 - j });
    }
    (quotients, periodicity)
}
