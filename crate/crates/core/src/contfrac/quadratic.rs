//! Exact arithmetic on real numbers of the form `(a + b√d)/c`.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// `(a + b√d)/c` with `c > 0` and `d >= 0`.
///
/// `d` need not be square-free; when `b == 0` the value is rational and `d` is
/// ignored. This is the working type for exact comparisons: the validated user
/// facing input type is [`super::QuadraticSurd`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuadraticValue {
    pub a: BigInt,
    pub b: BigInt,
    pub c: BigInt,
    pub d: BigInt,
}

/// Sign of `x + y√d` for `d >= 0`.
pub(crate) fn sign_of(x: &BigInt, y: &BigInt, d: &BigInt) -> Ordering {
    let zero = BigInt::zero();
    if y.is_zero() || d.is_zero() {
        return x.cmp(&zero);
    }
    let sx = x.cmp(&zero);
    let sy = y.cmp(&zero);
    match (sx, sy) {
        (Ordering::Equal, s) => s,
        (s, t) if s == t => s,
        // Opposite signs: compare magnitudes squared.
        (s, _) => {
            let lhs = x * x;
            let rhs = y * y * d;
            match lhs.cmp(&rhs) {
                Ordering::Greater => s,
                Ordering::Less => s.reverse(),
                Ordering::Equal => Ordering::Equal,
            }
        }
    }
}

impl QuadraticValue {
    pub fn new(a: BigInt, b: BigInt, c: BigInt, d: BigInt) -> Self {
        assert!(!c.is_zero(), "zero denominator");
        assert!(!d.is_negative(), "negative radicand");
        if c.is_negative() {
            Self { a: -a, b: -b, c: -c, d }
        } else {
            Self { a, b, c, d }
        }
    }

    pub fn from_rational(r: &BigRational) -> Self {
        Self::new(r.numer().clone(), BigInt::zero(), r.denom().clone(), BigInt::zero())
    }

    pub fn is_rational(&self) -> bool {
        if self.b.is_zero() || self.d.is_zero() {
            return true;
        }
        let s = self.d.sqrt();
        &s * &s == self.d
    }

    pub fn signum(&self) -> Ordering {
        sign_of(&self.a, &self.b, &self.d)
    }

    /// `self − r`.
    pub fn sub_rational(&self, r: &BigRational) -> Self {
        let (n, m) = (r.numer(), r.denom());
        Self::new(
            &self.a * m - &self.c * n,
            &self.b * m,
            &self.c * m,
            self.d.clone(),
        )
    }

    pub fn neg(&self) -> Self {
        Self::new(-&self.a, -&self.b, self.c.clone(), self.d.clone())
    }

    pub fn abs(&self) -> Self {
        if self.signum() == Ordering::Less {
            self.neg()
        } else {
            self.clone()
        }
    }

    pub fn cmp_rational(&self, r: &BigRational) -> Ordering {
        self.sub_rational(r).signum()
    }

    /// `floor(self)` computed exactly.
    pub fn floor(&self) -> BigInt {
        // With r = isqrt(b²d), b√d lies in [r, r+1) for b >= 0 and in
        // (-r-1, -r] for b < 0, with the closed end only when b²d is square.
        // Since c > 0, the floor of the open interval over c is the floor of
        // its left end over c.
        let root_sq = &self.b * &self.b * &self.d;
        let r = root_sq.sqrt();
        let exact = &r * &r == root_sq;
        let base = if !self.b.is_negative() {
            &self.a + &r
        } else if exact {
            &self.a - &r
        } else {
            &self.a - &r - BigInt::one()
        };
        base.div_floor(&self.c)
    }

    /// Nearest `f64`, accurate to a few ulps even under cancellation.
    pub fn to_f64(&self) -> f64 {
        let a = self.a.to_f64().unwrap_or(f64::NAN);
        let b = self.b.to_f64().unwrap_or(f64::NAN);
        let c = self.c.to_f64().unwrap_or(f64::NAN);
        let root = self.d.to_f64().unwrap_or(f64::NAN).sqrt();
        if self.b.is_zero() || self.a.is_zero() || self.a.is_negative() == self.b.is_negative() {
            return (a + b * root) / c;
        }
        // a + b√d = (a² − b²d)/(a − b√d) avoids the cancellation.
        let num = &self.a * &self.a - &self.b * &self.b * &self.d;
        let num = BigRational::new(num, self.c.clone()).to_f64().unwrap_or(f64::NAN);
        num / (a - b * root)
    }
}

impl fmt::Display for QuadraticValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.b.is_zero() {
            write!(f, "{}/{}", self.a, self.c)
        } else {
            write!(f, "({}+{}*sqrt({}))/{}", self.a, self.b, self.d, self.c)
        }
    }
}
