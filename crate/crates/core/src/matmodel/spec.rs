//! Noncommutative Laurent polynomials in the two rotation unitaries.

use std::collections::BTreeMap;

use num_complex::Complex64;
use num_traits::Zero;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::MatModelError;

/// One monomial `coeff · U^u V^v`; negative powers mean adjoints.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Term {
    pub u: i64,
    pub v: i64,
    pub coeff: Complex64,
}

/// `α₁U + α₋₁U* + β₁V + β₋₁V*`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CanonicalCoefficients {
    pub alpha_plus: Complex64,
    pub alpha_minus: Complex64,
    pub beta_plus: Complex64,
    pub beta_minus: Complex64,
}

impl CanonicalCoefficients {
    /// `M = max{|α±1|, |β±1|}`.
    pub fn coefficient_bound(&self) -> f64 {
        [self.alpha_plus, self.alpha_minus, self.beta_plus, self.beta_minus]
            .iter()
            .map(|c| c.norm())
            .fold(0.0, f64::max)
    }

    pub fn terms(&self) -> Vec<Term> {
        vec![
            Term { u: 1, v: 0, coeff: self.alpha_plus },
            Term { u: -1, v: 0, coeff: self.alpha_minus },
            Term { u: 0, v: 1, coeff: self.beta_plus },
            Term { u: 0, v: -1, coeff: self.beta_minus },
        ]
    }

    /// `α₋₁ = conj(α₁)` and `β₋₁ = conj(β₁)`.
    pub fn is_self_adjoint(&self) -> bool {
        self.alpha_minus == self.alpha_plus.conj() && self.beta_minus == self.beta_plus.conj()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct OperatorSpec {
    terms: Vec<Term>,
    canonical: Option<CanonicalCoefficients>,
}

impl OperatorSpec {
    pub fn canonical(alpha_plus: Complex64, alpha_minus: Complex64, beta_plus: Complex64, beta_minus: Complex64) -> Self {
        let c = CanonicalCoefficients { alpha_plus, alpha_minus, beta_plus, beta_minus };
        Self { terms: c.terms(), canonical: Some(c) }
    }

    /// Canonical spec with real coefficients.
    pub fn canonical_real(alpha_plus: f64, alpha_minus: f64, beta_plus: f64, beta_minus: f64) -> Self {
        let c = |x: f64| Complex64::new(x, 0.0);
        Self::canonical(c(alpha_plus), c(alpha_minus), c(beta_plus), c(beta_minus))
    }

    /// `U + U* + λ(V + V*)`.
    pub fn almost_mathieu(lambda: f64) -> Self {
        Self::canonical_real(1.0, 1.0, lambda, lambda)
    }

    /// General polynomial; recognized as canonical when every monomial is one
    /// of `U, U*, V, V*`.
    pub fn from_terms(terms: Vec<Term>) -> Self {
        let canonical = detect_canonical(&terms);
        Self { terms, canonical }
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn canonical_coefficients(&self) -> Option<&CanonicalCoefficients> {
        self.canonical.as_ref()
    }

    pub fn is_canonical(&self) -> bool {
        self.canonical.is_some()
    }

    /// `M` of a canonical spec.
    pub fn coefficient_bound(&self) -> Option<f64> {
        self.canonical.as_ref().map(CanonicalCoefficients::coefficient_bound)
    }

    /// `Σ|c_jk|`, an upper bound on the norm of every matrix model.
    pub fn norm_bound(&self) -> Result<f64, MatModelError> {
        if self.terms.is_empty() {
            return Err(MatModelError::EmptySpec);
        }
        Ok(self.terms.iter().map(|t| t.coeff.norm()).sum())
    }

    /// True when the spec is `X + X*`-symmetric, i.e. every model is Hermitian.
    pub fn is_self_adjoint(&self) -> bool {
        let merged = merge(&self.terms);
        merged.iter().all(|(&(u, v), &c)| {
            // (c U^u V^v)* = conj(c) V^-v U^-u = conj(c) e^{...} U^-u V^-v; only
            // pure U or pure V monomials are phase-free.
            if u != 0 && v != 0 {
                return c.is_zero();
            }
            let partner = merged.get(&(-u, -v)).copied().unwrap_or_default();
            partner == c.conj()
        })
    }
}

fn merge(terms: &[Term]) -> BTreeMap<(i64, i64), Complex64> {
    let mut merged = BTreeMap::new();
    for t in terms {
        *merged.entry((t.u, t.v)).or_insert_with(Complex64::zero) += t.coeff;
    }
    merged
}

fn detect_canonical(terms: &[Term]) -> Option<CanonicalCoefficients> {
    if terms.is_empty() {
        return None;
    }
    let merged = merge(terms);
    let allowed = [(1, 0), (-1, 0), (0, 1), (0, -1)];
    if merged.keys().any(|k| !allowed.contains(k)) {
        return None;
    }
    let get = |k: (i64, i64)| merged.get(&k).copied().unwrap_or_default();
    Some(CanonicalCoefficients {
        alpha_plus: get((1, 0)),
        alpha_minus: get((-1, 0)),
        beta_plus: get((0, 1)),
        beta_minus: get((0, -1)),
    })
}

#[derive(Serialize, Deserialize)]
struct TermRepr {
    u: i64,
    v: i64,
    re: f64,
    #[serde(default)]
    im: f64,
}

#[derive(Serialize, Deserialize)]
struct CanonicalRepr {
    #[serde(rename = "a+")]
    alpha_plus: [f64; 2],
    #[serde(rename = "a-")]
    alpha_minus: [f64; 2],
    #[serde(rename = "b+")]
    beta_plus: [f64; 2],
    #[serde(rename = "b-")]
    beta_minus: [f64; 2],
}

#[derive(Serialize, Deserialize)]
struct SpecRepr {
    #[serde(default)]
    terms: Vec<TermRepr>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    canonical: Option<CanonicalRepr>,
}

fn pair(c: Complex64) -> [f64; 2] {
    [c.re, c.im]
}

fn cx(p: [f64; 2]) -> Complex64 {
    Complex64::new(p[0], p[1])
}

impl Serialize for OperatorSpec {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let repr = SpecRepr {
            terms: self
                .terms
                .iter()
                .map(|t| TermRepr { u: t.u, v: t.v, re: t.coeff.re, im: t.coeff.im })
                .collect(),
            canonical: self.canonical.map(|c| CanonicalRepr {
                alpha_plus: pair(c.alpha_plus),
                alpha_minus: pair(c.alpha_minus),
                beta_plus: pair(c.beta_plus),
                beta_minus: pair(c.beta_minus),
            }),
        };
        repr.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for OperatorSpec {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let repr = SpecRepr::deserialize(deserializer)?;
        let terms: Vec<Term> = repr
            .terms
            .iter()
            .map(|t| Term { u: t.u, v: t.v, coeff: Complex64::new(t.re, t.im) })
            .collect();
        match repr.canonical {
            None => Ok(OperatorSpec::from_terms(terms)),
            Some(c) => {
                let spec = OperatorSpec::canonical(cx(c.alpha_plus), cx(c.alpha_minus), cx(c.beta_plus), cx(c.beta_minus));
                if !terms.is_empty() && detect_canonical(&terms) != spec.canonical {
                    return Err(D::Error::custom("\"terms\" and \"canonical\" disagree"));
                }
                Ok(spec)
            }
        }
    }
}
