//! Sums of power-log terms `c·t^β·ℓ(t)^γ` and their asymptotics.
//!
//! On a finite domain `ℓ(t) = log(e·b/t)`. On `(0, ∞)` the log factor is
//! `log(e/t)` on `(0, 1]` and `log(e + t)` on `(1, ∞)`, so that near either
//! endpoint `ℓ → ∞` like `|log t|`.

use serde::{Deserialize, Serialize};

use super::extended::Ext;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Endpoint {
    Zero,
    Infinity,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Convergence {
    Convergent,
    Divergent,
}

impl Convergence {
    pub fn is_convergent(self) -> bool {
        self == Convergence::Convergent
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PowerLogTerm {
    pub coef: f64,
    pub power: f64,
    pub log_power: f64,
}

impl PowerLogTerm {
    pub fn new(coef: f64, power: f64, log_power: f64) -> Self {
        Self {
            coef,
            power,
            log_power,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PowerLogExpr {
    b: f64,
    terms: Vec<PowerLogTerm>,
}

#[derive(Serialize, Deserialize)]
struct ExprJson {
    b: Ext,
    terms: Vec<(f64, f64, f64)>,
}

impl Serialize for PowerLogExpr {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        ExprJson {
            b: Ext(self.b),
            terms: self
                .terms
                .iter()
                .map(|t| (t.coef, t.power, t.log_power))
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for PowerLogExpr {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = ExprJson::deserialize(d)?;
        PowerLogExpr::new(
            raw.b.0,
            raw.terms
                .into_iter()
                .map(|(c, p, g)| PowerLogTerm::new(c, p, g))
                .collect(),
        )
        .map_err(serde::de::Error::custom)
    }
}

/// The log factor `ℓ(t)` for domain length `b`.
pub fn log_factor(b: f64, t: f64) -> f64 {
    if b.is_finite() {
        (std::f64::consts::E * b / t).ln()
    } else if t <= 1.0 {
        1.0 - t.ln()
    } else {
        (std::f64::consts::E + t).ln()
    }
}

impl PowerLogExpr {
    pub fn new(b: f64, terms: Vec<PowerLogTerm>) -> Result<Self> {
        super::step::check_domain(b)?;
        if let Some(t) = terms
            .iter()
            .find(|t| !(t.coef.is_finite() && t.power.is_finite() && t.log_power.is_finite()))
        {
            return Err(Error::InvalidParameter(format!(
                "power-log term has a non-finite entry: {t:?}"
            )));
        }
        Ok(Self { b, terms })
    }

    /// `c·t^β·ℓ^γ` alone.
    pub fn monomial(b: f64, coef: f64, power: f64, log_power: f64) -> Result<Self> {
        Self::new(b, vec![PowerLogTerm::new(coef, power, log_power)])
    }

    pub fn domain(&self) -> f64 {
        self.b
    }

    pub fn terms(&self) -> &[PowerLogTerm] {
        &self.terms
    }

    pub fn eval(&self, t: f64) -> f64 {
        let ell = log_factor(self.b, t);
        self.terms
            .iter()
            .map(|term| {
                let lp = if term.log_power == 0.0 {
                    1.0
                } else {
                    ell.powf(term.log_power)
                };
                term.coef * t.powf(term.power) * lp
            })
            .sum()
    }

    /// Termwise product, like terms merged.
    pub fn multiply(&self, other: &Self) -> Result<Self> {
        if self.b != other.b {
            return Err(Error::DomainMismatch {
                function: other.b,
                spec: self.b,
            });
        }
        let terms = self
            .terms
            .iter()
            .flat_map(|x| {
                other.terms.iter().map(move |y| {
                    PowerLogTerm::new(
                        x.coef * y.coef,
                        x.power + y.power,
                        x.log_power + y.log_power,
                    )
                })
            })
            .collect();
        Ok(Self { b: self.b, terms }.simplified())
    }

    /// Like terms merged, zero terms dropped, sorted by exponents.
    pub fn simplified(&self) -> Self {
        let mut terms: Vec<PowerLogTerm> = Vec::new();
        for t in &self.terms {
            match terms
                .iter_mut()
                .find(|u| u.power == t.power && u.log_power == t.log_power)
            {
                Some(u) => u.coef += t.coef,
                None => terms.push(*t),
            }
        }
        terms.retain(|t| t.coef != 0.0);
        terms.sort_by(|x, y| {
            x.power
                .total_cmp(&y.power)
                .then(x.log_power.total_cmp(&y.log_power))
        });
        Self { b: self.b, terms }
    }

    /// The term that dominates as `t` approaches `endpoint`.
    pub fn dominant(&self, endpoint: Endpoint) -> Option<Asymptote> {
        self.terms
            .iter()
            .filter(|t| t.coef != 0.0)
            .map(|t| Asymptote::new(t.coef, t.power, t.log_power))
            .reduce(|a, b| if b.dominates(&a, endpoint) { b } else { a })
    }

    /// Integrability of the expression near `endpoint`; a sum of nonnegative
    /// terms converges iff each term does. Near `b < ∞` every term is bounded.
    pub fn classify_convergence(&self, endpoint: Endpoint) -> Convergence {
        if endpoint == Endpoint::Infinity && self.b.is_finite() {
            return Convergence::Convergent;
        }
        let all = self
            .terms
            .iter()
            .filter(|t| t.coef != 0.0)
            .all(|t| Asymptote::new(t.coef, t.power, t.log_power).integrable(endpoint));
        if all {
            Convergence::Convergent
        } else {
            Convergence::Divergent
        }
    }
}

/// `c·t^β·L^γ` read as the leading behaviour near an endpoint, where `L → ∞`
/// like `|log t|`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Asymptote {
    pub coef: f64,
    pub power: f64,
    pub log_power: f64,
}

/// Leading behaviour of `∫ g` near an endpoint.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum IntegralAsymptote {
    /// Convergent: the integral between `t` and the endpoint behaves like this.
    Tail(Asymptote),
    /// Divergent: the integral from a fixed point to `t` grows like this.
    Growing(Asymptote),
    /// Divergent like `log L`; not representable as a power-log term.
    LogLog,
}

impl Asymptote {
    pub fn new(coef: f64, power: f64, log_power: f64) -> Self {
        Self {
            coef,
            power,
            log_power,
        }
    }

    pub fn constant(c: f64) -> Self {
        Self::new(c, 0.0, 0.0)
    }

    /// True when `self/other → ∞` at the endpoint (ties on both exponents go to
    /// `other`).
    pub fn dominates(&self, other: &Self, endpoint: Endpoint) -> bool {
        let dp = self.power - other.power;
        let sign = match endpoint {
            Endpoint::Zero => -1.0,
            Endpoint::Infinity => 1.0,
        };
        if dp != 0.0 {
            sign * dp > 0.0
        } else {
            self.log_power > other.log_power
        }
    }

    #[allow(clippy::should_implement_trait)]
    pub fn mul(self, o: Self) -> Self {
        Self::new(
            self.coef * o.coef,
            self.power + o.power,
            self.log_power + o.log_power,
        )
    }

    pub fn powf(self, e: f64) -> Self {
        Self::new(self.coef.powf(e), self.power * e, self.log_power * e)
    }

    /// Orientation: `+1` if `t^β` grows as the endpoint is approached for `β > 0`.
    fn orientation(endpoint: Endpoint) -> f64 {
        match endpoint {
            Endpoint::Zero => -1.0,
            Endpoint::Infinity => 1.0,
        }
    }

    /// Bounded near the endpoint.
    pub fn bounded(&self, endpoint: Endpoint) -> bool {
        let s = Self::orientation(endpoint) * self.power;
        s < 0.0 || (s == 0.0 && self.log_power <= 0.0)
    }

    /// Tends to zero near the endpoint.
    pub fn vanishes(&self, endpoint: Endpoint) -> bool {
        let s = Self::orientation(endpoint) * self.power;
        s < 0.0 || (s == 0.0 && self.log_power < 0.0)
    }

    pub fn integrable(&self, endpoint: Endpoint) -> bool {
        let s = Self::orientation(endpoint) * (self.power + 1.0);
        s < 0.0 || (s == 0.0 && self.log_power < -1.0)
    }

    pub fn integral(&self, endpoint: Endpoint) -> IntegralAsymptote {
        let s = Self::orientation(endpoint) * (self.power + 1.0);
        let c = self.coef;
        let (beta, gamma) = (self.power, self.log_power);
        if s != 0.0 {
            let a = Self::new(c / (beta + 1.0).abs(), beta + 1.0, gamma);
            if s < 0.0 {
                IntegralAsymptote::Tail(a)
            } else {
                IntegralAsymptote::Growing(a)
            }
        } else if gamma < -1.0 {
            IntegralAsymptote::Tail(Self::new(c / (-gamma - 1.0), 0.0, gamma + 1.0))
        } else if gamma > -1.0 {
            IntegralAsymptote::Growing(Self::new(c / (gamma + 1.0), 0.0, gamma + 1.0))
        } else {
            IntegralAsymptote::LogLog
        }
    }
}
