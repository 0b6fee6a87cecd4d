//! `‖f‖_{Y_{p,q}} = (∫₀ᵇ (∫₀ᵗ f*^p)^(q/p) dt/t)^(1/q)`, and `‖f‖_{L^p}` when
//! `q = ∞`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::funcrep::{
    extended, integrate, CumulativeProfile, QuadConfig, QuadStatus, StepFunction,
};
use crate::norms::{check_positive, eval_norm, EvalReport, Method, NormSpec};
use crate::rearrange::rearrange;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct YpqSpec {
    pub p: f64,
    #[serde(with = "extended")]
    pub q: f64,
    pub b: f64,
}

impl YpqSpec {
    pub fn new(p: f64, q: f64, b: f64) -> Result<Self> {
        let s = Self { p, q, b };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        check_positive("b", self.b)?;
        if !self.b.is_finite() {
            return Err(Error::InvalidParameter(
                "Y_{p,q} needs a finite domain".into(),
            ));
        }
        if !(self.p >= 1.0 && self.p.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "p must lie in [1, ∞), got {}",
                self.p
            )));
        }
        if self.q.is_nan() || self.q < self.p {
            return Err(Error::InvalidParameter(format!(
                "q must lie in [p, ∞], got {}",
                self.q
            )));
        }
        Ok(())
    }
}

pub fn eval_ypq(spec: &YpqSpec, f: &StepFunction) -> Result<EvalReport> {
    spec.validate()?;
    if f.domain() != spec.b {
        return Err(Error::DomainMismatch {
            function: f.domain(),
            spec: spec.b,
        });
    }
    if spec.q.is_infinite() {
        return eval_norm(&NormSpec::lebesgue(spec.p, spec.b)?, f);
    }
    let fp = rearrange(&f.powf(spec.p)?);
    if fp.is_zero() {
        return Ok(EvalReport::exact(0.0));
    }
    let prof = CumulativeProfile::new(&fp);
    let r = spec.q / spec.p;
    // P(t) = v₁t on the first piece, so that part integrates exactly.
    let t1 = fp.ends()[0];
    let head = (fp.values()[0] * t1).powf(r) / r;
    let integrand = |t: f64| prof.eval(t).powf(r) / t;
    let res = integrate(&integrand, t1, spec.b, prof.ends(), &QuadConfig::default());
    if res.status == QuadStatus::Diverged {
        return Ok(EvalReport::infinite());
    }
    let total = head + res.value;
    let value = total.powf(1.0 / spec.q);
    Ok(EvalReport {
        value,
        error_bound: value * res.abs_error_bound / (spec.q * total),
        method: if t1 == spec.b {
            Method::Exact
        } else {
            Method::Quadrature
        },
    })
}
