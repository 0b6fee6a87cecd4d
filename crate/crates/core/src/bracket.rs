//! `ρ^<α>(f) = ρ̄(((f^α)**)^(1/α))` and `ρ^{α}(f) = ρ(f^α)^(1/α)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::funcrep::{Asymptote, Endpoint, IntegralAsymptote, QuadConfig, StepFunction};
use crate::norms::{self, check_positive, EvalReport, NormKind, NormSpec};
use crate::rearrange::{CappedPower, MaxRearrangement, ShiftedPower};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    #[default]
    Angle,
    Brace,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BracketSpec {
    pub base: NormSpec,
    pub alpha: f64,
    #[serde(default)]
    pub mode: Mode,
}

impl BracketSpec {
    pub fn new(base: NormSpec, alpha: f64, mode: Mode) -> Result<Self> {
        let s = Self { base, alpha, mode };
        s.validate()?;
        Ok(s)
    }

    pub fn angle(base: NormSpec, alpha: f64) -> Result<Self> {
        Self::new(base, alpha, Mode::Angle)
    }

    pub fn brace(base: NormSpec, alpha: f64) -> Result<Self> {
        Self::new(base, alpha, Mode::Brace)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let spec: Self = serde_json::from_str(s)?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        self.base.validate()?;
        check_positive("alpha", self.alpha)?;
        if self.alpha.is_infinite() {
            return Err(Error::InvalidParameter("alpha must be finite".into()));
        }
        Ok(())
    }

    pub fn b(&self) -> f64 {
        self.base.b
    }

    fn require_angle(&self) -> Result<()> {
        if self.mode != Mode::Angle {
            return Err(Error::Unsupported(
                "operation is defined for the angle bracket only".into(),
            ));
        }
        Ok(())
    }
}

pub fn eval_bracket(spec: &BracketSpec, f: &StepFunction) -> Result<EvalReport> {
    eval_bracket_with(spec, f, &QuadConfig::default())
}

pub fn eval_bracket_with(
    spec: &BracketSpec,
    f: &StepFunction,
    cfg: &QuadConfig,
) -> Result<EvalReport> {
    spec.validate()?;
    if f.domain() != spec.b() {
        return Err(Error::DomainMismatch {
            function: f.domain(),
            spec: spec.b(),
        });
    }
    match spec.mode {
        Mode::Angle => {
            let m = MaxRearrangement::new(f, spec.alpha)?;
            norms::eval_on_decreasing_with(&spec.base, &m, cfg)
        }
        Mode::Brace => Ok(
            norms::eval_norm_with(&spec.base, &f.powf(spec.alpha)?, cfg)?.powf(1.0 / spec.alpha),
        ),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FundamentalFunction {
    /// `φ^<α>(a) = ρ̄(min(1, (a/t)^(1/α)))`.
    pub phi: f64,
    /// `a^(1/α) ρ̄(t^(-1/α) χ_(a,b))`.
    pub comparand: f64,
}

impl FundamentalFunction {
    pub fn ratio(&self) -> f64 {
        self.phi / self.comparand
    }
}

/// The fundamental function of `X^<α>` at `a`, computed from the identity
/// `(χ_E)** = min(1, a/t)`, together with the power-tail comparand.
pub fn fundamental_function(spec: &BracketSpec, a: f64) -> Result<FundamentalFunction> {
    spec.validate()?;
    spec.require_angle()?;
    let b = spec.b();
    if !(a > 0.0 && a <= b) || a.is_infinite() {
        return Err(Error::InvalidParameter(format!(
            "a must lie in (0, b], got {a}"
        )));
    }
    let theta = 1.0 / spec.alpha;
    let phi = norms::eval_on_decreasing(&spec.base, &CappedPower { b, a, theta })?.value;
    let comparand = if a == b {
        0.0
    } else {
        a.powf(theta) * norms::eval_on_decreasing(&spec.base, &ShiftedPower { b, a, theta })?.value
    };
    Ok(FundamentalFunction { phi, comparand })
}

/// Leading behaviour of `h**` at infinity for a tail `h ~ asym`.
pub(crate) fn star_at_infinity(asym: Asymptote) -> Asymptote {
    match asym.integral(Endpoint::Infinity) {
        IntegralAsymptote::Tail(_) => Asymptote::new(1.0, -1.0, 0.0),
        IntegralAsymptote::Growing(g) => g.mul(Asymptote::new(1.0, -1.0, 0.0)),
        IntegralAsymptote::LogLog => Asymptote::new(asym.coef, -1.0, 1e-12),
    }
}

/// Whether `X^<α> ≠ {0}`: always on a finite domain; on `(0, ∞)` iff
/// `ρ̄(t^(-1/α) χ_(a,∞)) < ∞`, decided from power asymptotics.
pub fn is_nontrivial(spec: &BracketSpec) -> Result<bool> {
    spec.validate()?;
    spec.require_angle()?;
    if spec.b().is_finite() {
        return Ok(true);
    }
    let h = Asymptote::new(1.0, -1.0 / spec.alpha, 0.0);
    let (p, q, star) = match spec.base.kind {
        NormKind::Lebesgue { p } => (p, p, false),
        NormKind::Lorentz { p, q } => (p, q, false),
        NormKind::LorentzStar { p, q } => (p, q, true),
        _ => {
            return Err(Error::Unsupported(
                "triviality on infinite measure is decided for Lebesgue and Lorentz bases only"
                    .into(),
            ))
        }
    };
    let hh = if star { star_at_infinity(h) } else { h };
    Ok(if q.is_infinite() {
        hh.mul(Asymptote::new(1.0, 1.0 / p, 0.0))
            .bounded(Endpoint::Infinity)
    } else {
        hh.powf(q)
            .mul(Asymptote::new(1.0, q / p - 1.0, 0.0))
            .integrable(Endpoint::Infinity)
    })
}

/// `2^|1/α - 1|`, the quasi-triangle constant of `ρ^<α>`.
pub fn modulus_of_concavity_bound(alpha: f64) -> f64 {
    2f64.powf((1.0 / alpha - 1.0).abs())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn step(b: f64, p: Vec<(f64, f64)>) -> StepFunction {
        StepFunction::new(b, p).unwrap()
    }

    #[test]
    fn l1_angle_one_of_indicator() {
        let spec = BracketSpec::angle(NormSpec::lebesgue(1.0, 1.0).unwrap(), 1.0).unwrap();
        let r = eval_bracket(&spec, &step(1.0, vec![(0.25, 1.0)])).unwrap();
        let want = 0.25 + 0.25 * 4f64.ln();
        assert!((r.value - want).abs() < 1e-10, "{r:?}");
        assert!((want - 0.596_57).abs() < 1e-5);
    }

    #[test]
    fn weak_lp_at_critical_alpha_is_lp() {
        let f = step(1.0, vec![(0.1, 3.0), (0.4, 1.0), (0.9, 0.5)]);
        for p in [1.0, 2.0, 3.0] {
            let spec =
                BracketSpec::angle(NormSpec::lorentz(p, f64::INFINITY, 1.0).unwrap(), p).unwrap();
            let lp = norms::eval_norm(&NormSpec::lebesgue(p, 1.0).unwrap(), &f).unwrap();
            let r = eval_bracket(&spec, &f).unwrap();
            assert!(
                (r.value - lp.value).abs() < 1e-9 * lp.value,
                "{p}: {r:?} {lp:?}"
            );
        }
    }

    #[test]
    fn constants_pass_through() {
        let c = 2.5;
        let f = step(2.0, vec![(2.0, c)]);
        let one = step(2.0, vec![(2.0, 1.0)]);
        for base in [
            NormSpec::lebesgue(1.5, 2.0).unwrap(),
            NormSpec::lorentz(2.0, 1.0, 2.0).unwrap(),
            NormSpec::lorentz_star(2.0, 2.0, 2.0).unwrap(),
        ] {
            let rho1 = norms::eval_norm(&base, &one).unwrap().value;
            for alpha in [0.5, 2.0] {
                let r =
                    eval_bracket(&BracketSpec::angle(base.clone(), alpha).unwrap(), &f).unwrap();
                assert!((r.value - c * rho1).abs() < 1e-9, "{base:?} {alpha}");
            }
        }
    }

    #[test]
    fn brace_mode() {
        let f = step(1.0, vec![(0.5, 2.0)]);
        let spec = BracketSpec::brace(NormSpec::lebesgue(1.0, 1.0).unwrap(), 2.0).unwrap();
        // (∫ f²)^(1/2) = ‖f‖₂.
        let r = eval_bracket(&spec, &f).unwrap();
        assert!((r.value - 2f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn fundamental_function_examples() {
        let spec = BracketSpec::angle(NormSpec::lebesgue(1.0, 1.0).unwrap(), 1.0).unwrap();
        let ff = fundamental_function(&spec, 0.25).unwrap();
        assert!((ff.phi - (0.25 + 0.25 * 4f64.ln())).abs() < 1e-10);
        assert!((ff.comparand - 0.25 * 4f64.ln()).abs() < 1e-10);
        assert!(ff.ratio() >= 1.0 && ff.ratio() <= 3.0);
        let whole = fundamental_function(&spec, 1.0).unwrap();
        assert!((whole.phi - 1.0).abs() < 1e-12);
        let inf = BracketSpec::angle(NormSpec::lebesgue(2.0, f64::INFINITY).unwrap(), 1.0).unwrap();
        let ff = fundamental_function(&inf, 1.0).unwrap();
        assert!((ff.comparand - 1.0).abs() < 1e-9, "{ff:?}");
    }

    #[test]
    fn triviality_examples() {
        let inf = f64::INFINITY;
        for (alpha, want) in [(1.0, true), (2.0, false), (3.0, false)] {
            let s = BracketSpec::angle(NormSpec::lebesgue(2.0, inf).unwrap(), alpha).unwrap();
            assert_eq!(is_nontrivial(&s).unwrap(), want, "{alpha}");
        }
        let s = BracketSpec::angle(NormSpec::lorentz(2.0, inf, inf).unwrap(), 2.0).unwrap();
        assert!(is_nontrivial(&s).unwrap());
        let s = BracketSpec::angle(NormSpec::lz(2.0, 2.0, 1.0, 1.0).unwrap(), 5.0).unwrap();
        assert!(is_nontrivial(&s).unwrap());
        let w = crate::norms::Weight::PowerLog(
            crate::funcrep::PowerLogExpr::monomial(inf, 1.0, 0.0, 0.0).unwrap(),
        );
        let s = BracketSpec::angle(NormSpec::lambda(1.0, w).unwrap(), 1.0).unwrap();
        assert!(is_nontrivial(&s).is_err());
    }

    #[test]
    fn modulus() {
        assert_eq!(modulus_of_concavity_bound(1.0), 1.0);
        assert!((modulus_of_concavity_bound(2.0) - 2f64.sqrt()).abs() < 1e-15);
        assert!((modulus_of_concavity_bound(0.5) - 2.0).abs() < 1e-15);
    }
}
