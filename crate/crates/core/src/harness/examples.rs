//! Two-sided equivalences for brackets over Lebesgue and Lorentz bases.
//!
//! Each regime compares `ρ^<α>(f)` with a classical norm of `f` and states the
//! window `[lower, upper]` the ratio must fall in. Windows come from the
//! explicit constants of the proofs:
//!
//! * below the critical index, Hardy's inequality in `L^{p/α, q/α}` gives
//!   `1 ≤ ratio ≤ (p/(p-α))^(1/α)` (for Lorentz bases when `q ≥ α`);
//! * at `α = p`, Fubini gives the Lorentz-Zygmund norm (Lebesgue) or `Y_{p,q}`
//!   (Lorentz) exactly, up to `e^(-1/p)` in the Lebesgue case;
//! * above it, `((f^α)**)^(1/α) ≤ ‖f‖_α t^(-1/α)` everywhere and
//!   `≥ 2^(-1/α) ‖f‖_α t^(-1/α)` on `(b/2, b)` bound the ratio to `L^α`.

use serde::{Deserialize, Serialize};

use super::ypq::{eval_ypq, YpqSpec};
use crate::bracket::{eval_bracket, is_nontrivial, BracketSpec};
use crate::error::{Error, Result};
use crate::funcrep::{extended, StepFunction};
use crate::norms::{eval_norm, NormSpec};
use crate::par::{argmax, map_indexed, Execution};
use crate::sample;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Regime {
    LebSub,
    LebCrit,
    LebSuper,
    LorSub,
    LorCrit,
    LorCritInf,
    LorSuper,
    LorTrivial,
}

impl std::str::FromStr for Regime {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        serde_json::from_value(serde_json::Value::String(s.into()))
            .map_err(|_| Error::InvalidParameter(format!("unknown regime {s:?}")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExampleParams {
    pub regime: Regime,
    pub p: f64,
    /// Secondary Lorentz index; ignored by the Lebesgue regimes.
    #[serde(with = "extended")]
    pub q: f64,
    pub alpha: f64,
    #[serde(with = "extended")]
    pub b: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EquivalenceReport {
    pub params: ExampleParams,
    /// The norm `ρ^<α>` is compared against.
    pub comparand: String,
    #[serde(with = "extended::option")]
    pub lower: Option<f64>,
    #[serde(with = "extended::option")]
    pub upper: Option<f64>,
    #[serde(with = "extended")]
    pub min_ratio: f64,
    #[serde(with = "extended")]
    pub max_ratio: f64,
    pub min_witness: Option<StepFunction>,
    pub max_witness: Option<StepFunction>,
    pub samples: usize,
    /// Only reported for the trivial regime.
    pub nontrivial: Option<bool>,
    pub holds: bool,
}

enum Comparand {
    Norm(NormSpec),
    Y(YpqSpec),
}

impl Comparand {
    fn eval(&self, f: &StepFunction) -> Result<f64> {
        Ok(match self {
            Comparand::Norm(s) => eval_norm(s, f)?.value,
            Comparand::Y(s) => eval_ypq(s, f)?.value,
        })
    }
}

struct Setup {
    bracket: BracketSpec,
    comparand: Option<(Comparand, String)>,
    lower: Option<f64>,
    upper: Option<f64>,
}

fn mismatch(msg: &str) -> Error {
    Error::InvalidParameter(format!("regime/parameter mismatch: {msg}"))
}

/// `‖t^γ χ_(l, b)‖_{L^q}`.
fn power_norm(gamma: f64, q: f64, l: f64, b: f64) -> f64 {
    if q.is_infinite() {
        return b.powf(gamma).max(l.powf(gamma));
    }
    let e = gamma * q + 1.0;
    ((b.powf(e) - l.powf(e)) / e).powf(1.0 / q)
}

fn setup(x: &ExampleParams) -> Result<Setup> {
    use Regime::*;
    let ExampleParams {
        regime,
        p,
        q,
        alpha,
        b,
    } = *x;
    if !(p >= 1.0 && p.is_finite()) {
        return Err(mismatch("p must lie in [1, ∞)"));
    }
    let lebesgue = matches!(regime, LebSub | LebCrit | LebSuper);
    let q = if lebesgue { p } else { q };
    let base = if lebesgue {
        NormSpec::lebesgue(p, b)?
    } else {
        NormSpec::lorentz(p, q, b)?
    };
    let bracket = BracketSpec::angle(base, alpha)?;
    let need = |ok: bool, msg: &str| if ok { Ok(()) } else { Err(mismatch(msg)) };
    let lp = |e: f64| -> Result<Comparand> { Ok(Comparand::Norm(NormSpec::lebesgue(e, b)?)) };
    let s = match regime {
        LebSub | LorSub => {
            need(alpha < p, "subcritical regimes need α < p")?;
            let upper = (lebesgue || q >= alpha).then(|| (p / (p - alpha)).powf(1.0 / alpha));
            let name = if lebesgue {
                format!("L^{p}")
            } else {
                format!("L^{{{p},{q}}}")
            };
            Setup {
                comparand: Some((Comparand::Norm(bracket.base.clone()), name)),
                bracket,
                lower: Some(1.0),
                upper,
            }
        }
        LebCrit => {
            need(
                alpha == p && b.is_finite(),
                "leb-crit needs α = p and b < ∞",
            )?;
            Setup {
                comparand: Some((
                    Comparand::Norm(NormSpec::lz(p, p, 1.0 / p, b)?),
                    format!("L^{{{p},{p};1/{p}}}"),
                )),
                bracket,
                lower: Some((-1.0 / p).exp()),
                upper: Some(1.0),
            }
        }
        LorCrit => {
            need(
                alpha == p && q.is_finite() && b.is_finite(),
                "lor-crit needs α = p, q < ∞ and b < ∞",
            )?;
            Setup {
                comparand: Some((
                    Comparand::Y(YpqSpec::new(p, q, b)?),
                    format!("Y_{{{p},{q}}}"),
                )),
                bracket,
                lower: Some(1.0),
                upper: Some(1.0),
            }
        }
        LorCritInf => {
            need(
                alpha == p && q.is_infinite(),
                "lor-crit-inf needs α = p and q = ∞",
            )?;
            Setup {
                comparand: Some((lp(p)?, format!("L^{p}"))),
                bracket,
                lower: Some(1.0),
                upper: Some(1.0),
            }
        }
        LebSuper | LorSuper => {
            need(
                alpha > p && b.is_finite(),
                "supercritical regimes need α > p and b < ∞",
            )?;
            let gamma = 1.0 / p - 1.0 / alpha - if q.is_finite() { 1.0 / q } else { 0.0 };
            let upper = power_norm(gamma, q, 0.0, b);
            let lower = 2f64.powf(-1.0 / alpha) * power_norm(gamma, q, b / 2.0, b);
            Setup {
                comparand: Some((lp(alpha)?, format!("L^{alpha}"))),
                bracket,
                lower: Some(lower),
                upper: Some(upper),
            }
        }
        LorTrivial => {
            need(b.is_infinite(), "lor-trivial needs b = ∞")?;
            Setup {
                bracket,
                comparand: None,
                lower: None,
                upper: None,
            }
        }
    };
    Ok(s)
}

fn family(b: f64, n: usize, seed: u64) -> Vec<StepFunction> {
    let mut fam = sample::structured_family(b);
    fam.extend(sample::random_family(b, n, seed));
    fam
}

/// Checks the regime's window on the structured family plus `n` random
/// functions; `tol` is relative.
pub fn example_equivalences(
    params: &ExampleParams,
    n: usize,
    seed: u64,
    tol: f64,
    exec: Execution,
) -> Result<EquivalenceReport> {
    let s = setup(params)?;
    let fam = family(params.b, n, seed);
    let Some((comparand, name)) = &s.comparand else {
        // Trivial space: every nonzero function has infinite bracket norm.
        let nontrivial = is_nontrivial(&s.bracket)?;
        let vals: Vec<f64> = map_indexed(exec, fam.len(), |i| eval_bracket(&s.bracket, &fam[i]))
            .into_iter()
            .map(|r| r.map(|e| e.value))
            .collect::<Result<_>>()?;
        let all_infinite = vals.iter().all(|v| v.is_infinite());
        return Ok(EquivalenceReport {
            params: *params,
            comparand: "{0}".into(),
            lower: None,
            upper: None,
            min_ratio: f64::INFINITY,
            max_ratio: f64::INFINITY,
            min_witness: None,
            max_witness: None,
            samples: fam.len(),
            nontrivial: Some(nontrivial),
            holds: !nontrivial && all_infinite,
        });
    };
    let ratios: Vec<f64> = map_indexed(exec, fam.len(), |i| {
        let den = comparand.eval(&fam[i])?;
        let num = eval_bracket(&s.bracket, &fam[i])?.value;
        Ok(if den > 0.0 && den.is_finite() {
            num / den
        } else {
            f64::NAN
        })
    })
    .into_iter()
    .collect::<Result<_>>()?;
    let hi = argmax(&ratios);
    let neg: Vec<f64> = ratios.iter().map(|r| -r).collect();
    let lo = argmax(&neg);
    let (min_ratio, max_ratio) = match (lo, hi) {
        (Some(i), Some(j)) => (ratios[i], ratios[j]),
        _ => {
            return Err(Error::InvalidParameter(
                "no sample has a finite comparand".into(),
            ))
        }
    };
    let holds = s.lower.is_none_or(|l| min_ratio >= l * (1.0 - tol))
        && s.upper.is_none_or(|u| max_ratio <= u * (1.0 + tol));
    Ok(EquivalenceReport {
        params: *params,
        comparand: name.clone(),
        lower: s.lower,
        upper: s.upper,
        min_ratio,
        max_ratio,
        min_witness: lo.map(|i| fam[i].clone()),
        max_witness: hi.map(|i| fam[i].clone()),
        samples: fam.len(),
        nontrivial: None,
        holds,
    })
}
