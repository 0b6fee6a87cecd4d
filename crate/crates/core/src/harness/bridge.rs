//! `L^{p,p;α} ↪ Y_{p,q}` and `Y_{p,q} ↪ L^{p,p;α}` on `(0, 1)`.
//!
//! Both embeddings reduce to embeddings between `Λ¹(v)` and `Γ^{q/p}(w)` with
//! `v = ℓ^{αp}`, `ℓ(t) = log(e/t)`, and `w = t^{q/p-1}`. The verdicts come
//! from the power-log asymptotics at 0; quadrature on `(δ, 1)` confirms the
//! conditions are harmless away from 0 and guards the hand reduction.

use serde::{Deserialize, Serialize};

use super::special::ln_scaled_upper_gamma;
use super::ypq::{eval_ypq, YpqSpec};
use crate::error::{Error, Result};
use crate::funcrep::{
    extended, integrate, sup_on_interval, Asymptote, Endpoint, IntegralAsymptote, PowerLogExpr,
    PowerLogTerm, QuadConfig, StepFunction,
};
use crate::norms::{eval_norm, NormSpec};
use crate::par::{argmax, map_indexed, Execution};
use crate::sample;

/// Left end of the interval the numeric guards run on.
pub const DELTA: f64 = 1e-6;

/// Ratio levels a non-embedding witness sequence has to cross.
pub const THRESHOLDS: [f64; 3] = [10.0, 100.0, 1000.0];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    /// `L^{p,p;α} ↪ Y_{p,q}`.
    IntoY,
    /// `Y_{p,q} ↪ L^{p,p;α}`.
    FromY,
}

impl Direction {
    pub const BOTH: [Direction; 2] = [Direction::IntoY, Direction::FromY];

    /// The classification to be reproduced: `α ≥ 1/q` into `Y`, `α < 1/q`
    /// out of it.
    pub fn predicted(self, q: f64, alpha: f64) -> bool {
        match self {
            Direction::IntoY => alpha * q >= 1.0,
            Direction::FromY => alpha * q < 1.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BridgeCondition {
    pub name: String,
    /// Leading `(c, β, γ)` of `c·t^β·ℓ^γ` at 0.
    pub leading: (f64, f64, f64),
    pub finite: bool,
    /// Sup or integral over `(δ, 1)` by quadrature.
    #[serde(with = "extended")]
    pub numeric: f64,
    /// Relative mismatch between the raw and reduced forms (integral
    /// condition only).
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub reduction_error: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BridgeVerdict {
    pub p: f64,
    pub q: f64,
    pub alpha: f64,
    pub direction: Direction,
    pub embeds: bool,
    pub expected: bool,
    pub conditions: Vec<BridgeCondition>,
}

impl BridgeVerdict {
    pub fn matches(&self) -> bool {
        self.embeds == self.expected
    }
}

fn check_params(p: f64, q: f64, alpha: f64) -> Result<()> {
    if !(p >= 1.0 && p.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "p must lie in [1, ∞), got {p}"
        )));
    }
    if !(q > p && q.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "q must lie in (p, ∞), got {q}"
        )));
    }
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "alpha must be positive, got {alpha}"
        )));
    }
    Ok(())
}

fn ell(t: f64) -> f64 {
    1.0 - t.ln()
}

fn leading(e: &PowerLogExpr) -> Asymptote {
    e.dominant(Endpoint::Zero).expect("non-empty expression")
}

/// `∫ₜ¹ g` near 0 when `∫₀` of `g` diverges, or a positive constant when it
/// converges.
fn tail_from_one(g: Asymptote) -> Asymptote {
    match g.integral(Endpoint::Zero) {
        IntegralAsymptote::Growing(a) => a,
        IntegralAsymptote::Tail(_) => Asymptote::constant(1.0),
        IntegralAsymptote::LogLog => Asymptote::new(g.coef, 0.0, 1e-12),
    }
}

fn head_integral(g: Asymptote) -> Result<Asymptote> {
    match g.integral(Endpoint::Zero) {
        IntegralAsymptote::Tail(a) => Ok(a),
        _ => Err(Error::InvalidParameter(
            "weight is not locally integrable at 0".into(),
        )),
    }
}

/// Exponents are rational in `p, q, α`; at the critical index `α = 1/q` they
/// land on integers only up to rounding, which would flip the verdict.
fn snap(a: Asymptote) -> Asymptote {
    let s = |x: f64| {
        if (x - x.round()).abs() < 1e-9 {
            x.round()
        } else {
            x
        }
    };
    Asymptote::new(a.coef, s(a.power), s(a.log_power))
}

fn triple(a: Asymptote) -> (f64, f64, f64) {
    (a.coef, a.power, a.log_power)
}

fn quad() -> QuadConfig {
    QuadConfig::with_rel_tol(1e-10)
}

fn into_y(p: f64, q: f64, alpha: f64) -> Result<Vec<BridgeCondition>> {
    let r = q / p;
    let v = PowerLogExpr::monomial(1.0, 1.0, 0.0, alpha * p)?;
    let w = PowerLogExpr::monomial(1.0, 1.0, r - 1.0, 0.0)?;
    let w_over = w.multiply(&PowerLogExpr::monomial(1.0, 1.0, -r, 0.0)?)?;
    let big_v = head_integral(leading(&v))?;
    let big_w = head_integral(leading(&w))?;

    // sup (∫₀ᵗ w)^(p/q) (∫₀ᵗ v)^(-1)
    let lead1 = snap(big_w.powf(1.0 / r).mul(big_v.powf(-1.0)));
    // sup t (∫ₜ¹ w s^(-q/p))^(p/q) (∫₀ᵗ v)^(-1)
    let lead2 = snap(
        Asymptote::new(1.0, 1.0, 0.0)
            .mul(tail_from_one(leading(&w_over)).powf(1.0 / r))
            .mul(big_v.powf(-1.0)),
    );

    let cfg = quad();
    let int_v = |t: f64| integrate(&|s: f64| v.eval(s), 0.0, t, &[], &cfg).value;
    let c1 = |t: f64| (t.powf(r) / r).powf(1.0 / r) / int_v(t);
    let c2 = |t: f64| {
        let tail = integrate(&|s: f64| w_over.eval(s), t, 1.0, &[], &cfg).value;
        t * tail.powf(1.0 / r) / int_v(t)
    };
    let n1 = sup_on_interval(&c1, DELTA, 1.0, &[], 1e-8);
    let n2 = sup_on_interval(&c2, DELTA, 1.0, &[], 1e-8);
    Ok(vec![
        BridgeCondition {
            name: "sup (∫₀ᵗ w)^(p/q) / ∫₀ᵗ v".into(),
            leading: triple(lead1),
            finite: lead1.bounded(Endpoint::Zero) && n1.is_finite(),
            numeric: n1,
            reduction_error: None,
        },
        BridgeCondition {
            name: "sup t (∫ₜ¹ w s^(-q/p))^(p/q) / ∫₀ᵗ v".into(),
            leading: triple(lead2),
            finite: lead2.bounded(Endpoint::Zero) && n2.is_finite(),
            numeric: n2,
            reduction_error: None,
        },
    ])
}

fn from_y(p: f64, q: f64, alpha: f64) -> Result<Vec<BridgeCondition>> {
    let r = q / p;
    let beta = alpha * p * q / (q - p);
    let kappa = p / (q - p) + 2.0;
    // The integrand is
    //   t^(q/(q-p) + q/p - 1) · sup_{y∈(t,1)} ℓ(y)^β · t^(q/p) log(1/t)
    //     / (t^(q/p) + t^(q/p) log(1/t))^κ
    // with β = αpq/(q-p) and κ = p/(q-p) + 2. Since β > 0 and ℓ decreases,
    // the sup is ℓ(t)^β. The denominator is (t^(q/p) ℓ)^κ and log(1/t) = ℓ - 1.
    // The powers of t add up to
    //   q/(q-p) + q/p - 1 + q/p - (q/p)(p/(q-p) + 2) = -1,
    // leaving t^(-1) (ℓ^(β+1-κ) - ℓ^(β-κ)). For t < 1/e, ℓ - 1 ≥ ℓ/2, so the
    // first term decides convergence: it needs β + 1 - κ < -1, i.e. αq < 1.
    let reduced = PowerLogExpr::new(
        1.0,
        vec![
            PowerLogTerm::new(1.0, -1.0, beta + 1.0 - kappa),
            PowerLogTerm::new(-1.0, -1.0, beta - kappa),
        ],
    )?;
    let lead = snap(leading(&reduced));
    let dominant = PowerLogExpr::monomial(1.0, lead.coef, lead.power, lead.log_power)?;
    let finite = dominant
        .classify_convergence(Endpoint::Zero)
        .is_convergent();

    let raw = |t: f64| {
        let sup = sup_on_interval(&|y: f64| ell(y).powf(beta), t, 1.0, &[], 1e-13);
        let tr = t.powf(r);
        let lg = -t.ln();
        t.powf(q / (q - p) + r - 1.0) * sup * tr * lg / (tr + tr * lg).powf(kappa)
    };
    let cfg = quad();
    let raw_int = integrate(&raw, DELTA, 1.0, &[], &cfg).value;
    let red_int = integrate(&|t: f64| reduced.eval(t), DELTA, 1.0, &[], &cfg).value;
    Ok(vec![BridgeCondition {
        name: "∫₀¹ t^(-1) (ℓ^(β+1-κ) - ℓ^(β-κ)) dt".into(),
        leading: triple(lead),
        finite,
        numeric: red_int,
        reduction_error: Some((raw_int - red_int).abs() / red_int.abs()),
    }])
}

pub fn bridge_classify(p: f64, q: f64, alpha: f64, direction: Direction) -> Result<BridgeVerdict> {
    check_params(p, q, alpha)?;
    let conditions = match direction {
        Direction::IntoY => into_y(p, q, alpha)?,
        Direction::FromY => from_y(p, q, alpha)?,
    };
    Ok(BridgeVerdict {
        p,
        q,
        alpha,
        direction,
        embeds: conditions.iter().all(|c| c.finite),
        expected: direction.predicted(q, alpha),
        conditions,
    })
}

/// `ln(‖χ_(0,ε)‖_Y / ‖χ_(0,ε)‖_{L^{p,p;α}})` with `L = log(e/ε)`.
///
/// `‖χ‖_Y^q = ε^(q/p)(p/q + L - 1)` and `‖χ‖_{LZ}^p = e·Γ(αp + 1, L)`; the
/// factors `e^(-L)` cancel, so the ratio stays representable for `L` far
/// beyond the range of `ε`.
pub fn ln_indicator_ratio(p: f64, q: f64, alpha: f64, big_l: f64) -> f64 {
    (big_l - 1.0 + p / q).ln() / q - ln_scaled_upper_gamma(alpha * p + 1.0, big_l) / p
}

/// `‖g‖_{L^{p,p;α}} / ‖g‖_Y` for `g*(t)^p = t^(-1) ℓ(t)^(-σ)` on `(0, 1)` with
/// `σ = 1 + max(αp, p/q) + δ`, the smallest exponents keeping both norms
/// finite, shifted by `δ`.
///
/// With `m = σ - 1`: `‖g‖_{LZ}^p = 1/(m - αp)` and
/// `‖g‖_Y^q = m^(-q/p) / ((q/p)m - 1)`.
pub fn log_power_ratio(p: f64, q: f64, alpha: f64, delta: f64) -> f64 {
    let r = q / p;
    let ap = alpha * p;
    let m = ap.max(1.0 / r) + delta;
    let lz_gap = (1.0 / r - ap).max(0.0) + delta;
    let y_gap = r * ((ap - 1.0 / r).max(0.0) + delta);
    let lz_p = 1.0 / lz_gap;
    let y_p = 1.0 / (m * y_gap.powf(1.0 / r));
    (lz_p / y_p).powf(1.0 / p)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThresholdHit {
    pub threshold: f64,
    /// First witness parameter whose ratio reaches the threshold.
    pub parameter: Option<f64>,
    pub ratio: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DirectionCheck {
    pub direction: Direction,
    pub embeds: bool,
    pub expected: bool,
    /// Largest `lhs/rhs` over the sample.
    #[serde(with = "extended")]
    pub sample_sup: f64,
    pub sample_witness: StepFunction,
    pub samples: usize,
    /// Family the witness ratios come from.
    pub witness_family: String,
    #[serde(with = "extended")]
    pub witness_max: f64,
    pub hits: Vec<ThresholdHit>,
    /// Bounded ratios for an embedding, every threshold crossed otherwise.
    pub consistent: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CrosscheckReport {
    pub p: f64,
    pub q: f64,
    pub alpha: f64,
    pub seed: u64,
    pub directions: Vec<DirectionCheck>,
}

impl CrosscheckReport {
    pub fn consistent(&self) -> bool {
        self.directions
            .iter()
            .all(|d| d.consistent && d.embeds == d.expected)
    }
}

/// Witness parameters: `L = 10^k` for indicators, `δ = 10^(-k)` for the
/// log-power family, `k = 1..=300`.
const WITNESS_STEPS: i32 = 300;

fn witness_ratios(p: f64, q: f64, alpha: f64, direction: Direction) -> Vec<(f64, f64)> {
    (1..=WITNESS_STEPS)
        .map(|k| match direction {
            Direction::IntoY => {
                let l = 10f64.powi(k);
                (l, ln_indicator_ratio(p, q, alpha, l).exp())
            }
            Direction::FromY => {
                let d = 10f64.powi(-k);
                (d, log_power_ratio(p, q, alpha, d))
            }
        })
        .collect()
}

pub fn bridge_numeric_crosscheck(
    p: f64,
    q: f64,
    alpha: f64,
    n: usize,
    seed: u64,
    exec: Execution,
) -> Result<CrosscheckReport> {
    check_params(p, q, alpha)?;
    let y = YpqSpec::new(p, q, 1.0)?;
    let lz = NormSpec::lz(p, p, alpha, 1.0)?;
    let mut fam = sample::structured_family(1.0);
    fam.extend(sample::random_family(1.0, n, seed));
    let pairs: Vec<(f64, f64)> = map_indexed(exec, fam.len(), |i| {
        Ok((eval_ypq(&y, &fam[i])?.value, eval_norm(&lz, &fam[i])?.value))
    })
    .into_iter()
    .collect::<Result<_>>()?;

    let mut directions = Vec::new();
    for direction in Direction::BOTH {
        let verdict = bridge_classify(p, q, alpha, direction)?;
        let ratios: Vec<f64> = pairs
            .iter()
            .map(|&(yv, lv)| {
                let (num, den) = match direction {
                    Direction::IntoY => (yv, lv),
                    Direction::FromY => (lv, yv),
                };
                if den > 0.0 && den.is_finite() {
                    num / den
                } else {
                    f64::NAN
                }
            })
            .collect();
        let best = argmax(&ratios).unwrap_or(0);
        let witness = witness_ratios(p, q, alpha, direction);
        let witness_max = witness.iter().map(|w| w.1).fold(0.0, f64::max);
        let hits: Vec<ThresholdHit> = THRESHOLDS
            .iter()
            .map(|&threshold| {
                let hit = witness.iter().find(|w| w.1 >= threshold);
                ThresholdHit {
                    threshold,
                    parameter: hit.map(|w| w.0),
                    ratio: hit.map(|w| w.1),
                }
            })
            .collect();
        let sample_sup = ratios[best];
        let consistent = if verdict.embeds {
            sample_sup.is_finite() && witness_max < THRESHOLDS[0]
        } else {
            hits.iter().all(|h| h.parameter.is_some())
        };
        directions.push(DirectionCheck {
            direction,
            embeds: verdict.embeds,
            expected: verdict.expected,
            sample_sup,
            sample_witness: fam[best].clone(),
            samples: fam.len(),
            witness_family: match direction {
                Direction::IntoY => "indicators χ_(0,ε), parameter log(e/ε)".into(),
                Direction::FromY => "g*(t)^p = t^(-1) log(e/t)^(-σ), parameter σ - σ_min".into(),
            },
            witness_max,
            hits,
            consistent,
        });
    }
    Ok(CrosscheckReport {
        p,
        q,
        alpha,
        seed,
        directions,
    })
}
