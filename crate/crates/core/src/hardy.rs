//! The Hardy averaging operator and the optimal constant of `X ↪ X^<α>`.

use serde::{Deserialize, Serialize};

use crate::bracket::{eval_bracket, BracketSpec, Mode};
use crate::error::{Error, Result};
use crate::funcrep::{extended, DecreasingStep, StepFunction};
use crate::norms::{eval_norm, eval_on_decreasing, NormKind, RiClass};
use crate::par::{argmax, map_indexed, Execution};
use crate::rearrange::{rearrange, HardyAverage, PowerOf, Rearranged};
use crate::sample;

/// `Ah(t) = P(t)/t` from the exact profile of `h`.
pub fn hardy_average(h: &DecreasingStep) -> HardyAverage {
    HardyAverage::new(h.clone())
}

/// The sharp constant `(1/(1-α))^(1/α)` of `X ↪ X^<α>` for `α < 1`.
pub fn sharp_constant(alpha: f64) -> Option<f64> {
    (alpha > 0.0 && alpha < 1.0).then(|| (1.0 / (1.0 - alpha)).powf(1.0 / alpha))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EmbeddingEstimate {
    /// Largest observed `ρ^<α>(f)/ρ(f)`.
    #[serde(with = "extended")]
    pub c_lower: f64,
    pub alpha: f64,
    /// `c_lower^α`.
    #[serde(with = "extended")]
    pub kappa: f64,
    pub witness: StepFunction,
    pub witness_index: usize,
    pub samples: usize,
    pub seed: u64,
    #[serde(default, with = "extended::option")]
    pub target_bound: Option<f64>,
    /// Ratios grow without bound along shrinking indicators.
    pub divergent: bool,
    /// Ratios `ρ^<α>(χ_(0,ε])/ρ(χ_(0,ε])` along `ε = s·10^(-k)`.
    pub indicator_chain: Vec<f64>,
}

fn check_base(spec: &BracketSpec) -> Result<()> {
    spec.validate()?;
    if spec.mode != Mode::Angle {
        return Err(Error::Unsupported(
            "embedding scans use the angle bracket".into(),
        ));
    }
    match spec.base.ri_class() {
        RiClass::Norm | RiClass::EquivalentToNorm => Ok(()),
        other => Err(Error::InvalidParameter(format!(
            "embedding scans need an r.i. base, got {other:?}"
        ))),
    }
}

/// The scanned family: the structured family followed by `n` random samples.
pub fn scan_family(b: f64, n: usize, seed: u64) -> Vec<StepFunction> {
    let mut fam = sample::structured_family(b);
    fam.extend(sample::random_family(b, n, seed));
    fam
}

/// `ρ^<α>(f)/ρ(f)`, or `None` when the base norm is 0 or infinite.
pub fn embedding_ratio(spec: &BracketSpec, f: &StepFunction) -> Result<Option<f64>> {
    let base = eval_norm(&spec.base, f)?.value;
    if base == 0.0 || !base.is_finite() {
        return Ok(None);
    }
    Ok(Some(eval_bracket(spec, f)?.value / base))
}

const CHAIN_LEN: usize = 13;

fn indicator_chain(spec: &BracketSpec, exec: Execution) -> Result<Vec<f64>> {
    let b = spec.b();
    let s = if b.is_finite() { b } else { 1.0 };
    let ratios = map_indexed(exec, CHAIN_LEN, |k| {
        let f = StepFunction::indicator(b, s * 10f64.powi(-(k as i32)))?;
        embedding_ratio(spec, &f).map(|r| r.unwrap_or(f64::NAN))
    });
    ratios.into_iter().collect()
}

/// Growth test on the indicator chain: infinite ratios, or increments that
/// stay above `1e-3·r` and fail to halve over the last four steps.
fn chain_diverges(chain: &[f64]) -> bool {
    if chain.iter().any(|r| r.is_infinite()) {
        return true;
    }
    let n = chain.len();
    if n < 6 {
        return false;
    }
    let d: Vec<f64> = chain[n - 5..].windows(2).map(|w| w[1] - w[0]).collect();
    let r = chain[n - 1];
    d.iter().all(|&x| x > 1e-3 * r) && d[d.len() - 1] >= 0.5 * d[0]
}

pub fn estimate_embedding_constant(
    spec: &BracketSpec,
    n: usize,
    seed: u64,
    exec: Execution,
) -> Result<EmbeddingEstimate> {
    check_base(spec)?;
    if n == 0 {
        return Err(Error::InvalidParameter(
            "at least one random sample is required".into(),
        ));
    }
    let fam = scan_family(spec.b(), n, seed);
    let ratios: Vec<Option<f64>> = map_indexed(exec, fam.len(), |i| embedding_ratio(spec, &fam[i]))
        .into_iter()
        .collect::<Result<_>>()?;
    let vals: Vec<f64> = ratios.iter().map(|r| r.unwrap_or(f64::NAN)).collect();
    let best = argmax(&vals).ok_or_else(|| {
        Error::InvalidParameter("every sample has zero or infinite base norm".into())
    })?;
    let c = vals[best];
    let chain = indicator_chain(spec, exec)?;
    let is_linf = matches!(spec.base.kind, NormKind::Lebesgue { p } if p.is_infinite());
    let target_bound = if is_linf {
        Some(1.0)
    } else {
        sharp_constant(spec.alpha)
    };
    Ok(EmbeddingEstimate {
        c_lower: c,
        alpha: spec.alpha,
        kappa: c.powf(spec.alpha),
        witness: fam[best].clone(),
        witness_index: best,
        samples: fam.len(),
        seed,
        target_bound,
        divergent: chain_diverges(&chain),
        indicator_chain: chain,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KappaReport {
    pub c_lower: f64,
    /// Largest `‖A h‖/‖h‖` in the brace space over `h = (f*)^α`.
    pub kappa_lower: f64,
    /// Largest per-sample `|ratio^α - brace ratio|`.
    pub max_abs_diff: f64,
    pub same_witness: bool,
    pub samples: usize,
    pub note: String,
}

/// `‖Ah‖/‖h‖` in `X̄^{1/α}`, with `‖g‖ = ρ̄(g^(1/α))^α`, for `h = (f*)^α`.
pub fn brace_ratio(spec: &BracketSpec, f: &StepFunction) -> Result<Option<f64>> {
    let h = rearrange(&f.powf(spec.alpha)?);
    let e = 1.0 / spec.alpha;
    let top = eval_on_decreasing(&spec.base, &PowerOf::new(hardy_average(&h), e))?;
    let bottom = eval_on_decreasing(&spec.base, &Rearranged::new(h.powf(e)?))?;
    if bottom.value == 0.0 || !bottom.value.is_finite() {
        return Ok(None);
    }
    Ok(Some((top.value / bottom.value).powf(spec.alpha)))
}

fn brace_note(spec: &BracketSpec) -> String {
    let a = spec.alpha;
    let space = match spec.base.kind {
        NormKind::Lebesgue { p } => format!("L^{}", p / a),
        NormKind::Lorentz { p, q } => format!("L^{{{},{}}}", p / a, q / a),
        _ => format!("the {}-convexification of the base", 1.0 / a),
    };
    format!("brace space is {space}; supremum taken over non-increasing h only")
}

pub fn kappa_consistency(
    spec: &BracketSpec,
    n: usize,
    seed: u64,
    exec: Execution,
) -> Result<KappaReport> {
    check_base(spec)?;
    let fam = scan_family(spec.b(), n, seed);
    let pairs: Vec<(Option<f64>, Option<f64>)> = map_indexed(exec, fam.len(), |i| {
        Ok((embedding_ratio(spec, &fam[i])?, brace_ratio(spec, &fam[i])?))
    })
    .into_iter()
    .collect::<Result<_>>()?;
    let direct: Vec<f64> = pairs
        .iter()
        .map(|(r, _)| r.map_or(f64::NAN, |r| r.powf(spec.alpha)))
        .collect();
    let brace: Vec<f64> = pairs.iter().map(|(_, k)| k.unwrap_or(f64::NAN)).collect();
    let max_abs_diff = direct
        .iter()
        .zip(&brace)
        .filter(|(a, b)| a.is_finite() && b.is_finite())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    let (i, j) = (argmax(&direct), argmax(&brace));
    Ok(KappaReport {
        c_lower: i.map_or(f64::NAN, |i| direct[i].powf(1.0 / spec.alpha)),
        kappa_lower: j.map_or(f64::NAN, |j| brace[j]),
        max_abs_diff,
        same_witness: i == j,
        samples: fam.len(),
        note: brace_note(spec),
    })
}
