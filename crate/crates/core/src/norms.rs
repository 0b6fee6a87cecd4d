//! Base functionals: Lebesgue, Lorentz, Lorentz-Zygmund, `Λ^q(w)`, `Γ^p(w)`.
//!
//! Every kind is evaluated as `(∫₀ᵇ H(t)^q W(t) dt)^(1/q)` or, for `q = ∞`,
//! `sup H(t) V(t)`, where `H` is `h = f*` or `h**` and `W`, `V` are power-log
//! weights. Step-function inputs with pure-power weights are integrated in
//! closed form; everything else goes through [`crate::funcrep::integrate`].

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::funcrep::{
    extended, integrate, sup_on_interval, Asymptote, DecreasingStep, Endpoint, PowerLogExpr,
    QuadConfig, QuadStatus, StepFunction,
};
use crate::rearrange::{rearrange, Decreasing, Rearranged, Tail};

pub(crate) fn check_positive(name: &str, x: f64) -> Result<()> {
    if x.is_nan() || x <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "{name} must be positive, got {x}"
        )));
    }
    Ok(())
}

/// A weight on `(0, b)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Weight {
    PowerLog(PowerLogExpr),
    Step(StepFunction),
}

impl Weight {
    pub fn domain(&self) -> f64 {
        match self {
            Weight::PowerLog(e) => e.domain(),
            Weight::Step(s) => s.domain(),
        }
    }

    pub fn eval(&self, t: f64) -> f64 {
        match self {
            Weight::PowerLog(e) => e.eval(t),
            Weight::Step(s) => s.value_at(t),
        }
    }

    pub fn breakpoints(&self) -> Vec<f64> {
        match self {
            Weight::PowerLog(_) => Vec::new(),
            Weight::Step(s) => s.ends().to_vec(),
        }
    }

    /// The weight vanishes beyond this point.
    pub fn support_end(&self) -> f64 {
        match self {
            Weight::PowerLog(e) => e.domain(),
            Weight::Step(s) => s.support_end(),
        }
    }

    /// `Σ c t^β` when no log factor is present.
    pub(crate) fn pure_powers(&self) -> Option<Vec<(f64, f64)>> {
        match self {
            Weight::PowerLog(e) => e
                .terms()
                .iter()
                .map(|t| (t.log_power == 0.0).then_some((t.coef, t.power)))
                .collect(),
            Weight::Step(_) => None,
        }
    }

    /// `∫_l^r W`, exactly, if the weight admits it.
    pub(crate) fn exact_integral(&self, l: f64, r: f64) -> Option<f64> {
        if let Weight::Step(s) = self {
            return Some(s.integral_over(l, r));
        }
        let mut sum = 0.0;
        for (c, beta) in self.pure_powers()? {
            if c == 0.0 {
                continue;
            }
            sum += if beta == -1.0 {
                if l == 0.0 {
                    f64::INFINITY
                } else {
                    c * (r / l).ln()
                }
            } else if l == 0.0 && beta < -1.0 {
                f64::INFINITY
            } else if r.is_infinite() {
                if beta < -1.0 {
                    -c * l.powf(beta + 1.0) / (beta + 1.0)
                } else {
                    f64::INFINITY
                }
            } else {
                c * (r.powf(beta + 1.0) - l.powf(beta + 1.0)) / (beta + 1.0)
            };
        }
        Some(sum)
    }

    /// Leading behaviour near `∞`; `None` when the weight vanishes there.
    pub(crate) fn at_infinity(&self) -> Option<Asymptote> {
        match self {
            Weight::PowerLog(e) => e.dominant(Endpoint::Infinity),
            Weight::Step(_) => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RiClass {
    /// The functional itself satisfies (P1)–(P6).
    Norm,
    /// Equivalent to an r.i. norm, but the functional may violate (P1).
    EquivalentToNorm,
    /// A quasinorm.
    Quasi,
    Unknown,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum NormKind {
    Lebesgue {
        #[serde(with = "extended")]
        p: f64,
    },
    Lorentz {
        #[serde(with = "extended")]
        p: f64,
        #[serde(with = "extended")]
        q: f64,
    },
    LorentzStar {
        #[serde(with = "extended")]
        p: f64,
        #[serde(with = "extended")]
        q: f64,
    },
    Lz {
        #[serde(with = "extended")]
        p: f64,
        #[serde(with = "extended")]
        q: f64,
        alpha: f64,
    },
    LzStar {
        #[serde(with = "extended")]
        p: f64,
        #[serde(with = "extended")]
        q: f64,
        alpha: f64,
    },
    Lambda {
        #[serde(with = "extended")]
        q: f64,
        w: Weight,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        ri: Option<RiClass>,
    },
    Gamma {
        #[serde(with = "extended")]
        p: f64,
        w: Weight,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        ri: Option<RiClass>,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormSpec {
    #[serde(flatten)]
    pub kind: NormKind,
    #[serde(with = "extended")]
    pub b: f64,
}

/// The functional in the uniform shape `‖H·W^(1/q)‖_q`.
struct Shape {
    q: f64,
    star: bool,
    /// `W` for `q < ∞`, `V` for `q = ∞`.
    weight: Weight,
}

impl NormSpec {
    pub fn new(kind: NormKind, b: f64) -> Result<Self> {
        let s = Self { kind, b };
        s.validate()?;
        Ok(s)
    }

    pub fn lebesgue(p: f64, b: f64) -> Result<Self> {
        Self::new(NormKind::Lebesgue { p }, b)
    }

    pub fn lorentz(p: f64, q: f64, b: f64) -> Result<Self> {
        Self::new(NormKind::Lorentz { p, q }, b)
    }

    pub fn lorentz_star(p: f64, q: f64, b: f64) -> Result<Self> {
        Self::new(NormKind::LorentzStar { p, q }, b)
    }

    pub fn lz(p: f64, q: f64, alpha: f64, b: f64) -> Result<Self> {
        Self::new(NormKind::Lz { p, q, alpha }, b)
    }

    pub fn lz_star(p: f64, q: f64, alpha: f64, b: f64) -> Result<Self> {
        Self::new(NormKind::LzStar { p, q, alpha }, b)
    }

    pub fn lambda(q: f64, w: Weight) -> Result<Self> {
        let b = w.domain();
        Self::new(NormKind::Lambda { q, w, ri: None }, b)
    }

    pub fn gamma(p: f64, w: Weight) -> Result<Self> {
        let b = w.domain();
        Self::new(NormKind::Gamma { p, w, ri: None }, b)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let spec: Self = serde_json::from_str(s)?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.b.is_nan() || self.b <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "domain length must be positive, got {}",
                self.b
            )));
        }
        match &self.kind {
            NormKind::Lebesgue { p } => check_positive("p", *p),
            NormKind::Lorentz { p, q } | NormKind::LorentzStar { p, q } => {
                check_positive("p", *p)?;
                check_positive("q", *q)
            }
            NormKind::Lz { p, q, alpha } | NormKind::LzStar { p, q, alpha } => {
                check_positive("p", *p)?;
                check_positive("q", *q)?;
                if !alpha.is_finite() {
                    return Err(Error::InvalidParameter("alpha must be finite".into()));
                }
                if self.b.is_infinite() {
                    return Err(Error::InvalidParameter(
                        "Lorentz-Zygmund functionals need a finite domain".into(),
                    ));
                }
                Ok(())
            }
            NormKind::Lambda { q: e, w, .. } | NormKind::Gamma { p: e, w, .. } => {
                check_positive("exponent", *e)?;
                if w.domain() != self.b {
                    return Err(Error::DomainMismatch {
                        function: w.domain(),
                        spec: self.b,
                    });
                }
                Ok(())
            }
        }
    }

    /// Classification as stated for the classical families.
    pub fn ri_class(&self) -> RiClass {
        use RiClass::*;
        let inf = f64::INFINITY;
        match &self.kind {
            NormKind::Lebesgue { p } => {
                if *p >= 1.0 {
                    Norm
                } else {
                    Quasi
                }
            }
            NormKind::Lorentz { p, q } => {
                let (p, q) = (*p, *q);
                if (1.0 <= q && q <= p && p < inf) || (p == inf && q == inf) {
                    Norm
                } else if p > 1.0 && p < inf && q >= 1.0 {
                    EquivalentToNorm
                } else {
                    Quasi
                }
            }
            NormKind::LorentzStar { q, .. } | NormKind::LzStar { q, .. } => {
                if *q >= 1.0 {
                    Norm
                } else {
                    Quasi
                }
            }
            NormKind::Lz { p, q, alpha } => {
                let (p, q, a) = (*p, *q, *alpha);
                if 1.0 <= q && q <= p && p < inf && a >= 0.0 {
                    Norm
                } else if (p > 1.0 && p < inf && q >= 1.0)
                    || (p == 1.0 && q == 1.0 && a >= 0.0)
                    || (p == inf && q == inf && a <= 0.0)
                    || (p == inf && q >= 1.0 && q < inf && a < -1.0 / q)
                {
                    EquivalentToNorm
                } else {
                    Quasi
                }
            }
            NormKind::Lambda { ri, .. } | NormKind::Gamma { ri, .. } => ri.unwrap_or(Unknown),
        }
    }

    pub fn is_ri_norm(&self) -> bool {
        self.ri_class() == RiClass::Norm
    }

    fn shape(&self) -> Shape {
        let b = self.b;
        let mono = |beta: f64, gamma: f64| {
            Weight::PowerLog(PowerLogExpr::monomial(b, 1.0, beta, gamma).expect("finite exponents"))
        };
        let lorentz_weight = |p: f64, q: f64, a: f64| {
            if q.is_infinite() {
                mono(1.0 / p, a)
            } else {
                mono(q / p - 1.0, a * q)
            }
        };
        match &self.kind {
            NormKind::Lebesgue { p } => Shape {
                q: *p,
                star: false,
                weight: mono(0.0, 0.0),
            },
            NormKind::Lorentz { p, q } => Shape {
                q: *q,
                star: false,
                weight: lorentz_weight(*p, *q, 0.0),
            },
            NormKind::LorentzStar { p, q } => Shape {
                q: *q,
                star: true,
                weight: lorentz_weight(*p, *q, 0.0),
            },
            NormKind::Lz { p, q, alpha } => Shape {
                q: *q,
                star: false,
                weight: lorentz_weight(*p, *q, *alpha),
            },
            NormKind::LzStar { p, q, alpha } => Shape {
                q: *q,
                star: true,
                weight: lorentz_weight(*p, *q, *alpha),
            },
            NormKind::Lambda { q, w, .. } => Shape {
                q: *q,
                star: false,
                weight: w.clone(),
            },
            NormKind::Gamma { p, w, .. } => Shape {
                q: *p,
                star: true,
                weight: w.clone(),
            },
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Exact,
    Quadrature,
    Symbolic,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    #[serde(with = "extended")]
    pub value: f64,
    pub error_bound: f64,
    pub method: Method,
}

impl EvalReport {
    pub fn exact(value: f64) -> Self {
        Self {
            value,
            error_bound: 0.0,
            method: Method::Exact,
        }
    }

    pub fn infinite() -> Self {
        Self {
            value: f64::INFINITY,
            error_bound: 0.0,
            method: Method::Symbolic,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.value.is_finite()
    }

    /// `value^e` with the error bound carried to first order.
    pub fn powf(self, e: f64) -> Self {
        if !self.value.is_finite() {
            return self;
        }
        let value = self.value.powf(e);
        let error_bound = if self.value > 0.0 {
            (e * value / self.value * self.error_bound).abs()
        } else {
            self.error_bound.powf(e)
        };
        Self {
            value,
            error_bound,
            method: self.method,
        }
    }

    pub fn scale(self, c: f64) -> Self {
        Self {
            value: c * self.value,
            error_bound: c.abs() * self.error_bound,
            method: self.method,
        }
    }
}

/// `ρ(f)`.
pub fn eval_norm(spec: &NormSpec, f: &StepFunction) -> Result<EvalReport> {
    eval_norm_with(spec, f, &QuadConfig::default())
}

pub fn eval_norm_with(spec: &NormSpec, f: &StepFunction, cfg: &QuadConfig) -> Result<EvalReport> {
    if f.domain() != spec.b {
        return Err(Error::DomainMismatch {
            function: f.domain(),
            spec: spec.b,
        });
    }
    eval_on_decreasing_with(spec, &Rearranged::new(rearrange(f)), cfg)
}

/// `ρ̄(h)` for a function that is already non-increasing.
pub fn eval_on_decreasing(spec: &NormSpec, h: &dyn Decreasing) -> Result<EvalReport> {
    eval_on_decreasing_with(spec, h, &QuadConfig::default())
}

pub fn eval_on_decreasing_with(
    spec: &NormSpec,
    h: &dyn Decreasing,
    cfg: &QuadConfig,
) -> Result<EvalReport> {
    spec.validate()?;
    if h.domain() != spec.b {
        return Err(Error::DomainMismatch {
            function: h.domain(),
            spec: spec.b,
        });
    }
    let shape = spec.shape();
    if h.support_end() <= 0.0 {
        return Ok(EvalReport::exact(0.0));
    }
    if let Weight::PowerLog(e) = &shape.weight {
        if let Some(lead) = e.dominant(Endpoint::Zero) {
            let blows_up = if shape.q.is_infinite() {
                !lead.bounded(Endpoint::Zero)
            } else {
                !lead.integrable(Endpoint::Zero)
            };
            if blows_up && h.value(0.0) > 0.0 {
                return Ok(EvalReport::infinite());
            }
        }
    }
    if shape.q.is_infinite() {
        Ok(eval_sup(&shape, h, spec.b, cfg))
    } else {
        Ok(eval_integral(&shape, h, spec.b, cfg))
    }
}

/// Leading behaviour of `H` on an infinite domain beyond the support or tail
/// start; `None` when `H` vanishes there.
fn h_tail(h: &dyn Decreasing, star: bool) -> Option<(f64, Asymptote, bool)> {
    match (h.tail(), star) {
        (None, false) => None,
        (None, true) => {
            let e = h.support_end();
            Some((e, Asymptote::new(h.cumulative(e), -1.0, 0.0), true))
        }
        (Some(t), false) => Some((t.start, t.asym, t.exact)),
        (Some(Tail { start, asym, .. }), true) => {
            // h** of a power tail, from ∫ of the tail.
            let lead = match asym.integral(Endpoint::Infinity) {
                crate::funcrep::IntegralAsymptote::Tail(_) => {
                    Asymptote::new(h.cumulative(f64::INFINITY), -1.0, 0.0)
                }
                crate::funcrep::IntegralAsymptote::Growing(g) => {
                    g.mul(Asymptote::new(1.0, -1.0, 0.0))
                }
                // log log t / t: slower than any positive log power.
                crate::funcrep::IntegralAsymptote::LogLog => Asymptote::new(asym.coef, -1.0, 1e-12),
            };
            Some((start, lead, false))
        }
    }
}

fn eval_integral(shape: &Shape, h: &dyn Decreasing, b: f64, cfg: &QuadConfig) -> EvalReport {
    let q = shape.q;
    let w = &shape.weight;
    let end = if shape.star {
        b
    } else {
        h.support_end().min(b)
    };
    let end = end.min(w.support_end());

    // Step data with an exactly integrable weight.
    if !shape.star {
        if let Some(d) = h.as_step() {
            if let Some(total) = exact_step_integral(d, w, q) {
                return if total.is_finite() {
                    EvalReport::exact(total.powf(1.0 / q))
                } else {
                    EvalReport::infinite()
                };
            }
        }
    }

    let hh = |t: f64| {
        if shape.star {
            h.cumulative(t) / t
        } else {
            h.value(t)
        }
    };
    let integrand = |t: f64| {
        let v = hh(t);
        if v == 0.0 {
            0.0
        } else {
            v.powf(q) * w.eval(t)
        }
    };

    let mut method = Method::Exact;
    let mut total = 0.0;
    let mut err = 0.0;
    let mut start = 0.0;

    if let Some((t1, c)) = h.head() {
        let t1 = t1.min(end);
        if let Some(wi) = w.exact_integral(0.0, t1) {
            if !wi.is_finite() {
                return EvalReport::infinite();
            }
            total += c.powf(q) * wi;
            start = t1;
        }
    }

    let mut stop = end;
    if end.is_infinite() {
        if let Some((t0, asym, exact)) = h_tail(h, shape.star) {
            let Some(wa) = w.at_infinity() else {
                return finish(total, err, q, method);
            };
            let lead = asym.powf(q).mul(wa);
            if !lead.integrable(Endpoint::Infinity) {
                return EvalReport::infinite();
            }
            let t0 = t0.max(start);
            if exact && asym.log_power == 0.0 {
                let shifted = w.pure_powers().and_then(|terms| {
                    terms
                        .iter()
                        .map(|&(c, beta)| {
                            let e = asym.power * q + beta;
                            (e < -1.0)
                                .then(|| asym.coef.powf(q) * c * -t0.powf(e + 1.0) / (e + 1.0))
                        })
                        .sum::<Option<f64>>()
                });
                if let Some(v) = shifted {
                    total += v;
                    stop = t0;
                }
            }
        } else {
            stop = h.support_end();
        }
    }

    if stop > start {
        let mut breaks = h.breakpoints();
        breaks.extend(w.breakpoints());
        let r = integrate(&integrand, start, stop, &breaks, cfg);
        if r.status == QuadStatus::Diverged {
            return EvalReport::infinite();
        }
        total += r.value;
        err += r.abs_error_bound;
        method = Method::Quadrature;
    }
    finish(total, err, q, method)
}

fn finish(total: f64, err: f64, q: f64, method: Method) -> EvalReport {
    if !total.is_finite() {
        return EvalReport::infinite();
    }
    let value = total.powf(1.0 / q);
    let error_bound = if total > 0.0 {
        value * err / (q * total)
    } else {
        err.powf(1.0 / q)
    };
    EvalReport {
        value,
        error_bound,
        method,
    }
}

/// `Σ v_i^q ∫_{piece} W` for a step function.
fn exact_step_integral(d: &DecreasingStep, w: &Weight, q: f64) -> Option<f64> {
    let mut total = 0.0;
    for (l, r, v) in d.pieces() {
        if v == 0.0 {
            continue;
        }
        total += v.powf(q) * w.exact_integral(l, r)?;
    }
    Some(total)
}

fn eval_sup(shape: &Shape, h: &dyn Decreasing, b: f64, cfg: &QuadConfig) -> EvalReport {
    let v = &shape.weight;
    let end = if shape.star {
        b
    } else {
        h.support_end().min(b)
    };
    let end = end.min(v.support_end());

    // Step data under a single power: maximise each piece at an endpoint.
    if !shape.star {
        if let (Some(d), Some(terms)) = (h.as_step(), v.pure_powers()) {
            if let [(c, beta)] = terms[..] {
                let mut best: f64 = 0.0;
                for (l, r, val) in d.pieces() {
                    let s = if beta > 0.0 {
                        r.powf(beta)
                    } else if beta == 0.0 {
                        1.0
                    } else if l == 0.0 {
                        f64::INFINITY
                    } else {
                        l.powf(beta)
                    };
                    best = best.max(val * c * s);
                }
                return if best.is_finite() {
                    EvalReport::exact(best)
                } else {
                    EvalReport::infinite()
                };
            }
        }
    }

    let hh = |t: f64| {
        if shape.star {
            h.cumulative(t) / t
        } else {
            h.value(t)
        }
    };
    let g = |t: f64| {
        let x = hh(t);
        if x == 0.0 {
            0.0
        } else {
            x * v.eval(t)
        }
    };

    if end.is_infinite() {
        if let Some((_, asym, _)) = h_tail(h, shape.star) {
            if let Some(va) = v.at_infinity() {
                if !asym.mul(va).bounded(Endpoint::Infinity) {
                    return EvalReport::infinite();
                }
            }
        }
    }
    let mut breaks = h.breakpoints();
    breaks.extend(v.breakpoints());
    let s = sup_on_interval(&g, 0.0, end, &breaks, cfg.rel_tol);
    if s.is_infinite() {
        return EvalReport::infinite();
    }
    EvalReport {
        value: s,
        error_bound: cfg.rel_tol * s,
        method: Method::Quadrature,
    }
}

/// `∫ f* g* ≤ ‖f‖_p ‖g‖_{p'}` for a Lebesgue spec.
pub fn holder_check(spec: &NormSpec, f: &StepFunction, g: &StepFunction) -> Result<bool> {
    let NormKind::Lebesgue { p } = spec.kind else {
        return Err(Error::Unsupported(
            "Hölder check needs a Lebesgue functional".into(),
        ));
    };
    if p < 1.0 {
        return Err(Error::Unsupported("Hölder check needs p ≥ 1".into()));
    }
    let conj = if p == 1.0 {
        f64::INFINITY
    } else if p.is_infinite() {
        1.0
    } else {
        p / (p - 1.0)
    };
    let fs = rearrange(f);
    let gs = rearrange(g);
    let lhs = fs.as_step().mul(gs.as_step())?.integral();
    let rhs = eval_norm(spec, f)?.value * eval_norm(&NormSpec::lebesgue(conj, spec.b)?, g)?.value;
    Ok(lhs <= rhs * (1.0 + 1e-12) + 1e-12)
}
