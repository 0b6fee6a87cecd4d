//! Non-increasing functions on `(0, b)` in the form the norm evaluators need:
//! pointwise values, the prefix integral, smoothness breakpoints and, on
//! `(0, ∞)`, the power behaviour of the tail.

use std::sync::OnceLock;

use crate::funcrep::{integrate, Asymptote, CumulativeProfile, DecreasingStep, QuadConfig};

/// Behaviour beyond `start` on an infinite domain: `h(t) ≈ asym(t)`, with
/// equality when `exact`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tail {
    pub start: f64,
    pub asym: Asymptote,
    pub exact: bool,
}

pub trait Decreasing: Send + Sync + std::fmt::Debug {
    fn domain(&self) -> f64;

    fn value(&self, t: f64) -> f64;

    /// `∫₀ᵗ h`.
    fn cumulative(&self, t: f64) -> f64;

    /// Points where `h` is not smooth, ascending, including a finite
    /// `support_end`.
    fn breakpoints(&self) -> Vec<f64>;

    /// `h` vanishes beyond this point (which may be `b` or `+∞`).
    fn support_end(&self) -> f64;

    /// `Some((t₁, c))` when `h ≡ c` on `(0, t₁]`.
    fn head(&self) -> Option<(f64, f64)>;

    /// Tail of an unbounded support on `(0, ∞)`.
    fn tail(&self) -> Option<Tail> {
        None
    }

    fn as_step(&self) -> Option<&DecreasingStep> {
        None
    }
}

/// Inner integrals run tighter than the outer ones.
fn inner_cfg() -> QuadConfig {
    QuadConfig::with_rel_tol(1e-12)
}

/// `∫_l^r c t^β` for `β` not necessarily `≠ -1`.
fn power_integral(c: f64, beta: f64, l: f64, r: f64) -> f64 {
    if l == 0.0 {
        let e = beta + 1.0;
        return c * r.powf(e) / e;
    }
    power_integral_log(c, beta, l, (r / l).ln())
}

/// `∫_l^{l·e^λ} c t^β`, written so that short intervals do not cancel.
fn power_integral_log(c: f64, beta: f64, l: f64, lambda: f64) -> f64 {
    let e = beta + 1.0;
    if e == 0.0 {
        c * lambda
    } else {
        c * l.powf(e) * (e * lambda).exp_m1() / e
    }
}

/// A non-increasing step function with its exact profile.
#[derive(Clone, Debug)]
pub struct Rearranged {
    d: DecreasingStep,
    profile: CumulativeProfile,
}

impl Rearranged {
    pub fn new(d: DecreasingStep) -> Self {
        let profile = CumulativeProfile::new(&d);
        Self { d, profile }
    }

    pub fn profile(&self) -> &CumulativeProfile {
        &self.profile
    }
}

impl Decreasing for Rearranged {
    fn domain(&self) -> f64 {
        self.d.domain()
    }
    fn value(&self, t: f64) -> f64 {
        self.d.value_at(t)
    }
    fn cumulative(&self, t: f64) -> f64 {
        self.profile.eval(t)
    }
    fn breakpoints(&self) -> Vec<f64> {
        self.d.ends().to_vec()
    }
    fn support_end(&self) -> f64 {
        self.d.support_end()
    }
    fn head(&self) -> Option<(f64, f64)> {
        self.d.pieces_right().next()
    }
    fn as_step(&self) -> Option<&DecreasingStep> {
        Some(&self.d)
    }
}

/// `Ah(t) = (1/t)∫₀ᵗ h` for a non-increasing step function `h`.
#[derive(Clone, Debug)]
pub struct HardyAverage {
    d: DecreasingStep,
    profile: CumulativeProfile,
    /// `∫₀^{t_i} Ah` at every breakpoint.
    prefix: Vec<f64>,
}

impl HardyAverage {
    pub fn new(d: DecreasingStep) -> Self {
        let profile = CumulativeProfile::new(&d);
        let mut prefix = Vec::with_capacity(d.len());
        let mut acc = 0.0;
        for ((l, r, _), (a, s)) in d.pieces().zip(profile.coefficients()) {
            acc += if l == 0.0 {
                s * r
            } else {
                a * (r / l).ln() + s * (r - l)
            };
            prefix.push(acc);
        }
        Self { d, profile, prefix }
    }

    pub fn source(&self) -> &DecreasingStep {
        &self.d
    }

    pub fn profile(&self) -> &CumulativeProfile {
        &self.profile
    }
}

impl Decreasing for HardyAverage {
    fn domain(&self) -> f64 {
        self.d.domain()
    }

    fn value(&self, t: f64) -> f64 {
        self.profile.average(t)
    }

    fn cumulative(&self, t: f64) -> f64 {
        if t <= 0.0 || self.d.is_empty() {
            return 0.0;
        }
        let ends = self.d.ends();
        let i = ends.partition_point(|&e| e < t);
        if i == ends.len() {
            let e = ends[i - 1];
            return self.prefix[i - 1] + self.profile.total() * (t / e).ln();
        }
        let (a, s) = self.profile.coefficients().nth(i).unwrap();
        if i == 0 {
            s * t
        } else {
            let l = ends[i - 1];
            self.prefix[i - 1] + a * (t / l).ln() + s * (t - l)
        }
    }

    fn breakpoints(&self) -> Vec<f64> {
        self.d.ends().to_vec()
    }

    fn support_end(&self) -> f64 {
        if self.d.is_empty() {
            0.0
        } else {
            self.d.domain()
        }
    }

    fn head(&self) -> Option<(f64, f64)> {
        self.d.pieces_right().next()
    }

    fn tail(&self) -> Option<Tail> {
        if self.d.domain().is_finite() || self.d.is_empty() {
            return None;
        }
        Some(Tail {
            start: self.d.support_end(),
            asym: Asymptote::new(self.profile.total(), -1.0, 0.0),
            exact: true,
        })
    }
}

/// `t ↦ h(t)^e`, with its prefix integral computed by quadrature on demand.
#[derive(Debug)]
pub struct PowerOf<D> {
    inner: D,
    exponent: f64,
    prefix: OnceLock<(Vec<f64>, Vec<f64>)>,
}

impl<D: Decreasing> PowerOf<D> {
    pub fn new(inner: D, exponent: f64) -> Self {
        Self {
            inner,
            exponent,
            prefix: OnceLock::new(),
        }
    }

    pub fn inner(&self) -> &D {
        &self.inner
    }

    pub fn exponent(&self) -> f64 {
        self.exponent
    }

    /// `∫_l^r h^e` where `[l, r]` contains no breakpoint in its interior.
    fn piece_integral(&self, l: f64, r: f64) -> f64 {
        if r <= l {
            return 0.0;
        }
        if let Some((t1, c)) = self.head() {
            if r <= t1 {
                return c * (r - l);
            }
        }
        if let Some(tail) = self.tail() {
            if tail.exact && l >= tail.start && tail.asym.log_power == 0.0 {
                return power_integral(tail.asym.coef, tail.asym.power, l, r);
            }
        }
        let f = |s: f64| self.value(s);
        integrate(&f, l, r, &[], &inner_cfg()).value
    }

    fn prefix(&self) -> &(Vec<f64>, Vec<f64>) {
        self.prefix.get_or_init(|| {
            let mut pts = vec![0.0];
            pts.extend(self.inner.breakpoints());
            let mut acc = 0.0;
            let mut vals = vec![0.0];
            for w in pts.windows(2) {
                acc += self.piece_integral(w[0], w[1]);
                vals.push(acc);
            }
            (pts, vals)
        })
    }
}

impl<D: Decreasing> Decreasing for PowerOf<D> {
    fn domain(&self) -> f64 {
        self.inner.domain()
    }

    fn value(&self, t: f64) -> f64 {
        let v = self.inner.value(t);
        if v == 0.0 {
            0.0
        } else {
            v.powf(self.exponent)
        }
    }

    fn cumulative(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        let t = t.min(self.support_end());
        let (pts, vals) = self.prefix();
        let i = pts.partition_point(|&p| p <= t) - 1;
        vals[i] + self.piece_integral(pts[i], t)
    }

    fn breakpoints(&self) -> Vec<f64> {
        self.inner.breakpoints()
    }

    fn support_end(&self) -> f64 {
        self.inner.support_end()
    }

    fn head(&self) -> Option<(f64, f64)> {
        self.inner
            .head()
            .map(|(t1, c)| (t1, if c == 0.0 { 0.0 } else { c.powf(self.exponent) }))
    }

    fn tail(&self) -> Option<Tail> {
        self.inner.tail().map(|t| Tail {
            asym: t.asym.powf(self.exponent),
            ..t
        })
    }
}

/// `min(1, (a/t)^θ)` on `(0, b)`.
#[derive(Clone, Copy, Debug)]
pub struct CappedPower {
    pub b: f64,
    pub a: f64,
    pub theta: f64,
}

impl Decreasing for CappedPower {
    fn domain(&self) -> f64 {
        self.b
    }
    fn value(&self, t: f64) -> f64 {
        if t <= self.a {
            1.0
        } else {
            (self.a / t).powf(self.theta)
        }
    }
    fn cumulative(&self, t: f64) -> f64 {
        if t <= self.a {
            t.max(0.0)
        } else {
            self.a + power_integral(self.a.powf(self.theta), -self.theta, self.a, t)
        }
    }
    fn breakpoints(&self) -> Vec<f64> {
        vec![self.a]
    }
    fn support_end(&self) -> f64 {
        self.b
    }
    fn head(&self) -> Option<(f64, f64)> {
        Some((self.a, 1.0))
    }
    fn tail(&self) -> Option<Tail> {
        self.b.is_infinite().then(|| Tail {
            start: self.a,
            asym: Asymptote::new(self.a.powf(self.theta), -self.theta, 0.0),
            exact: true,
        })
    }
}

/// `(t + a)^(-θ)` on `(0, b - a)`, the rearrangement of `t^(-θ) χ_(a,b)`.
#[derive(Clone, Copy, Debug)]
pub struct ShiftedPower {
    pub b: f64,
    pub a: f64,
    pub theta: f64,
}

impl Decreasing for ShiftedPower {
    fn domain(&self) -> f64 {
        self.b
    }
    fn value(&self, t: f64) -> f64 {
        if t < self.b - self.a {
            (t + self.a).powf(-self.theta)
        } else {
            0.0
        }
    }
    fn cumulative(&self, t: f64) -> f64 {
        let t = t.min(self.b - self.a);
        if t <= 0.0 {
            0.0
        } else {
            power_integral_log(1.0, -self.theta, self.a, (t / self.a).ln_1p())
        }
    }
    fn breakpoints(&self) -> Vec<f64> {
        let end = self.b - self.a;
        if end.is_finite() {
            vec![end]
        } else {
            Vec::new()
        }
    }
    fn support_end(&self) -> f64 {
        self.b - self.a
    }
    fn head(&self) -> Option<(f64, f64)> {
        None
    }
    fn tail(&self) -> Option<Tail> {
        self.b.is_infinite().then(|| Tail {
            start: self.a.max(1.0),
            asym: Asymptote::new(1.0, -self.theta, 0.0),
            exact: false,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::funcrep::StepFunction;

    fn dec(b: f64, p: Vec<(f64, f64)>) -> DecreasingStep {
        DecreasingStep::new(StepFunction::new(b, p).unwrap()).unwrap()
    }

    #[test]
    fn hardy_average_examples() {
        let a = HardyAverage::new(dec(1.0, vec![(0.25, 1.0)]));
        for t in [0.1, 0.25, 0.5, 1.0] {
            assert!((a.value(t) - (0.25 / t).min(1.0)).abs() < 1e-15);
        }
        // ∫₀¹ min(1, a/t) = a(1 + ln(1/a)).
        assert!((a.cumulative(1.0) - 0.25 * (1.0 + 4f64.ln())).abs() < 1e-14);
        let c = HardyAverage::new(dec(2.0, vec![(2.0, 3.0)]));
        assert_eq!(c.value(1.3), 3.0);
        let h = HardyAverage::new(dec(1.0, vec![(0.5, 2.0)]));
        assert!((h.value(1.0) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn power_of_cumulative_matches_closed_form() {
        // ((χ_(0,a])**)^(1/α) with α = 1/2 is min(1, (a/t)²); ∫₀ᵗ = 2a - a²/t.
        let p = PowerOf::new(HardyAverage::new(dec(1.0, vec![(0.2, 1.0)])), 2.0);
        for t in [0.1, 0.2, 0.5, 1.0] {
            let want = if t <= 0.2 { t } else { 0.4 - 0.04 / t };
            assert!((p.cumulative(t) - want).abs() < 1e-12, "{t}");
        }
        let q = PowerOf::new(
            HardyAverage::new(dec(1.0, vec![(0.3, 2.0), (0.7, 1.0)])),
            1.5,
        );
        let quad = integrate(&|s: f64| q.value(s), 0.0, 0.9, &[0.3, 0.7], &inner_cfg()).value;
        assert!((q.cumulative(0.9) - quad).abs() < 1e-12);
    }

    #[test]
    fn capped_and_shifted() {
        let c = CappedPower {
            b: f64::INFINITY,
            a: 1.0,
            theta: 2.0,
        };
        assert!((c.cumulative(1e6) - (2.0 - 1e-6)).abs() < 1e-12);
        let s = ShiftedPower {
            b: 1.0,
            a: 0.25,
            theta: 1.0,
        };
        assert!((s.cumulative(1.0) - 4f64.ln()).abs() < 1e-14);
        assert_eq!(s.value(0.8), 0.0);
    }
}
