//! `f*`, `P(t) = ∫₀ᵗ f*`, `f**`, `((f^α)**)^(1/α)` and the HLP relation.

mod decreasing;

use rand::seq::SliceRandom;
use rand::Rng;

pub use decreasing::{
    CappedPower, Decreasing, HardyAverage, PowerOf, Rearranged, ShiftedPower, Tail,
};

use crate::error::Result;
use crate::funcrep::{CumulativeProfile, DecreasingStep, StepFunction};

/// Relative tolerance of [`hlp_less`].
pub const HLP_TOL: f64 = 1e-12;

/// Non-increasing rearrangement: pieces sorted by value, equal values merged,
/// zero pieces dropped.
pub fn rearrange(f: &StepFunction) -> DecreasingStep {
    let mut blocks: Vec<(f64, f64)> = f
        .pieces()
        .filter(|&(_, _, v)| v > 0.0)
        .map(|(l, r, v)| (r - l, v))
        .collect();
    blocks.sort_by(|x, y| y.1.total_cmp(&x.1));
    let mut ends = Vec::with_capacity(blocks.len());
    let mut values: Vec<f64> = Vec::with_capacity(blocks.len());
    let mut t = 0.0;
    for (len, v) in blocks {
        t += len;
        if values.last() == Some(&v) {
            *ends.last_mut().unwrap() = t;
        } else {
            ends.push(t);
            values.push(v);
        }
    }
    let b = f.domain();
    if let Some(last) = ends.last_mut() {
        // Summed lengths may overshoot b by rounding.
        *last = last.min(b);
    }
    let step = StepFunction::from_parts(b, ends, values)
        .expect("rearranging a valid step function yields a valid step function");
    DecreasingStep::new(step).expect("sorted values are non-increasing")
}

pub fn cumulative(d: &DecreasingStep) -> CumulativeProfile {
    CumulativeProfile::new(d)
}

/// `t ↦ ((f^α)**(t))^(1/α)` built from the exact profile of `(f^α)*`.
#[derive(Debug)]
pub struct MaxRearrangement {
    alpha: f64,
    inner: PowerOf<HardyAverage>,
}

impl MaxRearrangement {
    pub fn new(f: &StepFunction, alpha: f64) -> Result<Self> {
        crate::norms::check_positive("alpha", alpha)?;
        let source = rearrange(&f.powf(alpha)?);
        Ok(Self::from_source(source, alpha))
    }

    /// From `(f^α)*` directly.
    pub fn from_source(source: DecreasingStep, alpha: f64) -> Self {
        Self {
            alpha,
            inner: PowerOf::new(HardyAverage::new(source), 1.0 / alpha),
        }
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// `(f^α)*`.
    pub fn source(&self) -> &DecreasingStep {
        self.inner.inner().source()
    }

    pub fn profile(&self) -> &CumulativeProfile {
        self.inner.inner().profile()
    }

    pub fn evaluate(&self, t: f64) -> f64 {
        self.inner.value(t)
    }
}

impl Decreasing for MaxRearrangement {
    fn domain(&self) -> f64 {
        self.inner.domain()
    }
    fn value(&self, t: f64) -> f64 {
        self.inner.value(t)
    }
    fn cumulative(&self, t: f64) -> f64 {
        self.inner.cumulative(t)
    }
    fn breakpoints(&self) -> Vec<f64> {
        self.inner.breakpoints()
    }
    fn support_end(&self) -> f64 {
        self.inner.support_end()
    }
    fn head(&self) -> Option<(f64, f64)> {
        self.inner.head()
    }
    fn tail(&self) -> Option<Tail> {
        self.inner.tail()
    }
}

/// `u ≺ v`: `∫₀ᵗ u* ≤ ∫₀ᵗ v*` for every `t`, checked at the merged breakpoints
/// (both sides are piecewise affine) with relative tolerance [`HLP_TOL`].
pub fn hlp_less(u: &StepFunction, v: &StepFunction) -> bool {
    let pu = cumulative(&rearrange(u));
    let pv = cumulative(&rearrange(v));
    let mut pts: Vec<f64> = pu.ends().iter().chain(pv.ends()).copied().collect();
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    pts.iter().all(|&t| {
        let (a, b) = (pu.eval(t), pv.eval(t));
        a <= b + HLP_TOL * a.abs().max(b.abs()).max(1.0)
    })
}

/// A random permutation of the blocks of `f` (zero tail included).
pub fn shuffle<R: Rng + ?Sized>(f: &StepFunction, rng: &mut R) -> StepFunction {
    let n = f.blocks().len();
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(rng);
    f.permuted(&perm)
        .expect("a permutation of the blocks is valid")
}
