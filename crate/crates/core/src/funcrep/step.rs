use serde::{Deserialize, Serialize};

use super::extended::Ext;
use crate::error::{Error, Result};

/// Relative slack when a last breakpoint overshoots `b` by rounding.
const END_SLACK: f64 = 1e-12;

/// A nonnegative function on `(0, b)` that equals `values[i]` on
/// `(ends[i-1], ends[i]]` (with `ends[-1] = 0`) and vanishes beyond the last
/// breakpoint.
#[derive(Clone, Debug, PartialEq)]
pub struct StepFunction {
    b: f64,
    ends: Vec<f64>,
    values: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct StepJson {
    b: Ext,
    pieces: Vec<(f64, f64)>,
}

impl Serialize for StepFunction {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        StepJson {
            b: Ext(self.b),
            pieces: self.pieces_right().collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for StepFunction {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = StepJson::deserialize(d)?;
        StepFunction::new(raw.b.0, raw.pieces).map_err(serde::de::Error::custom)
    }
}

pub(crate) fn check_domain(b: f64) -> Result<()> {
    if b.is_nan() || b <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "domain length must be positive, got {b}"
        )));
    }
    Ok(())
}

impl StepFunction {
    /// Builds from `(right endpoint, value)` pairs in ascending order.
    pub fn new(b: f64, pieces: Vec<(f64, f64)>) -> Result<Self> {
        let (ends, values) = pieces.into_iter().unzip();
        Self::from_parts(b, ends, values)
    }

    pub fn from_parts(b: f64, mut ends: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        check_domain(b)?;
        if ends.len() != values.len() {
            return Err(Error::InvalidFunction(
                "breakpoints and values differ in length".into(),
            ));
        }
        let mut prev = 0.0;
        for (i, &t) in ends.iter().enumerate() {
            if !t.is_finite() || t <= prev {
                return Err(Error::InvalidFunction(format!(
                    "breakpoint {i} ({t}) is not finite and strictly increasing"
                )));
            }
            prev = t;
        }
        if let Some(last) = ends.last_mut() {
            if *last > b {
                if *last <= b * (1.0 + END_SLACK) {
                    *last = b;
                } else {
                    return Err(Error::InvalidFunction(format!(
                        "last breakpoint {last} exceeds domain length {b}"
                    )));
                }
            }
        }
        if let Some((i, v)) = values
            .iter()
            .enumerate()
            .find(|(_, v)| !v.is_finite() || **v < 0.0)
        {
            return Err(Error::InvalidFunction(format!(
                "value {i} ({v}) must be finite and nonnegative"
            )));
        }
        Ok(Self { b, ends, values })
    }

    /// Builds from consecutive `(length, value)` blocks starting at 0.
    pub fn from_lengths(b: f64, blocks: impl IntoIterator<Item = (f64, f64)>) -> Result<Self> {
        let mut t = 0.0;
        let mut ends = Vec::new();
        let mut values = Vec::new();
        for (len, v) in blocks {
            if len <= 0.0 {
                continue;
            }
            t += len;
            ends.push(t);
            values.push(v);
        }
        Self::from_parts(b, ends, values)
    }

    pub fn zero(b: f64) -> Result<Self> {
        Self::from_parts(b, Vec::new(), Vec::new())
    }

    pub fn indicator(b: f64, a: f64) -> Result<Self> {
        Self::new(b, vec![(a, 1.0)])
    }

    /// The constant `c` on the whole of a finite domain.
    pub fn constant(b: f64, c: f64) -> Result<Self> {
        if !b.is_finite() {
            return Err(Error::InvalidFunction(
                "a nonzero constant has unbounded support on an infinite domain".into(),
            ));
        }
        Self::new(b, vec![(b, c)])
    }

    pub fn domain(&self) -> f64 {
        self.b
    }

    pub fn ends(&self) -> &[f64] {
        &self.ends
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.ends.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ends.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&v| v == 0.0)
    }

    pub fn max_value(&self) -> f64 {
        self.values.iter().copied().fold(0.0, f64::max)
    }

    /// Right end of the last piece (0 for the empty function).
    pub fn support_end(&self) -> f64 {
        self.ends.last().copied().unwrap_or(0.0)
    }

    pub fn pieces_right(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.ends.iter().copied().zip(self.values.iter().copied())
    }

    /// `(left, right, value)` for every stored piece.
    pub fn pieces(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        self.ends.iter().enumerate().map(move |(i, &r)| {
            (
                if i == 0 { 0.0 } else { self.ends[i - 1] },
                r,
                self.values[i],
            )
        })
    }

    /// `(length, value)` blocks, including the zero tail when `b` is finite.
    pub fn blocks(&self) -> Vec<(f64, f64)> {
        let mut out: Vec<_> = self.pieces().map(|(l, r, v)| (r - l, v)).collect();
        let end = self.support_end();
        if self.b.is_finite() && end < self.b {
            out.push((self.b - end, 0.0));
        }
        out
    }

    pub fn value_at(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return self.values.first().copied().unwrap_or(0.0);
        }
        let i = self.ends.partition_point(|&e| e < t);
        self.values.get(i).copied().unwrap_or(0.0)
    }

    /// `∫_l^r f`, exactly.
    pub fn integral_over(&self, l: f64, r: f64) -> f64 {
        self.pieces()
            .map(|(a, c, v)| {
                let lo = a.max(l);
                let hi = c.min(r);
                if hi > lo {
                    v * (hi - lo)
                } else {
                    0.0
                }
            })
            .sum()
    }

    pub fn integral(&self) -> f64 {
        self.pieces().map(|(l, r, v)| v * (r - l)).sum()
    }

    /// Measure of `{f > λ}`.
    pub fn distribution(&self, lambda: f64) -> f64 {
        let mut m: f64 = self
            .pieces()
            .filter(|&(_, _, v)| v > lambda)
            .map(|(l, r, _)| r - l)
            .sum();
        if lambda < 0.0 {
            m += self.b - self.support_end();
        }
        m
    }

    pub fn map_values(&self, g: impl Fn(f64) -> f64) -> Result<Self> {
        Self::from_parts(
            self.b,
            self.ends.clone(),
            self.values.iter().map(|&v| g(v)).collect(),
        )
    }

    pub fn scale(&self, c: f64) -> Result<Self> {
        self.map_values(|v| c * v)
    }

    /// Pointwise `f^α`.
    pub fn powf(&self, alpha: f64) -> Result<Self> {
        self.map_values(|v| if v == 0.0 { 0.0 } else { v.powf(alpha) })
    }

    pub fn min_with(&self, cap: f64) -> Result<Self> {
        self.map_values(|v| v.min(cap))
    }

    fn merged_ends(&self, other: &Self) -> Vec<f64> {
        let mut ends: Vec<f64> = self.ends.iter().chain(other.ends.iter()).copied().collect();
        ends.sort_by(f64::total_cmp);
        ends.dedup();
        ends
    }

    fn combine(&self, other: &Self, op: impl Fn(f64, f64) -> f64) -> Result<Self> {
        if self.b != other.b {
            return Err(Error::DomainMismatch {
                function: other.b,
                spec: self.b,
            });
        }
        let ends = self.merged_ends(other);
        let values = ends
            .iter()
            .map(|&t| op(self.value_at(t), other.value_at(t)))
            .collect();
        Self::from_parts(self.b, ends, values)
    }

    /// Pointwise sum on the merged breakpoint grid.
    pub fn add(&self, other: &Self) -> Result<Self> {
        self.combine(other, |a, b| a + b)
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.combine(other, |a, b| a * b)
    }

    /// True when `self ≤ other` everywhere.
    pub fn dominated_by(&self, other: &Self) -> bool {
        self.b == other.b
            && self
                .merged_ends(other)
                .iter()
                .all(|&t| self.value_at(t) <= other.value_at(t))
    }

    /// The same blocks laid out in the order given by `perm`. The zero tail of a
    /// finite domain takes part in the permutation as one more block.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        let blocks = self.blocks();
        if perm.len() != blocks.len() {
            return Err(Error::InvalidParameter(format!(
                "permutation of length {} for {} blocks",
                perm.len(),
                blocks.len()
            )));
        }
        Self::from_lengths(self.b, perm.iter().map(|&i| blocks[i]))
    }
}

/// A step function whose values are non-increasing, i.e. its own rearrangement.
///
/// Canonical form: adjacent equal values merged, no zero-valued pieces.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(transparent)]
pub struct DecreasingStep(StepFunction);

impl<'de> Deserialize<'de> for DecreasingStep {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        DecreasingStep::new(StepFunction::deserialize(d)?).map_err(serde::de::Error::custom)
    }
}

impl DecreasingStep {
    /// Accepts `f` if its values are non-increasing; canonicalizes.
    pub fn new(f: StepFunction) -> Result<Self> {
        if f.values.windows(2).any(|w| w[1] > w[0]) {
            return Err(Error::InvalidFunction(
                "values are not non-increasing".into(),
            ));
        }
        Ok(Self::canonical(f))
    }

    /// Merges equal neighbours and drops zero pieces. Caller guarantees order.
    pub(crate) fn canonical(f: StepFunction) -> Self {
        let mut ends: Vec<f64> = Vec::with_capacity(f.ends.len());
        let mut values: Vec<f64> = Vec::with_capacity(f.values.len());
        for (t, v) in f.pieces_right() {
            if v == 0.0 {
                break;
            }
            match values.last() {
                Some(&last) if last == v => *ends.last_mut().unwrap() = t,
                _ => {
                    ends.push(t);
                    values.push(v);
                }
            }
        }
        Self(StepFunction {
            b: f.b,
            ends,
            values,
        })
    }

    pub fn as_step(&self) -> &StepFunction {
        &self.0
    }

    pub fn into_step(self) -> StepFunction {
        self.0
    }

    pub fn domain(&self) -> f64 {
        self.0.b
    }

    pub fn value_at(&self, t: f64) -> f64 {
        self.0.value_at(t)
    }

    /// `f*(0+)`, the essential supremum.
    pub fn head(&self) -> f64 {
        self.0.values.first().copied().unwrap_or(0.0)
    }

    pub fn scale(&self, c: f64) -> Result<Self> {
        Ok(Self::canonical(self.0.scale(c)?))
    }

    pub fn powf(&self, alpha: f64) -> Result<Self> {
        Ok(Self::canonical(self.0.powf(alpha)?))
    }
}

impl std::ops::Deref for DecreasingStep {
    type Target = StepFunction;

    fn deref(&self) -> &StepFunction {
        &self.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation() {
        assert!(StepFunction::new(1.0, vec![(0.5, 1.0), (0.4, 1.0)]).is_err());
        assert!(StepFunction::new(1.0, vec![(1.5, 1.0)]).is_err());
        assert!(StepFunction::new(1.0, vec![(0.5, -1.0)]).is_err());
        assert!(StepFunction::new(0.0, vec![]).is_err());
        assert!(StepFunction::new(f64::INFINITY, vec![(3.0, 1.0)]).is_ok());
        let f = StepFunction::new(1.0, vec![(1.0 + 1e-15, 1.0)]).unwrap();
        assert_eq!(f.support_end(), 1.0);
    }

    #[test]
    fn json_round_trip() {
        let f: StepFunction =
            serde_json::from_str(r#"{"b":"inf","pieces":[[1,2.5],[3,1]]}"#).unwrap();
        assert!(f.domain().is_infinite());
        assert_eq!(f.value_at(2.0), 1.0);
        assert_eq!(f.value_at(4.0), 0.0);
        let s = serde_json::to_string(&f).unwrap();
        assert_eq!(s, r#"{"b":"inf","pieces":[[1.0,2.5],[3.0,1.0]]}"#);
    }

    #[test]
    fn exact_integrals() {
        let f = StepFunction::new(1.0, vec![(0.2, 2.0), (0.5, 5.0), (1.0, 2.0)]).unwrap();
        assert!((f.integral() - (0.4 + 1.5 + 1.0)).abs() < 1e-15);
        assert!((f.integral_over(0.1, 0.3) - (0.2 + 0.5)).abs() < 1e-15);
        assert!((f.distribution(2.0) - 0.3).abs() < 1e-15);
        assert_eq!(f.distribution(-1.0), 1.0);
    }

    #[test]
    fn sum_on_merged_grid() {
        let f = StepFunction::new(1.0, vec![(0.5, 1.0)]).unwrap();
        let g = StepFunction::new(1.0, vec![(0.25, 2.0), (1.0, 1.0)]).unwrap();
        let h = f.add(&g).unwrap();
        assert_eq!(h.ends(), &[0.25, 0.5, 1.0]);
        assert_eq!(h.values(), &[3.0, 2.0, 1.0]);
    }

    #[test]
    fn decreasing_canonical() {
        let f =
            StepFunction::new(1.0, vec![(0.2, 3.0), (0.4, 3.0), (0.7, 1.0), (1.0, 0.0)]).unwrap();
        let d = DecreasingStep::new(f).unwrap();
        assert_eq!(d.ends(), &[0.4, 0.7]);
        assert_eq!(d.values(), &[3.0, 1.0]);
        assert!(
            DecreasingStep::new(StepFunction::new(1.0, vec![(0.5, 1.0), (1.0, 2.0)]).unwrap())
                .is_err()
        );
    }

    #[test]
    fn permutation_keeps_tail_block() {
        let f = StepFunction::new(1.0, vec![(0.25, 1.0)]).unwrap();
        let g = f.permuted(&[1, 0]).unwrap();
        assert_eq!(g.ends(), &[0.75, 1.0]);
        assert_eq!(g.values(), &[0.0, 1.0]);
    }
}
