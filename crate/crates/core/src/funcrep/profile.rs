use super::step::DecreasingStep;

/// `P(t) = ∫₀ᵗ d` for a non-increasing step function `d`, stored piecewise as
/// `P(t) = a_i + s_i t`.
#[derive(Clone, Debug, PartialEq)]
pub struct CumulativeProfile {
    ends: Vec<f64>,
    offsets: Vec<f64>,
    slopes: Vec<f64>,
    total: f64,
}

impl CumulativeProfile {
    pub fn new(d: &DecreasingStep) -> Self {
        let mut offsets = Vec::with_capacity(d.len());
        let mut acc = 0.0;
        for (l, r, v) in d.pieces() {
            offsets.push(acc - v * l);
            acc += v * (r - l);
        }
        Self {
            ends: d.ends().to_vec(),
            offsets,
            slopes: d.values().to_vec(),
            total: acc,
        }
    }

    pub fn ends(&self) -> &[f64] {
        &self.ends
    }

    /// `(a_i, s_i)` per piece.
    pub fn coefficients(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.offsets
            .iter()
            .copied()
            .zip(self.slopes.iter().copied())
    }

    /// `∫₀^∞ d`.
    pub fn total(&self) -> f64 {
        self.total
    }

    pub fn eval(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        let i = self.ends.partition_point(|&e| e < t);
        if i == self.ends.len() {
            self.total
        } else {
            self.offsets[i] + self.slopes[i] * t
        }
    }

    /// `P(t)/t`, i.e. `d**(t)`.
    pub fn average(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return self.slopes.first().copied().unwrap_or(0.0);
        }
        let i = self.ends.partition_point(|&e| e < t);
        if i == self.ends.len() {
            self.total / t
        } else {
            self.offsets[i] / t + self.slopes[i]
        }
    }
}
