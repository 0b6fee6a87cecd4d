//! Seeded random and structured families of step functions.
//!
//! Sample `i` of a run with seed `s` is drawn from its own ChaCha stream
//! `(s, i)`, so samples can be generated in any order or in parallel.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::funcrep::StepFunction;

pub const MAX_PIECES: usize = 8;

/// The generator for sample `index` under `seed`.
pub fn rng_for(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

fn log_uniform<R: Rng + ?Sized>(rng: &mut R, lo: f64, hi: f64) -> f64 {
    (rng.gen_range(lo.ln()..hi.ln())).exp()
}

/// Reference length for placing supports: `b`, or 1 on an infinite domain.
fn scale(b: f64) -> f64 {
    if b.is_finite() {
        b
    } else {
        1.0
    }
}

/// Piece lengths summing to a random fraction of the domain (or a random
/// length around 1 when `b = ∞`).
fn random_lengths<R: Rng + ?Sized>(rng: &mut R, b: f64, n: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..n).map(|_| log_uniform(rng, 1e-3, 1.0)).collect();
    let total: f64 = raw.iter().sum();
    let support = if b.is_finite() {
        b * rng.gen_range(0.3..=1.0)
    } else {
        log_uniform(rng, 0.1, 10.0)
    };
    let mut lens: Vec<f64> = raw.iter().map(|l| l / total * support).collect();
    if b.is_finite() {
        // Keep the summed support inside (0, b].
        let sum: f64 = lens.iter().sum();
        if sum > b {
            let last = lens.last_mut().unwrap();
            *last -= sum - b;
        }
    }
    lens
}

fn random_values<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<f64> {
    (0..n).map(|_| log_uniform(rng, 1e-2, 1e2)).collect()
}

/// One to [`MAX_PIECES`] pieces with log-uniform lengths and values; sorted
/// samples are non-increasing, unsorted ones may contain zero pieces.
pub fn random_step<R: Rng + ?Sized>(rng: &mut R, b: f64, sorted: bool) -> StepFunction {
    let n = rng.gen_range(1..=MAX_PIECES);
    let lens = random_lengths(rng, b, n);
    let mut values = random_values(rng, n);
    if sorted {
        values.sort_by(|x, y| y.total_cmp(x));
    } else {
        for v in values.iter_mut() {
            if rng.gen_bool(0.1) {
                *v = 0.0;
            }
        }
    }
    StepFunction::from_lengths(b, lens.into_iter().zip(values))
        .expect("generated lengths are positive and fit the domain")
}

/// `n` samples, sample `i` from stream `(seed, i)`; every third sample sorted.
pub fn random_family(b: f64, n: usize, seed: u64) -> Vec<StepFunction> {
    (0..n)
        .map(|i| {
            let mut rng = rng_for(seed, i as u64);
            random_step(&mut rng, b, i % 3 == 0)
        })
        .collect()
}

/// Two functions on one shared breakpoint grid.
pub fn random_pair<R: Rng + ?Sized>(rng: &mut R, b: f64) -> (StepFunction, StepFunction) {
    if rng.gen_bool(0.25) {
        return disjoint_pair(rng, b);
    }
    let n = rng.gen_range(1..=MAX_PIECES);
    let lens = random_lengths(rng, b, n);
    let draw = |rng: &mut R| {
        let vals = random_values(rng, n);
        let vals: Vec<f64> = vals
            .into_iter()
            .map(|v| if rng.gen_bool(0.2) { 0.0 } else { v })
            .collect();
        StepFunction::from_lengths(b, lens.iter().copied().zip(vals)).expect("valid grid")
    };
    let f = draw(rng);
    let g = draw(rng);
    (f, g)
}

/// A tall narrow block next to a low wide one, with disjoint supports.
pub fn disjoint_pair<R: Rng + ?Sized>(rng: &mut R, b: f64) -> (StepFunction, StepFunction) {
    let s = scale(b);
    let l1 = s * log_uniform(rng, 1e-3, 0.1);
    let l2 = (s - l1) * rng.gen_range(0.05..=1.0);
    let h1 = log_uniform(rng, 1.0, 100.0);
    let h2 = h1 * log_uniform(rng, 1e-3, 0.5);
    let f = StepFunction::new(b, vec![(l1, h1)]).expect("valid block");
    let g = StepFunction::from_lengths(b, [(l1, 0.0), (l2, h2)]).expect("valid block");
    (f, g)
}

pub fn random_pairs(b: f64, n: usize, seed: u64) -> Vec<(StepFunction, StepFunction)> {
    (0..n)
        .map(|i| random_pair(&mut rng_for(seed, i as u64), b))
        .collect()
}

/// Exponents of the discretized powers `t^(-θ)`.
pub const STAIRCASE_THETAS: [f64; 10] = [0.1, 0.2, 0.3, 0.4, 0.49, 0.6, 0.7, 0.8, 0.9, 0.95];

/// `t^(-θ)` sampled at the right endpoints of the grid `s·2^(-k)`,
/// `k < levels`.
pub fn power_staircase(b: f64, theta: f64, levels: usize) -> StepFunction {
    let s = scale(b);
    let pieces: Vec<(f64, f64)> = (0..levels)
        .rev()
        .map(|k| {
            let t = s * 0.5f64.powi(k as i32);
            (t, t.powf(-theta))
        })
        .collect();
    StepFunction::new(b, pieces).expect("geometric grid is increasing")
}

/// Indicators, power staircases, geometric staircases and two-plateau
/// functions, in a fixed order.
pub fn structured_family(b: f64) -> Vec<StepFunction> {
    let s = scale(b);
    let mut out = Vec::new();
    for k in 0..=12 {
        out.push(StepFunction::indicator(b, s * 10f64.powf(-(k as f64) / 2.0)).unwrap());
    }
    for theta in STAIRCASE_THETAS {
        out.push(power_staircase(b, theta, 80));
    }
    for ratio in [0.5f64, 0.8] {
        let pieces: Vec<(f64, f64)> = (1..=10)
            .map(|k| (s * k as f64 / 10.0, ratio.powi(k - 1)))
            .collect();
        out.push(StepFunction::new(b, pieces).unwrap());
    }
    for a1 in [0.01f64, 0.1, 0.5] {
        for width in [0.1, 0.5] {
            for v2 in [0.5, 0.1, 0.01] {
                let a2 = (a1 + width).min(1.0);
                out.push(StepFunction::new(b, vec![(s * a1, 1.0), (s * a2, v2)]).unwrap());
            }
        }
    }
    out
}

/// Pairs from the structured family: each function with its neighbours and
/// with disjoint translates.
pub fn structured_pairs(b: f64) -> Vec<(StepFunction, StepFunction)> {
    let fam = structured_family(b);
    let mut out: Vec<_> = fam
        .windows(2)
        .map(|w| (w[0].clone(), w[1].clone()))
        .collect();
    let s = scale(b);
    for (l1, h1, l2, h2) in [
        (0.01, 1.0, 0.2, 0.05),
        (0.001, 10.0, 0.5, 0.02),
        (0.05, 1.0, 0.5, 0.1),
        (0.1, 1.0, 0.1, 1.0),
    ] {
        out.push((
            StepFunction::new(b, vec![(s * l1, h1)]).unwrap(),
            StepFunction::from_lengths(b, [(s * l1, 0.0), (s * l2, h2)]).unwrap(),
        ));
    }
    out
}
