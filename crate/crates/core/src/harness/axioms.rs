//! Axiom suites over seeded samples.
//!
//! Every claim is reported as a line with a normalised `worst` value: the claim
//! holds on the sample iff `worst ≤ 1 + tol`. The `expected` field carries what
//! the theory predicts for the target, or `None` where it predicts nothing and
//! the line is informational.

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::bracket::{eval_bracket, is_nontrivial, modulus_of_concavity_bound, BracketSpec, Mode};
use crate::error::Result;
use crate::funcrep::{extended, CumulativeProfile, StepFunction};
use crate::norms::{eval_norm, NormKind, NormSpec, RiClass};
use crate::par::{argmax, map_indexed, Execution};
use crate::rearrange::{rearrange, shuffle};
use crate::sample::{self, rng_for};
use rand::Rng;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AxiomTarget {
    Norm(NormSpec),
    Bracket(BracketSpec),
}

impl AxiomTarget {
    pub fn b(&self) -> f64 {
        match self {
            AxiomTarget::Norm(s) => s.b,
            AxiomTarget::Bracket(s) => s.b(),
        }
    }

    pub fn eval(&self, f: &StepFunction) -> Result<f64> {
        Ok(match self {
            AxiomTarget::Norm(s) => eval_norm(s, f)?.value,
            AxiomTarget::Bracket(s) => eval_bracket(s, f)?.value,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AxiomSet {
    /// P1 to P6.
    RiNorm,
    /// Q1 with P2, P3, P4 and P6.
    Quasi,
}

/// What the theory says about a target.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Plan {
    pub set: AxiomSet,
    /// Asserted quasi-triangle constant, if one is known.
    pub constant: Option<f64>,
    /// Whether indicators are expected to have finite norm; `None` when
    /// undecided.
    pub indicators_finite: Option<bool>,
}

pub fn plan(target: &AxiomTarget) -> Plan {
    match target {
        AxiomTarget::Norm(s) => {
            if s.ri_class() == RiClass::Norm {
                Plan {
                    set: AxiomSet::RiNorm,
                    constant: Some(1.0),
                    indicators_finite: Some(true),
                }
            } else {
                let constant = match s.kind {
                    NormKind::Lebesgue { p } if p < 1.0 => Some(2f64.powf(1.0 / p - 1.0)),
                    _ => None,
                };
                Plan {
                    set: AxiomSet::Quasi,
                    constant,
                    indicators_finite: Some(true),
                }
            }
        }
        AxiomTarget::Bracket(s) => {
            let ri_base = s.base.ri_class() == RiClass::Norm;
            if s.mode == Mode::Brace || !ri_base {
                return Plan {
                    set: AxiomSet::Quasi,
                    constant: None,
                    indicators_finite: None,
                };
            }
            let indicators_finite = if s.b().is_finite() {
                Some(true)
            } else {
                is_nontrivial(s).ok()
            };
            if s.alpha >= 1.0 {
                Plan {
                    set: AxiomSet::RiNorm,
                    constant: Some(1.0),
                    indicators_finite,
                }
            } else {
                Plan {
                    set: AxiomSet::Quasi,
                    constant: Some(modulus_of_concavity_bound(s.alpha)),
                    indicators_finite,
                }
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AxiomLine {
    pub claim: String,
    pub spec: AxiomTarget,
    pub holds: bool,
    pub expected: Option<bool>,
    #[serde(with = "extended")]
    pub worst: f64,
    pub witness: Value,
}

impl AxiomLine {
    pub fn as_expected(&self) -> bool {
        self.expected.is_none_or(|e| e == self.holds)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AxiomReport {
    pub set: AxiomSet,
    pub seed: u64,
    pub samples: usize,
    pub tol: f64,
    pub lines: Vec<AxiomLine>,
}

impl AxiomReport {
    pub fn line(&self, claim: &str) -> Option<&AxiomLine> {
        self.lines.iter().find(|l| l.claim == claim)
    }

    /// Every line with a prediction agrees with it.
    pub fn as_expected(&self) -> bool {
        self.lines.iter().all(AxiomLine::as_expected)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AxiomConfig {
    /// Random pairs and random functions drawn per claim.
    pub n: usize,
    pub seed: u64,
    pub tol: f64,
    pub exec: Execution,
}

impl Default for AxiomConfig {
    fn default() -> Self {
        Self {
            n: 100,
            seed: 0,
            tol: 1e-6,
            exec: Execution::default(),
        }
    }
}

/// Truncation levels of the (P3) sequences.
const P3_LEVELS: usize = 8;
/// Functions the (P3) sequences are built from.
const P3_FUNCTIONS: usize = 40;
/// Safety factor on the calibrated (P5) constant.
const P5_MARGIN: f64 = 2.0;
const SCALARS: [f64; 3] = [0.5, 2.0, 7.0];

/// The largest entry and its index, skipping NaN entries; `empty` when
/// nothing was measurable.
fn worst_of(values: &[f64], empty: f64) -> (f64, Option<usize>) {
    match argmax(values) {
        Some(i) => (values[i], Some(i)),
        None => (empty, None),
    }
}

fn usable(x: f64) -> bool {
    x > 0.0 && x.is_finite()
}

struct Suite<'a> {
    target: &'a AxiomTarget,
    cfg: AxiomConfig,
    b: f64,
}

impl Suite<'_> {
    fn line(&self, claim: &str, expected: Option<bool>, worst: f64, witness: Value) -> AxiomLine {
        AxiomLine {
            claim: claim.into(),
            spec: self.target.clone(),
            holds: worst <= 1.0 + self.cfg.tol,
            expected,
            worst,
            witness,
        }
    }

    fn map<T: Send>(
        &self,
        n: usize,
        f: impl Fn(usize) -> Result<T> + Sync + Send,
    ) -> Result<Vec<T>> {
        map_indexed(self.cfg.exec, n, f).into_iter().collect()
    }

    fn family(&self, stream: u64) -> Vec<StepFunction> {
        sample::random_family(self.b, self.cfg.n, self.cfg.seed.wrapping_add(stream))
    }

    fn triangle(&self, name: &str, constant: Option<f64>) -> Result<AxiomLine> {
        let mut pairs = sample::random_pairs(self.b, self.cfg.n, self.cfg.seed);
        pairs.extend(sample::structured_pairs(self.b));
        let raw = self.map(pairs.len(), |i| {
            let (f, g) = &pairs[i];
            let (a, c) = (self.target.eval(f)?, self.target.eval(g)?);
            let s = self.target.eval(&f.add(g)?)?;
            let den = a + c;
            Ok(if usable(den) && s.is_finite() {
                s / den
            } else {
                f64::NAN
            })
        })?;
        let (worst, at) = worst_of(&raw, 1.0);
        let k = constant.unwrap_or(f64::INFINITY);
        let witness = at.map_or(
            Value::Null,
            |i| json!({"f": pairs[i].0, "g": pairs[i].1, "ratio": raw[i], "constant": constant}),
        );
        Ok(self.line(name, constant.map(|_| true), worst / k, witness))
    }

    fn homogeneity(&self, name: &str) -> Result<AxiomLine> {
        let fam = self.family(1);
        let dev = self.map(fam.len(), |i| {
            let base = self.target.eval(&fam[i])?;
            if !usable(base) {
                return Ok((f64::NAN, 0.0));
            }
            let mut worst = (0.0f64, SCALARS[0]);
            for c in SCALARS {
                let v = self.target.eval(&fam[i].scale(c)?)?;
                let d = (v / (c * base) - 1.0).abs();
                if d > worst.0 {
                    worst = (d, c);
                }
            }
            Ok(worst)
        })?;
        let devs: Vec<f64> = dev.iter().map(|d| d.0).collect();
        let (worst, at) = worst_of(&devs, 0.0);
        let witness = at.map_or(
            Value::Null,
            |i| json!({"f": fam[i], "c": dev[i].1, "deviation": devs[i]}),
        );
        Ok(self.line(name, Some(true), 1.0 + worst, witness))
    }

    fn definiteness(&self, name: &str) -> Result<AxiomLine> {
        let zero = self.target.eval(&StepFunction::zero(self.b)?)?;
        let fam = self.family(1);
        let vals = self.map(fam.len(), |i| self.target.eval(&fam[i]))?;
        let vanishing = fam
            .iter()
            .zip(&vals)
            .position(|(f, &v)| !f.is_zero() && v <= 0.0);
        let worst = if vanishing.is_some() {
            f64::INFINITY
        } else {
            1.0 + zero
        };
        let witness = json!({"zero": zero, "vanishing": vanishing.map(|i| &fam[i])});
        Ok(self.line(name, Some(true), worst, witness))
    }

    fn lattice(&self) -> Result<AxiomLine> {
        let fam = self.family(2);
        let out = self.map(fam.len(), |i| {
            let f = &fam[i];
            let mut rng = rng_for(self.cfg.seed.wrapping_add(5), i as u64);
            let scaled: Vec<f64> = f
                .values()
                .iter()
                .map(|v| v * rng.gen_range(0.0..=1.0))
                .collect();
            let g = StepFunction::from_parts(self.b, f.ends().to_vec(), scaled)?;
            let (vf, vg) = (self.target.eval(f)?, self.target.eval(&g)?);
            let r = if usable(vf) && vg.is_finite() {
                vg / vf
            } else {
                f64::NAN
            };
            Ok((r, g))
        })?;
        let ratios: Vec<f64> = out.iter().map(|o| o.0).collect();
        let (worst, at) = worst_of(&ratios, 1.0);
        let witness = at.map_or(
            Value::Null,
            |i| json!({"f": fam[i], "g": out[i].1, "ratio": ratios[i]}),
        );
        Ok(self.line("P2", Some(true), worst, witness))
    }

    fn truncation(&self) -> Result<AxiomLine> {
        let fam: Vec<StepFunction> = self.family(3).into_iter().take(P3_FUNCTIONS).collect();
        let out = self.map(fam.len(), |i| {
            let f = &fam[i];
            let top = f.max_value();
            let full = self.target.eval(f)?;
            if !usable(full) {
                return Ok(f64::NAN);
            }
            let mut vals = Vec::with_capacity(P3_LEVELS + 1);
            for n in 1..=P3_LEVELS {
                vals.push(
                    self.target
                        .eval(&f.min_with(top * n as f64 / P3_LEVELS as f64)?)?,
                );
            }
            // Non-decreasing along the sequence, and the last term is f itself.
            let climb = vals.windows(2).map(|w| w[0] / w[1]).fold(0.0, f64::max);
            let gap = 1.0 + (vals[P3_LEVELS - 1] / full - 1.0).abs();
            Ok(climb.max(gap))
        })?;
        let (worst, at) = worst_of(&out, 1.0);
        let witness = at.map_or(Value::Null, |i| json!({"f": fam[i], "levels": P3_LEVELS}));
        Ok(self.line("P3", Some(true), worst, witness))
    }

    fn indicators(&self, expected: Option<bool>) -> Result<AxiomLine> {
        let lens: Vec<f64> = if self.b.is_finite() {
            (0..6).map(|k| self.b * 10f64.powi(-k)).collect()
        } else {
            (-3..=3).map(|k| 10f64.powi(k)).collect()
        };
        let vals = self.map(lens.len(), |i| {
            self.target.eval(&StepFunction::indicator(self.b, lens[i])?)
        })?;
        let infinite = lens.iter().zip(&vals).find(|(_, v)| !v.is_finite());
        let worst = if infinite.is_some() {
            f64::INFINITY
        } else {
            1.0
        };
        let witness = json!({"lengths": lens, "norms": vals.iter().map(|&v| crate::funcrep::extended::Ext(v)).collect::<Vec<_>>()});
        Ok(self.line("P4", expected, worst, witness))
    }

    fn local_integrability(&self) -> Result<AxiomLine> {
        let a = if self.b.is_finite() {
            self.b / 2.0
        } else {
            1.0
        };
        let ratio = |f: &StepFunction| -> Result<f64> {
            let v = self.target.eval(f)?;
            let head = CumulativeProfile::new(&rearrange(f)).eval(a);
            Ok(if usable(v) { head / v } else { f64::NAN })
        };
        let mut calib = sample::structured_family(self.b);
        calib.extend(self.family(6));
        let cal = self.map(calib.len(), |i| ratio(&calib[i]))?;
        let c_a = P5_MARGIN * worst_of(&cal, 1.0).0;
        let fresh = self.family(7);
        let out = self.map(fresh.len(), |i| ratio(&fresh[i]))?;
        let (worst, at) = worst_of(&out, 1.0);
        let witness = json!({
            "a": a,
            "c_a": c_a,
            "f": at.map(|i| &fresh[i]),
        });
        Ok(self.line("P5", Some(true), worst / c_a, witness))
    }

    fn shuffles(&self) -> Result<AxiomLine> {
        let fam = self.family(4);
        let out = self.map(fam.len(), |i| {
            let f = &fam[i];
            let g = shuffle(f, &mut rng_for(self.cfg.seed.wrapping_add(8), i as u64));
            let (vf, vg) = (self.target.eval(f)?, self.target.eval(&g)?);
            let d = if usable(vf) {
                1.0 + (vg / vf - 1.0).abs()
            } else {
                f64::NAN
            };
            Ok((d, g))
        })?;
        let devs: Vec<f64> = out.iter().map(|o| o.0).collect();
        let (worst, at) = worst_of(&devs, 1.0);
        let witness = at.map_or(Value::Null, |i| json!({"f": fam[i], "shuffled": out[i].1}));
        Ok(self.line("P6", Some(true), worst, witness))
    }
}

pub fn run_axioms(target: &AxiomTarget, cfg: AxiomConfig) -> Result<AxiomReport> {
    match target {
        AxiomTarget::Norm(s) => s.validate()?,
        AxiomTarget::Bracket(s) => s.validate()?,
    }
    if cfg.n == 0 {
        return Err(crate::Error::InvalidParameter(
            "the sample must be non-empty".into(),
        ));
    }
    let plan = plan(target);
    let suite = Suite {
        target,
        cfg,
        b: target.b(),
    };
    let tri = match plan.set {
        AxiomSet::RiNorm => "P1",
        AxiomSet::Quasi => "Q1",
    };
    let mut lines = vec![
        suite.triangle(tri, plan.constant)?,
        suite.homogeneity(&format!("{tri}-homogeneity"))?,
        suite.definiteness(&format!("{tri}-definiteness"))?,
        suite.lattice()?,
        suite.truncation()?,
        suite.indicators(plan.indicators_finite)?,
    ];
    if plan.set == AxiomSet::RiNorm {
        lines.push(suite.local_integrability()?);
    }
    lines.push(suite.shuffles()?);
    Ok(AxiomReport {
        set: plan.set,
        seed: cfg.seed,
        samples: cfg.n,
        tol: cfg.tol,
        lines,
    })
}
