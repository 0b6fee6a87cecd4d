//! One line per acceptance criterion; the test fails if any criterion does.
//!
//! Run with `cargo test -p rikit-cli --test acceptance -- --nocapture` to see
//! the lines and the associate ratio table.

use std::process::Command;
use std::time::Instant;

use rand::Rng;

use rikit::associate::{check_associate, AssociateCheck, DualCase, DualSpec, EQUIVALENCE_K};
use rikit::bracket::{
    eval_bracket, fundamental_function, is_nontrivial, modulus_of_concavity_bound, BracketSpec,
};
use rikit::hardy::{estimate_embedding_constant, kappa_consistency, sharp_constant};
use rikit::harness::{
    bridge_classify, bridge_numeric_crosscheck, example_equivalences, Direction, ExampleParams,
    Regime,
};
use rikit::par::{map_indexed, Execution};
use rikit::sample::{random_family, random_pairs, random_step, rng_for, structured_pairs};
use rikit::{eval_norm, NormSpec, PowerLogExpr, StepFunction, Weight};

const INF: f64 = f64::INFINITY;
const EXEC: Execution = Execution::Sequential;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn bases(b: f64) -> Vec<NormSpec> {
    vec![
        NormSpec::lebesgue(1.0, b).unwrap(),
        NormSpec::lebesgue(2.0, b).unwrap(),
        NormSpec::lebesgue(INF, b).unwrap(),
        NormSpec::lorentz(2.0, 1.0, b).unwrap(),
        NormSpec::lorentz_star(3.0, 2.0, b).unwrap(),
        NormSpec::lz(2.0, 2.0, 0.5, b).unwrap(),
    ]
}

fn angle(base: &NormSpec, alpha: f64) -> BracketSpec {
    BracketSpec::angle(base.clone(), alpha).unwrap()
}

fn bracket(spec: &BracketSpec, f: &StepFunction) -> f64 {
    eval_bracket(spec, f).unwrap().value
}

/// Largest `ρ^<α>(f+g) / (ρ^<α>(f) + ρ^<α>(g))` over the pairs.
fn worst_triangle(spec: &BracketSpec, pairs: &[(StepFunction, StepFunction)]) -> f64 {
    map_indexed(Execution::default(), pairs.len(), |i| {
        let (f, g) = &pairs[i];
        let sum = bracket(spec, f) + bracket(spec, g);
        if sum == 0.0 {
            return 0.0;
        }
        bracket(spec, &f.add(g).unwrap()) / sum
    })
    .into_iter()
    .fold(0.0, f64::max)
}

fn c1_domination() -> Outcome {
    let fam = random_family(1.0, 500, 101);
    let mut worst = 0.0f64;
    for base in bases(1.0) {
        for alpha in [0.5, 1.0, 2.0] {
            let spec = angle(&base, alpha);
            let ratios = map_indexed(Execution::default(), fam.len(), |i| {
                let rho = eval_norm(&base, &fam[i]).unwrap().value;
                rho / bracket(&spec, &fam[i])
            });
            worst = ratios.into_iter().fold(worst, f64::max);
        }
    }
    outcome(
        worst <= 1.0 + 1e-6,
        format!("max ρ/ρ^<α> = {worst:.9} over 500 × 6 × 3 (bound 1 + 1e-6)"),
    )
}

fn c2_triangle() -> Outcome {
    let pairs = random_pairs(1.0, 500, 202);
    let mut worst = 0.0f64;
    for base in [bases(1.0)[0].clone(), bases(1.0)[3].clone()] {
        for alpha in [1.0, 2.0] {
            worst = worst.max(worst_triangle(&angle(&base, alpha), &pairs));
        }
    }
    outcome(
        worst - 1.0 <= 1e-6,
        format!(
            "worst ratio − 1 = {:.3e} on 500 pairs, α ∈ {{1, 2}}",
            worst - 1.0
        ),
    )
}

fn c3_quasi_triangle() -> Outcome {
    let mut pairs = random_pairs(1.0, 500, 303);
    pairs.extend(structured_pairs(1.0));
    let base = NormSpec::lorentz(2.0, 1.0, 1.0).unwrap();
    let mut pass = true;
    let mut parts = Vec::new();
    let mut half = 0.0;
    for alpha in [1.0 / 3.0, 0.5, 2.0, 3.0] {
        let w = worst_triangle(&angle(&base, alpha), &pairs);
        let bound = modulus_of_concavity_bound(alpha);
        pass &= w <= bound + 1e-6;
        if alpha == 0.5 {
            half = w;
        }
        parts.push(format!("α={alpha:.3}: {w:.4} ≤ {bound:.4}"));
    }
    pass &= half >= 1.05;
    outcome(
        pass,
        format!("{}; α=1/2 attains {half:.4} ≥ 1.05", parts.join(", ")),
    )
}

fn c4_sharp_constant() -> Outcome {
    let start = Instant::now();
    let spec = angle(&NormSpec::lebesgue(1.0, 1.0).unwrap(), 0.5);
    let est = estimate_embedding_constant(&spec, 50, 404, Execution::default()).unwrap();
    let bound = sharp_constant(0.5).unwrap();
    let secs = start.elapsed().as_secs_f64();
    outcome(
        (bound - 4.0).abs() < 1e-12
            && est.c_lower <= bound + 1e-6
            && est.c_lower >= 2.0
            && secs < 30.0,
        format!(
            "bound {bound}, worst ratio {:.6} ∈ [2, 4 + 1e-6], {secs:.2}s",
            est.c_lower
        ),
    )
}

fn c5_fundamental_sandwich() -> Outcome {
    let base_list = [
        NormSpec::lebesgue(1.0, 1.0).unwrap(),
        NormSpec::lebesgue(2.0, 1.0).unwrap(),
        NormSpec::lorentz(2.0, 1.0, 1.0).unwrap(),
        NormSpec::lorentz_star(3.0, 2.0, 1.0).unwrap(),
    ];
    let (mut lo, mut hi_excess) = (INF, -INF);
    let mut pass = true;
    for base in &base_list {
        for alpha in [0.5, 1.0, 2.0] {
            let spec = angle(base, alpha);
            let upper = 1.0 + 2f64.powf(1.0 / alpha);
            for k in 0..20 {
                // Log-spaced in (0, 1/2): from 0.45 down to about 5e-5.
                let a = 0.45 * 10f64.powf(-(k as f64) / 5.0);
                let r = fundamental_function(&spec, a).unwrap().ratio();
                pass &= r >= 1.0 - 1e-9 && r <= upper + 1e-6;
                lo = lo.min(r);
                hi_excess = hi_excess.max(r - upper);
            }
        }
    }
    outcome(
        pass,
        format!("min φ/comparand {lo:.9}, max excess over 1 + 2^(1/α) {hi_excess:.4}"),
    )
}

fn c6_triviality() -> Outcome {
    let mut total = 0;
    let mut mismatches = Vec::new();
    for p in [1.0, 2.0, 4.0] {
        for q in [1.0, 2.0, INF] {
            for alpha in [p / 2.0, p, 2.0 * p] {
                for b in [1.0, INF] {
                    let base = NormSpec::lorentz(p, q, b).unwrap();
                    let got = is_nontrivial(&angle(&base, alpha)).unwrap();
                    let want = b.is_finite()
                        || if q.is_infinite() {
                            alpha <= p
                        } else {
                            alpha < p
                        };
                    total += 1;
                    if got != want {
                        mismatches.push(format!("(p={p}, q={q}, α={alpha}, b={b})"));
                    }
                }
            }
        }
    }
    outcome(
        mismatches.is_empty(),
        format!(
            "{}/{total} cells match {}",
            total - mismatches.len(),
            mismatches.join(" ")
        ),
    )
}

fn c7_kappa() -> Outcome {
    let mut worst = 0.0f64;
    let mut same = true;
    for (p, alpha) in [(2.0, 1.0), (3.0, 0.5), (1.0, 2.0)] {
        let spec = angle(&NormSpec::lebesgue(p, 1.0).unwrap(), alpha);
        let rep = kappa_consistency(&spec, 200, 707, Execution::default()).unwrap();
        worst = worst.max(rep.max_abs_diff);
        same &= rep.same_witness;
    }
    outcome(
        worst <= 1e-9 && same,
        format!("max |ratio^α − brace ratio| = {worst:.3e} on 200 samples + structured, same witness {same}"),
    )
}

fn c8_worked_examples() -> Outcome {
    let run = |regime, p, q, alpha, b, n, tol| {
        let params = ExampleParams {
            regime,
            p,
            q,
            alpha,
            b,
        };
        example_equivalences(&params, n, 808, tol, Execution::default()).unwrap()
    };
    let mut pass = true;
    let mut parts = Vec::new();
    for (p, b) in [(1.0, 1.0), (2.0, INF), (3.0, 1.0)] {
        let r = run(Regime::LorCritInf, p, INF, p, b, 100, 1e-9);
        pass &= r.holds;
        parts.push(format!(
            "(L^{{{p},∞}})^<{p}>/L^{p} on (0,{b}) ∈ [{:.12}, {:.12}]",
            r.min_ratio, r.max_ratio
        ));
    }
    for p in [1.0, 2.0] {
        let r = run(Regime::LebCrit, p, p, p, 1.0, 200, 1e-9);
        pass &= r.holds;
        parts.push(format!(
            "leb-crit p={p}: [{:.4}, {:.4}]",
            r.min_ratio, r.max_ratio
        ));
    }
    for (p, alpha) in [(1.0, 2.0), (2.0, 3.0)] {
        let r = run(Regime::LebSuper, p, p, alpha, 1.0, 200, 1e-9);
        pass &= r.holds;
        parts.push(format!(
            "leb-super ({p},{alpha}): [{:.4}, {:.4}] within [{:.4}, {:.4}]",
            r.min_ratio,
            r.max_ratio,
            r.lower.unwrap_or(f64::NAN),
            r.upper.unwrap_or(f64::NAN)
        ));
    }
    outcome(pass, parts.join("; "))
}

fn c9_bridge() -> Outcome {
    let (mut cells, mut matched, mut fails, mut witnessed) = (0, 0, 0, 0);
    for p in [1.0, 2.0, 3.0] {
        for q in [2.0 * p, 4.0 * p] {
            for alpha in [1.0 / (2.0 * q), 1.0 / q, 2.0 / q] {
                for d in Direction::BOTH {
                    cells += 1;
                    matched += usize::from(bridge_classify(p, q, alpha, d).unwrap().matches());
                }
                let rep = bridge_numeric_crosscheck(p, q, alpha, 50, 909, EXEC).unwrap();
                for d in rep.directions.iter().filter(|d| !d.expected) {
                    fails += 1;
                    let beyond_100 = d
                        .hits
                        .iter()
                        .any(|h| h.threshold >= 100.0 && h.ratio.is_some_and(|r| r >= 100.0));
                    witnessed += usize::from(beyond_100);
                }
            }
        }
    }
    outcome(
        matched == cells && witnessed == fails,
        format!("{matched}/{cells} classifications match; {witnessed}/{fails} failing cells have a witness with ratio ≥ 100"),
    )
}

/// A power weight `c·t^β` on `(0, 1)` for `(q, α)`, with `β` below both
/// `q/α − 1` (non-degeneracy) and `q − 1` (bounded `g` has a finite
/// associate norm).
fn dual_pair(
    seed: u64,
    index: u64,
    q_range: (f64, f64),
    a_range: (f64, f64),
) -> (DualSpec, StepFunction) {
    let mut rng = rng_for(seed, index);
    let q = rng.gen_range(q_range.0..q_range.1);
    let alpha = rng.gen_range(a_range.0..a_range.1);
    let hi = (q / alpha - 1.0).min(q - 1.0).min(1.0);
    let beta = rng.gen_range((-0.9f64).max(hi - 1.5)..hi);
    let c = rng.gen_range(0.5..2.0);
    let w = Weight::PowerLog(PowerLogExpr::monomial(1.0, c, beta, 0.0).unwrap());
    let spec = DualSpec::new(q, alpha, w).expect("parameters satisfy non-degeneracy");
    let g = random_step(&mut rng, 1.0, index.is_multiple_of(2));
    (spec, g)
}

fn describe(spec: &DualSpec, c: &AssociateCheck) -> String {
    let beta = match &spec.w {
        Weight::PowerLog(e) => e.terms()[0].power,
        Weight::Step(_) => f64::NAN,
    };
    format!(
        "{:>4} q={:.3} α={:.3} β={:+.3} cf={:.5e} oracle={:.5e}/{:.5e}/{:.5e} extrap={:.5e} oracle/cf={:.4} cf/extrap={:.4}",
        format!("{:?}", c.case).to_lowercase(),
        spec.q,
        spec.alpha,
        beta,
        c.closed_form,
        c.oracle.values[0],
        c.oracle.values[1],
        c.oracle.values[2],
        c.oracle.extrapolated,
        c.ratio,
        c.inverse_ratio
    )
}

fn c10_associate_exact() -> Outcome {
    let mut pass = true;
    let (mut lo, mut hi) = (INF, 0.0f64);
    for i in 0..20 {
        let (spec, g) = dual_pair(1010, i, (0.3, 1.0), (0.3, 1.0));
        assert_eq!(spec.case(), DualCase::I);
        let c = check_associate(&spec, &g, i, EXEC).unwrap();
        println!("  {}", describe(&spec, &c));
        pass &= c.holds;
        lo = lo.min(c.ratio);
        hi = hi.max(c.ratio);
    }
    outcome(
        pass,
        format!("grid-48 oracle/cf ∈ [{lo:.4}, {hi:.7}] ⊂ [0.9, 1 + 1e-6], refinement monotone on 20 pairs"),
    )
}

fn c11_associate_equivalent() -> Outcome {
    let mut pass = true;
    let mut worst = 0.0f64;
    let ranges = [
        ((1.2, 3.0), (0.3, 1.0)),
        ((0.3, 1.0), (1.2, 3.0)),
        ((1.2, 3.0), (1.2, 3.0)),
    ];
    for (k, (qr, ar)) in ranges.into_iter().enumerate() {
        for j in 0..10 {
            let i = (10 * k + j) as u64;
            let (spec, g) = dual_pair(1111, i, qr, ar);
            let c = check_associate(&spec, &g, i, EXEC).unwrap();
            println!("  {}", describe(&spec, &c));
            pass &= c.holds;
            worst = worst.max(c.ratio).max(c.inverse_ratio);
        }
    }
    outcome(
        pass,
        format!("largest one-sided ratio {worst:.4} ≤ K = {EQUIVALENCE_K} on 30 pairs"),
    )
}

const CLI_SUITE: &[&[&str]] = &[
    &[
        "eval",
        "--bracket",
        r#"{"base":{"kind":"lebesgue","p":1,"b":1},"alpha":1,"mode":"angle"}"#,
        "--fn",
        r#"{"b":1,"pieces":[[0.25,1]]}"#,
    ],
    &[
        "axioms",
        "--bracket",
        r#"{"base":{"kind":"lorentz","p":2,"q":1,"b":1},"alpha":0.5}"#,
        "--n",
        "40",
        "--seed",
        "12",
    ],
    &[
        "embed-scan",
        "--base",
        "L2",
        "--alpha",
        "0.5",
        "--n",
        "60",
        "--seed",
        "12",
    ],
    &[
        "associate",
        "--spec",
        r#"{"q":0.8,"alpha":0.6,"w":{"b":1,"terms":[[2,-0.3,0]]},"b":1}"#,
        "--fn",
        r#"{"b":1,"pieces":[[0.05,5],[0.4,1],[0.9,0.3]]}"#,
        "--seed",
        "12",
    ],
    &[
        "bridge", "--p", "2", "--q", "4", "--alpha", "0.125", "--n", "60", "--seed", "12",
    ],
];

fn run_suite(threads: &str) -> Vec<u8> {
    let mut all = Vec::new();
    for args in CLI_SUITE {
        let out = Command::new(env!("CARGO_BIN_EXE_rikit"))
            .args(*args)
            .env("RIKIT_THREADS", threads)
            .output()
            .expect("binary runs");
        assert!(out.status.code().is_some_and(|c| c < 2), "{args:?}");
        all.extend(out.stdout);
    }
    all
}

fn c12_determinism() -> Outcome {
    let a = run_suite("1");
    let b = run_suite("2");
    outcome(
        a == b && !a.is_empty(),
        format!(
            "{} bytes of JSON reports, identical across runs with 1 and 2 threads",
            a.len()
        ),
    )
}

type Criterion = (&'static str, fn() -> Outcome);

#[test]
fn acceptance() {
    let criteria: [Criterion; 12] = [
        ("domination", c1_domination),
        ("triangle inequality for α ≥ 1", c2_triangle),
        ("quasi-triangle constant", c3_quasi_triangle),
        ("sharp constant for α < 1", c4_sharp_constant),
        ("fundamental-function sandwich", c5_fundamental_sandwich),
        ("triviality classification", c6_triviality),
        ("κ = c^α per sample", c7_kappa),
        ("worked examples", c8_worked_examples),
        ("bridge classification", c9_bridge),
        ("associate case (i)", c10_associate_exact),
        ("associate cases (ii)-(iv)", c11_associate_equivalent),
        ("determinism", c12_determinism),
    ];
    let mut failed = Vec::new();
    for (k, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let o = check();
        let verdict = if o.pass { "PASS" } else { "FAIL" };
        println!(
            "C{:<2} {verdict} {name}: {} [{:.1}s]",
            k + 1,
            o.detail,
            start.elapsed().as_secs_f64()
        );
        if !o.pass {
            failed.push(k + 1);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
