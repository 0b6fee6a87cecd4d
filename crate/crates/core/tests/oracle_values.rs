//! Values frozen from an independent high-precision evaluation (mpmath
//! quadrature on the explicit formulas), plus closed forms.

use approx::assert_relative_eq;
use rikit::bracket::{eval_bracket, fundamental_function, BracketSpec};
use rikit::harness::{eval_ypq, YpqSpec};
use rikit::norms::holder_check;
use rikit::rearrange::{hlp_less, rearrange, MaxRearrangement};
use rikit::{eval_norm, NormSpec, StepFunction};

fn f() -> StepFunction {
    StepFunction::new(1.0, vec![(0.1, 3.0), (0.4, 1.0), (0.9, 0.5)]).unwrap()
}

#[test]
fn frozen_functionals_of_a_three_step_function() {
    let f = f();
    let l2 = BracketSpec::angle(NormSpec::lebesgue(2.0, 1.0).unwrap(), 1.0).unwrap();
    assert_relative_eq!(
        eval_bracket(&l2, &f).unwrap().value,
        1.6752282921842288,
        max_relative = 1e-9
    );
    let l1 = BracketSpec::angle(NormSpec::lebesgue(1.0, 1.0).unwrap(), 2.0).unwrap();
    assert_relative_eq!(
        eval_bracket(&l1, &f).unwrap().value,
        1.7698714079124083,
        max_relative = 1e-9
    );
    let lor = BracketSpec::angle(NormSpec::lorentz(2.0, 1.0, 1.0).unwrap(), 0.5).unwrap();
    assert_relative_eq!(
        eval_bracket(&lor, &f).unwrap().value,
        3.8368901768145458,
        max_relative = 1e-9
    );
    let lz = NormSpec::lz(2.0, 2.0, 0.5, 1.0).unwrap();
    assert_relative_eq!(
        eval_norm(&lz, &f).unwrap().value,
        2.188757960575014,
        max_relative = 1e-9
    );
    let star = NormSpec::lorentz_star(3.0, 2.0, 1.0).unwrap();
    assert_relative_eq!(
        eval_norm(&star, &f).unwrap().value,
        2.404868050908495,
        max_relative = 1e-9
    );
    let y = YpqSpec::new(2.0, 4.0, 1.0).unwrap();
    assert_relative_eq!(
        eval_ypq(&y, &f).unwrap().value,
        1.3487009415724843,
        max_relative = 1e-9
    );
}

#[test]
fn rearrangement_examples() {
    let g = StepFunction::new(1.0, vec![(0.2, 2.0), (0.5, 5.0), (1.0, 2.0)]).unwrap();
    let d = rearrange(&g);
    assert_eq!(d.values(), &[5.0, 2.0]);
    assert_relative_eq!(d.ends()[0], 0.3, max_relative = 1e-15);
    let m = MaxRearrangement::new(&StepFunction::indicator(1.0, 0.25).unwrap(), 2.0).unwrap();
    assert_relative_eq!(m.evaluate(0.2), 1.0);
    assert_relative_eq!(
        m.evaluate(0.64),
        (0.25f64 / 0.64).sqrt(),
        max_relative = 1e-14
    );
    let u = StepFunction::constant(1.0, 1.0).unwrap();
    let v = StepFunction::indicator(1.0, 0.5)
        .unwrap()
        .scale(2.0)
        .unwrap();
    assert!(hlp_less(&u, &v));
    assert!(!hlp_less(&v.scale(2.0).unwrap(), &v));
}

#[test]
fn norm_examples() {
    let a: f64 = 0.3;
    let ind = StepFunction::indicator(1.0, a).unwrap();
    for (p, q) in [(2.0f64, 1.0f64), (3.0, 2.0), (1.5, 4.0)] {
        let want = (p / q).powf(1.0 / q) * a.powf(1.0 / p);
        let got = eval_norm(&NormSpec::lorentz(p, q, 1.0).unwrap(), &ind)
            .unwrap()
            .value;
        assert_relative_eq!(got, want, max_relative = 1e-10);
    }
    let weak = NormSpec::lorentz(2.0, f64::INFINITY, 1.0).unwrap();
    assert_relative_eq!(
        eval_norm(&weak, &StepFunction::constant(1.0, 1.0).unwrap())
            .unwrap()
            .value,
        1.0,
        max_relative = 1e-10
    );
    let l2 = NormSpec::lebesgue(2.0, 1.0).unwrap();
    let g1 = StepFunction::new(1.0, vec![(0.5, 2.0), (1.0, 1.0)]).unwrap();
    let g2 = StepFunction::new(1.0, vec![(0.5, 1.0), (1.0, 0.0)]).unwrap();
    assert!(holder_check(&l2, &g1, &g2).unwrap());
}

#[test]
fn bracket_examples() {
    let l1 = BracketSpec::angle(NormSpec::lebesgue(1.0, 1.0).unwrap(), 1.0).unwrap();
    let quarter = StepFunction::indicator(1.0, 0.25).unwrap();
    let want = 0.25 + 0.25 * 4f64.ln();
    assert_relative_eq!(
        eval_bracket(&l1, &quarter).unwrap().value,
        want,
        max_relative = 1e-10
    );
    let ff = fundamental_function(&l1, 0.25).unwrap();
    assert_relative_eq!(ff.phi, want, max_relative = 1e-10);
    assert_relative_eq!(ff.comparand, 0.25 * 4f64.ln(), max_relative = 1e-10);
    // (L^{p,∞})^<p> = L^p.
    for p in [1.0, 2.5] {
        let spec =
            BracketSpec::angle(NormSpec::lorentz(p, f64::INFINITY, 1.0).unwrap(), p).unwrap();
        let lp = eval_norm(&NormSpec::lebesgue(p, 1.0).unwrap(), &f())
            .unwrap()
            .value;
        assert_relative_eq!(
            eval_bracket(&spec, &f()).unwrap().value,
            lp,
            max_relative = 1e-9
        );
    }
}
