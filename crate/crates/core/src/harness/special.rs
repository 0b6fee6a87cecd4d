//! `ln(e^x Γ(s, x))` by continued fraction, for the log-scale witnesses.

const EPS: f64 = 1e-15;
const TINY: f64 = 1e-300;
const MAX_TERMS: usize = 10_000;

/// `ln(e^x·Γ(s, x))`, the upper incomplete gamma function with its
/// exponential factor removed. Lentz's method; converges quickly for
/// `x ≥ s + 1`, which is the only range the witnesses use.
pub(crate) fn ln_scaled_upper_gamma(s: f64, x: f64) -> f64 {
    debug_assert!(x > 0.0);
    let mut b = x + 1.0 - s;
    let mut c = 1.0 / TINY;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..MAX_TERMS {
        let an = -(i as f64) * (i as f64 - s);
        b += 2.0;
        d = an * d + b;
        if d.abs() < TINY {
            d = TINY;
        }
        c = b + an / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < EPS {
            break;
        }
    }
    s * x.ln() + h.ln()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_forms() {
        // Γ(1, x) = e^(-x), Γ(2, x) = (x + 1) e^(-x).
        for x in [3.0, 10.0, 1e6] {
            assert!(ln_scaled_upper_gamma(1.0, x).abs() < 1e-13);
            let want = (x + 1.0f64).ln();
            assert!((ln_scaled_upper_gamma(2.0, x) - want).abs() < 1e-12 * want.abs().max(1.0));
        }
        // Γ(1/2, x) = √π erfc(√x); erfc(2) = 0.004677734981047266.
        let want = (std::f64::consts::PI.sqrt() * 0.004677734981047266f64).ln() + 4.0;
        assert!((ln_scaled_upper_gamma(0.5, 4.0) - want).abs() < 1e-12);
    }
}
