//! Two-sample F-test for equality of variances.

use serde::Serialize;

use super::stats::sample_variance;
use super::EvalError;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FTestResult {
    pub f_stat: f64,
    pub dof: (usize, usize),
    /// Upper-tail probability `P(F >= f_stat)`.
    pub p_value: f64,
}

/// `f = s²_a / s²_b` with an upper-tail p-value. Callers that follow the
/// larger-variance-first convention should use [`f_test_ordered`].
pub fn f_test(sample_a: &[f64], sample_b: &[f64]) -> Result<FTestResult, EvalError> {
    for (name, s) in [("A", sample_a), ("B", sample_b)] {
        if s.len() < 2 {
            return Err(EvalError::InsufficientSamples { sample: name, n: s.len() });
        }
        if s.iter().any(|v| !v.is_finite()) {
            return Err(EvalError::Invalid(format!("sample {name}: non-finite value")));
        }
    }
    let va = sample_variance(sample_a).unwrap_or(0.0);
    let vb = sample_variance(sample_b).unwrap_or(0.0);
    if vb == 0.0 {
        return Err(EvalError::DegenerateVariance("B"));
    }
    if va == 0.0 {
        return Err(EvalError::DegenerateVariance("A"));
    }
    let f_stat = va / vb;
    let d1 = sample_a.len() - 1;
    let d2 = sample_b.len() - 1;
    Ok(FTestResult {
        f_stat,
        dof: (d1, d2),
        p_value: f_upper_tail(f_stat, d1 as f64, d2 as f64),
    })
}

/// Runs [`f_test`] with the higher-variance sample as the numerator.
/// The flag is true when the inputs were swapped.
pub fn f_test_ordered(a: &[f64], b: &[f64]) -> Result<(FTestResult, bool), EvalError> {
    let va = sample_variance(a).unwrap_or(0.0);
    let vb = sample_variance(b).unwrap_or(0.0);
    if vb > va {
        f_test(b, a).map(|r| (r, true))
    } else {
        f_test(a, b).map(|r| (r, false))
    }
}

/// `1 - F_cdf(f; d1, d2)` written as `I_{d2/(d2 + d1 f)}(d2/2, d1/2)`.
pub fn f_upper_tail(f: f64, d1: f64, d2: f64) -> f64 {
    if f <= 0.0 {
        return 1.0;
    }
    let x = d2 / (d2 + d1 * f);
    regularized_beta(x, d2 / 2.0, d1 / 2.0).clamp(0.0, 1.0)
}

fn ln_gamma(x: f64) -> f64 {
    const G: f64 = 7.0;
    const COEF: [f64; 9] = [
        0.999_999_999_999_809_9,
        676.520_368_121_885_1,
        -1_259.139_216_722_402_8,
        771.323_428_777_653_1,
        -176.615_029_162_140_6,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_572e-6,
        1.505_632_735_149_311_6e-7,
    ];
    if x < 0.5 {
        let pi = std::f64::consts::PI;
        return (pi / (pi * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut acc = COEF[0];
    for (i, c) in COEF.iter().enumerate().skip(1) {
        acc += c / (x + i as f64);
    }
    let t = x + G + 0.5;
    0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + acc.ln()
}

/// Regularized incomplete beta `I_x(a, b)` by Lentz's continued fraction.
pub fn regularized_beta(x: f64, a: f64, b: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x >= 1.0 {
        return 1.0;
    }
    let ln_front = ln_gamma(a + b) - ln_gamma(a) - ln_gamma(b) + a * x.ln() + b * (1.0 - x).ln();
    if x < (a + 1.0) / (a + b + 2.0) {
        ln_front.exp() * beta_fraction(x, a, b) / a
    } else {
        1.0 - ln_front.exp() * beta_fraction(1.0 - x, b, a) / b
    }
}

fn beta_fraction(x: f64, a: f64, b: f64) -> f64 {
    const TINY: f64 = 1e-300;
    const EPS: f64 = 1e-15;
    let mut c = 1.0;
    let mut d = 1.0 - (a + b) * x / (a + 1.0);
    if d.abs() < TINY {
        d = TINY;
    }
    d = 1.0 / d;
    let mut h = d;
    for m in 1..=500 {
        let m = m as f64;
        let m2 = 2.0 * m;
        for num in [
            m * (b - m) * x / ((a + m2 - 1.0) * (a + m2)),
            -(a + m) * (a + b + m) * x / ((a + m2) * (a + m2 + 1.0)),
        ] {
            d = 1.0 + num * d;
            if d.abs() < TINY {
                d = TINY;
            }
            c = 1.0 + num / c;
            if c.abs() < TINY {
                c = TINY;
            }
            d = 1.0 / d;
            h *= d * c;
        }
        if (d * c - 1.0).abs() < EPS {
            break;
        }
    }
    h
}
