//! Sample statistics and the Welch two-tailed t-test.
//!
//! The p-value comes from the Student-t distribution through a
//! numerically stable regularized incomplete beta, evaluated with the
//! Lentz continued fraction. Welch's unequal-variance form is used
//! throughout: the per-method spreads in swarm benchmarks differ by
//! orders of magnitude, which rules out the pooled-variance test.

use crate::error::{Error, Result};

/// Mean and sample standard deviation (n - 1 denominator).
pub fn mean_std(xs: &[f64]) -> (f64, f64) {
    let n = xs.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = xs.iter().sum::<f64>() / n as f64;
    if n < 2 {
        return (mean, 0.0);
    }
    let ss: f64 = xs.iter().map(|x| (x - mean) * (x - mean)).sum();
    (mean, (ss / (n as f64 - 1.0)).sqrt())
}

/// Natural log of the gamma function (Lanczos approximation), `z > 0`.
pub fn ln_gamma(z: f64) -> f64 {
    const C: [f64; 6] = [
        76.180_091_729_471_46,
        -86.505_320_329_416_77,
        24.014_098_240_830_91,
        -1.231_739_572_450_155,
        0.120_865_097_386_617_9e-2,
        -0.539_523_938_495_3e-5,
    ];
    let mut sum = 1.000_000_000_190_015;
    for (i, c) in C.iter().enumerate() {
        sum += c / (z + i as f64 + 1.0);
    }
    let tmp = z + 5.5;
    (z + 0.5) * tmp.ln() - tmp + (2.506_628_274_631_000_5 * sum / z).ln()
}

/// Continued-fraction kernel of the incomplete beta (modified Lentz).
fn beta_cf(a: f64, b: f64, x: f64) -> f64 {
    const MAX_ITER: usize = 300;
    const EPS: f64 = 1e-15;
    const FPMIN: f64 = 1e-300;

    let qab = a + b;
    let qap = a + 1.0;
    let qam = a - 1.0;
    let mut c = 1.0;
    let mut d = 1.0 - qab * x / qap;
    if d.abs() < FPMIN {
        d = FPMIN;
    }
    d = 1.0 / d;
    let mut h = d;
    for m in 1..=MAX_ITER {
        let m = m as f64;
        let m2 = 2.0 * m;
        let aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if d.abs() < FPMIN {
            d = FPMIN;
        }
        c = 1.0 + aa / c;
        if c.abs() < FPMIN {
            c = FPMIN;
        }
        d = 1.0 / d;
        h *= d * c;
        let aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if d.abs() < FPMIN {
            d = FPMIN;
        }
        c = 1.0 + aa / c;
        if c.abs() < FPMIN {
            c = FPMIN;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < EPS {
            break;
        }
    }
    h
}

/// Regularized incomplete beta `I_x(a, b)`.
pub fn regularized_incomplete_beta(a: f64, b: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x >= 1.0 {
        return 1.0;
    }
    let ln_front = ln_gamma(a + b) - ln_gamma(a) - ln_gamma(b) + a * x.ln() + b * (1.0 - x).ln();
    let front = ln_front.exp();
    if x < (a + 1.0) / (a + b + 2.0) {
        front * beta_cf(a, b, x) / a
    } else {
        1.0 - front * beta_cf(b, a, 1.0 - x) / b
    }
}

/// Two-tailed p-value of a Student-t statistic with `df` degrees of
/// freedom: `I_x(df/2, 1/2)` at `x = df / (df + t^2)`. Exactly 1 at t = 0.
pub fn student_t_two_tailed_p(t: f64, df: f64) -> f64 {
    if !t.is_finite() {
        return 0.0;
    }
    regularized_incomplete_beta(0.5 * df, 0.5, df / (df + t * t))
}

/// Welch's t-test result.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WelchResult {
    pub t: f64,
    pub df: f64,
    pub p: f64,
    /// Both samples had zero variance; the p-value is 1 or 0 by
    /// convention depending on whether the means agree.
    pub degenerate: bool,
}

/// Welch's unequal-variance two-sample t-test with the
/// Welch–Satterthwaite degrees of freedom and a two-tailed p-value.
pub fn welch_t_test(sample_a: &[f64], sample_b: &[f64]) -> Result<WelchResult> {
    if sample_a.len() < 2 || sample_b.len() < 2 {
        return Err(Error::InvalidParameter(
            "welch_t_test needs at least two values per sample".into(),
        ));
    }
    let (mean_a, std_a) = mean_std(sample_a);
    let (mean_b, std_b) = mean_std(sample_b);
    let na = sample_a.len() as f64;
    let nb = sample_b.len() as f64;
    let va = std_a * std_a / na;
    let vb = std_b * std_b / nb;
    if va + vb == 0.0 {
        return Ok(if mean_a == mean_b {
            WelchResult {
                t: 0.0,
                df: na + nb - 2.0,
                p: 1.0,
                degenerate: true,
            }
        } else {
            WelchResult {
                t: if mean_a > mean_b { f64::INFINITY } else { f64::NEG_INFINITY },
                df: na + nb - 2.0,
                p: 0.0,
                degenerate: true,
            }
        });
    }
    let t = (mean_a - mean_b) / (va + vb).sqrt();
    let df = (va + vb) * (va + vb) / (va * va / (na - 1.0) + vb * vb / (nb - 1.0));
    Ok(WelchResult {
        t,
        df,
        p: student_t_two_tailed_p(t, df),
        degenerate: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identical_samples_give_p_exactly_one() {
        let r = welch_t_test(&[1.0, 2.0, 3.0], &[1.0, 2.0, 3.0]).unwrap();
        assert_eq!(r.t, 0.0);
        assert_eq!(r.p, 1.0);
        assert!(!r.degenerate);
    }

    #[test]
    fn pinned_two_by_two_case() {
        let r = welch_t_test(&[0.0, 1.0], &[10.0, 11.0]).unwrap();
        assert!((r.t - -14.142_135_623_730_95).abs() < 1e-9);
        assert!((r.df - 2.0).abs() < 1e-12);
        assert!((r.p - 0.004_962_809_790_010_865).abs() < 1e-9);
    }

    #[test]
    fn swapping_samples_negates_t_and_keeps_p() {
        let a = [1.0, 2.5, 3.5, 2.0];
        let b = [4.0, 5.5, 5.0];
        let ab = welch_t_test(&a, &b).unwrap();
        let ba = welch_t_test(&b, &a).unwrap();
        assert!((ab.t + ba.t).abs() < 1e-12);
        assert!((ab.p - ba.p).abs() < 1e-12);
    }

    #[test]
    fn degenerate_zero_variance_cases() {
        let eq = welch_t_test(&[2.0, 2.0], &[2.0, 2.0]).unwrap();
        assert!(eq.degenerate);
        assert_eq!(eq.p, 1.0);
        let ne = welch_t_test(&[2.0, 2.0], &[3.0, 3.0]).unwrap();
        assert!(ne.degenerate);
        assert_eq!(ne.p, 0.0);
    }

    #[test]
    fn too_small_samples_are_errors() {
        assert!(welch_t_test(&[1.0], &[1.0, 2.0]).is_err());
        assert!(welch_t_test(&[], &[]).is_err());
    }

    #[test]
    fn incomplete_beta_sanity() {
        // I_x(1, 1) = x
        for x in [0.1, 0.25, 0.5, 0.9] {
            assert!((regularized_incomplete_beta(1.0, 1.0, x) - x).abs() < 1e-12);
        }
        // symmetry I_x(a, b) = 1 - I_{1-x}(b, a)
        let lhs = regularized_incomplete_beta(2.5, 1.25, 0.3);
        let rhs = 1.0 - regularized_incomplete_beta(1.25, 2.5, 0.7);
        assert!((lhs - rhs).abs() < 1e-12);
    }

    #[test]
    fn mean_std_matches_brute_force() {
        let xs = [3.0, 1.0, 4.0, 1.0, 5.0, 9.0, 2.0, 6.0];
        let (mean, std) = mean_std(&xs);
        let m: f64 = xs.iter().sum::<f64>() / xs.len() as f64;
        let v: f64 = xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (xs.len() as f64 - 1.0);
        assert!((mean - m).abs() < 1e-12);
        assert!((std - v.sqrt()).abs() < 1e-12);
    }
}
