//! Special functions and reference distributions needed by the tests.
//!
//! Incomplete gamma and beta follow the usual series / Lentz continued
//! fraction split; accuracy is around 1e-14 relative over the ranges used here.

use libm::{erfc, exp, fabs, lgamma, log};

const EPS: f64 = 1e-15;
const TINY: f64 = 1e-300;
const MAX_ITER: usize = 10_000;

pub fn ln_gamma(x: f64) -> f64 {
    lgamma(x)
}

pub fn ln_beta(a: f64, b: f64) -> f64 {
    lgamma(a) + lgamma(b) - lgamma(a + b)
}

/// Upper tail of the standard normal.
pub fn normal_sf(x: f64) -> f64 {
    0.5 * erfc(x / core::f64::consts::SQRT_2)
}

/// Two-sided normal p-value for a z statistic.
pub fn normal_two_sided(z: f64) -> f64 {
    erfc(fabs(z) / core::f64::consts::SQRT_2).min(1.0)
}

/// Regularized lower incomplete gamma P(a, x).
pub fn gamma_p(a: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x < a + 1.0 {
        gamma_series(a, x)
    } else {
        1.0 - gamma_cf(a, x)
    }
}

/// Regularized upper incomplete gamma Q(a, x).
pub fn gamma_q(a: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 1.0;
    }
    if x < a + 1.0 {
        1.0 - gamma_series(a, x)
    } else {
        gamma_cf(a, x)
    }
}

fn gamma_series(a: f64, x: f64) -> f64 {
    let mut ap = a;
    let mut del = 1.0 / a;
    let mut sum = del;
    for _ in 0..MAX_ITER {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if fabs(del) < fabs(sum) * EPS {
            break;
        }
    }
    sum * exp(-x + a * log(x) - lgamma(a))
}

fn gamma_cf(a: f64, x: f64) -> f64 {
    let mut b = x + 1.0 - a;
    let mut c = 1.0 / TINY;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..MAX_ITER {
        let an = -(i as f64) * (i as f64 - a);
        b += 2.0;
        d = an * d + b;
        if fabs(d) < TINY {
            d = TINY;
        }
        c = b + an / c;
        if fabs(c) < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if fabs(del - 1.0) < EPS {
            break;
        }
    }
    exp(-x + a * log(x) - lgamma(a)) * h
}

/// Upper tail of a central chi-square with (possibly fractional) `df`.
pub fn chi_squared_sf(x: f64, df: f64) -> f64 {
    gamma_q(0.5 * df, 0.5 * x)
}

/// Regularized incomplete beta I_x(a, b).
pub fn beta_inc(a: f64, b: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x >= 1.0 {
        return 1.0;
    }
    let front = exp(a * log(x) + b * log(1.0 - x) - ln_beta(a, b));
    if x < (a + 1.0) / (a + b + 2.0) {
        front * beta_cf(a, b, x) / a
    } else {
        1.0 - front * beta_cf(b, a, 1.0 - x) / b
    }
}

fn beta_cf(a: f64, b: f64, x: f64) -> f64 {
    let qab = a + b;
    let qap = a + 1.0;
    let qam = a - 1.0;
    let mut c = 1.0;
    let mut d = 1.0 - qab * x / qap;
    if fabs(d) < TINY {
        d = TINY;
    }
    d = 1.0 / d;
    let mut h = d;
    for m in 1..MAX_ITER {
        let m = m as f64;
        let m2 = 2.0 * m;
        let aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if fabs(d) < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if fabs(c) < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        h *= d * c;
        let aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if fabs(d) < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if fabs(c) < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if fabs(del - 1.0) < EPS {
            break;
        }
    }
    h
}

/// Two-sided p-value of a Student t statistic.
pub fn student_t_two_sided(t: f64, df: f64) -> f64 {
    if !t.is_finite() {
        return 0.0;
    }
    beta_inc(0.5 * df, 0.5, df / (df + t * t))
}

/// Inverse of `beta_inc` in x, by bisection.
pub fn beta_inc_inv(a: f64, b: f64, p: f64) -> f64 {
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if beta_inc(a, b, mid) < p {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-15 {
            break;
        }
    }
    0.5 * (lo + hi)
}

/// Exact (Clopper–Pearson) two-sided confidence interval for a binomial rate.
pub fn clopper_pearson(successes: usize, trials: usize, level: f64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let tail = 0.5 * (1.0 - level);
    let (x, n) = (successes as f64, trials as f64);
    let lo = if successes == 0 { 0.0 } else { beta_inc_inv(x, n - x + 1.0, tail) };
    let hi = if successes == trials { 1.0 } else { beta_inc_inv(x + 1.0, n - x, 1.0 - tail) };
    (lo, hi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use statrs::distribution::{Beta, ChiSquared, ContinuousCDF, StudentsT};

    #[test]
    fn chi_squared_matches_reference() {
        for &df in &[0.5, 1.0, 2.0, 3.7, 10.0, 55.0] {
            let reference = ChiSquared::new(df).unwrap();
            for &x in &[0.01, 0.5, 1.0, 3.841, 7.0, 20.0, 80.0] {
                let expect = reference.sf(x);
                let got = chi_squared_sf(x, df);
                assert!((got - expect).abs() < 1e-12 + 1e-10 * expect, "df={df} x={x}: {got} vs {expect}");
            }
        }
        assert_relative_eq!(chi_squared_sf(5.991464547107979, 2.0), 0.05, epsilon = 1e-12);
    }

    #[test]
    fn beta_and_t_match_reference() {
        for &(a, b) in &[(1.0, 25.0), (2.5, 3.5), (10.0, 990.0), (0.5, 0.5)] {
            let reference = Beta::new(a, b).unwrap();
            for &x in &[1e-4, 0.01, 0.2, 0.5, 0.9] {
                assert!((beta_inc(a, b, x) - reference.cdf(x)).abs() < 1e-11, "a={a} b={b} x={x}");
            }
        }
        let t = StudentsT::new(0.0, 1.0, 17.0).unwrap();
        for &x in &[0.1, 1.0, 2.1, 4.5] {
            assert!((student_t_two_sided(x, 17.0) - 2.0 * t.sf(x)).abs() < 1e-12);
            assert!((student_t_two_sided(-x, 17.0) - 2.0 * t.sf(x)).abs() < 1e-12);
        }
    }

    #[test]
    fn normal_tail() {
        assert_relative_eq!(normal_sf(1.959963984540054), 0.025, epsilon = 1e-14);
        assert_relative_eq!(normal_two_sided(-1.959963984540054), 0.05, epsilon = 1e-14);
    }

    #[test]
    fn clopper_pearson_bounds() {
        // 50/1000: reference interval from the Beta quantiles.
        let (lo, hi) = clopper_pearson(50, 1000, 0.95);
        let lo_ref = Beta::new(50.0, 951.0).unwrap().inverse_cdf(0.025);
        let hi_ref = Beta::new(51.0, 950.0).unwrap().inverse_cdf(0.975);
        assert!((lo - lo_ref).abs() < 1e-9 && (hi - hi_ref).abs() < 1e-9);
        assert_eq!(clopper_pearson(0, 10, 0.95).0, 0.0);
        assert_eq!(clopper_pearson(10, 10, 0.95).1, 1.0);
    }
}
