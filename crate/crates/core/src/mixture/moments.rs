//! Three-cumulant approximation of a signed chi-square mixture.
//!
//! With κ_m = 2^{m-1}(m-1)! Σλ^m, Q is matched to `a + b χ²_l` where
//! `l = 8 / skew²`. A negatively skewed Q is handled through -Q, and a
//! (numerically) symmetric one through the normal limit.

use libm::{fabs, pow, sqrt};

use crate::special::{chi_squared_sf, normal_sf};

/// Below this |skewness| the matched degrees of freedom exceed 8e12 and
/// the normal limit is used instead.
const SYMMETRIC_SKEW: f64 = 1e-6;

pub fn moment_match_sf(lambdas: &[f64], q: f64) -> f64 {
    let (mut s1, mut s2, mut s3) = (0.0, 0.0, 0.0);
    for &l in lambdas {
        s1 += l;
        s2 += l * l;
        s3 += l * l * l;
    }
    let k1 = s1;
    let k2 = 2.0 * s2;
    let k3 = 8.0 * s3;
    if k2 == 0.0 {
        return if q < 0.0 { 1.0 } else { 0.0 };
    }
    let sd = sqrt(k2);
    let z = (q - k1) / sd;
    let skew = k3 / pow(k2, 1.5);
    if fabs(skew) < SYMMETRIC_SKEW {
        return normal_sf(z);
    }
    let df = 8.0 / (skew * skew);
    let scale = sqrt(2.0 * df);
    let p = if skew > 0.0 {
        chi_squared_sf(df + scale * z, df)
    } else {
        // P(Q > q) = P(-Q < -q)
        1.0 - chi_squared_sf(df - scale * z, df)
    };
    p.clamp(0.0, 1.0)
}
