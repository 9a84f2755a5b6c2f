//! Symmetric eigen-solvers used by the engine.

use alloc::vec::Vec;

use nalgebra::SymmetricEigen;

use crate::{Error, Matrix, Result};

/// Relative cut below which eigenvalues are treated as numerical zeros.
pub const SPECTRUM_TRUNCATION: f64 = 1e-10;

/// Eigenvalues of P within `PSD_TOLERANCE * max(1, λ_max)` of zero are clamped to 0;
/// more negative ones are an error.
pub const PSD_TOLERANCE: f64 = 1e-10;

pub fn symmetrize(m: &mut Matrix) {
    let n = m.nrows();
    for i in 0..n {
        for j in 0..i {
            let v = 0.5 * (m[(i, j)] + m[(j, i)]);
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
}

pub fn symmetric_eigenvalues(a: &Matrix) -> Vec<f64> {
    a.clone().symmetric_eigenvalues().iter().copied().collect()
}

pub fn symmetric_eigen(a: &Matrix) -> SymmetricEigen<f64, nalgebra::Dyn> {
    SymmetricEigen::new(a.clone())
}

/// Principal square root of a positive semidefinite matrix, via its spectrum.
pub fn psd_sqrt(p: &Matrix) -> Result<Matrix> {
    let eig = symmetric_eigen(p);
    let max = eig.eigenvalues.iter().copied().fold(1.0, f64::max);
    let mut roots = eig.eigenvalues.clone();
    for v in roots.iter_mut() {
        if *v < -PSD_TOLERANCE * max {
            return Err(Error::NotPositiveSemidefinite { eigenvalue: *v });
        }
        // Round-off zeros would otherwise turn into O(√ε) square roots.
        *v = if *v <= PSD_TOLERANCE * max { 0.0 } else { libm::sqrt(*v) };
    }
    let q = &eig.eigenvectors;
    let mut root = q * Matrix::from_diagonal(&roots) * q.transpose();
    symmetrize(&mut root);
    Ok(root)
}

/// Drops eigenvalues with `|λ| <= SPECTRUM_TRUNCATION * max|λ|` and sorts the
/// rest by decreasing magnitude.
pub fn truncate_spectrum(mut values: Vec<f64>) -> Vec<f64> {
    let max = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    values.retain(|v| v.abs() > SPECTRUM_TRUNCATION * max);
    values.sort_by(|a, b| b.abs().total_cmp(&a.abs()).then(b.total_cmp(a)));
    values
}

/// Eigenvalues of `diag(d) + rho * z z'`, in ascending order.
///
/// Entries with negligible `z` or (numerically) repeated `d` are deflated; the
/// remaining eigenvalues are the roots of the secular equation
/// `1 + rho Σ z_k² / (d_k - μ) = 0`, one per interlacing interval.
pub fn rank_one_update_eigenvalues(d: &[f64], z: &[f64], rho: f64) -> Vec<f64> {
    assert_eq!(d.len(), z.len());
    let n = d.len();
    let scale = d.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let znorm2: f64 = z.iter().map(|v| v * v).sum();
    let mut out = Vec::with_capacity(n);
    if rho == 0.0 || znorm2 == 0.0 {
        out.extend_from_slice(d);
        out.sort_by(f64::total_cmp);
        return out;
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| d[a].total_cmp(&d[b]));

    let tol = 8.0 * f64::EPSILON * (scale + libm::fabs(rho) * znorm2);
    let znorm = libm::sqrt(znorm2);
    // (pole, weight = z²) after deflation
    let mut poles: Vec<(f64, f64)> = Vec::with_capacity(n);
    for &k in &order {
        let zk2 = z[k] * z[k];
        // Coupling to the rest of the spectrum is at most |rho z_k| ‖z‖.
        if libm::fabs(rho * z[k]) * znorm <= tol {
            out.push(d[k]);
            continue;
        }
        match poles.last_mut() {
            // Rotating two equal poles together leaves one eigenvalue at d.
            Some(last) if d[k] - last.0 <= tol => {
                out.push(last.0);
                last.1 += zk2;
            }
            _ => poles.push((d[k], zk2)),
        }
    }

    let m = poles.len();
    let w2: f64 = poles.iter().map(|p| p.1).sum();
    for i in 0..m {
        // Bracket (lo, hi) relative to an origin pole for accuracy.
        let (origin, lo, hi) = if rho > 0.0 {
            let lo_b = poles[i].0;
            let hi_b = if i + 1 < m { poles[i + 1].0 } else { poles[i].0 + rho * w2 };
            (lo_b, 0.0, hi_b - lo_b)
        } else {
            let hi_b = poles[i].0;
            let lo_b = if i > 0 { poles[i - 1].0 } else { poles[i].0 + rho * w2 };
            (hi_b, lo_b - hi_b, 0.0)
        };
        out.push(origin + secular_root(&poles, origin, rho, lo, hi));
    }
    out.sort_by(f64::total_cmp);
    out
}

/// Root τ of `1 + rho Σ w_k / ((d_k - origin) - τ)` inside `(lo, hi)`.
fn secular_root(poles: &[(f64, f64)], origin: f64, rho: f64, mut lo: f64, mut hi: f64) -> f64 {
    let shifted: Vec<(f64, f64)> = poles.iter().map(|&(d, w)| (d - origin, w)).collect();
    let eval = |tau: f64| -> (f64, f64) {
        let (mut f, mut df) = (0.0, 0.0);
        for &(delta, w) in &shifted {
            let inv = 1.0 / (delta - tau);
            f += w * inv;
            df += w * inv * inv;
        }
        (1.0 + rho * f, rho * df)
    };
    // f is monotone on the bracket: increasing for rho > 0, decreasing otherwise.
    let increasing = rho > 0.0;
    let mut tau = 0.5 * (lo + hi);
    for _ in 0..200 {
        let (f, df) = eval(tau);
        if f == 0.0 {
            return tau;
        }
        if (f < 0.0) == increasing {
            lo = tau;
        } else {
            hi = tau;
        }
        let newton = tau - f / df;
        let next = if df.is_finite() && newton > lo && newton < hi { newton } else { 0.5 * (lo + hi) };
        let step = libm::fabs(next - tau);
        tau = next;
        if step <= 2.0 * f64::EPSILON * libm::fabs(tau)
            || hi - lo <= 2.0 * f64::EPSILON * libm::fabs(lo).max(libm::fabs(hi))
        {
            return tau;
        }
    }
    0.5 * (lo + hi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn dense_reference(d: &[f64], z: &[f64], rho: f64) -> Vec<f64> {
        let n = d.len();
        let m = Matrix::from_fn(n, n, |i, j| if i == j { d[i] } else { 0.0 } + rho * z[i] * z[j]);
        let mut e = symmetric_eigenvalues(&m);
        e.sort_by(f64::total_cmp);
        e
    }

    #[test]
    fn rank_one_small_cases() {
        let d = [1.0, 2.0, 5.0];
        let z = [0.5, -1.0, 0.25];
        for rho in [3.0, -0.7, 0.0] {
            let got = rank_one_update_eigenvalues(&d, &z, rho);
            let want = dense_reference(&d, &z, rho);
            for (g, w) in got.iter().zip(&want) {
                assert_relative_eq!(g, w, epsilon = 1e-12);
            }
        }
        // repeated poles and zero components
        let d = [0.0, 1.0, 1.0, 1.0, 4.0];
        let z = [0.0, 1.0, 0.5, 0.0, 2.0];
        let got = rank_one_update_eigenvalues(&d, &z, -0.3);
        let want = dense_reference(&d, &z, -0.3);
        for (g, w) in got.iter().zip(&want) {
            assert_relative_eq!(g, w, epsilon = 1e-12);
        }
    }

    proptest! {
        #[test]
        fn rank_one_matches_dense(
            d in proptest::collection::vec(-50.0f64..50.0, 1..30),
            zs in proptest::collection::vec(-3.0f64..3.0, 30),
            rho in -2.0f64..2.0,
        ) {
            let z = &zs[..d.len()];
            let got = rank_one_update_eigenvalues(&d, z, rho);
            let want = dense_reference(&d, z, rho);
            let scale = want.iter().fold(1.0f64, |m, v| m.max(v.abs()));
            prop_assert_eq!(got.len(), want.len());
            for (g, w) in got.iter().zip(&want) {
                prop_assert!((g - w).abs() < 1e-10 * scale, "{} vs {}", g, w);
            }
        }
    }

    #[test]
    fn psd_sqrt_squares_back() {
        let a = Matrix::from_row_slice(3, 3, &[2.0, 1.0, 0.0, 1.0, 2.0, 1.0, 0.0, 1.0, 2.0]);
        let r = psd_sqrt(&a).unwrap();
        assert_relative_eq!(&r * &r, a, epsilon = 1e-12);
        let neg = Matrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0]);
        assert!(matches!(psd_sqrt(&neg), Err(Error::NotPositiveSemidefinite { .. })));
        // rank-deficient projection: I - J
        let c = Matrix::identity(4, 4) - Matrix::from_element(4, 4, 0.25);
        assert_relative_eq!(psd_sqrt(&c).unwrap(), c, epsilon = 1e-12);
    }

    #[test]
    fn truncation_and_order() {
        let t = truncate_spectrum(vec![1e-14, -3.0, 2.0, 0.0, -1e-11, 5.0]);
        assert_eq!(t, vec![5.0, -3.0, 2.0]);
    }
}
