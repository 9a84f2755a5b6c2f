//! Covariate-only null model: μ̂ = f(Xβ̂), variance weights W, and
//! `P = W - WX(X'WX)⁻¹X'W`.
//!
//! X always carries an intercept (see [`CovariateMatrix::design`]).

use alloc::vec::Vec;

use libm::{exp, fabs, log};

use crate::data::{CovariateMatrix, PhenotypeKind, PhenotypeVector};
use crate::linalg::symmetrize;
use crate::{Error, Matrix, Result};

type Vector = nalgebra::DVector<f64>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Link {
    Identity,
    Logit,
}

impl Link {
    pub fn for_kind(kind: PhenotypeKind) -> Self {
        match kind {
            PhenotypeKind::Quantitative => Link::Identity,
            PhenotypeKind::Binary => Link::Logit,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NullFit {
    pub mu_hat: Vec<f64>,
    /// Intercept first.
    pub beta_hat: Vec<f64>,
    pub link: Link,
    pub w_diag: Vec<f64>,
    pub converged: bool,
    pub iterations: usize,
    /// Residual sum of squares (identity) or binomial deviance (logit).
    pub deviance: f64,
}

impl NullFit {
    pub fn residuals(&self, y: &PhenotypeVector) -> Vec<f64> {
        y.values().iter().zip(&self.mu_hat).map(|(y, m)| y - m).collect()
    }
}

/// IRLS controls for the logistic fit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IrlsOptions {
    pub tolerance: f64,
    pub max_iterations: usize,
    /// Any |β̂_j| above this is reported as separation.
    pub separation_limit: f64,
}

impl Default for IrlsOptions {
    fn default() -> Self {
        Self { tolerance: 1e-8, max_iterations: 50, separation_limit: 30.0 }
    }
}

fn check_dims(y: &PhenotypeVector, x: &CovariateMatrix) -> Result<Matrix> {
    if y.len() != x.n_subjects() {
        return Err(Error::Dimension(alloc::format!(
            "{} phenotypes for {} covariate rows",
            y.len(),
            x.n_subjects()
        )));
    }
    let design = x.design();
    if design.ncols() >= design.nrows() {
        return Err(Error::SingularDesign);
    }
    Ok(design)
}

/// Least squares via Householder QR, rejecting rank-deficient designs.
pub(crate) fn least_squares(design: &Matrix, y: &Vector) -> Result<Vector> {
    let qr = design.clone().qr();
    let r = qr.r();
    let max = r.diagonal().iter().fold(0.0f64, |m, v| m.max(fabs(*v)));
    if max == 0.0 || r.diagonal().iter().any(|v| fabs(*v) <= 1e-10 * max) {
        return Err(Error::SingularDesign);
    }
    let qty = qr.q().transpose() * y;
    r.solve_upper_triangular(&qty).ok_or(Error::SingularDesign)
}

/// Identity-link fit by ordinary least squares.
pub fn fit_null_linear(y: &PhenotypeVector, x: &CovariateMatrix) -> Result<NullFit> {
    let design = check_dims(y, x)?;
    let yv = Vector::from_column_slice(y.values());
    let beta = least_squares(&design, &yv)?;
    let mu = &design * &beta;
    let deviance = (&yv - &mu).norm_squared();
    Ok(NullFit {
        mu_hat: mu.iter().copied().collect(),
        beta_hat: beta.iter().copied().collect(),
        link: Link::Identity,
        w_diag: alloc::vec![1.0; y.len()],
        converged: true,
        iterations: 1,
        deviance,
    })
}

fn logistic(eta: f64) -> f64 {
    if eta >= 0.0 {
        1.0 / (1.0 + exp(-eta))
    } else {
        let e = exp(eta);
        e / (1.0 + e)
    }
}

pub fn fit_null_logistic(y: &PhenotypeVector, x: &CovariateMatrix) -> Result<NullFit> {
    fit_null_logistic_with(y, x, &IrlsOptions::default())
}

/// Logistic maximum likelihood by iteratively reweighted least squares.
pub fn fit_null_logistic_with(y: &PhenotypeVector, x: &CovariateMatrix, opts: &IrlsOptions) -> Result<NullFit> {
    if y.kind() != PhenotypeKind::Binary {
        return Err(Error::InvalidInput("logistic null model needs a binary phenotype".into()));
    }
    let design = check_dims(y, x)?;
    let (n, p) = design.shape();
    let yv = Vector::from_column_slice(y.values());

    let mut beta = Vector::zeros(p);
    if !x.intercept_included() {
        let ybar = yv.mean();
        beta[0] = log(ybar / (1.0 - ybar));
    }
    let mut iterations = 0;
    let mut converged = false;
    while iterations < opts.max_iterations {
        iterations += 1;
        let eta = &design * &beta;
        let mut sqrt_w = Vector::zeros(n);
        let mut z = Vector::zeros(n);
        for i in 0..n {
            let mu = logistic(eta[i]);
            let w = (mu * (1.0 - mu)).max(1e-300);
            sqrt_w[i] = libm::sqrt(w);
            z[i] = sqrt_w[i] * (eta[i] + (yv[i] - mu) / w);
        }
        let mut weighted = design.clone();
        for (mut row, &s) in weighted.row_iter_mut().zip(sqrt_w.iter()) {
            row *= s;
        }
        let next = least_squares(&weighted, &z)?;
        let delta = (&next - &beta).amax();
        beta = next;
        if beta.amax() > opts.separation_limit {
            return Err(Error::Separation { iterations, limit: opts.separation_limit });
        }
        if delta < opts.tolerance {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::NoConvergence { iterations });
    }

    let eta = &design * &beta;
    let mu_hat: Vec<f64> = eta.iter().map(|&e| logistic(e)).collect();
    let w_diag = mu_hat.iter().map(|m| m * (1.0 - m)).collect();
    let deviance = -2.0
        * y.values()
            .iter()
            .zip(&mu_hat)
            .map(|(&yi, &m)| if yi == 1.0 { log(m) } else { log(1.0 - m) })
            .sum::<f64>();
    Ok(NullFit {
        mu_hat,
        beta_hat: beta.iter().copied().collect(),
        link: Link::Logit,
        w_diag,
        converged,
        iterations,
        deviance,
    })
}

/// Fits the link matching the phenotype kind.
pub fn fit_null(y: &PhenotypeVector, x: &CovariateMatrix) -> Result<NullFit> {
    match y.kind() {
        PhenotypeKind::Quantitative => fit_null_linear(y, x),
        PhenotypeKind::Binary => fit_null_logistic(y, x),
    }
}

/// Symmetric N×N matrix `W - WX(X'WX)⁻¹X'W`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectionMatrix {
    values: Matrix,
}

impl ProjectionMatrix {
    pub fn values(&self) -> &Matrix {
        &self.values
    }

    pub fn from_matrix(values: Matrix) -> Self {
        Self { values }
    }
}

pub fn projection_matrix(fit: &NullFit, x: &CovariateMatrix) -> Result<ProjectionMatrix> {
    projection_with_weights(&fit.w_diag, x)
}

/// `W - WX(X'WX)⁻¹X'W` for explicit variance weights.
pub fn projection_with_weights(w_diag: &[f64], x: &CovariateMatrix) -> Result<ProjectionMatrix> {
    let design = x.design();
    let n = design.nrows();
    if w_diag.len() != n {
        return Err(Error::Dimension(alloc::format!("{} weights for {} rows", w_diag.len(), n)));
    }
    let mut wx = design.clone();
    for (mut row, &w) in wx.row_iter_mut().zip(w_diag) {
        row *= w;
    }
    let xtwx = design.transpose() * &wx;
    let chol = xtwx.cholesky().ok_or(Error::SingularDesign)?;
    // (X'WX)⁻¹ (WX)'
    let solved = chol.solve(&wx.transpose());
    let mut values = -(&wx * solved);
    for (i, &w) in w_diag.iter().enumerate() {
        values[(i, i)] += w;
    }
    symmetrize(&mut values);
    Ok(ProjectionMatrix { values })
}
