//! Baseline region tests: weighted burden (Wald) and kernel score (SKAT-style).
//!
//! Both expect genotypes that are already filtered and imputed, e.g. the
//! output of [`prepare_genotypes`](crate::data::prepare_genotypes).

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use libm::sqrt;

use crate::data::{CovariateMatrix, GenotypeMatrix, PhenotypeKind, PhenotypeVector};
use crate::linalg::{psd_sqrt, symmetric_eigenvalues, symmetrize, truncate_spectrum};
use crate::mixture::{mixture_sf, MixtureQuery, TailMethod};
use crate::null_model::{fit_null, fit_null_linear, fit_null_logistic, projection_matrix, NullFit};
use crate::similarity::{check_weights, double_center};
use crate::special::{normal_two_sided, student_t_two_sided};
use crate::{Error, Matrix, Result};

type Vector = nalgebra::DVector<f64>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum KernelKind {
    /// `G diag(ω) G'`.
    Linear,
    /// `Σ_k ω_k (2 - |g_ik - g_jk|)`, diagonal `2Σω`.
    Ibs,
}

impl KernelKind {
    pub fn as_str(self) -> &'static str {
        match self {
            KernelKind::Linear => "linear",
            KernelKind::Ibs => "ibs",
        }
    }
}

impl core::str::FromStr for KernelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "linear" | "lin" => Ok(Self::Linear),
            "ibs" => Ok(Self::Ibs),
            other => Err(Error::InvalidInput(alloc::format!("unknown kernel `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct KernelMatrix {
    values: Matrix,
    kind: KernelKind,
}

impl KernelMatrix {
    pub fn values(&self) -> &Matrix {
        &self.values
    }

    pub fn kind(&self) -> KernelKind {
        self.kind
    }
}

fn check_imputed(g: &GenotypeMatrix) -> Result<()> {
    if g.n_missing() > 0 {
        return Err(Error::InvalidInput("genotypes must be imputed first".into()));
    }
    Ok(())
}

pub fn build_kernel(g: &GenotypeMatrix, weights: &[f64], kind: KernelKind) -> Result<KernelMatrix> {
    let total = check_weights(g, weights)?;
    check_imputed(g)?;
    let (n, k) = g.dosages().shape();
    let values = match kind {
        KernelKind::Linear => {
            let mut scaled = g.dosages().clone();
            for (mut col, &w) in scaled.column_iter_mut().zip(weights) {
                col *= sqrt(w);
            }
            let mut m = &scaled * scaled.transpose();
            symmetrize(&mut m);
            m
        }
        KernelKind::Ibs => {
            let d = g.dosages();
            let mut m = Matrix::from_element(n, n, 2.0 * total);
            for i in 0..n {
                for j in 0..i {
                    let dist: f64 = (0..k).map(|c| weights[c] * (d[(i, c)] - d[(j, c)]).abs()).sum();
                    let v = 2.0 * total - dist;
                    m[(i, j)] = v;
                    m[(j, i)] = v;
                }
            }
            m
        }
    };
    Ok(KernelMatrix { values, kind })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Burden,
    KernelScore,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Burden => "burden",
            Method::KernelScore => "skat",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparatorResult {
    pub method: Method,
    pub statistic: f64,
    pub p_value: f64,
    pub detail: BTreeMap<String, f64>,
}

/// Kernel score test with everything phenotype-independent precomputed.
#[derive(Debug, Clone)]
pub struct KernelModel {
    kernel: KernelMatrix,
    covariates: CovariateMatrix,
    kind: PhenotypeKind,
    /// Spectrum of `CKC` when the null model is intercept-only.
    centered_spectrum: Option<Vec<f64>>,
}

impl KernelModel {
    pub fn new(kernel: KernelMatrix, covariates: CovariateMatrix, kind: PhenotypeKind) -> Result<Self> {
        if kernel.values.nrows() != covariates.n_subjects() {
            return Err(Error::Dimension(alloc::format!(
                "{} covariate rows for {} kernel rows",
                covariates.n_subjects(),
                kernel.values.nrows()
            )));
        }
        let centered_spectrum = if covariates.is_intercept_only() {
            let mut c = double_center(&kernel.values);
            symmetrize(&mut c);
            Some(symmetric_eigenvalues(&c))
        } else {
            None
        };
        Ok(Self { kernel, covariates, kind, centered_spectrum })
    }

    pub fn kernel(&self) -> &KernelMatrix {
        &self.kernel
    }

    pub fn test(&self, y: &PhenotypeVector) -> Result<ComparatorResult> {
        if y.kind() != self.kind {
            return Err(Error::InvalidInput("phenotype kind differs from the prepared model".into()));
        }
        if y.len() != self.covariates.n_subjects() {
            return Err(Error::Dimension(alloc::format!(
                "{} phenotypes for {} subjects",
                y.len(),
                self.covariates.n_subjects()
            )));
        }
        let fit = fit_null(y, &self.covariates)?;
        let r = Vector::from_vec(fit.residuals(y));
        let mut q = r.dot(&(self.kernel.values() * &r));
        let mut detail = BTreeMap::new();
        if self.kind == PhenotypeKind::Quantitative {
            let dof = y.len() as f64 - self.covariates.design().ncols() as f64;
            let sigma2 = r.norm_squared() / dof;
            if sigma2.is_nan() || sigma2 <= 0.0 {
                return Err(Error::DegenerateData("zero residual variance".into()));
            }
            q /= sigma2;
            detail.insert("sigma2".into(), sigma2);
        }

        let lambdas = match &self.centered_spectrum {
            Some(spec) => {
                let v = fit.w_diag[0];
                truncate_spectrum(spec.iter().map(|l| v * l).collect())
            }
            None => {
                let root = psd_sqrt(projection_matrix(&fit, &self.covariates)?.values())?;
                let mut m = &root * self.kernel.values() * &root;
                symmetrize(&mut m);
                truncate_spectrum(symmetric_eigenvalues(&m))
            }
        };
        let tail = mixture_sf(&MixtureQuery::new(&lambdas, q)?);
        detail.insert("n_eigenvalues".into(), lambdas.len() as f64);
        if tail.method == TailMethod::MomentMatch {
            detail.insert("approximate".into(), 1.0);
        }
        Ok(ComparatorResult { method: Method::KernelScore, statistic: q, p_value: tail.p_value, detail })
    }
}

/// `Q = r'Kr` (divided by σ̂² for quantitative traits) against the mixture
/// with weights `eig(P^{1/2} K P^{1/2})`.
pub fn kernel_score_test(
    y: &PhenotypeVector,
    x: &CovariateMatrix,
    g: &GenotypeMatrix,
    weights: &[f64],
    kind: KernelKind,
) -> Result<ComparatorResult> {
    KernelModel::new(build_kernel(g, weights, kind)?, x.clone(), y.kind())?.test(y)
}

/// Wald test of the weighted burden `b = Gω` added as a covariate.
pub fn burden_test(y: &PhenotypeVector, x: &CovariateMatrix, g: &GenotypeMatrix, weights: &[f64]) -> Result<ComparatorResult> {
    check_weights(g, weights)?;
    check_imputed(g)?;
    if y.len() != g.n_subjects() {
        return Err(Error::Dimension(alloc::format!("{} phenotypes for {} subjects", y.len(), g.n_subjects())));
    }
    let burden = g.dosages() * Vector::from_column_slice(weights);
    let full = x.with_column(burden.as_slice(), "burden")?;
    let design = full.design();
    let p = design.ncols();

    let mut detail = BTreeMap::new();
    let (fit, w): (NullFit, Vec<f64>) = match y.kind() {
        PhenotypeKind::Quantitative => {
            let fit = fit_null_linear(y, &full)?;
            let w = alloc::vec![1.0; y.len()];
            (fit, w)
        }
        PhenotypeKind::Binary => {
            let fit = fit_null_logistic(y, &full)?;
            let w = fit.w_diag.clone();
            (fit, w)
        }
    };
    let mut wx = design.clone();
    for (mut row, &wi) in wx.row_iter_mut().zip(&w) {
        row *= wi;
    }
    let info = design.transpose() * wx;
    let inv = info.cholesky().ok_or(Error::SingularDesign)?.inverse();
    let beta = fit.beta_hat[p - 1];
    let (statistic, p_value) = match y.kind() {
        PhenotypeKind::Quantitative => {
            let dof = (y.len() - p) as f64;
            let sigma2 = fit.deviance / dof;
            let se = sqrt(sigma2 * inv[(p - 1, p - 1)]);
            if se.is_nan() || se <= 0.0 {
                return Err(Error::DegenerateData("zero burden standard error".into()));
            }
            let t = beta / se;
            detail.insert("df".into(), dof);
            (t, student_t_two_sided(t, dof))
        }
        PhenotypeKind::Binary => {
            let se = sqrt(inv[(p - 1, p - 1)]);
            let z = beta / se;
            (z, normal_two_sided(z))
        }
    };
    detail.insert("beta".into(), beta);
    Ok(ComparatorResult { method: Method::Burden, statistic, p_value: p_value.clamp(0.0, 1.0), detail })
}
