//! The GGRF score: γ̂ from the null residuals, then `P(r'(S - γ̂S²)r > 0)`
//! as a chi-square mixture tail.
//!
//! The mixture weights are the eigenvalues of `P^{1/2}(S - γ̂S²)P^{1/2}`.
//! With an intercept-only null model P is a multiple of `C = I - 11'/N`, and
//! since `C S² C = (CSC)² + uu'` with `u = CS1/√N`, the spectrum is that of a
//! diagonal-plus-rank-one matrix in the eigenbasis of `CSC`. [`GgrfModel`]
//! decomposes `CSC` once and then needs only O(N²) work per phenotype.

use alloc::string::String;
use alloc::vec::Vec;

use crate::data::{prepare_genotypes, CovariateMatrix, GenotypeMatrix, PhenotypeKind, PhenotypeVector};
use crate::linalg::{psd_sqrt, rank_one_update_eigenvalues, symmetric_eigen, symmetric_eigenvalues, symmetrize, truncate_spectrum};
use crate::mixture::{mixture_sf, MixtureQuery, TailMethod, TailProbability};
use crate::null_model::{fit_null, projection_matrix, projection_with_weights, NullFit, ProjectionMatrix};
use crate::similarity::{build_similarity, SimilarityMatrix, SimilaritySpec};
use crate::weights::WeightSpec;
use crate::{Error, Matrix, Result};

type Vector = nalgebra::DVector<f64>;

/// `r'Sr / r'S²r`, the root of `r'S(I - γS)r = 0`.
pub fn estimate_gamma(r: &[f64], s: &SimilarityMatrix) -> Result<f64> {
    if r.len() != s.n() {
        return Err(Error::Dimension(alloc::format!("{} residuals for {}x{} similarity", r.len(), s.n(), s.n())));
    }
    let rv = Vector::from_column_slice(r);
    let sr = s.values() * &rv;
    let den = sr.norm_squared();
    if den == 0.0 {
        return Err(Error::DegenerateSimilarity);
    }
    Ok(rv.dot(&sr) / den)
}

/// `A = S - γ S²`.
pub fn test_matrix(s: &SimilarityMatrix, gamma_obs: f64) -> Matrix {
    let sv = s.values();
    let mut a = sv - (sv * sv) * gamma_obs;
    symmetrize(&mut a);
    a
}

/// Nonnegligible eigenvalues of `P^{1/2} A P^{1/2}`, by decreasing magnitude.
pub fn eigen_spectrum(p: &ProjectionMatrix, a: &Matrix) -> Result<Vec<f64>> {
    let root = psd_sqrt(p.values())?;
    Ok(conjugated_spectrum(&root, a))
}

fn conjugated_spectrum(root: &Matrix, a: &Matrix) -> Vec<f64> {
    let mut m = root * a * root;
    symmetrize(&mut m);
    truncate_spectrum(symmetric_eigenvalues(&m))
}

#[derive(Debug, Clone, PartialEq)]
pub struct GgrfResult {
    pub gamma_hat: f64,
    pub p_value: f64,
    /// Signed, by decreasing magnitude, after truncation.
    pub eigenvalues: Vec<f64>,
    pub n_variants: usize,
    pub n_subjects: usize,
    pub similarity_spec: SimilaritySpec,
    pub weight_spec: WeightSpec,
    pub tail: TailProbability,
    /// Variant ids removed as monomorphic.
    pub dropped: Vec<String>,
    pub null_fit: NullFit,
}

impl GgrfResult {
    /// True when the p-value came from the moment-matching fallback.
    pub fn approximate(&self) -> bool {
        self.tail.method == TailMethod::MomentMatch
    }
}

/// Eigenbasis of `CSC` plus `w = U'CS1/√N`.
#[derive(Debug, Clone)]
struct CenteredBasis {
    lambda: Vec<f64>,
    w: Vec<f64>,
}

impl CenteredBasis {
    fn new(c: &CenteredForm) -> Self {
        let eig = symmetric_eigen(&c.t);
        let w = eig.eigenvectors.tr_mul(&c.u);
        Self { lambda: eig.eigenvalues.iter().copied().collect(), w: w.iter().copied().collect() }
    }

    /// Spectrum of `C(S - γS²)C`.
    fn spectrum(&self, gamma: f64) -> Vec<f64> {
        let d: Vec<f64> = self.lambda.iter().map(|l| l - gamma * l * l).collect();
        rank_one_update_eigenvalues(&d, &self.w, -gamma)
    }
}

/// `T = CSC` and `u = CS1/√N`. For residuals orthogonal to 1,
/// `r'Sr = r'Tr` and `r'S²r = |Tr|² + (u'r)²`; unlike the raw forms these do
/// not amplify the rounding left in `1'r` by the large constant part of S.
#[derive(Debug, Clone)]
struct CenteredForm {
    t: Matrix,
    u: Vector,
}

impl CenteredForm {
    fn new(s: &Matrix) -> Self {
        let n = s.nrows();
        let mut t = crate::similarity::double_center(s);
        symmetrize(&mut t);
        let row_sums: Vector = s.column_sum();
        let mean = row_sums.mean();
        let u = row_sums.map(|v| (v - mean) / libm::sqrt(n as f64));
        Self { t, u }
    }

    fn gamma(&self, r: &[f64]) -> Result<f64> {
        let mut rc = Vector::from_column_slice(r);
        let mean = rc.mean();
        rc.add_scalar_mut(-mean);
        let tr = &self.t * &rc;
        let ur = self.u.dot(&rc);
        let den = tr.norm_squared() + ur * ur;
        if den == 0.0 {
            return Err(Error::DegenerateSimilarity);
        }
        Ok(rc.dot(&tr) / den)
    }
}

#[derive(Debug, Clone)]
enum Strategy {
    /// Intercept-only null: P ∝ C.
    Centered(CenteredBasis),
    /// Identity link with covariates: P is fixed, so `P^{1/2}SP^{1/2}` and
    /// `P^{1/2}S²P^{1/2}` are cached.
    FixedProjection { rsr: Matrix, rs2r: Matrix },
    General,
}

/// Everything about a region test that does not depend on the phenotype.
#[derive(Debug, Clone)]
pub struct GgrfModel {
    similarity: SimilarityMatrix,
    covariates: CovariateMatrix,
    kind: PhenotypeKind,
    weight_spec: WeightSpec,
    n_variants: usize,
    dropped: Vec<String>,
    /// Present whenever the design carries an implicit intercept.
    centered: Option<CenteredForm>,
    strategy: Strategy,
}

impl GgrfModel {
    pub fn prepare(
        x: &CovariateMatrix,
        g: &GenotypeMatrix,
        kind: PhenotypeKind,
        wspec: WeightSpec,
        sspec: SimilaritySpec,
    ) -> Result<Self> {
        if x.n_subjects() != g.n_subjects() {
            return Err(Error::Dimension(alloc::format!(
                "{} covariate rows for {} genotyped subjects",
                x.n_subjects(),
                g.n_subjects()
            )));
        }
        let prepared = prepare_genotypes(g, &wspec)?;
        let similarity = build_similarity(&prepared.genotypes, &prepared.weights, sspec)?;
        Self::from_similarity(similarity, x.clone(), kind, wspec, prepared.genotypes.n_variants(), prepared.dropped)
    }

    /// Builds a model around an already computed similarity matrix.
    pub fn from_similarity(
        similarity: SimilarityMatrix,
        covariates: CovariateMatrix,
        kind: PhenotypeKind,
        weight_spec: WeightSpec,
        n_variants: usize,
        dropped: Vec<String>,
    ) -> Result<Self> {
        if covariates.n_subjects() != similarity.n() {
            return Err(Error::Dimension(alloc::format!(
                "{} covariate rows for {}x{} similarity",
                covariates.n_subjects(),
                similarity.n(),
                similarity.n()
            )));
        }
        let centered = (!covariates.intercept_included()).then(|| CenteredForm::new(similarity.values()));
        let strategy = if let (true, Some(c)) = (covariates.is_intercept_only(), &centered) {
            Strategy::Centered(CenteredBasis::new(c))
        } else if kind == PhenotypeKind::Quantitative {
            let root = psd_sqrt(projection_with_weights(&alloc::vec![1.0; similarity.n()], &covariates)?.values())?;
            let s = similarity.values();
            let rs = &root * s;
            let mut rsr = &rs * &root;
            let mut rs2r = &rs * rs.transpose();
            symmetrize(&mut rsr);
            symmetrize(&mut rs2r);
            Strategy::FixedProjection { rsr, rs2r }
        } else {
            Strategy::General
        };
        Ok(Self { similarity, covariates, kind, weight_spec, n_variants, dropped, centered, strategy })
    }

    pub fn similarity(&self) -> &SimilarityMatrix {
        &self.similarity
    }

    pub fn n_variants(&self) -> usize {
        self.n_variants
    }

    pub fn n_subjects(&self) -> usize {
        self.similarity.n()
    }

    pub fn dropped(&self) -> &[String] {
        &self.dropped
    }

    pub fn test(&self, y: &PhenotypeVector) -> Result<GgrfResult> {
        self.run(y, false)
    }

    /// Same as [`GgrfModel::test`] but always through the explicit `P^{1/2}`
    /// conjugation; used to cross-check the cached paths.
    pub fn test_generic(&self, y: &PhenotypeVector) -> Result<GgrfResult> {
        self.run(y, true)
    }

    fn run(&self, y: &PhenotypeVector, generic: bool) -> Result<GgrfResult> {
        if y.kind() != self.kind {
            return Err(Error::InvalidInput(alloc::format!(
                "model prepared for {} phenotypes, got {}",
                self.kind.as_str(),
                y.kind().as_str()
            )));
        }
        if y.len() != self.n_subjects() {
            return Err(Error::Dimension(alloc::format!("{} phenotypes for {} subjects", y.len(), self.n_subjects())));
        }
        let fit = fit_null(y, &self.covariates)?;
        let r = fit.residuals(y);
        if r.iter().all(|v| *v == 0.0) {
            return Err(Error::DegenerateData("null model residuals are identically zero".into()));
        }
        let gamma = match &self.centered {
            Some(c) => c.gamma(&r)?,
            None => estimate_gamma(&r, &self.similarity)?,
        };
        if !gamma.is_finite() {
            return Err(Error::DegenerateData("non-finite gamma estimate".into()));
        }

        let eigenvalues = match (&self.strategy, generic) {
            (Strategy::Centered(basis), false) => {
                // P = v C with v = 1 (identity) or ȳ(1 - ȳ) (logit)
                let v = fit.w_diag[0];
                truncate_spectrum(basis.spectrum(gamma).into_iter().map(|l| v * l).collect())
            }
            (Strategy::FixedProjection { rsr, rs2r }, false) => {
                let mut m = rsr - rs2r * gamma;
                symmetrize(&mut m);
                truncate_spectrum(symmetric_eigenvalues(&m))
            }
            _ => {
                let p = projection_matrix(&fit, &self.covariates)?;
                eigen_spectrum(&p, &test_matrix(&self.similarity, gamma))?
            }
        };

        let tail = mixture_sf(&MixtureQuery::new(&eigenvalues, 0.0)?);
        Ok(GgrfResult {
            gamma_hat: gamma,
            p_value: tail.p_value,
            eigenvalues,
            n_variants: self.n_variants,
            n_subjects: self.n_subjects(),
            similarity_spec: self.similarity.spec(),
            weight_spec: self.weight_spec,
            tail,
            dropped: self.dropped.clone(),
            null_fit: fit,
        })
    }
}

/// Filter, impute, weight, build the similarity, fit the null model and
/// return the GGRF p-value for one region.
pub fn ggrf_test(
    y: &PhenotypeVector,
    x: &CovariateMatrix,
    g: &GenotypeMatrix,
    wspec: WeightSpec,
    sspec: SimilaritySpec,
) -> Result<GgrfResult> {
    if y.len() != g.n_subjects() {
        return Err(Error::Dimension(alloc::format!("{} phenotypes for {} genotyped subjects", y.len(), g.n_subjects())));
    }
    GgrfModel::prepare(x, g, y.kind(), wspec, sspec)?.test(y)
}
