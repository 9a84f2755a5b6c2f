use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("variant `{variant}` has no observed genotypes")]
    AllMissing { variant: String },
    #[error("no polymorphic variants left in the region")]
    EmptyRegion,
    #[error("weight diverges for variant {index} (MAF = {maf}); filter monomorphic variants first")]
    DivergentWeight { index: usize, maf: f64 },
    #[error("variant weights sum to zero")]
    DegenerateWeights,
    #[error("design matrix is singular or rank deficient")]
    SingularDesign,
    #[error("separation in logistic fit: |beta| exceeded {limit} after {iterations} iterations")]
    Separation { iterations: usize, limit: f64 },
    #[error("IRLS did not converge after {iterations} iterations")]
    NoConvergence { iterations: usize },
    #[error("matrix is not positive semidefinite (eigenvalue {eigenvalue:e})")]
    NotPositiveSemidefinite { eigenvalue: f64 },
    #[error("similarity annihilates the residuals (r'S^2 r = 0)")]
    DegenerateSimilarity,
    #[error("degenerate data: {0}")]
    DegenerateData(String),
    #[error("chi-square mixture has no non-zero coefficients")]
    EmptySpectrum,
    #[error("accuracy {0} outside (0, 1e-2]")]
    InvalidAccuracy(f64),
}

impl Error {
    /// True for failures caused by the data being statistically unusable
    /// (as opposed to malformed input or a caller bug).
    pub fn is_degenerate(&self) -> bool {
        !matches!(
            self,
            Error::Dimension(_) | Error::InvalidInput(_) | Error::InvalidAccuracy(_)
        )
    }
}
