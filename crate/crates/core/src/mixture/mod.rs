//! Upper-tail probabilities of `Σ λ_k χ²_{1,k}` for signed λ.

mod davies;
mod mc;
mod moments;

pub use davies::{davies_cdf, DaviesFault, DaviesOutput};
pub use mc::{mc_oracle, mc_oracle_many};
pub use moments::moment_match_sf;

use alloc::vec::Vec;

use crate::{Error, Result};

pub const DEFAULT_ACCURACY: f64 = 1e-6;
pub const DEFAULT_TERM_LIMIT: usize = 100_000;

#[derive(Debug, Clone, PartialEq)]
pub struct MixtureQuery {
    lambdas: Vec<f64>,
    threshold: f64,
    accuracy: f64,
    term_limit: usize,
}

impl MixtureQuery {
    /// Exact zeros are dropped; at least one nonzero λ must remain.
    pub fn new(lambdas: &[f64], threshold: f64) -> Result<Self> {
        if lambdas.iter().any(|l| !l.is_finite()) || !threshold.is_finite() {
            return Err(Error::InvalidInput("non-finite mixture coefficient or threshold".into()));
        }
        let lambdas: Vec<f64> = lambdas.iter().copied().filter(|l| *l != 0.0).collect();
        if lambdas.is_empty() {
            return Err(Error::EmptySpectrum);
        }
        Ok(Self { lambdas, threshold, accuracy: DEFAULT_ACCURACY, term_limit: DEFAULT_TERM_LIMIT })
    }

    pub fn with_accuracy(mut self, accuracy: f64) -> Result<Self> {
        if !(accuracy > 0.0 && accuracy <= 1e-2) {
            return Err(Error::InvalidAccuracy(accuracy));
        }
        self.accuracy = accuracy;
        Ok(self)
    }

    pub fn with_term_limit(mut self, limit: usize) -> Self {
        self.term_limit = limit;
        self
    }

    pub fn lambdas(&self) -> &[f64] {
        &self.lambdas
    }

    pub fn threshold(&self) -> f64 {
        self.threshold
    }

    pub fn accuracy(&self) -> f64 {
        self.accuracy
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TailMethod {
    Davies,
    /// Three-cumulant chi-square approximation, used when inversion fails.
    MomentMatch,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailProbability {
    pub p_value: f64,
    pub method: TailMethod,
    /// Fault reported by the inversion, if any (also set when it was recovered from).
    pub fault: Option<DaviesFault>,
}

impl TailProbability {
    pub fn is_approximate(&self) -> bool {
        self.method == TailMethod::MomentMatch
    }
}

/// `P(Σ λ_k Z_k² > q)`.
pub fn mixture_sf(query: &MixtureQuery) -> TailProbability {
    let out = davies_cdf(&query.lambdas, query.threshold, query.term_limit, query.accuracy);
    match out.fault {
        None | Some(DaviesFault::RoundOff) => TailProbability {
            p_value: (1.0 - out.cdf).clamp(0.0, 1.0),
            method: TailMethod::Davies,
            fault: out.fault,
        },
        Some(fault) => TailProbability {
            p_value: moment_match_sf(&query.lambdas, query.threshold),
            method: TailMethod::MomentMatch,
            fault: Some(fault),
        },
    }
}
