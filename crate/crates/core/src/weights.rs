//! Per-variant weights as functions of MAF.

use alloc::format;
use alloc::vec::Vec;

use libm::{exp, log, log10};

use crate::special::ln_beta;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum WeightScheme {
    /// UW: every variant weighs 1.
    Uniform,
    /// BETA: squared Beta(a, b) density at the MAF.
    Beta,
    /// WSS: 1 / (MAF (1 - MAF)).
    Wss,
    /// LOG: -log10(MAF).
    Log,
}

impl WeightScheme {
    pub const ALL: [WeightScheme; 4] =
        [WeightScheme::Uniform, WeightScheme::Beta, WeightScheme::Wss, WeightScheme::Log];

    pub fn as_str(self) -> &'static str {
        match self {
            WeightScheme::Uniform => "uw",
            WeightScheme::Beta => "beta",
            WeightScheme::Wss => "wss",
            WeightScheme::Log => "log",
        }
    }
}

impl core::fmt::Display for WeightScheme {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl core::str::FromStr for WeightScheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "uw" | "uniform" | "unweighted" => Ok(Self::Uniform),
            "beta" => Ok(Self::Beta),
            "wss" => Ok(Self::Wss),
            "log" => Ok(Self::Log),
            other => Err(Error::InvalidInput(format!("unknown weight scheme `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightSpec {
    pub scheme: WeightScheme,
    pub beta_shape1: f64,
    pub beta_shape2: f64,
}

impl WeightSpec {
    pub fn new(scheme: WeightScheme) -> Self {
        Self { scheme, beta_shape1: 1.0, beta_shape2: 25.0 }
    }

    pub fn with_beta_shapes(scheme: WeightScheme, a: f64, b: f64) -> Result<Self> {
        let spec = Self { scheme, beta_shape1: a, beta_shape2: b };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.beta_shape1 > 0.0 && self.beta_shape2 > 0.0) {
            return Err(Error::InvalidInput(format!(
                "beta shapes must be positive, got ({}, {})",
                self.beta_shape1, self.beta_shape2
            )));
        }
        Ok(())
    }

    /// Weight of a single variant.
    pub fn weight(&self, maf: f64) -> f64 {
        match self.scheme {
            WeightScheme::Uniform => 1.0,
            WeightScheme::Beta => {
                let d = beta_density(maf, self.beta_shape1, self.beta_shape2);
                d * d
            }
            WeightScheme::Wss => 1.0 / (maf * (1.0 - maf)),
            WeightScheme::Log => -log10(maf),
        }
    }
}

impl Default for WeightSpec {
    fn default() -> Self {
        Self::new(WeightScheme::Beta)
    }
}

/// Beta(a, b) density, with the `x^(a-1)` factor taken as 1 when a = 1.
pub fn beta_density(x: f64, a: f64, b: f64) -> f64 {
    let mut ln = -ln_beta(a, b);
    if a != 1.0 {
        ln += (a - 1.0) * log(x);
    }
    if b != 1.0 {
        ln += (b - 1.0) * libm::log1p(-x);
    }
    exp(ln)
}

/// Weight vector for the given MAFs. Weights are unscaled.
pub fn compute_weights(mafs: &[f64], spec: &WeightSpec) -> Result<Vec<f64>> {
    spec.validate()?;
    mafs.iter()
        .enumerate()
        .map(|(index, &maf)| {
            if !(0.0..=0.5).contains(&maf) {
                return Err(Error::InvalidInput(format!("MAF {maf} of variant {index} outside [0, 0.5]")));
            }
            if maf == 0.0 && matches!(spec.scheme, WeightScheme::Wss | WeightScheme::Log) {
                return Err(Error::DivergentWeight { index, maf });
            }
            Ok(spec.weight(maf))
        })
        .collect()
}

/// Rescales weights so the largest equals 1 (plotting only).
pub fn normalize_max(weights: &[f64]) -> Vec<f64> {
    let max = weights.iter().copied().fold(0.0, f64::max);
    if max > 0.0 {
        weights.iter().map(|w| w / max).collect()
    } else {
        weights.to_vec()
    }
}
