//! Synthetic genotypes and phenotypes for type I error and power studies.
//!
//! Every random draw comes from a ChaCha8 stream keyed by a mixed seed, so a
//! (seed, replicate, attempt) triple always reproduces the same data
//! regardless of which thread generates it.

use alloc::vec::Vec;

use libm::{exp, fabs, log, log10};
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::data::{GenotypeMatrix, PhenotypeKind, PhenotypeVector};
use crate::special::clopper_pearson;
use crate::weights::beta_density;
use crate::{Error, Matrix, Result};

const STREAM_GENOTYPE: u64 = 0x67656e6f;
const STREAM_CAUSAL: u64 = 0x63617573;
const STREAM_PHENO: u64 = 0x70686e6f;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed for replicate `index`, redraw `attempt`, derived from `base`.
pub fn replicate_seed(base: u64, index: u64, attempt: u64) -> u64 {
    splitmix64(splitmix64(splitmix64(base) ^ index) ^ attempt.wrapping_mul(0xD1B5_4A32_D192_ED03))
}

fn stream(seed: u64, tag: u64, index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(replicate_seed(seed ^ tag, index, 0))
}

/// Population MAF distribution for synthetic variants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MafLaw {
    /// `log MAF` uniform on `[log lo, log hi]`.
    LogUniform { lo: f64, hi: f64 },
    /// Log-uniform below and above `split`, with `rare_fraction` of the
    /// variants in the lower piece.
    RareEnriched { lo: f64, hi: f64, split: f64, rare_fraction: f64 },
}

impl Default for MafLaw {
    fn default() -> Self {
        MafLaw::RareEnriched { lo: 0.0007, hi: 0.494, split: 0.01, rare_fraction: 0.6 }
    }
}

fn log_uniform<R: Rng>(rng: &mut R, lo: f64, hi: f64) -> f64 {
    if lo == hi {
        return lo;
    }
    let u: f64 = rng.random();
    exp(log(lo) + u * (log(hi) - log(lo)))
}

impl MafLaw {
    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            MafLaw::LogUniform { lo, hi } => 0.0 < lo && lo <= hi && hi <= 0.5,
            MafLaw::RareEnriched { lo, hi, split, rare_fraction } => {
                0.0 < lo && lo <= split && split <= hi && hi <= 0.5 && (0.0..=1.0).contains(&rare_fraction)
            }
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidInput(alloc::format!("invalid MAF law {self:?}")))
        }
    }

    pub fn draw<R: Rng>(&self, rng: &mut R) -> f64 {
        match *self {
            MafLaw::LogUniform { lo, hi } => log_uniform(rng, lo, hi),
            MafLaw::RareEnriched { lo, hi, split, rare_fraction } => {
                let u: f64 = rng.random();
                if u < rare_fraction {
                    log_uniform(rng, lo, split)
                } else {
                    log_uniform(rng, split, hi)
                }
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GenotypePopSpec {
    pub n_subjects: usize,
    pub n_variants: usize,
    pub maf_law: MafLaw,
    pub seed: u64,
    /// Redraw the dosages of a column (same MAF) until it is polymorphic.
    pub require_polymorphic: bool,
}

impl GenotypePopSpec {
    pub fn new(n_subjects: usize, n_variants: usize, seed: u64) -> Self {
        Self { n_subjects, n_variants, maf_law: MafLaw::default(), seed, require_polymorphic: true }
    }

    pub fn with_maf_law(mut self, law: MafLaw) -> Self {
        self.maf_law = law;
        self
    }
}

const MAX_POLYMORPHIC_ATTEMPTS: usize = 10_000;

/// Independent loci, dosages Binomial(2, MAF). Column `j` depends only on
/// `(seed, j)`, so a larger `n_variants` extends the matrix without changing
/// its leading columns.
pub fn gen_genotypes(spec: &GenotypePopSpec) -> Result<GenotypeMatrix> {
    spec.maf_law.validate()?;
    let (n, k) = (spec.n_subjects, spec.n_variants);
    let mut dosages = Matrix::zeros(n, k);
    let mut column = alloc::vec![0.0; n];
    for j in 0..k {
        let mut rng = stream(spec.seed, STREAM_GENOTYPE, j as u64);
        let maf = spec.maf_law.draw(&mut rng);
        for _ in 0..MAX_POLYMORPHIC_ATTEMPTS {
            for v in column.iter_mut() {
                *v = (rng.random::<f64>() < maf) as u8 as f64 + (rng.random::<f64>() < maf) as u8 as f64;
            }
            let first = column[0];
            if !spec.require_polymorphic || column.iter().any(|v| *v != first) {
                break;
            }
        }
        dosages.column_mut(j).copy_from_slice(&column);
    }
    GenotypeMatrix::from_dosages(dosages)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum DiseaseModel {
    Null,
    /// Equal effects.
    S1,
    /// Effects proportional to the squared Beta(1, 25) density.
    S2,
    /// Effects proportional to `1 / (MAF (1 - MAF))`.
    S3,
    /// Effects proportional to `|log10 MAF|`.
    S4,
}

impl DiseaseModel {
    pub const ALL: [DiseaseModel; 5] =
        [DiseaseModel::Null, DiseaseModel::S1, DiseaseModel::S2, DiseaseModel::S3, DiseaseModel::S4];

    pub fn as_str(self) -> &'static str {
        match self {
            DiseaseModel::Null => "null",
            DiseaseModel::S1 => "s1",
            DiseaseModel::S2 => "s2",
            DiseaseModel::S3 => "s3",
            DiseaseModel::S4 => "s4",
        }
    }

    /// Unscaled effect of a causal variant with the given MAF.
    pub fn effect(self, maf: f64) -> f64 {
        if maf <= 0.0 {
            return 0.0;
        }
        match self {
            DiseaseModel::Null => 0.0,
            DiseaseModel::S1 => 1.0,
            DiseaseModel::S2 => {
                let d = beta_density(maf, 1.0, 25.0);
                d * d
            }
            DiseaseModel::S3 => 1.0 / (maf * (1.0 - maf)),
            DiseaseModel::S4 => fabs(log10(maf)),
        }
    }
}

impl core::str::FromStr for DiseaseModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "null" => Ok(Self::Null),
            "s1" => Ok(Self::S1),
            "s2" => Ok(Self::S2),
            "s3" => Ok(Self::S3),
            "s4" => Ok(Self::S4),
            other => Err(Error::InvalidInput(alloc::format!("unknown scenario `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    OneDirection,
    /// A random half of the causal effects are negated.
    Bidirection,
}

impl Direction {
    pub fn as_str(self) -> &'static str {
        match self {
            Direction::OneDirection => "one",
            Direction::Bidirection => "bi",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScenarioSpec {
    pub model: DiseaseModel,
    pub n_causal: usize,
    pub n_total: usize,
    pub direction: Direction,
    pub effect_scale: f64,
    pub phenotype: PhenotypeKind,
    pub target_case_fraction: f64,
    pub seed: u64,
    /// Keep one causal set (and sign pattern) for all replicates.
    pub fix_causal_set: bool,
}

impl ScenarioSpec {
    pub fn null(n_total: usize, phenotype: PhenotypeKind, seed: u64) -> Self {
        Self {
            model: DiseaseModel::Null,
            n_causal: 0,
            n_total,
            direction: Direction::OneDirection,
            effect_scale: 0.0,
            phenotype,
            target_case_fraction: 1.0 / 3.0,
            seed,
            fix_causal_set: false,
        }
    }

    pub fn new(model: DiseaseModel, n_causal: usize, n_total: usize, effect_scale: f64, phenotype: PhenotypeKind, seed: u64) -> Self {
        Self { model, n_causal, effect_scale, ..Self::null(n_total, phenotype, seed) }
    }

    pub fn with_direction(mut self, direction: Direction) -> Self {
        self.direction = direction;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_causal > self.n_total {
            return Err(Error::InvalidInput(alloc::format!(
                "{} causal variants out of {}",
                self.n_causal,
                self.n_total
            )));
        }
        if !self.effect_scale.is_finite() {
            return Err(Error::InvalidInput("effect scale must be finite".into()));
        }
        if !(self.target_case_fraction > 0.0 && self.target_case_fraction < 1.0) {
            return Err(Error::InvalidInput("case fraction must lie in (0, 1)".into()));
        }
        Ok(())
    }
}

/// Per-variant effects for one replicate (zero outside the causal set).
pub fn effect_sizes(g: &GenotypeMatrix, sc: &ScenarioSpec, replicate: u64) -> Result<Vec<f64>> {
    sc.validate()?;
    let k = g.n_variants();
    if sc.n_total != k {
        return Err(Error::Dimension(alloc::format!("scenario expects {} variants, genotypes have {k}", sc.n_total)));
    }
    let mut beta = alloc::vec![0.0; k];
    if sc.model == DiseaseModel::Null || sc.n_causal == 0 {
        return Ok(beta);
    }
    let mafs = g.mafs()?;
    let index = if sc.fix_causal_set { 0 } else { replicate };
    let mut rng = stream(sc.seed, STREAM_CAUSAL, index);
    let mut causal = sample(&mut rng, k, sc.n_causal).into_vec();
    causal.sort_unstable();
    for &j in &causal {
        beta[j] = sc.effect_scale * sc.model.effect(mafs[j]);
    }
    if sc.direction == Direction::Bidirection {
        for pos in sample(&mut rng, sc.n_causal, sc.n_causal / 2) {
            beta[causal[pos]] = -beta[causal[pos]];
        }
    }
    Ok(beta)
}

fn logistic(eta: f64) -> f64 {
    if eta >= 0.0 {
        1.0 / (1.0 + exp(-eta))
    } else {
        let e = exp(eta);
        e / (1.0 + e)
    }
}

/// Intercept μ with `mean(logistic(μ + η_i)) = target`.
pub fn solve_intercept(eta: &[f64], target: f64) -> f64 {
    let mean = |mu: f64| eta.iter().map(|e| logistic(mu + e)).sum::<f64>() / eta.len() as f64;
    let (mut lo, mut hi) = (-60.0, 60.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mean(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-12 {
            break;
        }
    }
    0.5 * (lo + hi)
}

/// Phenotypes for `replicate`; `attempt` selects a fresh draw when an
/// earlier one was degenerate.
pub fn gen_phenotype_replicate(g: &GenotypeMatrix, sc: &ScenarioSpec, replicate: u64, attempt: u64) -> Result<PhenotypeVector> {
    let beta = effect_sizes(g, sc, replicate)?;
    let n = g.n_subjects();
    let eta = g.dosages() * nalgebra::DVector::from_vec(beta);
    let mut rng = ChaCha8Rng::seed_from_u64(replicate_seed(sc.seed ^ STREAM_PHENO, replicate, attempt));
    match sc.phenotype {
        PhenotypeKind::Quantitative => {
            let y = (0..n).map(|i| eta[i] + rng.sample::<f64, _>(StandardNormal)).collect();
            PhenotypeVector::quantitative(y)
        }
        PhenotypeKind::Binary => {
            let mu = solve_intercept(eta.as_slice(), sc.target_case_fraction);
            let y = (0..n).map(|i| (rng.random::<f64>() < logistic(mu + eta[i])) as u8 as f64).collect();
            PhenotypeVector::binary(y)
        }
    }
}

pub fn gen_phenotype(g: &GenotypeMatrix, sc: &ScenarioSpec) -> Result<PhenotypeVector> {
    gen_phenotype_replicate(g, sc, 0, 0)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerEstimate {
    pub rejections: usize,
    pub n_replicates: usize,
    pub rejection_rate: f64,
    pub alpha: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    /// Degenerate draws that were replaced.
    pub redraws: usize,
}

impl PowerEstimate {
    pub fn from_counts(rejections: usize, n_replicates: usize, alpha: f64, redraws: usize) -> Self {
        let (ci_low, ci_high) = clopper_pearson(rejections, n_replicates, 0.95);
        let rate = if n_replicates == 0 { 0.0 } else { rejections as f64 / n_replicates as f64 };
        Self { rejections, n_replicates, rejection_rate: rate, alpha, ci_low, ci_high, redraws }
    }

    /// Binomial standard error of the rate.
    pub fn standard_error(&self) -> f64 {
        let p = self.rejection_rate;
        libm::sqrt(p * (1.0 - p) / self.n_replicates as f64)
    }
}
