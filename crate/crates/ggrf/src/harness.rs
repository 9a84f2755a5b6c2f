//! Replicated type I error / power estimation.
//!
//! Replicates run on a rayon pool; each one derives all of its randomness
//! from `(seed, replicate, attempt)` and results are gathered in replicate
//! order, so the thread count never changes the output.

use rayon::prelude::*;

use ggrf_core::comparators::{build_kernel, burden_test, KernelKind, KernelModel};
use ggrf_core::simulate::{gen_genotypes, gen_phenotype_replicate, replicate_seed, GenotypePopSpec, PowerEstimate, ScenarioSpec};
use ggrf_core::{
    prepare_genotypes, CovariateMatrix, GenotypeMatrix, GgrfModel, PhenotypeKind, PhenotypeVector, SimilaritySpec, WeightSpec,
};

use crate::error::{AppError, AppResult};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MethodConfig {
    Ggrf { weights: WeightSpec, similarity: SimilaritySpec },
    Skat { weights: WeightSpec, kernel: KernelKind },
    Burden { weights: WeightSpec },
}

impl MethodConfig {
    pub fn ggrf(weights: WeightSpec, similarity: SimilaritySpec) -> Self {
        MethodConfig::Ggrf { weights, similarity }
    }

    pub fn name(&self) -> &'static str {
        match self {
            MethodConfig::Ggrf { .. } => "ggrf",
            MethodConfig::Skat { .. } => "skat",
            MethodConfig::Burden { .. } => "burden",
        }
    }

    pub fn weights(&self) -> WeightSpec {
        match *self {
            MethodConfig::Ggrf { weights, .. } | MethodConfig::Skat { weights, .. } | MethodConfig::Burden { weights } => weights,
        }
    }

    /// Similarity label for GGRF, kernel name for SKAT, `-` for burden.
    pub fn structure_label(&self) -> String {
        match self {
            MethodConfig::Ggrf { similarity, .. } => similarity.label(),
            MethodConfig::Skat { kernel, .. } => kernel.as_str().into(),
            MethodConfig::Burden { .. } => "-".into(),
        }
    }
}

enum Prepared {
    Ggrf(GgrfModel),
    Skat(KernelModel),
    Burden { genotypes: GenotypeMatrix, weights: Vec<f64> },
}

fn prepare(method: &MethodConfig, g: &GenotypeMatrix, kind: PhenotypeKind) -> ggrf_core::Result<Prepared> {
    let x = CovariateMatrix::intercept_only(g.n_subjects());
    Ok(match *method {
        MethodConfig::Ggrf { weights, similarity } => Prepared::Ggrf(GgrfModel::prepare(&x, g, kind, weights, similarity)?),
        MethodConfig::Skat { weights, kernel } => {
            let p = prepare_genotypes(g, &weights)?;
            Prepared::Skat(KernelModel::new(build_kernel(&p.genotypes, &p.weights, kernel)?, x, kind)?)
        }
        MethodConfig::Burden { weights } => {
            let p = prepare_genotypes(g, &weights)?;
            Prepared::Burden { genotypes: p.genotypes, weights: p.weights }
        }
    })
}

fn p_value(model: &Prepared, y: &PhenotypeVector) -> ggrf_core::Result<f64> {
    match model {
        Prepared::Ggrf(m) => Ok(m.test(y)?.p_value),
        Prepared::Skat(m) => Ok(m.test(y)?.p_value),
        Prepared::Burden { genotypes, weights } => {
            Ok(burden_test(y, &CovariateMatrix::intercept_only(y.len()), genotypes, weights)?.p_value)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimulationOptions {
    /// Draw fresh genotypes for every replicate instead of one fixed panel.
    pub regenerate_genotypes: bool,
    pub threads: usize,
    /// Degenerate draws tolerated per replicate before giving up.
    pub max_redraws: u64,
}

impl Default for SimulationOptions {
    fn default() -> Self {
        Self { regenerate_genotypes: false, threads: 1, max_redraws: 100 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PowerRun {
    /// One per method, in input order.
    pub estimates: Vec<PowerEstimate>,
    /// `pvalues[m][r]` for method `m`, replicate `r`.
    pub pvalues: Vec<Vec<f64>>,
    pub redraws: usize,
    /// Mean realized case fraction (binary phenotypes only).
    pub case_fraction: Option<f64>,
}

struct Replicate {
    pvalues: Vec<f64>,
    redraws: usize,
    cases: f64,
}

/// Runs all `methods` on the same simulated replicates.
pub fn estimate_power_many(
    methods: &[MethodConfig],
    pop: &GenotypePopSpec,
    sc: &ScenarioSpec,
    n_replicates: usize,
    alpha: f64,
    opts: &SimulationOptions,
) -> AppResult<PowerRun> {
    if n_replicates < 100 {
        return Err(AppError::Usage(format!("need at least 100 replicates, got {n_replicates}")));
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(AppError::Usage(format!("alpha must lie in (0, 1), got {alpha}")));
    }
    if methods.is_empty() {
        return Err(AppError::Usage("no methods selected".into()));
    }
    if pop.n_variants != sc.n_total {
        return Err(AppError::Usage(format!(
            "scenario has {} variants but the population spec {}",
            sc.n_total, pop.n_variants
        )));
    }
    sc.validate()?;

    let shared = if opts.regenerate_genotypes {
        None
    } else {
        let g = gen_genotypes(pop)?;
        let models = methods.iter().map(|m| prepare(m, &g, sc.phenotype)).collect::<ggrf_core::Result<Vec<_>>>()?;
        Some((g, models))
    };

    let run_one = |r: u64| -> AppResult<Replicate> {
        let mut redraws = 0;
        for attempt in 0..=opts.max_redraws {
            let local;
            let (g, models) = match &shared {
                Some((g, models)) => (g, models),
                None => {
                    let spec = GenotypePopSpec { seed: replicate_seed(pop.seed, r, attempt), ..*pop };
                    let g = gen_genotypes(&spec)?;
                    match methods.iter().map(|m| prepare(m, &g, sc.phenotype)).collect::<ggrf_core::Result<Vec<_>>>() {
                        Ok(models) => {
                            local = (g, models);
                            (&local.0, &local.1)
                        }
                        Err(e) if e.is_degenerate() => {
                            redraws += 1;
                            continue;
                        }
                        Err(e) => return Err(AppError::Replicate { replicate: r, source: e }),
                    }
                }
            };
            let y = match gen_phenotype_replicate(g, sc, r, attempt) {
                Ok(y) => y,
                Err(e) if e.is_degenerate() => {
                    redraws += 1;
                    continue;
                }
                Err(e) => return Err(AppError::Replicate { replicate: r, source: e }),
            };
            match models.iter().map(|m| p_value(m, &y)).collect::<ggrf_core::Result<Vec<_>>>() {
                Ok(pvalues) => {
                    let cases = y.values().iter().sum::<f64>() / y.len() as f64;
                    return Ok(Replicate { pvalues, redraws, cases });
                }
                Err(e) if e.is_degenerate() => redraws += 1,
                Err(e) => return Err(AppError::Replicate { replicate: r, source: e }),
            }
        }
        Err(AppError::Internal(format!("replicate {r}: still degenerate after {} redraws", opts.max_redraws)))
    };

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.threads.max(1))
        .build()
        .map_err(|e| AppError::Internal(e.to_string()))?;
    let replicates: Vec<Replicate> =
        pool.install(|| (0..n_replicates as u64).into_par_iter().map(run_one).collect::<AppResult<Vec<_>>>())?;

    let redraws: usize = replicates.iter().map(|r| r.redraws).sum();
    if redraws > 0 {
        log::info!("{redraws} degenerate draws were replaced");
    }
    let pvalues: Vec<Vec<f64>> = (0..methods.len()).map(|m| replicates.iter().map(|r| r.pvalues[m]).collect()).collect();
    let estimates = pvalues
        .iter()
        .map(|ps| PowerEstimate::from_counts(ps.iter().filter(|p| **p <= alpha).count(), n_replicates, alpha, redraws))
        .collect();
    let case_fraction = (sc.phenotype == PhenotypeKind::Binary)
        .then(|| replicates.iter().map(|r| r.cases).sum::<f64>() / n_replicates as f64);
    Ok(PowerRun { estimates, pvalues, redraws, case_fraction })
}

pub fn estimate_power(
    method: MethodConfig,
    pop: &GenotypePopSpec,
    sc: &ScenarioSpec,
    n_replicates: usize,
    alpha: f64,
    opts: &SimulationOptions,
) -> AppResult<PowerEstimate> {
    Ok(estimate_power_many(&[method], pop, sc, n_replicates, alpha, opts)?.estimates[0])
}
