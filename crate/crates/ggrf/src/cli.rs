//! `ggrf test | simulate | weights | mixture`.

use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::builder::TypedValueParser as _;
use clap::error::ErrorKind;
use clap::{Args, CommandFactory, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use ggrf_core::comparators::{burden_test, kernel_score_test, KernelKind};
use ggrf_core::mixture::{mc_oracle_many, mixture_sf, MixtureQuery, TailMethod};
use ggrf_core::simulate::{DiseaseModel, Direction, GenotypePopSpec, ScenarioSpec};
use ggrf_core::weights::{compute_weights, normalize_max};
use ggrf_core::{
    prepare_genotypes, CovariateMatrix, GenotypeMatrix, GgrfModel, NormOrder, PhenotypeKind, PhenotypeVector,
    SimilaritySpec, WeightScheme, WeightSpec,
};

use crate::config::EffectScales;
use crate::error::{AppError, AppResult};
use crate::harness::{estimate_power_many, MethodConfig, SimulationOptions};
use crate::io;
use crate::output::{format_sig, Cell, Format, ResultTable};

#[derive(Debug, Parser)]
#[command(name = "ggrf", version, about = "Generalized genetic random field association test")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Region-based association test on genotype and phenotype files.
    Test(TestArgs),
    /// Type I error / power by simulation.
    Simulate(SimulateArgs),
    /// Weight as a function of MAF, for plotting.
    Weights(WeightsArgs),
    /// Upper tail of a weighted sum of independent chi-square(1) variables.
    Mixture(MixtureArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PhenoType {
    #[value(alias = "q", alias = "continuous")]
    Quantitative,
    #[value(alias = "b", alias = "dichotomous")]
    Binary,
}

impl From<PhenoType> for PhenotypeKind {
    fn from(p: PhenoType) -> Self {
        match p {
            PhenoType::Quantitative => PhenotypeKind::Quantitative,
            PhenoType::Binary => PhenotypeKind::Binary,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, ValueEnum)]
pub enum MethodName {
    Ggrf,
    Skat,
    Burden,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DirectionArg {
    One,
    Bi,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    /// Output file; standard output when omitted or `-`.
    #[arg(long, short)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Tsv)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct TestArgs {
    /// Dosage TSV (variants as rows) or uncompressed VCF.
    #[arg(long)]
    pub geno: PathBuf,
    /// Tab-separated phenotype table, first column subject id.
    #[arg(long)]
    pub pheno: PathBuf,
    #[arg(long)]
    pub pheno_col: String,
    #[arg(long, value_enum, default_value_t = PhenoType::Quantitative)]
    pub pheno_type: PhenoType,
    /// Tab-separated covariate table; every column after the id is used.
    #[arg(long)]
    pub covar: Option<PathBuf>,
    /// Two columns: variant id, region id. Without it all variants form one region.
    #[arg(long)]
    pub regions: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = MethodName::Ggrf)]
    pub method: MethodName,
    #[arg(long, default_value = "beta", value_parser = parse_weight)]
    pub weights: WeightScheme,
    /// Beta density shapes for BETA weights.
    #[arg(long, value_delimiter = ',', num_args = 2, default_values_t = [1.0, 25.0])]
    pub beta_shapes: Vec<f64>,
    /// d1s..d4s, `c` prefix for the centered form (e.g. cd1s).
    #[arg(long, default_value = "d1s", value_parser = parse_similarity)]
    pub similarity: SimilaritySpec,
    /// Kernel for the skat method: linear or ibs.
    #[arg(long, default_value = "linear", value_parser = parse_kernel)]
    pub kernel: KernelKind,
    #[command(flatten)]
    pub output: OutputArgs,
    #[arg(long, default_value_t = 1)]
    pub threads: usize,
    /// Write each region's similarity matrix into this directory.
    #[arg(long)]
    pub dump_similarity: Option<PathBuf>,
    /// Extra columns: tail method, Davies fault, IRLS iterations and the spectrum.
    #[arg(long)]
    pub diagnostics: bool,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long, value_parser = scenario_parser())]
    pub scenario: DiseaseModel,
    #[arg(long, value_enum, default_value_t = PhenoType::Quantitative)]
    pub pheno_type: PhenoType,
    #[arg(long, value_enum, value_delimiter = ',', default_value = "ggrf")]
    pub method: Vec<MethodName>,
    #[arg(long, value_delimiter = ',', default_value = "beta", value_parser = parse_weight)]
    pub weights: Vec<WeightScheme>,
    #[arg(long, value_delimiter = ',', default_value = "d1s", value_parser = parse_similarity)]
    pub similarity: Vec<SimilaritySpec>,
    #[arg(long, value_delimiter = ',', default_value = "linear", value_parser = parse_kernel)]
    pub kernel: Vec<KernelKind>,
    #[arg(long, default_value_t = 1000)]
    pub reps: usize,
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, default_value_t = 500)]
    pub n_subjects: usize,
    #[arg(long, default_value_t = 100)]
    pub n_variants: usize,
    /// Defaults to min(50, n-variants); ignored for the null scenario.
    #[arg(long)]
    pub n_causal: Option<usize>,
    /// Defaults to the bundled calibrated scale for the scenario.
    #[arg(long)]
    pub effect_scale: Option<f64>,
    #[arg(long, value_enum, default_value_t = DirectionArg::One)]
    pub direction: DirectionArg,
    /// Case fraction targeted by the intercept of binary phenotypes.
    #[arg(long, default_value_t = 1.0 / 3.0)]
    pub case_fraction: f64,
    /// Fresh genotypes every replicate instead of one fixed panel.
    #[arg(long)]
    pub regenerate_genotypes: bool,
    /// Keep one causal set and sign pattern across replicates.
    #[arg(long)]
    pub fix_causal: bool,
    #[arg(long, default_value_t = 1)]
    pub threads: usize,
    #[command(flatten)]
    pub output: OutputArgs,
    /// Also write per-replicate p-values (TSV) here.
    #[arg(long)]
    pub dump_pvalues: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct WeightsArgs {
    #[arg(long, default_value = "beta", value_parser = parse_weight)]
    pub scheme: WeightScheme,
    /// A file with one MAF per line, or an inline comma-separated list.
    #[arg(long, conflicts_with = "grid")]
    pub mafs: Option<String>,
    /// Log-spaced grid of this many MAFs over [0.0007, 0.5].
    #[arg(long)]
    pub grid: Option<usize>,
    #[arg(long, value_delimiter = ',', num_args = 2, default_values_t = [1.0, 25.0])]
    pub beta_shapes: Vec<f64>,
    /// Rescale so the largest weight is 1.
    #[arg(long)]
    pub normalize: bool,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct MixtureArgs {
    /// Comma-separated coefficients (may be negative).
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
    pub lambdas: Vec<f64>,
    /// Thresholds; one output row each.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
    pub q: Vec<f64>,
    /// Monte Carlo draws for a reference estimate (0 skips it).
    #[arg(long, default_value_t = 0)]
    pub draws: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, default_value_t = ggrf_core::mixture::DEFAULT_ACCURACY)]
    pub accuracy: f64,
    #[command(flatten)]
    pub output: OutputArgs,
}

fn parse_weight(s: &str) -> Result<WeightScheme, String> {
    s.parse().map_err(|e: ggrf_core::Error| e.to_string())
}

fn parse_kernel(s: &str) -> Result<KernelKind, String> {
    s.parse().map_err(|e: ggrf_core::Error| e.to_string())
}

fn scenario_parser() -> impl clap::builder::TypedValueParser<Value = DiseaseModel> {
    let names: Vec<&'static str> = DiseaseModel::ALL.iter().map(|m| m.as_str()).collect();
    clap::builder::PossibleValuesParser::new(names).map(|s| s.parse::<DiseaseModel>().expect("listed scenario"))
}

/// `d1s`, `D2S`, `ibs`, `3`; a leading `c` (or `centered-`) selects the centered form.
pub fn parse_similarity(s: &str) -> Result<SimilaritySpec, String> {
    let t = s.trim().to_ascii_lowercase();
    let (centered, rest) = if let Some(r) = t.strip_prefix("centered-") {
        (true, r)
    } else if let Some(r) = t.strip_prefix('c') {
        (true, r)
    } else {
        (false, t.as_str())
    };
    let order: NormOrder = rest.parse().map_err(|e: ggrf_core::Error| e.to_string())?;
    Ok(SimilaritySpec { order, centered })
}

fn weight_spec(scheme: WeightScheme, shapes: &[f64]) -> AppResult<WeightSpec> {
    match shapes {
        [a, b] => Ok(WeightSpec::with_beta_shapes(scheme, *a, *b).map_err(|e| AppError::Usage(e.to_string()))?),
        _ => Err(AppError::Usage("--beta-shapes takes two values".into())),
    }
}

fn thread_pool(threads: usize) -> AppResult<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads.max(1))
        .build()
        .map_err(|e| AppError::Internal(e.to_string()))
}

fn display(p: &Path) -> String {
    p.display().to_string()
}

/// Parses `args` (including the program name) and runs; returns the exit status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            if matches!(e.kind(), ErrorKind::InvalidValue | ErrorKind::ValueValidation) {
                let mut cmd = Cli::command();
                cmd.build();
                let name = args.get(1).and_then(|a| a.to_str()).unwrap_or_default();
                if let Some(sub) = cmd.find_subcommand_mut(name) {
                    eprintln!("\n{}", sub.render_usage());
                }
            }
            return e.exit_code();
        }
    };
    match dispatch(cli.command) {
        Ok(status) => status,
        Err(e) => {
            eprintln!("ggrf: error: {e}");
            e.exit_code()
        }
    }
}

pub fn dispatch(command: Command) -> AppResult<i32> {
    match command {
        Command::Test(a) => run_test(&a),
        Command::Simulate(a) => run_simulate(&a).map(|_| 0),
        Command::Weights(a) => run_weights(&a).map(|_| 0),
        Command::Mixture(a) => run_mixture(&a).map(|_| 0),
    }
}

struct RegionRow {
    cells: Vec<Cell>,
    degenerate: bool,
}

struct RegionOutcome {
    n_variants: usize,
    statistic_name: &'static str,
    statistic: f64,
    p_value: f64,
    tail: Option<&'static str>,
    fault: Option<usize>,
    n_eigen: Option<usize>,
    iterations: Option<usize>,
    spectrum: Option<String>,
}

fn test_region(
    args: &TestArgs,
    wspec: WeightSpec,
    g: &GenotypeMatrix,
    y: &PhenotypeVector,
    x: &CovariateMatrix,
    region_id: &str,
) -> AppResult<RegionOutcome> {
    let kind = y.kind();
    match args.method {
        MethodName::Ggrf => {
            let model = GgrfModel::prepare(x, g, kind, wspec, args.similarity)?;
            if let Some(dir) = &args.dump_similarity {
                let file = dir.join(format!("{}.similarity.tsv", sanitize(region_id)));
                io::write_similarity_tsv(&file, model.similarity(), g.subject_ids())?;
            }
            let r = model.test(y)?;
            Ok(RegionOutcome {
                n_variants: r.n_variants,
                statistic_name: "gamma_hat",
                statistic: r.gamma_hat,
                p_value: r.p_value,
                tail: Some(match r.tail.method {
                    TailMethod::Davies => "davies",
                    TailMethod::MomentMatch => "moment",
                }),
                fault: r.tail.fault.map(|f| f as usize),
                n_eigen: Some(r.eigenvalues.len()),
                iterations: Some(r.null_fit.iterations),
                spectrum: Some(r.eigenvalues.iter().map(|l| format_sig(*l)).collect::<Vec<_>>().join(",")),
            })
        }
        MethodName::Skat | MethodName::Burden => {
            let p = prepare_genotypes(g, &wspec)?;
            let r = if args.method == MethodName::Skat {
                kernel_score_test(y, x, &p.genotypes, &p.weights, args.kernel)?
            } else {
                burden_test(y, x, &p.genotypes, &p.weights)?
            };
            Ok(RegionOutcome {
                n_variants: p.genotypes.n_variants(),
                statistic_name: if args.method == MethodName::Skat { "Q" } else { "wald" },
                statistic: r.statistic,
                p_value: r.p_value,
                tail: None,
                fault: None,
                n_eigen: None,
                iterations: None,
                spectrum: None,
            })
        }
    }
}

fn sanitize(id: &str) -> String {
    id.chars().map(|c| if c.is_ascii_alphanumeric() || "-_.".contains(c) { c } else { '_' }).collect()
}

fn run_test(args: &TestArgs) -> AppResult<i32> {
    let wspec = weight_spec(args.weights, &args.beta_shapes)?;
    let kind: PhenotypeKind = args.pheno_type.into();
    let genotypes = io::read_genotypes(&args.geno)?;
    let pheno = io::read_table(&args.pheno)?;
    let covar = args.covar.as_deref().map(io::read_table).transpose()?;
    let data = io::join_subjects(&genotypes, &pheno, &args.pheno_col, kind, covar.as_ref())?;
    if data.dropped_subjects > 0 {
        log::warn!("{} genotyped subjects dropped for missing phenotype or covariates", data.dropped_subjects);
    }
    let regions = io::read_regions(args.regions.as_deref(), data.genotypes.variant_ids())?;
    if let Some(dir) = &args.dump_similarity {
        std::fs::create_dir_all(dir).map_err(|e| AppError::io(dir, e))?;
    }

    let structure = match args.method {
        MethodName::Ggrf => args.similarity.label(),
        MethodName::Skat => args.kernel.as_str().into(),
        MethodName::Burden => "-".into(),
    };
    let method = args.method.to_possible_value().expect("named").get_name().to_owned();
    let n_subjects = data.phenotype.len();

    let rows = thread_pool(args.threads)?.install(|| {
        regions
            .par_iter()
            .map(|region| -> AppResult<RegionRow> {
                let g = data.genotypes.select_variants(&region.variants)?;
                let mut cells: Vec<Cell> = vec![region.id.clone().into(), region.variants.len().into()];
                let outcome = test_region(args, wspec, &g, &data.phenotype, &data.covariates, &region.id);
                let degenerate = match &outcome {
                    Err(AppError::Stats(e)) if e.is_degenerate() => true,
                    Err(_) => false,
                    Ok(_) => false,
                };
                match outcome {
                    Ok(o) => {
                        cells.extend([
                            o.n_variants.into(),
                            n_subjects.into(),
                            method.as_str().into(),
                            args.weights.as_str().into(),
                            structure.as_str().into(),
                            o.statistic_name.into(),
                            o.statistic.into(),
                            o.p_value.into(),
                            "ok".into(),
                        ]);
                        if args.diagnostics {
                            cells.extend([o.tail.into(), o.fault.into(), o.n_eigen.into(), o.iterations.into(), o.spectrum.into()]);
                        }
                    }
                    Err(e) if degenerate => {
                        log::warn!("region {}: {e}", region.id);
                        cells.extend([
                            Cell::Missing,
                            n_subjects.into(),
                            method.as_str().into(),
                            args.weights.as_str().into(),
                            structure.as_str().into(),
                            Cell::Missing,
                            Cell::Missing,
                            Cell::Missing,
                            e.to_string().into(),
                        ]);
                        if args.diagnostics {
                            cells.extend([Cell::Missing, Cell::Missing, Cell::Missing, Cell::Missing, Cell::Missing]);
                        }
                    }
                    Err(e) => return Err(e),
                }
                Ok(RegionRow { cells, degenerate })
            })
            .collect::<AppResult<Vec<_>>>()
    })?;

    let mut columns = vec![
        "region",
        "n_variants_pre",
        "n_variants",
        "n_subjects",
        "method",
        "weights",
        "structure",
        "statistic_name",
        "statistic",
        "p_value",
        "status",
    ];
    if args.diagnostics {
        columns.extend(["tail", "davies_fault", "n_eigenvalues", "null_iterations", "eigenvalues"]);
    }
    let mut table = ResultTable::new(&columns);
    table.provenance("command", "test");
    table.provenance("geno", display(&args.geno));
    table.provenance("pheno", display(&args.pheno));
    table.provenance("pheno_col", &args.pheno_col);
    table.provenance("pheno_type", kind.as_str());
    table.provenance("covar", args.covar.as_deref().map_or("-".into(), display));
    table.provenance("regions", args.regions.as_deref().map_or("-".into(), display));
    table.provenance("method", &method);
    table.provenance("weights", args.weights);
    table.provenance("beta_shapes", format!("{},{}", wspec.beta_shape1, wspec.beta_shape2));
    table.provenance("structure", &structure);
    let degenerate = rows.iter().filter(|r| r.degenerate).count();
    for row in rows {
        table.push(row.cells);
    }
    table.write(args.output.out.as_deref(), args.output.format)?;
    if degenerate > 0 {
        eprintln!("ggrf: {degenerate} region(s) could not be tested; see the status column");
        return Ok(3);
    }
    Ok(0)
}

fn expand_methods(args: &SimulateArgs) -> AppResult<Vec<MethodConfig>> {
    let mut methods = Vec::new();
    let mut names = args.method.clone();
    names.sort();
    names.dedup();
    for name in names {
        for &scheme in &args.weights {
            let w = WeightSpec::new(scheme);
            match name {
                MethodName::Ggrf => methods.extend(args.similarity.iter().map(|&s| MethodConfig::ggrf(w, s))),
                MethodName::Skat => methods.extend(args.kernel.iter().map(|&k| MethodConfig::Skat { weights: w, kernel: k })),
                MethodName::Burden => methods.push(MethodConfig::Burden { weights: w }),
            }
        }
    }
    methods.dedup();
    if methods.is_empty() {
        return Err(AppError::Usage("no method configurations selected".into()));
    }
    Ok(methods)
}

fn run_simulate(args: &SimulateArgs) -> AppResult<()> {
    if args.reps == 0 {
        return Err(AppError::Usage("--reps must be positive".into()));
    }
    let kind: PhenotypeKind = args.pheno_type.into();
    let model = args.scenario;
    let (n_causal, scale) = if model == DiseaseModel::Null {
        (0, 0.0)
    } else {
        let n_causal = args.n_causal.unwrap_or(args.n_variants.min(50));
        let scale = match args.effect_scale {
            Some(s) => s,
            None => EffectScales::bundled()
                .weights
                .get(model)
                .ok_or_else(|| AppError::Usage(format!("no default effect scale for {}", model.as_str())))?,
        };
        (n_causal, scale)
    };
    if !(scale.is_finite() && scale >= 0.0) {
        return Err(AppError::Usage(format!("effect scale must be finite and non-negative, got {scale}")));
    }
    let direction = match args.direction {
        DirectionArg::One => Direction::OneDirection,
        DirectionArg::Bi => Direction::Bidirection,
    };
    let mut sc = ScenarioSpec::new(model, n_causal, args.n_variants, scale, kind, args.seed).with_direction(direction);
    sc.fix_causal_set = args.fix_causal;
    sc.target_case_fraction = args.case_fraction;
    sc.validate().map_err(|e| AppError::Usage(e.to_string()))?;
    let pop = GenotypePopSpec::new(args.n_subjects, args.n_variants, args.seed);
    let methods = expand_methods(args)?;
    let opts = SimulationOptions { regenerate_genotypes: args.regenerate_genotypes, threads: args.threads, ..Default::default() };

    let started = Instant::now();
    let run = estimate_power_many(&methods, &pop, &sc, args.reps, args.alpha, &opts)?;
    eprintln!(
        "ggrf simulate: {} replicates x {} configurations in {:.1}s",
        args.reps,
        methods.len(),
        started.elapsed().as_secs_f64()
    );

    let mut table = ResultTable::new(&[
        "scenario",
        "direction",
        "pheno_type",
        "method",
        "weights",
        "structure",
        "n_subjects",
        "n_variants",
        "n_causal",
        "effect_scale",
        "alpha",
        "replicates",
        "rejections",
        "rate",
        "se",
        "ci_low",
        "ci_high",
        "redraws",
        "case_fraction",
    ]);
    table.provenance("command", "simulate");
    table.provenance("scenario", model.as_str());
    table.provenance("direction", direction.as_str());
    table.provenance("pheno_type", kind.as_str());
    table.provenance("seed", args.seed);
    table.provenance("reps", args.reps);
    table.provenance("alpha", format_sig(args.alpha));
    table.provenance("n_subjects", args.n_subjects);
    table.provenance("n_variants", args.n_variants);
    table.provenance("n_causal", n_causal);
    table.provenance("effect_scale", format_sig(scale));
    table.provenance("case_fraction", format_sig(args.case_fraction));
    table.provenance("regenerate_genotypes", args.regenerate_genotypes);
    table.provenance("fix_causal", args.fix_causal);
    for (m, est) in methods.iter().zip(&run.estimates) {
        table.push(vec![
            model.as_str().into(),
            direction.as_str().into(),
            kind.as_str().into(),
            m.name().into(),
            m.weights().scheme.as_str().into(),
            m.structure_label().into(),
            args.n_subjects.into(),
            args.n_variants.into(),
            n_causal.into(),
            scale.into(),
            args.alpha.into(),
            est.n_replicates.into(),
            est.rejections.into(),
            est.rejection_rate.into(),
            est.standard_error().into(),
            est.ci_low.into(),
            est.ci_high.into(),
            run.redraws.into(),
            run.case_fraction.into(),
        ]);
    }
    table.write(args.output.out.as_deref(), args.output.format)?;

    if let Some(path) = &args.dump_pvalues {
        let labels: Vec<String> =
            methods.iter().map(|m| format!("{}_{}_{}", m.name(), m.weights().scheme.as_str(), m.structure_label())).collect();
        let mut columns = vec!["replicate"];
        columns.extend(labels.iter().map(String::as_str));
        let mut dump = ResultTable::new(&columns);
        dump.provenance("command", "simulate");
        dump.provenance("scenario", model.as_str());
        dump.provenance("seed", args.seed);
        for r in 0..args.reps {
            let mut row: Vec<Cell> = vec![r.into()];
            row.extend(run.pvalues.iter().map(|ps| Cell::Real(ps[r])));
            dump.push(row);
        }
        dump.write(Some(path), Format::Tsv)?;
    }
    Ok(())
}

fn read_mafs(spec: &str) -> AppResult<Vec<f64>> {
    let path = Path::new(spec);
    if path.is_file() {
        let text = std::fs::read_to_string(path).map_err(|e| AppError::io(path, e))?;
        let mut mafs = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let field = line.split('\t').next().unwrap_or("").trim();
            if field.is_empty() || field.starts_with('#') {
                continue;
            }
            match field.parse::<f64>() {
                Ok(v) => mafs.push(v),
                // tolerate a header line
                Err(_) if mafs.is_empty() && i == 0 => {}
                Err(_) => return Err(AppError::format(path, i + 1, format!("not a number: `{field}`"))),
            }
        }
        Ok(mafs)
    } else {
        spec.split(',')
            .map(|s| s.trim().parse::<f64>().map_err(|_| AppError::Usage(format!("--mafs: `{s}` is neither a file nor a number"))))
            .collect()
    }
}

fn maf_grid(n: usize) -> Vec<f64> {
    let (lo, hi) = (0.0007f64.ln(), 0.5f64.ln());
    match n {
        0 => Vec::new(),
        1 => vec![0.0007],
        _ => (0..n).map(|i| (lo + (hi - lo) * i as f64 / (n - 1) as f64).exp()).collect(),
    }
}

fn run_weights(args: &WeightsArgs) -> AppResult<()> {
    let spec = weight_spec(args.scheme, &args.beta_shapes)?;
    let mafs = match (&args.mafs, args.grid) {
        (Some(m), _) => read_mafs(m)?,
        (None, Some(n)) => maf_grid(n),
        (None, None) => maf_grid(100),
    };
    let mut w = compute_weights(&mafs, &spec).map_err(|e| AppError::Usage(e.to_string()))?;
    if args.normalize {
        w = normalize_max(&w);
    }
    let mut table = ResultTable::new(&["maf", "weight"]);
    table.provenance("command", "weights");
    table.provenance("scheme", args.scheme);
    table.provenance("beta_shapes", format!("{},{}", spec.beta_shape1, spec.beta_shape2));
    table.provenance("normalize", args.normalize);
    for (m, w) in mafs.iter().zip(w) {
        table.push(vec![(*m).into(), w.into()]);
    }
    table.write(args.output.out.as_deref(), args.output.format)
}

fn run_mixture(args: &MixtureArgs) -> AppResult<()> {
    let mut table = ResultTable::new(&["q", "p_value", "tail", "davies_fault", "mc_p_value", "mc_se"]);
    table.provenance("command", "mixture");
    table.provenance("lambdas", args.lambdas.iter().map(|l| format_sig(*l)).collect::<Vec<_>>().join(","));
    table.provenance("accuracy", format_sig(args.accuracy));
    table.provenance("draws", args.draws);
    table.provenance("seed", args.seed);
    let mc = (args.draws > 0).then(|| mc_oracle_many(&args.lambdas, &args.q, args.draws, args.seed));
    for (i, &q) in args.q.iter().enumerate() {
        let query = MixtureQuery::new(&args.lambdas, q)
            .and_then(|m| m.with_accuracy(args.accuracy))
            .map_err(|e| AppError::Usage(e.to_string()))?;
        let tail = mixture_sf(&query);
        let (mc_p, mc_se) = match &mc {
            Some(v) => (Cell::Real(v[i]), Cell::Real((v[i] * (1.0 - v[i]) / args.draws as f64).sqrt())),
            None => (Cell::Missing, Cell::Missing),
        };
        table.push(vec![
            q.into(),
            tail.p_value.into(),
            match tail.method {
                TailMethod::Davies => "davies",
                TailMethod::MomentMatch => "moment",
            }
            .into(),
            tail.fault.map(|f| f as usize).into(),
            mc_p,
            mc_se,
        ]);
    }
    table.write(args.output.out.as_deref(), args.output.format)
}
