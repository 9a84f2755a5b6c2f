//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each and
//! exits non-zero if any failed. Pass criterion numbers as arguments to run a
//! subset: `cargo test -p ggrf --test acceptance -- 3 9`.
//!
//! Seeds are fixed per criterion and were chosen before any run; the effect
//! scales come from the bundled config, which was calibrated with a separate
//! pilot seed.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use statrs::distribution::{Binomial, DiscreteCDF};

use ggrf::config::EffectScales;
use ggrf::harness::{estimate_power_many, MethodConfig, SimulationOptions};
use ggrf_core::comparators::KernelKind;
use ggrf_core::mixture::{mc_oracle_many, mixture_sf, MixtureQuery, DEFAULT_ACCURACY};
use ggrf_core::null_model::projection_matrix;
use ggrf_core::simulate::{
    gen_genotypes, gen_phenotype_replicate, DiseaseModel, Direction, GenotypePopSpec, PowerEstimate, ScenarioSpec,
};
use ggrf_core::similarity::{double_center, nds_similarity};
use ggrf_core::*;

const BAND: (f64, f64) = (0.037, 0.064);
const ALPHA: f64 = 0.05;

struct Verdict {
    pass: bool,
    detail: String,
}

impl Verdict {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Self { pass, detail: detail.into() }
    }
}

fn in_band(rate: f64) -> bool {
    (BAND.0..=BAND.1).contains(&rate)
}

fn opts() -> SimulationOptions {
    SimulationOptions::default()
}

fn pooled_se(a: &PowerEstimate, b: &PowerEstimate) -> f64 {
    let n = a.n_replicates as f64;
    let p = (a.rejection_rate + b.rejection_rate) / 2.0;
    (p * (1.0 - p) * 2.0 / n).sqrt()
}

// 1. Type I error, quantitative, every weight scheme with D1S and D2S.
fn type_one_quantitative() -> Verdict {
    // the band is the central 95% of Binomial(1000, 0.05)
    let binom = Binomial::new(ALPHA, 1000).unwrap();
    let lo = binom.inverse_cdf(0.025) as f64 / 1000.0;
    let hi = binom.inverse_cdf(0.975) as f64 / 1000.0;
    if (lo - BAND.0).abs() > 1e-12 || (hi - BAND.1).abs() > 1e-12 {
        return Verdict::new(false, format!("binomial band is [{lo}, {hi}], expected {BAND:?}"));
    }
    let pop = GenotypePopSpec::new(500, 100, 101);
    let sc = ScenarioSpec::null(100, PhenotypeKind::Quantitative, 102);
    let mut methods = Vec::new();
    for w in WeightScheme::ALL {
        for order in [NormOrder::D1, NormOrder::D2] {
            methods.push(MethodConfig::ggrf(WeightSpec::new(w), SimilaritySpec::new(order)));
        }
    }
    let run = estimate_power_many(&methods, &pop, &sc, 1000, ALPHA, &opts()).unwrap();
    let mut pass = true;
    let mut parts = Vec::new();
    for (m, e) in methods.iter().zip(&run.estimates) {
        pass &= in_band(e.rejection_rate);
        parts.push(format!("{}/{}={:.3}", m.weights().scheme, m.structure_label(), e.rejection_rate));
    }
    Verdict::new(pass, parts.join(" "))
}

// 2. Type I error, binary, N = 697; the unadjusted kernel test is conservative.
fn type_one_binary() -> Verdict {
    let pop = GenotypePopSpec::new(697, 100, 201);
    let sc = ScenarioSpec::null(100, PhenotypeKind::Binary, 202);
    let mut methods: Vec<MethodConfig> =
        WeightScheme::ALL.iter().map(|&w| MethodConfig::ggrf(WeightSpec::new(w), SimilaritySpec::default())).collect();
    methods.push(MethodConfig::Skat { weights: WeightSpec::new(WeightScheme::Wss), kernel: KernelKind::Linear });
    let run = estimate_power_many(&methods, &pop, &sc, 1000, ALPHA, &opts()).unwrap();
    let (ggrf, skat) = run.estimates.split_at(4);
    let mut pass = skat[0].rejection_rate <= BAND.0;
    let mut parts = Vec::new();
    for (m, e) in methods.iter().zip(ggrf) {
        pass &= in_band(e.rejection_rate);
        parts.push(format!("ggrf {}={:.3}", m.weights().scheme, e.rejection_rate));
    }
    parts.push(format!("skat wss={:.3}", skat[0].rejection_rate));
    Verdict::new(pass, parts.join(" "))
}

fn random_covariates(n: usize, m: usize, rng: &mut ChaCha8Rng) -> CovariateMatrix {
    let values = Matrix::from_fn(n, m, |_, _| rng.random_range(-1.0..1.0));
    CovariateMatrix::new(values, (0..m).map(|j| format!("c{j}")).collect()).unwrap()
}

// 3. gamma_hat and p are unchanged by Y -> aY + b.
fn affine_invariance() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(301);
    let specs = [SimilaritySpec::new(NormOrder::D1), SimilaritySpec::new(NormOrder::D2), SimilaritySpec::centered(NormOrder::D1)];
    let mut worst: (f64, f64) = (0.0, 0.0);
    for d in 0..100u64 {
        let n = rng.random_range(40..120);
        let k = rng.random_range(5..30);
        let g = gen_genotypes(&GenotypePopSpec::new(n, k, 3000 + d)).unwrap();
        let x = if d % 2 == 0 { CovariateMatrix::intercept_only(n) } else { random_covariates(n, 2, &mut rng) };
        let sc = if d % 3 == 0 {
            ScenarioSpec::null(k, PhenotypeKind::Quantitative, 3100 + d)
        } else {
            ScenarioSpec::new(DiseaseModel::S1, k.min(5), k, 0.4, PhenotypeKind::Quantitative, 3100 + d)
        };
        let y = gen_phenotype_replicate(&g, &sc, 0, 0).unwrap();
        let wspec = WeightSpec::new(WeightScheme::ALL[d as usize % 4]);
        let model = GgrfModel::prepare(&x, &g, PhenotypeKind::Quantitative, wspec, specs[d as usize % 3]).unwrap();
        let base = model.test(&y).unwrap();
        for a in [0.1, 10.0] {
            for b in [-5.0, 7.0] {
                let moved = PhenotypeVector::quantitative(y.values().iter().map(|v| a * v + b).collect()).unwrap();
                let r = model.test(&moved).unwrap();
                worst.0 = worst.0.max((r.gamma_hat - base.gamma_hat).abs());
                worst.1 = worst.1.max((r.p_value - base.p_value).abs());
            }
        }
    }
    Verdict::new(worst.0 <= 1e-12 && worst.1 <= 1e-12, format!("max |dgamma| = {:.2e}, max |dp| = {:.2e}", worst.0, worst.1))
}

// 4. Mixture tail probabilities against Monte Carlo, plus two closed cases.
fn mixture_correctness() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(401);
    let draws = 1_000_000;
    let mut worst_excess = f64::NEG_INFINITY;
    let mut worst_diff = 0.0f64;
    for case in 0..20u64 {
        let len = rng.random_range(1..=50);
        let lambdas: Vec<f64> = (0..len)
            .map(|_| {
                let magnitude = rng.random_range(-3.0f64..1.0).exp();
                if rng.random_bool(0.35) {
                    -magnitude
                } else {
                    magnitude
                }
            })
            .collect();
        let mean: f64 = lambdas.iter().sum();
        let sd = (2.0 * lambdas.iter().map(|l| l * l).sum::<f64>()).sqrt();
        let qs = [0.0, mean - sd, mean, mean + sd, mean + 2.0 * sd];
        let mc = mc_oracle_many(&lambdas, &qs, draws, 4100 + case);
        for (q, m) in qs.iter().zip(mc) {
            let p = mixture_sf(&MixtureQuery::new(&lambdas, *q).unwrap()).p_value;
            let tol = 0.005f64.max(4.0 * (m * (1.0 - m) / draws as f64).sqrt());
            worst_diff = worst_diff.max((p - m).abs());
            worst_excess = worst_excess.max((p - m).abs() - tol);
        }
    }
    let half = mixture_sf(&MixtureQuery::new(&[1.0, -1.0], 0.0).unwrap()).p_value;
    let five = mixture_sf(&MixtureQuery::new(&[1.0], 3.841).unwrap()).p_value;
    let pass = worst_excess <= 0.0 && (half - 0.5).abs() <= DEFAULT_ACCURACY && (five - 0.05).abs() <= 2e-4;
    Verdict::new(pass, format!("max |p - mc| = {worst_diff:.4}; (1,-1)@0 -> {half:.7}; (1)@3.841 -> {five:.6}"))
}

// 5. Analytic p against 10^4 phenotype permutations.
fn permutation_agreement() -> Verdict {
    let (n, k, perms) = (60, 20, 10_000);
    let specs = [SimilaritySpec::new(NormOrder::D1), SimilaritySpec::new(NormOrder::D2), SimilaritySpec::centered(NormOrder::D1)];
    let mut checked = 0;
    let mut worst = 0.0f64;
    for d in 0..50u64 {
        let g = gen_genotypes(&GenotypePopSpec::new(n, k, 5000 + d)).unwrap();
        let sc = if d % 2 == 0 {
            ScenarioSpec::null(k, PhenotypeKind::Quantitative, 5100 + d)
        } else {
            ScenarioSpec::new(DiseaseModel::S1, 8, k, 0.35, PhenotypeKind::Quantitative, 5100 + d)
        };
        let y = gen_phenotype_replicate(&g, &sc, 0, 0).unwrap();
        let x = CovariateMatrix::intercept_only(n);
        let model = GgrfModel::prepare(&x, &g, PhenotypeKind::Quantitative, WeightSpec::default(), specs[d as usize % 3]).unwrap();
        let res = model.test(&y).unwrap();
        if !(0.01..=0.5).contains(&res.p_value) {
            continue;
        }
        // with an intercept-only model, permuting Y permutes the residuals
        let mut r = res.null_fit.residuals(&y);
        let mut rng = ChaCha8Rng::seed_from_u64(5200 + d);
        let mut exceed = 0usize;
        for _ in 0..perms {
            r.shuffle(&mut rng);
            if estimate_gamma(&r, model.similarity()).unwrap() >= res.gamma_hat {
                exceed += 1;
            }
        }
        let p_perm = (exceed + 1) as f64 / (perms + 1) as f64;
        worst = worst.max((p_perm - res.p_value).abs());
        checked += 1;
    }
    Verdict::new(checked >= 10 && worst <= 0.02, format!("{checked} datasets with p in [0.01, 0.5], max |p - p_perm| = {worst:.4}"))
}

const MATCHED: [(DiseaseModel, WeightScheme); 4] = [
    (DiseaseModel::S1, WeightScheme::Uniform),
    (DiseaseModel::S2, WeightScheme::Beta),
    (DiseaseModel::S3, WeightScheme::Wss),
    (DiseaseModel::S4, WeightScheme::Log),
];

// 6. The weight matching the effect model is never clearly beaten.
fn matched_weight_dominance() -> Verdict {
    let scales = EffectScales::bundled().weights;
    let pop = GenotypePopSpec::new(500, 100, 600);
    let methods: Vec<MethodConfig> =
        WeightScheme::ALL.iter().map(|&w| MethodConfig::ggrf(WeightSpec::new(w), SimilaritySpec::default())).collect();
    let mut pass = true;
    let mut parts = Vec::new();
    for (i, (model, matched)) in MATCHED.into_iter().enumerate() {
        let sc = ScenarioSpec::new(model, 50, 100, scales.get(model).unwrap(), PhenotypeKind::Quantitative, 610 + i as u64);
        let run = estimate_power_many(&methods, &pop, &sc, 1000, ALPHA, &opts()).unwrap();
        let mi = WeightScheme::ALL.iter().position(|w| *w == matched).unwrap();
        let best = &run.estimates[mi];
        for (j, e) in run.estimates.iter().enumerate() {
            if j != mi && best.rejection_rate < e.rejection_rate - 2.0 * pooled_se(best, e) {
                pass = false;
            }
        }
        let rates: Vec<String> =
            WeightScheme::ALL.iter().zip(&run.estimates).map(|(w, e)| format!("{w}={:.3}", e.rejection_rate)).collect();
        parts.push(format!("{}[{}]", model.as_str(), rates.join(",")));
    }
    Verdict::new(pass, parts.join(" "))
}

// 7. Adding neutral variants does not raise power.
fn noise_dilution() -> Verdict {
    let scale = EffectScales::bundled().dilution.s4.unwrap();
    let method = MethodConfig::ggrf(WeightSpec::new(WeightScheme::Beta), SimilaritySpec::default());
    let totals = [50, 100, 200, 400, 508];
    let estimates: Vec<PowerEstimate> = totals
        .iter()
        .map(|&t| {
            let sc = ScenarioSpec::new(DiseaseModel::S4, 50, t, scale, PhenotypeKind::Quantitative, 701);
            estimate_power_many(&[method], &GenotypePopSpec::new(500, t, 700), &sc, 500, ALPHA, &opts()).unwrap().estimates[0]
        })
        .collect();
    let mut pass = true;
    for i in 0..estimates.len() {
        for j in i + 1..estimates.len() {
            let (a, b) = (&estimates[i], &estimates[j]);
            let slack = 2.0 * (a.standard_error().powi(2) + b.standard_error().powi(2)).sqrt();
            pass &= b.rejection_rate <= a.rejection_rate + slack;
        }
    }
    let parts: Vec<String> = totals.iter().zip(&estimates).map(|(t, e)| format!("{t}={:.3}", e.rejection_rate)).collect();
    Verdict::new(pass, parts.join(" "))
}

// 8. Flipping half the effect signs ruins burden but not centered GGRF.
fn bidirection_robustness() -> Verdict {
    let scale = EffectScales::bundled().bidirection.s4.unwrap();
    let beta = WeightSpec::new(WeightScheme::Beta);
    let centered = MethodConfig::ggrf(beta, SimilaritySpec::centered(NormOrder::D1));
    let methods = [centered, MethodConfig::Burden { weights: beta }];
    let pop = GenotypePopSpec::new(500, 100, 800);
    let rates: Vec<Vec<f64>> = [Direction::OneDirection, Direction::Bidirection]
        .iter()
        .map(|&dir| {
            let sc = ScenarioSpec::new(DiseaseModel::S4, 30, 100, scale, PhenotypeKind::Quantitative, 801).with_direction(dir);
            let run = estimate_power_many(&methods, &pop, &sc, 500, ALPHA, &opts()).unwrap();
            run.estimates.iter().map(|e| e.rejection_rate).collect()
        })
        .collect();
    let ggrf_loss = (rates[0][0] - rates[1][0]) / rates[0][0];
    let burden_drop = (rates[0][1] - rates[1][1]) / rates[0][1];
    let null = ScenarioSpec::null(100, PhenotypeKind::Quantitative, 802);
    let type_one = estimate_power_many(&[centered], &pop, &null, 1000, ALPHA, &opts()).unwrap().estimates[0].rejection_rate;
    let pass = burden_drop >= 0.30 && ggrf_loss <= 0.15 && in_band(type_one);
    Verdict::new(
        pass,
        format!(
            "burden {:.3} -> {:.3} (drop {:.0}%), centered ggrf {:.3} -> {:.3} (loss {:.0}%), centered type I {:.3}",
            rates[0][1],
            rates[1][1],
            100.0 * burden_drop,
            rates[0][0],
            rates[1][0],
            100.0 * ggrf_loss,
            type_one
        ),
    )
}

// 9. Exact structural identities.
fn structural_identities() -> Verdict {
    let mut failures = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(901);

    // D1S off-diagonals are weighted IBS counts
    let g = gen_genotypes(&GenotypePopSpec::new(30, 12, 902)).unwrap();
    let p = prepare_genotypes(&g, &WeightSpec::default()).unwrap();
    let s = nds_similarity(&p.genotypes, &p.weights, NormOrder::D1).unwrap();
    let d = p.genotypes.dosages();
    let mut ibs_err = 0.0f64;
    for i in 0..30 {
        for j in 0..30 {
            if i != j {
                let ibs: f64 = (0..d.ncols()).map(|k| p.weights[k] * (2.0 - (d[(i, k)] - d[(j, k)]).abs())).sum();
                ibs_err = ibs_err.max((s.values()[(i, j)] - ibs).abs() / ibs.abs().max(1.0));
            }
        }
    }
    if ibs_err > 1e-12 {
        failures.push(format!("IBS rel err {ibs_err:.1e}"));
    }

    // P annihilates the design, and the spectrum sums to trace(PA)
    let mut px = 0.0f64;
    let mut trace_err = 0.0f64;
    for case in 0..10u64 {
        let n = 40;
        let g = gen_genotypes(&GenotypePopSpec::new(n, 15, 910 + case)).unwrap();
        let x = random_covariates(n, 2, &mut rng);
        let kind = if case % 2 == 0 { PhenotypeKind::Binary } else { PhenotypeKind::Quantitative };
        let y = gen_phenotype_replicate(&g, &ScenarioSpec::null(15, kind, 920 + case), 0, 0).unwrap();
        let fit = fit_null(&y, &x).unwrap();
        let proj = projection_matrix(&fit, &x).unwrap();
        px = px.max((proj.values() * x.design()).amax());
        let prepared = prepare_genotypes(&g, &WeightSpec::default()).unwrap();
        let s = similarity::build_similarity(&prepared.genotypes, &prepared.weights, SimilaritySpec::default()).unwrap();
        let a = test_matrix(&s, estimate_gamma(&fit.residuals(&y), &s).unwrap());
        let spectrum = eigen_spectrum(&proj, &a).unwrap();
        let sum: f64 = spectrum.iter().sum();
        let scale: f64 = spectrum.iter().map(|l| l.abs()).sum();
        trace_err = trace_err.max((sum - (proj.values() * &a).trace()).abs() / scale);
    }
    if px > 1e-10 {
        failures.push(format!("|PX| {px:.1e}"));
    }
    if trace_err > 1e-8 {
        failures.push(format!("trace rel err {trace_err:.1e}"));
    }

    // centered rows sum to zero before the diagonal is cleared
    let mut row_sum = 0.0f64;
    for scheme in [WeightScheme::Uniform, WeightScheme::Log] {
        let g = gen_genotypes(&GenotypePopSpec::new(50, 20, 930)).unwrap();
        let p = prepare_genotypes(&g, &WeightSpec::new(scheme)).unwrap();
        let s = nds_similarity(&p.genotypes, &p.weights, NormOrder::D1).unwrap();
        let c = double_center(s.values());
        row_sum = row_sum.max((0..50).map(|i| c.row(i).sum().abs()).fold(0.0, f64::max));
    }
    if row_sum > 1e-10 {
        failures.push(format!("centered row sum {row_sum:.1e}"));
    }

    // hand cases for gamma_hat
    let swap = SimilarityMatrix::from_matrix(Matrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]), SimilaritySpec::default(), 2.0).unwrap();
    let g_plus = estimate_gamma(&[1.0, 1.0], &swap).unwrap();
    let g_minus = estimate_gamma(&[1.0, -1.0], &swap).unwrap();
    if g_plus != 1.0 || g_minus != -1.0 {
        failures.push(format!("gamma hand cases {g_plus}, {g_minus}"));
    }

    let detail = format!(
        "IBS {ibs_err:.1e}, |PX| {px:.1e}, trace {trace_err:.1e}, row sums {row_sum:.1e}, gamma ({g_plus}, {g_minus})"
    );
    Verdict::new(failures.is_empty(), if failures.is_empty() { detail } else { failures.join("; ") })
}

fn ggrf_bin() -> &'static str {
    env!("CARGO_BIN_EXE_ggrf")
}

fn write_fixture(dir: &Path) -> (PathBuf, PathBuf, PathBuf, PathBuf) {
    use std::fmt::Write as _;
    let n = 80;
    let g = gen_genotypes(&GenotypePopSpec::new(n, 30, 1001)).unwrap();
    let subjects: Vec<String> = (0..n).map(|i| format!("s{i:03}")).collect();
    let variants: Vec<String> = (0..30).map(|j| format!("v{j:02}")).collect();
    let g = GenotypeMatrix::new(g.dosages().clone(), variants.clone(), subjects.clone()).unwrap();
    let geno = dir.join("geno.tsv");
    ggrf::io::write_genotypes_tsv(&geno, &g).unwrap();

    let quant = gen_phenotype_replicate(&g, &ScenarioSpec::new(DiseaseModel::S1, 5, 30, 0.3, PhenotypeKind::Quantitative, 1002), 0, 0).unwrap();
    let case = gen_phenotype_replicate(&g, &ScenarioSpec::null(30, PhenotypeKind::Binary, 1003), 0, 0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(1004);
    let mut pheno = String::from("id\ttrait\tcase\n");
    let mut covar = String::from("id\tage\tsex\n");
    for (i, id) in subjects.iter().enumerate() {
        writeln!(pheno, "{id}\t{}\t{}", quant.values()[i], case.values()[i]).unwrap();
        writeln!(covar, "{id}\t{:.3}\t{}", rng.random_range(20.0..70.0), rng.random_range(0..2)).unwrap();
    }
    let mut regions = String::new();
    for (j, v) in variants.iter().enumerate() {
        writeln!(regions, "{v}\tgene{}", j % 3).unwrap();
    }
    let paths = (geno, dir.join("pheno.tsv"), dir.join("covar.tsv"), dir.join("regions.tsv"));
    std::fs::write(&paths.1, pheno).unwrap();
    std::fs::write(&paths.2, covar).unwrap();
    std::fs::write(&paths.3, regions).unwrap();
    paths
}

fn run_cli(args: &[String], out: &Path) -> Result<Vec<u8>, String> {
    let mut full = args.to_vec();
    full.extend(["--out".into(), out.display().to_string()]);
    let status = Command::new(ggrf_bin()).args(&full).output().map_err(|e| e.to_string())?;
    if !status.status.success() {
        return Err(format!("{:?} failed: {}", args, String::from_utf8_lossy(&status.stderr)));
    }
    std::fs::read(out).map_err(|e| e.to_string())
}

// 10. Every subcommand is byte-for-byte reproducible, whatever the thread count.
fn cli_determinism() -> Verdict {
    let dir = tempfile::tempdir().unwrap();
    let (geno, pheno, covar, regions) = write_fixture(dir.path());
    let s = |p: &Path| p.display().to_string();
    let base_test: Vec<String> = ["test", "--geno", &s(&geno), "--pheno", &s(&pheno), "--covar", &s(&covar), "--regions", &s(&regions)]
        .iter()
        .map(|v| v.to_string())
        .collect();
    let with = |base: &[String], extra: &[&str]| -> Vec<String> {
        base.iter().cloned().chain(extra.iter().map(|v| v.to_string())).collect()
    };
    let configs: Vec<(String, Vec<String>, bool)> = vec![
        ("test ggrf".into(), with(&base_test, &["--pheno-col", "trait", "--similarity", "cd1s", "--diagnostics"]), true),
        ("test ggrf binary json".into(), with(&base_test, &["--pheno-col", "case", "--pheno-type", "binary", "--format", "json"]), true),
        ("test skat".into(), with(&base_test, &["--pheno-col", "trait", "--method", "skat", "--weights", "wss"]), true),
        ("test burden".into(), with(&base_test, &["--pheno-col", "case", "--pheno-type", "binary", "--method", "burden"]), true),
        (
            "simulate".into(),
            with(
                &["simulate".to_string()],
                &["--scenario", "s4", "--method", "ggrf,skat,burden", "--weights", "beta,log", "--similarity", "d1s,cd1s",
                  "--reps", "100", "--n-subjects", "120", "--n-variants", "25", "--n-causal", "8", "--seed", "17"],
            ),
            true,
        ),
        (
            "simulate binary regenerate".into(),
            with(
                &["simulate".to_string()],
                &["--scenario", "null", "--pheno-type", "binary", "--reps", "100", "--n-subjects", "90", "--n-variants", "15",
                  "--regenerate-genotypes", "--format", "json"],
            ),
            true,
        ),
        ("weights".into(), with(&["weights".to_string()], &["--scheme", "wss", "--grid", "25", "--normalize"]), false),
        ("mixture".into(), with(&["mixture".to_string()], &["--lambdas", "1,-0.5,0.3", "--q", "0,1.5", "--draws", "20000"]), false),
    ];
    let mut failures = Vec::new();
    for (i, (name, args, threaded)) in configs.iter().enumerate() {
        let mut outputs = Vec::new();
        let variants: Vec<Vec<String>> = if *threaded {
            vec![with(args, &["--threads", "1"]), with(args, &["--threads", "1"]), with(args, &["--threads", "2"])]
        } else {
            vec![args.clone(), args.clone()]
        };
        for (j, a) in variants.iter().enumerate() {
            match run_cli(a, &dir.path().join(format!("out_{i}_{j}"))) {
                Ok(bytes) => outputs.push(bytes),
                Err(e) => failures.push(e),
            }
        }
        if outputs.len() == variants.len() && (outputs.iter().any(|o| o != &outputs[0]) || outputs[0].is_empty()) {
            failures.push(format!("{name}: outputs differ"));
        }
    }
    let detail = if failures.is_empty() { format!("{} configurations identical across reruns and thread counts", configs.len()) } else { failures.join("; ") };
    Verdict::new(failures.is_empty(), detail)
}

type Criterion = (u32, &'static str, fn() -> Verdict);

const CRITERIA: [Criterion; 10] = [
    (1, "type I error, quantitative", type_one_quantitative),
    (2, "type I error, binary", type_one_binary),
    (3, "affine invariance", affine_invariance),
    (4, "mixture tail accuracy", mixture_correctness),
    (5, "permutation agreement", permutation_agreement),
    (6, "matched-weight dominance", matched_weight_dominance),
    (7, "noise dilution", noise_dilution),
    (8, "bidirection robustness", bidirection_robustness),
    (9, "structural identities", structural_identities),
    (10, "CLI determinism", cli_determinism),
];

fn main() {
    let selected: Vec<u32> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    // `cargo test --list` style probes get an empty listing
    if std::env::args().any(|a| a == "--list") {
        return;
    }
    let mut failed = Vec::new();
    for (id, name, check) in CRITERIA {
        if !selected.is_empty() && !selected.contains(&id) {
            continue;
        }
        let started = Instant::now();
        let verdict = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Verdict::new(false, format!("panicked: {msg}"))
        });
        println!(
            "criterion {id:>2} {:<28} {}  {} [{:.1}s]",
            name,
            if verdict.pass { "PASS" } else { "FAIL" },
            verdict.detail,
            started.elapsed().as_secs_f64()
        );
        if !verdict.pass {
            failed.push(id);
        }
    }
    if !failed.is_empty() {
        println!("acceptance: failed criteria {failed:?}");
        std::process::exit(1);
    }
    println!("acceptance: all selected criteria passed");
}
