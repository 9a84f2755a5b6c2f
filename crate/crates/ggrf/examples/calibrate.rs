//! Pilot runs used to pick the bundled effect scales.
//!
//! cargo run --release -p ggrf --example calibrate -- weights s1 0.05,0.1 [reps]
//! cargo run --release -p ggrf --example calibrate -- dilution s4 0.05 [reps]
//! cargo run --release -p ggrf --example calibrate -- bidirection s4 0.05 [reps]
//!
//! Uses seed 9001, distinct from every seed in the acceptance suite.

use ggrf::harness::{estimate_power_many, MethodConfig, SimulationOptions};
use ggrf_core::comparators::KernelKind;
use ggrf_core::simulate::{DiseaseModel, Direction, GenotypePopSpec, ScenarioSpec};
use ggrf_core::{NormOrder, PhenotypeKind, SimilaritySpec, WeightScheme, WeightSpec};

const SEED: u64 = 9001;
const N: usize = 500;

fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let study = args.first().map(String::as_str).unwrap_or("weights");
    let model: DiseaseModel = args.get(1).map_or("s1", String::as_str).parse().unwrap();
    let scales: Vec<f64> = args.get(2).map_or("0.05", String::as_str).split(',').map(|s| s.parse().unwrap()).collect();
    let reps: usize = args.get(3).map_or(200, |s| s.parse().unwrap());
    let opts = SimulationOptions::default();
    let d1s = SimilaritySpec::new(NormOrder::D1);
    let beta = WeightSpec::new(WeightScheme::Beta);

    for scale in scales {
        match study {
            "weights" => {
                let methods: Vec<MethodConfig> =
                    WeightScheme::ALL.iter().map(|&w| MethodConfig::ggrf(WeightSpec::new(w), d1s)).collect();
                let sc = ScenarioSpec::new(model, 50, 100, scale, PhenotypeKind::Quantitative, SEED);
                let run = estimate_power_many(&methods, &GenotypePopSpec::new(N, 100, SEED), &sc, reps, 0.05, &opts).unwrap();
                let line: Vec<String> = methods
                    .iter()
                    .zip(&run.estimates)
                    .map(|(m, e)| format!("{}={:.3}", m.weights().scheme, e.rejection_rate))
                    .collect();
                println!("{} scale={scale}: {}", model.as_str(), line.join(" "));
            }
            "dilution" => {
                let mut line = Vec::new();
                for total in [50, 100, 200, 400, 508] {
                    let sc = ScenarioSpec::new(model, 50, total, scale, PhenotypeKind::Quantitative, SEED);
                    let pop = GenotypePopSpec::new(N, total, SEED);
                    let run = estimate_power_many(&[MethodConfig::ggrf(beta, d1s)], &pop, &sc, reps, 0.05, &opts).unwrap();
                    line.push(format!("{total}={:.3}", run.estimates[0].rejection_rate));
                }
                println!("{} scale={scale}: {}", model.as_str(), line.join(" "));
            }
            "bidirection" => {
                let methods = [
                    MethodConfig::ggrf(beta, SimilaritySpec::centered(NormOrder::D1)),
                    MethodConfig::ggrf(beta, d1s),
                    MethodConfig::Burden { weights: beta },
                    MethodConfig::Skat { weights: beta, kernel: KernelKind::Linear },
                ];
                for dir in [Direction::OneDirection, Direction::Bidirection] {
                    let sc = ScenarioSpec::new(model, 30, 100, scale, PhenotypeKind::Quantitative, SEED).with_direction(dir);
                    let run = estimate_power_many(&methods, &GenotypePopSpec::new(N, 100, SEED), &sc, reps, 0.05, &opts).unwrap();
                    let line: Vec<String> = methods
                        .iter()
                        .zip(&run.estimates)
                        .map(|(m, e)| format!("{}:{}={:.3}", m.name(), m.structure_label(), e.rejection_rate))
                        .collect();
                    println!("{} {} scale={scale}: {}", model.as_str(), dir.as_str(), line.join(" "));
                }
            }
            other => panic!("unknown study {other}"),
        }
    }
}
