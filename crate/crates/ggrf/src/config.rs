//! Default effect scales for the simulated scenarios.

use serde::Deserialize;

use ggrf_core::simulate::DiseaseModel;

const EFFECT_SCALES: &str = include_str!("../config/effect_scales.toml");

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
pub struct ScenarioScales {
    #[serde(default)]
    pub s1: Option<f64>,
    #[serde(default)]
    pub s2: Option<f64>,
    #[serde(default)]
    pub s3: Option<f64>,
    #[serde(default)]
    pub s4: Option<f64>,
}

impl ScenarioScales {
    pub fn get(&self, model: DiseaseModel) -> Option<f64> {
        match model {
            DiseaseModel::Null => Some(0.0),
            DiseaseModel::S1 => self.s1,
            DiseaseModel::S2 => self.s2,
            DiseaseModel::S3 => self.s3,
            DiseaseModel::S4 => self.s4,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
pub struct EffectScales {
    /// Weight comparison: 50 causal among 100 variants.
    pub weights: ScenarioScales,
    /// Noise dilution: 50 causal, growing totals.
    pub dilution: ScenarioScales,
    /// Bidirectional effects: 30 causal among 100 variants.
    pub bidirection: ScenarioScales,
}

impl EffectScales {
    pub fn bundled() -> Self {
        toml::from_str(EFFECT_SCALES).expect("bundled effect_scales.toml is valid")
    }
}
