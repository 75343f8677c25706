//! Synthetic regression models with known regression function.

use std::f64::consts::PI;
use std::fmt;

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::rng::RngStream;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelName {
    PureType,
    Hierarchical,
    Additive,
    Pure2,
    Pure3,
}

impl ModelName {
    pub const ALL: [ModelName; 5] = [
        ModelName::PureType,
        ModelName::Hierarchical,
        ModelName::Additive,
        ModelName::Pure2,
        ModelName::Pure3,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ModelName::PureType => "pure_type",
            ModelName::Hierarchical => "hierarchical",
            ModelName::Additive => "additive",
            ModelName::Pure2 => "pure_2",
            ModelName::Pure3 => "pure_3",
        }
    }

    /// Accepts `pure_3`, `pure-3`, `pure3` and so on.
    pub fn parse(s: &str) -> Option<Self> {
        let key: String = s.trim().to_ascii_lowercase().chars().filter(|c| c.is_ascii_alphanumeric()).collect();
        Some(match key.as_str() {
            "puretype" => ModelName::PureType,
            "hierarchical" => ModelName::Hierarchical,
            "additive" => ModelName::Additive,
            "pure2" => ModelName::Pure2,
            "pure3" => ModelName::Pure3,
            _ => return None,
        })
    }

    pub fn default_d(self) -> usize {
        match self {
            ModelName::Pure3 => 6,
            _ => 4,
        }
    }
}

impl fmt::Display for ModelName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FeatureDist {
    /// Independent uniforms on `[0, 1]`.
    Uniform01,
    /// `2.5/pi * atan(Z)` with `Z` equicorrelated standard normal; marginals
    /// lie in `(-1.25, 1.25)`.
    ArctanGauss { corr: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimulationModel {
    pub name: ModelName,
    pub d: usize,
    pub dist: FeatureDist,
    pub noise_sd: f64,
}

/// Simulated sample plus the noiseless regression function at each row.
#[derive(Debug, Clone)]
pub struct SimData {
    pub data: Dataset,
    pub truth: Vec<f64>,
}

impl SimulationModel {
    pub fn new(name: ModelName, d: usize) -> Result<Self> {
        match name {
            ModelName::Pure3 if d != 6 => {
                return Err(Error::config("d", format!("pure_3 uses d = 6, got {d}")));
            }
            _ if d < 3 => return Err(Error::config("d", format!("{name} needs d >= 3, got {d}"))),
            _ => {}
        }
        let dist = match name {
            ModelName::Pure2 | ModelName::Pure3 => FeatureDist::Uniform01,
            _ => FeatureDist::ArctanGauss { corr: 0.3 },
        };
        Ok(Self {
            name,
            d,
            dist,
            noise_sd: 1.0,
        })
    }

    pub fn with_default_d(name: ModelName) -> Self {
        Self::new(name, name.default_d()).expect("default dimension is valid")
    }

    /// The regression function.
    pub fn m(&self, x: &[f64]) -> f64 {
        let s = |v: f64| (v * PI).sin();
        match self.name {
            ModelName::PureType => -2.0 * s(x[0] * x[1]) + 2.0 * s(x[1] * x[2]),
            ModelName::Hierarchical => {
                -2.0 * s(x[0]) + 2.0 * s(x[1]) - 2.0 * s(x[2]) - 2.0 * s(x[0] * x[1]) + 2.0 * s(x[1] * x[2])
            }
            ModelName::Additive => -2.0 * s(x[0]) + 2.0 * s(x[1]) - 2.0 * s(x[2]),
            ModelName::Pure2 => 5.0 * (x[0] - 0.5) * (x[1] - 0.5) + 5.0 * x[2],
            ModelName::Pure3 => 10.0 * (x[0] - 0.5) * (x[1] - 0.5) + x[2] + x[3] + x[4] + x[5],
        }
    }

    /// Feature rows, drawn row by row.
    pub fn sample_features(&self, n: usize, rng: &mut RngStream) -> Vec<Vec<f64>> {
        let d = self.d;
        (0..n)
            .map(|_| match self.dist {
                FeatureDist::Uniform01 => (0..d).map(|_| rng.gen::<f64>()).collect(),
                FeatureDist::ArctanGauss { corr } => {
                    // shared factor gives pairwise correlation `corr`
                    let z0: f64 = rng.sample(StandardNormal);
                    (0..d)
                        .map(|_| {
                            let zk: f64 = rng.sample(StandardNormal);
                            let z = corr.sqrt() * z0 + (1.0 - corr).sqrt() * zk;
                            2.5 / PI * z.atan()
                        })
                        .collect()
                }
            })
            .collect()
    }

    /// `n` rows with response `m(x) + noise_sd * N(0, 1)`.
    pub fn generate(&self, n: usize, rng: &mut RngStream) -> SimData {
        let rows = self.sample_features(n, rng);
        let truth: Vec<f64> = rows.iter().map(|x| self.m(x)).collect();
        let y = truth
            .iter()
            .map(|m| m + self.noise_sd * rng.sample::<f64, _>(StandardNormal))
            .collect();
        let data = Dataset::from_rows(&rows, y).expect("simulated data is finite and rectangular");
        SimData { data, truth }
    }
}
