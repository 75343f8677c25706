//! Monte Carlo comparison of estimators on simulated data.

use std::fmt::Write as _;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::metrics::{mse_on_test, TestError};
use super::models::SimulationModel;
use crate::baselines::BaselineKind;
use crate::config::GrowerConfig;
use crate::ensemble::fit_forest;
use crate::error::{Error, Result};
use crate::rng::RngStream;

/// Something that can be fit to training data and scored on test data.
#[derive(Debug, Clone, PartialEq)]
pub enum Method {
    Forest { label: String, config: GrowerConfig },
    Baseline(BaselineKind),
}

impl Method {
    pub fn forest(config: GrowerConfig) -> Self {
        Method::Forest {
            label: config.algorithm().name().to_string(),
            config,
        }
    }

    pub fn labelled(label: impl Into<String>, config: GrowerConfig) -> Self {
        Method::Forest {
            label: label.into(),
            config,
        }
    }

    pub fn label(&self) -> &str {
        match self {
            Method::Forest { label, .. } => label,
            Method::Baseline(b) => b.name(),
        }
    }

    pub fn params(&self) -> String {
        match self {
            Method::Forest { config, .. } => config.describe(),
            Method::Baseline(_) => String::new(),
        }
    }

    /// Fit on `train` and report the test error.
    pub fn evaluate(&self, train: &super::SimData, test: &super::SimData, seed: u64) -> Result<TestError> {
        Ok(match self {
            Method::Forest { config, .. } => mse_on_test(&fit_forest(&train.data, config, seed)?, test),
            Method::Baseline(kind) => mse_on_test(kind.fit(&train.data).as_ref(), test),
        })
    }
}

/// Results of one method across replications.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodSummary {
    pub method: String,
    pub params: String,
    pub mean_mse: f64,
    pub sd_mse: f64,
    pub mean_mse_y: f64,
    pub per_rep_mse: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub model: String,
    pub d: usize,
    pub n_train: usize,
    pub n_test: usize,
    pub reps: usize,
    pub seed: u64,
    pub rows: Vec<MethodSummary>,
    /// Only metadata varies between identical runs; it never reaches the CSV.
    pub metadata: ReportMetadata,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ReportMetadata {
    pub wall_clock_secs: f64,
}

/// Mean and sample standard deviation (`n - 1` denominator; 0 for one value).
pub fn mean_sd(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let ss: f64 = values.iter().map(|v| (v - mean) * (v - mean)).sum();
    (mean, (ss / (n - 1.0)).sqrt())
}

#[derive(Debug, Clone)]
pub struct MonteCarlo {
    pub model: SimulationModel,
    pub n_train: usize,
    pub n_test: usize,
    pub reps: usize,
    pub seed: u64,
    /// Print one line per finished replication to stderr.
    pub log: bool,
}

impl MonteCarlo {
    pub fn new(model: SimulationModel, reps: usize, seed: u64) -> Self {
        Self {
            model,
            n_train: 500,
            n_test: 500,
            reps,
            seed,
            log: false,
        }
    }

    /// Replication `r` uses stream `(seed, r)` for its training and test data
    /// and for the forest seed shared by all methods in that replication.
    pub fn run(&self, methods: &[Method]) -> Result<ExperimentReport> {
        if self.reps == 0 {
            return Err(Error::config("reps", "must be at least 1"));
        }
        if self.n_train == 0 || self.n_test == 0 {
            return Err(Error::config("n", "training and test sizes must be positive"));
        }
        let start = Instant::now();
        let per_rep: Vec<Vec<TestError>> = (0..self.reps)
            .into_par_iter()
            .map(|r| {
                let mut rng = RngStream::new(self.seed, r as u64);
                let train = self.model.generate(self.n_train, &mut rng);
                let test = self.model.generate(self.n_test, &mut rng);
                let forest_seed = rng.child_seed();
                let errs = methods
                    .iter()
                    .map(|m| m.evaluate(&train, &test, forest_seed))
                    .collect::<Result<Vec<_>>>()?;
                if self.log {
                    let line: Vec<String> = methods
                        .iter()
                        .zip(&errs)
                        .map(|(m, e)| format!("{}={:.4}", m.label(), e.mse))
                        .collect();
                    eprintln!("rep {}/{}: {}", r + 1, self.reps, line.join(" "));
                }
                Ok(errs)
            })
            .collect::<Result<_>>()?;

        let rows = methods
            .iter()
            .enumerate()
            .map(|(k, m)| {
                let mse: Vec<f64> = per_rep.iter().map(|e| e[k].mse).collect();
                let mse_y: Vec<f64> = per_rep.iter().map(|e| e[k].mse_y).collect();
                let (mean_mse, sd_mse) = mean_sd(&mse);
                MethodSummary {
                    method: m.label().to_string(),
                    params: m.params(),
                    mean_mse,
                    sd_mse,
                    mean_mse_y: mean_sd(&mse_y).0,
                    per_rep_mse: mse,
                }
            })
            .collect();
        Ok(ExperimentReport {
            model: self.model.name.name().to_string(),
            d: self.model.d,
            n_train: self.n_train,
            n_test: self.n_test,
            reps: self.reps,
            seed: self.seed,
            rows,
            metadata: ReportMetadata {
                wall_clock_secs: start.elapsed().as_secs_f64(),
            },
        })
    }
}

pub fn run_monte_carlo(model: SimulationModel, methods: &[Method], reps: usize, seed: u64) -> Result<ExperimentReport> {
    MonteCarlo::new(model, reps, seed).run(methods)
}

pub const REPORT_CSV_HEADER: &str = "model,d,n_train,n_test,reps,seed,method,mean_mse,sd_mse,mean_mse_y,params";

impl ExperimentReport {
    pub fn row(&self, method: &str) -> Option<&MethodSummary> {
        self.rows.iter().find(|r| r.method == method)
    }

    /// CSV body rows (no header), deterministic for a given seed.
    pub fn csv_rows(&self) -> String {
        let mut out = String::new();
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{:.6},{:.6},{:.6},\"{}\"",
                self.model,
                self.d,
                self.n_train,
                self.n_test,
                self.reps,
                self.seed,
                r.method,
                r.mean_mse,
                r.sd_mse,
                r.mean_mse_y,
                r.params
            );
        }
        out
    }

    pub fn to_csv(&self) -> String {
        format!("{REPORT_CSV_HEADER}\n{}", self.csv_rows())
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{Algorithm, RfConfig};
    use crate::simbench::models::ModelName;

    #[test]
    fn sd_conventions() {
        assert_eq!(mean_sd(&[2.0]), (2.0, 0.0));
        let (m, s) = mean_sd(&[1.0, 2.0, 3.0]);
        assert_eq!(m, 2.0);
        assert!((s - 1.0).abs() < 1e-15);
    }

    #[test]
    fn monte_carlo_is_reproducible() {
        let model = SimulationModel::with_default_d(ModelName::Pure3);
        let methods = vec![
            Method::forest(GrowerConfig::Rf(RfConfig {
                num_trees: 5,
                ..RfConfig::new(3)
            })),
            Method::forest(Algorithm::Intf.default_config(6).with_num_trees(5)),
            Method::Baseline(BaselineKind::MeanY),
            Method::Baseline(BaselineKind::OneNn),
        ];
        let mc = MonteCarlo {
            n_train: 100,
            n_test: 100,
            ..MonteCarlo::new(model, 3, 7)
        };
        let a = mc.run(&methods).unwrap();
        let b = mc.run(&methods).unwrap();
        assert_eq!(a.to_csv(), b.to_csv());
        assert_eq!(a.rows.len(), 4);
        assert_eq!(a.to_csv().lines().count(), 5);
        let one = MonteCarlo { reps: 1, ..mc };
        assert!(one.run(&methods).unwrap().rows.iter().all(|r| r.sd_mse == 0.0));
    }

    #[test]
    fn perfect_predictor_scores_zero() {
        struct Truth(SimulationModel);
        impl crate::tree::Predictor for Truth {
            fn predict(&self, x: &[f64]) -> f64 {
                self.0.m(x)
            }
        }
        let model = SimulationModel::new(ModelName::Additive, 4).unwrap();
        let test = model.generate(200, &mut RngStream::new(0, 0));
        let err = mse_on_test(&Truth(model), &test);
        assert_eq!(err.mse, 0.0);
        assert!(err.mse_y > 0.5);
    }
}
