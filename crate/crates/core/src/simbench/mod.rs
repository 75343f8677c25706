//! Simulation study machinery: data generation, error estimation, Monte Carlo
//! runs, hyper-parameter tuning and noise-covariate augmentation.

pub mod bench;
pub mod experiment;
pub mod hd;
pub mod metrics;
pub mod models;
pub mod opt_configs;
pub mod tuning;

pub use experiment::{mean_sd, run_monte_carlo, ExperimentReport, Method, MethodSummary, MonteCarlo};
pub use hd::hd_augment;
pub use metrics::{mean_squared_error, mse_on_test, TestError};
pub use models::{FeatureDist, ModelName, SimData, SimulationModel};
pub use opt_configs::{opt_config, Contender};
pub use tuning::{cv_tune, nested_cv, opt_tune, ForestPins, NestedCvPlan, NestedCvResult, TuneResult, TuningSpace};
