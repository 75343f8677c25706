//! Regression tree ensembles for interaction detection: Random Forests, Extra
//! Trees, Interaction Forests and Random Split Random Forests, together with
//! the simulation and tuning machinery used to compare them.

pub mod baselines;
pub mod config;
pub mod criteria;
pub mod dataio;
pub mod data;
pub mod ensemble;
pub mod error;
pub mod growers;
pub mod rng;
pub mod rule;
pub mod simbench;
pub mod tree;

pub use baselines::{BaselineKind, MeanY, OneNn};
pub use config::{Algorithm, EtConfig, GrowerConfig, IntfConfig, MtryMode, RfConfig, RsrfConfig};
pub use criteria::{best_cart_split, impurity_decrease, Partition, SplitCandidate};
pub use data::{Dataset, IndexSet};
pub use ensemble::{draw_resample, fit_forest, ResamplePlan};
pub use error::{Error, Result};
pub use rng::RngStream;
pub use rule::{IntfVariant, SplitRule};
pub use tree::{Forest, Predictor, Tree, TreeNode};
