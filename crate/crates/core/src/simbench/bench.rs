//! Fixed benchmark suites reproducing the reference comparisons at desk scale.

use serde::{Deserialize, Serialize};

use super::experiment::Method;
use super::hd::banded_noise;
use super::models::{ModelName, SimulationModel};
use super::opt_configs::{opt_config, Contender};
use crate::baselines::BaselineKind;
use crate::config::{GrowerConfig, RfConfig};
use crate::criteria::best_cart_split;
use crate::rng::RngStream;

/// Published mean MSE on pure_3 (n = 500) for each method label.
pub const PURE3_REFERENCE: [(&str, f64); 6] = [
    ("intf", 0.154),
    ("rsrf", 0.190),
    ("rf", 0.510),
    ("et", 0.418),
    ("mean_y", 1.027),
    ("one_nn", 1.289),
];

pub fn reference_mse(method: &str) -> Option<f64> {
    PURE3_REFERENCE.iter().find(|(m, _)| *m == method).map(|(_, v)| *v)
}

fn tuned(model: ModelName, d: usize, c: Contender) -> Method {
    Method::labelled(c.label(), opt_config(model, d, c).expect("tuned setting exists"))
}

/// The four forests on pure_3 with their tuned settings.
pub fn table1_methods() -> Vec<Method> {
    [Contender::Intf, Contender::Rsrf, Contender::Rf, Contender::Et]
        .into_iter()
        .map(|c| tuned(ModelName::Pure3, 6, c))
        .collect()
}

pub fn baseline_methods() -> Vec<Method> {
    BaselineKind::ALL.into_iter().map(Method::Baseline).collect()
}

/// Random Forests at every mtry (100 trees, node size 5) next to tuned INTF.
pub fn fig2a_methods() -> Vec<Method> {
    let mut out: Vec<Method> = (1..=6)
        .map(|m| {
            Method::labelled(
                format!("rf_mtry{m}"),
                GrowerConfig::Rf(RfConfig {
                    num_trees: 100,
                    min_node_size: 5,
                    ..RfConfig::new(m)
                }),
            )
        })
        .collect();
    out.push(tuned(ModelName::Pure3, 6, Contender::Intf));
    out
}

/// Every model and dimension of the simulation study with the tuned forests
/// and both baselines.
pub fn table3_cases() -> Vec<(SimulationModel, Vec<Method>)> {
    let mut cases = Vec::new();
    for model in ModelName::ALL {
        let dims: &[usize] = if model == ModelName::Pure3 { &[6] } else { &[4, 10, 30] };
        for &d in dims {
            let mut methods: Vec<Method> = Contender::ALL.into_iter().map(|c| tuned(model, d, c)).collect();
            methods.extend(baseline_methods());
            cases.push((SimulationModel::new(model, d).expect("study dimensions are valid"), methods));
        }
    }
    cases
}

/// Root split of one large pure_3 sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlindnessRow {
    pub seed: u64,
    /// 1-based coordinate chosen by Sample-CART over all coordinates.
    pub root_feature: usize,
    /// Best impurity decrease using only the interacting coordinates 1, 2.
    pub gain_interaction: f64,
    /// Best impurity decrease using coordinates 3..6.
    pub gain_additive: f64,
}

impl BlindnessRow {
    pub fn ratio(&self) -> f64 {
        self.gain_interaction / self.gain_additive
    }
}

pub fn blindness(n: usize, seeds: u64, base_seed: u64) -> Vec<BlindnessRow> {
    let model = SimulationModel::with_default_d(ModelName::Pure3);
    (0..seeds)
        .map(|s| {
            let sim = model.generate(n, &mut RngStream::new(base_seed, s));
            let all: Vec<usize> = (0..n).collect();
            let gain = |features: &[usize]| best_cart_split(&all, features, &sim.data, 1).map_or(0.0, |c| c.gain);
            let root = best_cart_split(&all, &[0, 1, 2, 3, 4, 5], &sim.data, 1).expect("continuous features split");
            BlindnessRow {
                seed: s,
                root_feature: root.feature + 1,
                gain_interaction: gain(&[0, 1]),
                gain_additive: gain(&[2, 3, 4, 5]),
            }
        })
        .collect()
}

/// Empirical covariance of the noise columns at one lag.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LagCovariance {
    pub lag: usize,
    pub target: f64,
    /// Average over all column pairs at this lag.
    pub mean: f64,
    /// Largest deviation from `target` over those pairs.
    pub max_abs_dev: f64,
}

pub fn hd_lag_covariances(n: usize, extra: usize, seed: u64) -> Vec<LagCovariance> {
    let cols = banded_noise(n, extra, &mut RngStream::new(seed, 0));
    let means: Vec<f64> = cols.iter().map(|c| c.iter().sum::<f64>() / n as f64).collect();
    let cov = |a: usize, b: usize| {
        cols[a]
            .iter()
            .zip(&cols[b])
            .map(|(x, y)| (x - means[a]) * (y - means[b]))
            .sum::<f64>()
            / (n as f64 - 1.0)
    };
    let targets = [1.0, (3.0f64 / 8.0).sqrt(), 0.375, 0.0];
    targets
        .iter()
        .enumerate()
        .map(|(lag, &target)| {
            let vals: Vec<f64> = (0..extra.saturating_sub(lag)).map(|j| cov(j, j + lag)).collect();
            LagCovariance {
                lag,
                target,
                mean: vals.iter().sum::<f64>() / vals.len() as f64,
                max_abs_dev: vals.iter().map(|v| (v - target).abs()).fold(0.0, f64::max),
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_shapes() {
        assert_eq!(table1_methods().len(), 4);
        assert_eq!(fig2a_methods().len(), 7);
        let cases = table3_cases();
        assert_eq!(cases.len(), 13);
        assert!(cases.iter().all(|(_, m)| m.len() == 7));
        assert_eq!(reference_mse("rf"), Some(0.510));
    }

    #[test]
    fn small_blindness_and_lags() {
        let rows = blindness(2000, 2, 0);
        assert!(rows.iter().all(|r| (1..=6).contains(&r.root_feature)));
        let lags = hd_lag_covariances(20_000, 10, 0);
        assert_eq!(lags.len(), 4);
        assert!(lags.iter().all(|l| (l.mean - l.target).abs() < 0.05));
    }
}
