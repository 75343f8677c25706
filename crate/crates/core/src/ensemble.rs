//! Resampling and forest fitting shared by all growers.

use rand::seq::index;
use rand::Rng;
use rayon::prelude::*;

use crate::config::GrowerConfig;
use crate::data::{Dataset, IndexSet};
use crate::error::{Error, Result};
use crate::growers::{grow_et_tree, grow_intf_tree, grow_rf_tree, grow_rsrf_tree};
use crate::rng::RngStream;
use crate::tree::{Forest, Tree};

/// How each tree's training rows are drawn.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResamplePlan {
    pub replace: bool,
    pub fraction: f64,
}

impl ResamplePlan {
    pub fn for_config(cfg: &GrowerConfig) -> Self {
        Self {
            replace: cfg.replace(),
            fraction: cfg.sample_fraction(),
        }
    }

    /// Rows drawn per tree: `floor(fraction * n)`.
    pub fn size(&self, n: usize) -> usize {
        (self.fraction * n as f64).floor() as usize
    }
}

/// Draws the rows of one tree. Bootstrap samples keep their multiplicity;
/// both kinds are returned sorted.
pub fn draw_resample(n: usize, plan: &ResamplePlan, rng: &mut RngStream) -> IndexSet {
    let k = plan.size(n);
    let mut rows: Vec<usize> = if plan.replace {
        (0..k).map(|_| rng.gen_range(0..n)).collect()
    } else if k >= n {
        (0..n).collect()
    } else {
        index::sample(rng, n, k).into_vec()
    };
    rows.sort_unstable();
    IndexSet::from(rows)
}

/// Grows one tree on `resample` with the grower selected by `cfg`.
pub fn fit_tree(data: &Dataset, cfg: &GrowerConfig, resample: IndexSet, rng: &mut RngStream) -> Tree {
    match cfg {
        GrowerConfig::Rf(c) => grow_rf_tree(data, resample, c, rng),
        GrowerConfig::Et(c) => grow_et_tree(data, resample, c, rng),
        GrowerConfig::Intf(c) => grow_intf_tree(data, resample, c, rng),
        GrowerConfig::Rsrf(c) => grow_rsrf_tree(data, resample, c, rng),
    }
}

/// Fits `cfg.num_trees()` trees; tree `b` draws its rows and all of its
/// randomness from `RngStream::new(seed, b)`, so the result does not depend on
/// scheduling. Runs on the current rayon pool.
pub fn fit_forest(data: &Dataset, cfg: &GrowerConfig, seed: u64) -> Result<Forest> {
    cfg.validate(data.d())?;
    let plan = ResamplePlan::for_config(cfg);
    if plan.size(data.n()) < 1 {
        return Err(Error::config(
            "sample_fraction",
            format!("draws no rows from n = {}", data.n()),
        ));
    }
    let trees: Vec<Tree> = (0..cfg.num_trees())
        .into_par_iter()
        .map(|b| {
            let mut rng = RngStream::new(seed, b as u64);
            let resample = draw_resample(data.n(), &plan, &mut rng);
            fit_tree(data, cfg, resample, &mut rng)
        })
        .collect();
    Ok(Forest::new(cfg.clone(), seed, data.feature_names().to_vec(), trees))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{Algorithm, RfConfig};
    use crate::tree::Predictor;

    fn data() -> Dataset {
        let x: Vec<f64> = (0..40).map(|i| (i as f64 * 0.7).cos()).collect();
        let z: Vec<f64> = (0..40).map(|i| (i % 5) as f64).collect();
        let y = x.iter().zip(&z).map(|(a, b)| a * b).collect();
        Dataset::from_columns(vec![x, z], y).unwrap()
    }

    #[test]
    fn resample_sizes() {
        let mut rng = RngStream::new(0, 0);
        let sub = ResamplePlan {
            replace: false,
            fraction: 0.632,
        };
        let s = draw_resample(500, &sub, &mut rng);
        assert_eq!(s.len(), 316);
        assert!(s.is_distinct());
        let full = ResamplePlan {
            replace: false,
            fraction: 1.0,
        };
        assert_eq!(draw_resample(7, &full, &mut rng), IndexSet::all(7));
        let boot = ResamplePlan {
            replace: true,
            fraction: 1.0,
        };
        assert_eq!(draw_resample(1, &boot, &mut rng).rows(), &[0]);
        let b = draw_resample(200, &boot, &mut rng);
        assert_eq!(b.len(), 200);
        assert!(!b.is_distinct());
    }

    #[test]
    fn forest_is_deterministic_and_averages_trees() {
        let data = data();
        for algo in Algorithm::ALL {
            let cfg = algo.default_config(2).with_num_trees(7);
            let a = fit_forest(&data, &cfg, 42).unwrap();
            let b = fit_forest(&data, &cfg, 42).unwrap();
            assert_eq!(a.to_json().unwrap(), b.to_json().unwrap());
            let x = [0.3, 2.0];
            let mean = a.trees.iter().map(|t| t.predict(&x)).sum::<f64>() / 7.0;
            assert!((a.predict(&x) - mean).abs() <= 1e-12 * mean.abs().max(1.0));
        }
    }

    #[test]
    fn single_tree_forest_matches_tree() {
        let data = data();
        let cfg = GrowerConfig::Rf(RfConfig {
            num_trees: 1,
            ..RfConfig::new(2)
        });
        let f = fit_forest(&data, &cfg, 3).unwrap();
        let mut rng = RngStream::new(3, 0);
        let rows = draw_resample(40, &ResamplePlan::for_config(&cfg), &mut rng);
        let t = fit_tree(&data, &cfg, rows, &mut rng);
        assert_eq!(f.trees[0], t);
        for i in 0..40 {
            assert_eq!(f.predict(&data.row(i)), t.predict(&data.row(i)));
        }
    }

    #[test]
    fn invalid_config_names_field() {
        let cfg = GrowerConfig::Rf(RfConfig::new(9));
        let err = fit_forest(&data(), &cfg, 0).unwrap_err();
        assert!(err.is_config_error());
        assert!(err.to_string().contains("mtry"), "{err}");
    }

    #[test]
    fn parallel_matches_sequential() {
        let data = data();
        let cfg = Algorithm::Rsrf.default_config(2).with_num_trees(6);
        let par = fit_forest(&data, &cfg, 9).unwrap();
        let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let seq = pool.install(|| fit_forest(&data, &cfg, 9).unwrap());
        assert_eq!(par, seq);
    }
}
