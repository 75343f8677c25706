//! Hyper-parameter search: cross-validated, oracle ("opt") and nested CV.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::metrics::{mean_squared_error, mse_on_test};
use super::models::SimulationModel;
use crate::config::{Algorithm, EtConfig, GrowerConfig, IntfConfig, MtryMode, RfConfig, RsrfConfig};
use crate::data::Dataset;
use crate::ensemble::fit_forest;
use crate::error::{Error, Result};
use crate::rng::RngStream;
use crate::tree::Predictor;

/// Where candidate configurations come from.
#[derive(Debug, Clone, PartialEq)]
pub enum TuningSpace {
    /// Random draws from the simulation-study ranges for `d` features.
    Ranges { algorithm: Algorithm, mtry_mode: MtryMode, d: usize },
    /// An explicit list; every entry is a candidate.
    Grid(Vec<GrowerConfig>),
    /// Another space with forest-level settings pinned on every candidate.
    Pinned { base: Box<TuningSpace>, pins: ForestPins },
}

/// Forest-level settings that override whatever a space would draw.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ForestPins {
    pub num_trees: Option<usize>,
    pub min_node_size: Option<usize>,
    pub replace: Option<bool>,
}

impl ForestPins {
    pub fn is_empty(&self) -> bool {
        *self == ForestPins::default()
    }

    pub fn apply(&self, mut config: GrowerConfig) -> GrowerConfig {
        if let Some(n) = self.num_trees {
            config = config.with_num_trees(n);
        }
        if let Some(n) = self.min_node_size {
            config = config.with_min_node_size(n);
        }
        if let Some(r) = self.replace {
            config = config.with_replace(r);
        }
        config
    }
}

fn range(rng: &mut RngStream, lo: usize, hi: usize) -> usize {
    rng.gen_range(lo..=hi)
}

impl TuningSpace {
    pub fn ranges(algorithm: Algorithm, d: usize) -> Self {
        TuningSpace::Ranges {
            algorithm,
            mtry_mode: MtryMode::NotFixed,
            d,
        }
    }

    /// RSRF with coordinate subsets shared among a node's candidates.
    pub fn ranges_fixed_mode(d: usize) -> Self {
        TuningSpace::Ranges {
            algorithm: Algorithm::Rsrf,
            mtry_mode: MtryMode::Fixed,
            d,
        }
    }

    pub fn pinned(self, pins: ForestPins) -> Self {
        if pins.is_empty() {
            return self;
        }
        TuningSpace::Pinned {
            base: Box::new(self),
            pins,
        }
    }

    pub fn single(config: GrowerConfig) -> Self {
        TuningSpace::Grid(vec![config])
    }

    /// The grid used for the real-data comparisons (bootstrap, node size 5).
    pub fn real_data(algorithm: Algorithm, d: usize) -> Self {
        let mut grid = Vec::new();
        match algorithm {
            Algorithm::Rsrf => {
                for m in 1..=d {
                    grid.push(GrowerConfig::Rsrf(RsrfConfig {
                        include_cartcart: true,
                        mtry_cart_cart: Some(m),
                        ..RsrfConfig::new(30, m)
                    }));
                }
            }
            Algorithm::Rf => grid.extend((1..=d).map(|m| GrowerConfig::Rf(RfConfig::new(m)))),
            Algorithm::Intf => {
                let npairs = [1, 10].into_iter().chain((25..=250).step_by(25));
                grid.extend(npairs.map(|p| GrowerConfig::Intf(IntfConfig::new(p))));
            }
            Algorithm::Et => {
                for nrs in 1..=10 {
                    for m in 1..=d {
                        grid.push(GrowerConfig::Et(EtConfig {
                            replace: true,
                            ..EtConfig::new(m, nrs)
                        }));
                    }
                }
            }
        }
        TuningSpace::Grid(grid)
    }

    /// Candidate list: `combos` random draws for ranges, the whole list for a
    /// grid (or a random subset of `combos` entries when it is longer).
    pub fn candidates(&self, combos: usize, rng: &mut RngStream) -> Vec<GrowerConfig> {
        match self {
            TuningSpace::Grid(list) if combos >= list.len() => list.clone(),
            TuningSpace::Grid(list) => {
                let mut idx = rand::seq::index::sample(rng, list.len(), combos).into_vec();
                idx.sort_unstable();
                idx.into_iter().map(|i| list[i].clone()).collect()
            }
            TuningSpace::Ranges { algorithm, mtry_mode, d } => {
                (0..combos).map(|_| draw_config(*algorithm, *mtry_mode, *d, rng)).collect()
            }
            TuningSpace::Pinned { base, pins } => {
                base.candidates(combos, rng).into_iter().map(|c| pins.apply(c)).collect()
            }
        }
    }
}

fn draw_config(algorithm: Algorithm, mtry_mode: MtryMode, d: usize, rng: &mut RngStream) -> GrowerConfig {
    match algorithm {
        Algorithm::Rsrf => {
            let include_cartcart = rng.gen_bool(0.5);
            let replace = rng.gen_bool(0.5);
            let width = range(rng, 1, if d > 10 { 30 } else { 15 });
            let first_mtry = range(rng, 1, d);
            let mtry_random_cart = range(rng, 1, d);
            let min_node_size = range(rng, 5, 30);
            let (mtry_random, mtry_cart_cart) = match mtry_mode {
                MtryMode::Fixed => (Some(first_mtry), None),
                MtryMode::NotFixed => (None, include_cartcart.then_some(first_mtry)),
            };
            GrowerConfig::Rsrf(RsrfConfig {
                include_cartcart,
                mtry_mode,
                mtry_random,
                mtry_cart_cart,
                min_node_size,
                replace,
                ..RsrfConfig::new(width, mtry_random_cart)
            })
        }
        Algorithm::Rf => GrowerConfig::Rf(RfConfig {
            min_node_size: range(rng, 5, 30),
            replace: rng.gen_bool(0.5),
            ..RfConfig::new(range(rng, 1, d))
        }),
        Algorithm::Intf => {
            let max_pairs = match d {
                0..=4 => 100,
                5..=6 => 150,
                7..=10 => 250,
                _ => 750,
            };
            GrowerConfig::Intf(IntfConfig {
                min_node_size: range(rng, 5, 30),
                replace: rng.gen_bool(0.5),
                ..IntfConfig::new(range(rng, 1, max_pairs))
            })
        }
        Algorithm::Et => {
            let min_node_size = range(rng, 5, 30);
            let replace = rng.gen_bool(0.5);
            let nrs = range(rng, 1, 10);
            GrowerConfig::Et(EtConfig {
                min_node_size,
                replace,
                sample_fraction: Some(1.0),
                ..EtConfig::new(range(rng, 1, d), nrs)
            })
        }
    }
}

/// Every candidate with its score (lower is better) and the winner.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TuneResult {
    pub best: GrowerConfig,
    pub best_score: f64,
    pub scores: Vec<(GrowerConfig, f64)>,
}

fn pick_best(scores: Vec<(GrowerConfig, f64)>) -> Result<TuneResult> {
    let mut best: Option<usize> = None;
    for (k, (_, s)) in scores.iter().enumerate() {
        // strict comparison keeps the first of tied candidates
        if best.is_none_or(|b| *s < scores[b].1) {
            best = Some(k);
        }
    }
    let b = best.ok_or_else(|| Error::config("combos", "no candidate configurations"))?;
    Ok(TuneResult {
        best: scores[b].0.clone(),
        best_score: scores[b].1,
        scores,
    })
}

/// Random assignment of `n` rows to `k` folds of near-equal size.
pub fn fold_assignment(n: usize, k: usize, rng: &mut RngStream) -> Vec<Vec<usize>> {
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(rng);
    let mut folds = vec![Vec::new(); k];
    for (pos, i) in perm.into_iter().enumerate() {
        folds[pos % k].push(i);
    }
    for f in &mut folds {
        f.sort_unstable();
    }
    folds
}

fn complement(n: usize, held_out: &[usize]) -> Vec<usize> {
    let mut mask = vec![true; n];
    for &i in held_out {
        mask[i] = false;
    }
    (0..n).filter(|&i| mask[i]).collect()
}

/// Fold-averaged held-out MSE against the observed responses.
pub fn cv_error(data: &Dataset, config: &GrowerConfig, folds: &[Vec<usize>], seed: u64) -> Result<f64> {
    let mut total = 0.0;
    for (k, test_rows) in folds.iter().enumerate() {
        let train = data.subset(&complement(data.n(), test_rows))?;
        let test = data.subset(test_rows)?;
        let forest = fit_forest(&train, config, seed.wrapping_add(k as u64))?;
        total += mean_squared_error(&forest.predict_dataset(&test), test.response());
    }
    Ok(total / folds.len() as f64)
}

/// `folds`-fold cross-validation over `combos` candidates; every candidate is
/// scored on the same folds.
pub fn cv_tune(
    data: &Dataset,
    space: &TuningSpace,
    combos: usize,
    folds: usize,
    rng: &mut RngStream,
) -> Result<TuneResult> {
    if folds < 2 || folds > data.n() {
        return Err(Error::config("folds", format!("need 2 <= folds <= n = {}, got {folds}", data.n())));
    }
    let candidates = space.candidates(combos, rng);
    let folds = fold_assignment(data.n(), folds, rng);
    let seed = rng.child_seed();
    let scores = candidates
        .into_iter()
        .map(|c| cv_error(data, &c, &folds, seed).map(|e| (c, e)))
        .collect::<Result<Vec<_>>>()?;
    pick_best(scores)
}

/// Oracle tuning: average true-function MSE over `sims` fresh data sets,
/// shared by all candidates.
pub fn opt_tune(
    model: &SimulationModel,
    space: &TuningSpace,
    combos: usize,
    sims: usize,
    n_train: usize,
    n_test: usize,
    rng: &mut RngStream,
) -> Result<TuneResult> {
    if sims == 0 {
        return Err(Error::config("sims", "must be at least 1"));
    }
    let candidates = space.candidates(combos, rng);
    let datasets: Vec<_> = (0..sims)
        .map(|_| {
            let train = model.generate(n_train, rng);
            let test = model.generate(n_test, rng);
            (train, test, rng.child_seed())
        })
        .collect();
    let scores = candidates
        .into_iter()
        .map(|c| {
            let mut total = 0.0;
            for (train, test, seed) in &datasets {
                total += mse_on_test(&fit_forest(&train.data, &c, *seed)?, test).mse;
            }
            Ok((c, total / sims as f64))
        })
        .collect::<Result<Vec<_>>>()?;
    pick_best(scores)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NestedCvResult {
    pub method: String,
    /// One held-out MSE per outer fold and repeat.
    pub fold_mse: Vec<f64>,
    pub chosen: Vec<GrowerConfig>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NestedCvPlan {
    pub inner: usize,
    pub outer: usize,
    pub repeats: usize,
    /// Candidates per inner search.
    pub combos: usize,
}

impl Default for NestedCvPlan {
    fn default() -> Self {
        Self {
            inner: 5,
            outer: 5,
            repeats: 2,
            combos: 200,
        }
    }
}

/// Nested cross-validation: each outer training part is tuned by inner CV,
/// the chosen configuration refit on it and scored on the outer held-out part.
/// Outer folds are shared by all methods.
pub fn nested_cv(
    data: &Dataset,
    methods: &[(String, TuningSpace)],
    plan: NestedCvPlan,
    rng: &mut RngStream,
) -> Result<Vec<NestedCvResult>> {
    if plan.outer < 2 || plan.outer > data.n() {
        return Err(Error::config("outer", format!("need 2 <= outer <= n = {}", data.n())));
    }
    let mut results: Vec<NestedCvResult> = methods
        .iter()
        .map(|(m, _)| NestedCvResult {
            method: m.clone(),
            fold_mse: Vec::new(),
            chosen: Vec::new(),
        })
        .collect();
    for _ in 0..plan.repeats {
        let outer = fold_assignment(data.n(), plan.outer, rng);
        for test_rows in &outer {
            let train = data.subset(&complement(data.n(), test_rows))?;
            let test = data.subset(test_rows)?;
            for ((_, space), res) in methods.iter().zip(results.iter_mut()) {
                let tuned = cv_tune(&train, space, plan.combos, plan.inner, rng)?;
                let forest = fit_forest(&train, &tuned.best, rng.child_seed())?;
                res.fold_mse.push(mean_squared_error(&forest.predict_dataset(&test), test.response()));
                res.chosen.push(tuned.best);
            }
        }
    }
    Ok(results)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simbench::models::ModelName;

    fn small_data() -> Dataset {
        SimulationModel::with_default_d(ModelName::Pure3)
            .generate(40, &mut RngStream::new(1, 0))
            .data
    }

    #[test]
    fn draws_validate() {
        let mut rng = RngStream::new(0, 0);
        for d in [4, 6, 10, 30] {
            for algo in Algorithm::ALL {
                for c in TuningSpace::ranges(algo, d).candidates(50, &mut rng) {
                    c.validate(d).unwrap();
                }
            }
            for c in TuningSpace::ranges_fixed_mode(d).candidates(50, &mut rng) {
                c.validate(d).unwrap();
            }
            for algo in Algorithm::ALL {
                let TuningSpace::Grid(g) = TuningSpace::real_data(algo, d) else { unreachable!() };
                g.iter().for_each(|c| c.validate(d).unwrap());
            }
        }
    }

    #[test]
    fn folds_partition_rows() {
        let folds = fold_assignment(23, 5, &mut RngStream::new(0, 0));
        let mut all: Vec<usize> = folds.concat();
        all.sort_unstable();
        assert_eq!(all, (0..23).collect::<Vec<_>>());
        assert!(folds.iter().all(|f| f.len() == 4 || f.len() == 5));
    }

    #[test]
    fn single_config_space_returns_it() {
        let data = small_data();
        let cfg = GrowerConfig::Rf(RfConfig {
            num_trees: 3,
            ..RfConfig::new(2)
        });
        let space = TuningSpace::single(cfg.clone());
        let res = cv_tune(&data, &space, 200, 10, &mut RngStream::new(0, 0)).unwrap();
        assert_eq!(res.best, cfg);
        // leave-one-out is accepted
        let res = cv_tune(&data, &space, 1, data.n(), &mut RngStream::new(0, 0)).unwrap();
        assert_eq!(res.best, cfg);
        let model = SimulationModel::with_default_d(ModelName::Pure3);
        let res = opt_tune(&model, &space, 1, 1, 50, 50, &mut RngStream::new(0, 0)).unwrap();
        assert_eq!(res.best, cfg);
    }

    #[test]
    fn cv_prefers_informative_config() {
        let model = SimulationModel::new(ModelName::Pure2, 4).unwrap();
        let data = model.generate(200, &mut RngStream::new(3, 0)).data;
        let good = GrowerConfig::Rf(RfConfig {
            num_trees: 20,
            ..RfConfig::new(4)
        });
        let stump = GrowerConfig::Rf(RfConfig {
            num_trees: 20,
            min_node_size: 1000,
            ..RfConfig::new(4)
        });
        let res = cv_tune(
            &data,
            &TuningSpace::Grid(vec![stump, good.clone()]),
            2,
            5,
            &mut RngStream::new(0, 0),
        )
        .unwrap();
        assert_eq!(res.best, good);
        assert_eq!(res.scores.len(), 2);
    }

    #[test]
    fn nested_cv_shapes() {
        let data = small_data();
        let methods = vec![(
            "rf".to_string(),
            TuningSpace::Grid(vec![
                GrowerConfig::Rf(RfConfig {
                    num_trees: 3,
                    ..RfConfig::new(1)
                }),
                GrowerConfig::Rf(RfConfig {
                    num_trees: 3,
                    ..RfConfig::new(6)
                }),
            ]),
        )];
        let plan = NestedCvPlan {
            inner: 2,
            outer: 2,
            repeats: 1,
            combos: 2,
        };
        let res = nested_cv(&data, &methods, plan, &mut RngStream::new(0, 0)).unwrap();
        assert_eq!(res[0].fold_mse.len(), 2);
        assert_eq!(res[0].chosen.len(), 2);
    }

    #[test]
    fn constant_response_ties_everywhere() {
        let x: Vec<f64> = (0..30).map(|i| i as f64).collect();
        let data = Dataset::from_columns(vec![x.clone(), x.iter().map(|v| v * v).collect()], vec![3.0; 30]).unwrap();
        let methods: Vec<(String, TuningSpace)> = Algorithm::ALL
            .iter()
            .map(|a| (a.name().to_string(), TuningSpace::single(a.default_config(2).with_num_trees(3))))
            .collect();
        let plan = NestedCvPlan {
            inner: 3,
            outer: 3,
            repeats: 1,
            combos: 1,
        };
        for r in nested_cv(&data, &methods, plan, &mut RngStream::new(0, 0)).unwrap() {
            assert!(r.fold_mse.iter().all(|&e| e == 0.0), "{r:?}");
        }
    }
}
