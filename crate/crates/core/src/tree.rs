//! Fitted trees and forests, prediction and the JSON document format.
//!
//! A serialized forest looks like
//!
//! ```json
//! {
//!   "format_version": 1,
//!   "n_features": 2,
//!   "feature_names": ["x1", "x2"],
//!   "seed": 7,
//!   "config": { "algorithm": "rf", "mtry": 2, ... },
//!   "trees": [
//!     { "nodes": [
//!         { "type": "split", "rule": { "kind": "axis", "feature": 0, "threshold": 2.0 }, "left": 1, "right": 2 },
//!         { "type": "leaf", "mean": 0.0, "count": 2 },
//!         { "type": "leaf", "mean": 2.0, "count": 2 } ],
//!       "resample": [0, 1, 2, 3] }
//!   ]
//! }
//! ```
//!
//! Node 0 is the root. Bivariate rules use `"kind": "bivariate"` with fields
//! `variant`, `feature1`, `feature2`, `threshold1`, `threshold2`.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::config::GrowerConfig;
use crate::data::{Dataset, IndexSet};
use crate::error::{Error, Result};
use crate::rule::SplitRule;

pub const FOREST_FORMAT_VERSION: u32 = 1;

/// Anything that maps a feature vector to a real prediction.
pub trait Predictor: Sync {
    fn predict(&self, x: &[f64]) -> f64;

    fn predict_dataset(&self, data: &Dataset) -> Vec<f64> {
        let mut x = vec![0.0; data.d()];
        (0..data.n())
            .map(|i| {
                for (j, v) in x.iter_mut().enumerate() {
                    *v = data.x(i, j);
                }
                self.predict(&x)
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum TreeNode {
    Split {
        rule: SplitRule,
        left: usize,
        right: usize,
    },
    Leaf {
        mean: f64,
        count: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tree {
    nodes: Vec<TreeNode>,
    resample: IndexSet,
}

impl Tree {
    pub(crate) fn from_parts(nodes: Vec<TreeNode>, resample: IndexSet) -> Self {
        debug_assert!(!nodes.is_empty());
        Self { nodes, resample }
    }

    /// A tree consisting of one leaf.
    pub fn leaf(mean: f64, count: usize, resample: IndexSet) -> Self {
        Self {
            nodes: vec![TreeNode::Leaf { mean, count }],
            resample,
        }
    }

    pub fn nodes(&self) -> &[TreeNode] {
        &self.nodes
    }

    pub fn resample(&self) -> &IndexSet {
        &self.resample
    }

    pub fn n_leaves(&self) -> usize {
        self.nodes
            .iter()
            .filter(|n| matches!(n, TreeNode::Leaf { .. }))
            .count()
    }

    pub fn depth(&self) -> usize {
        fn go(nodes: &[TreeNode], id: usize) -> usize {
            match nodes[id] {
                TreeNode::Leaf { .. } => 0,
                TreeNode::Split { left, right, .. } => 1 + go(nodes, left).max(go(nodes, right)),
            }
        }
        go(&self.nodes, 0)
    }

    /// Index of the leaf node reached by `x`.
    pub fn leaf_for(&self, x: &[f64]) -> usize {
        self.route(|rule| rule.goes_left(x))
    }

    /// Index of the leaf node reached by training row `i`.
    pub fn leaf_for_row(&self, data: &Dataset, i: usize) -> usize {
        self.route(|rule| rule.goes_left_row(data, i))
    }

    #[inline]
    fn route(&self, goes_left: impl Fn(&SplitRule) -> bool) -> usize {
        let mut id = 0;
        loop {
            match &self.nodes[id] {
                TreeNode::Leaf { .. } => return id,
                TreeNode::Split { rule, left, right } => {
                    id = if goes_left(rule) { *left } else { *right };
                }
            }
        }
    }

    fn leaf_mean(&self, id: usize) -> f64 {
        match self.nodes[id] {
            TreeNode::Leaf { mean, .. } => mean,
            TreeNode::Split { .. } => unreachable!("route always ends at a leaf"),
        }
    }

    fn check(&self, d: usize) -> std::result::Result<(), String> {
        let len = self.nodes.len();
        for node in &self.nodes {
            match node {
                TreeNode::Split { rule, left, right } => {
                    rule.validate(d)?;
                    if *left >= len || *right >= len {
                        return Err("child index out of range".into());
                    }
                }
                TreeNode::Leaf { mean, count } => {
                    if !mean.is_finite() || *count == 0 {
                        return Err("leaf must have a finite mean and positive count".into());
                    }
                }
            }
        }
        Ok(())
    }
}

impl Predictor for Tree {
    fn predict(&self, x: &[f64]) -> f64 {
        self.leaf_mean(self.leaf_for(x))
    }
}

/// An ensemble of trees whose prediction is the plain average of tree predictions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Forest {
    pub format_version: u32,
    pub n_features: usize,
    pub feature_names: Vec<String>,
    pub seed: u64,
    pub config: GrowerConfig,
    pub trees: Vec<Tree>,
}

impl Forest {
    pub fn new(config: GrowerConfig, seed: u64, feature_names: Vec<String>, trees: Vec<Tree>) -> Self {
        Self {
            format_version: FOREST_FORMAT_VERSION,
            n_features: feature_names.len(),
            feature_names,
            seed,
            config,
            trees,
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        #[derive(Deserialize)]
        struct Header {
            format_version: u32,
        }
        let header: Header = serde_json::from_str(text)?;
        if header.format_version != FOREST_FORMAT_VERSION {
            return Err(Error::VersionMismatch {
                found: header.format_version,
                expected: FOREST_FORMAT_VERSION,
            });
        }
        let forest: Forest = serde_json::from_str(text)?;
        if forest.trees.is_empty() {
            return Err(Error::InvalidDataset("forest has no trees".into()));
        }
        if forest.feature_names.len() != forest.n_features {
            return Err(Error::DimensionMismatch {
                expected: forest.n_features,
                got: forest.feature_names.len(),
            });
        }
        for tree in &forest.trees {
            tree.check(forest.n_features).map_err(Error::InvalidDataset)?;
        }
        Ok(forest)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}

impl Predictor for Forest {
    fn predict(&self, x: &[f64]) -> f64 {
        let sum: f64 = self.trees.iter().map(|t| t.predict(x)).sum();
        sum / self.trees.len() as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{GrowerConfig, RfConfig};

    fn stump() -> Tree {
        Tree::from_parts(
            vec![
                TreeNode::Split {
                    rule: SplitRule::axis(0, 0.5),
                    left: 1,
                    right: 2,
                },
                TreeNode::Leaf { mean: 1.0, count: 3 },
                TreeNode::Leaf { mean: 2.0, count: 4 },
            ],
            IndexSet::all(7),
        )
    }

    #[test]
    fn single_leaf_predicts_constant() {
        let t = Tree::leaf(3.5, 2, IndexSet::all(2));
        assert_eq!(t.predict(&[0.0]), 3.5);
        assert_eq!(t.predict(&[1e9]), 3.5);
    }

    #[test]
    fn stump_routes() {
        let t = stump();
        assert_eq!(t.predict(&[0.2, 9.0]), 1.0);
        assert_eq!(t.predict(&[0.5, 9.0]), 1.0);
        assert_eq!(t.predict(&[0.7, 9.0]), 2.0);
        assert_eq!(t.depth(), 1);
        assert_eq!(t.n_leaves(), 2);
    }

    fn forest_of(trees: Vec<Tree>) -> Forest {
        Forest::new(
            GrowerConfig::Rf(RfConfig::new(1)),
            0,
            vec!["a".into(), "b".into()],
            trees,
        )
    }

    #[test]
    fn forest_averages() {
        let f = forest_of(vec![stump(), stump(), stump()]);
        assert_eq!(f.predict(&[0.2, 0.0]), 1.0);
        let f = forest_of(vec![
            Tree::leaf(1.0, 1, IndexSet::all(1)),
            Tree::leaf(3.0, 1, IndexSet::all(1)),
        ]);
        assert_eq!(f.predict(&[0.0, 0.0]), 2.0);
    }

    #[test]
    fn json_round_trip_and_version_check() {
        let f = forest_of(vec![stump()]);
        let text = f.to_json().unwrap();
        assert_eq!(Forest::from_json(&text).unwrap(), f);
        let bumped = text.replace("\"format_version\":1", "\"format_version\":9");
        assert!(matches!(
            Forest::from_json(&bumped),
            Err(Error::VersionMismatch { found: 9, .. })
        ));
    }

    #[test]
    fn json_rejects_broken_tree() {
        let f = forest_of(vec![stump()]);
        let text = f.to_json().unwrap().replace("\"right\":2", "\"right\":17");
        assert!(Forest::from_json(&text).is_err());
    }
}
