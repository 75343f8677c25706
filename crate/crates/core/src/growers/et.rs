//! Extremely Randomized Trees: random thresholds on random features, best by
//! impurity decrease.

use rand::Rng;

use super::{draw_features, grow_tree, CellSplitter, Plan};
use crate::config::EtConfig;
use crate::criteria::{score_from_stats, CellStats};
use crate::data::{Dataset, IndexSet};
use crate::rng::RngStream;
use crate::rule::SplitRule;
use crate::tree::Tree;

struct EtSplitter {
    mtry: usize,
    num_random_splits: usize,
}

/// Uniform draw from the open interval `(lo, hi)`; requires `lo < hi`.
fn draw_open(rng: &mut RngStream, lo: f64, hi: f64) -> f64 {
    loop {
        let s = rng.gen_range(lo..hi);
        if s > lo && s < hi {
            return s;
        }
    }
}

impl CellSplitter for EtSplitter {
    fn propose(&mut self, data: &Dataset, rows: &[usize], rng: &mut RngStream) -> Option<(Plan, f64)> {
        let y = data.response();
        let parent = CellStats::of(rows, data);
        let features = draw_features(rng, data.d(), self.mtry);
        let mut best: Option<(SplitRule, f64)> = None;
        for j in features {
            let col = data.column(j);
            let (lo, hi) = rows.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &i| {
                (lo.min(col[i]), hi.max(col[i]))
            });
            if lo >= hi {
                continue;
            }
            for _ in 0..self.num_random_splits {
                let s = draw_open(rng, lo, hi);
                let mut left = CellStats::default();
                for &i in rows {
                    if col[i] <= s {
                        left.add(y[i]);
                    }
                }
                let score = score_from_stats(parent, &[left, parent.minus(left)]);
                if best.is_none_or(|(_, b)| score > b) {
                    best = Some((SplitRule::axis(j, s), score));
                }
            }
        }
        best.map(|(rule, score)| (Plan::binary(rows, rule, data), score))
    }
}

pub fn grow_et_tree(data: &Dataset, resample: IndexSet, cfg: &EtConfig, rng: &mut RngStream) -> Tree {
    let mut splitter = EtSplitter {
        mtry: cfg.mtry,
        num_random_splits: cfg.num_random_splits,
    };
    grow_tree(data, resample, cfg.min_node_size, &mut splitter, rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::growers::test_support::check_tree;
    use crate::tree::TreeNode;

    fn cfg(mtry: usize, nrs: usize, min_node_size: usize) -> EtConfig {
        EtConfig {
            min_node_size,
            ..EtConfig::new(mtry, nrs)
        }
    }

    fn thresholds(tree: &Tree) -> Vec<(usize, f64)> {
        tree.nodes()
            .iter()
            .filter_map(|n| match n {
                TreeNode::Split {
                    rule: SplitRule::Axis { feature, threshold },
                    ..
                } => Some((*feature, *threshold)),
                _ => None,
            })
            .collect()
    }

    #[test]
    fn constant_columns_give_single_leaf() {
        let data = Dataset::from_columns(vec![vec![1.0; 5], vec![2.0; 5]], vec![0.0, 1.0, 2.0, 3.0, 4.0]).unwrap();
        let tree = grow_et_tree(&data, IndexSet::all(5), &cfg(2, 3, 1), &mut RngStream::new(3, 0));
        assert_eq!(tree.n_leaves(), 1);
    }

    #[test]
    fn split_points_lie_inside_node_range() {
        let n = 60;
        let x0: Vec<f64> = (0..n).map(|i| (i as f64 * 0.37).sin()).collect();
        let x1: Vec<f64> = (0..n).map(|i| (i % 7) as f64).collect();
        let y: Vec<f64> = (0..n).map(|i| x0[i] * 3.0 + x1[i]).collect();
        let data = Dataset::from_columns(vec![x0, x1], y).unwrap();
        for seed in 0..5 {
            let tree = grow_et_tree(&data, IndexSet::all(n), &cfg(2, 2, 2), &mut RngStream::new(seed, 0));
            check_tree(&tree, &data);
            // walk the tree recomputing each node's rows
            fn walk(tree: &Tree, id: usize, rows: Vec<usize>, data: &Dataset) {
                if let TreeNode::Split { rule, left, right } = &tree.nodes()[id] {
                    let SplitRule::Axis { feature, threshold } = *rule else { panic!() };
                    let vals: Vec<f64> = rows.iter().map(|&i| data.x(i, feature)).collect();
                    let lo = vals.iter().cloned().fold(f64::INFINITY, f64::min);
                    let hi = vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                    assert!(lo < threshold && threshold < hi);
                    let (l, r) = crate::rule::partition_indices(&rows, rule, data);
                    walk(tree, *left, l, data);
                    walk(tree, *right, r, data);
                }
            }
            walk(&tree, 0, (0..n).collect(), &data);
        }
    }

    #[test]
    fn best_of_many_draws_lands_in_optimal_gap() {
        // y = [0,0,2,2] on x = 1..4: only s in [2,3) separates the two levels
        let data = Dataset::from_columns(vec![vec![1.0, 2.0, 3.0, 4.0]], vec![0.0, 0.0, 2.0, 2.0]).unwrap();
        for seed in 0..200 {
            let tree = grow_et_tree(&data, IndexSet::all(4), &cfg(1, 1000, 4), &mut RngStream::new(seed, 0));
            let (_, s) = thresholds(&tree)[0];
            assert!((2.0..3.0).contains(&s), "seed {seed}: s={s}");
        }
    }

    #[test]
    fn fully_random_split_when_single_draw() {
        // mtry = nrs = 1: the root threshold is a single uniform draw, so over
        // many seeds it falls in (1,2) about a third of the time.
        let data = Dataset::from_columns(vec![vec![1.0, 2.0, 3.0, 4.0]], vec![0.0, 0.0, 2.0, 2.0]).unwrap();
        let hits = (0..3000)
            .filter(|&seed| {
                let tree = grow_et_tree(&data, IndexSet::all(4), &cfg(1, 1, 4), &mut RngStream::new(seed, 0));
                let (_, s) = thresholds(&tree)[0];
                s < 2.0
            })
            .count();
        let freq = hits as f64 / 3000.0;
        assert!((freq - 1.0 / 3.0).abs() < 0.03, "{freq}");
    }
}
