//! Random Forest trees: Sample-CART on a fresh random feature subset per node.

use super::{draw_features, grow_tree, CellSplitter, Plan};
use crate::config::RfConfig;
use crate::criteria::best_cart_split;
use crate::data::{Dataset, IndexSet};
use crate::rng::RngStream;
use crate::rule::SplitRule;
use crate::tree::Tree;

struct RfSplitter {
    mtry: usize,
}

impl CellSplitter for RfSplitter {
    fn propose(&mut self, data: &Dataset, rows: &[usize], rng: &mut RngStream) -> Option<(Plan, f64)> {
        let features = draw_features(rng, data.d(), self.mtry);
        // No re-draw when the drawn subset admits no split.
        let best = best_cart_split(rows, &features, data, 1)?;
        let rule = SplitRule::axis(best.feature, best.threshold);
        Some((Plan::binary(rows, rule, data), best.gain))
    }
}

pub fn grow_rf_tree(data: &Dataset, resample: IndexSet, cfg: &RfConfig, rng: &mut RngStream) -> Tree {
    let mut splitter = RfSplitter { mtry: cfg.mtry };
    grow_tree(data, resample, cfg.min_node_size, &mut splitter, rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::growers::test_support::check_tree;
    use crate::tree::{Predictor, TreeNode};

    fn line() -> Dataset {
        Dataset::from_columns(vec![vec![1.0, 2.0, 3.0, 4.0]], vec![0.0, 0.0, 2.0, 2.0]).unwrap()
    }

    fn cfg(mtry: usize, min_node_size: usize) -> RfConfig {
        RfConfig {
            min_node_size,
            ..RfConfig::new(mtry)
        }
    }

    #[test]
    fn depth_one_on_line() {
        let data = line();
        let tree = grow_rf_tree(&data, IndexSet::all(4), &cfg(1, 2), &mut RngStream::new(1, 0));
        assert_eq!(tree.depth(), 1);
        assert_eq!(
            tree.nodes()[0],
            TreeNode::Split {
                rule: SplitRule::axis(0, 2.0),
                left: 1,
                right: 2
            }
        );
        for (x, want) in [(0.5, 0.0), (2.0, 0.0), (2.5, 2.0), (9.0, 2.0)] {
            assert_eq!(tree.predict(&[x]), want);
        }
        check_tree(&tree, &data);
    }

    #[test]
    fn large_min_node_size_gives_root_leaf() {
        let data = line();
        let tree = grow_rf_tree(&data, IndexSet::all(4), &cfg(1, 5), &mut RngStream::new(1, 0));
        assert_eq!(tree.nodes(), &[TreeNode::Leaf { mean: 1.0, count: 4 }]);
    }

    #[test]
    fn constant_response_is_a_leaf() {
        let data = Dataset::from_columns(vec![vec![1.0, 2.0, 3.0, 4.0]], vec![7.0; 4]).unwrap();
        let tree = grow_rf_tree(&data, IndexSet::all(4), &cfg(1, 1), &mut RngStream::new(1, 0));
        assert_eq!(tree.n_leaves(), 1);
    }

    #[test]
    fn bootstrap_rows_keep_multiplicity() {
        let data = line();
        let resample = IndexSet::new(vec![0, 0, 0, 3], 4).unwrap();
        let tree = grow_rf_tree(&data, resample, &cfg(1, 1), &mut RngStream::new(1, 0));
        check_tree(&tree, &data);
        assert_eq!(tree.predict(&[1.0]), 0.0);
        assert_eq!(tree.predict(&[4.0]), 2.0);
    }
}
