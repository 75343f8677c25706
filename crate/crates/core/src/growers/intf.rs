//! Interaction Forest trees: bivariate splits on random feature pairs.
//!
//! For a pair `(j1, j2)` two pairs of thresholds are drawn. `(c1, c2)` from the
//! first draw define the four quadrant splits and the checkerboard split; the
//! second pair defines the two univariate splits on `j1` and `j2`. Thresholds
//! are drawn uniformly from the distinct in-cell values of the feature,
//! excluding the largest, so every univariate split has two nonempty sides.

use rand::Rng;

use super::{grow_tree, CellSplitter, Plan};
use crate::config::IntfConfig;
use crate::criteria::{score_from_stats, CellStats, Partition};
use crate::data::{Dataset, IndexSet};
use crate::rng::RngStream;
use crate::rule::{partition_indices, IntfVariant, SplitRule};
use crate::tree::Tree;

/// Thresholds for one feature pair: `a*` drive the quadrant and checkerboard
/// variants, `c*` the univariate ones. `None` marks a coordinate with fewer
/// than two distinct values in the cell.
#[derive(Debug, Clone, Copy)]
struct PairThresholds {
    a1: Option<f64>,
    a2: Option<f64>,
    c1: Option<f64>,
    c2: Option<f64>,
}

fn variant_rule(variant: IntfVariant, j1: usize, j2: usize, t: &PairThresholds) -> Option<SplitRule> {
    // univariate variants store their unused threshold as 0
    let (threshold1, threshold2) = match variant {
        IntfVariant::Single1 => (t.c1?, 0.0),
        IntfVariant::Single2 => (0.0, t.c2?),
        _ => (t.a1?, t.a2?),
    };
    Some(SplitRule::Bivariate {
        variant,
        feature1: j1,
        feature2: j2,
        threshold1,
        threshold2,
    })
}

/// The (up to) seven candidate partitions of `cell` for the pair `(j1, j2)`.
///
/// `(a1, a2)` place the quadrant and checkerboard splits, `c1` and `c2` the
/// univariate splits on `j1` and `j2`. Candidates that would leave a daughter
/// empty are omitted.
#[allow(clippy::too_many_arguments)]
pub fn seven_partitions(
    cell: &[usize],
    j1: usize,
    j2: usize,
    a1: f64,
    a2: f64,
    c1: f64,
    c2: f64,
    data: &Dataset,
) -> Vec<(SplitRule, Partition)> {
    assert_ne!(j1, j2, "interaction splits need two distinct features");
    let t = PairThresholds {
        a1: Some(a1),
        a2: Some(a2),
        c1: Some(c1),
        c2: Some(c2),
    };
    IntfVariant::ALL
        .iter()
        .filter_map(|&v| variant_rule(v, j1, j2, &t))
        .filter_map(|rule| {
            let (l, r) = partition_indices(cell, &rule, data);
            (!l.is_empty() && !r.is_empty()).then(|| (rule, Partition::new(vec![l, r])))
        })
        .collect()
}

/// Lazily computed distinct values per feature for the current cell.
struct ValueCache {
    values: Vec<Option<Vec<f64>>>,
}

impl ValueCache {
    fn new(d: usize) -> Self {
        Self { values: vec![None; d] }
    }

    /// Uniform draw from the distinct in-cell values of `j` except the largest.
    fn draw(&mut self, data: &Dataset, rows: &[usize], j: usize, rng: &mut RngStream) -> Option<f64> {
        let vals = self.values[j].get_or_insert_with(|| data.unique_values(rows, j));
        if vals.len() < 2 {
            return None;
        }
        Some(vals[rng.gen_range(0..vals.len() - 1)])
    }
}

struct IntfSplitter {
    npairs: usize,
}

impl CellSplitter for IntfSplitter {
    fn propose(&mut self, data: &Dataset, rows: &[usize], rng: &mut RngStream) -> Option<(Plan, f64)> {
        let d = data.d();
        let y = data.response();
        let parent = CellStats::of(rows, data);
        let mut cache = ValueCache::new(d);
        let mut best: Option<(SplitRule, f64)> = None;

        for _ in 0..self.npairs {
            let j1 = rng.gen_range(0..d);
            let mut j2 = rng.gen_range(0..d - 1);
            if j2 >= j1 {
                j2 += 1;
            }
            let c1 = cache.draw(data, rows, j1, rng);
            let c2 = cache.draw(data, rows, j2, rng);
            let a1 = cache.draw(data, rows, j1, rng);
            let a2 = cache.draw(data, rows, j2, rng);
            let t = PairThresholds { a1, a2, c1, c2 };

            // quadrant index: 2 * (x1 high) + (x2 high)
            let mut quad = [CellStats::default(); 4];
            let mut s1 = CellStats::default();
            let mut s2 = CellStats::default();
            // NaN thresholds send everything right; those variants are skipped below
            let (qa1, qa2) = (a1.unwrap_or(f64::NAN), a2.unwrap_or(f64::NAN));
            let (qc1, qc2) = (c1.unwrap_or(f64::NAN), c2.unwrap_or(f64::NAN));
            let col1 = data.column(j1);
            let col2 = data.column(j2);
            for &i in rows {
                let (x1, x2, yi) = (col1[i], col2[i], y[i]);
                let q = 2 * usize::from(x1 > qa1) + usize::from(x2 > qa2);
                quad[q].add(yi);
                if x1 <= qc1 {
                    s1.add(yi);
                }
                if x2 <= qc2 {
                    s2.add(yi);
                }
            }
            for variant in IntfVariant::ALL {
                let Some(rule) = variant_rule(variant, j1, j2, &t) else {
                    continue;
                };
                let left = match variant {
                    IntfVariant::LowLow => quad[0],
                    IntfVariant::LowHigh => quad[1],
                    IntfVariant::HighLow => quad[2],
                    IntfVariant::HighHigh => quad[3],
                    IntfVariant::Checker => CellStats {
                        count: quad[0].count + quad[3].count,
                        sum: quad[0].sum + quad[3].sum,
                    },
                    IntfVariant::Single1 => s1,
                    IntfVariant::Single2 => s2,
                };
                let right = parent.minus(left);
                if left.count == 0.0 || right.count == 0.0 {
                    continue;
                }
                let score = score_from_stats(parent, &[left, right]);
                if best.is_none_or(|(_, b)| score > b) {
                    best = Some((rule, score));
                }
            }
        }
        best.map(|(rule, score)| (Plan::binary(rows, rule, data), score))
    }
}

pub fn grow_intf_tree(data: &Dataset, resample: IndexSet, cfg: &IntfConfig, rng: &mut RngStream) -> Tree {
    let mut splitter = IntfSplitter { npairs: cfg.npairs };
    grow_tree(data, resample, cfg.min_node_size, &mut splitter, rng)
}
