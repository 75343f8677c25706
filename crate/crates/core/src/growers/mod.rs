//! Tree growers and the greedy growth loop they share.
//!
//! Every grower works the same way: take a cell, propose a partition of it
//! (a small subtree of split rules whose leaves are new cells), and recurse on
//! the new cells until they are too small or no worthwhile partition exists.

use rand::seq::index;

use crate::criteria::CellStats;
use crate::data::{Dataset, IndexSet};
use crate::rng::RngStream;
use crate::rule::{partition_indices, SplitRule};
use crate::tree::{Tree, TreeNode};

pub mod et;
pub mod intf;
pub mod rf;
pub mod rsrf;

pub use et::grow_et_tree;
pub use intf::{grow_intf_tree, seven_partitions};
pub use rf::grow_rf_tree;
pub use rsrf::{cart_cart_step, draw_random_split, grow_rsrf_tree, random_cart_step, CandidateStep, StepKind};

/// Candidates whose impurity decrease is at most this fraction of the cell
/// variance are treated as no improvement and the cell becomes a leaf.
pub(crate) const MIN_RELATIVE_GAIN: f64 = 1e-12;

/// A proposed partition of one cell, as a subtree whose leaves are cells.
#[derive(Debug, Clone, PartialEq)]
pub enum Plan {
    Cell(Vec<usize>),
    Split {
        rule: SplitRule,
        left: Box<Plan>,
        right: Box<Plan>,
    },
}

impl Plan {
    /// Split `rows` by `rule` into a one-level plan.
    pub fn binary(rows: &[usize], rule: SplitRule, data: &Dataset) -> Plan {
        let (left, right) = partition_indices(rows, &rule, data);
        Plan::Split {
            rule,
            left: Box::new(Plan::Cell(left)),
            right: Box::new(Plan::Cell(right)),
        }
    }

    /// Leaf cells, left to right.
    pub fn cells(&self) -> Vec<&[usize]> {
        let mut out = Vec::new();
        self.collect_cells(&mut out);
        out
    }

    fn collect_cells<'a>(&'a self, out: &mut Vec<&'a [usize]>) {
        match self {
            Plan::Cell(rows) => out.push(rows),
            Plan::Split { left, right, .. } => {
                left.collect_cells(out);
                right.collect_cells(out);
            }
        }
    }

    pub fn rules(&self) -> Vec<SplitRule> {
        let mut out = Vec::new();
        fn go(p: &Plan, out: &mut Vec<SplitRule>) {
            if let Plan::Split { rule, left, right } = p {
                out.push(*rule);
                go(left, out);
                go(right, out);
            }
        }
        go(self, &mut out);
        out
    }
}

/// Chooses a partition for one cell.
pub(crate) trait CellSplitter {
    /// Return the best partition found and its impurity decrease.
    fn propose(&mut self, data: &Dataset, rows: &[usize], rng: &mut RngStream) -> Option<(Plan, f64)>;
}

pub(crate) fn grow_tree(
    data: &Dataset,
    resample: IndexSet,
    min_node_size: usize,
    splitter: &mut impl CellSplitter,
    rng: &mut RngStream,
) -> Tree {
    let y = data.response();
    let mut nodes = vec![TreeNode::Leaf { mean: 0.0, count: 0 }];
    let mut stack: Vec<(usize, Vec<usize>)> = vec![(0, resample.rows().to_vec())];
    let mut pending = Vec::new();

    while let Some((id, rows)) = stack.pop() {
        debug_assert!(!rows.is_empty());
        let stats = CellStats::of(&rows, data);
        let mean = stats.mean();
        let mut plan = None;
        if rows.len() >= min_node_size && rows.len() >= 2 {
            let variance = rows.iter().map(|&i| (y[i] - mean) * (y[i] - mean)).sum::<f64>() / stats.count;
            if variance > 0.0 {
                if let Some((p, gain)) = splitter.propose(data, &rows, rng) {
                    if gain > MIN_RELATIVE_GAIN * variance {
                        plan = Some(p);
                    }
                }
            }
        }
        match plan {
            None => {
                nodes[id] = TreeNode::Leaf {
                    mean,
                    count: rows.len(),
                }
            }
            Some(plan) => {
                pending.clear();
                install(plan, id, &mut nodes, &mut pending);
                stack.extend(pending.drain(..).rev());
            }
        }
    }
    Tree::from_parts(nodes, resample)
}

fn install(plan: Plan, id: usize, nodes: &mut Vec<TreeNode>, pending: &mut Vec<(usize, Vec<usize>)>) {
    match plan {
        Plan::Cell(rows) => {
            debug_assert!(!rows.is_empty(), "plans never contain empty cells");
            pending.push((id, rows));
        }
        Plan::Split { rule, left, right } => {
            let l = nodes.len();
            let r = l + 1;
            nodes.push(TreeNode::Leaf { mean: 0.0, count: 0 });
            nodes.push(TreeNode::Leaf { mean: 0.0, count: 0 });
            nodes[id] = TreeNode::Split { rule, left: l, right: r };
            install(*left, l, nodes, pending);
            install(*right, r, nodes, pending);
        }
    }
}

/// `k` distinct features drawn uniformly from `0..d`, ascending.
pub(crate) fn draw_features(rng: &mut RngStream, d: usize, k: usize) -> Vec<usize> {
    let mut v = index::sample(rng, d, k.min(d)).into_vec();
    v.sort_unstable();
    v
}
