//! Random Split Random Forest trees.
//!
//! Each node runs a small competition: `width` Random-CART candidates, each a
//! random split (or `depth - 1` levels of them) followed by a Sample-CART split
//! of every resulting cell, plus optionally a CART-CART candidate. The
//! candidate partition with the largest impurity decrease is installed as a
//! subtree of axis splits and growth continues on its cells.

use rand::Rng;

use super::{draw_features, grow_tree, CellSplitter, Plan, MIN_RELATIVE_GAIN};
use crate::config::{MtryMode, RsrfConfig};
use crate::criteria::{best_cart_split, score_from_stats, CellStats, Partition};
use crate::data::{Dataset, IndexSet};
use crate::rng::RngStream;
use crate::rule::SplitRule;
use crate::tree::Tree;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepKind {
    RandomCart,
    CartCart,
}

/// One candidate partition of a cell.
#[derive(Debug, Clone, PartialEq)]
pub struct CandidateStep {
    pub kind: StepKind,
    pub plan: Plan,
    /// Impurity decrease over the cells of `plan`.
    pub score: f64,
}

impl CandidateStep {
    fn new(kind: StepKind, plan: Plan, data: &Dataset) -> Self {
        let cells = plan.cells();
        let parent = cells.iter().fold(CellStats::default(), |mut acc, c| {
            for &i in c.iter() {
                acc.add(data.response()[i]);
            }
            acc
        });
        let stats: Vec<CellStats> = cells.iter().map(|c| CellStats::of(c, data)).collect();
        let score = score_from_stats(parent, &stats);
        Self { kind, plan, score }
    }

    pub fn cells(&self) -> Partition {
        Partition::new(self.plan.cells().into_iter().map(<[usize]>::to_vec).collect())
    }
}

/// Random split of `cell`: the feature is uniform over `allowed` (all features
/// when `None`), the threshold uniform over the distinct in-cell values of
/// that feature except the largest. `None` if that value set is empty.
pub fn draw_random_split(
    cell: &[usize],
    data: &Dataset,
    rng: &mut RngStream,
    allowed: Option<&[usize]>,
) -> Option<(usize, f64)> {
    let j = match allowed {
        Some([]) => return None,
        Some(a) => a[rng.gen_range(0..a.len())],
        None => rng.gen_range(0..data.d()),
    };
    let values = data.unique_values(cell, j);
    if values.len() < 2 {
        return None;
    }
    Some((j, values[rng.gen_range(0..values.len() - 1)]))
}

/// Fixed-mode coordinate subsets, shared by every candidate of one node.
#[derive(Debug, Clone)]
struct NodeSubsets {
    first: Vec<usize>,
    left: Vec<usize>,
    right: Vec<usize>,
}

impl NodeSubsets {
    fn draw(rng: &mut RngStream, d: usize, cfg: &RsrfConfig) -> Self {
        let first = draw_features(rng, d, cfg.mtry_random.unwrap_or(d));
        let left = draw_features(rng, d, cfg.mtry_random_cart);
        let right = draw_features(rng, d, cfg.mtry_random_cart);
        Self { first, left, right }
    }
}

/// Sample-CART split of `cell` on `features`, or the cell itself when no
/// split improves it.
fn cart_or_whole(cell: Vec<usize>, features: &[usize], data: &Dataset) -> Plan {
    let Some(best) = best_cart_split(&cell, features, data, 1) else {
        return Plan::Cell(cell);
    };
    let stats = CellStats::of(&cell, data);
    let y = data.response();
    let variance = cell.iter().map(|&i| (y[i] - stats.mean()).powi(2)).sum::<f64>() / stats.count;
    if best.gain > MIN_RELATIVE_GAIN * variance {
        Plan::binary(&cell, SplitRule::axis(best.feature, best.threshold), data)
    } else {
        Plan::Cell(cell)
    }
}

fn split_plan(rule: SplitRule, rows: &[usize], data: &Dataset) -> (Vec<usize>, Vec<usize>) {
    crate::rule::partition_indices(rows, &rule, data)
}

/// Random levels below the root split, then CART on every end cell.
/// `side` selects the fixed-mode CART subset (left or right of the root split).
fn random_levels(
    cell: Vec<usize>,
    levels_left: usize,
    side: usize,
    data: &Dataset,
    rng: &mut RngStream,
    cfg: &RsrfConfig,
    subsets: Option<&NodeSubsets>,
) -> Plan {
    if levels_left > 0 {
        if let Some((j, c)) = draw_random_split(&cell, data, rng, subsets.map(|s| s.first.as_slice())) {
            let rule = SplitRule::axis(j, c);
            let (l, r) = split_plan(rule, &cell, data);
            return Plan::Split {
                rule,
                left: Box::new(random_levels(l, levels_left - 1, side, data, rng, cfg, subsets)),
                right: Box::new(random_levels(r, levels_left - 1, side, data, rng, cfg, subsets)),
            };
        }
    }
    match subsets {
        Some(s) => {
            let features = if side == 0 { &s.left } else { &s.right };
            cart_or_whole(cell, features, data)
        }
        None => {
            let features = draw_features(rng, data.d(), cfg.mtry_random_cart);
            cart_or_whole(cell, &features, data)
        }
    }
}

fn random_cart_with(
    cell: &[usize],
    data: &Dataset,
    rng: &mut RngStream,
    cfg: &RsrfConfig,
    subsets: Option<&NodeSubsets>,
) -> Option<CandidateStep> {
    let (j, c) = draw_random_split(cell, data, rng, subsets.map(|s| s.first.as_slice()))?;
    let rule = SplitRule::axis(j, c);
    let (l, r) = split_plan(rule, cell, data);
    let levels = cfg.depth.saturating_sub(2);
    let plan = Plan::Split {
        rule,
        left: Box::new(random_levels(l, levels, 0, data, rng, cfg, subsets)),
        right: Box::new(random_levels(r, levels, 1, data, rng, cfg, subsets)),
    };
    Some(CandidateStep::new(StepKind::RandomCart, plan, data))
}

fn cart_cart_with(
    cell: &[usize],
    data: &Dataset,
    rng: &mut RngStream,
    cfg: &RsrfConfig,
    subsets: Option<&NodeSubsets>,
) -> Option<CandidateStep> {
    let d = data.d();
    let first = match subsets {
        Some(s) => s.first.clone(),
        None => draw_features(rng, d, cfg.mtry_cart_cart.unwrap_or(d)),
    };
    let best = best_cart_split(cell, &first, data, 1)?;
    let rule = SplitRule::axis(best.feature, best.threshold);
    let (l, r) = split_plan(rule, cell, data);
    let (left, right) = match subsets {
        Some(s) => (cart_or_whole(l, &s.left, data), cart_or_whole(r, &s.right, data)),
        None => {
            let k = cfg.mtry_cart_cart.unwrap_or(d);
            let fl = draw_features(rng, d, k);
            let left = cart_or_whole(l, &fl, data);
            let fr = draw_features(rng, d, k);
            (left, cart_or_whole(r, &fr, data))
        }
    };
    let plan = Plan::Split {
        rule,
        left: Box::new(left),
        right: Box::new(right),
    };
    Some(CandidateStep::new(StepKind::CartCart, plan, data))
}

/// A single Random-CART candidate for `cell`. In fixed mode the coordinate
/// subsets are drawn for this call alone; inside tree growth they are shared
/// by all candidates of a node (see [`node_candidates`]).
pub fn random_cart_step(cell: &[usize], data: &Dataset, rng: &mut RngStream, cfg: &RsrfConfig) -> Option<CandidateStep> {
    let subsets = fixed_subsets(rng, data.d(), cfg);
    random_cart_with(cell, data, rng, cfg, subsets.as_ref())
}

/// A CART-CART candidate: Sample-CART on the cell, then on each daughter.
pub fn cart_cart_step(cell: &[usize], data: &Dataset, rng: &mut RngStream, cfg: &RsrfConfig) -> Option<CandidateStep> {
    let subsets = fixed_subsets(rng, data.d(), cfg);
    cart_cart_with(cell, data, rng, cfg, subsets.as_ref())
}

fn fixed_subsets(rng: &mut RngStream, d: usize, cfg: &RsrfConfig) -> Option<NodeSubsets> {
    (cfg.mtry_mode == MtryMode::Fixed).then(|| NodeSubsets::draw(rng, d, cfg))
}

/// Every candidate considered at one node, in index order: CART-CART first
/// when enabled, then the Random-CART candidates. Failed candidates are
/// dropped.
pub fn node_candidates(cell: &[usize], data: &Dataset, rng: &mut RngStream, cfg: &RsrfConfig) -> Vec<CandidateStep> {
    let subsets = fixed_subsets(rng, data.d(), cfg);
    let mut out = Vec::with_capacity(cfg.width + 1);
    if cfg.include_cartcart {
        out.extend(cart_cart_with(cell, data, rng, cfg, subsets.as_ref()));
    }
    for _ in 0..cfg.width {
        out.extend(random_cart_with(cell, data, rng, cfg, subsets.as_ref()));
    }
    out
}

/// Highest-scoring candidate; the lowest index wins ties.
pub fn best_candidate(candidates: Vec<CandidateStep>) -> Option<CandidateStep> {
    let mut best: Option<CandidateStep> = None;
    for c in candidates {
        if best.as_ref().is_none_or(|b| c.score > b.score) {
            best = Some(c);
        }
    }
    best
}

struct RsrfSplitter<'a> {
    cfg: &'a RsrfConfig,
}

impl CellSplitter for RsrfSplitter<'_> {
    fn propose(&mut self, data: &Dataset, rows: &[usize], rng: &mut RngStream) -> Option<(Plan, f64)> {
        let best = best_candidate(node_candidates(rows, data, rng, self.cfg))?;
        Some((best.plan, best.score))
    }
}

pub fn grow_rsrf_tree(data: &Dataset, resample: IndexSet, cfg: &RsrfConfig, rng: &mut RngStream) -> Tree {
    let mut splitter = RsrfSplitter { cfg };
    grow_tree(data, resample, cfg.min_node_size, &mut splitter, rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::criteria::impurity_decrease;
    use crate::growers::test_support::check_tree;
    use crate::tree::TreeNode;

    fn line() -> Dataset {
        Dataset::from_columns(vec![vec![1.0, 2.0, 3.0, 4.0]], vec![0.0, 0.0, 2.0, 2.0]).unwrap()
    }

    fn synthetic(n: usize, d: usize, seed: u64) -> Dataset {
        let mut rng = RngStream::new(seed, 99);
        let cols: Vec<Vec<f64>> = (0..d).map(|_| (0..n).map(|_| rng.gen::<f64>()).collect()).collect();
        let y = (0..n)
            .map(|i| 4.0 * (cols[0][i] - 0.5) * (cols[1 % d][i] - 0.5) + rng.gen::<f64>() * 0.1)
            .collect();
        Dataset::from_columns(cols, y).unwrap()
    }

    #[test]
    fn random_split_threshold_is_uniform_over_values_but_max() {
        let data = line();
        let mut rng = RngStream::new(11, 0);
        let mut counts = [0usize; 3];
        let draws = 10_000;
        for _ in 0..draws {
            let (j, c) = draw_random_split(&[0, 1, 2, 3], &data, &mut rng, None).unwrap();
            assert_eq!(j, 0);
            counts[c as usize - 1] += 1;
        }
        for c in counts {
            assert!((c as f64 / draws as f64 - 1.0 / 3.0).abs() < 0.02, "{counts:?}");
        }
    }

    #[test]
    fn random_split_degenerate_cases() {
        let constant = Dataset::from_columns(vec![vec![2.0; 3]], vec![0.0, 1.0, 2.0]).unwrap();
        assert_eq!(draw_random_split(&[0, 1, 2], &constant, &mut RngStream::new(0, 0), None), None);
        let data = synthetic(10, 3, 1);
        let mut rng = RngStream::new(0, 0);
        for _ in 0..50 {
            let (j, _) = draw_random_split(&(0..10).collect::<Vec<_>>(), &data, &mut rng, Some(&[1])).unwrap();
            assert_eq!(j, 1);
        }
    }

    #[test]
    fn random_cart_hand_trace() {
        // random split at c = 1 leaves {0} whole and CART-splits {1,2,3} at 2
        let data = line();
        let cfg = RsrfConfig::new(1, 1);
        let mut found = false;
        for seed in 0..50 {
            let step = random_cart_step(&[0, 1, 2, 3], &data, &mut RngStream::new(seed, 0), &cfg).unwrap();
            let rules = step.plan.rules();
            if rules[0] == SplitRule::axis(0, 1.0) {
                assert_eq!(step.cells().cells, vec![vec![0], vec![1], vec![2, 3]]);
                assert_eq!(rules[1], SplitRule::axis(0, 2.0));
                found = true;
            }
        }
        assert!(found);
    }

    #[test]
    fn cart_cart_on_line() {
        let data = line();
        let cfg = RsrfConfig {
            include_cartcart: true,
            ..RsrfConfig::new(1, 1)
        };
        let step = cart_cart_step(&[0, 1, 2, 3], &data, &mut RngStream::new(0, 0), &cfg).unwrap();
        assert_eq!(step.kind, StepKind::CartCart);
        assert_eq!(step.cells().cells, vec![vec![0, 1], vec![2, 3]]);
        assert_eq!(step.score, 1.0);
    }

    #[test]
    fn scores_match_impurity_decrease_and_argmax_is_installed() {
        let data = synthetic(40, 3, 2);
        let cell: Vec<usize> = (0..40).collect();
        let cfg = RsrfConfig {
            include_cartcart: true,
            ..RsrfConfig::new(7, 2)
        };
        for seed in 0..10 {
            let cands = node_candidates(&cell, &data, &mut RngStream::new(seed, 0), &cfg);
            assert_eq!(cands.len(), 8);
            assert_eq!(cands[0].kind, StepKind::CartCart);
            for c in &cands {
                let s = impurity_decrease(&cell, &c.cells(), &data).unwrap();
                assert!((s - c.score).abs() < 1e-12);
                c.cells().check(&cell).unwrap();
            }
            let best = best_candidate(cands.clone()).unwrap();
            assert!(cands.iter().all(|c| c.score <= best.score));
            let first = cands.iter().position(|c| c.score == best.score).unwrap();
            assert_eq!(cands[first], best);
        }
    }

    #[test]
    fn installed_subtree_reproduces_candidate_cells() {
        let data = synthetic(60, 3, 3);
        let cfg = RsrfConfig {
            min_node_size: 1000,
            ..RsrfConfig::new(5, 2)
        };
        // min_node_size > n keeps the root a leaf; grow one level by hand instead
        let cell: Vec<usize> = (0..60).collect();
        let best = best_candidate(node_candidates(&cell, &data, &mut RngStream::new(4, 0), &cfg)).unwrap();
        fn route<'a>(plan: &'a Plan, data: &Dataset, i: usize) -> &'a [usize] {
            match plan {
                Plan::Cell(rows) => rows,
                Plan::Split { rule, left, right } => {
                    route(if rule.goes_left_row(data, i) { left } else { right }, data, i)
                }
            }
        }
        for c in best.cells().cells {
            for &i in &c {
                assert_eq!(route(&best.plan, &data, i), c.as_slice());
            }
        }
        let tree = grow_rsrf_tree(&data, IndexSet::all(60), &cfg, &mut RngStream::new(4, 0));
        assert_eq!(tree.n_leaves(), 1);
    }

    #[test]
    fn fixed_mode_shares_subsets_across_candidates() {
        // With one allowed first-split feature every candidate splits on it.
        let data = synthetic(50, 5, 5);
        let cell: Vec<usize> = (0..50).collect();
        let cfg = RsrfConfig {
            mtry_mode: MtryMode::Fixed,
            mtry_random: Some(1),
            ..RsrfConfig::new(20, 1)
        };
        for seed in 0..20 {
            let cands = node_candidates(&cell, &data, &mut RngStream::new(seed, 0), &cfg);
            let roots: Vec<usize> = cands.iter().map(|c| c.plan.rules()[0].max_feature()).collect();
            assert!(roots.iter().all(|&j| j == roots[0]), "{roots:?}");
            // left-side CART splits all use the same single coordinate, and so do right-side ones
            let side = |c: &CandidateStep, left: bool| -> Option<usize> {
                let Plan::Split { left: l, right: r, .. } = &c.plan else { unreachable!() };
                let p = if left { l } else { r };
                p.rules().first().map(|r| r.max_feature())
            };
            for left in [true, false] {
                let feats: Vec<usize> = cands.iter().filter_map(|c| side(c, left)).collect();
                assert!(feats.windows(2).all(|w| w[0] == w[1]), "{feats:?}");
            }
        }
        // not-fixed mode varies the root coordinate across candidates
        let cfg = RsrfConfig::new(20, 1);
        let cands = node_candidates(&cell, &data, &mut RngStream::new(0, 0), &cfg);
        let roots: std::collections::BTreeSet<usize> = cands.iter().map(|c| c.plan.rules()[0].max_feature()).collect();
        assert!(roots.len() > 1);
    }

    #[test]
    fn depth_three_gives_at_most_eight_cells() {
        let data = synthetic(80, 3, 6);
        let cell: Vec<usize> = (0..80).collect();
        let cfg = RsrfConfig {
            depth: 3,
            ..RsrfConfig::new(1, 3)
        };
        let mut saw_eight = false;
        for seed in 0..20 {
            let step = random_cart_step(&cell, &data, &mut RngStream::new(seed, 0), &cfg).unwrap();
            let n = step.cells().len();
            assert!(n <= 8);
            saw_eight |= n == 8;
        }
        assert!(saw_eight);
    }

    #[test]
    fn refining_random_split_never_lowers_score() {
        let data = synthetic(30, 2, 7);
        let cell: Vec<usize> = (0..30).collect();
        let cfg = RsrfConfig::new(1, 2);
        for seed in 0..30 {
            let step = random_cart_step(&cell, &data, &mut RngStream::new(seed, 0), &cfg).unwrap();
            let root = step.plan.rules()[0];
            let (l, r) = crate::rule::partition_indices(&cell, &root, &data);
            let coarse = impurity_decrease(&cell, &Partition::new(vec![l, r]), &data).unwrap();
            assert!(step.score >= coarse - 1e-12);
        }
    }

    #[test]
    fn trees_are_consistent() {
        let data = synthetic(100, 4, 8);
        for (mode, cc) in [(MtryMode::NotFixed, false), (MtryMode::NotFixed, true), (MtryMode::Fixed, true)] {
            let cfg = RsrfConfig {
                mtry_mode: mode,
                include_cartcart: cc,
                mtry_random: (mode == MtryMode::Fixed).then_some(2),
                min_node_size: 3,
                ..RsrfConfig::new(4, 2)
            };
            let tree = grow_rsrf_tree(&data, IndexSet::all(100), &cfg, &mut RngStream::new(1, 0));
            check_tree(&tree, &data);
            assert!(tree.n_leaves() > 4);
            assert!(matches!(tree.nodes()[0], TreeNode::Split { .. }));
        }
    }

    #[test]
    fn min_node_size_above_n_gives_leaf() {
        let data = line();
        let cfg = RsrfConfig {
            min_node_size: 5,
            ..RsrfConfig::new(3, 1)
        };
        let tree = grow_rsrf_tree(&data, IndexSet::all(4), &cfg, &mut RngStream::new(0, 0));
        assert_eq!(tree.nodes(), &[TreeNode::Leaf { mean: 1.0, count: 4 }]);
    }
}
