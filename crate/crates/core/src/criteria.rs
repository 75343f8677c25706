//! Impurity scores and the Sample-CART split search.
//!
//! For a parent cell `t` split into cells `t_1..t_L`:
//!
//! * `S(t; P) = sum_l (#t_l / #t) (mean(t) - mean(t_l))^2` is the impurity decrease,
//! * `V = sum_l sum_{i in t_l} (y_i - mean(t_l))^2` is the within-cell squared error,
//! * `M = sum_l (sum_{i in t_l} y_i)^2 / #t_l`.
//!
//! `V + M = sum y_i^2` and `#t * S = M - #t * mean(t)^2`, so maximizing `S`,
//! maximizing `M` and minimizing `V` select the same partition.

use crate::data::Dataset;
use crate::error::{Error, Result};

/// Relative tolerance used when comparing split scores. A candidate replaces
/// the incumbent only if it improves by more than this fraction of the
/// parent's sum of squares, so near-ties resolve to the earlier candidate.
pub const TIE_TOLERANCE: f64 = 1e-11;

/// Count and response sum of a cell.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct CellStats {
    pub count: f64,
    pub sum: f64,
}

impl CellStats {
    pub fn of(cell: &[usize], data: &Dataset) -> Self {
        let y = data.response();
        Self {
            count: cell.len() as f64,
            sum: cell.iter().map(|&i| y[i]).sum(),
        }
    }

    #[inline]
    pub fn add(&mut self, y: f64) {
        self.count += 1.0;
        self.sum += y;
    }

    #[inline]
    pub fn minus(self, other: CellStats) -> CellStats {
        CellStats {
            count: self.count - other.count,
            sum: self.sum - other.sum,
        }
    }

    #[inline]
    pub fn mean(self) -> f64 {
        self.sum / self.count
    }
}

/// Impurity decrease from per-cell statistics. Empty cells contribute nothing.
#[inline]
pub fn score_from_stats(parent: CellStats, cells: &[CellStats]) -> f64 {
    let mu = parent.mean();
    cells
        .iter()
        .filter(|c| c.count > 0.0)
        .map(|c| {
            let diff = c.mean() - mu;
            c.count / parent.count * diff * diff
        })
        .sum()
}

/// A set of disjoint cells covering a parent cell.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    pub cells: Vec<Vec<usize>>,
}

impl Partition {
    pub fn new(cells: Vec<Vec<usize>>) -> Self {
        Self { cells }
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    /// Check the cells are nonempty and together equal `parent` as a multiset.
    pub fn check(&self, parent: &[usize]) -> Result<()> {
        if self.cells.is_empty() {
            return Err(Error::NotAPartition("no cells".into()));
        }
        if self.cells.iter().any(Vec::is_empty) {
            return Err(Error::EmptyCell);
        }
        let mut union: Vec<usize> = self.cells.iter().flatten().copied().collect();
        let mut whole = parent.to_vec();
        union.sort_unstable();
        whole.sort_unstable();
        if union != whole {
            return Err(Error::NotAPartition(
                "union of cells differs from the parent".into(),
            ));
        }
        Ok(())
    }
}

/// Mean response of a cell.
pub fn cell_mean(cell: &[usize], data: &Dataset) -> Result<f64> {
    if cell.is_empty() {
        return Err(Error::EmptyCell);
    }
    Ok(CellStats::of(cell, data).mean())
}

/// `S(t; P)` for an arbitrary partition of `parent`.
pub fn impurity_decrease(parent: &[usize], partition: &Partition, data: &Dataset) -> Result<f64> {
    partition.check(parent)?;
    let mu = cell_mean(parent, data)?;
    let total = parent.len() as f64;
    let mut s = 0.0;
    for cell in &partition.cells {
        let diff = cell_mean(cell, data)? - mu;
        s += cell.len() as f64 / total * diff * diff;
    }
    Ok(s)
}

/// `M(t; P)`.
pub fn mean_square_criterion(parent: &[usize], partition: &Partition, data: &Dataset) -> Result<f64> {
    partition.check(parent)?;
    let y = data.response();
    Ok(partition
        .cells
        .iter()
        .map(|cell| {
            let s: f64 = cell.iter().map(|&i| y[i]).sum();
            s * s / cell.len() as f64
        })
        .sum())
}

/// `V(t; P)`: total within-cell squared error.
pub fn within_cell_sse(parent: &[usize], partition: &Partition, data: &Dataset) -> Result<f64> {
    partition.check(parent)?;
    partition.cells.iter().map(|cell| sse(cell, data)).sum()
}

fn sse(cell: &[usize], data: &Dataset) -> Result<f64> {
    let mu = cell_mean(cell, data)?;
    let y = data.response();
    Ok(cell.iter().map(|&i| (y[i] - mu) * (y[i] - mu)).sum())
}

/// `V(j, s)` for the axis split `x_j <= s` of `parent`.
pub fn variance_criterion(parent: &[usize], feature: usize, threshold: f64, data: &Dataset) -> Result<f64> {
    let (left, right): (Vec<usize>, Vec<usize>) =
        parent.iter().partition(|&&i| data.x(i, feature) <= threshold);
    if left.is_empty() || right.is_empty() {
        return Err(Error::DegenerateSplit);
    }
    Ok(sse(&left, data)? + sse(&right, data)?)
}

/// The winning axis split of a cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitCandidate {
    pub feature: usize,
    pub threshold: f64,
    /// `V(j, s)`.
    pub v_score: f64,
    /// Impurity decrease `S` of the two-cell split.
    pub gain: f64,
}

/// Sample-CART split of `parent` restricted to the features in `allowed`.
///
/// Candidate thresholds are the distinct feature values in the cell except the
/// largest, with the rule `x_j <= s`; both children need at least `min_child`
/// rows. Returns the `V`-minimizer, ties broken by the smaller feature index and
/// then by the smaller threshold, or `None` if no candidate exists.
pub fn best_cart_split(
    parent: &[usize],
    allowed: &[usize],
    data: &Dataset,
    min_child: usize,
) -> Option<SplitCandidate> {
    let n = parent.len();
    let min_child = min_child.max(1);
    if n < 2 * min_child {
        return None;
    }
    let y = data.response();
    let mean = parent.iter().map(|&i| y[i]).sum::<f64>() / n as f64;
    let total_sse: f64 = parent.iter().map(|&i| (y[i] - mean) * (y[i] - mean)).sum();
    let tol = TIE_TOLERANCE * total_sse;

    let mut features = allowed.to_vec();
    features.sort_unstable();
    features.dedup();

    let mut best: Option<(usize, f64, f64)> = None;
    let mut centered = Vec::with_capacity(n);
    for j in features {
        let sorted = data.sort_cell(parent, j);
        let col = data.column(j);
        centered.clear();
        centered.extend(sorted.iter().map(|&i| y[i] - mean));
        let total: f64 = centered.iter().sum();
        let mut left_sum = 0.0;
        for k in 0..n - 1 {
            left_sum += centered[k];
            let n_left = k + 1;
            let n_right = n - n_left;
            if n_left < min_child {
                continue;
            }
            if n_right < min_child {
                break;
            }
            let here = col[sorted[k]];
            if here >= col[sorted[k + 1]] {
                continue;
            }
            let right_sum = total - left_sum;
            let explained = left_sum * left_sum / n_left as f64 + right_sum * right_sum / n_right as f64;
            let v = total_sse - explained;
            match best {
                Some((_, _, bv)) if v >= bv - tol => {}
                _ => best = Some((j, here, v)),
            }
        }
    }
    best.map(|(feature, threshold, v)| SplitCandidate {
        feature,
        threshold,
        v_score: v.max(0.0),
        gain: ((total_sse - v) / n as f64).max(0.0),
    })
}

/// Indices of the best candidate under each of the three equivalent criteria.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CriterionChoice {
    pub by_score: usize,
    pub by_mean_square: usize,
    pub by_sse: usize,
}

/// Exhaustively score every candidate two-cell partition under `S`, `M` and `V`.
///
/// Each criterion keeps the first candidate unless a later one improves by more
/// than a tolerance proportional to `1 + sum y^2`. Used as a test oracle.
pub fn max_partition_score_oracle(
    parent: &[usize],
    candidates: &[Partition],
    data: &Dataset,
) -> Result<CriterionChoice> {
    if candidates.is_empty() {
        return Err(Error::NotAPartition("no candidate partitions".into()));
    }
    let y = data.response();
    let sum_sq: f64 = parent.iter().map(|&i| y[i] * y[i]).sum();
    let delta = 1e-9 * (1.0 + sum_sq);
    let t = parent.len() as f64;
    let mut s = Vec::with_capacity(candidates.len());
    let mut m = Vec::with_capacity(candidates.len());
    let mut v = Vec::with_capacity(candidates.len());
    for p in candidates {
        s.push(impurity_decrease(parent, p, data)?);
        m.push(mean_square_criterion(parent, p, data)?);
        v.push(within_cell_sse(parent, p, data)?);
    }
    let argbest = |values: &[f64], sign: f64, tol: f64| {
        let mut best = 0;
        for k in 1..values.len() {
            if sign * values[k] > sign * values[best] + tol {
                best = k;
            }
        }
        best
    };
    Ok(CriterionChoice {
        by_score: argbest(&s, 1.0, delta / t),
        by_mean_square: argbest(&m, 1.0, delta),
        by_sse: argbest(&v, -1.0, delta),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn line() -> Dataset {
        Dataset::from_columns(vec![vec![1.0, 2.0, 3.0, 4.0]], vec![0.0, 0.0, 2.0, 2.0]).unwrap()
    }

    #[test]
    fn means() {
        let data = line();
        assert_eq!(cell_mean(&[0, 1, 2, 3], &data).unwrap(), 1.0);
        assert_eq!(cell_mean(&[2], &data).unwrap(), 2.0);
        assert!(matches!(cell_mean(&[], &data), Err(Error::EmptyCell)));
        let d3 = Dataset::from_columns(vec![vec![0.0; 3]], vec![1.0, 2.0, 4.0]).unwrap();
        assert_eq!(cell_mean(&[0, 2], &d3).unwrap(), 2.5);
    }

    #[test]
    fn impurity_decrease_examples() {
        let data = line();
        let all = [0, 1, 2, 3];
        let p = Partition::new(vec![vec![0, 1], vec![2, 3]]);
        assert_eq!(impurity_decrease(&all, &p, &data).unwrap(), 1.0);
        let whole = Partition::new(vec![all.to_vec()]);
        assert_eq!(impurity_decrease(&all, &whole, &data).unwrap(), 0.0);
        let flat = Dataset::from_columns(vec![vec![1.0, 2.0, 3.0, 4.0]], vec![5.0; 4]).unwrap();
        let p3 = Partition::new(vec![vec![0], vec![1, 3], vec![2]]);
        assert_eq!(impurity_decrease(&all, &p3, &flat).unwrap(), 0.0);
    }

    #[test]
    fn impurity_decrease_rejects_bad_partitions() {
        let data = line();
        let all = [0, 1, 2, 3];
        let with_empty = Partition::new(vec![vec![0, 1, 2, 3], vec![]]);
        assert!(matches!(impurity_decrease(&all, &with_empty, &data), Err(Error::EmptyCell)));
        let overlap = Partition::new(vec![vec![0, 1], vec![1, 2, 3]]);
        assert!(matches!(impurity_decrease(&all, &overlap, &data), Err(Error::NotAPartition(_))));
        let missing = Partition::new(vec![vec![0, 1], vec![2]]);
        assert!(impurity_decrease(&all, &missing, &data).is_err());
    }

    #[test]
    fn variance_criterion_examples() {
        let data = line();
        let all = [0, 1, 2, 3];
        assert_eq!(variance_criterion(&all, 0, 2.0, &data).unwrap(), 0.0);
        assert_relative_eq!(variance_criterion(&all, 0, 1.0, &data).unwrap(), 8.0 / 3.0, epsilon = 1e-12);
        assert!(matches!(variance_criterion(&all, 0, 4.0, &data), Err(Error::DegenerateSplit)));
        let flat = Dataset::from_columns(vec![vec![1.0, 2.0, 3.0, 4.0]], vec![5.0; 4]).unwrap();
        for s in [1.0, 2.0, 3.0] {
            assert_eq!(variance_criterion(&all, 0, s, &flat).unwrap(), 0.0);
        }
    }

    #[test]
    fn cart_split_examples() {
        let data = line();
        let c = best_cart_split(&[0, 1, 2, 3], &[0], &data, 1).unwrap();
        assert_eq!((c.feature, c.threshold), (0, 2.0));
        assert!(c.v_score.abs() < 1e-12);
        assert!((c.gain - 1.0).abs() < 1e-12);

        let tied = Dataset::from_columns(vec![vec![1.0; 4], vec![2.0; 4]], vec![0.0, 1.0, 2.0, 3.0]).unwrap();
        assert!(best_cart_split(&[0, 1, 2, 3], &[0, 1], &tied, 1).is_none());
        assert!(best_cart_split(&[0], &[0], &data, 1).is_none());
    }

    #[test]
    fn cart_respects_min_child() {
        let data = line();
        let c = best_cart_split(&[0, 1, 2, 3], &[0], &data, 2).unwrap();
        assert_eq!(c.threshold, 2.0);
        assert!(best_cart_split(&[0, 1, 2, 3], &[0], &data, 3).is_none());
    }

    #[test]
    fn cart_tie_prefers_first_feature_then_smaller_threshold() {
        // feature 1 duplicates feature 0; y symmetric so s=1 and s=3 tie on feature 0
        let x = vec![1.0, 2.0, 3.0, 4.0];
        let data = Dataset::from_columns(vec![x.clone(), x], vec![0.0, 1.0, 1.0, 0.0]).unwrap();
        let c = best_cart_split(&[0, 1, 2, 3], &[1, 0], &data, 1).unwrap();
        assert_eq!((c.feature, c.threshold), (0, 1.0));
    }

    #[test]
    fn oracle_on_line() {
        let data = line();
        let all = [0, 1, 2, 3];
        let candidates: Vec<Partition> = [1.0, 2.0, 3.0]
            .iter()
            .map(|&s| {
                let (l, r): (Vec<usize>, Vec<usize>) = all.iter().partition(|&&i| data.x(i, 0) <= s);
                Partition::new(vec![l, r])
            })
            .collect();
        let choice = max_partition_score_oracle(&all, &candidates, &data).unwrap();
        assert_eq!(choice, CriterionChoice { by_score: 1, by_mean_square: 1, by_sse: 1 });

        let flat = Dataset::from_columns(vec![vec![1.0, 2.0, 3.0, 4.0]], vec![3.0; 4]).unwrap();
        let choice = max_partition_score_oracle(&all, &candidates, &flat).unwrap();
        assert_eq!(choice, CriterionChoice { by_score: 0, by_mean_square: 0, by_sse: 0 });
    }

    #[test]
    fn stats_score_matches_definition() {
        let data = line();
        let all = [0, 1, 2, 3];
        let parent = CellStats::of(&all, &data);
        let cells = [CellStats::of(&[0], &data), CellStats::of(&[1, 2, 3], &data)];
        let p = Partition::new(vec![vec![0], vec![1, 2, 3]]);
        assert_relative_eq!(
            score_from_stats(parent, &cells),
            impurity_decrease(&all, &p, &data).unwrap(),
            epsilon = 1e-14
        );
    }
}
