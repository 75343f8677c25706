//! Column-major training data and row index sets.

use std::cmp::Ordering;

use crate::error::{Error, Result};

/// Feature matrix plus response, stored column-major with a precomputed
/// ascending sort permutation per column.
///
/// A `Dataset` is immutable once built and is shared read-only by every tree
/// fit from it.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    columns: Vec<Vec<f64>>,
    response: Vec<f64>,
    sort_index: Vec<Vec<u32>>,
    feature_names: Vec<String>,
}

impl Dataset {
    pub fn from_columns(columns: Vec<Vec<f64>>, response: Vec<f64>) -> Result<Self> {
        let n = response.len();
        if n == 0 {
            return Err(Error::InvalidDataset("no rows".into()));
        }
        if columns.is_empty() {
            return Err(Error::InvalidDataset("no feature columns".into()));
        }
        for (j, col) in columns.iter().enumerate() {
            if col.len() != n {
                return Err(Error::InvalidDataset(format!(
                    "column {j} has {} rows, response has {n}",
                    col.len()
                )));
            }
            if let Some(i) = col.iter().position(|v| !v.is_finite()) {
                return Err(Error::InvalidDataset(format!(
                    "non-finite feature at row {i}, column {j}"
                )));
            }
        }
        if let Some(i) = response.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidDataset(format!("non-finite response at row {i}")));
        }
        let sort_index = columns
            .iter()
            .map(|col| {
                let mut idx: Vec<u32> = (0..n as u32).collect();
                idx.sort_by(|&a, &b| cmp_value_then_row(col, a as usize, b as usize));
                idx
            })
            .collect();
        let feature_names = (0..columns.len()).map(|j| format!("x{}", j + 1)).collect();
        Ok(Self {
            columns,
            response,
            sort_index,
            feature_names,
        })
    }

    /// Build from row-major feature vectors.
    pub fn from_rows(rows: &[Vec<f64>], response: Vec<f64>) -> Result<Self> {
        let d = rows.first().map_or(0, Vec::len);
        if rows.len() != response.len() {
            return Err(Error::InvalidDataset(format!(
                "{} feature rows but {} responses",
                rows.len(),
                response.len()
            )));
        }
        if let Some(i) = rows.iter().position(|r| r.len() != d) {
            return Err(Error::InvalidDataset(format!("row {i} has a different length")));
        }
        let columns = (0..d).map(|j| rows.iter().map(|r| r[j]).collect()).collect();
        Self::from_columns(columns, response)
    }

    pub fn with_feature_names(mut self, names: Vec<String>) -> Result<Self> {
        if names.len() != self.d() {
            return Err(Error::DimensionMismatch {
                expected: self.d(),
                got: names.len(),
            });
        }
        self.feature_names = names;
        Ok(self)
    }

    pub fn n(&self) -> usize {
        self.response.len()
    }

    pub fn d(&self) -> usize {
        self.columns.len()
    }

    pub fn column(&self, j: usize) -> &[f64] {
        &self.columns[j]
    }

    pub fn columns(&self) -> &[Vec<f64>] {
        &self.columns
    }

    pub fn response(&self) -> &[f64] {
        &self.response
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    /// Row indices sorted ascending by column `j` (ties by row index).
    pub fn column_sort_index(&self, j: usize) -> &[u32] {
        &self.sort_index[j]
    }

    #[inline]
    pub fn x(&self, i: usize, j: usize) -> f64 {
        self.columns[j][i]
    }

    pub fn row(&self, i: usize) -> Vec<f64> {
        self.columns.iter().map(|c| c[i]).collect()
    }

    /// Copy the given rows (with repetition) into a new dataset.
    pub fn subset(&self, rows: &[usize]) -> Result<Self> {
        let columns = self
            .columns
            .iter()
            .map(|c| rows.iter().map(|&i| c[i]).collect())
            .collect();
        let response = rows.iter().map(|&i| self.response[i]).collect();
        Self::from_columns(columns, response)?.with_feature_names(self.feature_names.clone())
    }

    /// Append extra feature columns.
    pub fn with_extra_columns(&self, extra: Vec<Vec<f64>>, names: Vec<String>) -> Result<Self> {
        let mut columns = self.columns.clone();
        columns.extend(extra);
        let mut all_names = self.feature_names.clone();
        all_names.extend(names);
        Self::from_columns(columns, self.response.clone())?.with_feature_names(all_names)
    }

    /// Cell rows ordered ascending by feature `j`, ties by row index.
    ///
    /// Large cells are read off the precomputed column permutation filtered by
    /// membership (with multiplicity); small cells are sorted directly. Both
    /// paths yield the same order.
    pub fn sort_cell(&self, rows: &[usize], j: usize) -> Vec<usize> {
        let n = self.n();
        if rows.len().saturating_mul(8) >= n {
            let mut counts = vec![0u32; n];
            for &r in rows {
                counts[r] += 1;
            }
            let mut out = Vec::with_capacity(rows.len());
            for &i in &self.sort_index[j] {
                for _ in 0..counts[i as usize] {
                    out.push(i as usize);
                }
            }
            out
        } else {
            let col = &self.columns[j];
            let mut out = rows.to_vec();
            out.sort_by(|&a, &b| cmp_value_then_row(col, a, b));
            out
        }
    }

    /// Distinct values of feature `j` within the cell, ascending.
    pub fn unique_values(&self, rows: &[usize], j: usize) -> Vec<f64> {
        let col = &self.columns[j];
        let mut vals: Vec<f64> = rows.iter().map(|&i| col[i]).collect();
        vals.sort_by(f64::total_cmp);
        vals.dedup();
        vals
    }
}

fn cmp_value_then_row(col: &[f64], a: usize, b: usize) -> Ordering {
    col[a].total_cmp(&col[b]).then(a.cmp(&b))
}

/// Ordered row indices into a [`Dataset`].
///
/// Sets that describe a bootstrap resample may repeat rows; every other use
/// holds distinct rows.
#[derive(Debug, Clone, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(transparent)]
pub struct IndexSet(Vec<usize>);

impl IndexSet {
    pub fn new(rows: Vec<usize>, n: usize) -> Result<Self> {
        if let Some(&bad) = rows.iter().find(|&&r| r >= n) {
            return Err(Error::InvalidDataset(format!(
                "row index {bad} out of range for {n} rows"
            )));
        }
        Ok(Self(rows))
    }

    pub fn all(n: usize) -> Self {
        Self((0..n).collect())
    }

    pub fn rows(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_inner(self) -> Vec<usize> {
        self.0
    }

    pub fn is_distinct(&self) -> bool {
        let mut v = self.0.clone();
        v.sort_unstable();
        v.windows(2).all(|w| w[0] != w[1])
    }
}

impl From<Vec<usize>> for IndexSet {
    fn from(rows: Vec<usize>) -> Self {
        Self(rows)
    }
}
