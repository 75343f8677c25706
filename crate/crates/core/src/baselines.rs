//! Naive reference estimators: the training mean and 1-nearest neighbour.

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::tree::Predictor;

/// Predicts the training mean everywhere.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeanY {
    pub mean: f64,
}

impl MeanY {
    pub fn fit(data: &Dataset) -> Self {
        let y = data.response();
        Self {
            mean: y.iter().sum::<f64>() / y.len() as f64,
        }
    }
}

impl Predictor for MeanY {
    fn predict(&self, _x: &[f64]) -> f64 {
        self.mean
    }
}

/// Response of the Euclidean-nearest training row; ties go to the lowest row.
#[derive(Debug, Clone)]
pub struct OneNn {
    rows: Vec<Vec<f64>>,
    response: Vec<f64>,
}

impl OneNn {
    pub fn fit(data: &Dataset) -> Self {
        Self {
            rows: (0..data.n()).map(|i| data.row(i)).collect(),
            response: data.response().to_vec(),
        }
    }

    pub fn nearest(&self, x: &[f64]) -> Result<usize> {
        if let Some(r) = self.rows.first() {
            if r.len() != x.len() {
                return Err(Error::DimensionMismatch {
                    expected: r.len(),
                    got: x.len(),
                });
            }
        }
        let mut best = (0, f64::INFINITY);
        for (i, r) in self.rows.iter().enumerate() {
            let dist: f64 = r.iter().zip(x).map(|(a, b)| (a - b) * (a - b)).sum();
            if dist < best.1 {
                best = (i, dist);
            }
        }
        Ok(best.0)
    }
}

impl Predictor for OneNn {
    fn predict(&self, x: &[f64]) -> f64 {
        self.response[self.nearest(x).expect("feature count matches training data")]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BaselineKind {
    MeanY,
    OneNn,
}

impl BaselineKind {
    pub const ALL: [BaselineKind; 2] = [BaselineKind::MeanY, BaselineKind::OneNn];

    pub fn name(self) -> &'static str {
        match self {
            BaselineKind::MeanY => "mean_y",
            BaselineKind::OneNn => "one_nn",
        }
    }

    pub fn fit(self, data: &Dataset) -> Box<dyn Predictor> {
        match self {
            BaselineKind::MeanY => Box::new(MeanY::fit(data)),
            BaselineKind::OneNn => Box::new(OneNn::fit(data)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mean_y_is_constant() {
        let data = Dataset::from_columns(vec![vec![0.0, 5.0]], vec![1.0, 3.0]).unwrap();
        let m = MeanY::fit(&data);
        assert_eq!(m.predict(&[100.0]), 2.0);
    }

    #[test]
    fn one_nn_interpolates_and_breaks_ties_low() {
        let data = Dataset::from_rows(&[vec![0.0, 0.0], vec![2.0, 0.0], vec![0.0, 3.0]], vec![1.0, 2.0, 3.0]).unwrap();
        let nn = OneNn::fit(&data);
        assert_eq!(nn.predict_dataset(&data), vec![1.0, 2.0, 3.0]);
        // (1, 0) is equidistant from rows 0 and 1
        assert_eq!(nn.predict(&[1.0, 0.0]), 1.0);
        assert!(nn.nearest(&[1.0]).is_err());
    }
}
