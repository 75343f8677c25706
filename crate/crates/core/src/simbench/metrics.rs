//! Test-set error measures.

use serde::{Deserialize, Serialize};

use super::models::SimData;
use crate::tree::Predictor;

/// Error against the regression function (`mse`) and against the noisy
/// responses (`mse_y`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TestError {
    pub mse: f64,
    pub mse_y: f64,
}

pub fn mean_squared_error(pred: &[f64], target: &[f64]) -> f64 {
    assert_eq!(pred.len(), target.len());
    pred.iter().zip(target).map(|(p, t)| (p - t) * (p - t)).sum::<f64>() / pred.len() as f64
}

pub fn mse_on_test(model: &(impl Predictor + ?Sized), test: &SimData) -> TestError {
    let pred = model.predict_dataset(&test.data);
    TestError {
        mse: mean_squared_error(&pred, &test.truth),
        mse_y: mean_squared_error(&pred, test.data.response()),
    }
}
