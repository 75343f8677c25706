//! Appending correlated noise covariates.
//!
//! Column `Z_j = a0 W_j + a1 W_{j+1} + a2 W_{j+2}` over i.i.d. standard
//! normals `W`. With `a = (sqrt(3/8), 1/2, sqrt(3/8))` this moving average has
//! unit variance and lag-1, lag-2 covariances `sqrt(3/8)` and `3/8`; all
//! longer lags vanish. Being a moving average, the band is automatically a
//! valid covariance matrix.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::rng::RngStream;

pub fn ma_coefficients() -> [f64; 3] {
    let a = (3.0f64 / 8.0).sqrt();
    [a, 0.5, a]
}

/// `extra` banded-Gaussian columns (`n` rows each), named `z1, z2, ...`.
pub fn banded_noise(n: usize, extra: usize, rng: &mut RngStream) -> Vec<Vec<f64>> {
    let [a0, a1, a2] = ma_coefficients();
    let mut cols = vec![Vec::with_capacity(n); extra];
    let mut w = vec![0.0; extra + 2];
    for _ in 0..n {
        for v in w.iter_mut() {
            *v = rng.sample(StandardNormal);
        }
        for (j, col) in cols.iter_mut().enumerate() {
            col.push(a0 * w[j] + a1 * w[j + 1] + a2 * w[j + 2]);
        }
    }
    cols
}

pub fn hd_augment(data: &Dataset, extra: usize, rng: &mut RngStream) -> Result<Dataset> {
    if extra == 0 {
        return Err(Error::config("extra", "must be at least 1"));
    }
    let names = (1..=extra).map(|j| format!("z{j}")).collect();
    data.with_extra_columns(banded_noise(data.n(), extra, rng), names)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coefficients_reproduce_band() {
        let [a0, a1, a2] = ma_coefficients();
        assert!((a0 * a0 + a1 * a1 + a2 * a2 - 1.0).abs() < 1e-15);
        assert!((a0 * a1 + a1 * a2 - (3.0f64 / 8.0).sqrt()).abs() < 1e-15);
        assert!((a0 * a2 - 0.375).abs() < 1e-15);
    }

    #[test]
    fn augment_shape() {
        let data = Dataset::from_columns(vec![vec![1.0, 2.0, 3.0]], vec![0.0, 1.0, 0.0]).unwrap();
        let aug = hd_augment(&data, 50, &mut RngStream::new(0, 0)).unwrap();
        assert_eq!(aug.d(), 51);
        assert_eq!(aug.column(0), data.column(0));
        assert_eq!(aug.feature_names()[1], "z1");
        assert!(hd_augment(&data, 0, &mut RngStream::new(0, 0)).is_err());
    }
}
