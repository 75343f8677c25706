//! Split rules and cell partitioning.

use serde::{Deserialize, Serialize};

use crate::data::Dataset;

/// The seven bivariate geometries of an interaction-forest split.
///
/// The first daughter (`left`) is the shaded region; the second is its
/// complement within the cell. "Low" means `x <= c`, "high" means `x > c`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IntfVariant {
    /// `x1 <= c1 && x2 <= c2`
    LowLow,
    /// `x1 <= c1 && x2 > c2`
    LowHigh,
    /// `x1 > c1 && x2 <= c2`
    HighLow,
    /// `x1 > c1 && x2 > c2`
    HighHigh,
    /// `(x1 <= c1) == (x2 <= c2)`
    Checker,
    /// `x1 <= c1`
    Single1,
    /// `x2 <= c2`
    Single2,
}

impl IntfVariant {
    pub const ALL: [IntfVariant; 7] = [
        IntfVariant::LowLow,
        IntfVariant::LowHigh,
        IntfVariant::HighLow,
        IntfVariant::HighHigh,
        IntfVariant::Checker,
        IntfVariant::Single1,
        IntfVariant::Single2,
    ];

    #[inline]
    pub fn left(self, low1: bool, low2: bool) -> bool {
        match self {
            IntfVariant::LowLow => low1 && low2,
            IntfVariant::LowHigh => low1 && !low2,
            IntfVariant::HighLow => !low1 && low2,
            IntfVariant::HighHigh => !low1 && !low2,
            IntfVariant::Checker => low1 == low2,
            IntfVariant::Single1 => low1,
            IntfVariant::Single2 => low2,
        }
    }
}

/// A binary routing rule. Points satisfying the rule go to the left child.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SplitRule {
    Axis {
        feature: usize,
        threshold: f64,
    },
    Bivariate {
        variant: IntfVariant,
        feature1: usize,
        feature2: usize,
        threshold1: f64,
        threshold2: f64,
    },
}

impl SplitRule {
    pub fn axis(feature: usize, threshold: f64) -> Self {
        SplitRule::Axis { feature, threshold }
    }

    #[inline]
    pub fn goes_left(&self, x: &[f64]) -> bool {
        self.goes_left_with(|j| x[j])
    }

    #[inline]
    pub fn goes_left_row(&self, data: &Dataset, i: usize) -> bool {
        self.goes_left_with(|j| data.x(i, j))
    }

    #[inline]
    fn goes_left_with(&self, value: impl Fn(usize) -> f64) -> bool {
        match *self {
            SplitRule::Axis { feature, threshold } => value(feature) <= threshold,
            SplitRule::Bivariate {
                variant,
                feature1,
                feature2,
                threshold1,
                threshold2,
            } => variant.left(value(feature1) <= threshold1, value(feature2) <= threshold2),
        }
    }

    /// Largest feature index referenced by the rule.
    pub fn max_feature(&self) -> usize {
        match *self {
            SplitRule::Axis { feature, .. } => feature,
            SplitRule::Bivariate {
                feature1, feature2, ..
            } => feature1.max(feature2),
        }
    }

    pub fn validate(&self, d: usize) -> Result<(), String> {
        match *self {
            SplitRule::Axis { feature, threshold } => {
                if feature >= d {
                    return Err(format!("feature {feature} out of range for d={d}"));
                }
                if !threshold.is_finite() {
                    return Err("non-finite threshold".into());
                }
            }
            SplitRule::Bivariate {
                feature1,
                feature2,
                threshold1,
                threshold2,
                ..
            } => {
                if feature1 >= d || feature2 >= d {
                    return Err(format!("feature out of range for d={d}"));
                }
                if feature1 == feature2 {
                    return Err("bivariate rule needs two distinct features".into());
                }
                if !threshold1.is_finite() || !threshold2.is_finite() {
                    return Err("non-finite threshold".into());
                }
            }
        }
        Ok(())
    }
}

/// Split a cell into the rows the rule sends left and right, preserving order.
pub fn partition_indices(cell: &[usize], rule: &SplitRule, data: &Dataset) -> (Vec<usize>, Vec<usize>) {
    let mut left = Vec::with_capacity(cell.len());
    let mut right = Vec::with_capacity(cell.len());
    for &i in cell {
        if rule.goes_left_row(data, i) {
            left.push(i);
        } else {
            right.push(i);
        }
    }
    (left, right)
}
