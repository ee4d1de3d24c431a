//! Histogram MI with uniform-width bins.

use super::discrete::{joint_labels, label_mi, labels};
use crate::error::{Error, Result};

/// Bin index per value, `bins` equal-width bins over the empirical range.
pub fn bin_indices(values: &[f64], bins: usize) -> Vec<u32> {
    let (lo, hi) = values
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
            (lo.min(v), hi.max(v))
        });
    let width = hi - lo;
    if !(width > 0.0) {
        return vec![0; values.len()];
    }
    values
        .iter()
        .map(|&v| {
            let b = ((v - lo) / width * bins as f64).floor() as i64;
            b.clamp(0, bins as i64 - 1) as u32
        })
        .collect()
}

/// Discretizes a multi-column variable: categorical columns keep their values,
/// continuous ones are binned; the tuple is then relabelled.
pub(crate) fn discretize(columns: &[&[f64]], categorical: bool, bins: usize) -> Vec<u32> {
    let per: Vec<Vec<u32>> = columns
        .iter()
        .map(|c| if categorical { labels(c) } else { bin_indices(c, bins) })
        .collect();
    joint_labels(&per)
}

/// Plug-in MI of two continuous sequences after uniform binning.
pub fn binned_mi(x: &[f64], y: &[f64], bins: usize) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch(x.len(), y.len()));
    }
    if x.len() < 2 {
        return Err(Error::EmptyInput);
    }
    if bins < 2 {
        return Err(Error::InvalidConfig(format!("bins must be >= 2, got {bins}")));
    }
    label_mi(&bin_indices(x, bins), &bin_indices(y, bins))
}
