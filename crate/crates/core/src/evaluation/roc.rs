use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// TPR against FPR over all score thresholds, from (0, 0) to (1, 1).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RocCurve {
    /// `(fpr, tpr)` pairs.
    pub points: Vec<(f64, f64)>,
    pub auc: f64,
}

/// Sweeps every distinct score from high to low, treating a score as
/// positive when it is at or above the threshold; AUC by trapezoids.
pub fn roc_auc(in_scores: &[f64], out_scores: &[f64]) -> Result<RocCurve> {
    if in_scores.is_empty() || out_scores.is_empty() {
        return Err(Error::invalid("ROC needs at least one member and one non-member score"));
    }
    if in_scores.iter().chain(out_scores).any(|s| s.is_nan()) {
        return Err(Error::invalid("scores must not be NaN"));
    }
    let mut labelled: Vec<(f64, bool)> = in_scores
        .iter()
        .map(|&s| (s, true))
        .chain(out_scores.iter().map(|&s| (s, false)))
        .collect();
    labelled.sort_by(|a, b| b.0.total_cmp(&a.0));

    let (n_in, n_out) = (in_scores.len() as f64, out_scores.len() as f64);
    let mut points = Vec::with_capacity(labelled.len() + 1);
    points.push((0.0, 0.0));
    let (mut tp, mut fp) = (0usize, 0usize);
    let mut i = 0;
    while i < labelled.len() {
        let threshold = labelled[i].0;
        while i < labelled.len() && labelled[i].0 == threshold {
            if labelled[i].1 {
                tp += 1;
            } else {
                fp += 1;
            }
            i += 1;
        }
        points.push((fp as f64 / n_out, tp as f64 / n_in));
    }
    let auc = points
        .windows(2)
        .map(|w| (w[1].0 - w[0].0) * (w[0].1 + w[1].1) / 2.0)
        .sum();
    Ok(RocCurve { points, auc })
}
