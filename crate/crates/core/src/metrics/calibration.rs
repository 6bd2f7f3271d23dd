//! Threshold calibration against impostor/genuine score lists, and APCER.
//!
//! Distances compare with strict `<`: a comparison at exactly the threshold
//! is a non-match. Both calibrators pick conservative thresholds so the
//! achieved error rate never exceeds the requested target.

use crate::error::{Error, Result};

/// Genuine / impostor / morph comparison scores (L2 distances).
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ScoreSet {
    pub genuine: Vec<f64>,
    pub impostor: Vec<f64>,
    pub morph: Vec<f64>,
}

impl ScoreSet {
    pub fn new(genuine: Vec<f64>, impostor: Vec<f64>, morph: Vec<f64>) -> Result<Self> {
        for (name, list) in [
            ("genuine", &genuine),
            ("impostor", &impostor),
            ("morph", &morph),
        ] {
            if let Some(&bad) = list.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
                return Err(Error::InvalidSchedule(format!(
                    "{name} score {bad} must be a nonnegative finite distance"
                )));
            }
        }
        Ok(Self {
            genuine,
            impostor,
            morph,
        })
    }
}

fn sorted(values: &[f64]) -> Vec<f64> {
    let mut v = values.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    v
}

/// Largest `k` with `k / n <= rate`, computed with the same arithmetic used
/// to verify the achieved rate afterwards.
fn max_allowed_errors(n: usize, rate: f64) -> usize {
    let mut k = ((rate * n as f64).floor() as usize).min(n - 1);
    while k > 0 && k as f64 / n as f64 > rate {
        k -= 1;
    }
    while k + 1 < n && (k + 1) as f64 / n as f64 <= rate {
        k += 1;
    }
    k
}

/// Largest threshold such that the fraction of impostor distances strictly
/// below it stays within `fmr` (match means distance < threshold).
pub fn calibrate_threshold_fmr(impostor: &[f64], fmr: f64) -> Result<f64> {
    if impostor.is_empty() {
        return Err(Error::EmptyScores("impostor"));
    }
    if !(fmr > 0.0 && fmr < 1.0) {
        return Err(Error::RateOutOfRange(fmr));
    }
    let sorted = sorted(impostor);
    let k = max_allowed_errors(sorted.len(), fmr);
    // At gamma = sorted[k] at most k values sit strictly below; any larger
    // threshold admits at least k + 1.
    Ok(sorted[k])
}

/// Smallest threshold rejecting (distance >= threshold) at most a `bpcer`
/// fraction of genuine comparisons.
pub fn bpcer_threshold(genuine: &[f64], bpcer: f64) -> Result<f64> {
    if genuine.is_empty() {
        return Err(Error::EmptyScores("genuine"));
    }
    if !(bpcer > 0.0 && bpcer < 1.0) {
        return Err(Error::RateOutOfRange(bpcer));
    }
    let sorted = sorted(genuine);
    let n = sorted.len();
    let k = max_allowed_errors(n, bpcer);
    for &theta in &sorted {
        let below = sorted.partition_point(|&v| v < theta);
        if n - below <= k {
            return Ok(theta);
        }
    }
    // All genuine scores tie at the top; step just past the maximum.
    Ok(sorted[n - 1].next_up())
}

/// Fraction of morph distances strictly below `threshold` (attacks accepted
/// as bona fide).
pub fn apcer_at(morph: &[f64], threshold: f64) -> Result<f64> {
    if morph.is_empty() {
        return Err(Error::EmptyScores("morph"));
    }
    let hits = morph.iter().filter(|&&d| d < threshold).count();
    Ok(hits as f64 / morph.len() as f64)
}
