//! Transferability between morphing attacks and the relative strength
//! metric (RSM), computed from paired binary detector decisions.
//!
//! A decision record holds `f^alpha(x_i^beta)` for one detector (trained on
//! attack alpha) evaluated on one attack beta, aligned across attacks by
//! pair id. Transferability conditions detection of beta on detection of
//! alpha for the same pair; the RSM is the natural log ratio of the two
//! directed transferabilities.

use std::collections::BTreeMap;

use crate::error::{Error, Result};

/// Per-pair binary outputs of one detector on one attack.
/// Decision 1 flags a morphed presentation, 0 a bona fide one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecisionRecord {
    /// Attack the detector was trained on.
    pub detector: String,
    /// Attack the decisions were produced on.
    pub attack: String,
    decisions: BTreeMap<String, bool>,
}

impl DecisionRecord {
    pub fn new(
        detector: impl Into<String>,
        attack: impl Into<String>,
        decisions: impl IntoIterator<Item = (String, bool)>,
    ) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (pair_id, decision) in decisions {
            if map.insert(pair_id.clone(), decision).is_some() {
                return Err(Error::DuplicateKey {
                    kind: "pair id",
                    key: pair_id,
                });
            }
        }
        Ok(Self {
            detector: detector.into(),
            attack: attack.into(),
            decisions: map,
        })
    }

    pub fn len(&self) -> usize {
        self.decisions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.decisions.is_empty()
    }

    pub fn decisions(&self) -> impl Iterator<Item = (&str, bool)> {
        self.decisions.iter().map(|(k, &v)| (k.as_str(), v))
    }
}

/// Count smoothing for empty-denominator protection.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Smoothing {
    /// Zero counts are a hard error (default).
    #[default]
    None,
    /// Add-one (Laplace) smoothing on both the joint and marginal counts.
    AddOne,
}

/// Sample transferability `T(alpha, beta)`:
/// joint detections of alpha and beta over detections of alpha, aligned by
/// pair id. `rec_self` must be the detector evaluated on its own attack,
/// `rec_cross` the same detector on the other attack.
pub fn transferability(
    rec_self: &DecisionRecord,
    rec_cross: &DecisionRecord,
    smoothing: Smoothing,
) -> Result<f64> {
    if rec_self.detector != rec_self.attack || rec_cross.detector != rec_self.detector {
        return Err(Error::RecordRoleMismatch {
            detector: rec_cross.detector.clone(),
            attack: rec_cross.attack.clone(),
        });
    }
    if rec_self.len() != rec_cross.len() {
        let diff = rec_self
            .decisions
            .keys()
            .find(|k| !rec_cross.decisions.contains_key(*k))
            .or_else(|| {
                rec_cross
                    .decisions
                    .keys()
                    .find(|k| !rec_self.decisions.contains_key(*k))
            })
            .cloned()
            .unwrap_or_default();
        return Err(Error::PairIdMismatch(diff));
    }
    let mut joint = 0u64;
    let mut detected_self = 0u64;
    for (pair_id, own) in &rec_self.decisions {
        let cross = rec_cross
            .decisions
            .get(pair_id)
            .ok_or_else(|| Error::PairIdMismatch(pair_id.clone()))?;
        if *own {
            detected_self += 1;
            if *cross {
                joint += 1;
            }
        }
    }
    match smoothing {
        Smoothing::AddOne => Ok((joint + 1) as f64 / (detected_self + 1) as f64),
        Smoothing::None => {
            if detected_self == 0 {
                return Err(Error::ZeroCount {
                    count: "self-detection",
                    context: format!(
                        " (detector '{}' flags nothing on its own attack)",
                        rec_self.detector
                    ),
                });
            }
            Ok(joint as f64 / detected_self as f64)
        }
    }
}

/// Relative strength `ln(t_ab / t_ba)`; positive when the first attack is
/// stronger. Zero transferabilities are rejected so the matrix never
/// carries silent infinities.
pub fn rsm(t_ab: f64, t_ba: f64) -> Result<f64> {
    for t in [t_ab, t_ba] {
        if !(0.0..=1.0).contains(&t) || !t.is_finite() {
            return Err(Error::TransferabilityOutOfRange(t));
        }
    }
    match (t_ab == 0.0, t_ba == 0.0) {
        (true, true) => Err(Error::ZeroCount {
            count: "transferability",
            context: " (both directions are zero)".into(),
        }),
        (true, false) => Err(Error::ZeroCount {
            count: "transferability",
            context: " (forward direction is zero)".into(),
        }),
        (false, true) => Err(Error::ZeroCount {
            count: "transferability",
            context: " (reverse direction is zero)".into(),
        }),
        (false, false) => Ok((t_ab / t_ba).ln()),
    }
}

/// Antisymmetric RSM matrix with attack labels.
#[derive(Debug, Clone, PartialEq)]
pub struct RsmMatrix {
    pub attacks: Vec<String>,
    pub values: Vec<Vec<f64>>,
}

/// Compute the full pairwise RSM matrix from decision records covering
/// every (detector, attack) combination over the detector set.
///
/// Each off-diagonal cell is computed once and mirrored with its sign
/// flipped, so antisymmetry holds exactly; the diagonal is exactly zero.
pub fn rsm_matrix(records: &[DecisionRecord], smoothing: Smoothing) -> Result<RsmMatrix> {
    let mut by_role: BTreeMap<(&str, &str), &DecisionRecord> = BTreeMap::new();
    let mut attacks: Vec<String> = Vec::new();
    for rec in records {
        if by_role
            .insert((rec.detector.as_str(), rec.attack.as_str()), rec)
            .is_some()
        {
            return Err(Error::DuplicateKey {
                kind: "decision record",
                key: format!("{} on {}", rec.detector, rec.attack),
            });
        }
        for name in [&rec.detector, &rec.attack] {
            if !attacks.contains(name) {
                attacks.push(name.clone());
            }
        }
    }
    attacks.sort();

    let lookup = |detector: &str, attack: &str| {
        by_role
            .get(&(detector, attack))
            .copied()
            .ok_or_else(|| Error::MissingRecord {
                detector: detector.to_string(),
                attack: attack.to_string(),
            })
    };

    let n = attacks.len();
    let mut values = vec![vec![0.0; n]; n];
    for i in 0..n {
        // The self-record must exist even for a 1x1 matrix.
        lookup(&attacks[i], &attacks[i])?;
        for j in (i + 1)..n {
            let t_ij = transferability(
                lookup(&attacks[i], &attacks[i])?,
                lookup(&attacks[i], &attacks[j])?,
                smoothing,
            )?;
            let t_ji = transferability(
                lookup(&attacks[j], &attacks[j])?,
                lookup(&attacks[j], &attacks[i])?,
                smoothing,
            )?;
            let delta = rsm(t_ij, t_ji)?;
            values[i][j] = delta;
            values[j][i] = -delta;
        }
    }
    Ok(RsmMatrix { attacks, values })
}
