//! Embedding tables and the product-average mated-morph match rate.

use std::collections::BTreeMap;

use nalgebra::DVector;

use crate::error::{Error, Result};

/// One bona fide enrollment image of an identity.
#[derive(Debug, Clone, PartialEq)]
pub struct BonaFideImage {
    pub image_id: String,
    pub feature: DVector<f64>,
}

/// One morph with its two component identities and the source images that
/// produced it (excluded from its own evaluation).
#[derive(Debug, Clone, PartialEq)]
pub struct MorphEntry {
    pub image_id: String,
    pub feature: DVector<f64>,
    pub identity_a: String,
    pub identity_b: String,
    pub source_ids: Vec<String>,
}

/// Identities mapped to bona fide feature vectors, plus morph entries
/// tagged with their component-identity pairs.
#[derive(Debug, Clone, Default)]
pub struct EmbeddingTable {
    dim: Option<usize>,
    bona_fide: BTreeMap<String, Vec<BonaFideImage>>,
    morphs: Vec<MorphEntry>,
}

impl EmbeddingTable {
    pub fn new() -> Self {
        Self::default()
    }

    fn check_feature(&mut self, feature: &DVector<f64>) -> Result<()> {
        if feature.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidSchedule(
                "feature vectors must be finite".into(),
            ));
        }
        match self.dim {
            None => {
                self.dim = Some(feature.len());
                Ok(())
            }
            Some(d) if d == feature.len() => Ok(()),
            Some(d) => Err(Error::DimensionMismatch {
                expected: d,
                got: feature.len(),
            }),
        }
    }

    pub fn add_bona_fide(
        &mut self,
        identity: &str,
        image_id: &str,
        feature: DVector<f64>,
    ) -> Result<()> {
        self.check_feature(&feature)?;
        let images = self.bona_fide.entry(identity.to_string()).or_default();
        if images.iter().any(|img| img.image_id == image_id) {
            return Err(Error::DuplicateKey {
                kind: "bona fide image",
                key: format!("{identity}/{image_id}"),
            });
        }
        images.push(BonaFideImage {
            image_id: image_id.to_string(),
            feature,
        });
        Ok(())
    }

    pub fn add_morph(&mut self, entry: MorphEntry) -> Result<()> {
        self.check_feature(&entry.feature.clone())?;
        if entry.identity_a == entry.identity_b {
            return Err(Error::DegenerateMorph {
                morph: entry.image_id,
            });
        }
        for identity in [&entry.identity_a, &entry.identity_b] {
            if !self.bona_fide.contains_key(identity) {
                return Err(Error::UnknownIdentity {
                    morph: entry.image_id.clone(),
                    identity: identity.clone(),
                });
            }
        }
        if self.morphs.iter().any(|m| m.image_id == entry.image_id) {
            return Err(Error::DuplicateKey {
                kind: "morph image",
                key: entry.image_id,
            });
        }
        self.morphs.push(entry);
        Ok(())
    }

    pub fn dim(&self) -> Option<usize> {
        self.dim
    }

    pub fn identities(&self) -> impl Iterator<Item = &str> {
        self.bona_fide.keys().map(String::as_str)
    }

    pub fn bona_fide_of(&self, identity: &str) -> Option<&[BonaFideImage]> {
        self.bona_fide.get(identity).map(Vec::as_slice)
    }

    pub fn bona_fide_features(&self) -> Vec<&DVector<f64>> {
        self.bona_fide
            .values()
            .flat_map(|imgs| imgs.iter().map(|img| &img.feature))
            .collect()
    }

    pub fn morphs(&self) -> &[MorphEntry] {
        &self.morphs
    }

    pub fn morph_features(&self) -> Vec<&DVector<f64>> {
        self.morphs.iter().map(|m| &m.feature).collect()
    }
}

/// What to do when a morph's identity has no bona fide images left after
/// excluding the morph's own sources.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EmptyIdentityPolicy {
    /// Fail the whole evaluation (default).
    #[default]
    Error,
    /// Drop the morph from the outer mean.
    SkipMorph,
}

/// ProdAvg-MMPMR at threshold `gamma`:
/// mean over morphs of the product over the two component identities of the
/// per-identity average match indicator `|F(morph) - F(image)| < gamma`,
/// computed over that identity's bona fide images excluding the morph's
/// sources.
pub fn mmpmr_prodavg(table: &EmbeddingTable, gamma: f64) -> Result<f64> {
    mmpmr_prodavg_with(table, gamma, EmptyIdentityPolicy::Error)
}

pub fn mmpmr_prodavg_with(
    table: &EmbeddingTable,
    gamma: f64,
    policy: EmptyIdentityPolicy,
) -> Result<f64> {
    if table.morphs.is_empty() {
        return Err(Error::EmptyScores("morph"));
    }
    let mut total = 0.0;
    let mut counted = 0usize;
    'morphs: for morph in &table.morphs {
        let mut product = 1.0;
        for identity in [&morph.identity_a, &morph.identity_b] {
            let images = table
                .bona_fide_of(identity)
                .expect("identity checked at insertion");
            let remaining: Vec<_> = images
                .iter()
                .filter(|img| !morph.source_ids.contains(&img.image_id))
                .collect();
            if remaining.is_empty() {
                match policy {
                    EmptyIdentityPolicy::Error => {
                        return Err(Error::EmptyIdentity {
                            morph: morph.image_id.clone(),
                            identity: identity.clone(),
                        })
                    }
                    EmptyIdentityPolicy::SkipMorph => continue 'morphs,
                }
            }
            let hits = remaining
                .iter()
                .filter(|img| (&morph.feature - &img.feature).norm() < gamma)
                .count();
            product *= hits as f64 / remaining.len() as f64;
        }
        total += product;
        counted += 1;
    }
    if counted == 0 {
        return Err(Error::EmptyScores("morph"));
    }
    Ok(total / counted as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dv(data: &[f64]) -> DVector<f64> {
        DVector::from_vec(data.to_vec())
    }

    /// Morph at the origin; bona fide images placed at chosen distances so
    /// each indicator at gamma = 1 is forced.
    fn image_at(distance: f64) -> DVector<f64> {
        dv(&[distance, 0.0])
    }

    fn hand_fixture() -> EmbeddingTable {
        let mut t = EmbeddingTable::new();
        // Morph 1: identity a has remaining indicators {1, 0}; b has {1}.
        t.add_bona_fide("a", "a1", image_at(0.5)).unwrap();
        t.add_bona_fide("a", "a2", image_at(2.0)).unwrap();
        t.add_bona_fide("a", "a_src", image_at(0.1)).unwrap();
        t.add_bona_fide("b", "b1", image_at(0.5)).unwrap();
        t.add_bona_fide("b", "b_src", image_at(0.1)).unwrap();
        // Morph 2: identities c and d each with indicators {1, 0}.
        t.add_bona_fide("c", "c1", image_at(0.5)).unwrap();
        t.add_bona_fide("c", "c2", image_at(2.0)).unwrap();
        t.add_bona_fide("d", "d1", image_at(0.5)).unwrap();
        t.add_bona_fide("d", "d2", image_at(2.0)).unwrap();
        t.add_morph(MorphEntry {
            image_id: "m_ab".into(),
            feature: dv(&[0.0, 0.0]),
            identity_a: "a".into(),
            identity_b: "b".into(),
            source_ids: vec!["a_src".into(), "b_src".into()],
        })
        .unwrap();
        t.add_morph(MorphEntry {
            image_id: "m_cd".into(),
            feature: dv(&[0.0, 0.0]),
            identity_a: "c".into(),
            identity_b: "d".into(),
            source_ids: vec![],
        })
        .unwrap();
        t
    }

    #[test]
    fn hand_fixture_is_0_375() {
        // Morph 1 scores 0.5 * 1 = 0.5, morph 2 scores 0.5 * 0.5 = 0.25,
        // outer mean 0.375. The source images sit inside the threshold, so
        // forgetting the exclusion would inflate the result.
        let t = hand_fixture();
        assert_eq!(mmpmr_prodavg(&t, 1.0).unwrap(), 0.375);
    }

    #[test]
    fn exclusion_rule_removes_source_images() {
        let t = hand_fixture();
        let with_exclusion = mmpmr_prodavg(&t, 1.0).unwrap();

        // Rebuild without the source images present at all; same value.
        let mut bare = EmbeddingTable::new();
        bare.add_bona_fide("a", "a1", image_at(0.5)).unwrap();
        bare.add_bona_fide("a", "a2", image_at(2.0)).unwrap();
        bare.add_bona_fide("b", "b1", image_at(0.5)).unwrap();
        bare.add_bona_fide("c", "c1", image_at(0.5)).unwrap();
        bare.add_bona_fide("c", "c2", image_at(2.0)).unwrap();
        bare.add_bona_fide("d", "d1", image_at(0.5)).unwrap();
        bare.add_bona_fide("d", "d2", image_at(2.0)).unwrap();
        bare.add_morph(MorphEntry {
            image_id: "m_ab".into(),
            feature: dv(&[0.0, 0.0]),
            identity_a: "a".into(),
            identity_b: "b".into(),
            source_ids: vec!["a_src".into(), "b_src".into()],
        })
        .unwrap();
        bare.add_morph(MorphEntry {
            image_id: "m_cd".into(),
            feature: dv(&[0.0, 0.0]),
            identity_a: "c".into(),
            identity_b: "d".into(),
            source_ids: vec![],
        })
        .unwrap();
        assert_eq!(mmpmr_prodavg(&bare, 1.0).unwrap(), with_exclusion);
    }

    #[test]
    fn all_matches_give_one() {
        let mut t = EmbeddingTable::new();
        t.add_bona_fide("a", "a1", image_at(0.1)).unwrap();
        t.add_bona_fide("b", "b1", image_at(0.2)).unwrap();
        t.add_morph(MorphEntry {
            image_id: "m".into(),
            feature: dv(&[0.0, 0.0]),
            identity_a: "a".into(),
            identity_b: "b".into(),
            source_ids: vec![],
        })
        .unwrap();
        assert_eq!(mmpmr_prodavg(&t, 1.0).unwrap(), 1.0);
    }

    #[test]
    fn empty_identity_errors_by_default_and_skips_on_request() {
        let mut t = EmbeddingTable::new();
        t.add_bona_fide("a", "only", image_at(0.5)).unwrap();
        t.add_bona_fide("b", "b1", image_at(0.5)).unwrap();
        t.add_bona_fide("c", "c1", image_at(0.5)).unwrap();
        // This morph consumes identity a's only image.
        t.add_morph(MorphEntry {
            image_id: "m1".into(),
            feature: dv(&[0.0, 0.0]),
            identity_a: "a".into(),
            identity_b: "b".into(),
            source_ids: vec!["only".into()],
        })
        .unwrap();
        t.add_morph(MorphEntry {
            image_id: "m2".into(),
            feature: dv(&[0.0, 0.0]),
            identity_a: "b".into(),
            identity_b: "c".into(),
            source_ids: vec![],
        })
        .unwrap();

        let err = mmpmr_prodavg(&t, 1.0).unwrap_err();
        assert!(matches!(err, Error::EmptyIdentity { .. }));
        assert!(err.is_undefined_metric());

        let skipped = mmpmr_prodavg_with(&t, 1.0, EmptyIdentityPolicy::SkipMorph).unwrap();
        assert_eq!(skipped, 1.0); // only m2 counts
    }

    #[test]
    fn monotone_in_gamma_and_bounded() {
        let t = hand_fixture();
        let mut last = 0.0;
        for i in 1..=30 {
            let gamma = i as f64 * 0.1;
            let v = mmpmr_prodavg(&t, gamma).unwrap();
            assert!((0.0..=1.0).contains(&v));
            assert!(v >= last);
            last = v;
        }
    }

    #[test]
    fn table_validation_errors() {
        let mut t = EmbeddingTable::new();
        t.add_bona_fide("a", "a1", image_at(0.5)).unwrap();
        assert!(matches!(
            t.add_bona_fide("a", "a1", image_at(0.7)).unwrap_err(),
            Error::DuplicateKey { .. }
        ));
        assert!(matches!(
            t.add_bona_fide("a", "a2", dv(&[1.0, 2.0, 3.0])).unwrap_err(),
            Error::DimensionMismatch { .. }
        ));
        let morph = |id: &str, a: &str, b: &str| MorphEntry {
            image_id: id.into(),
            feature: dv(&[0.0, 0.0]),
            identity_a: a.into(),
            identity_b: b.into(),
            source_ids: vec![],
        };
        assert!(matches!(
            t.add_morph(morph("m", "a", "ghost")).unwrap_err(),
            Error::UnknownIdentity { .. }
        ));
        assert!(matches!(
            t.add_morph(morph("m", "a", "a")).unwrap_err(),
            Error::DegenerateMorph { .. }
        ));
        assert!(matches!(
            mmpmr_prodavg(&t, 1.0).unwrap_err(),
            Error::EmptyScores("morph")
        ));
    }
}
