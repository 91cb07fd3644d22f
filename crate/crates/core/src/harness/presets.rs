//! Named configurations for the baseline and the three experiment families.

use super::config::{ClassifierKind, PipelineConfig};
use crate::classifiers::SvcConfig;
use crate::ensemble::VoteWeights;
use crate::vectorizer::{BlockConfig, UnionConfig};
use crate::{Error, Result};

pub const PRESET_NAMES: [&str; 9] = [
    "baseline",
    "exp1",
    "exp2-1",
    "exp2-2",
    "exp2-3",
    "exp2-4",
    "exp2-5",
    "exp3-hard",
    "exp3-weighted",
];

/// Per-block vocabulary cap used by the voting presets, the top of the
/// 300..1000 range, so the forest sees at most 3000 columns.
const VOTING_MAX_FEATURES: usize = 1000;

fn svc(features: UnionConfig, c: f64, balanced: bool) -> PipelineConfig {
    let mut cfg = PipelineConfig::new(features, ClassifierKind::Svc);
    cfg.svc = SvcConfig {
        c,
        balanced,
        ..SvcConfig::default()
    };
    cfg
}

fn voting(weights: VoteWeights) -> Result<PipelineConfig> {
    let mut cfg = svc(
        UnionConfig::uniform([5, 5, 5], [0.65, 0.85, 0.85], Some(VOTING_MAX_FEATURES))?,
        4.0,
        true,
    );
    cfg.classifier = ClassifierKind::Vote;
    cfg.vote_weights = weights;
    Ok(cfg)
}

/// Looks up a preset by name.
///
/// Single n-gram values `n` from the experiment table are read as ranges
/// `(1, n)`. Rows that list no class weighting train unweighted.
pub fn preset(name: &str) -> Result<PipelineConfig> {
    let exp1 = || -> Result<PipelineConfig> {
        Ok(svc(
            UnionConfig::uniform([3, 5, 5], [1.0; 3], None)?,
            5.0,
            true,
        ))
    };
    match name {
        "baseline" => Ok(svc(
            UnionConfig {
                word: Some(BlockConfig::up_to(1, 1.0)?),
                ..UnionConfig::default()
            },
            1.0,
            false,
        )),
        "exp1" | "exp2-1" => exp1(),
        "exp2-2" => Ok(svc(
            UnionConfig::uniform([5, 5, 5], [0.65, 0.85, 0.85], None)?,
            4.0,
            true,
        )),
        "exp2-3" => Ok(svc(
            UnionConfig::uniform([3, 4, 5], [0.45, 0.5, 0.75], None)?,
            4.0,
            false,
        )),
        "exp2-4" => Ok(svc(
            UnionConfig::uniform([4, 4, 4], [0.45, 0.5, 0.75], None)?,
            4.0,
            false,
        )),
        "exp2-5" => Ok(svc(
            UnionConfig::uniform([4, 4, 4], [0.35, 0.45, 0.75], None)?,
            4.0,
            false,
        )),
        "exp3-hard" => voting(VoteWeights::new(1.0, 1.0, 1.0)),
        "exp3-weighted" => voting(VoteWeights::new(0.6, 0.3, 0.2)),
        _ => Err(Error::UnknownPreset {
            name: name.to_owned(),
            valid: PRESET_NAMES.iter().map(|s| s.to_string()).collect(),
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analyzers::NgramRange;

    fn ranges(cfg: &PipelineConfig) -> Vec<(usize, usize)> {
        cfg.features
            .blocks()
            .map(|(_, b)| (b.range.lo(), b.range.hi()))
            .collect()
    }

    fn weights(cfg: &PipelineConfig) -> Vec<f64> {
        cfg.features.blocks().map(|(_, b)| b.weight).collect()
    }

    #[test]
    fn every_preset_is_valid() {
        for name in PRESET_NAMES {
            preset(name).unwrap().validate().unwrap();
        }
    }

    #[test]
    fn baseline_is_word_unigrams() {
        let cfg = preset("baseline").unwrap();
        assert_eq!(
            cfg.features.word.unwrap().range,
            NgramRange::new(1, 1).unwrap()
        );
        assert!(cfg.features.char.is_none() && cfg.features.char_wb.is_none());
        assert_eq!(cfg.classifier, ClassifierKind::Svc);
        assert_eq!(weights(&cfg), [1.0]);
    }

    #[test]
    fn exp1_matches_first_table_row() {
        let cfg = preset("exp1").unwrap();
        assert_eq!(ranges(&cfg), [(1, 3), (1, 5), (1, 5)]);
        assert_eq!(weights(&cfg), [1.0, 1.0, 1.0]);
        assert_eq!(cfg.svc.c, 5.0);
        assert!(cfg.svc.balanced);
        assert_eq!(preset("exp2-1").unwrap(), cfg);
    }

    #[test]
    fn exp2_rows() {
        let cfg = preset("exp2-2").unwrap();
        assert_eq!(ranges(&cfg), [(1, 5); 3]);
        assert_eq!(weights(&cfg), [0.65, 0.85, 0.85]);
        assert_eq!((cfg.svc.c, cfg.svc.balanced), (4.0, true));

        let cfg = preset("exp2-3").unwrap();
        assert_eq!(ranges(&cfg), [(1, 3), (1, 4), (1, 5)]);
        assert_eq!(weights(&cfg), [0.45, 0.5, 0.75]);
        assert_eq!((cfg.svc.c, cfg.svc.balanced), (4.0, false));

        assert_eq!(ranges(&preset("exp2-4").unwrap()), [(1, 4); 3]);
        assert_eq!(weights(&preset("exp2-5").unwrap()), [0.35, 0.45, 0.75]);
    }

    #[test]
    fn voting_presets() {
        let hard = preset("exp3-hard").unwrap();
        let weighted = preset("exp3-weighted").unwrap();
        assert_eq!(hard.classifier, ClassifierKind::Vote);
        assert_eq!(hard.k, 3);
        assert_eq!(hard.vote_weights.as_array(), [1.0; 3]);
        for w in weighted.vote_weights.as_array() {
            assert!((0.1..=0.6).contains(&w));
        }
    }

    #[test]
    fn unknown_preset_lists_valid_names() {
        let err = preset("exp9").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("exp9") && msg.contains("exp2-5") && msg.contains("baseline"));
    }
}
