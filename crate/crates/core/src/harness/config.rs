use serde::{Deserialize, Serialize};

use crate::classifiers::{ForestConfig, SvcConfig};
use crate::ensemble::{DecisionPolicy, VoteWeights};
use crate::vectorizer::UnionConfig;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClassifierKind {
    #[default]
    Svc,
    Forest,
    Knn,
    Vote,
}

impl ClassifierKind {
    pub fn name(self) -> &'static str {
        match self {
            ClassifierKind::Svc => "svc",
            ClassifierKind::Forest => "forest",
            ClassifierKind::Knn => "knn",
            ClassifierKind::Vote => "vote",
        }
    }
}

/// Everything needed to fit a pipeline. `seed` is the only source of
/// randomness and overrides the classifier configs' own seeds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineConfig {
    pub features: UnionConfig,
    #[serde(default)]
    pub classifier: ClassifierKind,
    #[serde(default)]
    pub svc: SvcConfig,
    #[serde(default)]
    pub forest: ForestConfig,
    #[serde(default = "default_k")]
    pub k: usize,
    #[serde(default)]
    pub vote_weights: VoteWeights,
    #[serde(default)]
    pub policy: DecisionPolicy,
    #[serde(default)]
    pub seed: u64,
}

fn default_k() -> usize {
    3
}

impl PipelineConfig {
    pub fn new(features: UnionConfig, classifier: ClassifierKind) -> Self {
        PipelineConfig {
            features,
            classifier,
            svc: SvcConfig::default(),
            forest: ForestConfig::default(),
            k: default_k(),
            vote_weights: VoteWeights::default(),
            policy: DecisionPolicy::default(),
            seed: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.features.validate()?;
        self.svc.validate()?;
        self.forest.validate()?;
        self.vote_weights.validate()?;
        self.policy.validate()?;
        if self.k == 0 {
            return Err(Error::invalid("k must be at least 1"));
        }
        if self.classifier != ClassifierKind::Svc && self.policy != DecisionPolicy::Argmax {
            return Err(Error::invalid(format!(
                "{} produces a single label; only the argmax policy applies",
                self.classifier.name()
            )));
        }
        Ok(())
    }

    /// SVC settings with the pipeline seed applied.
    pub fn svc_config(&self) -> SvcConfig {
        SvcConfig {
            seed: self.seed,
            ..self.svc
        }
    }

    /// Forest settings with the pipeline seed applied.
    pub fn forest_config(&self) -> ForestConfig {
        ForestConfig {
            seed: self.seed,
            ..self.forest
        }
    }

    /// Canonical JSON, used for deterministic tie ordering and reports.
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("config serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: PipelineConfig = serde_json::from_str(text)
            .map_err(|e| Error::invalid(format!("pipeline config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_json_fills_defaults() {
        let cfg = PipelineConfig::from_json(
            r#"{"features": {"word": {"range": {"lo": 1, "hi": 2}}}, "svc": {"C": 4, "balanced": true}}"#,
        )
        .unwrap();
        assert_eq!(cfg.classifier, ClassifierKind::Svc);
        assert_eq!(cfg.k, 3);
        assert_eq!(cfg.svc.c, 4.0);
        assert!(cfg.svc.balanced);
        assert_eq!(cfg.svc.tol, 1e-4);
        assert_eq!(cfg.forest.n_trees, 100);
        assert_eq!(cfg.features.word.unwrap().weight, 1.0);
        assert!(cfg.features.char.is_none());
    }

    #[test]
    fn rejects_unknown_fields_and_bad_values() {
        assert!(PipelineConfig::from_json(
            r#"{"features": {"word": {"range": {"lo": 1, "hi": 1}}}, "colour": 1}"#
        )
        .is_err());
        assert!(PipelineConfig::from_json(r#"{"features": {}}"#).is_err());
        assert!(PipelineConfig::from_json(
            r#"{"features": {"word": {"range": {"lo": 1, "hi": 1}}}, "classifier": "knn", "policy": {"kind": "top_k", "value": 2}}"#
        )
        .is_err());
    }

    #[test]
    fn json_round_trip() {
        let cfg = PipelineConfig::from_json(
            r#"{"features": {"char": {"range": {"lo": 2, "hi": 4}, "max_features": 300, "weight": 0.45}}, "classifier": "vote", "vote_weights": {"svc": 0.6, "forest": 0.3, "knn": 0.1}, "seed": 9}"#,
        )
        .unwrap();
        assert_eq!(PipelineConfig::from_json(&cfg.to_json()).unwrap(), cfg);
        assert_eq!(cfg.svc_config().seed, 9);
        assert_eq!(cfg.forest_config().seed, 9);
    }
}
