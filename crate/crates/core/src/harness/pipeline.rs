use std::collections::BTreeSet;

use super::config::{ClassifierKind, PipelineConfig};
use crate::classifiers::{
    compute_class_weights, forest_predict, knn_predict, svc_margins, train_linear_svc,
    train_random_forest, Forest, KnnIndex, LinearModel, TrainingSet,
};
use crate::corpus::{Dataset, LabelSpace};
use crate::ensemble::{decide_labels, decide_voted, weighted_hard_vote};
use crate::metrics::{evaluate, MetricsReport};
use crate::par;
use crate::sparse::SparseVector;
use crate::vectorizer::{fit_union, transform_all, transform_union, UnionModel};
use crate::{Error, Result};

/// A fitted feature union plus whichever classifiers the config needs.
#[derive(Debug, Clone, PartialEq)]
pub struct Pipeline {
    pub(crate) config: PipelineConfig,
    pub(crate) labels: LabelSpace,
    pub(crate) union: UnionModel,
    pub(crate) svc: Option<LinearModel>,
    pub(crate) forest: Option<Forest>,
    pub(crate) knn: Option<KnnIndex>,
}

/// Single-label view of a multi-label corpus: one sample per
/// (document, label) pair. Unlabelled documents are skipped.
fn expand(vectors: Vec<SparseVector>, dataset: &Dataset) -> (Vec<SparseVector>, Vec<usize>) {
    let mut x = Vec::with_capacity(vectors.len());
    let mut y = Vec::with_capacity(vectors.len());
    for (v, doc) in vectors.into_iter().zip(dataset.documents()) {
        for &label in &doc.labels {
            x.push(v.clone());
            y.push(label);
        }
    }
    (x, y)
}

impl Pipeline {
    /// Fits the union on `train` and trains the configured classifier(s).
    pub fn fit(train: &Dataset, config: &PipelineConfig) -> Result<Pipeline> {
        Self::fit_as(train, config, config.classifier)
    }

    fn fit_as(train: &Dataset, config: &PipelineConfig, kind: ClassifierKind) -> Result<Pipeline> {
        config.validate()?;
        if train.is_empty() {
            return Err(Error::Fit("training set is empty".into()));
        }
        let labels = train.label_space().clone();
        let union = fit_union(train, &config.features)?;
        let vectors = transform_all(&train.texts(), &union);
        let (x, y) = expand(vectors, train);
        let data = TrainingSet::new(x, y, labels.len(), union.dimension())?;

        let want_svc = matches!(kind, ClassifierKind::Svc | ClassifierKind::Vote);
        let want_forest = matches!(kind, ClassifierKind::Forest | ClassifierKind::Vote);
        let want_knn = matches!(kind, ClassifierKind::Knn | ClassifierKind::Vote);

        let fit_svc = || -> Result<Option<LinearModel>> {
            if !want_svc {
                return Ok(None);
            }
            let svc_cfg = config.svc_config();
            let weights = if svc_cfg.balanced {
                if let Some(absent) = (0..labels.len()).find(|l| !data.y().contains(l)) {
                    let name = labels.name(absent).unwrap_or_default();
                    return Err(Error::AbsentClass(name.to_owned()));
                }
                Some(compute_class_weights(data.y(), labels.len())?)
            } else {
                None
            };
            train_linear_svc(&data, &svc_cfg, weights.as_ref()).map(Some)
        };
        let fit_others = || -> Result<(Option<Forest>, Option<KnnIndex>)> {
            let forest = if want_forest {
                Some(train_random_forest(&data, &config.forest_config())?)
            } else {
                None
            };
            let knn = if want_knn {
                Some(KnnIndex::new(&data, config.k)?)
            } else {
                None
            };
            Ok((forest, knn))
        };
        let (svc, others) = par::join(fit_svc, fit_others);
        let svc = svc?;
        let (forest, knn) = others?;

        Ok(Pipeline {
            config: config.clone(),
            labels,
            union,
            svc,
            forest,
            knn,
        })
    }

    pub fn config(&self) -> &PipelineConfig {
        &self.config
    }

    pub fn label_space(&self) -> &LabelSpace {
        &self.labels
    }

    pub fn union(&self) -> &UnionModel {
        &self.union
    }

    fn missing(kind: &str) -> Error {
        Error::Model(format!("pipeline has no fitted {kind} classifier"))
    }

    /// Predicted label set for one already-vectorized document, using the
    /// given classifier (which must have been fitted).
    fn predict_vector_as(&self, x: &SparseVector, kind: ClassifierKind) -> Result<BTreeSet<usize>> {
        let policy = &self.config.policy;
        match kind {
            ClassifierKind::Svc => {
                let svc = self.svc.as_ref().ok_or_else(|| Self::missing("svc"))?;
                decide_labels(&svc_margins(svc, x)?, policy)
            }
            ClassifierKind::Forest => {
                let forest = self
                    .forest
                    .as_ref()
                    .ok_or_else(|| Self::missing("forest"))?;
                decide_voted(forest_predict(forest, x), policy)
            }
            ClassifierKind::Knn => {
                let knn = self.knn.as_ref().ok_or_else(|| Self::missing("knn"))?;
                decide_voted(knn_predict(knn, x)?, policy)
            }
            ClassifierKind::Vote => {
                let svc = self.svc.as_ref().ok_or_else(|| Self::missing("svc"))?;
                let forest = self
                    .forest
                    .as_ref()
                    .ok_or_else(|| Self::missing("forest"))?;
                let knn = self.knn.as_ref().ok_or_else(|| Self::missing("knn"))?;
                let votes = [
                    svc.predict(x)?,
                    forest_predict(forest, x),
                    knn_predict(knn, x)?,
                ];
                decide_voted(weighted_hard_vote(votes, &self.config.vote_weights), policy)
            }
        }
    }

    /// Predicted label indices for one text.
    pub fn predict(&self, text: &str) -> Result<BTreeSet<usize>> {
        self.predict_vector_as(&transform_union(text, &self.union), self.config.classifier)
    }

    /// Predicted label indices for many texts, in input order.
    pub fn predict_all(&self, texts: &[&str]) -> Result<Vec<BTreeSet<usize>>> {
        self.predict_all_as(texts, self.config.classifier)
    }

    fn predict_all_as(&self, texts: &[&str], kind: ClassifierKind) -> Result<Vec<BTreeSet<usize>>> {
        par::map(texts, |t| {
            self.predict_vector_as(&transform_union(t, &self.union), kind)
        })
        .into_iter()
        .collect()
    }

    fn score_as(&self, eval: &Dataset, kind: ClassifierKind) -> Result<MetricsReport> {
        let preds: Vec<BTreeSet<String>> = self
            .predict_all_as(&eval.texts(), kind)?
            .iter()
            .map(|p| self.labels.names_of(p))
            .collect();
        evaluate(&preds, &eval.label_names())
    }

    /// Scores predictions on `eval` against its gold labels, by name.
    pub fn score(&self, eval: &Dataset) -> Result<MetricsReport> {
        self.score_as(eval, self.config.classifier)
    }
}

/// Fits on `train`, predicts `eval` and scores the predictions.
pub fn run_pipeline(
    train: &Dataset,
    eval: &Dataset,
    cfg: &PipelineConfig,
) -> Result<MetricsReport> {
    Pipeline::fit(train, cfg)?.score(eval)
}

/// Trains all three base classifiers once and reports each of them next to
/// the weighted vote, in the order svc, forest, knn, vote.
pub fn compare_classifiers(
    train: &Dataset,
    eval: &Dataset,
    cfg: &PipelineConfig,
) -> Result<Vec<(ClassifierKind, MetricsReport)>> {
    let pipeline = Pipeline::fit_as(train, cfg, ClassifierKind::Vote)?;
    [
        ClassifierKind::Svc,
        ClassifierKind::Forest,
        ClassifierKind::Knn,
        ClassifierKind::Vote,
    ]
    .into_iter()
    .map(|kind| Ok((kind, pipeline.score_as(eval, kind)?)))
    .collect()
}
