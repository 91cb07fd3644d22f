//! Versioned JSON persistence for fitted pipelines.
//!
//! Floats are written in shortest round-trip form and read back with exact
//! parsing, so a loaded model predicts bit-identically. Vocabularies are
//! stored as sorted term lists.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::config::PipelineConfig;
use super::pipeline::Pipeline;
use crate::classifiers::{Forest, KnnIndex, LinearModel};
use crate::corpus::LabelSpace;
use crate::vectorizer::UnionModel;
use crate::{Error, Result};

pub const FORMAT_VERSION: u64 = 1;

#[derive(Serialize)]
struct BundleRef<'a> {
    format_version: u64,
    config: &'a PipelineConfig,
    labels: &'a LabelSpace,
    union: &'a UnionModel,
    svc: &'a Option<LinearModel>,
    forest: &'a Option<Forest>,
    knn: &'a Option<KnnIndex>,
}

#[derive(Deserialize)]
struct Bundle {
    config: PipelineConfig,
    labels: LabelSpace,
    union: UnionModel,
    svc: Option<LinearModel>,
    forest: Option<Forest>,
    knn: Option<KnnIndex>,
}

#[derive(Deserialize)]
struct VersionProbe {
    format_version: u64,
}

impl Pipeline {
    pub fn to_json(&self) -> String {
        let bundle = BundleRef {
            format_version: FORMAT_VERSION,
            config: &self.config,
            labels: &self.labels,
            union: &self.union,
            svc: &self.svc,
            forest: &self.forest,
            knn: &self.knn,
        };
        let mut json = serde_json::to_string(&bundle).expect("bundle serializes");
        json.push('\n');
        json
    }

    pub fn from_json(text: &str) -> Result<Pipeline> {
        let probe: VersionProbe = serde_json::from_str(text)?;
        if probe.format_version != FORMAT_VERSION {
            return Err(Error::Version {
                found: probe.format_version,
                expected: FORMAT_VERSION,
            });
        }
        let b: Bundle = serde_json::from_str(text)?;
        b.config
            .validate()
            .map_err(|e| Error::Model(format!("stored config is invalid: {e}")))?;
        let n_labels = b.labels.len();
        let dim = b.union.dimension();
        if let Some(svc) = &b.svc {
            svc.check(n_labels, dim)?;
        }
        if let Some(forest) = &b.forest {
            forest.check(n_labels, dim)?;
        }
        let mut knn = b.knn;
        if let Some(knn) = knn.as_mut() {
            knn.restore(n_labels, dim)?;
        }
        let pipeline = Pipeline {
            config: b.config,
            labels: b.labels,
            union: b.union,
            svc: b.svc,
            forest: b.forest,
            knn,
        };
        let kind = pipeline.config.classifier;
        use super::config::ClassifierKind::*;
        let complete = match kind {
            Svc => pipeline.svc.is_some(),
            Forest => pipeline.forest.is_some(),
            Knn => pipeline.knn.is_some(),
            Vote => pipeline.svc.is_some() && pipeline.forest.is_some() && pipeline.knn.is_some(),
        };
        if !complete {
            return Err(Error::Model(format!(
                "model lacks the {} classifier",
                kind.name()
            )));
        }
        Ok(pipeline)
    }
}

pub fn save_model(pipeline: &Pipeline, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, pipeline.to_json())?;
    Ok(())
}

pub fn load_model(path: impl AsRef<Path>) -> Result<Pipeline> {
    Pipeline::from_json(&fs::read_to_string(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::make_synthetic;
    use crate::harness::preset;

    #[test]
    fn round_trip_is_exact() {
        let ds = make_synthetic(3, 15, 12, 0.2, 4).unwrap();
        let p = Pipeline::fit(&ds, &preset("exp2-3").unwrap()).unwrap();
        let json = p.to_json();
        let back = Pipeline::from_json(&json).unwrap();
        assert_eq!(back, p);
        assert_eq!(back.to_json(), json);
    }

    #[test]
    fn version_mismatch_reports_both() {
        let ds = make_synthetic(2, 10, 8, 0.0, 4).unwrap();
        let json = Pipeline::fit(&ds, &preset("baseline").unwrap())
            .unwrap()
            .to_json();
        let bumped = json.replacen("\"format_version\":1", "\"format_version\":999", 1);
        match Pipeline::from_json(&bumped).unwrap_err() {
            Error::Version { found, expected } => {
                assert_eq!((found, expected), (999, FORMAT_VERSION))
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn truncated_file_is_a_parse_error() {
        let ds = make_synthetic(2, 10, 8, 0.0, 4).unwrap();
        let json = Pipeline::fit(&ds, &preset("baseline").unwrap())
            .unwrap()
            .to_json();
        assert!(matches!(
            Pipeline::from_json(&json[..json.len() / 2]),
            Err(Error::Json(_))
        ));
    }

    #[test]
    fn inconsistent_shapes_rejected() {
        let ds = make_synthetic(2, 10, 8, 0.0, 4).unwrap();
        let p = Pipeline::fit(&ds, &preset("baseline").unwrap()).unwrap();
        let mut broken = p.clone();
        broken.svc.as_mut().unwrap().weights[0].pop();
        broken.svc.as_mut().unwrap().n_features -= 1;
        assert!(Pipeline::from_json(&broken.to_json()).is_err());
        let mut missing = p;
        missing.svc = None;
        assert!(Pipeline::from_json(&missing.to_json()).is_err());
    }
}
