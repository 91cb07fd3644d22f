use serde::{Deserialize, Serialize};

use super::config::PipelineConfig;
use crate::analyzers::{AnalyzerKind, NgramRange};
use crate::{Error, Result};

pub const DEFAULT_GRID_CAP: usize = 10_000;

/// Candidate values per tunable field. An absent field keeps the base
/// configuration's value.
///
/// Enumeration order is lexicographic over the fields in declaration order,
/// with the last field varying fastest.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    /// Upper n for every enabled block's `(1, n)` range.
    pub n: Option<Vec<usize>>,
    pub word_weight: Option<Vec<f64>>,
    pub char_weight: Option<Vec<f64>>,
    pub char_wb_weight: Option<Vec<f64>>,
    /// Per-block vocabulary cap, applied to every enabled block.
    pub max_features: Option<Vec<usize>>,
    #[serde(rename = "C")]
    pub c: Option<Vec<f64>>,
    pub svc_vote: Option<Vec<f64>>,
    pub forest_vote: Option<Vec<f64>>,
    pub knn_vote: Option<Vec<f64>>,
}

fn tenths(lo: u32, hi: u32) -> Vec<f64> {
    (lo..=hi).map(|t| t as f64 / 10.0).collect()
}

impl GridSpec {
    /// The full parameter ranges explored in the experiments. Far above the
    /// default cap; useful as a starting point to slice from.
    pub fn full_ranges() -> Self {
        GridSpec {
            n: Some((1..=5).collect()),
            word_weight: Some(tenths(1, 10)),
            char_weight: Some(tenths(1, 10)),
            char_wb_weight: Some(tenths(1, 10)),
            max_features: Some((3..=10).map(|h| h * 100).collect()),
            c: Some((1..=5).map(f64::from).collect()),
            svc_vote: Some(tenths(1, 6)),
            forest_vote: Some(tenths(1, 6)),
            knn_vote: Some(tenths(1, 6)),
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::invalid(format!("grid spec: {e}")))
    }

    fn axis_lengths(&self) -> [Option<usize>; 9] {
        [
            self.n.as_ref().map(Vec::len),
            self.word_weight.as_ref().map(Vec::len),
            self.char_weight.as_ref().map(Vec::len),
            self.char_wb_weight.as_ref().map(Vec::len),
            self.max_features.as_ref().map(Vec::len),
            self.c.as_ref().map(Vec::len),
            self.svc_vote.as_ref().map(Vec::len),
            self.forest_vote.as_ref().map(Vec::len),
            self.knn_vote.as_ref().map(Vec::len),
        ]
    }

    /// Number of configurations the grid expands to.
    pub fn count(&self) -> u128 {
        self.axis_lengths()
            .iter()
            .map(|l| l.unwrap_or(1) as u128)
            .product()
    }

    fn validate(&self, base: &PipelineConfig) -> Result<()> {
        const NAMES: [&str; 9] = [
            "n",
            "word_weight",
            "char_weight",
            "char_wb_weight",
            "max_features",
            "C",
            "svc_vote",
            "forest_vote",
            "knn_vote",
        ];
        for (name, len) in NAMES.iter().zip(self.axis_lengths()) {
            if len == Some(0) {
                return Err(Error::invalid(format!(
                    "grid field {name} is an empty list"
                )));
            }
        }
        for (name, kind, axis) in [
            ("word_weight", AnalyzerKind::Word, &self.word_weight),
            ("char_weight", AnalyzerKind::Char, &self.char_weight),
            ("char_wb_weight", AnalyzerKind::CharWb, &self.char_wb_weight),
        ] {
            let enabled = base.features.blocks().any(|(k, _)| k == kind);
            if axis.is_some() && !enabled {
                return Err(Error::invalid(format!(
                    "grid varies {name} but the base config has no {} block",
                    kind.name()
                )));
            }
        }
        Ok(())
    }
}

/// Expands `spec` around `base` into every combination, in lexicographic
/// field order. Fails without allocating when the product exceeds `cap`.
pub fn enumerate_grid(
    spec: &GridSpec,
    base: &PipelineConfig,
    cap: usize,
) -> Result<Vec<PipelineConfig>> {
    spec.validate(base)?;
    let count = spec.count();
    if count > cap as u128 {
        return Err(Error::GridTooLarge { count, cap });
    }
    let lengths: Vec<usize> = spec.axis_lengths().iter().map(|l| l.unwrap_or(1)).collect();
    let mut out = Vec::with_capacity(count as usize);
    for flat in 0..count as usize {
        let mut digits = [0usize; 9];
        let mut rest = flat;
        for axis in (0..9).rev() {
            digits[axis] = rest % lengths[axis];
            rest /= lengths[axis];
        }
        let mut cfg = base.clone();
        if let Some(ns) = &spec.n {
            let range = NgramRange::up_to(ns[digits[0]])?;
            cfg.features.blocks_mut().for_each(|b| b.range = range);
        }
        for (axis, kind, values) in [
            (1, AnalyzerKind::Word, &spec.word_weight),
            (2, AnalyzerKind::Char, &spec.char_weight),
            (3, AnalyzerKind::CharWb, &spec.char_wb_weight),
        ] {
            if let (Some(values), Some(block)) = (values, cfg.features.get_mut(kind).as_mut()) {
                block.weight = values[digits[axis]];
            }
        }
        if let Some(caps) = &spec.max_features {
            let cap = caps[digits[4]];
            cfg.features
                .blocks_mut()
                .for_each(|b| b.max_features = Some(cap));
        }
        if let Some(cs) = &spec.c {
            cfg.svc.c = cs[digits[5]];
        }
        if let Some(v) = &spec.svc_vote {
            cfg.vote_weights.svc = v[digits[6]];
        }
        if let Some(v) = &spec.forest_vote {
            cfg.vote_weights.forest = v[digits[7]];
        }
        if let Some(v) = &spec.knn_vote {
            cfg.vote_weights.knn = v[digits[8]];
        }
        cfg.validate()?;
        out.push(cfg);
    }
    Ok(out)
}
