//! Sample-averaged multi-label precision, recall and F1.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabelCounts {
    pub tp: u64,
    pub fp: u64,
    #[serde(rename = "fn")]
    pub fn_: u64,
}

impl LabelCounts {
    pub fn f1(&self) -> f64 {
        let denom = 2 * self.tp + self.fp + self.fn_;
        if denom == 0 {
            0.0
        } else {
            2.0 * self.tp as f64 / denom as f64
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub macro_f1: f64,
    pub n_samples: usize,
    pub per_label: BTreeMap<String, LabelCounts>,
}

impl MetricsReport {
    /// `key=value` lines; per-label counts use dotted keys.
    pub fn to_key_value(&self) -> String {
        let mut out = String::new();
        writeln!(out, "precision={}", self.precision).unwrap();
        writeln!(out, "recall={}", self.recall).unwrap();
        writeln!(out, "f1={}", self.f1).unwrap();
        writeln!(out, "macro_f1={}", self.macro_f1).unwrap();
        writeln!(out, "n_samples={}", self.n_samples).unwrap();
        for (label, c) in &self.per_label {
            writeln!(out, "per_label.{label}.tp={}", c.tp).unwrap();
            writeln!(out, "per_label.{label}.fp={}", c.fp).unwrap();
            writeln!(out, "per_label.{label}.fn={}", c.fn_).unwrap();
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Harmonic mean of precision and recall (0 when both are 0).
pub fn harmonic_f1(precision: f64, recall: f64) -> f64 {
    if precision + recall > 0.0 {
        2.0 * precision * recall / (precision + recall)
    } else {
        0.0
    }
}

/// Scores predicted label sets against gold sets.
///
/// Precision and recall are averaged over samples (an empty prediction has
/// precision 0) and F1 is their harmonic mean. `macro_f1` averages
/// per-label F1 over every label seen in either side.
pub fn evaluate<L>(preds: &[BTreeSet<L>], golds: &[BTreeSet<L>]) -> Result<MetricsReport>
where
    L: Ord + Clone + ToString,
{
    if preds.len() != golds.len() {
        return Err(Error::invalid(format!(
            "{} predictions for {} gold samples",
            preds.len(),
            golds.len()
        )));
    }
    if golds.is_empty() {
        return Err(Error::invalid("nothing to evaluate"));
    }
    let mut p_sum = 0.0;
    let mut r_sum = 0.0;
    let mut per_label: BTreeMap<L, LabelCounts> = BTreeMap::new();
    for (i, (pred, gold)) in preds.iter().zip(golds).enumerate() {
        if gold.is_empty() {
            return Err(Error::invalid(format!(
                "sample {i} has an empty gold label set"
            )));
        }
        let hits = pred.intersection(gold).count();
        if !pred.is_empty() {
            p_sum += hits as f64 / pred.len() as f64;
        }
        r_sum += hits as f64 / gold.len() as f64;
        for l in pred {
            let c = per_label.entry(l.clone()).or_default();
            if gold.contains(l) {
                c.tp += 1;
            } else {
                c.fp += 1;
            }
        }
        for l in gold.difference(pred) {
            per_label.entry(l.clone()).or_default().fn_ += 1;
        }
    }
    let n = golds.len() as f64;
    let precision = p_sum / n;
    let recall = r_sum / n;
    let macro_f1 = per_label.values().map(LabelCounts::f1).sum::<f64>() / per_label.len() as f64;
    Ok(MetricsReport {
        precision,
        recall,
        f1: harmonic_f1(precision, recall),
        macro_f1,
        n_samples: golds.len(),
        per_label: per_label
            .into_iter()
            .map(|(l, c)| (l.to_string(), c))
            .collect(),
    })
}
