//! Weighted hard voting and decision policies.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Vote weights for the linear SVC, the forest and k-NN, in that order.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VoteWeights {
    pub svc: f64,
    pub forest: f64,
    pub knn: f64,
}

impl Default for VoteWeights {
    fn default() -> Self {
        VoteWeights {
            svc: 1.0,
            forest: 1.0,
            knn: 1.0,
        }
    }
}

impl VoteWeights {
    pub fn new(svc: f64, forest: f64, knn: f64) -> Self {
        VoteWeights { svc, forest, knn }
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.svc, self.forest, self.knn]
    }

    pub fn validate(&self) -> Result<()> {
        if self.as_array().iter().any(|w| !(*w > 0.0 && w.is_finite())) {
            return Err(Error::invalid(format!(
                "vote weights must be positive, got {:?}",
                self.as_array()
            )));
        }
        Ok(())
    }
}

/// Relative tolerance under which two weight sums count as tied, so that
/// e.g. 0.1 + 0.2 ties with 0.3.
const TIE_EPS: f64 = 1e-9;

/// Weighted hard vote over the three classifiers' labels.
///
/// Each label scores the summed weight of the classifiers voting for it.
/// Among labels tied for the top score, the one backed by the heaviest
/// single classifier wins; equal weights fall back to the fixed priority
/// SVC, forest, k-NN.
pub fn weighted_hard_vote(votes: [usize; 3], weights: &VoteWeights) -> usize {
    let w = weights.as_array();
    let score = |label: usize| -> f64 {
        votes
            .iter()
            .zip(&w)
            .filter(|(v, _)| **v == label)
            .map(|(_, w)| w)
            .sum()
    };
    let scores = votes.map(score);
    let top = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let tol = TIE_EPS * top.abs().max(1.0);

    let mut winner: Option<usize> = None;
    for k in 0..votes.len() {
        if top - scores[k] > tol {
            continue;
        }
        match winner {
            None => winner = Some(k),
            Some(best) if w[k] > w[best] + TIE_EPS * w[best] => winner = Some(k),
            _ => {}
        }
    }
    votes[winner.expect("three votes")]
}

/// Rule turning scores (or a single voted label) into a label set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case", tag = "kind", content = "value")]
pub enum DecisionPolicy {
    #[default]
    Argmax,
    Threshold(f64),
    TopK(usize),
}

impl DecisionPolicy {
    pub fn validate(&self) -> Result<()> {
        match self {
            DecisionPolicy::TopK(0) => Err(Error::invalid("top-k needs k >= 1")),
            DecisionPolicy::Threshold(t) if !t.is_finite() => {
                Err(Error::invalid("threshold must be finite"))
            }
            _ => Ok(()),
        }
    }
}

/// Applies `policy` to per-label scores.
pub fn decide_labels(scores: &[f64], policy: &DecisionPolicy) -> Result<BTreeSet<usize>> {
    if scores.is_empty() {
        return Err(Error::invalid("no scores to decide from"));
    }
    let argmax = || -> BTreeSet<usize> { BTreeSet::from([crate::classifiers::argmax(scores)]) };
    match *policy {
        DecisionPolicy::Argmax => Ok(argmax()),
        DecisionPolicy::Threshold(tau) => {
            let set: BTreeSet<usize> = (0..scores.len()).filter(|&c| scores[c] > tau).collect();
            Ok(if set.is_empty() { argmax() } else { set })
        }
        DecisionPolicy::TopK(k) => {
            if k == 0 || k > scores.len() {
                return Err(Error::invalid(format!(
                    "top-k with k = {k} over {} labels",
                    scores.len()
                )));
            }
            let mut order: Vec<usize> = (0..scores.len()).collect();
            order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]).then(a.cmp(&b)));
            Ok(order.into_iter().take(k).collect())
        }
    }
}

/// Voting produces one label, so only `Argmax` applies.
pub fn decide_voted(label: usize, policy: &DecisionPolicy) -> Result<BTreeSet<usize>> {
    match policy {
        DecisionPolicy::Argmax => Ok(BTreeSet::from([label])),
        other => Err(Error::invalid(format!(
            "policy {other:?} needs per-label scores; hard votes support only argmax"
        ))),
    }
}
