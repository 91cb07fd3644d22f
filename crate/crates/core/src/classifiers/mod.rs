//! The three base classifiers and the training-set type they share.

mod forest;
mod knn;
mod svc;
mod weights;

pub use forest::{forest_predict, train_random_forest, Forest, ForestConfig, Node, Tree};
pub use knn::{knn_predict, KnnIndex};
pub use svc::{
    svc_margins, train_binary_svc, train_linear_svc, BinarySvc, EpochStats, LinearModel, SvcConfig,
};
pub use weights::{compute_class_weights, ClassWeights};

use crate::sparse::SparseVector;
use crate::{Error, Result};

/// Single-label training samples over a fixed feature dimension.
#[derive(Debug, Clone)]
pub struct TrainingSet {
    x: Vec<SparseVector>,
    y: Vec<usize>,
    n_labels: usize,
    dimension: usize,
}

impl TrainingSet {
    pub fn new(
        x: Vec<SparseVector>,
        y: Vec<usize>,
        n_labels: usize,
        dimension: usize,
    ) -> Result<Self> {
        if x.len() != y.len() {
            return Err(Error::Train(format!(
                "{} feature vectors but {} targets",
                x.len(),
                y.len()
            )));
        }
        if x.len() < 2 {
            return Err(Error::Train("need at least 2 training samples".into()));
        }
        if let Some(&bad) = y.iter().find(|&&l| l >= n_labels) {
            return Err(Error::Train(format!(
                "target {bad} outside {n_labels} labels"
            )));
        }
        for (i, v) in x.iter().enumerate() {
            if !v.is_finite() {
                return Err(Error::Train(format!(
                    "sample {i} has non-finite feature values"
                )));
            }
            if v.min_dimension() > dimension {
                return Err(Error::DimensionMismatch {
                    expected: dimension,
                    got: v.min_dimension(),
                });
            }
        }
        Ok(TrainingSet {
            x,
            y,
            n_labels,
            dimension,
        })
    }

    pub fn x(&self) -> &[SparseVector] {
        &self.x
    }

    pub fn y(&self) -> &[usize] {
        &self.y
    }

    pub fn n_labels(&self) -> usize {
        self.n_labels
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    fn distinct_labels(&self) -> usize {
        let mut seen = vec![false; self.n_labels];
        self.y.iter().for_each(|&l| seen[l] = true);
        seen.into_iter().filter(|&s| s).count()
    }
}

/// Index of the largest value; ties go to the lowest index.
pub(crate) fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate().skip(1) {
        if v > values[best] {
            best = i;
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn training_set_validation() {
        let v = |p: &[(usize, f64)]| SparseVector::from_pairs(p.iter().copied()).unwrap();
        assert!(TrainingSet::new(vec![v(&[(0, 1.0)])], vec![0], 2, 2).is_err());
        assert!(TrainingSet::new(vec![v(&[]), v(&[])], vec![0], 2, 2).is_err());
        assert!(TrainingSet::new(vec![v(&[]), v(&[])], vec![0, 2], 2, 2).is_err());
        assert!(matches!(
            TrainingSet::new(vec![v(&[(5, 1.0)]), v(&[])], vec![0, 1], 2, 2),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(TrainingSet::new(vec![v(&[(0, f64::NAN)]), v(&[])], vec![0, 1], 2, 2).is_err());
        assert!(TrainingSet::new(vec![v(&[(1, 1.0)]), v(&[])], vec![0, 1], 2, 2).is_ok());
    }

    #[test]
    fn argmax_prefers_lowest_on_ties() {
        assert_eq!(argmax(&[0.2, 0.9, -0.1]), 1);
        assert_eq!(argmax(&[1.0, 1.0, 0.5]), 0);
        assert_eq!(argmax(&[0.0, 2.0, 2.0]), 1);
    }
}
