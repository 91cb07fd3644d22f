use serde::{Deserialize, Serialize};

use super::TrainingSet;
use crate::sparse::SparseVector;
use crate::{Error, Result};

/// Brute-force cosine k-nearest-neighbour index.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KnnIndex {
    vectors: Vec<SparseVector>,
    labels: Vec<usize>,
    #[serde(skip)]
    norms: Vec<f64>,
    k: usize,
    n_labels: usize,
    n_features: usize,
}

impl KnnIndex {
    pub fn new(data: &TrainingSet, k: usize) -> Result<Self> {
        Self::from_parts(
            data.x().to_vec(),
            data.y().to_vec(),
            k,
            data.n_labels(),
            data.dimension(),
        )
    }

    fn from_parts(
        vectors: Vec<SparseVector>,
        labels: Vec<usize>,
        k: usize,
        n_labels: usize,
        n_features: usize,
    ) -> Result<Self> {
        if vectors.is_empty() {
            return Err(Error::Train("k-NN index needs at least one sample".into()));
        }
        if k == 0 || k > vectors.len() {
            return Err(Error::invalid(format!(
                "k = {k} must lie in 1..={}",
                vectors.len()
            )));
        }
        let norms = vectors.iter().map(SparseVector::norm).collect();
        Ok(KnnIndex {
            vectors,
            labels,
            norms,
            k,
            n_labels,
            n_features,
        })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    /// Restores the cached norms after deserialization and checks shapes.
    pub(crate) fn restore(&mut self, n_labels: usize, n_features: usize) -> Result<()> {
        if self.n_labels != n_labels || self.n_features != n_features {
            return Err(Error::Model(
                "k-NN index shape does not match the model".into(),
            ));
        }
        if self.vectors.len() != self.labels.len()
            || self.labels.iter().any(|&l| l >= n_labels)
            || self.k == 0
            || self.k > self.vectors.len()
        {
            return Err(Error::Model("k-NN index is inconsistent".into()));
        }
        self.norms = self.vectors.iter().map(SparseVector::norm).collect();
        Ok(())
    }

    /// The `k` most similar training points as `(id, similarity)`, most
    /// similar first; equal similarities keep the lower id first.
    pub fn neighbors(&self, x: &SparseVector) -> Vec<(usize, f64)> {
        let qnorm = x.norm();
        let mut scored: Vec<(usize, f64)> = self
            .vectors
            .iter()
            .zip(&self.norms)
            .enumerate()
            .map(|(id, (v, &n))| {
                let sim = if n == 0.0 || qnorm == 0.0 {
                    0.0
                } else {
                    x.dot(v) / (n * qnorm)
                };
                (id, sim)
            })
            .collect();
        let order = |a: &(usize, f64), b: &(usize, f64)| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0));
        if self.k < scored.len() {
            scored.select_nth_unstable_by(self.k - 1, order);
            scored.truncate(self.k);
        }
        scored.sort_by(order);
        scored
    }
}

/// Plurality label among the `k` nearest neighbours. When labels tie on
/// count, the one held by the most similar neighbour wins.
pub fn knn_predict(index: &KnnIndex, x: &SparseVector) -> Result<usize> {
    if index.is_empty() {
        return Err(Error::invalid("k-NN index is empty"));
    }
    let neighbors = index.neighbors(x);
    let mut counts = vec![0usize; index.n_labels];
    for &(id, _) in &neighbors {
        counts[index.labels[id]] += 1;
    }
    let top = counts.iter().copied().max().unwrap_or(0);
    let winner = neighbors
        .iter()
        .map(|&(id, _)| index.labels[id])
        .find(|&l| counts[l] == top)
        .expect("at least one neighbour");
    Ok(winner)
}
