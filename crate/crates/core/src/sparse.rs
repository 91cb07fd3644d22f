//! Sorted sparse vectors, the feature representation shared by every model.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// `(index, value)` pairs with strictly increasing indices and no stored
/// zeros.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SparseVector {
    indices: Vec<usize>,
    values: Vec<f64>,
}

impl SparseVector {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a vector from pairs, validating order and dropping zeros.
    pub fn from_pairs<I: IntoIterator<Item = (usize, f64)>>(pairs: I) -> Result<Self> {
        let mut v = SparseVector::new();
        for (index, value) in pairs {
            if let Some(&last) = v.indices.last() {
                if index <= last {
                    return Err(Error::invalid(format!(
                        "sparse indices must be strictly increasing ({last} then {index})"
                    )));
                }
            }
            if value != 0.0 {
                v.indices.push(index);
                v.values.push(value);
            }
        }
        Ok(v)
    }

    /// Dense-to-sparse conversion.
    pub fn from_dense(dense: &[f64]) -> Self {
        let mut v = SparseVector::new();
        for (i, &x) in dense.iter().enumerate() {
            if x != 0.0 {
                v.indices.push(i);
                v.values.push(x);
            }
        }
        v
    }

    /// Appends an entry past the current last index. Zeros are skipped.
    pub(crate) fn push(&mut self, index: usize, value: f64) {
        debug_assert!(self.indices.last().is_none_or(|&l| l < index));
        if value != 0.0 {
            self.indices.push(index);
            self.values.push(value);
        }
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.indices
            .iter()
            .copied()
            .zip(self.values.iter().copied())
    }

    /// Value at `index`, zero when absent.
    pub fn get(&self, index: usize) -> f64 {
        match self.indices.binary_search(&index) {
            Ok(pos) => self.values[pos],
            Err(_) => 0.0,
        }
    }

    /// One past the largest stored index (0 when empty).
    pub fn min_dimension(&self) -> usize {
        self.indices.last().map_or(0, |&i| i + 1)
    }

    pub fn squared_norm(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum()
    }

    pub fn norm(&self) -> f64 {
        self.squared_norm().sqrt()
    }

    pub fn dot(&self, other: &SparseVector) -> f64 {
        let (mut i, mut j) = (0, 0);
        let mut acc = 0.0;
        while i < self.indices.len() && j < other.indices.len() {
            match self.indices[i].cmp(&other.indices[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    acc += self.values[i] * other.values[j];
                    i += 1;
                    j += 1;
                }
            }
        }
        acc
    }

    /// Dot product with a dense vector; indices past its end read as zero.
    pub fn dot_dense(&self, dense: &[f64]) -> f64 {
        self.iter()
            .map(|(i, v)| dense.get(i).map_or(0.0, |w| w * v))
            .sum()
    }

    /// Multiplies every value by `s` (which must be non-zero).
    pub fn scale(&mut self, s: f64) {
        debug_assert!(s != 0.0);
        self.values.iter_mut().for_each(|v| *v *= s);
    }

    /// Concatenation helper: appends `other` with indices shifted by `offset`.
    pub fn extend_shifted(&mut self, other: &SparseVector, offset: usize) {
        for (i, v) in other.iter() {
            self.push(i + offset, v);
        }
    }

    /// Entries with `lo <= index < hi`, re-based to start at zero.
    pub fn slice(&self, lo: usize, hi: usize) -> SparseVector {
        let start = self.indices.partition_point(|&i| i < lo);
        let end = self.indices.partition_point(|&i| i < hi);
        SparseVector {
            indices: self.indices[start..end].iter().map(|i| i - lo).collect(),
            values: self.values[start..end].to_vec(),
        }
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn rejects_unsorted_pairs() {
        assert!(SparseVector::from_pairs([(2, 1.0), (1, 1.0)]).is_err());
        assert!(SparseVector::from_pairs([(1, 1.0), (1, 2.0)]).is_err());
    }

    #[test]
    fn drops_zeros() {
        let v = SparseVector::from_pairs([(0, 0.0), (3, 2.0)]).unwrap();
        assert_eq!(v.indices(), [3]);
        assert_eq!(v.get(0), 0.0);
        assert_eq!(v.get(3), 2.0);
    }

    #[test]
    fn slice_and_shift() {
        let v = SparseVector::from_pairs([(0, 0.5), (4, 0.3), (13, 1.0)]).unwrap();
        let mid = v.slice(3, 13);
        assert_eq!(mid.indices(), [1]);
        let mut joined = SparseVector::new();
        joined.extend_shifted(&v.slice(0, 3), 0);
        joined.extend_shifted(&mid, 3);
        joined.extend_shifted(&v.slice(13, 21), 13);
        assert_eq!(joined, v);
    }

    proptest! {
        #[test]
        fn dot_matches_dense(a in prop::collection::vec(-3.0f64..3.0, 12),
                             b in prop::collection::vec(-3.0f64..3.0, 12)) {
            let sa = SparseVector::from_dense(&a);
            let sb = SparseVector::from_dense(&b);
            let dense: f64 = a.iter().zip(&b).map(|(x, y)| x * y).sum();
            prop_assert!((sa.dot(&sb) - dense).abs() < 1e-9);
            prop_assert!((sa.dot_dense(&b) - dense).abs() < 1e-9);
        }
    }
}
