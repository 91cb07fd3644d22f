use crate::{Error, Result};

/// Per-label loss multipliers, kept as exact fractions `numer / denom`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassWeights {
    fractions: Vec<(u64, u64)>,
}

impl ClassWeights {
    pub fn uniform(n_labels: usize) -> Self {
        ClassWeights {
            fractions: vec![(1, 1); n_labels],
        }
    }

    pub fn len(&self) -> usize {
        self.fractions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.fractions.is_empty()
    }

    /// The weight of `label`, rounded once from its exact fraction.
    pub fn get(&self, label: usize) -> f64 {
        let (n, d) = self.fractions[label];
        n as f64 / d as f64
    }

    /// The weight of `label` as `(numerator, denominator)`.
    pub fn fraction(&self, label: usize) -> (u64, u64) {
        self.fractions[label]
    }

    pub fn to_vec(&self) -> Vec<f64> {
        (0..self.len()).map(|l| self.get(l)).collect()
    }
}

/// Balanced weights `N / (K * count(c))`.
pub fn compute_class_weights(labels: &[usize], n_labels: usize) -> Result<ClassWeights> {
    let mut counts = vec![0u64; n_labels];
    for &l in labels {
        if l >= n_labels {
            return Err(Error::invalid(format!(
                "label {l} outside {n_labels} labels"
            )));
        }
        counts[l] += 1;
    }
    if let Some(absent) = counts.iter().position(|&c| c == 0) {
        return Err(Error::AbsentClass(absent.to_string()));
    }
    let n = labels.len() as u64;
    let k = n_labels as u64;
    Ok(ClassWeights {
        fractions: counts.into_iter().map(|c| (n, k * c)).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn imbalanced_pair() {
        let w = compute_class_weights(&[0, 0, 0, 0, 1, 1], 2).unwrap();
        assert_eq!(w.to_vec(), [0.75, 1.5]);
        assert_eq!(w.fraction(0), (6, 8));
    }

    #[test]
    fn balanced_gives_ones() {
        assert_eq!(
            compute_class_weights(&[0, 1, 2], 3).unwrap().to_vec(),
            [1.0; 3]
        );
        assert_eq!(
            compute_class_weights(&[1, 0, 1, 0, 2, 2], 3)
                .unwrap()
                .to_vec(),
            [1.0; 3]
        );
    }

    #[test]
    fn absent_class_is_named() {
        let err = compute_class_weights(&[0, 0, 2], 3).unwrap_err();
        assert!(
            matches!(err, Error::AbsentClass(ref c) if c == "1"),
            "{err}"
        );
    }
}
