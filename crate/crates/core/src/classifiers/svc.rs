//! One-vs-rest linear SVM with squared hinge loss, trained by dual
//! coordinate descent.
//!
//! Per label the primal is
//! `min ½‖w‖² + Σᵢ Cᵢ · max(0, 1 − sᵢ(w·xᵢ + b))²` with `Cᵢ = C · αᵢ`,
//! where αᵢ is the class weight of sample i. The bias is a constant-1
//! feature and is regularized with the rest of `w`. The dual is
//! `max Σ aᵢ − ½‖Σ aᵢ sᵢ x̄ᵢ‖² − Σ aᵢ² / (4Cᵢ)` over `aᵢ ≥ 0`.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{argmax, compute_class_weights, ClassWeights, TrainingSet};
use crate::par;
use crate::sparse::SparseVector;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SvcConfig {
    #[serde(rename = "C")]
    pub c: f64,
    pub balanced: bool,
    pub tol: f64,
    pub max_epochs: usize,
    #[serde(skip)]
    pub seed: u64,
}

impl Default for SvcConfig {
    fn default() -> Self {
        SvcConfig {
            c: 1.0,
            balanced: false,
            tol: 1e-4,
            max_epochs: 1000,
            seed: 0,
        }
    }
}

impl SvcConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.c > 0.0 && self.c.is_finite()) {
            return Err(Error::invalid(format!(
                "C must be positive, got {}",
                self.c
            )));
        }
        if self.tol.is_nan() || self.tol <= 0.0 {
            return Err(Error::invalid(format!(
                "tol must be positive, got {}",
                self.tol
            )));
        }
        if self.max_epochs == 0 {
            return Err(Error::invalid("max_epochs must be at least 1"));
        }
        Ok(())
    }
}

/// Progress after one pass over the samples.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpochStats {
    /// Dual objective (maximization form) at the end of the epoch.
    pub dual_objective: f64,
    /// Largest projected-gradient magnitude seen during the epoch.
    pub max_violation: f64,
}

/// A trained binary problem with its optimization history.
#[derive(Debug, Clone)]
pub struct BinarySvc {
    pub weights: Vec<f64>,
    pub bias: f64,
    pub dual: Vec<f64>,
    pub epochs: Vec<EpochStats>,
    pub converged: bool,
}

impl BinarySvc {
    pub fn decision(&self, x: &SparseVector) -> f64 {
        x.dot_dense(&self.weights) + self.bias
    }
}

fn dual_objective(dual: &[f64], diag: &[f64], w: &[f64], b: f64) -> f64 {
    let linear: f64 = dual.iter().sum();
    let wnorm: f64 = w.iter().map(|v| v * v).sum::<f64>() + b * b;
    let penalty: f64 = dual.iter().zip(diag).map(|(a, d)| a * a * d).sum();
    linear - 0.5 * wnorm - 0.5 * penalty
}

/// Solves one binary squared-hinge problem.
///
/// `signs[i]` is ±1 and `costs[i]` is the per-sample `Cᵢ`. Samples are
/// visited in a fresh permutation each epoch, drawn from `rng`.
pub fn train_binary_svc(
    x: &[SparseVector],
    signs: &[f64],
    costs: &[f64],
    dimension: usize,
    tol: f64,
    max_epochs: usize,
    rng: &mut ChaCha8Rng,
) -> BinarySvc {
    let n = x.len();
    let diag: Vec<f64> = costs.iter().map(|c| 0.5 / c).collect();
    let qdiag: Vec<f64> = x
        .iter()
        .zip(&diag)
        .map(|(xi, d)| xi.squared_norm() + 1.0 + d)
        .collect();
    let mut w = vec![0.0; dimension];
    let mut b = 0.0;
    let mut dual = vec![0.0; n];
    let mut order: Vec<usize> = (0..n).collect();
    let mut epochs = Vec::new();
    let mut converged = false;

    for _ in 0..max_epochs {
        order.shuffle(rng);
        let mut max_violation = 0.0f64;
        for &i in &order {
            let xi = &x[i];
            let s = signs[i];
            let g = s * (xi.dot_dense(&w) + b) - 1.0 + diag[i] * dual[i];
            let pg = if dual[i] == 0.0 { g.min(0.0) } else { g };
            max_violation = max_violation.max(pg.abs());
            if pg != 0.0 {
                let old = dual[i];
                dual[i] = (old - g / qdiag[i]).max(0.0);
                let step = (dual[i] - old) * s;
                if step != 0.0 {
                    for (j, v) in xi.iter() {
                        w[j] += step * v;
                    }
                    b += step;
                }
            }
        }
        epochs.push(EpochStats {
            dual_objective: dual_objective(&dual, &diag, &w, b),
            max_violation,
        });
        if max_violation < tol {
            converged = true;
            break;
        }
    }

    BinarySvc {
        weights: w,
        bias: b,
        dual,
        epochs,
        converged,
    }
}

/// Per-label weight vectors and biases.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearModel {
    pub weights: Vec<Vec<f64>>,
    pub bias: Vec<f64>,
    pub n_features: usize,
}

impl LinearModel {
    pub fn n_labels(&self) -> usize {
        self.bias.len()
    }

    /// Label with the highest margin (ties → lowest index).
    pub fn predict(&self, x: &SparseVector) -> Result<usize> {
        Ok(argmax(&svc_margins(self, x)?))
    }

    pub(crate) fn check(&self, n_labels: usize, n_features: usize) -> Result<()> {
        if self.n_features != n_features {
            return Err(Error::DimensionMismatch {
                expected: n_features,
                got: self.n_features,
            });
        }
        if self.weights.len() != n_labels
            || self.bias.len() != n_labels
            || self.weights.iter().any(|w| w.len() != n_features)
        {
            return Err(Error::Model(
                "linear model shape does not match its labels".into(),
            ));
        }
        Ok(())
    }
}

/// Trains one binary problem per label (label vs. the rest).
pub fn train_linear_svc(
    data: &TrainingSet,
    cfg: &SvcConfig,
    weights: Option<&ClassWeights>,
) -> Result<LinearModel> {
    cfg.validate()?;
    if data.distinct_labels() < 2 {
        return Err(Error::Train(
            "linear SVC needs at least 2 distinct labels".into(),
        ));
    }
    let balanced;
    let weights = match (weights, cfg.balanced) {
        (Some(w), _) => w,
        (None, true) => {
            balanced = compute_class_weights(data.y(), data.n_labels())?;
            &balanced
        }
        (None, false) => {
            balanced = ClassWeights::uniform(data.n_labels());
            &balanced
        }
    };
    let costs: Vec<f64> = data.y().iter().map(|&l| cfg.c * weights.get(l)).collect();

    let per_label = par::map_range(data.n_labels(), |label| {
        let signs: Vec<f64> = data
            .y()
            .iter()
            .map(|&l| if l == label { 1.0 } else { -1.0 })
            .collect();
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        rng.set_stream(label as u64);
        train_binary_svc(
            data.x(),
            &signs,
            &costs,
            data.dimension(),
            cfg.tol,
            cfg.max_epochs,
            &mut rng,
        )
    });

    let (weights, bias) = per_label.into_iter().map(|m| (m.weights, m.bias)).unzip();
    Ok(LinearModel {
        weights,
        bias,
        n_features: data.dimension(),
    })
}

/// Decision values `w_c · x + b_c` for every label.
pub fn svc_margins(model: &LinearModel, x: &SparseVector) -> Result<Vec<f64>> {
    if x.min_dimension() > model.n_features {
        return Err(Error::DimensionMismatch {
            expected: model.n_features,
            got: x.min_dimension(),
        });
    }
    Ok(model
        .weights
        .iter()
        .zip(&model.bias)
        .map(|(w, b)| x.dot_dense(w) + b)
        .collect())
}
