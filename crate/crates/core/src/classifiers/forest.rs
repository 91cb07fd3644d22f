//! Random forest of unpruned Gini trees over sparse features.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{argmax, TrainingSet};
use crate::par;
use crate::sparse::SparseVector;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ForestConfig {
    pub n_trees: usize,
    pub bootstrap: bool,
    /// `None` grows trees until leaves are pure or unsplittable.
    pub max_depth: Option<usize>,
    #[serde(skip)]
    pub seed: u64,
}

impl Default for ForestConfig {
    fn default() -> Self {
        ForestConfig {
            n_trees: 100,
            bootstrap: true,
            max_depth: None,
            seed: 0,
        }
    }
}

impl ForestConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_trees == 0 {
            return Err(Error::invalid("a forest needs at least one tree"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Node {
    Leaf {
        distribution: Vec<f64>,
    },
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
}

/// Nodes stored in an arena; index 0 is the root.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tree {
    pub nodes: Vec<Node>,
}

impl Tree {
    fn leaf_for(&self, x: &SparseVector) -> &[f64] {
        let mut at = 0;
        loop {
            match &self.nodes[at] {
                Node::Leaf { distribution } => return distribution,
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => {
                    at = if x.get(*feature) <= *threshold {
                        *left
                    } else {
                        *right
                    };
                }
            }
        }
    }

    /// The leaf's most probable label (ties → lowest index).
    pub fn predict(&self, x: &SparseVector) -> usize {
        argmax(self.leaf_for(x))
    }

    fn check(&self, n_labels: usize) -> Result<()> {
        if self.nodes.is_empty() {
            return Err(Error::Model("empty tree".into()));
        }
        for node in &self.nodes {
            match node {
                Node::Leaf { distribution } if distribution.len() != n_labels => {
                    return Err(Error::Model(
                        "leaf distribution has the wrong length".into(),
                    ))
                }
                Node::Split { left, right, .. }
                    if *left >= self.nodes.len() || *right >= self.nodes.len() =>
                {
                    return Err(Error::Model("tree child index out of range".into()))
                }
                _ => {}
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Forest {
    pub trees: Vec<Tree>,
    pub n_labels: usize,
    pub n_features: usize,
}

impl Forest {
    pub(crate) fn check(&self, n_labels: usize, n_features: usize) -> Result<()> {
        if self.n_labels != n_labels || self.n_features != n_features {
            return Err(Error::Model("forest shape does not match the model".into()));
        }
        if self.trees.is_empty() {
            return Err(Error::Model("forest has no trees".into()));
        }
        self.trees.iter().try_for_each(|t| t.check(n_labels))
    }
}

/// Majority vote of the trees' leaf labels (ties → lowest index).
pub fn forest_predict(forest: &Forest, x: &SparseVector) -> usize {
    let mut votes = vec![0usize; forest.n_labels];
    for tree in &forest.trees {
        votes[tree.predict(x)] += 1;
    }
    let mut best = 0;
    for (label, &v) in votes.iter().enumerate() {
        if v > votes[best] {
            best = label;
        }
    }
    best
}

/// Column-major copy of the nonzero entries, for scanning one feature
/// across a large node.
struct Columns {
    entries: Vec<Vec<(usize, f64)>>,
}

impl Columns {
    fn new(data: &TrainingSet) -> Self {
        let mut entries = vec![Vec::new(); data.dimension()];
        for (i, x) in data.x().iter().enumerate() {
            for (f, v) in x.iter() {
                entries[f].push((i, v));
            }
        }
        Columns { entries }
    }
}

struct Split {
    feature: usize,
    threshold: f64,
    score: f64,
}

struct Builder<'a> {
    data: &'a TrainingSet,
    columns: &'a Columns,
    weight: Vec<u32>,
    in_node: Vec<bool>,
    features: Vec<usize>,
    candidates: usize,
    max_depth: Option<usize>,
    rng: ChaCha8Rng,
    nodes: Vec<Node>,
}

/// `Σ_c n_c² / n`; larger means purer. Summing it over children gives a
/// quantity that ranks splits exactly like weighted Gini impurity.
fn purity(counts: &[u64]) -> f64 {
    let total: u64 = counts.iter().sum();
    if total == 0 {
        return 0.0;
    }
    let sq: u64 = counts.iter().map(|c| c * c).sum();
    sq as f64 / total as f64
}

impl<'a> Builder<'a> {
    fn counts(&self, samples: &[usize]) -> Vec<u64> {
        let mut counts = vec![0u64; self.data.n_labels()];
        for &i in samples {
            counts[self.data.y()[i]] += self.weight[i] as u64;
        }
        counts
    }

    /// `(value, sample)` pairs for `feature` over the node, including zeros.
    fn values(&self, samples: &[usize], feature: usize) -> Vec<(f64, usize)> {
        let column = &self.columns.entries[feature];
        if samples.len() < column.len() {
            samples
                .iter()
                .map(|&i| (self.data.x()[i].get(feature), i))
                .collect()
        } else {
            let mut nonzero: Vec<bool> = Vec::new();
            let mut out: Vec<(f64, usize)> = Vec::with_capacity(samples.len());
            for &(i, v) in column {
                if self.in_node[i] {
                    out.push((v, i));
                }
            }
            if out.len() < samples.len() {
                nonzero.resize(self.data.len(), false);
                out.iter().for_each(|&(_, i)| nonzero[i] = true);
                out.extend(samples.iter().filter(|&&i| !nonzero[i]).map(|&i| (0.0, i)));
            }
            out
        }
    }

    /// Best threshold on one feature, or `None` if the feature is constant
    /// within the node.
    fn best_threshold(&self, samples: &[usize], feature: usize, totals: &[u64]) -> Option<Split> {
        let mut vals = self.values(samples, feature);
        vals.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        if vals.first()?.0 == vals.last()?.0 {
            return None;
        }
        let mut left = vec![0u64; totals.len()];
        let mut best: Option<Split> = None;
        for k in 0..vals.len() - 1 {
            let (v, i) = vals[k];
            left[self.data.y()[i]] += self.weight[i] as u64;
            let next = vals[k + 1].0;
            if next == v {
                continue;
            }
            let right: Vec<u64> = totals.iter().zip(&left).map(|(t, l)| t - l).collect();
            let score = purity(&left) + purity(&right);
            if best.as_ref().is_none_or(|b| score > b.score) {
                let mid = v + (next - v) / 2.0;
                let threshold = if mid < next { mid } else { v };
                best = Some(Split {
                    feature,
                    threshold,
                    score,
                });
            }
        }
        best
    }

    /// Draws features without replacement until at least `candidates`
    /// have been examined and one of them varies within the node.
    fn find_split(&mut self, samples: &[usize], totals: &[u64]) -> Option<Split> {
        let n_features = self.features.len();
        let mut best: Option<Split> = None;
        let mut found_varying = false;
        for drawn in 0..n_features {
            if drawn >= self.candidates && found_varying {
                break;
            }
            let j = self.rng.gen_range(drawn..n_features);
            self.features.swap(drawn, j);
            let feature = self.features[drawn];
            if let Some(split) = self.best_threshold(samples, feature, totals) {
                found_varying = true;
                if best.as_ref().is_none_or(|b| split.score > b.score) {
                    best = Some(split);
                }
            }
        }
        best
    }

    fn leaf(counts: &[u64]) -> Node {
        let total: u64 = counts.iter().sum();
        Node::Leaf {
            distribution: counts.iter().map(|&c| c as f64 / total as f64).collect(),
        }
    }

    fn build(&mut self, samples: Vec<usize>, depth: usize) -> usize {
        let id = self.nodes.len();
        let counts = self.counts(&samples);
        self.nodes.push(Self::leaf(&counts));

        let pure = counts.iter().filter(|&&c| c > 0).count() <= 1;
        if pure || self.max_depth.is_some_and(|d| depth >= d) {
            return id;
        }
        samples.iter().for_each(|&i| self.in_node[i] = true);
        let split = self.find_split(&samples, &counts);
        samples.iter().for_each(|&i| self.in_node[i] = false);

        let parent = purity(&counts);
        let Some(split) = split.filter(|s| s.score > parent * (1.0 + 1e-12)) else {
            return id;
        };
        let (left, right): (Vec<usize>, Vec<usize>) = samples
            .into_iter()
            .partition(|&i| self.data.x()[i].get(split.feature) <= split.threshold);
        let l = self.build(left, depth + 1);
        let r = self.build(right, depth + 1);
        self.nodes[id] = Node::Split {
            feature: split.feature,
            threshold: split.threshold,
            left: l,
            right: r,
        };
        id
    }
}

fn grow_tree(data: &TrainingSet, columns: &Columns, cfg: &ForestConfig, tree_index: usize) -> Tree {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(tree_index as u64);
    let n = data.len();
    let mut weight = vec![0u32; n];
    if cfg.bootstrap {
        for _ in 0..n {
            weight[rng.gen_range(0..n)] += 1;
        }
    } else {
        weight.fill(1);
    }
    let samples: Vec<usize> = (0..n).filter(|&i| weight[i] > 0).collect();
    let dim = data.dimension();
    let mut builder = Builder {
        data,
        columns,
        weight,
        in_node: vec![false; n],
        features: (0..dim).collect(),
        candidates: ((dim as f64).sqrt().ceil() as usize).max(1),
        max_depth: cfg.max_depth,
        rng,
        nodes: Vec::new(),
    };
    builder.build(samples, 0);
    Tree {
        nodes: builder.nodes,
    }
}

/// Grows `cfg.n_trees` trees, each from its own seeded bootstrap sample.
///
/// At each node `⌈√F⌉` candidate features are drawn without replacement
/// (more are drawn while every candidate so far is constant in the node),
/// and the best Gini split over midpoints of consecutive distinct values is
/// taken. A node stays a leaf when it is pure or no split lowers impurity.
pub fn train_random_forest(data: &TrainingSet, cfg: &ForestConfig) -> Result<Forest> {
    cfg.validate()?;
    let columns = Columns::new(data);
    let trees = par::map_range(cfg.n_trees, |t| grow_tree(data, &columns, cfg, t));
    Ok(Forest {
        trees,
        n_labels: data.n_labels(),
        n_features: data.dimension(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dense(rows: &[&[f64]], y: &[usize], n_labels: usize) -> TrainingSet {
        let dim = rows[0].len();
        TrainingSet::new(
            rows.iter().map(|r| SparseVector::from_dense(r)).collect(),
            y.to_vec(),
            n_labels,
            dim,
        )
        .unwrap()
    }

    #[test]
    fn single_class_gives_single_leaves() {
        let data = dense(&[&[1.0, 0.0], &[0.0, 1.0], &[0.5, 0.5]], &[1, 1, 1], 3);
        let forest = train_random_forest(&data, &ForestConfig::default()).unwrap();
        assert_eq!(forest.trees.len(), 100);
        for tree in &forest.trees {
            assert_eq!(tree.nodes.len(), 1);
        }
        assert_eq!(
            forest_predict(&forest, &SparseVector::from_dense(&[9.0, 9.0])),
            1
        );
    }

    #[test]
    fn fits_xor_parity() {
        let data = dense(
            &[&[0.0, 0.0], &[0.0, 1.0], &[1.0, 0.0], &[1.0, 1.0]],
            &[0, 1, 1, 0],
            2,
        );
        let forest = train_random_forest(
            &data,
            &ForestConfig {
                seed: 5,
                ..ForestConfig::default()
            },
        )
        .unwrap();
        for (x, &y) in data.x().iter().zip(data.y()) {
            assert_eq!(forest_predict(&forest, x), y);
        }
    }

    #[test]
    fn without_bootstrap_each_tree_fits_distinct_points() {
        let data = dense(
            &[
                &[0.1, 2.0, 0.0],
                &[0.4, 1.0, 3.0],
                &[0.2, 0.0, 1.0],
                &[0.9, 2.5, 0.5],
                &[0.3, 0.7, 0.0],
            ],
            &[0, 1, 2, 1, 0],
            3,
        );
        let cfg = ForestConfig {
            n_trees: 10,
            bootstrap: false,
            ..ForestConfig::default()
        };
        let forest = train_random_forest(&data, &cfg).unwrap();
        for tree in &forest.trees {
            for (x, &y) in data.x().iter().zip(data.y()) {
                assert_eq!(tree.predict(x), y);
            }
        }
    }

    #[test]
    fn leaves_are_distributions() {
        let data = dense(
            &[&[1.0, 0.0], &[1.0, 0.0], &[0.0, 1.0], &[1.0, 0.0]],
            &[0, 1, 1, 2],
            3,
        );
        let forest = train_random_forest(&data, &ForestConfig::default()).unwrap();
        for tree in &forest.trees {
            for node in &tree.nodes {
                if let Node::Leaf { distribution } = node {
                    assert!((distribution.iter().sum::<f64>() - 1.0).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn same_seed_same_forest() {
        let data = dense(
            &[
                &[0.1, 0.0, 0.3],
                &[0.0, 0.2, 0.1],
                &[0.5, 0.5, 0.0],
                &[0.2, 0.9, 0.4],
                &[0.0, 0.0, 1.0],
            ],
            &[0, 1, 0, 1, 2],
            3,
        );
        let cfg = ForestConfig {
            n_trees: 20,
            seed: 77,
            ..ForestConfig::default()
        };
        assert_eq!(
            train_random_forest(&data, &cfg).unwrap(),
            train_random_forest(&data, &cfg).unwrap()
        );
    }

    #[test]
    fn vote_ties_go_to_lowest_label() {
        let leaf = |d: Vec<f64>| Tree {
            nodes: vec![Node::Leaf { distribution: d }],
        };
        let forest = Forest {
            trees: vec![leaf(vec![0.0, 1.0]), leaf(vec![1.0, 0.0])],
            n_labels: 2,
            n_features: 1,
        };
        assert_eq!(forest_predict(&forest, &SparseVector::new()), 0);
        let forest = Forest {
            trees: vec![
                leaf(vec![1.0, 0.0]),
                leaf(vec![0.6, 0.4]),
                leaf(vec![0.0, 1.0]),
            ],
            n_labels: 2,
            n_features: 1,
        };
        assert_eq!(forest_predict(&forest, &SparseVector::new()), 0);
        let tied_leaf = leaf(vec![0.5, 0.5]);
        assert_eq!(tied_leaf.predict(&SparseVector::new()), 0);
    }

    #[test]
    fn max_depth_limits_growth() {
        let data = dense(&[&[0.0], &[1.0], &[2.0], &[3.0]], &[0, 1, 0, 1], 2);
        let cfg = ForestConfig {
            n_trees: 1,
            bootstrap: false,
            max_depth: Some(1),
            ..ForestConfig::default()
        };
        let forest = train_random_forest(&data, &cfg).unwrap();
        assert!(forest.trees[0].nodes.len() <= 3);
    }
}
