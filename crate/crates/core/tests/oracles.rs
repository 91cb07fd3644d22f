//! Classifier predictions checked against naive dense re-implementations.

use lahja::classifiers::{
    forest_predict, knn_predict, train_random_forest, ForestConfig, KnnIndex, Node, TrainingSet,
};
use lahja::sparse::SparseVector;
use proptest::prelude::*;

/// Training rows, their labels, the label count and some query rows.
type Instance = (Vec<Vec<f64>>, Vec<usize>, usize, Vec<Vec<f64>>);

fn instance() -> impl Strategy<Value = Instance> {
    (2usize..=10, 2usize..=50, 2usize..=4).prop_flat_map(|(dims, n, labels)| {
        // Quantized values make repeated coordinates (and zeros) common.
        let value = prop_oneof![Just(0.0), (0u8..6).prop_map(|v| f64::from(v) / 4.0)];
        let row = prop::collection::vec(value, dims);
        (
            prop::collection::vec(row.clone(), n),
            prop::collection::vec(0..labels, n),
            Just(labels),
            prop::collection::vec(row, 8),
        )
    })
}

fn naive_forest_vote(forest: &lahja::classifiers::Forest, x: &[f64]) -> usize {
    let mut votes = vec![0u32; forest.n_labels];
    for tree in &forest.trees {
        let mut node = &tree.nodes[0];
        let dist = loop {
            match node {
                Node::Leaf { distribution } => break distribution,
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => {
                    node = if x[*feature] <= *threshold {
                        &tree.nodes[*left]
                    } else {
                        &tree.nodes[*right]
                    };
                }
            }
        };
        let mut best = 0;
        for l in 0..dist.len() {
            if dist[l] > dist[best] {
                best = l;
            }
        }
        votes[best] += 1;
    }
    let mut winner = 0;
    for l in 0..votes.len() {
        if votes[l] > votes[winner] {
            winner = l;
        }
    }
    winner
}

fn naive_knn(rows: &[Vec<f64>], labels: &[usize], n_labels: usize, k: usize, q: &[f64]) -> usize {
    let norm = |v: &[f64]| v.iter().map(|a| a * a).sum::<f64>().sqrt();
    let qn = norm(q);
    let mut sims: Vec<(f64, usize)> = Vec::new();
    for (id, r) in rows.iter().enumerate() {
        let rn = norm(r);
        let mut dot = 0.0;
        for j in 0..q.len() {
            dot += r[j] * q[j];
        }
        let s = if rn == 0.0 || qn == 0.0 {
            0.0
        } else {
            dot / (rn * qn)
        };
        sims.push((s, id));
    }
    // Insertion sort by similarity descending, id ascending.
    for i in 1..sims.len() {
        let mut j = i;
        while j > 0
            && (sims[j].0 > sims[j - 1].0
                || (sims[j].0 == sims[j - 1].0 && sims[j].1 < sims[j - 1].1))
        {
            sims.swap(j, j - 1);
            j -= 1;
        }
    }
    let top = &sims[..k];
    let mut counts = vec![0; n_labels];
    for &(_, id) in top {
        counts[labels[id]] += 1;
    }
    let best = *counts.iter().max().unwrap();
    for &(_, id) in top {
        if counts[labels[id]] == best {
            return labels[id];
        }
    }
    unreachable!()
}

fn training_set(rows: &[Vec<f64>], y: &[usize], n_labels: usize) -> TrainingSet {
    TrainingSet::new(
        rows.iter().map(|r| SparseVector::from_dense(r)).collect(),
        y.to_vec(),
        n_labels,
        rows[0].len(),
    )
    .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn forest_matches_naive_traversal((rows, y, n_labels, queries) in instance(), seed in 0u64..1000) {
        let data = training_set(&rows, &y, n_labels);
        let cfg = ForestConfig { n_trees: 15, seed, ..ForestConfig::default() };
        let forest = train_random_forest(&data, &cfg).unwrap();
        for q in queries.iter().chain(rows.iter()) {
            prop_assert_eq!(forest_predict(&forest, &SparseVector::from_dense(q)), naive_forest_vote(&forest, q));
        }
    }

    #[test]
    fn unbootstrapped_leaves_hold_routed_label_shares((rows, y, n_labels, _q) in instance(), seed in 0u64..1000) {
        let data = training_set(&rows, &y, n_labels);
        let cfg = ForestConfig { n_trees: 3, bootstrap: false, seed, ..ForestConfig::default() };
        let forest = train_random_forest(&data, &cfg).unwrap();
        for tree in &forest.trees {
            // Route every training point and tally labels at each visited node.
            let mut tally = vec![vec![0usize; n_labels]; tree.nodes.len()];
            for (x, &l) in rows.iter().zip(&y) {
                let mut at = 0;
                loop {
                    tally[at][l] += 1;
                    match &tree.nodes[at] {
                        Node::Leaf { .. } => break,
                        Node::Split { feature, threshold, left, right } => {
                            at = if x[*feature] <= *threshold { *left } else { *right };
                        }
                    }
                }
            }
            for (id, node) in tree.nodes.iter().enumerate() {
                let total: usize = tally[id].iter().sum();
                prop_assert!(total > 0, "node {} reached by no sample", id);
                match node {
                    Node::Leaf { distribution } => {
                        for l in 0..n_labels {
                            let share = tally[id][l] as f64 / total as f64;
                            prop_assert!((distribution[l] - share).abs() < 1e-12);
                        }
                    }
                    Node::Split { left, right, .. } => {
                        let gini = |c: &[usize]| {
                            let t: usize = c.iter().sum();
                            1.0 - c.iter().map(|&v| (v as f64 / t as f64).powi(2)).sum::<f64>()
                        };
                        let (nl, nr) = (tally[*left].iter().sum::<usize>(), tally[*right].iter().sum::<usize>());
                        let children = (nl as f64 * gini(&tally[*left]) + nr as f64 * gini(&tally[*right])) / total as f64;
                        prop_assert!(children < gini(&tally[id]) - 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn knn_matches_naive_scan((rows, y, n_labels, queries) in instance(), k in 1usize..=5) {
        let k = k.min(rows.len());
        let data = training_set(&rows, &y, n_labels);
        let index = KnnIndex::new(&data, k).unwrap();
        for q in queries.iter().chain(rows.iter()) {
            let got = knn_predict(&index, &SparseVector::from_dense(q)).unwrap();
            prop_assert_eq!(got, naive_knn(&rows, &y, n_labels, k, q));
        }
    }
}
