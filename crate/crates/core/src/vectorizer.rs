//! TF-IDF blocks and their weighted union.
//!
//! Each block counts raw n-gram frequencies from one analyzer, multiplies by
//! a smoothed IDF `ln((1 + N) / (1 + df)) + 1`, L2-normalizes, and finally
//! scales by its transformer weight. The union concatenates blocks in the
//! fixed order word, char, char_wb without re-normalizing.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::analyzers::{AnalyzerKind, NgramRange};
use crate::corpus::Dataset;
use crate::par;
use crate::sparse::SparseVector;
use crate::{Error, Result};

/// Feature strings in lexicographic order; a term's position is its column.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(try_from = "Vec<String>", into = "Vec<String>")]
pub struct Vocabulary {
    terms: Vec<String>,
    lookup: HashMap<String, usize>,
}

impl Vocabulary {
    fn from_sorted(terms: Vec<String>) -> Self {
        let lookup = terms
            .iter()
            .enumerate()
            .map(|(i, t)| (t.clone(), i))
            .collect();
        Vocabulary { terms, lookup }
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn index_of(&self, term: &str) -> Option<usize> {
        self.lookup.get(term).copied()
    }

    pub fn terms(&self) -> &[String] {
        &self.terms
    }
}

impl PartialEq for Vocabulary {
    fn eq(&self, other: &Self) -> bool {
        self.terms == other.terms
    }
}

impl TryFrom<Vec<String>> for Vocabulary {
    type Error = String;

    fn try_from(terms: Vec<String>) -> Result<Self, Self::Error> {
        if terms.windows(2).any(|w| w[0] >= w[1]) {
            return Err("vocabulary terms must be sorted and unique".into());
        }
        Ok(Vocabulary::from_sorted(terms))
    }
}

impl From<Vocabulary> for Vec<String> {
    fn from(v: Vocabulary) -> Self {
        v.terms
    }
}

/// Settings for one analyzer block.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlockConfig {
    pub range: NgramRange,
    #[serde(default)]
    pub max_features: Option<usize>,
    #[serde(default = "default_weight")]
    pub weight: f64,
}

fn default_weight() -> f64 {
    1.0
}

impl BlockConfig {
    pub fn new(range: NgramRange, max_features: Option<usize>, weight: f64) -> Self {
        BlockConfig {
            range,
            max_features,
            weight,
        }
    }

    /// Range `(1, n)`, no feature cap, the given weight.
    pub fn up_to(n: usize, weight: f64) -> Result<Self> {
        Ok(BlockConfig::new(NgramRange::up_to(n)?, None, weight))
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.weight > 0.0 && self.weight <= 1.0) {
            return Err(Error::invalid(format!(
                "transformer weight must lie in (0, 1], got {}",
                self.weight
            )));
        }
        if self.max_features == Some(0) {
            return Err(Error::invalid("max_features must be at least 1"));
        }
        Ok(())
    }
}

/// A fitted TF-IDF block.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockModel {
    pub analyzer: AnalyzerKind,
    pub range: NgramRange,
    pub max_features: Option<usize>,
    pub weight: f64,
    pub vocab: Vocabulary,
    pub idf: Vec<f64>,
}

impl BlockModel {
    pub fn dimension(&self) -> usize {
        self.vocab.len()
    }

    fn check(&self) -> Result<()> {
        BlockConfig::new(self.range, self.max_features, self.weight).validate()?;
        if self.idf.len() != self.vocab.len() {
            return Err(Error::Model(format!(
                "{} block has {} idf values for {} terms",
                self.analyzer.name(),
                self.idf.len(),
                self.vocab.len()
            )));
        }
        Ok(())
    }
}

#[derive(Default)]
struct TermStats {
    total: u64,
    docs: u64,
}

fn count_terms(
    texts: &[&str],
    analyzer: AnalyzerKind,
    range: NgramRange,
) -> HashMap<String, TermStats> {
    const CHUNK: usize = 256;
    let chunks: Vec<&[&str]> = texts.chunks(CHUNK).collect();
    let partials = par::map(&chunks, |chunk| {
        let mut stats: HashMap<String, TermStats> = HashMap::new();
        for text in chunk.iter() {
            let mut local: HashMap<String, u64> = HashMap::new();
            for gram in analyzer.analyze(text, range) {
                *local.entry(gram).or_default() += 1;
            }
            for (gram, count) in local {
                let s = stats.entry(gram).or_default();
                s.total += count;
                s.docs += 1;
            }
        }
        stats
    });
    let mut merged: HashMap<String, TermStats> = HashMap::new();
    for partial in partials {
        for (gram, s) in partial {
            let m = merged.entry(gram).or_default();
            m.total += s.total;
            m.docs += s.docs;
        }
    }
    merged
}

/// Fits one block on raw texts.
pub fn fit_block_texts(
    texts: &[&str],
    analyzer: AnalyzerKind,
    config: &BlockConfig,
) -> Result<BlockModel> {
    config.validate()?;
    if texts.is_empty() {
        return Err(Error::Fit(
            "cannot fit a TF-IDF block on an empty corpus".into(),
        ));
    }
    let stats = count_terms(texts, analyzer, config.range);
    let mut terms: Vec<(String, TermStats)> = stats.into_iter().collect();
    if let Some(cap) = config.max_features {
        if terms.len() > cap {
            terms.sort_by(|a, b| b.1.total.cmp(&a.1.total).then_with(|| a.0.cmp(&b.0)));
            terms.truncate(cap);
        }
    }
    if terms.is_empty() {
        return Err(Error::Fit(format!(
            "{} analyzer with range ({}, {}) produced no features",
            analyzer.name(),
            config.range.lo(),
            config.range.hi()
        )));
    }
    terms.sort_by(|a, b| a.0.cmp(&b.0));

    let n = texts.len() as f64;
    let idf = terms
        .iter()
        .map(|(_, s)| ((1.0 + n) / (1.0 + s.docs as f64)).ln() + 1.0)
        .collect();
    let vocab = Vocabulary::from_sorted(terms.into_iter().map(|(t, _)| t).collect());
    Ok(BlockModel {
        analyzer,
        range: config.range,
        max_features: config.max_features,
        weight: config.weight,
        vocab,
        idf,
    })
}

/// Fits one block on every document of `corpus`.
pub fn fit_block(
    corpus: &Dataset,
    analyzer: AnalyzerKind,
    config: &BlockConfig,
) -> Result<BlockModel> {
    fit_block_texts(&corpus.texts(), analyzer, config)
}

/// TF-IDF vector of one document under a fitted block. Out-of-vocabulary
/// features are ignored; an all-zero vector stays empty.
pub fn transform_block(text: &str, block: &BlockModel) -> SparseVector {
    let mut counts: HashMap<usize, u32> = HashMap::new();
    for gram in block.analyzer.analyze(text, block.range) {
        if let Some(i) = block.vocab.index_of(&gram) {
            *counts.entry(i).or_default() += 1;
        }
    }
    let mut entries: Vec<(usize, f64)> = counts
        .into_iter()
        .map(|(i, tf)| (i, tf as f64 * block.idf[i]))
        .collect();
    entries.sort_unstable_by_key(|&(i, _)| i);
    let norm = entries.iter().map(|(_, v)| v * v).sum::<f64>().sqrt();
    let mut out = SparseVector::new();
    if norm > 0.0 {
        for (i, v) in entries {
            out.push(i, v / norm * block.weight);
        }
    }
    out
}

/// Per-analyzer block settings; a `None` block is left out of the union.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct UnionConfig {
    #[serde(default)]
    pub word: Option<BlockConfig>,
    #[serde(default)]
    pub char: Option<BlockConfig>,
    #[serde(default)]
    pub char_wb: Option<BlockConfig>,
}

impl UnionConfig {
    /// All three analyzers with ranges `(1, n)` and the given weights.
    pub fn uniform(n: [usize; 3], weights: [f64; 3], max_features: Option<usize>) -> Result<Self> {
        let block = |i: usize| -> Result<Option<BlockConfig>> {
            Ok(Some(BlockConfig::new(
                NgramRange::up_to(n[i])?,
                max_features,
                weights[i],
            )))
        };
        Ok(UnionConfig {
            word: block(0)?,
            char: block(1)?,
            char_wb: block(2)?,
        })
    }

    pub fn blocks(&self) -> impl Iterator<Item = (AnalyzerKind, &BlockConfig)> {
        AnalyzerKind::ALL
            .into_iter()
            .zip([&self.word, &self.char, &self.char_wb])
            .filter_map(|(kind, cfg)| cfg.as_ref().map(|c| (kind, c)))
    }

    pub fn blocks_mut(&mut self) -> impl Iterator<Item = &mut BlockConfig> {
        [&mut self.word, &mut self.char, &mut self.char_wb]
            .into_iter()
            .filter_map(Option::as_mut)
    }

    pub fn get_mut(&mut self, kind: AnalyzerKind) -> &mut Option<BlockConfig> {
        match kind {
            AnalyzerKind::Word => &mut self.word,
            AnalyzerKind::Char => &mut self.char,
            AnalyzerKind::CharWb => &mut self.char_wb,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.blocks().next().is_none() {
            return Err(Error::invalid("feature union needs at least one block"));
        }
        self.blocks().try_for_each(|(_, b)| b.validate())
    }
}

/// Fitted blocks in word, char, char_wb order with their column offsets.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "UnionBlocks", into = "UnionBlocks")]
pub struct UnionModel {
    blocks: Vec<BlockModel>,
    offsets: Vec<usize>,
    dimension: usize,
}

#[derive(Serialize, Deserialize)]
struct UnionBlocks {
    blocks: Vec<BlockModel>,
}

impl TryFrom<UnionBlocks> for UnionModel {
    type Error = Error;

    fn try_from(raw: UnionBlocks) -> Result<Self> {
        UnionModel::from_blocks(raw.blocks)
    }
}

impl From<UnionModel> for UnionBlocks {
    fn from(model: UnionModel) -> Self {
        UnionBlocks {
            blocks: model.blocks,
        }
    }
}

impl UnionModel {
    /// Assembles fitted blocks, computing offsets as prefix sums.
    pub fn from_blocks(blocks: Vec<BlockModel>) -> Result<Self> {
        if blocks.is_empty() {
            return Err(Error::Model("feature union has no blocks".into()));
        }
        if blocks.windows(2).any(|w| w[0].analyzer >= w[1].analyzer) {
            return Err(Error::Model(
                "union blocks must be ordered word, char, char_wb".into(),
            ));
        }
        let mut offsets = Vec::with_capacity(blocks.len());
        let mut dimension = 0;
        for b in &blocks {
            b.check()?;
            offsets.push(dimension);
            dimension += b.dimension();
        }
        Ok(UnionModel {
            blocks,
            offsets,
            dimension,
        })
    }

    pub fn blocks(&self) -> &[BlockModel] {
        &self.blocks
    }

    pub fn offsets(&self) -> &[usize] {
        &self.offsets
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    /// Column range `[start, end)` of block `i`.
    pub fn block_span(&self, i: usize) -> (usize, usize) {
        (
            self.offsets[i],
            self.offsets[i] + self.blocks[i].dimension(),
        )
    }
}

/// Fits every configured block on `corpus`.
pub fn fit_union(corpus: &Dataset, config: &UnionConfig) -> Result<UnionModel> {
    config.validate()?;
    let texts = corpus.texts();
    let specs: Vec<(AnalyzerKind, BlockConfig)> = config.blocks().map(|(k, c)| (k, *c)).collect();
    let blocks = par::map(&specs, |(kind, cfg)| fit_block_texts(&texts, *kind, cfg))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    UnionModel::from_blocks(blocks)
}

/// Concatenated block transforms with indices shifted by block offsets.
pub fn transform_union(text: &str, model: &UnionModel) -> SparseVector {
    let mut out = SparseVector::new();
    for (block, &offset) in model.blocks.iter().zip(&model.offsets) {
        out.extend_shifted(&transform_block(text, block), offset);
    }
    out
}

/// Transforms many texts, preserving order.
pub fn transform_all(texts: &[&str], model: &UnionModel) -> Vec<SparseVector> {
    par::map(texts, |t| transform_union(t, model))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::LabelSpace;
    use std::collections::BTreeSet;

    fn corpus(texts: &[&str]) -> Dataset {
        Dataset::new(
            texts.iter().map(|t| (t.to_string(), BTreeSet::new())),
            LabelSpace::default(),
        )
        .unwrap()
    }

    fn word_unigrams(cap: Option<usize>, weight: f64) -> BlockConfig {
        BlockConfig::new(NgramRange::new(1, 1).unwrap(), cap, weight)
    }

    #[test]
    fn idf_matches_hand_values() {
        let c = corpus(&["a b a", "b c"]);
        let block = fit_block(&c, AnalyzerKind::Word, &word_unigrams(None, 1.0)).unwrap();
        assert_eq!(block.vocab.terms(), ["a", "b", "c"]);
        let expected = [1.5f64.ln() + 1.0, 1.0, 1.5f64.ln() + 1.0];
        for (got, want) in block.idf.iter().zip(expected) {
            assert!((got - want).abs() < 1e-12);
        }
        assert!((block.idf[0] - 1.405465).abs() < 1e-6);
    }

    #[test]
    fn max_features_ties_break_lexicographically() {
        let c = corpus(&["a b a", "b c"]);
        let block = fit_block(&c, AnalyzerKind::Word, &word_unigrams(Some(1), 1.0)).unwrap();
        assert_eq!(block.vocab.terms(), ["a"]);
        let block = fit_block(&c, AnalyzerKind::Word, &word_unigrams(Some(2), 1.0)).unwrap();
        assert_eq!(block.vocab.terms(), ["a", "b"]);
    }

    #[test]
    fn single_document_idf_is_one() {
        let c = corpus(&["x y z"]);
        let block = fit_block(&c, AnalyzerKind::Word, &word_unigrams(None, 1.0)).unwrap();
        assert!(block.idf.iter().all(|&v| v == 1.0));
    }

    #[test]
    fn fit_errors() {
        let empty = Dataset::new(Vec::new(), LabelSpace::default()).unwrap();
        assert!(matches!(
            fit_block(&empty, AnalyzerKind::Word, &word_unigrams(None, 1.0)),
            Err(Error::Fit(_))
        ));
        let c = corpus(&["ab", "cd"]);
        let cfg = BlockConfig::new(NgramRange::new(3, 3).unwrap(), None, 1.0);
        assert!(matches!(
            fit_block(&c, AnalyzerKind::Char, &cfg),
            Err(Error::Fit(_))
        ));
        assert!(fit_block(&c, AnalyzerKind::Word, &word_unigrams(None, 0.0)).is_err());
        assert!(fit_block(&c, AnalyzerKind::Word, &word_unigrams(None, 1.5)).is_err());
    }

    #[test]
    fn transform_matches_hand_values() {
        let c = corpus(&["a b a", "b c"]);
        let block = fit_block(&c, AnalyzerKind::Word, &word_unigrams(None, 1.0)).unwrap();
        let v = transform_block("a b a", &block);
        assert_eq!(v.indices(), [0, 1]);
        assert!((v.values()[0] - 0.942156).abs() < 1e-6);
        assert!((v.values()[1] - 0.335176).abs() < 1e-6);

        let half = BlockModel {
            weight: 0.5,
            ..block.clone()
        };
        let h = transform_block("a b a", &half);
        assert_eq!(h.values()[0], v.values()[0] * 0.5);
        assert_eq!(h.values()[1], v.values()[1] * 0.5);

        assert!(transform_block("zzz qqq", &block).is_empty());
    }

    #[test]
    fn union_offsets_are_prefix_sums() {
        let c = corpus(&["ab cd ab", "cd ef"]);
        let cfg = UnionConfig::uniform([1, 2, 2], [1.0; 3], None).unwrap();
        let model = fit_union(&c, &cfg).unwrap();
        let sizes: Vec<usize> = model.blocks().iter().map(|b| b.dimension()).collect();
        assert_eq!(model.offsets(), [0, sizes[0], sizes[0] + sizes[1]]);
        assert_eq!(model.dimension(), sizes.iter().sum::<usize>());
        assert!(transform_union("", &model).is_empty());
    }

    #[test]
    fn union_slices_reproduce_blocks() {
        let c = corpus(&["ab cd ab", "cd ef", "ef gh ab"]);
        let cfg = UnionConfig::uniform([2, 3, 3], [0.4, 0.7, 1.0], None).unwrap();
        let model = fit_union(&c, &cfg).unwrap();
        for text in ["ab cd", "gh ef zz", "q"] {
            let v = transform_union(text, &model);
            for (i, block) in model.blocks().iter().enumerate() {
                let (lo, hi) = model.block_span(i);
                assert_eq!(v.slice(lo, hi), transform_block(text, block));
            }
        }
    }

    #[test]
    fn union_needs_a_block() {
        let c = corpus(&["ab"]);
        assert!(fit_union(&c, &UnionConfig::default()).is_err());
    }

    #[test]
    fn union_model_round_trips_through_json() {
        let c = corpus(&["ab cd ab", "cd ef"]);
        let cfg = UnionConfig::uniform([1, 2, 2], [0.5, 1.0, 0.25], Some(5)).unwrap();
        let model = fit_union(&c, &cfg).unwrap();
        let json = serde_json::to_string(&model).unwrap();
        let back: UnionModel = serde_json::from_str(&json).unwrap();
        assert_eq!(back, model);
        assert_eq!(back.offsets(), model.offsets());
    }
}
