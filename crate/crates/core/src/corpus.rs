//! Documents, label spaces and TSV ingestion.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// One text sample and the set of label indices attached to it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Document {
    pub id: usize,
    pub text: String,
    pub labels: BTreeSet<usize>,
}

/// Ordered, duplicate-free list of label names. The position of a name is
/// its index everywhere downstream.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(try_from = "Vec<String>", into = "Vec<String>")]
pub struct LabelSpace {
    names: Vec<String>,
}

impl LabelSpace {
    /// Builds a label space from arbitrary names, sorting and de-duplicating.
    pub fn from_names<I, S>(names: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let set: BTreeSet<String> = names.into_iter().map(Into::into).collect();
        LabelSpace {
            names: set.into_iter().collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, index: usize) -> Option<&str> {
        self.names.get(index).map(String::as_str)
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.binary_search_by(|n| n.as_str().cmp(name)).ok()
    }

    /// Maps a set of indices back to names.
    pub fn names_of(&self, labels: &BTreeSet<usize>) -> BTreeSet<String> {
        labels
            .iter()
            .filter_map(|&i| self.name(i).map(str::to_owned))
            .collect()
    }
}

impl TryFrom<Vec<String>> for LabelSpace {
    type Error = String;

    fn try_from(names: Vec<String>) -> Result<Self, Self::Error> {
        if names.windows(2).any(|w| w[0] >= w[1]) {
            return Err("label names must be sorted and unique".into());
        }
        Ok(LabelSpace { names })
    }
}

impl From<LabelSpace> for Vec<String> {
    fn from(space: LabelSpace) -> Self {
        space.names
    }
}

/// An immutable collection of documents over one label space.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dataset {
    documents: Vec<Document>,
    label_space: LabelSpace,
}

impl Dataset {
    /// Builds a dataset from `(text, labels)` pairs, assigning ids in order.
    pub fn new<I>(items: I, label_space: LabelSpace) -> Result<Self>
    where
        I: IntoIterator<Item = (String, BTreeSet<usize>)>,
    {
        let mut documents = Vec::new();
        for (id, (text, labels)) in items.into_iter().enumerate() {
            if text.trim().is_empty() {
                return Err(Error::invalid(format!("document {id} has empty text")));
            }
            if let Some(&bad) = labels.iter().find(|&&l| l >= label_space.len()) {
                return Err(Error::invalid(format!(
                    "document {id} has label index {bad} outside a space of {}",
                    label_space.len()
                )));
            }
            documents.push(Document { id, text, labels });
        }
        Ok(Dataset {
            documents,
            label_space,
        })
    }

    pub fn documents(&self) -> &[Document] {
        &self.documents
    }

    pub fn label_space(&self) -> &LabelSpace {
        &self.label_space
    }

    pub fn len(&self) -> usize {
        self.documents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.documents.is_empty()
    }

    pub fn texts(&self) -> Vec<&str> {
        self.documents.iter().map(|d| d.text.as_str()).collect()
    }

    /// Gold label names per document.
    pub fn label_names(&self) -> Vec<BTreeSet<String>> {
        self.documents
            .iter()
            .map(|d| self.label_space.names_of(&d.labels))
            .collect()
    }

    /// Keeps the documents at `indices` (in that order), renumbering ids.
    pub fn subset(&self, indices: &[usize]) -> Dataset {
        let documents = indices
            .iter()
            .enumerate()
            .map(|(id, &i)| Document {
                id,
                ..self.documents[i].clone()
            })
            .collect();
        Dataset {
            documents,
            label_space: self.label_space.clone(),
        }
    }

    /// Seeded shuffle split into `(train, held_out)`; both keep the full
    /// label space.
    pub fn split(&self, train_fraction: f64, seed: u64) -> Result<(Dataset, Dataset)> {
        if !(train_fraction > 0.0 && train_fraction < 1.0) {
            return Err(Error::invalid(format!(
                "train fraction must lie in (0, 1), got {train_fraction}"
            )));
        }
        let mut order: Vec<usize> = (0..self.len()).collect();
        order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        let cut = (self.len() as f64 * train_fraction).round() as usize;
        if cut == 0 || cut == self.len() {
            return Err(Error::invalid(format!(
                "cannot split {} documents with fraction {train_fraction}",
                self.len()
            )));
        }
        Ok((self.subset(&order[..cut]), self.subset(&order[cut..])))
    }
}

/// Parses a two-column TSV (text, comma-separated labels).
///
/// Blank lines are skipped. The label space is the sorted union of every
/// label seen, so indices do not depend on line order.
pub fn parse_tsv(raw: &[u8], has_header: bool) -> Result<Dataset> {
    let text = std::str::from_utf8(raw)?;
    let mut rows: Vec<(String, Vec<String>)> = Vec::new();
    for (i, line) in text.split('\n').enumerate() {
        let line_no = i + 1;
        if has_header && i == 0 {
            continue;
        }
        let line = line.strip_suffix('\r').unwrap_or(line);
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 2 {
            return Err(Error::Parse {
                line: line_no,
                message: format!("expected 2 tab-separated fields, found {}", fields.len()),
            });
        }
        if fields[0].trim().is_empty() {
            return Err(Error::Parse {
                line: line_no,
                message: "text field is empty".into(),
            });
        }
        let labels = fields[1]
            .split(',')
            .map(str::trim)
            .filter(|l| !l.is_empty())
            .map(str::to_owned)
            .collect();
        rows.push((fields[0].to_owned(), labels));
    }

    let space = LabelSpace::from_names(rows.iter().flat_map(|(_, l)| l.iter().cloned()));
    let items = rows.into_iter().map(|(text, labels)| {
        let set = labels
            .iter()
            .map(|l| space.index_of(l).expect("label collected above"))
            .collect();
        (text, set)
    });
    Dataset::new(items, space.clone())
}

/// Writes a dataset in the format [`parse_tsv`] reads (no header).
pub fn serialize_tsv(dataset: &Dataset) -> String {
    let mut out = String::new();
    for doc in dataset.documents() {
        out.push_str(&doc.text);
        out.push('\t');
        let names: Vec<&str> = doc
            .labels
            .iter()
            .filter_map(|&l| dataset.label_space().name(l))
            .collect();
        out.push_str(&names.join(","));
        out.push('\n');
    }
    out
}

const LETTERS: &str = "ابتثجحخدذرزسشصضطظعغفقكلمنهوي";

/// Generates a seeded corpus where every label owns a disjoint vocabulary.
///
/// Words are a random 2 to 4 letter stem followed by a fixed-width suffix
/// unique to the label, so labels are separable by whole words and also by
/// character n-grams. Each document draws 5 to 15 tokens. With probability
/// `multi_label_rate` a document mixes its label with a second one and
/// carries both.
pub fn make_synthetic(
    n_labels: usize,
    docs_per_label: usize,
    vocab_per_label: usize,
    multi_label_rate: f64,
    seed: u64,
) -> Result<Dataset> {
    if n_labels == 0 || docs_per_label == 0 || vocab_per_label == 0 {
        return Err(Error::invalid("synthetic corpus counts must be at least 1"));
    }
    if !(0.0..=1.0).contains(&multi_label_rate) {
        return Err(Error::invalid(format!(
            "multi_label_rate must lie in [0, 1], got {multi_label_rate}"
        )));
    }
    let letters: Vec<char> = LETTERS.chars().collect();
    let base = letters.len();
    let mut suffix_width = 2;
    while base.pow(suffix_width as u32) < n_labels {
        suffix_width += 1;
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let vocabularies: Vec<Vec<String>> = (0..n_labels)
        .map(|label| {
            let mut suffix = Vec::with_capacity(suffix_width);
            let mut rest = label;
            for _ in 0..suffix_width {
                suffix.push(letters[rest % base]);
                rest /= base;
            }
            let mut seen = BTreeSet::new();
            let mut words = Vec::with_capacity(vocab_per_label);
            while words.len() < vocab_per_label {
                let stem_len = rng.gen_range(2..=4);
                let mut word: String = (0..stem_len)
                    .map(|_| letters[rng.gen_range(0..base)])
                    .collect();
                word.extend(suffix.iter());
                if seen.insert(word.clone()) {
                    words.push(word);
                }
            }
            words
        })
        .collect();

    let name_width = (n_labels - 1).to_string().len();
    let space = LabelSpace::from_names((0..n_labels).map(|i| format!("D{i:0name_width$}")));

    let mut items = Vec::with_capacity(n_labels * docs_per_label);
    for label in 0..n_labels {
        for _ in 0..docs_per_label {
            let n_tokens = rng.gen_range(5..=15);
            let mixed = n_labels > 1 && rng.gen_bool(multi_label_rate);
            let mut labels = BTreeSet::from([label]);
            let mut tokens = Vec::with_capacity(n_tokens);
            if mixed {
                let mut other = rng.gen_range(0..n_labels - 1);
                if other >= label {
                    other += 1;
                }
                labels.insert(other);
                tokens.push(vocabularies[label].choose(&mut rng).unwrap().as_str());
                tokens.push(vocabularies[other].choose(&mut rng).unwrap().as_str());
                while tokens.len() < n_tokens {
                    let pick = if rng.gen_bool(0.5) { label } else { other };
                    tokens.push(vocabularies[pick].choose(&mut rng).unwrap().as_str());
                }
            } else {
                while tokens.len() < n_tokens {
                    tokens.push(vocabularies[label].choose(&mut rng).unwrap().as_str());
                }
            }
            items.push((tokens.join(" "), labels));
        }
    }
    Dataset::new(items, space)
}
