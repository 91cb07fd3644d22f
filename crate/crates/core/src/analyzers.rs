//! Text analyzers: word n-grams, character n-grams and word-bounded
//! character n-grams.
//!
//! No case folding, accent stripping or stop-word removal is applied.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AnalyzerKind {
    Word,
    Char,
    CharWb,
}

impl AnalyzerKind {
    pub const ALL: [AnalyzerKind; 3] =
        [AnalyzerKind::Word, AnalyzerKind::Char, AnalyzerKind::CharWb];

    /// Runs this analyzer over `text`.
    pub fn analyze(self, text: &str, range: NgramRange) -> Vec<String> {
        match self {
            AnalyzerKind::Word => word_ngrams(&tokenize_words(text), range),
            AnalyzerKind::Char => char_ngrams(text, range),
            AnalyzerKind::CharWb => char_wb_ngrams(text, range),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            AnalyzerKind::Word => "word",
            AnalyzerKind::Char => "char",
            AnalyzerKind::CharWb => "char_wb",
        }
    }
}

/// Inclusive n-gram range with `1 <= lo <= hi <= 10`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawRange")]
pub struct NgramRange {
    lo: usize,
    hi: usize,
}

#[derive(Deserialize)]
struct RawRange {
    lo: usize,
    hi: usize,
}

impl TryFrom<RawRange> for NgramRange {
    type Error = Error;

    fn try_from(raw: RawRange) -> Result<Self> {
        NgramRange::new(raw.lo, raw.hi)
    }
}

impl NgramRange {
    pub const MAX_N: usize = 10;

    pub fn new(lo: usize, hi: usize) -> Result<Self> {
        if lo < 1 || lo > hi || hi > Self::MAX_N {
            return Err(Error::invalid(format!(
                "n-gram range ({lo}, {hi}) must satisfy 1 <= lo <= hi <= {}",
                Self::MAX_N
            )));
        }
        Ok(NgramRange { lo, hi })
    }

    /// The range `(1, n)`.
    pub fn up_to(n: usize) -> Result<Self> {
        Self::new(1, n)
    }

    pub fn lo(self) -> usize {
        self.lo
    }

    pub fn hi(self) -> usize {
        self.hi
    }

    fn sizes(self) -> std::ops::RangeInclusive<usize> {
        self.lo..=self.hi
    }
}

fn is_word_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_'
}

/// Maximal runs of letters, digits and underscore.
pub fn tokenize_words(text: &str) -> Vec<&str> {
    text.split(|c: char| !is_word_char(c))
        .filter(|t| !t.is_empty())
        .collect()
}

/// Contiguous token windows joined by a single space, n ascending.
pub fn word_ngrams<S: AsRef<str>>(tokens: &[S], range: NgramRange) -> Vec<String> {
    let mut out = Vec::new();
    for n in range.sizes() {
        if tokens.len() < n {
            break;
        }
        for window in tokens.windows(n) {
            let mut gram = String::from(window[0].as_ref());
            for t in &window[1..] {
                gram.push(' ');
                gram.push_str(t.as_ref());
            }
            out.push(gram);
        }
    }
    out
}

fn collapse_whitespace(text: &str) -> Vec<char> {
    let mut chars = Vec::with_capacity(text.len());
    let mut in_space = false;
    for c in text.chars() {
        if c.is_whitespace() {
            if !in_space {
                chars.push(' ');
            }
            in_space = true;
        } else {
            chars.push(c);
            in_space = false;
        }
    }
    chars
}

/// Character windows over the text with whitespace runs collapsed to one
/// space. Windows count Unicode scalar values.
pub fn char_ngrams(text: &str, range: NgramRange) -> Vec<String> {
    let chars = collapse_whitespace(text);
    let mut out = Vec::new();
    for n in range.sizes() {
        if chars.len() < n {
            break;
        }
        out.extend(chars.windows(n).map(|w| w.iter().collect::<String>()));
    }
    out
}

/// Character windows taken only inside each space-padded word. A padded
/// word no longer than `n` is emitted whole, once, and stops the scan for
/// larger `n`.
pub fn char_wb_ngrams(text: &str, range: NgramRange) -> Vec<String> {
    let mut out = Vec::new();
    for word in tokenize_words(text) {
        let mut padded = Vec::with_capacity(word.len() + 2);
        padded.push(' ');
        padded.extend(word.chars());
        padded.push(' ');
        for n in range.sizes() {
            if padded.len() <= n {
                out.push(padded.iter().collect());
                break;
            }
            out.extend(padded.windows(n).map(|w| w.iter().collect::<String>()));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(lo: usize, hi: usize) -> NgramRange {
        NgramRange::new(lo, hi).unwrap()
    }

    #[test]
    fn tokenizes_arabic_on_whitespace() {
        assert_eq!(tokenize_words("مرحبا يا عالم"), ["مرحبا", "يا", "عالم"]);
    }

    #[test]
    fn punctuation_separates_tokens() {
        assert_eq!(tokenize_words("a-b c"), ["a", "b", "c"]);
        assert_eq!(tokenize_words("snake_case, x1!"), ["snake_case", "x1"]);
        assert!(tokenize_words("").is_empty());
        assert!(tokenize_words(" ... ").is_empty());
    }

    #[test]
    fn word_ngram_examples() {
        assert_eq!(
            word_ngrams(&["a", "b", "c"], r(1, 2)),
            ["a", "b", "c", "a b", "b c"]
        );
        assert!(word_ngrams(&["a"], r(2, 2)).is_empty());
        assert_eq!(word_ngrams(&["a", "b"], r(1, 1)), ["a", "b"]);
    }

    #[test]
    fn char_ngram_examples() {
        assert_eq!(char_ngrams("ab c", r(2, 2)), ["ab", "b ", " c"]);
        assert!(char_ngrams("ab", r(3, 3)).is_empty());
        assert_eq!(char_ngrams("aa", r(1, 2)), ["a", "a", "aa"]);
    }

    #[test]
    fn char_ngrams_collapse_whitespace() {
        assert_eq!(char_ngrams("a \t\n b", r(3, 3)), ["a b"]);
        assert_eq!(char_ngrams("عا لم", r(2, 2)), ["عا", "ا ", " ل", "لم"]);
    }

    #[test]
    fn char_wb_examples() {
        assert_eq!(
            char_wb_ngrams("ab cd", r(3, 3)),
            [" ab", "ab ", " cd", "cd "]
        );
        assert_eq!(char_wb_ngrams("ab", r(2, 2)), [" a", "ab", "b "]);
        assert_eq!(char_wb_ngrams("a", r(5, 5)), [" a "]);
    }

    #[test]
    fn char_wb_short_word_emitted_once() {
        assert_eq!(char_wb_ngrams("a", r(2, 5)), [" a", "a ", " a "]);
        assert_eq!(char_wb_ngrams("a", r(3, 5)), [" a "]);
    }

    #[test]
    fn range_validation() {
        assert!(NgramRange::new(0, 1).is_err());
        assert!(NgramRange::new(3, 2).is_err());
        assert!(NgramRange::new(1, 11).is_err());
        assert!(NgramRange::new(10, 10).is_ok());
        assert!(serde_json::from_str::<NgramRange>(r#"{"lo":2,"hi":1}"#).is_err());
    }
}
