//! Text-to-matrix pipeline: tokenization, vocabulary pruning, tf-idf
//! weighting, and keyword highlighting.

use std::collections::{BTreeSet, HashMap};

use ndarray::{Array2, Axis};

use crate::corpus::Corpus;
use crate::{stopwords, Error, Result};

/// Bundled keyword list for highlighting (see `keywords/cip.txt` at the
/// repository root; comma- or newline-separated phrases).
pub const CIP_KEYWORDS: &str =
    include_str!(concat!(env!("CARGO_MANIFEST_DIR"), "/../../keywords/cip.txt"));

/// Lowercases and splits on every maximal run of non-word characters
/// (anything outside `[a-z0-9_]`). Empty tokens are dropped.
pub fn tokenize(text: &str) -> Vec<String> {
    text.to_lowercase()
        .split(|c: char| !(c.is_ascii_lowercase() || c.is_ascii_digit() || c == '_'))
        .filter(|t| !t.is_empty())
        .map(str::to_owned)
        .collect()
}

/// Splits a keyword file body into phrases: comma- or newline-separated,
/// trimmed, empties dropped.
pub fn parse_keyword_list(text: &str) -> Vec<String> {
    text.split(|c| c == ',' || c == '\n' || c == '\r')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(str::to_string)
        .collect()
}

/// Vocabulary pruning parameters.
///
/// `min_df`/`max_df` are document-frequency fractions; a term survives iff
/// `doc_freq/n` lies in `[min_df, max_df]` and the term is in neither
/// stopword set. When `max_features` is set, the highest-corpus-frequency
/// survivors are kept (ties broken lexicographically).
#[derive(Debug, Clone)]
pub struct VectorizerParams {
    pub max_df: f64,
    pub min_df: f64,
    pub max_features: Option<usize>,
    pub stopwords: BTreeSet<String>,
    pub extra_stopwords: BTreeSet<String>,
}

impl Default for VectorizerParams {
    /// No frequency pruning, bundled English stopwords, no feature cap.
    fn default() -> Self {
        Self {
            max_df: 1.0,
            min_df: 0.0,
            max_features: None,
            stopwords: stopwords::english().clone(),
            extra_stopwords: BTreeSet::new(),
        }
    }
}

impl VectorizerParams {
    /// Params that retain every distinct token (no stopwords, no pruning).
    pub fn keep_all() -> Self {
        Self {
            stopwords: BTreeSet::new(),
            ..Self::default()
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.max_df > 0.0 && self.max_df <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "max_df must be in (0,1], got {}",
                self.max_df
            )));
        }
        if !(self.min_df >= 0.0 && self.min_df < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "min_df must be in [0,1), got {}",
                self.min_df
            )));
        }
        if self.min_df >= self.max_df {
            return Err(Error::InvalidParameter(format!(
                "min_df ({}) must be < max_df ({})",
                self.min_df, self.max_df
            )));
        }
        if self.max_features == Some(0) {
            return Err(Error::InvalidParameter("max_features must be >= 1".into()));
        }
        Ok(())
    }
}

/// An ordered term list with frequency statistics and a term -> row map.
/// Terms are sorted lexicographically, fixing the row order of the
/// term-document matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vocabulary {
    terms: Vec<String>,
    doc_freq: Vec<usize>,
    corpus_freq: Vec<usize>,
    index: HashMap<String, usize>,
}

impl Vocabulary {
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> &[String] {
        &self.terms
    }

    pub fn term(&self, row: usize) -> &str {
        &self.terms[row]
    }

    pub fn index_of(&self, term: &str) -> Option<usize> {
        self.index.get(term).copied()
    }

    pub fn doc_freq(&self, row: usize) -> usize {
        self.doc_freq[row]
    }

    pub fn corpus_freq(&self, row: usize) -> usize {
        self.corpus_freq[row]
    }
}

/// Builds the pruned vocabulary for a corpus.
pub fn build_vocabulary(corpus: &Corpus, params: &VectorizerParams) -> Result<Vocabulary> {
    params.validate()?;
    if corpus.is_empty() {
        return Err(Error::InvalidParameter("corpus is empty".into()));
    }
    let n = corpus.len() as f64;
    let mut doc_freq: HashMap<String, usize> = HashMap::new();
    let mut corpus_freq: HashMap<String, usize> = HashMap::new();
    for text in corpus.texts() {
        let tokens = tokenize(text);
        for token in &tokens {
            *corpus_freq.entry(token.clone()).or_insert(0) += 1;
        }
        for token in tokens.into_iter().collect::<BTreeSet<_>>() {
            *doc_freq.entry(token).or_insert(0) += 1;
        }
    }

    let mut survivors: Vec<String> = doc_freq
        .iter()
        .filter(|(term, &df)| {
            let frac = df as f64 / n;
            frac >= params.min_df
                && frac <= params.max_df
                && !params.stopwords.contains(*term)
                && !params.extra_stopwords.contains(*term)
        })
        .map(|(term, _)| term.clone())
        .collect();

    if let Some(cap) = params.max_features {
        if survivors.len() > cap {
            survivors.sort_by(|a, b| corpus_freq[b].cmp(&corpus_freq[a]).then_with(|| a.cmp(b)));
            survivors.truncate(cap);
        }
    }
    survivors.sort();

    if survivors.is_empty() {
        return Err(Error::EmptyVocabulary);
    }
    let index: HashMap<String, usize> = survivors
        .iter()
        .enumerate()
        .map(|(i, t)| (t.clone(), i))
        .collect();
    let doc_freq = survivors.iter().map(|t| doc_freq[t]).collect();
    let corpus_freq = survivors.iter().map(|t| corpus_freq[t]).collect();
    Ok(Vocabulary {
        terms: survivors,
        doc_freq,
        corpus_freq,
        index,
    })
}

/// Non-negative d x n matrix of tf-idf weights; rows are vocabulary
/// terms, columns are documents. Each nonzero column has unit Euclidean
/// norm before any keyword highlighting.
#[derive(Debug, Clone)]
pub struct TermDocumentMatrix {
    pub values: Array2<f64>,
    pub vocab: Vocabulary,
    pub doc_ids: Vec<String>,
}

impl TermDocumentMatrix {
    pub fn num_terms(&self) -> usize {
        self.values.nrows()
    }

    pub fn num_docs(&self) -> usize {
        self.values.ncols()
    }
}

/// Computes the tf-idf matrix for a corpus over a vocabulary built from
/// it. Raw weight is `tf * (ln((1+n)/(1+df)) + 1)`; each column is then
/// scaled to unit Euclidean norm (all-zero columns stay zero).
pub fn tfidf_matrix(corpus: &Corpus, vocab: &Vocabulary) -> TermDocumentMatrix {
    let d = vocab.len();
    let n = corpus.len();
    let idf: Vec<f64> = (0..d)
        .map(|i| ((1.0 + n as f64) / (1.0 + vocab.doc_freq(i) as f64)).ln() + 1.0)
        .collect();
    let mut values = Array2::<f64>::zeros((d, n));
    for (j, text) in corpus.texts().enumerate() {
        let mut tf: HashMap<usize, usize> = HashMap::new();
        for token in tokenize(text) {
            if let Some(row) = vocab.index_of(&token) {
                *tf.entry(row).or_insert(0) += 1;
            }
        }
        for (row, count) in tf {
            values[[row, j]] = count as f64 * idf[row];
        }
        let norm = values.column(j).mapv(|v| v * v).sum().sqrt();
        if norm > 0.0 {
            values.column_mut(j).mapv_inplace(|v| v / norm);
        }
    }
    TermDocumentMatrix {
        values,
        vocab: vocab.clone(),
        doc_ids: corpus.doc_ids(),
    }
}

/// Result of keyword highlighting: the scaled matrix plus which keyword
/// tokens matched the vocabulary and which were ignored.
#[derive(Debug, Clone)]
pub struct Highlighted {
    pub matrix: TermDocumentMatrix,
    pub matched: Vec<String>,
    pub missing: Vec<String>,
}

/// Multiplies the vocabulary rows named by `keywords` by `factor`.
///
/// Multi-word phrases are split by [`tokenize`] and each token treated as
/// a keyword; tokens absent from the vocabulary are reported back in
/// `missing` rather than failing.
pub fn highlight_keywords(
    x: &TermDocumentMatrix,
    keywords: &[String],
    factor: f64,
) -> Result<Highlighted> {
    if !(factor > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "highlight factor must be > 0, got {factor}"
        )));
    }
    let tokens: BTreeSet<String> = keywords.iter().flat_map(|k| tokenize(k)).collect();
    let mut matrix = x.clone();
    let mut matched = Vec::new();
    let mut missing = Vec::new();
    for token in tokens {
        match x.vocab.index_of(&token) {
            Some(row) => {
                matrix
                    .values
                    .index_axis_mut(Axis(0), row)
                    .mapv_inplace(|v| v * factor);
                matched.push(token);
            }
            None => missing.push(token),
        }
    }
    Ok(Highlighted {
        matrix,
        matched,
        missing,
    })
}
