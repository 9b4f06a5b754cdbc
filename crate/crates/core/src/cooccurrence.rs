//! Word co-occurrence counting and the shifted positive PMI matrix.

use ndarray::Array2;

use crate::corpus::Corpus;
use crate::vectorizer::{tokenize, Vocabulary};
use crate::{Error, Result};

/// Symmetric d x d co-occurrence counts over a vocabulary.
///
/// Entry (i, j) counts ordered appearances of term j within `window`
/// positions of term i in the vocabulary-filtered token stream, so each
/// unordered pair contributes to both (i, j) and (j, i). Diagonal entries
/// count a term near other instances of itself, never a token with
/// itself.
#[derive(Debug, Clone)]
pub struct ContextMatrix {
    pub counts: Array2<u64>,
    pub window: usize,
}

impl ContextMatrix {
    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }
}

/// Non-negative, symmetric d x d shifted positive PMI matrix.
#[derive(Debug, Clone)]
pub struct SppmiMatrix {
    pub values: Array2<f64>,
    pub shift: f64,
}

/// Counts co-occurrences within a symmetric window of `window` tokens on
/// each side. Tokens outside the vocabulary are dropped before windowing
/// (order preserved); windows never cross document boundaries.
pub fn count_cooccurrences(
    corpus: &Corpus,
    vocab: &Vocabulary,
    window: usize,
) -> Result<ContextMatrix> {
    if window < 1 {
        return Err(Error::InvalidParameter("window must be >= 1".into()));
    }
    let d = vocab.len();
    let mut counts = Array2::<u64>::zeros((d, d));
    for text in corpus.texts() {
        let filtered: Vec<usize> = tokenize(text)
            .into_iter()
            .filter_map(|t| vocab.index_of(&t))
            .collect();
        for i in 0..filtered.len() {
            let hi = (i + window).min(filtered.len().saturating_sub(1));
            for j in (i + 1)..=hi {
                let (a, b) = (filtered[i], filtered[j]);
                counts[[a, b]] += 1;
                counts[[b, a]] += 1;
            }
        }
    }
    Ok(ContextMatrix { counts, window })
}

/// Computes the shifted positive PMI matrix from co-occurrence counts:
/// `m_ij = max(ln(c_ij * total / (row_i * col_j)) - ln(shift), 0)`, with
/// zero-count pairs mapped directly to zero.
pub fn sppmi(context: &ContextMatrix, shift: f64) -> Result<SppmiMatrix> {
    if !(shift > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "shift must be > 0, got {shift}"
        )));
    }
    let counts = &context.counts;
    let total: u64 = counts.iter().sum();
    if total == 0 {
        return Err(Error::EmptyCooccurrence);
    }
    let d = counts.nrows();
    let row_sums: Vec<f64> = (0..d).map(|i| counts.row(i).iter().sum::<u64>() as f64).collect();
    let col_sums: Vec<f64> = (0..d)
        .map(|j| counts.column(j).iter().sum::<u64>() as f64)
        .collect();
    let total = total as f64;
    let log_shift = shift.ln();
    let mut values = Array2::<f64>::zeros((d, d));
    for i in 0..d {
        for j in 0..d {
            let c = counts[[i, j]];
            if c == 0 {
                continue;
            }
            let pmi = ((c as f64 * total) / (row_sums[i] * col_sums[j])).ln();
            values[[i, j]] = (pmi - log_shift).max(0.0);
        }
    }
    Ok(SppmiMatrix { values, shift })
}
