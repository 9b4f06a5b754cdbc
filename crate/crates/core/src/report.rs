//! Serializable report structures for factorizations, hierarchies, and
//! classification runs. Field layouts are stable so reports are
//! byte-reproducible for a fixed config and seed.

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::hnmf::{LayerChain, TopicNode, TopicTree};
use crate::nmf::{topic_keywords, Factorization};
use crate::semantic::TriFactorization;
use crate::supervised::SupervisedModel;
use crate::vectorizer::Vocabulary;
use crate::{layer_dictionary, Result};

fn row_major(a: &Array2<f64>) -> Vec<f64> {
    a.iter().copied().collect()
}

/// JSON form of a two-factor solve.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct FactorizationReport {
    pub rank: usize,
    pub vocab_terms: Vec<String>,
    pub doc_ids: Vec<String>,
    #[serde(rename = "W")]
    pub w: Vec<f64>,
    #[serde(rename = "H")]
    pub h: Vec<f64>,
    pub objective_trace: Vec<f64>,
}

impl FactorizationReport {
    pub fn new(f: &Factorization, vocab: &Vocabulary, doc_ids: &[String]) -> Self {
        Self {
            rank: f.rank(),
            vocab_terms: vocab.terms().to_vec(),
            doc_ids: doc_ids.to_vec(),
            w: row_major(&f.w),
            h: row_major(&f.h),
            objective_trace: f.objective_trace.clone(),
        }
    }
}

/// JSON form of the coupled tri-factor solve: the two-factor layout plus
/// the symmetric `S` block.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct TriFactorizationReport {
    pub rank: usize,
    pub vocab_terms: Vec<String>,
    pub doc_ids: Vec<String>,
    #[serde(rename = "W")]
    pub w: Vec<f64>,
    #[serde(rename = "S")]
    pub s: Vec<f64>,
    #[serde(rename = "H")]
    pub h: Vec<f64>,
    pub objective_trace: Vec<f64>,
}

impl TriFactorizationReport {
    pub fn new(f: &TriFactorization, vocab: &Vocabulary, doc_ids: &[String]) -> Self {
        Self {
            rank: f.rank(),
            vocab_terms: vocab.terms().to_vec(),
            doc_ids: doc_ids.to_vec(),
            w: row_major(&f.w),
            s: row_major(&f.s),
            h: row_major(&f.h),
            objective_trace: f.objective_trace.clone(),
        }
    }
}

/// JSON form of a supervised model.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct SupervisedModelReport {
    pub rank: usize,
    pub lambda: f64,
    #[serde(rename = "W")]
    pub w: Vec<f64>,
    #[serde(rename = "H")]
    pub h: Vec<f64>,
    #[serde(rename = "B")]
    pub b: Vec<f64>,
    pub objective_trace: Vec<f64>,
}

impl SupervisedModelReport {
    pub fn new(model: &SupervisedModel) -> Self {
        Self {
            rank: model.rank(),
            lambda: model.lambda,
            w: row_major(&model.w),
            h: row_major(&model.h),
            b: row_major(&model.b),
            objective_trace: model.objective_trace.clone(),
        }
    }
}

/// One node of a serialized topic tree. Internal nodes carry their rank,
/// per-topic keywords, and residual; leaves carry only documents.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct TreeNodeReport {
    pub doc_ids: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rank: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residual: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub keywords: Option<Vec<Vec<String>>>,
    pub children: Vec<TreeNodeReport>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct TopicTreeReport {
    pub layer_ranks: Vec<usize>,
    pub root: TreeNodeReport,
}

impl TopicTreeReport {
    pub fn new(
        tree: &TopicTree,
        vocab: &Vocabulary,
        doc_ids: &[String],
        top_k: usize,
    ) -> Result<Self> {
        Ok(Self {
            layer_ranks: tree.layer_ranks.clone(),
            root: node_report(&tree.root, vocab, doc_ids, top_k)?,
        })
    }
}

fn node_report(
    node: &TopicNode,
    vocab: &Vocabulary,
    doc_ids: &[String],
    top_k: usize,
) -> Result<TreeNodeReport> {
    let (rank, residual, keywords) = match &node.factorization {
        Some(f) => {
            let k = top_k.min(vocab.len());
            (
                Some(f.rank()),
                Some(f.final_objective()),
                Some(topic_keywords(&f.w, vocab, k)?),
            )
        }
        None => (None, None, None),
    };
    let children = node
        .children
        .iter()
        .map(|c| node_report(c, vocab, doc_ids, top_k))
        .collect::<Result<Vec<_>>>()?;
    Ok(TreeNodeReport {
        doc_ids: node.doc_indices.iter().map(|&i| doc_ids[i].clone()).collect(),
        rank,
        residual,
        keywords,
        children,
    })
}

/// One layer of a serialized bottom-up chain: the layer's factor, its
/// reconstruction residual against the original matrix, and keywords of
/// the effective (product) dictionary.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct LayerReport {
    pub rank: usize,
    pub residual: f64,
    #[serde(rename = "W")]
    pub w: Vec<f64>,
    pub keywords: Vec<Vec<String>>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct LayerChainReport {
    pub ranks: Vec<usize>,
    pub layers: Vec<LayerReport>,
    #[serde(rename = "H")]
    pub h_final: Vec<f64>,
}

impl LayerChainReport {
    pub fn new(chain: &LayerChain, vocab: &Vocabulary, top_k: usize) -> Result<Self> {
        let mut layers = Vec::with_capacity(chain.depth());
        let k = top_k.min(vocab.len());
        for layer in 0..chain.depth() {
            let dictionary = layer_dictionary(chain, layer)?;
            layers.push(LayerReport {
                rank: chain.ranks[layer],
                residual: chain.residuals[layer],
                w: row_major(&chain.w_layers[layer]),
                keywords: topic_keywords(&dictionary, vocab, k)?,
            });
        }
        Ok(Self {
            ranks: chain.ranks.clone(),
            layers,
            h_final: row_major(&chain.h_final),
        })
    }
}

/// One supervised trial: its seed, score, and a true class x predicted
/// class count matrix (each true label of a document contributes one
/// count in the predicted column).
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct TrialReport {
    pub seed: u64,
    pub las: f64,
    pub confusion: Vec<Vec<u64>>,
    pub flagged_columns: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ClassificationReport {
    pub classes: Vec<String>,
    pub trials: Vec<TrialReport>,
    pub mean_las: f64,
    /// Population standard deviation over trials.
    pub std_las: f64,
}

impl ClassificationReport {
    pub fn new(classes: Vec<String>, trials: Vec<TrialReport>) -> Self {
        let n = trials.len().max(1) as f64;
        let mean = trials.iter().map(|t| t.las).sum::<f64>() / n;
        let variance = trials.iter().map(|t| (t.las - mean).powi(2)).sum::<f64>() / n;
        Self {
            classes,
            trials,
            mean_las: mean,
            std_las: variance.sqrt(),
        }
    }
}

/// Counts `confusion[true][pred] += 1` for every true label of each
/// column, where `pred` is the one-hot row of the prediction.
pub fn confusion_counts(predicted: &Array2<f64>, y_true: &Array2<f64>) -> Vec<Vec<u64>> {
    let p = y_true.nrows();
    let mut counts = vec![vec![0u64; p]; p];
    for j in 0..predicted.ncols() {
        let pred_row = predicted
            .column(j)
            .iter()
            .position(|&v| v == 1.0)
            .unwrap_or(0);
        for true_row in 0..p {
            if y_true[[true_row, j]] == 1.0 {
                counts[true_row][pred_row] += 1;
            }
        }
    }
    counts
}
