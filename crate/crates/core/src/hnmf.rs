//! Hierarchical topic structure: recursive top-down splitting and
//! multiplicative bottom-up layering.

use ndarray::{Array2, Axis};

use crate::derive_seed;
use crate::nmf::{assign_documents, nmf, Factorization, SolverOptions};
use crate::{Error, Result};

/// One node of a top-down topic tree.
///
/// An internal node holds a factorization of the column-submatrix of the
/// full data matrix restricted to `doc_indices` (all vocabulary rows are
/// kept) and one child per topic; a leaf holds only its documents.
#[derive(Debug, Clone)]
pub struct TopicNode {
    /// Ascending indices into the columns of the original matrix.
    pub doc_indices: Vec<usize>,
    pub factorization: Option<Factorization>,
    pub children: Vec<TopicNode>,
}

impl TopicNode {
    pub fn is_leaf(&self) -> bool {
        self.children.is_empty()
    }

    fn leaf(doc_indices: Vec<usize>) -> Self {
        Self {
            doc_indices,
            factorization: None,
            children: Vec::new(),
        }
    }

    /// Number of leaves under (and including) this node.
    pub fn leaf_count(&self) -> usize {
        if self.is_leaf() {
            1
        } else {
            self.children.iter().map(TopicNode::leaf_count).sum()
        }
    }
}

/// Top-down hierarchy: a tree of factorizations over document subsets.
#[derive(Debug, Clone)]
pub struct TopicTree {
    pub root: TopicNode,
    pub layer_ranks: Vec<usize>,
}

/// Recursively factorizes `x` following a per-level rank schedule.
///
/// Level 0 factorizes the full matrix at `layer_ranks[0]`; documents are
/// routed to one child per topic by coding-column argmax; each child with
/// at least two documents (and any nonzero entry) is factorized at the
/// next level's rank, clamped to its document count. Recursion stops
/// after `layer_ranks.len()` levels. Child seeds derive from the parent
/// seed and child index, so sibling results are schedule-independent.
pub fn topdown_hnmf(
    x: &Array2<f64>,
    layer_ranks: &[usize],
    opts: &SolverOptions,
) -> Result<TopicTree> {
    if layer_ranks.is_empty() {
        return Err(Error::InvalidParameter("layer_ranks must be non-empty".into()));
    }
    if layer_ranks.iter().any(|&r| r < 2) {
        return Err(Error::InvalidParameter(
            "every top-down layer rank must be >= 2".into(),
        ));
    }
    let all_docs: Vec<usize> = (0..x.ncols()).collect();
    let root = build_node(x, all_docs, 0, layer_ranks, opts, opts.seed)?;
    Ok(TopicTree {
        root,
        layer_ranks: layer_ranks.to_vec(),
    })
}

fn build_node(
    x: &Array2<f64>,
    doc_indices: Vec<usize>,
    level: usize,
    layer_ranks: &[usize],
    opts: &SolverOptions,
    seed: u64,
) -> Result<TopicNode> {
    if level >= layer_ranks.len() || doc_indices.len() < 2 {
        return Ok(TopicNode::leaf(doc_indices));
    }
    let sub = x.select(Axis(1), &doc_indices);
    if sub.iter().all(|&v| v == 0.0) {
        return Ok(TopicNode::leaf(doc_indices));
    }
    let rank = layer_ranks[level].min(doc_indices.len());
    let node_opts = SolverOptions {
        rank,
        seed,
        ..opts.clone()
    };
    let factorization = nmf(&sub, &node_opts)?;
    let assignments = assign_documents(&factorization.h);
    let mut children = Vec::with_capacity(rank);
    for topic in 0..rank {
        let child_docs: Vec<usize> = doc_indices
            .iter()
            .zip(&assignments.topics)
            .filter(|(_, &t)| t == topic)
            .map(|(&doc, _)| doc)
            .collect();
        children.push(build_node(
            x,
            child_docs,
            level + 1,
            layer_ranks,
            opts,
            derive_seed(seed, topic as u64),
        )?);
    }
    Ok(TopicNode {
        doc_indices,
        factorization: Some(factorization),
        children,
    })
}

/// Bottom-up hierarchy: `X ~ W(0) W(1) ... W(L) H(L)` with strictly
/// decreasing ranks. `w_layers[i]` is the factor learned at layer i and
/// `residuals[i]` is the squared Frobenius error of the depth-i
/// reconstruction of `X`.
#[derive(Debug, Clone)]
pub struct LayerChain {
    pub w_layers: Vec<Array2<f64>>,
    pub h_final: Array2<f64>,
    pub ranks: Vec<usize>,
    pub residuals: Vec<f64>,
}

impl LayerChain {
    pub fn depth(&self) -> usize {
        self.w_layers.len()
    }
}

/// Chains factorizations: layer 0 factorizes `x` at `rank_sequence[0]`;
/// layer i factorizes the previous coding matrix at `rank_sequence[i]`.
pub fn bottomup_hnmf(
    x: &Array2<f64>,
    rank_sequence: &[usize],
    opts: &SolverOptions,
) -> Result<LayerChain> {
    if rank_sequence.is_empty() {
        return Err(Error::InvalidParameter("rank sequence must be non-empty".into()));
    }
    if rank_sequence[0] < 2 {
        return Err(Error::InvalidParameter("first rank must be >= 2".into()));
    }
    if rank_sequence.windows(2).any(|p| p[1] >= p[0]) {
        return Err(Error::InvalidParameter(
            "rank sequence must be strictly decreasing".into(),
        ));
    }
    let mut w_layers = Vec::with_capacity(rank_sequence.len());
    let mut residuals = Vec::with_capacity(rank_sequence.len());
    let mut prefix: Option<Array2<f64>> = None;
    let mut current = x.clone();
    let mut h_final = Array2::zeros((0, 0));
    for (layer, &rank) in rank_sequence.iter().enumerate() {
        let seed = if layer == 0 {
            opts.seed
        } else {
            derive_seed(opts.seed, layer as u64)
        };
        let layer_opts = SolverOptions {
            rank,
            seed,
            ..opts.clone()
        };
        let fact = nmf(&current, &layer_opts)?;
        let dictionary = match &prefix {
            None => fact.w.clone(),
            Some(p) => p.dot(&fact.w),
        };
        let recon = dictionary.dot(&fact.h);
        residuals.push(crate::linalg::diff_frobenius_sq(x, &recon));
        current = fact.h.clone();
        h_final = fact.h.clone();
        w_layers.push(fact.w);
        prefix = Some(dictionary);
    }
    Ok(LayerChain {
        w_layers,
        h_final,
        ranks: rank_sequence.to_vec(),
        residuals,
    })
}

/// Effective dictionary at a layer: the product `W(0) ... W(layer)`,
/// whose columns drive keyword extraction at that granularity.
pub fn layer_dictionary(chain: &LayerChain, layer: usize) -> Result<Array2<f64>> {
    if layer >= chain.w_layers.len() {
        return Err(Error::InvalidParameter(format!(
            "layer {layer} out of range for chain of depth {}",
            chain.w_layers.len()
        )));
    }
    let mut product = chain.w_layers[0].clone();
    for w in &chain.w_layers[1..=layer] {
        product = product.dot(w);
    }
    Ok(product)
}
