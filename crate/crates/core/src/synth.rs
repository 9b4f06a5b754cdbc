//! Seeded synthetic corpora with planted topic structure, hierarchy, and
//! class labels — the evaluation oracle for the solvers.

use std::collections::BTreeMap;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::corpus::{Corpus, LabelSet};
use crate::{Error, Result};

/// Share of tokens drawn from sibling-topic blocks when a hierarchy is
/// planted. Sibling overlap is what lets coarser factorization layers
/// recover the merge structure; without a hierarchy every token comes
/// from the document's own block.
const SIBLING_MIX: f64 = 0.2;

/// Recipe for a planted corpus.
///
/// Topic vocabularies are disjoint blocks of `vocab_per_topic` terms.
/// Each document samples `words_per_doc` tokens from its topic's block
/// (mixing in sibling blocks when `hierarchy` is set), then each token is
/// independently replaced by a uniform cross-topic token with probability
/// `noise_rate`.
#[derive(Debug, Clone)]
pub struct PlantedSpec {
    pub n_topics: usize,
    pub docs_per_topic: usize,
    pub words_per_doc: usize,
    pub vocab_per_topic: usize,
    /// Must be < 0.5 so the planted signal dominates.
    pub noise_rate: f64,
    /// Optional sub-topic -> super-topic merge map.
    pub hierarchy: Option<BTreeMap<usize, usize>>,
    /// Optional topic -> class-name map for label generation.
    pub labels: Option<BTreeMap<usize, String>>,
    pub seed: u64,
}

impl PlantedSpec {
    pub fn new(n_topics: usize, docs_per_topic: usize, words_per_doc: usize) -> Self {
        Self {
            n_topics,
            docs_per_topic,
            words_per_doc,
            vocab_per_topic: 10,
            noise_rate: 0.0,
            hierarchy: None,
            labels: None,
            seed: 0,
        }
    }

    pub fn with_vocab_per_topic(mut self, v: usize) -> Self {
        self.vocab_per_topic = v;
        self
    }

    pub fn with_noise(mut self, rate: f64) -> Self {
        self.noise_rate = rate;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_hierarchy(mut self, map: BTreeMap<usize, usize>) -> Self {
        self.hierarchy = Some(map);
        self
    }

    pub fn with_labels(mut self, map: BTreeMap<usize, String>) -> Self {
        self.labels = Some(map);
        self
    }

    /// One class per topic, named `c00`, `c01`, ...
    pub fn with_class_per_topic(mut self) -> Self {
        self.labels = Some(
            (0..self.n_topics)
                .map(|t| (t, format!("c{t:02}")))
                .collect(),
        );
        self
    }

    /// Groups topics into `supers` contiguous blocks: topic t maps to
    /// super `t / ceil(n_topics / supers)`.
    pub fn with_contiguous_supers(mut self, supers: usize) -> Self {
        let group = self.n_topics.div_ceil(supers.max(1));
        self.hierarchy = Some((0..self.n_topics).map(|t| (t, t / group)).collect());
        self
    }

    fn validate(&self) -> Result<()> {
        if self.n_topics == 0 || self.docs_per_topic == 0 || self.words_per_doc == 0 {
            return Err(Error::InvalidParameter(
                "topic, document, and word counts must be >= 1".into(),
            ));
        }
        if self.vocab_per_topic == 0 {
            return Err(Error::InvalidParameter("vocab_per_topic must be >= 1".into()));
        }
        if self.n_topics > 100 || self.vocab_per_topic > 100 {
            return Err(Error::InvalidParameter(
                "term naming supports at most 100 topics and 100 terms per topic".into(),
            ));
        }
        if !(self.noise_rate >= 0.0 && self.noise_rate < 0.5) {
            return Err(Error::InvalidParameter(format!(
                "noise_rate must be in [0, 0.5), got {}",
                self.noise_rate
            )));
        }
        if let Some(h) = &self.hierarchy {
            if h.keys().any(|&t| t >= self.n_topics) {
                return Err(Error::InvalidParameter(
                    "hierarchy maps a topic outside the planted range".into(),
                ));
            }
        }
        if let Some(l) = &self.labels {
            if l.keys().any(|&t| t >= self.n_topics) {
                return Err(Error::InvalidParameter(
                    "labels map a topic outside the planted range".into(),
                ));
            }
        }
        Ok(())
    }
}

/// Term `i` of topic `t`.
pub fn planted_term(topic: usize, index: usize) -> String {
    format!("t{topic:02}w{index:02}")
}

/// Document id for the `j`-th document of topic `t`; ids sort by topic
/// then index, so corpus order equals generation order.
pub fn planted_doc_id(topic: usize, index: usize) -> String {
    format!("t{topic:02}d{index:03}")
}

/// Generates the corpus, its labels, and the ground-truth doc -> topic
/// map. Deterministic for a fixed spec.
pub fn generate(spec: &PlantedSpec) -> Result<(Corpus, LabelSet, BTreeMap<String, usize>)> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let siblings: Vec<Vec<usize>> = (0..spec.n_topics)
        .map(|t| match &spec.hierarchy {
            Some(map) => match map.get(&t) {
                Some(super_topic) => map
                    .iter()
                    .filter(|(&sub, &sup)| sup == *super_topic && sub != t)
                    .map(|(&sub, _)| sub)
                    .collect(),
                None => Vec::new(),
            },
            None => Vec::new(),
        })
        .collect();

    let mut documents = Vec::with_capacity(spec.n_topics * spec.docs_per_topic);
    let mut ground_truth = BTreeMap::new();
    for topic in 0..spec.n_topics {
        for doc_index in 0..spec.docs_per_topic {
            let mut tokens = Vec::with_capacity(spec.words_per_doc);
            for _ in 0..spec.words_per_doc {
                let source_topic = if !siblings[topic].is_empty()
                    && rng.random::<f64>() < SIBLING_MIX
                {
                    siblings[topic][rng.random_range(0..siblings[topic].len())]
                } else {
                    topic
                };
                let mut term_topic = source_topic;
                let mut term_index = rng.random_range(0..spec.vocab_per_topic);
                if spec.n_topics > 1 && spec.noise_rate > 0.0 && rng.random::<f64>() < spec.noise_rate
                {
                    // uniform cross-topic replacement
                    let offset = rng.random_range(1..spec.n_topics);
                    term_topic = (topic + offset) % spec.n_topics;
                    term_index = rng.random_range(0..spec.vocab_per_topic);
                }
                tokens.push(planted_term(term_topic, term_index));
            }
            let doc_id = planted_doc_id(topic, doc_index);
            ground_truth.insert(doc_id.clone(), topic);
            documents.push((doc_id, tokens.join(" ")));
        }
    }
    let corpus = Corpus::from_documents(documents, "synthetic")?;
    let named: BTreeMap<String, Vec<String>> = match &spec.labels {
        Some(class_of) => ground_truth
            .iter()
            .filter_map(|(doc_id, topic)| {
                class_of
                    .get(topic)
                    .map(|class| (doc_id.clone(), vec![class.clone()]))
            })
            .collect(),
        None => BTreeMap::new(),
    };
    let labels = LabelSet::from_names(&named, &corpus)?;
    Ok((corpus, labels, ground_truth))
}

/// Best clustering accuracy of `assigned` against `truth` over all
/// permutations of cluster ids (brute force; both sides must use ids
/// below `k`).
pub fn permutation_accuracy(assigned: &[usize], truth: &[usize], k: usize) -> f64 {
    assert_eq!(assigned.len(), truth.len());
    assert!(k <= 8, "brute-force matching is factorial in k");
    let mut perm: Vec<usize> = (0..k).collect();
    let mut best = 0usize;
    permute(&mut perm, 0, &mut |p| {
        let hits = assigned
            .iter()
            .zip(truth)
            .filter(|(&a, &t)| p[a] == t)
            .count();
        best = best.max(hits);
    });
    best as f64 / assigned.len() as f64
}

fn permute(items: &mut Vec<usize>, start: usize, visit: &mut impl FnMut(&[usize])) {
    if start == items.len() {
        visit(items);
        return;
    }
    for i in start..items.len() {
        items.swap(start, i);
        permute(items, start + 1, visit);
        items.swap(start, i);
    }
}
