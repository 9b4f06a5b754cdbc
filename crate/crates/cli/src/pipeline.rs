//! Pipeline execution: corpus -> vectorizer -> solver -> report files.

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::Context;
use serde::Serialize;

use nmf_forge_core::report::{
    confusion_counts, ClassificationReport, FactorizationReport, LayerChainReport,
    SupervisedModelReport, TopicTreeReport, TriFactorizationReport, TrialReport,
};
use nmf_forge_core::{
    assign_documents, binarize_prediction, build_vocabulary, count_cooccurrences,
    highlight_keywords, las, load_corpus, load_labels, nmf, parse_keyword_list, semantic_nmf,
    snmf_predict, snmf_train, split_train_test, sppmi, ssnmf, stopwords, tfidf_matrix,
    topdown_hnmf, topic_keywords, bottomup_hnmf, Corpus, LabelMatrix, SolverOptions,
    TermDocumentMatrix, TrainTestSplit, VectorizerParams,
};

use crate::config::{CommandKind, RunConfig};
use crate::render;

/// Everything a finished run produces.
pub struct RunOutput {
    pub report_json: String,
    pub table: String,
    pub summary: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct HighlightInfo {
    pub factor: f64,
    pub matched: Vec<String>,
    pub missing: Vec<String>,
}

/// Topic-style report shared by nmf / semantic / hierarchical runs.
#[derive(Serialize)]
struct TopicRunReport<'a, F: Serialize> {
    config: &'a RunConfig,
    #[serde(skip_serializing_if = "Option::is_none")]
    highlight: Option<&'a HighlightInfo>,
    residual: f64,
    topics: Vec<Vec<String>>,
    /// Topic index per document, aligned with the factorization's doc_ids.
    assignments: Vec<usize>,
    /// doc_ids of all-zero coding columns (assigned to topic 0 by rule).
    unassigned: Vec<String>,
    factorization: F,
}

#[derive(Serialize)]
struct TreeRunReport<'a> {
    config: &'a RunConfig,
    #[serde(skip_serializing_if = "Option::is_none")]
    highlight: Option<&'a HighlightInfo>,
    tree: TopicTreeReport,
}

#[derive(Serialize)]
struct ChainRunReport<'a> {
    config: &'a RunConfig,
    #[serde(skip_serializing_if = "Option::is_none")]
    highlight: Option<&'a HighlightInfo>,
    chain: LayerChainReport,
}

#[derive(Serialize)]
struct ClassificationRunReport<'a> {
    config: &'a RunConfig,
    classification: ClassificationReport,
    /// Model of the final trial, for inspection.
    last_model: SupervisedModelReport,
}

fn vectorize(
    config: &RunConfig,
) -> anyhow::Result<(Corpus, TermDocumentMatrix, Option<HighlightInfo>)> {
    let corpus = load_corpus(&config.corpus)?;
    let stop = match &config.stopwords {
        Some(path) => stopwords::load_stopword_file(path)?,
        None => stopwords::english().clone(),
    };
    let extra = match &config.extra_stopwords {
        Some(path) => stopwords::load_stopword_file(path)?,
        None => BTreeSet::new(),
    };
    let params = VectorizerParams {
        max_df: config.max_df,
        min_df: config.min_df,
        max_features: config.max_features,
        stopwords: stop,
        extra_stopwords: extra,
    };
    let vocab = build_vocabulary(&corpus, &params)?;
    let mut x = tfidf_matrix(&corpus, &vocab);
    let highlight = match &config.keywords {
        Some(path) => {
            let body = fs::read_to_string(path)
                .with_context(|| format!("reading keyword file {}", path.display()))?;
            let phrases = parse_keyword_list(&body);
            let out = highlight_keywords(&x, &phrases, config.highlight_factor)?;
            x = out.matrix;
            Some(HighlightInfo {
                factor: config.highlight_factor,
                matched: out.matched,
                missing: out.missing,
            })
        }
        None => None,
    };
    Ok((corpus, x, highlight))
}

fn solver_options(rank: usize, seed: u64) -> SolverOptions {
    // max_iters/tol stay at library defaults; the config echo plus seed
    // fully determines the run.
    SolverOptions::new(rank).with_seed(seed)
}

/// Executes the configured pipeline and renders its outputs.
pub fn run(config: &RunConfig) -> anyhow::Result<RunOutput> {
    match config.command {
        CommandKind::Nmf => run_nmf(config),
        CommandKind::Semantic => run_semantic(config),
        CommandKind::HnmfTopdown => run_topdown(config),
        CommandKind::HnmfBottomup => run_bottomup(config),
        CommandKind::Snmf | CommandKind::Ssnmf => run_classification(config),
    }
}

fn run_nmf(config: &RunConfig) -> anyhow::Result<RunOutput> {
    let (_corpus, x, highlight) = vectorize(config)?;
    let opts = solver_options(config.rank, config.seed);
    let f = nmf(&x.values, &opts)?;
    let top_k = config.top_k.min(x.vocab.len());
    let topics = topic_keywords(&f.w, &x.vocab, top_k)?;
    let assignments = assign_documents(&f.h);
    let residual = f.final_objective();
    let report = TopicRunReport {
        config,
        highlight: highlight.as_ref(),
        residual,
        topics: topics.clone(),
        assignments: assignments.topics.clone(),
        unassigned: assignments
            .unassigned
            .iter()
            .map(|&j| x.doc_ids[j].clone())
            .collect(),
        factorization: FactorizationReport::new(&f, &x.vocab, &x.doc_ids),
    };
    let table = render::topic_table(&topics, residual, config);
    let summary = format!(
        "nmf: {} topics over {} docs x {} terms; residual {:.6}; {} iterations",
        f.rank(),
        x.num_docs(),
        x.num_terms(),
        residual,
        f.iterations_run,
    );
    Ok(RunOutput {
        report_json: to_pretty_json(&report)?,
        table,
        summary,
    })
}

fn run_semantic(config: &RunConfig) -> anyhow::Result<RunOutput> {
    let (corpus, x, highlight) = vectorize(config)?;
    let context = count_cooccurrences(&corpus, &x.vocab, config.window)?;
    let m = sppmi(&context, config.shift)?;
    let opts = solver_options(config.rank, config.seed);
    let f = semantic_nmf(&x.values, &m, &opts)?;
    let top_k = config.top_k.min(x.vocab.len());
    let topics = topic_keywords(&f.w, &x.vocab, top_k)?;
    let assignments = assign_documents(&f.h);
    let residual = f.final_objective();
    let report = TopicRunReport {
        config,
        highlight: highlight.as_ref(),
        residual,
        topics: topics.clone(),
        assignments: assignments.topics.clone(),
        unassigned: assignments
            .unassigned
            .iter()
            .map(|&j| x.doc_ids[j].clone())
            .collect(),
        factorization: TriFactorizationReport::new(&f, &x.vocab, &x.doc_ids),
    };
    let table = render::topic_table(&topics, residual, config);
    let summary = format!(
        "semantic: {} topics over {} docs x {} terms; objective {:.6}; {} iterations",
        f.rank(),
        x.num_docs(),
        x.num_terms(),
        residual,
        f.iterations_run,
    );
    Ok(RunOutput {
        report_json: to_pretty_json(&report)?,
        table,
        summary,
    })
}

fn run_topdown(config: &RunConfig) -> anyhow::Result<RunOutput> {
    let (_corpus, x, highlight) = vectorize(config)?;
    let ranks = config.ranks.clone().expect("resolve() fills topdown ranks");
    let opts = solver_options(ranks[0], config.seed);
    let tree = topdown_hnmf(&x.values, &ranks, &opts)?;
    let top_k = config.top_k.min(x.vocab.len());
    let tree_report = TopicTreeReport::new(&tree, &x.vocab, &x.doc_ids, top_k)?;
    let table = render::tree_outline(&tree_report, config);
    let summary = format!(
        "hnmf-topdown: rank schedule {:?} over {} docs; {} leaves",
        ranks,
        x.num_docs(),
        tree.root.leaf_count(),
    );
    let report = TreeRunReport {
        config,
        highlight: highlight.as_ref(),
        tree: tree_report,
    };
    Ok(RunOutput {
        report_json: to_pretty_json(&report)?,
        table,
        summary,
    })
}

fn run_bottomup(config: &RunConfig) -> anyhow::Result<RunOutput> {
    let (_corpus, x, highlight) = vectorize(config)?;
    let ranks = config.ranks.clone().expect("resolve() fills bottomup ranks");
    let opts = solver_options(ranks[0], config.seed);
    let chain = bottomup_hnmf(&x.values, &ranks, &opts)?;
    let top_k = config.top_k.min(x.vocab.len());
    let chain_report = LayerChainReport::new(&chain, &x.vocab, top_k)?;
    let table = render::chain_tables(&chain_report, config);
    let summary = format!(
        "hnmf-bottomup: ranks {:?} over {} docs; residuals {:?}",
        ranks,
        x.num_docs(),
        chain
            .residuals
            .iter()
            .map(|r| (r * 1e4).round() / 1e4)
            .collect::<Vec<_>>(),
    );
    let report = ChainRunReport {
        config,
        highlight: highlight.as_ref(),
        chain: chain_report,
    };
    Ok(RunOutput {
        report_json: to_pretty_json(&report)?,
        table,
        summary,
    })
}

fn run_classification(config: &RunConfig) -> anyhow::Result<RunOutput> {
    let (corpus, x, _) = vectorize(config)?;
    let labels_path = config.labels.as_ref().expect("resolve() checks labels");
    let labels = load_labels(labels_path, &corpus)?;
    if labels.num_classes() == 0 {
        anyhow::bail!("labels file defines no classes");
    }
    let y = LabelMatrix::from_label_set(&labels, &x.doc_ids);
    if config.trials == 0 {
        anyhow::bail!("--trials must be >= 1");
    }
    let n = x.values.ncols();
    let mut trials = Vec::with_capacity(config.trials);
    let mut last_model = None;
    for trial in 0..config.trials {
        let seed = config.seed + trial as u64;
        let split = split_train_test(n, config.split, seed)?;
        let opts = solver_options(config.rank, seed);
        let y_test = TrainTestSplit::select(&y.y, &split.test);
        let (model, scores) = match config.command {
            CommandKind::Snmf => {
                let x_train = TrainTestSplit::select(&x.values, &split.train);
                let y_train = TrainTestSplit::select(&y.y, &split.train);
                let x_test = TrainTestSplit::select(&x.values, &split.test);
                let model = snmf_train(&x_train, &y_train, config.lambda, &opts)?;
                let prediction = snmf_predict(&model, &x_test)?;
                (model, prediction.scores)
            }
            CommandKind::Ssnmf => {
                let mask = split.mask(y.num_classes());
                let (model, y_prime) = ssnmf(&x.values, &y.y, &mask, config.lambda, &opts)?;
                let scores = TrainTestSplit::select(&y_prime, &split.test);
                (model, scores)
            }
            _ => unreachable!("classification commands only"),
        };
        let binarized = binarize_prediction(&scores);
        let score = las(&binarized.matrix, &y_test)?;
        trials.push(TrialReport {
            seed,
            las: score,
            confusion: confusion_counts(&binarized.matrix, &y_test),
            flagged_columns: binarized.flagged.len(),
        });
        last_model = Some(model);
    }
    let classification = ClassificationReport::new(y.classes.clone(), trials);
    let table = render::classification_table(&classification, config);
    let summary = format!(
        "{}: mean LAS {:.4} +/- {:.4} over {} trials ({} classes, {} docs)",
        config.command.as_str(),
        classification.mean_las,
        classification.std_las,
        config.trials,
        y.num_classes(),
        n,
    );
    let report = ClassificationRunReport {
        config,
        classification,
        last_model: SupervisedModelReport::new(&last_model.expect("trials >= 1")),
    };
    Ok(RunOutput {
        report_json: to_pretty_json(&report)?,
        table,
        summary,
    })
}

fn to_pretty_json<T: Serialize>(value: &T) -> anyhow::Result<String> {
    let mut json = serde_json::to_string_pretty(value)?;
    json.push('\n');
    Ok(json)
}

/// Writes report files, removing anything already written on failure so
/// a failed run leaves no partial outputs behind.
pub fn write_outputs(out_dir: &Path, output: &RunOutput) -> anyhow::Result<Vec<PathBuf>> {
    fs::create_dir_all(out_dir)
        .with_context(|| format!("creating output directory {}", out_dir.display()))?;
    let files = [
        (out_dir.join("report.json"), output.report_json.as_str()),
        (out_dir.join("report.txt"), output.table.as_str()),
    ];
    let mut written = Vec::new();
    for (path, body) in files {
        match fs::write(&path, body) {
            Ok(()) => written.push(path),
            Err(err) => {
                for w in &written {
                    let _ = fs::remove_file(w);
                }
                return Err(err).with_context(|| format!("writing {}", path.display()));
            }
        }
    }
    Ok(written)
}
