//! The `synth` subcommand: writes a planted corpus directory plus its
//! labels CSV.

use std::path::PathBuf;

use clap::Args;
use nmf_forge_core::corpus::{write_corpus_dir, write_labels_csv};
use nmf_forge_core::{generate, PlantedSpec};

#[derive(Debug, Clone, Args)]
pub struct SynthArgs {
    /// Number of planted topics
    #[arg(long, default_value_t = 4)]
    pub topics: usize,
    #[arg(long, default_value_t = 15)]
    pub docs_per_topic: usize,
    #[arg(long, default_value_t = 60)]
    pub words_per_doc: usize,
    #[arg(long, default_value_t = 10)]
    pub vocab_per_topic: usize,
    /// Cross-topic replacement probability, in [0, 0.5)
    #[arg(long, default_value_t = 0.1)]
    pub noise: f64,
    /// Group topics into this many super-topics (plants a merge map)
    #[arg(long)]
    pub supers: Option<usize>,
    /// RNG seed (falls back to NMF_FORGE_SEED, then 0)
    #[arg(long)]
    pub seed: Option<u64>,
    /// Directory receiving the .txt documents and labels.csv
    #[arg(long, default_value = "synth-corpus")]
    pub out: PathBuf,
}

pub fn run(args: &SynthArgs, env_seed: Option<u64>) -> anyhow::Result<String> {
    let mut spec = PlantedSpec::new(args.topics, args.docs_per_topic, args.words_per_doc)
        .with_vocab_per_topic(args.vocab_per_topic)
        .with_noise(args.noise)
        .with_seed(args.seed.or(env_seed).unwrap_or(0))
        .with_class_per_topic();
    if let Some(supers) = args.supers {
        spec = spec.with_contiguous_supers(supers);
    }
    let (corpus, labels, _) = generate(&spec)?;
    write_corpus_dir(&corpus, &args.out)?;
    write_labels_csv(&labels, &corpus, &args.out.join("labels.csv"))?;
    Ok(format!(
        "synth: wrote {} documents ({} topics x {}) and labels.csv to {}",
        corpus.len(),
        args.topics,
        args.docs_per_topic,
        args.out.display()
    ))
}
