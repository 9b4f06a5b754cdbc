//! Run configuration: flag/file merging, presets, and the resolved
//! config echoed into every report.

use std::path::PathBuf;

use anyhow::{bail, Context};
use clap::Args;
use serde::{Deserialize, Serialize};

/// Which pipeline a run executes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CommandKind {
    Nmf,
    Semantic,
    HnmfTopdown,
    HnmfBottomup,
    Snmf,
    Ssnmf,
}

impl CommandKind {
    pub fn needs_labels(self) -> bool {
        matches!(self, CommandKind::Snmf | CommandKind::Ssnmf)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            CommandKind::Nmf => "nmf",
            CommandKind::Semantic => "semantic",
            CommandKind::HnmfTopdown => "hnmf-topdown",
            CommandKind::HnmfBottomup => "hnmf-bottomup",
            CommandKind::Snmf => "snmf",
            CommandKind::Ssnmf => "ssnmf",
        }
    }
}

/// Named parameter presets mirroring the two corpus kinds the toolkit is
/// tuned for: `letters` (rank 7, min_df 0.015, max_df 0.8) and `aob`
/// (rank 10, min_df 0.04, max_df 0.8). Semantic runs under a preset also
/// cap the vocabulary at 700 terms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Preset {
    Letters,
    Aob,
}

impl Preset {
    fn rank(self) -> usize {
        match self {
            Preset::Letters => 7,
            Preset::Aob => 10,
        }
    }

    fn min_df(self) -> f64 {
        match self {
            Preset::Letters => 0.015,
            Preset::Aob => 0.04,
        }
    }

    fn hierarchy_ranks(self) -> Vec<usize> {
        match self {
            Preset::Letters => vec![7, 5, 3],
            Preset::Aob => vec![10, 4, 2],
        }
    }
}

/// Partial configuration: every knob optional. The same shape serves as
/// CLI flags and as the JSON config-file format; flags override file
/// entries.
#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunOverrides {
    /// Directory of UTF-8 .txt documents
    #[arg(long)]
    pub corpus: Option<PathBuf>,
    /// CSV of doc_id,labels rows (labels `;`-separated)
    #[arg(long)]
    pub labels: Option<PathBuf>,
    /// Number of topics
    #[arg(long)]
    pub rank: Option<usize>,
    /// Per-layer rank schedule for hierarchical runs, e.g. 7,5,3
    #[arg(long, value_delimiter = ',')]
    pub ranks: Option<Vec<usize>>,
    /// Child rank for top-down splits when --ranks is not given
    #[arg(long)]
    pub branching: Option<usize>,
    /// Keywords shown per topic
    #[arg(long)]
    pub top_k: Option<usize>,
    /// Minimum document-frequency fraction for vocabulary terms
    #[arg(long)]
    pub min_df: Option<f64>,
    /// Maximum document-frequency fraction for vocabulary terms
    #[arg(long)]
    pub max_df: Option<f64>,
    /// Keep only this many highest-frequency terms
    #[arg(long)]
    pub max_features: Option<usize>,
    /// Stopword file (one word per line) replacing the bundled list
    #[arg(long)]
    pub stopwords: Option<PathBuf>,
    /// Extra stopword file applied on top of the active list
    #[arg(long)]
    pub extra_stopwords: Option<PathBuf>,
    /// Keyword file (comma- or newline-separated phrases) to highlight
    #[arg(long)]
    pub keywords: Option<PathBuf>,
    /// Row multiplier for highlighted keywords
    #[arg(long)]
    pub highlight_factor: Option<f64>,
    /// Co-occurrence window (tokens on each side)
    #[arg(long)]
    pub window: Option<usize>,
    /// SPPMI shift constant N
    #[arg(long)]
    pub shift: Option<f64>,
    /// Weight of the label-reconstruction term
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Train fraction of the train/test split
    #[arg(long)]
    pub split: Option<f64>,
    /// Number of seeded trials for supervised runs
    #[arg(long)]
    pub trials: Option<usize>,
    /// Master RNG seed (falls back to NMF_FORGE_SEED, then 0)
    #[arg(long)]
    pub seed: Option<u64>,
    /// Parameter preset: letters or aob
    #[arg(long, value_enum)]
    pub preset: Option<Preset>,
    /// Output directory for report.json and report.txt
    #[arg(long)]
    pub out: Option<PathBuf>,
}

impl RunOverrides {
    /// Flag values win over file values.
    fn merged_over(self, file: RunOverrides) -> RunOverrides {
        RunOverrides {
            corpus: self.corpus.or(file.corpus),
            labels: self.labels.or(file.labels),
            rank: self.rank.or(file.rank),
            ranks: self.ranks.or(file.ranks),
            branching: self.branching.or(file.branching),
            top_k: self.top_k.or(file.top_k),
            min_df: self.min_df.or(file.min_df),
            max_df: self.max_df.or(file.max_df),
            max_features: self.max_features.or(file.max_features),
            stopwords: self.stopwords.or(file.stopwords),
            extra_stopwords: self.extra_stopwords.or(file.extra_stopwords),
            keywords: self.keywords.or(file.keywords),
            highlight_factor: self.highlight_factor.or(file.highlight_factor),
            window: self.window.or(file.window),
            shift: self.shift.or(file.shift),
            lambda: self.lambda.or(file.lambda),
            split: self.split.or(file.split),
            trials: self.trials.or(file.trials),
            seed: self.seed.or(file.seed),
            preset: self.preset.or(file.preset),
            out: self.out.or(file.out),
        }
    }
}

/// Fully resolved run configuration. Echoed verbatim into every report;
/// re-running with the same values and seed reproduces reports byte for
/// byte.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct RunConfig {
    pub command: CommandKind,
    pub corpus: PathBuf,
    pub labels: Option<PathBuf>,
    pub preset: Option<Preset>,
    pub min_df: f64,
    pub max_df: f64,
    pub max_features: Option<usize>,
    pub stopwords: Option<PathBuf>,
    pub extra_stopwords: Option<PathBuf>,
    pub keywords: Option<PathBuf>,
    pub highlight_factor: f64,
    pub window: usize,
    pub shift: f64,
    pub rank: usize,
    pub ranks: Option<Vec<usize>>,
    pub branching: usize,
    pub top_k: usize,
    pub lambda: f64,
    pub split: f64,
    pub trials: usize,
    pub seed: u64,
    pub out: PathBuf,
}

impl RunConfig {
    /// Merges flags over an optional config file and the environment seed,
    /// then fills preset and global defaults.
    pub fn resolve(
        command: CommandKind,
        flags: RunOverrides,
        config_path: Option<&PathBuf>,
        env_seed: Option<u64>,
    ) -> anyhow::Result<RunConfig> {
        let merged = match config_path {
            Some(path) => {
                let body = std::fs::read_to_string(path)
                    .with_context(|| format!("reading config file {}", path.display()))?;
                let file: RunOverrides = serde_json::from_str(&body)
                    .with_context(|| format!("parsing config file {}", path.display()))?;
                flags.merged_over(file)
            }
            None => flags,
        };
        let preset = merged.preset;
        let corpus = match merged.corpus {
            Some(c) => c,
            None => bail!("--corpus is required (or `corpus` in the config file)"),
        };
        let labels = merged.labels;
        if command.needs_labels() && labels.is_none() {
            bail!("--labels is required for {}", command.as_str());
        }
        let rank = merged.rank.or(preset.map(Preset::rank)).unwrap_or(7);
        let branching = merged.branching.unwrap_or(3);
        let ranks = match command {
            CommandKind::HnmfTopdown => Some(
                merged
                    .ranks
                    .unwrap_or_else(|| vec![rank, branching]),
            ),
            CommandKind::HnmfBottomup => Some(match merged.ranks {
                Some(r) => r,
                None => match preset {
                    Some(p) => p.hierarchy_ranks(),
                    None => bail!("--ranks is required for hnmf-bottomup without a preset"),
                },
            }),
            _ => merged.ranks,
        };
        let max_features = merged.max_features.or(match (command, preset) {
            (CommandKind::Semantic, Some(_)) => Some(700),
            _ => None,
        });
        Ok(RunConfig {
            command,
            corpus,
            labels,
            preset,
            min_df: merged.min_df.or(preset.map(Preset::min_df)).unwrap_or(0.0),
            max_df: merged.max_df.unwrap_or(if preset.is_some() { 0.8 } else { 1.0 }),
            max_features,
            stopwords: merged.stopwords,
            extra_stopwords: merged.extra_stopwords,
            keywords: merged.keywords,
            highlight_factor: merged.highlight_factor.unwrap_or(1.5),
            window: merged.window.unwrap_or(5),
            shift: merged.shift.unwrap_or(5.0),
            rank,
            ranks,
            branching,
            top_k: merged.top_k.unwrap_or(10),
            lambda: merged.lambda.unwrap_or(1.0),
            split: merged.split.unwrap_or(0.75),
            trials: merged.trials.unwrap_or(10),
            seed: merged.seed.or(env_seed).unwrap_or(0),
            out: merged.out.unwrap_or_else(|| PathBuf::from("out")),
        })
    }
}
