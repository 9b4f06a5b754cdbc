//! Plain-text rendering of reports: aligned topic tables, indented
//! hierarchy outlines, and classification summaries.

use nmf_forge_core::report::{ClassificationReport, LayerChainReport, TopicTreeReport, TreeNodeReport};

use crate::config::RunConfig;

fn header(config: &RunConfig) -> String {
    format!(
        "command: {}\ncorpus: {}\nseed: {}\n",
        config.command.as_str(),
        config.corpus.display(),
        config.seed
    )
}

/// Topics as aligned columns, one keyword per row (paper-table layout).
pub fn topic_columns(topics: &[Vec<String>]) -> String {
    if topics.is_empty() {
        return String::new();
    }
    let depth = topics.iter().map(Vec::len).max().unwrap_or(0);
    let mut widths = Vec::with_capacity(topics.len());
    let labels: Vec<String> = (1..=topics.len()).map(|i| format!("topic_{i}")).collect();
    for (t, label) in topics.iter().zip(&labels) {
        let w = t.iter().map(String::len).max().unwrap_or(0).max(label.len());
        widths.push(w);
    }
    let mut lines = Vec::with_capacity(depth + 2);
    let head: Vec<String> = labels
        .iter()
        .zip(&widths)
        .map(|(l, &w)| format!("{l:<w$}"))
        .collect();
    lines.push(head.join("  "));
    let rule: Vec<String> = widths.iter().map(|&w| "-".repeat(w)).collect();
    lines.push(rule.join("  "));
    for row in 0..depth {
        let cells: Vec<String> = topics
            .iter()
            .zip(&widths)
            .map(|(t, &w)| {
                let cell = t.get(row).map(String::as_str).unwrap_or("");
                format!("{cell:<w$}")
            })
            .collect();
        lines.push(cells.join("  ").trim_end().to_string());
    }
    lines.join("\n")
}

pub fn topic_table(topics: &[Vec<String>], residual: f64, config: &RunConfig) -> String {
    format!(
        "{}residual: {residual:.6}\n\n{}\n",
        header(config),
        topic_columns(topics)
    )
}

/// Indented outline of a top-down tree: one line per topic, children
/// nested beneath.
pub fn tree_outline(tree: &TopicTreeReport, config: &RunConfig) -> String {
    let mut out = header(config);
    out.push('\n');
    render_node(&tree.root, "", &mut out);
    out
}

fn render_node(node: &TreeNodeReport, path: &str, out: &mut String) {
    let Some(keywords) = &node.keywords else {
        return;
    };
    for (t, kws) in keywords.iter().enumerate() {
        let label = if path.is_empty() {
            format!("{}", t + 1)
        } else {
            format!("{path}.{}", t + 1)
        };
        let child = node.children.get(t);
        let docs = child.map(|c| c.doc_ids.len()).unwrap_or(0);
        let indent = "  ".repeat(label.matches('.').count());
        out.push_str(&format!(
            "{indent}topic {label} [{docs} docs]: {}\n",
            kws.join(" ")
        ));
        if let Some(child) = child {
            render_node(child, &label, out);
        }
    }
}

/// One aligned topic table per layer of a bottom-up chain.
pub fn chain_tables(chain: &LayerChainReport, config: &RunConfig) -> String {
    let mut out = header(config);
    for (i, layer) in chain.layers.iter().enumerate() {
        out.push_str(&format!(
            "\nlayer {i} (rank {}, residual {:.6})\n{}\n",
            layer.rank,
            layer.residual,
            topic_columns(&layer.keywords)
        ));
    }
    out
}

/// Per-trial scores, the mean +/- population standard deviation, and the
/// summed confusion matrix.
pub fn classification_table(report: &ClassificationReport, config: &RunConfig) -> String {
    let mut out = header(config);
    out.push('\n');
    for trial in &report.trials {
        out.push_str(&format!("trial seed={} LAS={:.4}\n", trial.seed, trial.las));
    }
    out.push_str(&format!(
        "\nmean LAS {:.4} +/- {:.4} over {} trials\n",
        report.mean_las,
        report.std_las,
        report.trials.len()
    ));
    let p = report.classes.len();
    let mut total = vec![vec![0u64; p]; p];
    for trial in &report.trials {
        for (i, row) in trial.confusion.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                total[i][j] += v;
            }
        }
    }
    let name_w = report
        .classes
        .iter()
        .map(String::len)
        .max()
        .unwrap_or(4)
        .max(4);
    let cell_w = total
        .iter()
        .flatten()
        .map(|v| v.to_string().len())
        .max()
        .unwrap_or(1)
        .max(3);
    out.push_str(&format!(
        "\nconfusion (rows = true class, columns = predicted, summed over trials)\n{:name_w$}  {}\n",
        "",
        report
            .classes
            .iter()
            .map(|c| format!("{c:>cell_w$}"))
            .collect::<Vec<_>>()
            .join(" ")
    ));
    for (i, class) in report.classes.iter().enumerate() {
        out.push_str(&format!(
            "{class:<name_w$}  {}\n",
            total[i]
                .iter()
                .map(|v| format!("{v:>cell_w$}"))
                .collect::<Vec<_>>()
                .join(" ")
        ));
    }
    out
}
