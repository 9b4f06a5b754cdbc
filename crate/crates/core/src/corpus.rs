//! Corpus and label ingestion.
//!
//! A corpus is a directory of UTF-8 `.txt` files, one document per file;
//! the filename without extension is the document id. Labels come from a
//! CSV with header `doc_id,labels` where the labels cell holds
//! `;`-separated class names.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::{Path, PathBuf};

use crate::{Error, Result};

/// An ordered, immutable collection of plain-text documents.
///
/// Documents are sorted lexicographically by id so matrix column order is
/// independent of filesystem enumeration order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Corpus {
    documents: Vec<(String, String)>,
    source_path: PathBuf,
}

impl Corpus {
    /// Builds a corpus from `(doc_id, text)` pairs, sorting by id.
    pub fn from_documents(
        mut documents: Vec<(String, String)>,
        source_path: impl Into<PathBuf>,
    ) -> Result<Self> {
        documents.sort_by(|a, b| a.0.cmp(&b.0));
        for pair in documents.windows(2) {
            if pair[0].0 == pair[1].0 {
                return Err(Error::DuplicateDocId(pair[0].0.clone()));
            }
        }
        if documents.iter().any(|(id, _)| id.is_empty()) {
            return Err(Error::InvalidParameter("empty doc_id".into()));
        }
        Ok(Self {
            documents,
            source_path: source_path.into(),
        })
    }

    pub fn len(&self) -> usize {
        self.documents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.documents.is_empty()
    }

    pub fn doc_ids(&self) -> Vec<String> {
        self.documents.iter().map(|(id, _)| id.clone()).collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &str)> {
        self.documents
            .iter()
            .map(|(id, text)| (id.as_str(), text.as_str()))
    }

    pub fn texts(&self) -> impl Iterator<Item = &str> {
        self.documents.iter().map(|(_, text)| text.as_str())
    }

    pub fn contains(&self, doc_id: &str) -> bool {
        self.documents
            .binary_search_by(|(id, _)| id.as_str().cmp(doc_id))
            .is_ok()
    }

    pub fn source_path(&self) -> &Path {
        &self.source_path
    }
}

/// Class labels for a corpus: an ordered class list plus per-document
/// sets of class indices. A document may carry zero, one, or several
/// labels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelSet {
    classes: Vec<String>,
    assignments: BTreeMap<String, BTreeSet<usize>>,
}

impl LabelSet {
    /// Builds a label set from per-document class-name lists. Classes are
    /// the sorted union of all names; every corpus document gets an entry
    /// (empty when it has no labels).
    pub fn from_names(
        named: &BTreeMap<String, Vec<String>>,
        corpus: &Corpus,
    ) -> Result<Self> {
        for doc_id in named.keys() {
            if !corpus.contains(doc_id) {
                return Err(Error::UnknownDocId(doc_id.clone()));
            }
        }
        let classes: Vec<String> = named
            .values()
            .flatten()
            .cloned()
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        let index: BTreeMap<&str, usize> = classes
            .iter()
            .enumerate()
            .map(|(i, c)| (c.as_str(), i))
            .collect();
        let mut assignments = BTreeMap::new();
        for (doc_id, _) in corpus.iter() {
            let set = named
                .get(doc_id)
                .map(|names| names.iter().map(|n| index[n.as_str()]).collect())
                .unwrap_or_default();
            assignments.insert(doc_id.to_string(), set);
        }
        Ok(Self {
            classes,
            assignments,
        })
    }

    pub fn classes(&self) -> &[String] {
        &self.classes
    }

    pub fn num_classes(&self) -> usize {
        self.classes.len()
    }

    /// Class indices assigned to a document; empty when unlabeled or unknown.
    pub fn labels_of(&self, doc_id: &str) -> BTreeSet<usize> {
        self.assignments.get(doc_id).cloned().unwrap_or_default()
    }

    pub fn assignments(&self) -> &BTreeMap<String, BTreeSet<usize>> {
        &self.assignments
    }
}

/// Loads every `.txt` file under `path` as one document.
///
/// Document ids are filenames without the extension; non-`.txt` entries
/// are ignored; documents are sorted by id.
pub fn load_corpus(path: &Path) -> Result<Corpus> {
    if !path.is_dir() {
        return Err(Error::MissingDirectory(path.to_path_buf()));
    }
    let mut documents = Vec::new();
    for entry in fs::read_dir(path)? {
        let entry = entry?;
        let file_path = entry.path();
        if !file_path.is_file() || file_path.extension().map(|e| e != "txt").unwrap_or(true) {
            continue;
        }
        let doc_id = file_path
            .file_stem()
            .and_then(|s| s.to_str())
            .ok_or_else(|| Error::NotUtf8(file_path.clone()))?
            .to_string();
        let bytes = fs::read(&file_path)?;
        let text =
            String::from_utf8(bytes).map_err(|_| Error::NotUtf8(file_path.clone()))?;
        documents.push((doc_id, text));
    }
    if documents.is_empty() {
        return Err(Error::NoDocuments(path.to_path_buf()));
    }
    Corpus::from_documents(documents, path)
}

/// Loads labels from a CSV file with header `doc_id,labels`.
///
/// The labels cell is `;`-separated (empty cell = no labels). Every
/// doc_id in the file must exist in the corpus; duplicate rows are fatal.
pub fn load_labels(path: &Path, corpus: &Corpus) -> Result<LabelSet> {
    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_path(path)?;
    {
        let headers = reader.headers()?;
        if headers.len() < 2 || &headers[0] != "doc_id" || &headers[1] != "labels" {
            return Err(Error::LabelFormat(format!(
                "expected header `doc_id,labels`, got {:?}",
                headers.iter().collect::<Vec<_>>().join(",")
            )));
        }
    }
    let mut named: BTreeMap<String, Vec<String>> = BTreeMap::new();
    for record in reader.records() {
        let record = record?;
        let doc_id = record
            .get(0)
            .ok_or_else(|| Error::LabelFormat("missing doc_id field".into()))?
            .to_string();
        if named.contains_key(&doc_id) {
            return Err(Error::DuplicateDocId(doc_id));
        }
        let cell = record.get(1).unwrap_or("");
        let names: Vec<String> = cell
            .split(';')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(str::to_string)
            .collect();
        named.insert(doc_id, names);
    }
    LabelSet::from_names(&named, corpus)
}

/// Writes a corpus as a directory of `.txt` files (inverse of
/// [`load_corpus`]).
pub fn write_corpus_dir(corpus: &Corpus, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir)?;
    for (doc_id, text) in corpus.iter() {
        fs::write(dir.join(format!("{doc_id}.txt")), text)?;
    }
    Ok(())
}

/// Writes a label set as a `doc_id,labels` CSV (inverse of
/// [`load_labels`]). Rows follow corpus order; only labeled documents are
/// written.
pub fn write_labels_csv(labels: &LabelSet, corpus: &Corpus, path: &Path) -> Result<()> {
    let mut writer = csv::Writer::from_path(path)?;
    writer.write_record(["doc_id", "labels"])?;
    for (doc_id, _) in corpus.iter() {
        let indices = labels.labels_of(doc_id);
        if indices.is_empty() {
            continue;
        }
        let cell = indices
            .iter()
            .map(|&i| labels.classes()[i].as_str())
            .collect::<Vec<_>>()
            .join(";");
        writer.write_record([doc_id, cell.as_str()])?;
    }
    writer.flush()?;
    Ok(())
}
