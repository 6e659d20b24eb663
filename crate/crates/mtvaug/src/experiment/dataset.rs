//! Dataset TSV loading: `label<TAB>text` per line.

use std::path::Path;

use thiserror::Error;

use crate::text::{tokenize, Dataset, LabeledExample};

#[derive(Debug, Error)]
pub enum DatasetLoadError {
    #[error("line {line}: {reason}")]
    MalformedLine { line: usize, reason: String },
    #[error("dataset file contains no examples")]
    EmptyDataset,
    #[error("dataset file contains a single label class")]
    SingleClassDataset,
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Parses dataset TSV content. Labels are mapped to class ids in
/// first-appearance order; texts are tokenized. Blank lines are skipped.
pub fn parse_dataset(content: &str) -> Result<Dataset, DatasetLoadError> {
    let mut label_names: Vec<String> = Vec::new();
    let mut examples = Vec::new();
    for (i, raw) in content.lines().enumerate() {
        let line = i + 1;
        if raw.is_empty() {
            continue;
        }
        let (label, text) = raw.split_once('\t').ok_or_else(|| {
            DatasetLoadError::MalformedLine {
                line,
                reason: "expected label<TAB>text".to_string(),
            }
        })?;
        if label.is_empty() {
            return Err(DatasetLoadError::MalformedLine {
                line,
                reason: "empty label".to_string(),
            });
        }
        let seq = tokenize(text).map_err(|_| DatasetLoadError::MalformedLine {
            line,
            reason: "text has no tokens".to_string(),
        })?;
        let id = match label_names.iter().position(|n| n == label) {
            Some(id) => id,
            None => {
                label_names.push(label.to_string());
                label_names.len() - 1
            }
        };
        examples.push(LabeledExample::new(seq, id));
    }
    if examples.is_empty() {
        return Err(DatasetLoadError::EmptyDataset);
    }
    if label_names.len() < 2 {
        return Err(DatasetLoadError::SingleClassDataset);
    }
    Dataset::new(examples, label_names).map_err(|e| DatasetLoadError::MalformedLine {
        line: 0,
        reason: e.to_string(),
    })
}

/// Loads a dataset TSV file. See [`parse_dataset`].
pub fn load_dataset(path: impl AsRef<Path>) -> Result<Dataset, DatasetLoadError> {
    let content = std::fs::read_to_string(path)?;
    parse_dataset(&content)
}

/// Serializes a dataset back to TSV, one `label<TAB>text` line per example.
pub fn dataset_to_tsv(dataset: &Dataset) -> String {
    let mut out = String::new();
    for ex in dataset.examples() {
        out.push_str(&dataset.label_names()[ex.label()]);
        out.push('\t');
        out.push_str(&crate::text::detokenize(ex.sequence()));
        out.push('\n');
    }
    out
}
