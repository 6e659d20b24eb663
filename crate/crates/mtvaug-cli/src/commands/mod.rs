pub mod augment;
pub mod gen_synthetic;
pub mod report;
pub mod sweep;
pub mod train;

use std::path::{Path, PathBuf};

use mtvaug::augment::Operator;
use mtvaug::text::{load_lexicon, load_stopwords, SynonymLexicon};

use crate::{usage, CliResult};

/// Loads a lexicon, enforcing that synonym-driven operators actually get
/// one, and applies the optional stopword filter.
pub fn lexicon_for(
    operator: Option<Operator>,
    lexicon_path: Option<&PathBuf>,
    stopwords_path: Option<&PathBuf>,
) -> CliResult<SynonymLexicon> {
    let lexicon = match lexicon_path {
        Some(path) => load_lexicon(path)?,
        None => {
            if let Some(op) = operator {
                if op.needs_lexicon() {
                    return Err(usage(format!(
                        "missing lexicon: operator {op} requires --lexicon"
                    )));
                }
            }
            SynonymLexicon::empty()
        }
    };
    match stopwords_path {
        Some(path) => {
            let stop = load_stopwords(path)?;
            Ok(lexicon.without_headwords(&stop))
        }
        None => Ok(lexicon),
    }
}

pub fn parse_operator(name: &str) -> CliResult<Operator> {
    name.parse::<Operator>()
        .map_err(|e| usage(e.to_string()))
}

pub fn validate_unit_interval(value: f64, name: &str) -> CliResult<f64> {
    if !(0.0..=1.0).contains(&value) || value.is_nan() {
        return Err(usage(format!("{name} must be in [0, 1], got {value}")));
    }
    Ok(value)
}

pub fn write_text(path: &Path, content: &str) -> CliResult<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)?;
        }
    }
    std::fs::write(path, content)?;
    Ok(())
}
