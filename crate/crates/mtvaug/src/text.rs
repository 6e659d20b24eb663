//! Tokenization, token sequences, labeled datasets, and synonym lexicons.
//!
//! The tokenizer lowercases, splits on whitespace, and isolates a fixed set of
//! punctuation characters into their own tokens. Synonym lexicons are loaded
//! from a simple TSV format (`headword<TAB>syn1,syn2,...`); an optional
//! stopword list can be used to drop headwords from a lexicon so that
//! substitution and injection leave those words alone.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::Path;

use thiserror::Error;

/// Punctuation characters that the tokenizer splits into standalone tokens.
pub const PUNCTUATION: [char; 10] = ['.', ',', '!', '?', ';', ':', '\'', '"', '(', ')'];

fn is_punctuation(c: char) -> bool {
    PUNCTUATION.contains(&c)
}

#[derive(Debug, Error)]
pub enum TextError {
    #[error("input contains no tokens")]
    EmptyInput,
    #[error("token must be non-empty")]
    EmptyToken,
    #[error("token contains whitespace: {0:?}")]
    WhitespaceInToken(String),
}

#[derive(Debug, Error)]
pub enum LexiconError {
    #[error("line {line}: {reason}")]
    MalformedLine { line: usize, reason: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// A single lowercase token with no interior whitespace.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Token(String);

impl Token {
    pub fn new(surface: impl Into<String>) -> Result<Self, TextError> {
        let surface = surface.into();
        if surface.is_empty() {
            return Err(TextError::EmptyToken);
        }
        if surface.chars().any(char::is_whitespace) {
            return Err(TextError::WhitespaceInToken(surface));
        }
        Ok(Token(surface.to_lowercase()))
    }

    /// Wraps a string already known to satisfy the token invariants.
    pub(crate) fn from_valid(surface: String) -> Self {
        debug_assert!(!surface.is_empty());
        debug_assert!(!surface.chars().any(char::is_whitespace));
        Token(surface)
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl PartialEq<&str> for Token {
    fn eq(&self, other: &&str) -> bool {
        self.0 == *other
    }
}

/// A non-empty ordered sequence of tokens.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TokenSequence(Vec<Token>);

impl TokenSequence {
    pub fn new(tokens: Vec<Token>) -> Result<Self, TextError> {
        if tokens.is_empty() {
            return Err(TextError::EmptyInput);
        }
        Ok(TokenSequence(tokens))
    }

    pub(crate) fn from_valid(tokens: Vec<Token>) -> Self {
        debug_assert!(!tokens.is_empty());
        TokenSequence(tokens)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn tokens(&self) -> &[Token] {
        &self.0
    }

    pub fn into_tokens(self) -> Vec<Token> {
        self.0
    }
}

/// Lowercases, splits on whitespace, and isolates punctuation into
/// standalone tokens. Errors if the input contains no tokens at all.
pub fn tokenize(text: &str) -> Result<TokenSequence, TextError> {
    let lowered = text.to_lowercase();
    let mut tokens = Vec::new();
    let mut current = String::new();
    let flush = |current: &mut String, tokens: &mut Vec<Token>| {
        if !current.is_empty() {
            tokens.push(Token::from_valid(std::mem::take(current)));
        }
    };
    for c in lowered.chars() {
        if c.is_whitespace() {
            flush(&mut current, &mut tokens);
        } else if is_punctuation(c) {
            flush(&mut current, &mut tokens);
            tokens.push(Token::from_valid(c.to_string()));
        } else {
            current.push(c);
        }
    }
    flush(&mut current, &mut tokens);
    if tokens.is_empty() {
        return Err(TextError::EmptyInput);
    }
    Ok(TokenSequence(tokens))
}

/// Joins tokens with single spaces.
pub fn detokenize(seq: &TokenSequence) -> String {
    let parts: Vec<&str> = seq.tokens().iter().map(Token::as_str).collect();
    parts.join(" ")
}

/// A labeled training or test example.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabeledExample {
    sequence: TokenSequence,
    label: usize,
}

impl LabeledExample {
    pub fn new(sequence: TokenSequence, label: usize) -> Self {
        Self { sequence, label }
    }

    pub fn sequence(&self) -> &TokenSequence {
        &self.sequence
    }

    pub fn label(&self) -> usize {
        self.label
    }
}

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("dataset has no examples")]
    Empty,
    #[error("dataset must contain at least 2 distinct labels")]
    SingleClass,
    #[error("duplicate label name {0:?}")]
    DuplicateLabel(String),
    #[error("example label {label} out of range for {classes} classes")]
    LabelOutOfRange { label: usize, classes: usize },
}

/// A set of labeled examples with class ids indexing into `label_names`.
#[derive(Clone, Debug)]
pub struct Dataset {
    examples: Vec<LabeledExample>,
    label_names: Vec<String>,
}

impl Dataset {
    pub fn new(examples: Vec<LabeledExample>, label_names: Vec<String>) -> Result<Self, DatasetError> {
        if examples.is_empty() {
            return Err(DatasetError::Empty);
        }
        let mut seen = BTreeSet::new();
        for name in &label_names {
            if !seen.insert(name) {
                return Err(DatasetError::DuplicateLabel(name.clone()));
            }
        }
        let mut present = BTreeSet::new();
        for ex in &examples {
            if ex.label >= label_names.len() {
                return Err(DatasetError::LabelOutOfRange {
                    label: ex.label,
                    classes: label_names.len(),
                });
            }
            present.insert(ex.label);
        }
        if present.len() < 2 {
            return Err(DatasetError::SingleClass);
        }
        Ok(Self { examples, label_names })
    }

    pub fn examples(&self) -> &[LabeledExample] {
        &self.examples
    }

    pub fn len(&self) -> usize {
        self.examples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.examples.is_empty()
    }

    pub fn label_names(&self) -> &[String] {
        &self.label_names
    }

    pub fn class_count(&self) -> usize {
        self.label_names.len()
    }
}

/// Lowercase stopwords used to exclude headwords from a lexicon.
#[derive(Clone, Debug, Default)]
pub struct StopwordSet {
    words: BTreeSet<String>,
}

impl StopwordSet {
    pub fn from_words<I: IntoIterator<Item = String>>(words: I) -> Self {
        Self {
            words: words.into_iter().map(|w| w.to_lowercase()).collect(),
        }
    }

    pub fn contains(&self, word: &str) -> bool {
        self.words.contains(word)
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }
}

/// Loads a stopword file: one lowercase word per line, blank lines skipped.
pub fn load_stopwords(path: impl AsRef<Path>) -> Result<StopwordSet, LexiconError> {
    let content = std::fs::read_to_string(path)?;
    Ok(StopwordSet::from_words(
        content
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty())
            .map(|l| l.to_string()),
    ))
}

/// Headword-to-synonyms map backing substitution and injection.
///
/// Invariants: headwords and synonyms are lowercase and whitespace-free,
/// synonym lists are deduplicated, never contain their own headword, and are
/// never empty (entries that would become empty are dropped).
#[derive(Clone, Debug, Default)]
pub struct SynonymLexicon {
    entries: BTreeMap<String, Vec<Token>>,
}

impl SynonymLexicon {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Builds a lexicon from (headword, synonyms) pairs, applying the same
    /// normalization as the TSV loader: lowercasing, per-entry deduplication,
    /// self-synonym removal, and merging of repeated headwords.
    pub fn from_entries<I, S>(pairs: I) -> Result<Self, TextError>
    where
        I: IntoIterator<Item = (S, Vec<S>)>,
        S: Into<String>,
    {
        let mut lexicon = Self::empty();
        for (head, syns) in pairs {
            let head = Token::new(head)?;
            let syns = syns
                .into_iter()
                .map(Token::new)
                .collect::<Result<Vec<_>, _>>()?;
            lexicon.merge_entry(head, syns);
        }
        Ok(lexicon)
    }

    fn merge_entry(&mut self, head: Token, synonyms: Vec<Token>) {
        let list = self.entries.entry(head.as_str().to_string()).or_default();
        for syn in synonyms {
            if syn == head || list.contains(&syn) {
                continue;
            }
            list.push(syn);
        }
        if self.entries.get(head.as_str()).is_some_and(Vec::is_empty) {
            self.entries.remove(head.as_str());
        }
    }

    /// The stored synonym list for a token, or empty if absent.
    pub fn synonyms(&self, token: &Token) -> &[Token] {
        self.entries
            .get(token.as_str())
            .map(Vec::as_slice)
            .unwrap_or(&[])
    }

    pub fn has_synonyms(&self, token: &Token) -> bool {
        self.entries.contains_key(token.as_str())
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn headwords(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    /// Returns a copy with every stopword headword removed.
    pub fn without_headwords(&self, stopwords: &StopwordSet) -> SynonymLexicon {
        SynonymLexicon {
            entries: self
                .entries
                .iter()
                .filter(|(head, _)| !stopwords.contains(head))
                .map(|(head, syns)| (head.clone(), syns.clone()))
                .collect(),
        }
    }

    /// Serializes to the lexicon TSV format, one `headword<TAB>syn,...` line
    /// per entry in headword order.
    pub fn to_tsv_string(&self) -> String {
        let mut out = String::new();
        for (head, syns) in &self.entries {
            let list: Vec<&str> = syns.iter().map(Token::as_str).collect();
            out.push_str(head);
            out.push('\t');
            out.push_str(&list.join(","));
            out.push('\n');
        }
        out
    }
}

/// Parses lexicon TSV content. Lines starting with `#` and blank lines are
/// ignored; every other line must be `headword<TAB>syn1,syn2,...` with
/// whitespace-free fields.
pub fn parse_lexicon(content: &str) -> Result<SynonymLexicon, LexiconError> {
    let mut lexicon = SynonymLexicon::empty();
    for (i, raw) in content.lines().enumerate() {
        let line_no = i + 1;
        if raw.is_empty() || raw.starts_with('#') {
            continue;
        }
        let malformed = |reason: &str| LexiconError::MalformedLine {
            line: line_no,
            reason: reason.to_string(),
        };
        let (head, rest) = raw
            .split_once('\t')
            .ok_or_else(|| malformed("expected exactly one tab"))?;
        if rest.contains('\t') {
            return Err(malformed("expected exactly one tab"));
        }
        let head = Token::new(head).map_err(|_| malformed("invalid headword"))?;
        let mut synonyms = Vec::new();
        for field in rest.split(',') {
            let syn = Token::new(field).map_err(|_| malformed("invalid synonym"))?;
            synonyms.push(syn);
        }
        lexicon.merge_entry(head, synonyms);
    }
    Ok(lexicon)
}

/// Loads a lexicon TSV file. See [`parse_lexicon`] for the format.
pub fn load_lexicon(path: impl AsRef<Path>) -> Result<SynonymLexicon, LexiconError> {
    let content = std::fs::read_to_string(path)?;
    parse_lexicon(&content)
}
