//! Token-level augmentation operators driven by a strength parameter.
//!
//! Each operator perturbs a sequence `n` times, where `n` is derived from the
//! strength `alpha` and the sequence length via [`perturbation_count`]. All
//! randomness comes from an explicit [`RandomStream`], so outputs are
//! bit-reproducible for a given seed.

use std::str::FromStr;

use thiserror::Error;

use crate::rng::RandomStream;
use crate::text::{SynonymLexicon, TokenSequence};

#[derive(Debug, Error)]
pub enum AugmentError {
    #[error("alpha must be in [0, 1], got {0}")]
    InvalidAlpha(f64),
    #[error("unknown operator {0:?}")]
    UnknownOperator(String),
}

/// The four augmentation operators.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Operator {
    Substitution,
    Dropout,
    Injection,
    Shuffling,
}

impl Operator {
    pub const ALL: [Operator; 4] = [
        Operator::Substitution,
        Operator::Dropout,
        Operator::Injection,
        Operator::Shuffling,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Operator::Substitution => "substitution",
            Operator::Dropout => "dropout",
            Operator::Injection => "injection",
            Operator::Shuffling => "shuffling",
        }
    }

    /// Whether the operator looks up synonyms and therefore needs a lexicon.
    pub fn needs_lexicon(&self) -> bool {
        matches!(self, Operator::Substitution | Operator::Injection)
    }

    /// Stable numeric id used in seed derivation. 0 is reserved for
    /// "no operator" (baseline runs).
    pub(crate) fn id(&self) -> u64 {
        match self {
            Operator::Substitution => 1,
            Operator::Dropout => 2,
            Operator::Injection => 3,
            Operator::Shuffling => 4,
        }
    }
}

impl FromStr for Operator {
    type Err = AugmentError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "substitution" => Ok(Operator::Substitution),
            "dropout" => Ok(Operator::Dropout),
            "injection" => Ok(Operator::Injection),
            "shuffling" => Ok(Operator::Shuffling),
            other => Err(AugmentError::UnknownOperator(other.to_string())),
        }
    }
}

impl std::fmt::Display for Operator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// An operator paired with a strength in `[0, 1]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AugmentationConfig {
    operator: Operator,
    alpha: f64,
}

impl AugmentationConfig {
    pub fn new(operator: Operator, alpha: f64) -> Result<Self, AugmentError> {
        if !(0.0..=1.0).contains(&alpha) || alpha.is_nan() {
            return Err(AugmentError::InvalidAlpha(alpha));
        }
        Ok(Self { operator, alpha })
    }

    pub fn operator(&self) -> Operator {
        self.operator
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }
}

/// Number of perturbations for strength `alpha` on a length-`len` sequence.
///
/// Zero strength is the identity. Otherwise `alpha * len` is rounded half-up
/// with a floor of one so that small strengths still perturb short sequences.
/// The result never exceeds `len`.
pub fn perturbation_count(alpha: f64, len: usize) -> usize {
    debug_assert!(len >= 1);
    debug_assert!((0.0..=1.0).contains(&alpha));
    if alpha == 0.0 {
        return 0;
    }
    let rounded = (alpha * len as f64 + 0.5).floor() as usize;
    rounded.max(1).min(len)
}

/// Replaces up to `n` tokens with synonyms from the lexicon.
///
/// Positions whose token has at least one synonym are eligible; exactly
/// `min(n, eligible)` distinct positions are drawn uniformly without
/// replacement and each is replaced by a synonym drawn uniformly from its
/// token's list. Length is preserved.
pub fn token_substitution(
    seq: &TokenSequence,
    lexicon: &SynonymLexicon,
    n: usize,
    rng: &mut RandomStream,
) -> TokenSequence {
    let eligible: Vec<usize> = seq
        .tokens()
        .iter()
        .enumerate()
        .filter(|(_, t)| lexicon.has_synonyms(t))
        .map(|(i, _)| i)
        .collect();
    let k = n.min(eligible.len());
    if k == 0 {
        return seq.clone();
    }
    let mut pool = eligible;
    for i in 0..k {
        let j = i + rng.index(pool.len() - i);
        pool.swap(i, j);
    }
    let mut chosen: Vec<usize> = pool[..k].to_vec();
    chosen.sort_unstable();
    let mut tokens = seq.tokens().to_vec();
    for pos in chosen {
        let replacement = rng.choose(lexicon.synonyms(&tokens[pos])).clone();
        tokens[pos] = replacement;
    }
    TokenSequence::from_valid(tokens)
}

/// Removes `min(n, len - 1)` positions drawn uniformly without replacement,
/// preserving the order of survivors. Never empties the sequence.
pub fn pervasive_dropout(seq: &TokenSequence, n: usize, rng: &mut RandomStream) -> TokenSequence {
    let len = seq.len();
    let k = n.min(len - 1);
    if k == 0 {
        return seq.clone();
    }
    let removed = rng.sample_indices(len, k);
    let mut survivors = Vec::with_capacity(len - k);
    let mut next_removed = removed.iter().copied().peekable();
    for (i, tok) in seq.tokens().iter().enumerate() {
        if next_removed.peek() == Some(&i) {
            next_removed.next();
        } else {
            survivors.push(tok.clone());
        }
    }
    TokenSequence::from_valid(survivors)
}

/// Performs `n` insertions. Each iteration picks a token uniformly among
/// those in the current sequence that have synonyms, picks one of its
/// synonyms uniformly, and inserts it at a slot drawn uniformly from the
/// current length + 1 positions. Iterations with no eligible token are
/// no-ops, so the output length lies in `[len, len + n]`.
pub fn token_injection(
    seq: &TokenSequence,
    lexicon: &SynonymLexicon,
    n: usize,
    rng: &mut RandomStream,
) -> TokenSequence {
    let mut tokens = seq.tokens().to_vec();
    for _ in 0..n {
        let eligible: Vec<usize> = tokens
            .iter()
            .enumerate()
            .filter(|(_, t)| lexicon.has_synonyms(t))
            .map(|(i, _)| i)
            .collect();
        if eligible.is_empty() {
            continue;
        }
        let source = eligible[rng.index(eligible.len())];
        let synonym = rng.choose(lexicon.synonyms(&tokens[source])).clone();
        let slot = rng.index(tokens.len() + 1);
        tokens.insert(slot, synonym);
    }
    TokenSequence::from_valid(tokens)
}

/// Applies `n` uniform random transpositions. Each iteration draws an
/// unordered pair of distinct positions and swaps them. Singleton sequences
/// are returned unchanged.
pub fn positional_shuffling(seq: &TokenSequence, n: usize, rng: &mut RandomStream) -> TokenSequence {
    let len = seq.len();
    if len < 2 || n == 0 {
        return seq.clone();
    }
    let mut tokens = seq.tokens().to_vec();
    for _ in 0..n {
        let i = rng.index(len);
        let j = rng.index(len - 1);
        let j = if j >= i { j + 1 } else { j };
        tokens.swap(i, j);
    }
    TokenSequence::from_valid(tokens)
}

/// Computes the perturbation count from the config and dispatches to the
/// matching operator. Labels of owning examples are untouched by design:
/// every operator is label-preserving.
pub fn augment(
    seq: &TokenSequence,
    cfg: &AugmentationConfig,
    lexicon: &SynonymLexicon,
    rng: &mut RandomStream,
) -> TokenSequence {
    let n = perturbation_count(cfg.alpha, seq.len());
    match cfg.operator {
        Operator::Substitution => token_substitution(seq, lexicon, n, rng),
        Operator::Dropout => pervasive_dropout(seq, n, rng),
        Operator::Injection => token_injection(seq, lexicon, n, rng),
        Operator::Shuffling => positional_shuffling(seq, n, rng),
    }
}
