//! Hashed unigram + bigram features with L2 normalization.

use std::collections::BTreeMap;

use crate::text::TokenSequence;

const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x0000_0100_0000_01B3;

/// Hash seed used by the featurizer. Fixed so that feature indices are stable
/// across runs and platforms.
pub const FEATURE_HASH_SEED: u64 = 0;

/// 64-bit FNV-1a with the seed XORed into the offset basis. With seed 0 this
/// is standard FNV-1a.
pub fn hash64(bytes: &[u8], seed: u64) -> u64 {
    let mut h = FNV_OFFSET ^ seed;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(FNV_PRIME);
    }
    h
}

/// Hashes the byte string `a ++ " " ++ b` without materializing it.
fn hash64_pair(a: &[u8], b: &[u8], seed: u64) -> u64 {
    let mut h = FNV_OFFSET ^ seed;
    for &byte in a.iter().chain(std::iter::once(&b' ')).chain(b.iter()) {
        h ^= byte as u64;
        h = h.wrapping_mul(FNV_PRIME);
    }
    h
}

/// A sparse unit-norm feature vector with strictly increasing indices.
#[derive(Clone, Debug, PartialEq)]
pub struct FeatureVector {
    dim: usize,
    entries: Vec<(u32, f64)>,
}

impl FeatureVector {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[(u32, f64)] {
        &self.entries
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn l2_norm(&self) -> f64 {
        self.entries
            .iter()
            .map(|(_, v)| v * v)
            .sum::<f64>()
            .sqrt()
    }
}

/// Counts unigrams and adjacent bigrams, hashes them into `[0, dim)` with
/// [`hash64`] (collisions add), and L2-normalizes the result.
///
/// Bigram keys are the two surfaces joined by a single space.
pub fn featurize(seq: &TokenSequence, dim: usize) -> FeatureVector {
    assert!(dim >= 2, "feature dimension must be at least 2");
    let d = dim as u64;
    let mut counts: BTreeMap<u32, f64> = BTreeMap::new();
    for token in seq.tokens() {
        let idx = (hash64(token.as_str().as_bytes(), FEATURE_HASH_SEED) % d) as u32;
        *counts.entry(idx).or_insert(0.0) += 1.0;
    }
    for pair in seq.tokens().windows(2) {
        let idx = (hash64_pair(
            pair[0].as_str().as_bytes(),
            pair[1].as_str().as_bytes(),
            FEATURE_HASH_SEED,
        ) % d) as u32;
        *counts.entry(idx).or_insert(0.0) += 1.0;
    }
    let norm = counts.values().map(|v| v * v).sum::<f64>().sqrt();
    let entries = counts.into_iter().map(|(i, v)| (i, v / norm)).collect();
    FeatureVector { dim, entries }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::text::tokenize;

    #[test]
    fn hash64_matches_fnv1a_reference() {
        // Known FNV-1a 64 test vector.
        assert_eq!(hash64(b"a", 0), 0xaf63_dc4c_8601_ec8c);
        assert_eq!(hash64(b"", 0), FNV_OFFSET);
    }

    #[test]
    fn hash64_pair_equals_joined_string() {
        assert_eq!(hash64_pair(b"a", b"b", 0), hash64(b"a b", 0));
        assert_eq!(hash64_pair(b"good", b"movie", 7), hash64(b"good movie", 7));
    }

    #[test]
    fn single_token_gets_unit_entry() {
        let fv = featurize(&tokenize("a").unwrap(), 16);
        let expected_idx = (hash64(b"a", 0) % 16) as u32;
        assert_eq!(fv.entries(), [(expected_idx, 1.0)]);
    }

    #[test]
    fn repeated_token_counts_unigram_and_bigram() {
        let uni = (hash64(b"a", 0) % 16) as u32;
        let bi = (hash64(b"a a", 0) % 16) as u32;
        assert_ne!(uni, bi, "test assumes no collision at dim 16");
        let fv = featurize(&tokenize("a a").unwrap(), 16);
        let norm = (5.0f64).sqrt();
        let mut expected = vec![(uni, 2.0 / norm), (bi, 1.0 / norm)];
        expected.sort_by_key(|(i, _)| *i);
        assert_eq!(fv.entries(), expected);
    }

    #[test]
    fn output_is_unit_norm() {
        let fv = featurize(&tokenize("the quick brown fox jumps").unwrap(), 64);
        assert!((fv.l2_norm() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn equal_sequences_equal_vectors() {
        let a = featurize(&tokenize("same words here").unwrap(), 128);
        let b = featurize(&tokenize("same words here").unwrap(), 128);
        assert_eq!(a, b);
    }

    #[test]
    fn indices_strictly_increasing_and_bounded() {
        let fv = featurize(&tokenize("one two three four five six").unwrap(), 32);
        assert!(fv.entries().windows(2).all(|w| w[0].0 < w[1].0));
        assert!(fv.entries().iter().all(|(i, _)| (*i as usize) < fv.dim()));
    }
}
