//! Synthetic two-class corpus generator with a matching synonym lexicon.
//!
//! Documents mix three kinds of units: filler words carrying no signal,
//! plain class-indicative words, and negated phrases (`not` followed by an
//! indicative word of the opposite class) whose meaning depends on the
//! bigram staying intact. The generated lexicon maps each indicative word to
//! one same-class sibling and one class-ambiguous "blur" word that appears
//! in both classes' synonym lists, so heavy substitution or injection blurs
//! the class signal while light augmentation mostly preserves it. `not` has
//! no lexicon entry.

use crate::rng::{mix64, RandomStream};
use crate::text::{Dataset, LabeledExample, SynonymLexicon, Token, TokenSequence};

const TAG_SYNTH_TRAIN: u64 = 0x53_594E_5452;
const TAG_SYNTH_TEST: u64 = 0x53_594E_5445;

/// Generator parameters. The defaults are the ones used by the bundled
/// acceptance corpus (`gen-synthetic` emits them unchanged).
#[derive(Clone, Copy, Debug)]
pub struct SynthConfig {
    pub train_size: usize,
    pub test_size: usize,
    /// Indicative words per class.
    pub indicative_vocab: usize,
    /// Shared filler vocabulary size.
    pub filler_vocab: usize,
    pub len_min: usize,
    pub len_max: usize,
    /// Plain indicative tokens per document.
    pub plain_per_doc: usize,
    /// Negated opposite-class phrases per document (each occupies 2 tokens).
    pub negated_per_doc: usize,
    /// Probability that a plain indicative token is drawn from the wrong
    /// class.
    pub noise: f64,
    pub seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            train_size: 2000,
            test_size: 1000,
            indicative_vocab: 50,
            filler_vocab: 150,
            len_min: 9,
            len_max: 15,
            plain_per_doc: 2,
            negated_per_doc: 1,
            noise: 0.06,
            seed: 7,
        }
    }
}

const CLASS_NAMES: [&str; 2] = ["pos", "neg"];

fn indicative(class: usize, i: usize) -> String {
    format!("{}w{i:02}", CLASS_NAMES[class])
}

fn filler(i: usize) -> String {
    format!("fillw{i:03}")
}

fn blur(i: usize) -> String {
    format!("blurw{i:02}")
}

fn generate_split(cfg: &SynthConfig, size: usize, stream: &mut RandomStream) -> Vec<LabeledExample> {
    let mut examples = Vec::with_capacity(size);
    for doc in 0..size {
        let label = doc % 2;
        let other = 1 - label;
        let len = cfg.len_min + stream.index(cfg.len_max - cfg.len_min + 1);
        let signal_tokens = cfg.plain_per_doc + 2 * cfg.negated_per_doc;
        let filler_count = len.saturating_sub(signal_tokens).max(1);

        let mut units: Vec<Vec<Token>> = Vec::with_capacity(filler_count + cfg.plain_per_doc + cfg.negated_per_doc);
        for _ in 0..cfg.plain_per_doc {
            let class = if stream.chance(cfg.noise) { other } else { label };
            let word = indicative(class, stream.index(cfg.indicative_vocab));
            units.push(vec![Token::new(word).unwrap()]);
        }
        for _ in 0..cfg.negated_per_doc {
            let word = indicative(other, stream.index(cfg.indicative_vocab));
            units.push(vec![
                Token::new("not").unwrap(),
                Token::new(word).unwrap(),
            ]);
        }
        for _ in 0..filler_count {
            units.push(vec![Token::new(filler(stream.index(cfg.filler_vocab))).unwrap()]);
        }
        stream.shuffle(&mut units);
        let tokens: Vec<Token> = units.into_iter().flatten().collect();
        examples.push(LabeledExample::new(TokenSequence::new(tokens).unwrap(), label));
    }
    examples
}

/// Generates (train, test, lexicon) deterministically from the config seed.
pub fn generate(cfg: &SynthConfig) -> (Dataset, Dataset, SynonymLexicon) {
    assert!(cfg.train_size >= 2 && cfg.test_size >= 2);
    assert!(cfg.len_min >= cfg.plain_per_doc + 2 * cfg.negated_per_doc + 1);
    assert!(cfg.len_max >= cfg.len_min);
    assert!(cfg.indicative_vocab >= 2 && cfg.filler_vocab >= 2);
    assert!((0.0..=1.0).contains(&cfg.noise));

    let mut train_stream = RandomStream::seeded(mix64(cfg.seed, TAG_SYNTH_TRAIN));
    let mut test_stream = RandomStream::seeded(mix64(cfg.seed, TAG_SYNTH_TEST));
    let label_names: Vec<String> = CLASS_NAMES.iter().map(|s| s.to_string()).collect();

    let train = Dataset::new(
        generate_split(cfg, cfg.train_size, &mut train_stream),
        label_names.clone(),
    )
    .expect("generated train split is valid");
    let test = Dataset::new(
        generate_split(cfg, cfg.test_size, &mut test_stream),
        label_names,
    )
    .expect("generated test split is valid");

    let k = cfg.indicative_vocab;
    let m = cfg.filler_vocab;
    let mut entries: Vec<(String, Vec<String>)> = Vec::new();
    for class in 0..2 {
        for i in 0..k {
            entries.push((
                indicative(class, i),
                vec![indicative(class, (i + 1) % k), blur(i % k)],
            ));
        }
    }
    for i in 0..m {
        entries.push((filler(i), vec![filler((i + 1) % m)]));
    }
    let lexicon = SynonymLexicon::from_entries(entries).expect("generated lexicon is valid");

    (train, test, lexicon)
}
