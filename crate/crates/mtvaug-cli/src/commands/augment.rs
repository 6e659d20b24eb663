//! `mtvaug augment`: static-corpus export of augmented copies.

use mtvaug::augment::{augment, AugmentationConfig};
use mtvaug::classifier::STREAM_AUGMENT;
use mtvaug::experiment::load_dataset;
use mtvaug::rng::{mix64, RandomStream};
use mtvaug::text::detokenize;

use super::{lexicon_for, parse_operator, validate_unit_interval};
use crate::{usage, AugmentArgs, CliResult};

pub fn run(args: AugmentArgs) -> CliResult<()> {
    let operator = parse_operator(&args.operator)?;
    validate_unit_interval(args.alpha, "alpha")?;
    if args.copies == 0 {
        return Err(usage("copies must be at least 1"));
    }
    let lexicon = lexicon_for(Some(operator), args.lexicon.as_ref(), args.stopwords.as_ref())?;
    let dataset = load_dataset(&args.input)?;
    let cfg = AugmentationConfig::new(operator, args.alpha).map_err(|e| usage(e.to_string()))?;

    let mut rng = RandomStream::seeded(mix64(args.seed, STREAM_AUGMENT));
    let mut out = String::new();
    for ex in dataset.examples() {
        for _ in 0..args.copies {
            let seq = augment(ex.sequence(), &cfg, &lexicon, &mut rng);
            out.push_str(&dataset.label_names()[ex.label()]);
            out.push('\t');
            out.push_str(&detokenize(&seq));
            out.push('\n');
        }
    }
    super::write_text(&args.output, &out)?;
    Ok(())
}
