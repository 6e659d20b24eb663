//! `mtvaug gen-synthetic`: write the synthetic corpus and its lexicon.

use mtvaug::experiment::dataset_to_tsv;
use mtvaug::experiment::synth::{generate, SynthConfig};

use super::{validate_unit_interval, write_text};
use crate::{usage, CliResult, GenSyntheticArgs};

pub fn run(args: GenSyntheticArgs) -> CliResult<()> {
    validate_unit_interval(args.noise, "noise")?;
    if args.train_size < 2 || args.test_size < 2 {
        return Err(usage("train-size and test-size must be at least 2"));
    }
    let cfg = SynthConfig {
        train_size: args.train_size,
        test_size: args.test_size,
        noise: args.noise,
        seed: args.seed,
        ..SynthConfig::default()
    };
    let (train, test, lexicon) = generate(&cfg);
    std::fs::create_dir_all(&args.out_dir)?;
    write_text(&args.out_dir.join("train.tsv"), &dataset_to_tsv(&train))?;
    write_text(&args.out_dir.join("test.tsv"), &dataset_to_tsv(&test))?;
    write_text(&args.out_dir.join("lexicon.tsv"), &lexicon.to_tsv_string())?;
    println!(
        "wrote {} train / {} test examples and {} lexicon entries to {}",
        train.len(),
        test.len(),
        lexicon.len(),
        args.out_dir.display()
    );
    Ok(())
}
