//! `mtvaug train`: one training run, printed accuracy, optional model file.

use mtvaug::augment::{AugmentationConfig, Operator};
use mtvaug::classifier::{
    equal_updates_epochs, evaluate, train_mtv, LossKind, MixWeights, TrainConfig,
};
use mtvaug::experiment::load_dataset;

use super::{lexicon_for, parse_operator, validate_unit_interval};
use crate::{usage, CliResult, TrainArgs};

pub fn run(args: TrainArgs) -> CliResult<()> {
    validate_unit_interval(args.gamma_o, "gamma_o")?;
    validate_unit_interval(args.alpha, "alpha")?;
    let loss: LossKind = args.loss.parse().map_err(usage)?;
    let operator: Option<Operator> = match &args.operator {
        Some(name) if name != "none" => Some(parse_operator(name)?),
        _ => None,
    };
    if args.dim < 2 {
        return Err(usage("dim must be at least 2"));
    }
    let lexicon = lexicon_for(operator, args.lexicon.as_ref(), args.stopwords.as_ref())?;
    let train = load_dataset(&args.train)?;
    let test = load_dataset(&args.test)?;

    let epochs = match args.equalize_updates {
        Some(baseline_size) => {
            if baseline_size == 0 {
                return Err(usage("equalize-updates baseline size must be >= 1"));
            }
            equal_updates_epochs(args.epochs, baseline_size, train.len())
        }
        None => args.epochs,
    };
    let cfg = TrainConfig {
        loss,
        epochs,
        batch_size: args.batch_size,
        learning_rate: args.learning_rate,
        l2_lambda: args.l2_lambda,
        seed: args.seed,
    };
    cfg.validate().map_err(|e| usage(e.to_string()))?;

    let (aug, weights) = match operator {
        Some(op) => (
            AugmentationConfig::new(op, args.alpha).map_err(|e| usage(e.to_string()))?,
            MixWeights::from_gamma_o(args.gamma_o).map_err(|e| usage(e.to_string()))?,
        ),
        None => (
            AugmentationConfig::new(Operator::Substitution, 0.0)
                .map_err(|e| usage(e.to_string()))?,
            MixWeights::vanilla(),
        ),
    };

    let model = train_mtv(&train, &cfg, &aug, &lexicon, weights, args.dim)?;
    let accuracy = evaluate(&model, &test, args.dim);
    println!("accuracy={accuracy:.4}");
    if let Some(path) = &args.model_out {
        model.save(path)?;
    }
    Ok(())
}
