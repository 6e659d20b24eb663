//! `mtvaug sweep`: grid execution with journaling, resume, and reports.
//!
//! Completed cells are appended to `<out>/runs.csv` as they finish, so an
//! interrupted sweep can be rerun with the same flags and will skip finished
//! cells. On success the journal is rewritten in canonical order along with
//! the derived report files, so final outputs are byte-identical regardless
//! of `--jobs` or interruption history.

use std::collections::BTreeMap;
use std::fs::OpenOptions;
use std::io::Write as _;
use std::path::PathBuf;
use std::sync::Mutex;

use serde::Deserialize;

use mtvaug::augment::Operator;
use mtvaug::classifier::{LossKind, TrainConfig};
use mtvaug::experiment::report::{read_runs_journal, RunRow, RUNS_HEADER};
use mtvaug::experiment::{
    emit_report, sweep_with, CellKey, RunSpec, SweepProgress, SweepResume,
};

use super::lexicon_for;
use crate::{usage, CliResult, SweepArgs};

/// JSON config with the same keys as the sweep flags. Flags win over the
/// file, which wins over built-in defaults.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
struct SweepFileConfig {
    train: Option<PathBuf>,
    test: Option<PathBuf>,
    lexicon: Option<PathBuf>,
    stopwords: Option<PathBuf>,
    operators: Option<String>,
    alphas: Option<String>,
    gammas: Option<String>,
    seeds: Option<String>,
    loss: Option<String>,
    epochs: Option<usize>,
    batch_size: Option<usize>,
    learning_rate: Option<f64>,
    l2_lambda: Option<f64>,
    dim: Option<usize>,
    out: Option<PathBuf>,
    jobs: Option<usize>,
}

fn parse_list<T, E: std::fmt::Display>(
    raw: &str,
    what: &str,
    parse: impl Fn(&str) -> Result<T, E>,
) -> CliResult<Vec<T>> {
    raw.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| parse(s).map_err(|e| usage(format!("invalid {what} {s:?}: {e}"))))
        .collect()
}

pub fn run(args: SweepArgs) -> CliResult<()> {
    let file: SweepFileConfig = match &args.config {
        Some(path) => {
            let content = std::fs::read_to_string(path)?;
            serde_json::from_str(&content)
                .map_err(|e| usage(format!("invalid config file: {e}")))?
        }
        None => SweepFileConfig::default(),
    };

    let train_path = args
        .train
        .or(file.train)
        .ok_or_else(|| usage("missing --train"))?;
    let test_path = args
        .test
        .or(file.test)
        .ok_or_else(|| usage("missing --test"))?;
    let out_dir = args.out.or(file.out).ok_or_else(|| usage("missing --out"))?;
    let lexicon_path = args.lexicon.or(file.lexicon);
    let stopwords_path = args.stopwords.or(file.stopwords);

    let operators_raw = args
        .operators
        .or(file.operators)
        .unwrap_or_else(|| "substitution,dropout,injection,shuffling".to_string());
    let alphas_raw = args
        .alphas
        .or(file.alphas)
        .unwrap_or_else(|| "0.05,0.1,0.2,0.3,0.4,0.5".to_string());
    let gammas_raw = args.gammas.or(file.gammas).unwrap_or_else(|| "0,0.5".to_string());
    let seeds_raw = args
        .seeds
        .or(file.seeds)
        .unwrap_or_else(|| "1,2,3,4,5".to_string());

    let operators: Vec<Operator> = parse_list(&operators_raw, "operator", str::parse)?;
    let alphas: Vec<f64> = parse_list(&alphas_raw, "alpha", str::parse::<f64>)?;
    let gammas: Vec<f64> = parse_list(&gammas_raw, "gamma_o", str::parse::<f64>)?;
    let seeds: Vec<u64> = parse_list(&seeds_raw, "seed", str::parse::<u64>)?;

    let loss: LossKind = args
        .loss
        .or(file.loss)
        .unwrap_or_else(|| "hinge".to_string())
        .parse()
        .map_err(usage)?;
    let train_cfg = TrainConfig {
        loss,
        epochs: args.epochs.or(file.epochs).unwrap_or(1000),
        batch_size: args.batch_size.or(file.batch_size).unwrap_or(32),
        learning_rate: args.learning_rate.or(file.learning_rate).unwrap_or(0.1),
        l2_lambda: args.l2_lambda.or(file.l2_lambda).unwrap_or(1e-4),
        seed: 0,
    };
    train_cfg.validate().map_err(|e| usage(e.to_string()))?;
    let dim = args.dim.or(file.dim).unwrap_or(1 << 18);
    if dim < 2 {
        return Err(usage("dim must be at least 2"));
    }
    let jobs = args.jobs.or(file.jobs).unwrap_or(1).max(1);

    let needs_lexicon = operators.iter().copied().find(Operator::needs_lexicon);
    let lexicon = lexicon_for(needs_lexicon, lexicon_path.as_ref(), stopwords_path.as_ref())?;
    let train = mtvaug::experiment::load_dataset(&train_path)?;
    let test = mtvaug::experiment::load_dataset(&test_path)?;

    let template = RunSpec {
        operator: None,
        alpha: 0.0,
        gamma_o: 1.0,
        seeds: seeds.clone(),
        train_cfg,
        dim,
    };
    template.validate()?;

    std::fs::create_dir_all(&out_dir)?;
    let journal_path = out_dir.join("runs.csv");
    let resume = load_resume(&journal_path, &seeds)?;
    let resumed_cells = resume.cells.len() + usize::from(resume.baseline.is_some());
    if resumed_cells > 0 {
        println!("resuming: {resumed_cells} completed cell(s) found in {}", journal_path.display());
    }

    let journal: Mutex<std::fs::File> = {
        let fresh = !journal_path.exists();
        let mut f = OpenOptions::new()
            .create(true)
            .append(true)
            .open(&journal_path)?;
        if fresh {
            writeln!(f, "{RUNS_HEADER}")?;
        }
        Mutex::new(f)
    };
    let baseline_mean: Mutex<Option<f64>> = Mutex::new(None);

    let observer = |p: SweepProgress<'_>| {
        let (op_name, alpha, gamma) = match p.key {
            Some(key) => (key.operator.name(), p.result.spec.alpha, p.result.spec.gamma_o),
            None => ("none", 0.0, 1.0),
        };
        println!(
            "cell {}/{} operator={} alpha={} gamma_o={} mean_acc={:.4}",
            p.completed, p.total, op_name, alpha, gamma, p.result.mean_accuracy
        );
        if p.key.is_none() {
            *baseline_mean.lock().unwrap() = Some(p.result.mean_accuracy);
        }
        if !p.fresh {
            return;
        }
        // The baseline always completes first, so this is set by now.
        let base = baseline_mean.lock().unwrap().expect("baseline completes first");
        let mut lines = String::new();
        for (i, &seed) in p.result.spec.seeds.iter().enumerate() {
            let acc = p.result.per_seed_accuracy[i];
            let row = RunRow {
                operator: p.key.map(|k| k.operator),
                alpha,
                gamma_o: gamma,
                seed,
                accuracy: acc,
                baseline_accuracy: base,
                boost_pp: 100.0 * (acc - base),
            };
            lines.push_str(&row.to_csv_line());
            lines.push('\n');
        }
        let mut file = journal.lock().unwrap();
        let _ = file.write_all(lines.as_bytes());
        let _ = file.flush();
    };

    let result = sweep_with(
        &template, &operators, &alphas, &gammas, &train, &test, &lexicon, jobs, &resume, observer,
    )?;
    emit_report(&result, &out_dir)?;
    println!("report written to {}", out_dir.display());
    Ok(())
}

/// Rebuilds resume state from a journal: only cells whose recorded seeds
/// exactly match the configured seed list (same values, same order) are
/// considered complete.
fn load_resume(journal_path: &PathBuf, seeds: &[u64]) -> CliResult<SweepResume> {
    if !journal_path.exists() {
        return Ok(SweepResume::default());
    }
    let rows = read_runs_journal(journal_path)?;
    let mut baseline: Vec<(u64, f64)> = Vec::new();
    let mut cells: BTreeMap<CellKey, Vec<(u64, f64)>> = BTreeMap::new();
    for row in rows {
        match row.operator {
            None => baseline.push((row.seed, row.accuracy)),
            Some(op) => cells
                .entry(CellKey::new(op, row.alpha, row.gamma_o))
                .or_default()
                .push((row.seed, row.accuracy)),
        }
    }
    let complete = |entries: &[(u64, f64)]| -> Option<Vec<f64>> {
        let recorded: Vec<u64> = entries.iter().map(|(s, _)| *s).collect();
        (recorded == seeds).then(|| entries.iter().map(|(_, a)| *a).collect())
    };
    Ok(SweepResume {
        baseline: complete(&baseline),
        cells: cells
            .into_iter()
            .filter_map(|(k, v)| complete(&v).map(|accs| (k, accs)))
            .collect(),
    })
}
