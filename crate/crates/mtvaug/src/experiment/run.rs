//! Multi-seed runs and strength x weight sweeps.
//!
//! Every sweep cell derives its per-seed training seeds from the cell key
//! alone, so results are independent of execution order and parallelism.
//! Cells that are degenerate (no operator, `gamma_o = 1`, or `alpha = 0`)
//! share the baseline derivation: their training is provably equivalent to
//! vanilla training, so giving them the baseline seeds makes them
//! bit-identical to the baseline run.

use std::collections::BTreeMap;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use thiserror::Error;

use crate::augment::{AugmentationConfig, Operator};
use crate::classifier::{evaluate, train_mtv, ClassifierError, MixWeights, TrainConfig};
use crate::rng::mix64;
use crate::text::{Dataset, SynonymLexicon};

const CELL_TAG: u64 = 0x5357_4545_5043_454C;

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("invalid run spec: {0}")]
    InvalidSpec(String),
    #[error("invalid grid: {0}")]
    InvalidGrid(&'static str),
    #[error(transparent)]
    Classifier(#[from] ClassifierError),
    #[error(transparent)]
    Augment(#[from] crate::augment::AugmentError),
}

/// One experiment configuration: operator (or none for the baseline),
/// strength, original-data weight, seeds, and training hyperparameters.
#[derive(Clone, Debug)]
pub struct RunSpec {
    pub operator: Option<Operator>,
    pub alpha: f64,
    pub gamma_o: f64,
    pub seeds: Vec<u64>,
    pub train_cfg: TrainConfig,
    pub dim: usize,
}

impl RunSpec {
    pub fn validate(&self) -> Result<(), ExperimentError> {
        if self.seeds.is_empty() {
            return Err(ExperimentError::InvalidSpec("seeds must be non-empty".into()));
        }
        let mut sorted = self.seeds.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != self.seeds.len() {
            return Err(ExperimentError::InvalidSpec("seeds must be distinct".into()));
        }
        if !(0.0..=1.0).contains(&self.alpha) || self.alpha.is_nan() {
            return Err(ExperimentError::InvalidSpec(format!(
                "alpha {} out of range",
                self.alpha
            )));
        }
        if !(0.0..=1.0).contains(&self.gamma_o) || self.gamma_o.is_nan() {
            return Err(ExperimentError::InvalidSpec(format!(
                "gamma_o {} out of range",
                self.gamma_o
            )));
        }
        self.train_cfg.validate()?;
        Ok(())
    }

    fn with_cell(&self, operator: Option<Operator>, alpha: f64, gamma_o: f64) -> RunSpec {
        RunSpec {
            operator,
            alpha,
            gamma_o,
            seeds: self.seeds.clone(),
            train_cfg: self.train_cfg,
            dim: self.dim,
        }
    }
}

/// Accuracies for one spec across its seeds.
#[derive(Clone, Debug)]
pub struct RunResult {
    pub spec: RunSpec,
    pub per_seed_accuracy: Vec<f64>,
    pub mean_accuracy: f64,
}

impl RunResult {
    pub fn from_accuracies(spec: RunSpec, per_seed_accuracy: Vec<f64>) -> Self {
        let mean_accuracy =
            per_seed_accuracy.iter().sum::<f64>() / per_seed_accuracy.len() as f64;
        Self {
            spec,
            per_seed_accuracy,
            mean_accuracy,
        }
    }
}

/// Grid coordinates of a sweep cell. Alpha and gamma are stored as
/// fixed-point thousandths, which both gives the map a total order and pins
/// the seed-derivation hash; grids finer than 1e-3 are not supported.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CellKey {
    pub operator: Operator,
    pub alpha_millis: u32,
    pub gamma_millis: u32,
}

impl CellKey {
    pub fn new(operator: Operator, alpha: f64, gamma_o: f64) -> Self {
        Self {
            operator,
            alpha_millis: to_millis(alpha),
            gamma_millis: to_millis(gamma_o),
        }
    }

    pub fn alpha(&self) -> f64 {
        self.alpha_millis as f64 / 1000.0
    }

    pub fn gamma_o(&self) -> f64 {
        self.gamma_millis as f64 / 1000.0
    }
}

pub fn to_millis(x: f64) -> u32 {
    (x * 1000.0).round() as u32
}

/// Stable hash of a cell's coordinates used to derive per-seed training
/// seeds. Degenerate cells (no operator, `gamma_o = 1`, or `alpha = 0`)
/// collapse to the baseline coordinates so their runs are bit-identical to
/// the baseline.
pub fn cell_seed_hash(operator: Option<Operator>, alpha: f64, gamma_o: f64) -> u64 {
    let degenerate = operator.is_none() || to_millis(gamma_o) == 1000 || to_millis(alpha) == 0;
    let (op_id, alpha_millis, gamma_millis) = if degenerate {
        (0, 0, 1000)
    } else {
        (
            operator.expect("non-degenerate cell has an operator").id(),
            to_millis(alpha),
            to_millis(gamma_o),
        )
    };
    mix64(
        mix64(mix64(CELL_TAG, op_id), alpha_millis as u64),
        gamma_millis as u64,
    )
}

/// Trains and evaluates one model per seed. Seeds are independent: the
/// training seed for seed `s` is `mix64(s, cell_seed_hash(..))`, so results
/// do not depend on the order seeds are listed or executed in.
pub fn run(
    spec: &RunSpec,
    train: &Dataset,
    test: &Dataset,
    lexicon: &SynonymLexicon,
) -> Result<RunResult, ExperimentError> {
    spec.validate()?;
    let hash = cell_seed_hash(spec.operator, spec.alpha, spec.gamma_o);
    let (aug, weights) = match spec.operator {
        Some(op) => (
            AugmentationConfig::new(op, spec.alpha)?,
            MixWeights::from_gamma_o(spec.gamma_o)?,
        ),
        None => (
            AugmentationConfig::new(Operator::Substitution, 0.0)?,
            MixWeights::vanilla(),
        ),
    };
    let mut per_seed = Vec::with_capacity(spec.seeds.len());
    for &seed in &spec.seeds {
        let mut cfg = spec.train_cfg;
        cfg.seed = mix64(seed, hash);
        let model = train_mtv(train, &cfg, &aug, lexicon, weights, spec.dim)?;
        per_seed.push(evaluate(&model, test, spec.dim));
    }
    Ok(RunResult::from_accuracies(spec.clone(), per_seed))
}

/// Boost in percentage points relative to a baseline accuracy.
pub fn compute_boost(mean_accuracy: f64, baseline_accuracy: f64) -> f64 {
    100.0 * (mean_accuracy - baseline_accuracy)
}

/// Arithmetic mean of per-dataset boosts.
pub fn average_boost(per_dataset_boosts: &[f64]) -> f64 {
    assert!(!per_dataset_boosts.is_empty());
    per_dataset_boosts.iter().sum::<f64>() / per_dataset_boosts.len() as f64
}

/// Baseline plus per-cell results and boosts for a full sweep grid.
#[derive(Clone, Debug)]
pub struct SweepResult {
    pub baseline: RunResult,
    pub cells: BTreeMap<CellKey, RunResult>,
    pub boosts: BTreeMap<CellKey, f64>,
}

/// Previously completed results injected into [`sweep_with`] so interrupted
/// sweeps can resume without recomputing finished cells.
#[derive(Clone, Debug, Default)]
pub struct SweepResume {
    pub baseline: Option<Vec<f64>>,
    pub cells: BTreeMap<CellKey, Vec<f64>>,
}

/// Progress callback payload: `completed` of `total` units are done, and
/// `key` is `None` for the baseline run.
pub struct SweepProgress<'a> {
    pub completed: usize,
    pub total: usize,
    pub key: Option<CellKey>,
    pub result: &'a RunResult,
    /// False when the result was injected from a resume journal.
    pub fresh: bool,
}

/// Runs the full grid with `jobs` worker threads. Results are keyed and
/// seeded by cell coordinates, so output is identical for any `jobs` value
/// and any execution order.
#[allow(clippy::too_many_arguments)]
pub fn sweep_with<F>(
    template: &RunSpec,
    operators: &[Operator],
    alphas: &[f64],
    gammas: &[f64],
    train: &Dataset,
    test: &Dataset,
    lexicon: &SynonymLexicon,
    jobs: usize,
    resume: &SweepResume,
    observer: F,
) -> Result<SweepResult, ExperimentError>
where
    F: Fn(SweepProgress<'_>) + Sync,
{
    if operators.is_empty() {
        return Err(ExperimentError::InvalidGrid("operator list is empty"));
    }
    if alphas.is_empty() {
        return Err(ExperimentError::InvalidGrid("alpha grid is empty"));
    }
    if gammas.is_empty() {
        return Err(ExperimentError::InvalidGrid("gamma grid is empty"));
    }
    for &a in alphas {
        if !(0.0..=1.0).contains(&a) || a.is_nan() {
            return Err(ExperimentError::InvalidGrid("alpha out of [0, 1]"));
        }
    }
    for &g in gammas {
        if !(0.0..=1.0).contains(&g) || g.is_nan() {
            return Err(ExperimentError::InvalidGrid("gamma_o out of [0, 1]"));
        }
    }

    // Deduplicated cell grid in canonical order.
    let mut specs: BTreeMap<CellKey, RunSpec> = BTreeMap::new();
    for &op in operators {
        for &alpha in alphas {
            for &gamma in gammas {
                let key = CellKey::new(op, alpha, gamma);
                specs
                    .entry(key)
                    .or_insert_with(|| template.with_cell(Some(op), alpha, gamma));
            }
        }
    }
    let baseline_spec = template.with_cell(None, 0.0, 1.0);
    baseline_spec.validate()?;

    let total = specs.len() + 1;
    let completed = AtomicUsize::new(0);
    let notify = |key: Option<CellKey>, result: &RunResult, fresh: bool| {
        let done = completed.fetch_add(1, Ordering::SeqCst) + 1;
        observer(SweepProgress {
            completed: done,
            total,
            key,
            result,
            fresh,
        });
    };

    let baseline = match &resume.baseline {
        Some(accs) if accs.len() == template.seeds.len() => {
            let result = RunResult::from_accuracies(baseline_spec.clone(), accs.clone());
            notify(None, &result, false);
            result
        }
        _ => {
            let result = run(&baseline_spec, train, test, lexicon)?;
            notify(None, &result, true);
            result
        }
    };

    let mut cells: BTreeMap<CellKey, RunResult> = BTreeMap::new();
    let mut todo: Vec<(CellKey, RunSpec)> = Vec::new();
    for (key, spec) in specs {
        match resume.cells.get(&key) {
            Some(accs) if accs.len() == spec.seeds.len() => {
                let result = RunResult::from_accuracies(spec, accs.clone());
                notify(Some(key), &result, false);
                cells.insert(key, result);
            }
            _ => todo.push((key, spec)),
        }
    }

    let run_cell = |(key, spec): &(CellKey, RunSpec)| -> Result<(CellKey, RunResult), ExperimentError> {
        let result = run(spec, train, test, lexicon)?;
        notify(Some(*key), &result, true);
        Ok((*key, result))
    };

    let computed: Result<Vec<(CellKey, RunResult)>, ExperimentError> = if jobs <= 1 {
        todo.iter().map(run_cell).collect()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build()
            .map_err(|e| ExperimentError::InvalidSpec(format!("thread pool: {e}")))?;
        pool.install(|| {
            use rayon::prelude::*;
            let results = Mutex::new(Vec::with_capacity(todo.len()));
            let err: Mutex<Option<ExperimentError>> = Mutex::new(None);
            todo.par_iter().for_each(|item| {
                match run_cell(item) {
                    Ok(pair) => results.lock().unwrap().push(pair),
                    Err(e) => {
                        err.lock().unwrap().get_or_insert(e);
                    }
                }
            });
            match err.into_inner().unwrap() {
                Some(e) => Err(e),
                None => Ok(results.into_inner().unwrap()),
            }
        })
    };
    for (key, result) in computed? {
        cells.insert(key, result);
    }

    let boosts = cells
        .iter()
        .map(|(key, result)| {
            (
                *key,
                compute_boost(result.mean_accuracy, baseline.mean_accuracy),
            )
        })
        .collect();

    Ok(SweepResult {
        baseline,
        cells,
        boosts,
    })
}

/// Single-threaded sweep over the full grid with no resume state.
pub fn sweep(
    template: &RunSpec,
    operators: &[Operator],
    alphas: &[f64],
    gammas: &[f64],
    train: &Dataset,
    test: &Dataset,
    lexicon: &SynonymLexicon,
) -> Result<SweepResult, ExperimentError> {
    sweep_with(
        template,
        operators,
        alphas,
        gammas,
        train,
        test,
        lexicon,
        1,
        &SweepResume::default(),
        |_| {},
    )
}
