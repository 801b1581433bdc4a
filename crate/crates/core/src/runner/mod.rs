//! The pool-based active learning process and experiment grids.

mod config;
mod record;
mod suite;

use std::fmt;
use std::time::Instant;

pub use config::{
    n_cycles, DalConfig, ModelStart, SuiteSpec, DEFAULT_BUDGET, DEFAULT_INIT_SIZE,
    DEFAULT_QUERY_SIZE, DEFAULT_SEEDS, DEFAULT_SUBSET_SIZE,
};
pub use record::{
    parse_record, read_record, timings_path, write_record, write_timings, CycleEntry, CycleTiming,
    LoadedRecord, RecordHeader, RunRecord, ENGINE_VERSION,
};
pub use suite::{
    collect_records, record_path, run_suite, summarize_records, write_curves, SuiteOutcome,
    OUTPUT_DIR_ENV,
};

use crate::classifier::{self, mean_cross_entropy, predict_proba, HeadParams, ProbMatrix};
use crate::error::{Error, Result};
use crate::featureio::DatasetBundle;
use crate::matrix::Matrix;
use crate::metrics::MetricKind;
use crate::pools::{annotate, draw_subset, init_pools, update_pools, PoolState};
use crate::rng::{substream, Purpose};
use crate::strategies::{select, StrategyInput};

/// How the head entered a training round.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrainStart {
    /// Freshly initialized parameters.
    Fresh,
    /// Parameters carried over from the previous cycle.
    Continued,
    /// Labeled pool empty; the fresh head was left untrained.
    Skipped,
}

/// Hooks into a running experiment, for instrumentation and tests.
pub trait RunObserver {
    fn on_train(&mut self, _cycle: usize, _start: TrainStart) {}
    fn on_candidates(&mut self, _cycle: usize, _candidates: &[usize]) {}
}

pub struct NoopObserver;

impl RunObserver for NoopObserver {}

/// A run that stopped early, with everything recorded up to the failure.
#[derive(Debug)]
pub struct RunFailure {
    /// Annotated with the failing cycle.
    pub error: Error,
    pub partial: RunRecord,
}

impl fmt::Display for RunFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} / {} / seed {}: {}",
            self.partial.header.dataset, self.partial.header.strategy, self.partial.header.seed, self.error
        )
    }
}

impl std::error::Error for RunFailure {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        Some(&self.error)
    }
}

pub fn run_experiment(
    cfg: &DalConfig,
    bundle: &DatasetBundle,
    seed: u64,
) -> std::result::Result<RunRecord, RunFailure> {
    run_experiment_observed(cfg, bundle, seed, &mut NoopObserver)
}

struct Run<'a> {
    cfg: &'a DalConfig,
    bundle: &'a DatasetBundle,
    seed: u64,
    metric: MetricKind,
    test_x: Matrix,
    c: usize,
}

impl Run<'_> {
    fn train_round(
        &self,
        cycle: usize,
        prev: Option<&HeadParams>,
        labeled: &[usize],
        observer: &mut dyn RunObserver,
    ) -> Result<(HeadParams, Option<f64>)> {
        let d = self.bundle.dim();
        let warm = self.cfg.model_start == ModelStart::Warm && cycle > 0;
        let start = match prev {
            Some(p) if warm => p.clone(),
            _ => classifier::init_params(d, self.c, &mut substream(self.seed, cycle as u32, Purpose::ModelInit))?,
        };
        if labeled.is_empty() {
            observer.on_train(cycle, TrainStart::Skipped);
            return Ok((start, None));
        }
        observer.on_train(cycle, if warm { TrainStart::Continued } else { TrainStart::Fresh });
        let x = self.bundle.train.features.gather(labeled);
        let y = self.bundle.train.labels.gather(labeled);
        let mut rng = substream(self.seed, cycle as u32, Purpose::Shuffle);
        let params = classifier::train(Some(&start), &x, &y, self.c, &self.cfg.train, &mut rng)?;
        let loss = mean_cross_entropy(&params, &x, &y)?;
        Ok((params, Some(loss)))
    }

    fn evaluate(&self, params: &HeadParams) -> Result<f64> {
        let pred = predict_proba(params, &self.test_x)?.argmax();
        self.metric
            .score(&pred, self.bundle.test.labels.labels(), self.bundle.num_classes)
    }

    fn strategy_input(&self, cycle: usize, params: &HeadParams, state: &PoolState, candidates: Vec<usize>) -> Result<StrategyInput> {
        let kind = self.cfg.strategy;
        let features = &self.bundle.train.features;
        let candidate_embeddings = features.gather(&candidates);
        let candidate_probs = predict_proba(params, &candidate_embeddings)?;
        let (labeled_embeddings, labeled_probs) = if kind.needs_labeled_pool() {
            let x = features.gather(&state.labeled_indices());
            let p = predict_proba(params, &x)?;
            (x, p)
        } else {
            (
                Matrix::zeros(0, features.d()),
                ProbMatrix::new(Matrix::zeros(0, self.c))?,
            )
        };
        let grad_embeddings = if kind.needs_gradients() {
            Some(classifier::grad_embedding(params, &candidate_embeddings)?)
        } else {
            None
        };
        Ok(StrategyInput {
            cycle,
            candidate_indices: candidates,
            candidate_probs,
            candidate_embeddings,
            labeled_embeddings,
            labeled_probs,
            grad_embeddings,
        })
    }
}

/// Runs one seeded active learning experiment to budget depletion.
///
/// Cycle 0 trains on the initial pool and scores the test split; each later
/// cycle draws candidates, queries `query_size` of them, labels them, retrains
/// (cold or warm) and scores again. All randomness comes from substreams
/// keyed by `(seed, cycle, purpose)`; the initial pool depends on the seed
/// only, so every strategy starts from the same labeled set.
pub fn run_experiment_observed(
    cfg: &DalConfig,
    bundle: &DatasetBundle,
    seed: u64,
    observer: &mut dyn RunObserver,
) -> std::result::Result<RunRecord, RunFailure> {
    let n_train = bundle.train.features.n();
    let metric = MetricKind::for_dataset(bundle.imbalanced);
    let mut record = RunRecord {
        header: RecordHeader {
            dataset: bundle.name.clone(),
            strategy: cfg.strategy.to_string(),
            seed,
            config_id: cfg.id.clone(),
            config_hash: cfg.hash_for(n_train),
            engine_version: ENGINE_VERSION.to_string(),
            init_size: cfg.init_size,
            query_size: cfg.query_size,
            budget: cfg.budget,
            metric,
            initial: Vec::new(),
        },
        cycles: Vec::new(),
        timings: Vec::new(),
    };
    match drive(cfg, bundle, seed, metric, &mut record, observer) {
        Ok(()) => Ok(record),
        Err(error) => Err(RunFailure {
            error,
            partial: record,
        }),
    }
}

fn drive(
    cfg: &DalConfig,
    bundle: &DatasetBundle,
    seed: u64,
    metric: MetricKind,
    record: &mut RunRecord,
    observer: &mut dyn RunObserver,
) -> Result<()> {
    let n_train = bundle.train.features.n();
    cfg.validate_for(n_train).map_err(|e| e.at_cycle(0))?;
    let cycles = n_cycles(cfg).map_err(|e| e.at_cycle(0))?;
    let run = Run {
        cfg,
        bundle,
        seed,
        metric,
        test_x: bundle.test.features.to_matrix(),
        c: bundle.num_classes as usize,
    };

    let mut state = init_pools(n_train, cfg.init_size, &mut substream(seed, 0, Purpose::Init))
        .map_err(|e| e.at_cycle(0))?;
    record.header.initial = state.labeled_indices();

    let started = Instant::now();
    let (mut params, loss) = run
        .train_round(0, None, &state.labeled_indices(), observer)
        .map_err(|e| e.at_cycle(0))?;
    let train_secs = started.elapsed().as_secs_f64();
    let score = run.evaluate(&params).map_err(|e| e.at_cycle(0))?;
    record.cycles.push(CycleEntry {
        cycle: 0,
        queried: Vec::new(),
        labeled: state.labeled().len(),
        score,
        metric,
        train_loss: loss,
    });
    record.timings.push(CycleTiming {
        cycle: 0,
        train_secs,
        query_secs: 0.0,
    });

    for cycle in 1..=cycles {
        let step = |state: &PoolState, params: &HeadParams, observer: &mut dyn RunObserver| -> Result<_> {
            let started = Instant::now();
            let candidates = match cfg.subset_size {
                Some(size) => draw_subset(state, size, &mut substream(seed, cycle as u32, Purpose::Subset))?,
                None => {
                    if state.unlabeled().is_empty() {
                        return Err(Error::EmptyPool);
                    }
                    state.unlabeled_indices()
                }
            };
            observer.on_candidates(cycle, &candidates);
            let input = run.strategy_input(cycle, params, state, candidates)?;
            let batch = select(
                cfg.strategy,
                &input,
                cfg.query_size,
                &mut substream(seed, cycle as u32, Purpose::Strategy),
            )?;
            let query_secs = started.elapsed().as_secs_f64();

            let annotated = annotate(&batch, &bundle.train.labels)?;
            let next = update_pools(state, &annotated)?;

            let started = Instant::now();
            let (next_params, loss) = run.train_round(cycle, Some(params), &next.labeled_indices(), observer)?;
            let train_secs = started.elapsed().as_secs_f64();
            let score = run.evaluate(&next_params)?;
            Ok((next, next_params, batch.indices, loss, score, query_secs, train_secs))
        };
        let (next, next_params, queried, loss, score, query_secs, train_secs) =
            step(&state, &params, observer).map_err(|e| e.at_cycle(cycle))?;
        state = next;
        params = next_params;
        record.cycles.push(CycleEntry {
            cycle,
            queried,
            labeled: state.labeled().len(),
            score,
            metric,
            train_loss: loss,
        });
        record.timings.push(CycleTiming {
            cycle,
            train_secs,
            query_secs,
        });
    }
    debug_assert_eq!(state.labeled().len(), cfg.budget);
    Ok(())
}
