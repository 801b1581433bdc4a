use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::featureio::{write_atomic, DatasetBundle, Manifest};
use crate::metrics::{aggregate, BenchmarkTable, RunSummary, SummaryStat};

use super::record::{read_record, timings_path, write_record, write_timings, LoadedRecord, RunRecord};
use super::{run_experiment, DalConfig, RunFailure, SuiteSpec};

/// Environment variable that overrides the output directory of the CLI.
pub const OUTPUT_DIR_ENV: &str = "DALH_OUT_DIR";

pub struct SuiteOutcome {
    pub auc: BenchmarkTable,
    pub fac: BenchmarkTable,
    /// Completed runs in grid order.
    pub records: Vec<RunRecord>,
    pub failures: Vec<RunFailure>,
}

fn file_safe(s: &str) -> String {
    s.chars()
        .map(|c| if c.is_ascii_alphanumeric() || "-_.+".contains(c) { c } else { '-' })
        .collect()
}

/// `<out>/records/<config>/<dataset>/<strategy>__seed<seed>.jsonl`
pub fn record_path(out_dir: &Path, record: &RunRecord) -> PathBuf {
    let h = &record.header;
    out_dir
        .join("records")
        .join(file_safe(&h.config_id))
        .join(file_safe(&h.dataset))
        .join(format!("{}__seed{}.jsonl", file_safe(&h.strategy), h.seed))
}

fn persist(out_dir: &Path, record: &RunRecord) -> Result<()> {
    let path = record_path(out_dir, record);
    write_record(record, &path)?;
    write_timings(record, &timings_path(&path))
}

/// Runs every (config, strategy, dataset, seed) of the grid, optionally in
/// parallel, and aggregates the completed runs.
///
/// Failed runs are kept (with their partial records) and leave gaps in the
/// tables instead of aborting the suite. With `out_dir`, every record and
/// both summary tables are written there.
pub fn run_suite(
    manifest: &Manifest,
    spec: &SuiteSpec,
    jobs: usize,
    out_dir: Option<&Path>,
) -> Result<SuiteOutcome> {
    spec.validate()?;
    let names: Vec<String> = if spec.datasets.is_empty() {
        manifest.datasets.iter().map(|e| e.name.clone()).collect()
    } else {
        spec.datasets.clone()
    };
    let bundles: Vec<DatasetBundle> = names
        .iter()
        .map(|n| manifest.load_bundle(n))
        .collect::<Result<_>>()?;

    let mut grid: Vec<(DalConfig, &DatasetBundle, u64)> = Vec::new();
    for base in &spec.configs {
        for &strategy in &spec.strategies {
            let cfg = DalConfig {
                strategy,
                ..base.clone()
            };
            for bundle in &bundles {
                cfg.validate_for(bundle.train.features.n())
                    .map_err(|e| Error::InvalidConfig(format!("{} on {}: {e}", cfg.id, bundle.name)))?;
                for &seed in &spec.seeds {
                    grid.push((cfg.clone(), bundle, seed));
                }
            }
        }
    }

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Error::InvalidConfig(format!("thread pool: {e}")))?;
    let results: Vec<std::result::Result<RunRecord, RunFailure>> = pool.install(|| {
        grid.par_iter()
            .map(|(cfg, bundle, seed)| {
                let result = run_experiment(cfg, bundle, *seed);
                if let Some(dir) = out_dir {
                    let record = match &result {
                        Ok(r) => r,
                        Err(f) => &f.partial,
                    };
                    if let Err(e) = persist(dir, record) {
                        return Err(RunFailure {
                            error: e,
                            partial: record.clone(),
                        });
                    }
                }
                result
            })
            .collect()
    });

    let mut records = Vec::new();
    let mut failures = Vec::new();
    for r in results {
        match r {
            Ok(rec) => records.push(rec),
            Err(f) => failures.push(f),
        }
    }
    let (auc, fac) = summarize_records(&records, spec.deltas)?;
    if let Some(dir) = out_dir {
        write_text(&dir.join("summary_auc.tsv"), &auc.to_tsv())?;
        write_text(&dir.join("summary_fac.tsv"), &fac.to_tsv())?;
    }
    Ok(SuiteOutcome {
        auc,
        fac,
        records,
        failures,
    })
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    write_atomic(path, |w| Ok(w.write_all(text.as_bytes())?))
}

/// AUC and FAC tables over the complete records; incomplete ones are skipped.
pub fn summarize_records(records: &[RunRecord], deltas: bool) -> Result<(BenchmarkTable, BenchmarkTable)> {
    let summaries: Vec<RunSummary> = records
        .iter()
        .filter(|r| r.is_complete())
        .map(RunRecord::summary)
        .collect::<Result<_>>()?;
    Ok((
        aggregate(&summaries, SummaryStat::Auc, deltas)?,
        aggregate(&summaries, SummaryStat::Fac, deltas)?,
    ))
}

/// All records below `dir`, sorted by path. Timing sidecars are skipped.
pub fn collect_records(dir: &Path) -> Result<Vec<(PathBuf, LoadedRecord)>> {
    let mut paths = Vec::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for entry in fs::read_dir(&d)? {
            let path = entry?.path();
            if path.is_dir() {
                stack.push(path);
            } else {
                let name = path.file_name().and_then(|n| n.to_str()).unwrap_or("");
                if name.ends_with(".jsonl") && !name.ends_with(".timings.jsonl") {
                    paths.push(path);
                }
            }
        }
    }
    paths.sort();
    paths
        .into_iter()
        .map(|p| {
            let loaded = read_record(&p).map_err(|e| match e {
                Error::Parse {
                    line,
                    last_complete_cycle,
                    msg,
                } => Error::Parse {
                    line,
                    last_complete_cycle,
                    msg: format!("{}: {msg}", p.display()),
                },
                other => other,
            })?;
            Ok((p, loaded))
        })
        .collect()
}

/// Learning-curve points as TSV for plotting.
pub fn write_curves(records: &[RunRecord], path: &Path) -> Result<()> {
    let mut out = String::from("config\tdataset\tstrategy\tseed\tcycle\tlabeled\tscore\n");
    for r in records {
        let h = &r.header;
        for c in &r.cycles {
            let _ = writeln!(
                out,
                "{}\t{}\t{}\t{}\t{}\t{}\t{}",
                h.config_id, h.dataset, h.strategy, h.seed, c.cycle, c.labeled, c.score
            );
        }
    }
    write_text(path, &out)
}
