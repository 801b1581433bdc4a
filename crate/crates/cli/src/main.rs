//! `dalh`: command-line front end of the active learning harness.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use dalharness::featureio::{save_bundle, synth_blobs, BlobSpec, Manifest};
use dalharness::rng::{substream, Purpose};
use dalharness::runner::{
    collect_records, record_path, run_experiment, run_suite, summarize_records, timings_path,
    write_curves, write_record, write_timings, DalConfig, RunRecord, SuiteSpec, OUTPUT_DIR_ENV,
};
use dalharness::strategies::StrategyKind;

#[derive(Parser)]
#[command(name = "dalh", version, about = "Pool-based deep active learning harness")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a synthetic Gaussian-blob bundle and register it in the manifest.
    Synth {
        /// Directory for the feature files and `manifest.toml`.
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        name: String,
        #[arg(long, default_value_t = 5000)]
        n_train: usize,
        #[arg(long, default_value_t = 1000)]
        n_test: usize,
        #[arg(long, default_value_t = 16)]
        dim: usize,
        /// Class proportions, comma separated; non-uniform marks the set imbalanced.
        #[arg(long, value_delimiter = ',', default_value = "0.5,0.5")]
        weights: Vec<f64>,
        #[arg(long, default_value_t = 0.5)]
        spread: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Run one experiment and write its record.
    Run {
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long)]
        dataset: String,
        /// Overrides the strategy of the config file.
        #[arg(long)]
        strategy: Option<StrategyKind>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Config file; defaults apply to every key it leaves out.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, env = OUTPUT_DIR_ENV, default_value = "out")]
        out: PathBuf,
    },
    /// Run a config × strategy × dataset × seed grid and write summary tables.
    Suite {
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long)]
        config: PathBuf,
        /// Parallel runs; results do not depend on it.
        #[arg(long, default_value_t = default_jobs())]
        jobs: usize,
        #[arg(long, env = OUTPUT_DIR_ENV, default_value = "out")]
        out: PathBuf,
    },
    /// Aggregate a directory of records into AUC/FAC tables and curve data.
    Summarize {
        records: PathBuf,
        /// Where to write the tables; defaults to the records directory.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Skip the improvement-over-random column.
        #[arg(long)]
        no_deltas: bool,
    },
}

fn default_jobs() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Synth {
            out,
            name,
            n_train,
            n_test,
            dim,
            weights,
            spread,
            seed,
        } => synth(&out, &name, n_train, n_test, dim, weights, spread, seed),
        Command::Run {
            manifest,
            dataset,
            strategy,
            seed,
            config,
            out,
        } => run(&manifest, &dataset, strategy, seed, config.as_deref(), &out),
        Command::Suite {
            manifest,
            config,
            jobs,
            out,
        } => suite(&manifest, &config, jobs, &out),
        Command::Summarize {
            records,
            out,
            no_deltas,
        } => summarize(&records, out.as_deref().unwrap_or(&records), !no_deltas),
    }
}

#[allow(clippy::too_many_arguments)]
fn synth(
    out: &Path,
    name: &str,
    n_train: usize,
    n_test: usize,
    dim: usize,
    weights: Vec<f64>,
    spread: f64,
    seed: u64,
) -> Result<()> {
    let spec = BlobSpec {
        n_train,
        n_test,
        dim,
        class_weights: weights,
        cluster_spread: spread,
    };
    let bundle = synth_blobs(name, &spec, &mut substream(seed, 0, Purpose::Synth))?;
    fs::create_dir_all(out)?;
    let manifest_path = out.join("manifest.toml");
    let mut manifest = if manifest_path.exists() {
        Manifest::load(&manifest_path)?
    } else {
        Manifest::default()
    };
    manifest.upsert(save_bundle(&bundle, out)?);
    manifest.save(&manifest_path)?;
    println!(
        "wrote {name}: {n_train} train / {n_test} test, {} classes, imbalanced = {}",
        bundle.num_classes, bundle.imbalanced
    );
    Ok(())
}

fn persist(out: &Path, record: &RunRecord) -> Result<PathBuf> {
    let path = record_path(out, record);
    write_record(record, &path)?;
    write_timings(record, &timings_path(&path))?;
    Ok(path)
}

fn run(
    manifest: &Path,
    dataset: &str,
    strategy: Option<StrategyKind>,
    seed: u64,
    config: Option<&Path>,
    out: &Path,
) -> Result<()> {
    let mut cfg = match config {
        Some(p) => DalConfig::from_toml(
            &fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?,
        )?,
        None => DalConfig::default(),
    };
    if let Some(s) = strategy {
        cfg.strategy = s;
        cfg.validate()?;
    }
    let bundle = Manifest::load(manifest)?.load_bundle(dataset)?;
    match run_experiment(&cfg, &bundle, seed) {
        Ok(record) => {
            let path = persist(out, &record)?;
            let summary = record.summary()?;
            println!(
                "{}: auc {:.4} fac {:.4} -> {}",
                record.header.strategy,
                summary.auc,
                summary.fac,
                path.display()
            );
            Ok(())
        }
        Err(failure) => {
            let path = persist(out, &failure.partial)?;
            bail!("{failure} (partial record at {})", path.display())
        }
    }
}

fn suite(manifest: &Path, config: &Path, jobs: usize, out: &Path) -> Result<()> {
    if jobs == 0 {
        bail!("--jobs must be at least 1");
    }
    let spec = SuiteSpec::from_toml(
        &fs::read_to_string(config).with_context(|| format!("reading {}", config.display()))?,
    )?;
    let manifest = Manifest::load(manifest)?;
    let outcome = run_suite(&manifest, &spec, jobs, Some(out))?;
    write_curves(&outcome.records, &out.join("curves.tsv"))?;
    print!("{}", outcome.auc.to_tsv());
    for f in &outcome.failures {
        eprintln!("failed: {f}");
    }
    eprintln!(
        "{} runs finished, {} failed; tables in {}",
        outcome.records.len(),
        outcome.failures.len(),
        out.display()
    );
    if !outcome.failures.is_empty() {
        bail!("{} runs failed", outcome.failures.len());
    }
    Ok(())
}

fn summarize(records_dir: &Path, out: &Path, deltas: bool) -> Result<()> {
    let loaded = collect_records(records_dir)?;
    if loaded.is_empty() {
        bail!("no records found below {}", records_dir.display());
    }
    let mut records = Vec::with_capacity(loaded.len());
    for (path, l) in loaded {
        if l.version_mismatch {
            eprintln!(
                "warning: {} was written by engine {}",
                path.display(),
                l.record.header.engine_version
            );
        }
        if !l.record.is_complete() {
            eprintln!("skipping incomplete record {}", path.display());
            continue;
        }
        records.push(l.record);
    }
    let (auc, fac) = summarize_records(&records, deltas)?;
    fs::create_dir_all(out)?;
    fs::write(out.join("summary_auc.tsv"), auc.to_tsv())?;
    fs::write(out.join("summary_fac.tsv"), fac.to_tsv())?;
    write_curves(&records, &out.join("curves.tsv"))?;
    print!("{}", auc.to_tsv());
    Ok(())
}
