//! Per-run records, stored as JSON lines: one header line, then one line
//! per cycle. Wall-clock timings go to a sidecar file so the record itself
//! is a pure function of the run's inputs.

use std::collections::BTreeSet;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::featureio::write_atomic;
use crate::metrics::{CurvePoint, LearningCurve, MetricKind, RunSummary};

pub const ENGINE_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecordHeader {
    pub dataset: String,
    pub strategy: String,
    pub seed: u64,
    pub config_id: String,
    pub config_hash: String,
    pub engine_version: String,
    pub init_size: usize,
    pub query_size: usize,
    pub budget: usize,
    pub metric: MetricKind,
    /// Initial labeled pool (train indices).
    pub initial: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CycleEntry {
    pub cycle: usize,
    /// Train indices queried in this cycle; empty for cycle 0.
    pub queried: Vec<usize>,
    pub labeled: usize,
    pub score: f64,
    pub metric: MetricKind,
    /// Mean cross-entropy on the labeled pool after training; absent when
    /// the labeled pool is empty.
    pub train_loss: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CycleTiming {
    pub cycle: usize,
    pub train_secs: f64,
    pub query_secs: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub header: RecordHeader,
    pub cycles: Vec<CycleEntry>,
    /// Not part of the serialized record; see [`write_timings`].
    pub timings: Vec<CycleTiming>,
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum Line {
    Header(RecordHeader),
    Cycle(CycleEntry),
}

#[derive(Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum LineRef<'a> {
    Header(&'a RecordHeader),
    Cycle(&'a CycleEntry),
}

impl RunRecord {
    /// Canonical serialized form.
    pub fn to_jsonl(&self) -> String {
        let mut out = serde_json::to_string(&LineRef::Header(&self.header)).expect("header serializes");
        out.push('\n');
        for c in &self.cycles {
            out.push_str(&serde_json::to_string(&LineRef::Cycle(c)).expect("cycle serializes"));
            out.push('\n');
        }
        out
    }

    pub fn final_labeled(&self) -> usize {
        self.cycles.last().map_or(self.header.initial.len(), |c| c.labeled)
    }

    pub fn is_complete(&self) -> bool {
        self.final_labeled() == self.header.budget
    }

    pub fn curve(&self) -> Result<LearningCurve> {
        LearningCurve::new(
            self.cycles
                .iter()
                .map(|c| CurvePoint {
                    labeled: c.labeled,
                    score: c.score,
                })
                .collect(),
        )
    }

    pub fn summary(&self) -> Result<RunSummary> {
        RunSummary::from_curve(
            self.header.strategy.clone(),
            self.header.dataset.clone(),
            self.header.seed,
            self.header.config_id.clone(),
            self.curve()?,
        )
    }

    /// Contiguous cycles, disjoint queries outside the initial pool and
    /// labeled counts that add up.
    pub fn check_invariants(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidInput(format!("record: {m}")));
        let mut seen: BTreeSet<usize> = self.header.initial.iter().copied().collect();
        if seen.len() != self.header.initial.len() {
            return bad("duplicate index in initial pool".into());
        }
        for (i, c) in self.cycles.iter().enumerate() {
            if c.cycle != i {
                return bad(format!("cycle {} at position {i}", c.cycle));
            }
            for &q in &c.queried {
                if !seen.insert(q) {
                    return bad(format!("index {q} queried twice"));
                }
            }
            if c.labeled != seen.len() {
                return bad(format!("cycle {i} reports {} labeled, expected {}", c.labeled, seen.len()));
            }
        }
        Ok(())
    }
}

/// A record read back from disk.
#[derive(Debug, Clone, PartialEq)]
pub struct LoadedRecord {
    pub record: RunRecord,
    /// Written by a different engine version.
    pub version_mismatch: bool,
}

pub fn parse_record(text: &str) -> Result<LoadedRecord> {
    let mut header = None;
    let mut cycles: Vec<CycleEntry> = Vec::new();
    let last = |cycles: &[CycleEntry]| cycles.last().map(|c| c.cycle);
    for (i, raw) in text.split_inclusive('\n').enumerate() {
        let line_no = i + 1;
        let parse_err = |msg: String, cycles: &[CycleEntry]| Error::Parse {
            line: line_no,
            last_complete_cycle: last(cycles),
            msg,
        };
        if !raw.ends_with('\n') {
            return Err(parse_err("unterminated final line (truncated record)".into(), &cycles));
        }
        let line: Line = serde_json::from_str(raw.trim_end())
            .map_err(|e| parse_err(e.to_string(), &cycles))?;
        match (line, &header) {
            (Line::Header(h), None) if line_no == 1 => header = Some(h),
            (Line::Header(_), _) => return Err(parse_err("unexpected header line".into(), &cycles)),
            (Line::Cycle(_), None) => return Err(parse_err("missing header line".into(), &cycles)),
            (Line::Cycle(c), Some(_)) => {
                if c.cycle != cycles.len() {
                    return Err(parse_err(
                        format!("cycle {} out of sequence, expected {}", c.cycle, cycles.len()),
                        &cycles,
                    ));
                }
                cycles.push(c);
            }
        }
    }
    let header = header.ok_or(Error::Parse {
        line: 1,
        last_complete_cycle: None,
        msg: "empty record".into(),
    })?;
    let version_mismatch = header.engine_version != ENGINE_VERSION;
    Ok(LoadedRecord {
        record: RunRecord {
            header,
            cycles,
            timings: Vec::new(),
        },
        version_mismatch,
    })
}

pub fn write_record(record: &RunRecord, path: &Path) -> Result<()> {
    let text = record.to_jsonl();
    write_atomic(path, |w| Ok(w.write_all(text.as_bytes())?))
}

pub fn read_record(path: &Path) -> Result<LoadedRecord> {
    parse_record(&fs::read_to_string(path)?)
}

/// Sidecar path holding the timings of the record at `path`.
pub fn timings_path(path: &Path) -> PathBuf {
    let mut name = path.file_stem().unwrap_or_default().to_os_string();
    name.push(".timings.jsonl");
    path.with_file_name(name)
}

pub fn write_timings(record: &RunRecord, path: &Path) -> Result<()> {
    let mut text = String::new();
    for t in &record.timings {
        text.push_str(&serde_json::to_string(t).expect("timing serializes"));
        text.push('\n');
    }
    write_atomic(path, |w| Ok(w.write_all(text.as_bytes())?))
}
