//! Test metrics, learning curves and benchmark aggregation.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Which test metric a dataset is scored with.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MetricKind {
    Accuracy,
    BalancedAccuracy,
}

impl MetricKind {
    pub fn for_dataset(imbalanced: bool) -> Self {
        if imbalanced {
            MetricKind::BalancedAccuracy
        } else {
            MetricKind::Accuracy
        }
    }

    pub fn score(self, pred: &[u32], truth: &[u32], num_classes: u32) -> Result<f64> {
        match self {
            MetricKind::Accuracy => accuracy(pred, truth),
            MetricKind::BalancedAccuracy => balanced_accuracy(pred, truth, num_classes),
        }
    }
}

fn check_pair(pred: &[u32], truth: &[u32]) -> Result<()> {
    if truth.is_empty() {
        return Err(Error::UndefinedMetric("no test instances".into()));
    }
    if pred.len() != truth.len() {
        return Err(Error::DimensionMismatch {
            expected: truth.len(),
            found: pred.len(),
        });
    }
    Ok(())
}

pub fn accuracy(pred: &[u32], truth: &[u32]) -> Result<f64> {
    check_pair(pred, truth)?;
    let correct = pred.iter().zip(truth).filter(|(p, t)| p == t).count();
    Ok(correct as f64 / truth.len() as f64)
}

/// Mean per-class recall over the classes present in `truth`.
pub fn balanced_accuracy(pred: &[u32], truth: &[u32], num_classes: u32) -> Result<f64> {
    check_pair(pred, truth)?;
    let c = num_classes as usize;
    let mut support = vec![0usize; c];
    let mut hits = vec![0usize; c];
    for (position, (&p, &t)) in pred.iter().zip(truth).enumerate() {
        if t >= num_classes {
            return Err(Error::LabelRange {
                position,
                label: t,
                classes: num_classes,
            });
        }
        support[t as usize] += 1;
        if p == t {
            hits[t as usize] += 1;
        }
    }
    let (sum, present) = support
        .iter()
        .zip(&hits)
        .filter(|(&s, _)| s > 0)
        .fold((0.0, 0usize), |(sum, n), (&s, &h)| {
            (sum + h as f64 / s as f64, n + 1)
        });
    Ok(sum / present as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub labeled: usize,
    pub score: f64,
}

/// Test score after each cycle, starting with the cycle-0 model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LearningCurve {
    points: Vec<CurvePoint>,
}

impl LearningCurve {
    pub fn new(points: Vec<CurvePoint>) -> Result<Self> {
        if points.windows(2).any(|w| w[1].labeled <= w[0].labeled) {
            return Err(Error::InvalidInput(
                "learning curve labeled counts must strictly increase".into(),
            ));
        }
        Ok(LearningCurve { points })
    }

    /// Curve over uniformly spaced labeled counts; convenient for scores only.
    pub fn from_scores(scores: &[f64]) -> Self {
        LearningCurve {
            points: scores
                .iter()
                .enumerate()
                .map(|(i, &score)| CurvePoint { labeled: i, score })
                .collect(),
        }
    }

    pub fn points(&self) -> &[CurvePoint] {
        &self.points
    }

    pub fn scores(&self) -> impl Iterator<Item = f64> + '_ {
        self.points.iter().map(|p| p.score)
    }

    pub fn cycles(&self) -> usize {
        self.points.len().saturating_sub(1)
    }
}

/// Trapezoidal area under the curve over the cycle index, divided by the
/// number of cycles. A constant curve maps to its own value.
pub fn normalized_auc(curve: &LearningCurve) -> Result<f64> {
    let s: Vec<f64> = curve.scores().collect();
    if s.len() < 2 {
        return Err(Error::UndefinedMetric(
            "area under the curve needs at least one cycle".into(),
        ));
    }
    // Integrate relative to the first score so constant curves are exact.
    let base = s[0];
    let area: f64 = s
        .windows(2)
        .map(|w| ((w[0] - base) + (w[1] - base)) / 2.0)
        .sum();
    Ok(base + area / (s.len() - 1) as f64)
}

/// Final score of the curve.
pub fn fac(curve: &LearningCurve) -> Result<f64> {
    curve
        .points
        .last()
        .map(|p| p.score)
        .ok_or_else(|| Error::UndefinedMetric("empty learning curve".into()))
}

/// One finished run reduced to its headline numbers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub strategy: String,
    pub dataset: String,
    pub seed: u64,
    pub config_id: String,
    pub auc: f64,
    pub fac: f64,
    pub curve: LearningCurve,
}

impl RunSummary {
    pub fn from_curve(
        strategy: impl Into<String>,
        dataset: impl Into<String>,
        seed: u64,
        config_id: impl Into<String>,
        curve: LearningCurve,
    ) -> Result<Self> {
        Ok(RunSummary {
            strategy: strategy.into(),
            dataset: dataset.into(),
            seed,
            config_id: config_id.into(),
            auc: normalized_auc(&curve)?,
            fac: fac(&curve)?,
            curve,
        })
    }

    pub fn value(&self, stat: SummaryStat) -> f64 {
        match stat {
            SummaryStat::Auc => self.auc,
            SummaryStat::Fac => self.fac,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SummaryStat {
    Auc,
    Fac,
}

impl SummaryStat {
    pub fn name(self) -> &'static str {
        match self {
            SummaryStat::Auc => "auc",
            SummaryStat::Fac => "fac",
        }
    }
}

/// Mean and sample standard deviation over seeds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Cell {
    pub mean: f64,
    /// `None` with a single seed.
    pub std: Option<f64>,
    pub seeds: usize,
}

impl Cell {
    pub fn from_values(values: &[f64]) -> Option<Cell> {
        if values.is_empty() {
            return None;
        }
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let std = (values.len() > 1).then(|| {
            let ss: f64 = values.iter().map(|v| (v - mean) * (v - mean)).sum();
            (ss / (n - 1.0)).sqrt()
        });
        Some(Cell {
            mean,
            std,
            seeds: values.len(),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableRow {
    pub strategy: String,
    pub config_id: String,
    /// One entry per dataset of the table, `None` when no run finished.
    pub cells: Vec<Option<Cell>>,
    /// Equal-weight mean of the per-dataset means; `None` if a cell is missing.
    pub average: Option<f64>,
    /// Average minus the random baseline's average for the same config.
    pub delta: Option<f64>,
    /// 1-based placement within the config.
    pub rank: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkTable {
    pub stat: SummaryStat,
    pub datasets: Vec<String>,
    pub rows: Vec<TableRow>,
}

pub const BASELINE_STRATEGY: &str = "random";

/// Groups summaries into per-(strategy, config) rows with per-dataset cells.
///
/// Rows are ranked within each config by descending average (ties and
/// incomplete rows ordered by strategy name). With `deltas`, every config
/// must contain a random-baseline row.
pub fn aggregate(summaries: &[RunSummary], stat: SummaryStat, deltas: bool) -> Result<BenchmarkTable> {
    let datasets: Vec<String> = summaries
        .iter()
        .map(|s| s.dataset.clone())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();

    // (config, strategy) -> dataset -> values sorted for order independence
    let mut groups: BTreeMap<(&str, &str), BTreeMap<&str, Vec<f64>>> = BTreeMap::new();
    for s in summaries {
        groups
            .entry((s.config_id.as_str(), s.strategy.as_str()))
            .or_default()
            .entry(s.dataset.as_str())
            .or_default()
            .push(s.value(stat));
    }

    let mut rows = Vec::new();
    for ((config, strategy), per_dataset) in &groups {
        let cells: Vec<Option<Cell>> = datasets
            .iter()
            .map(|d| {
                per_dataset.get(d.as_str()).and_then(|v| {
                    let mut v = v.clone();
                    v.sort_by(f64::total_cmp);
                    Cell::from_values(&v)
                })
            })
            .collect();
        let average = cells
            .iter()
            .map(|c| c.map(|c| c.mean))
            .collect::<Option<Vec<f64>>>()
            .map(|means| means.iter().sum::<f64>() / means.len() as f64);
        rows.push(TableRow {
            strategy: strategy.to_string(),
            config_id: config.to_string(),
            cells,
            average,
            delta: None,
            rank: 0,
        });
    }

    let configs: BTreeSet<String> = rows.iter().map(|r| r.config_id.clone()).collect();
    for config in &configs {
        let baseline = rows
            .iter()
            .find(|r| &r.config_id == config && r.strategy == BASELINE_STRATEGY);
        if deltas && baseline.is_none() {
            return Err(Error::IncompleteSuite(format!(
                "config {config:?} has no {BASELINE_STRATEGY} baseline for deltas"
            )));
        }
        let base_avg = baseline.and_then(|r| r.average);

        let mut members: Vec<usize> = (0..rows.len())
            .filter(|&i| &rows[i].config_id == config)
            .collect();
        members.sort_by(|&a, &b| {
            let (ra, rb) = (&rows[a], &rows[b]);
            match (ra.average, rb.average) {
                (Some(x), Some(y)) => y.total_cmp(&x),
                (Some(_), None) => std::cmp::Ordering::Less,
                (None, Some(_)) => std::cmp::Ordering::Greater,
                (None, None) => std::cmp::Ordering::Equal,
            }
            .then_with(|| ra.strategy.cmp(&rb.strategy))
        });
        for (place, &i) in members.iter().enumerate() {
            rows[i].rank = place + 1;
            if deltas {
                rows[i].delta = match (rows[i].average, base_avg) {
                    (Some(a), Some(b)) => Some(a - b),
                    _ => None,
                };
            }
        }
    }

    rows.sort_by(|a, b| {
        a.config_id
            .cmp(&b.config_id)
            .then(a.rank.cmp(&b.rank))
    });
    Ok(BenchmarkTable {
        stat,
        datasets,
        rows,
    })
}

/// Scores are shown ×100 with two decimals.
fn pct(v: f64) -> String {
    format!("{:.2}", 100.0 * v)
}

impl BenchmarkTable {
    pub fn row(&self, strategy: &str, config_id: &str) -> Option<&TableRow> {
        self.rows
            .iter()
            .find(|r| r.strategy == strategy && r.config_id == config_id)
    }

    /// Tab-separated rendering: one row per (strategy, config), columns per
    /// dataset then `Average`, `Delta` and `Rank`. Missing values print as `NA`.
    pub fn to_tsv(&self) -> String {
        let mut out = String::from("strategy\tconfig");
        for d in &self.datasets {
            out.push('\t');
            out.push_str(d);
        }
        out.push_str("\tAverage\tDelta\tRank\n");
        for r in &self.rows {
            let _ = write!(out, "{}\t{}", r.strategy, r.config_id);
            for c in &r.cells {
                out.push('\t');
                match c {
                    Some(Cell { mean, std: Some(s), .. }) => {
                        let _ = write!(out, "{}±{}", pct(*mean), pct(*s));
                    }
                    Some(Cell { mean, std: None, .. }) => out.push_str(&pct(*mean)),
                    None => out.push_str("NA"),
                }
            }
            let avg = r.average.map_or("NA".into(), pct);
            let delta = match (r.strategy.as_str(), r.delta) {
                (BASELINE_STRATEGY, Some(_)) => "baseline".to_string(),
                (_, Some(d)) => format!("{:+.2}", 100.0 * d),
                (_, None) => "NA".to_string(),
            };
            let _ = writeln!(out, "\t{avg}\t{delta}\t{}", r.rank);
        }
        out
    }
}
