//! Simulation report and its three serializations.
//!
//! Table and CSV share one column layout, one row per round:
//!
//! ```text
//! round, submissions, rejected, finalized, blacklisted,
//! score_<product>, abs_error_<product>   (for each product, config order)
//! mean_trust_<Strategy>                  (for each strategy present)
//! ```
//!
//! Unrated products leave `score_*` and `abs_error_*` empty in CSV and print
//! `-` in the table.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::SimError;

use super::config::ProductSpec;
use super::drift::BatchScore;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProductSnapshot {
    pub product_id: String,
    pub score: Option<f64>,
    pub abs_error: Option<f64>,
    pub rating_count: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoundSnapshot {
    pub round: u32,
    pub submissions: u64,
    pub rejected: u64,
    pub finalized: u64,
    pub blacklisted: u64,
    pub products: Vec<ProductSnapshot>,
    /// Mean trust degree per strategy name.
    pub mean_trust: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DriftFigure {
    pub product_id: String,
    pub incremental: Option<f64>,
    pub batch_forward: Option<f64>,
    pub batch_retroactive: Option<f64>,
    pub drift: Option<f64>,
}

impl DriftFigure {
    pub fn new(incremental: Option<f64>, batch: &BatchScore) -> Self {
        Self {
            product_id: batch.product_id.clone(),
            incremental,
            batch_forward: batch.forward,
            batch_retroactive: batch.retroactive,
            drift: batch.drift(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    /// Honest mean trust minus the highest adversarial group mean.
    pub separation: Option<f64>,
    pub drift: Vec<DriftFigure>,
    pub max_drift: f64,
    /// Likes cast on contradictory feedbacks; each one floors the voter.
    pub contradictory_likes: u64,
    pub journal_records: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationReport {
    pub rng_seed: u64,
    pub products: Vec<ProductSpec>,
    pub strategies: Vec<String>,
    pub initial: RoundSnapshot,
    pub rounds: Vec<RoundSnapshot>,
    pub summary: Summary,
}

impl SimulationReport {
    pub fn last(&self) -> &RoundSnapshot {
        self.rounds.last().unwrap_or(&self.initial)
    }

    pub fn final_score(&self, product_id: &str) -> Option<f64> {
        self.last()
            .products
            .iter()
            .find(|p| p.product_id == product_id)
            .and_then(|p| p.score)
    }

    pub fn final_mean_trust(&self, strategy: &str) -> Option<f64> {
        self.last().mean_trust.get(strategy).copied()
    }

    fn columns(&self) -> Vec<String> {
        let mut cols: Vec<String> = [
            "round",
            "submissions",
            "rejected",
            "finalized",
            "blacklisted",
        ]
        .iter()
        .map(|s| s.to_string())
        .collect();
        for p in &self.products {
            cols.push(format!("score_{}", p.product_id));
            cols.push(format!("abs_error_{}", p.product_id));
        }
        for s in &self.strategies {
            cols.push(format!("mean_trust_{s}"));
        }
        cols
    }

    fn cells(&self, row: &RoundSnapshot, missing: &str) -> Vec<String> {
        let opt = |v: Option<f64>| v.map_or_else(|| missing.to_string(), |x| format!("{x:.6}"));
        let mut cells = vec![
            row.round.to_string(),
            row.submissions.to_string(),
            row.rejected.to_string(),
            row.finalized.to_string(),
            row.blacklisted.to_string(),
        ];
        for product in &self.products {
            let snap = row
                .products
                .iter()
                .find(|p| p.product_id == product.product_id);
            cells.push(opt(snap.and_then(|p| p.score)));
            cells.push(opt(snap.and_then(|p| p.abs_error)));
        }
        for s in &self.strategies {
            cells.push(opt(row.mean_trust.get(s).copied()));
        }
        cells
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Table,
    Csv,
    Json,
}

impl FromStr for ReportFormat {
    type Err = SimError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "table" => Ok(ReportFormat::Table),
            "csv" => Ok(ReportFormat::Csv),
            "json" => Ok(ReportFormat::Json),
            other => Err(SimError::UnknownFormat(other.to_string())),
        }
    }
}

pub fn emit_report(report: &SimulationReport, format: ReportFormat) -> Result<String, SimError> {
    match format {
        ReportFormat::Json => serde_json::to_string_pretty(report)
            .map(|mut s| {
                s.push('\n');
                s
            })
            .map_err(|e| SimError::Parse(e.to_string())),
        ReportFormat::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            let io_err = |e: csv::Error| SimError::Parse(e.to_string());
            w.write_record(report.columns()).map_err(io_err)?;
            for row in &report.rounds {
                w.write_record(report.cells(row, "")).map_err(io_err)?;
            }
            let bytes = w.into_inner().map_err(|e| SimError::Parse(e.to_string()))?;
            Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
        }
        ReportFormat::Table => {
            let header = report.columns();
            let rows: Vec<Vec<String>> =
                report.rounds.iter().map(|r| report.cells(r, "-")).collect();
            let widths: Vec<usize> = header
                .iter()
                .enumerate()
                .map(|(i, h)| {
                    rows.iter()
                        .map(|r| r[i].len())
                        .chain([h.len()])
                        .max()
                        .unwrap_or(0)
                })
                .collect();
            let mut out = String::new();
            let mut line = |cells: &[String]| {
                let joined: Vec<String> = cells
                    .iter()
                    .zip(&widths)
                    .map(|(c, w)| format!("{c:>w$}"))
                    .collect();
                let _ = writeln!(out, "{}", joined.join("  ").trim_end());
            };
            line(&header);
            for r in &rows {
                line(r);
            }
            Ok(out)
        }
    }
}
