//! Classification metrics and result tables.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Probabilities are clipped to `[CLIP, 1 - CLIP]` before taking logs.
pub const PROBABILITY_CLIP: f64 = 1e-7;

/// `-(y ln p + (1 - y) ln(1 - p))` with `p` clipped.
pub fn binary_cross_entropy(probability_class1: f64, label: u32) -> f64 {
    let p = probability_class1.clamp(PROBABILITY_CLIP, 1.0 - PROBABILITY_CLIP);
    if label == 1 {
        -p.ln()
    } else {
        -(1.0 - p).ln()
    }
}

fn check_lengths(predictions: &[u32], labels: &[u32]) -> Result<()> {
    if predictions.len() != labels.len() {
        return Err(Error::LengthMismatch { expected: labels.len(), actual: predictions.len() });
    }
    if labels.is_empty() {
        return Err(Error::Empty("no predictions to score".into()));
    }
    Ok(())
}

pub fn accuracy(predictions: &[u32], labels: &[u32]) -> Result<f64> {
    check_lengths(predictions, labels)?;
    let hits = predictions.iter().zip(labels).filter(|(p, y)| p == y).count();
    Ok(hits as f64 / labels.len() as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ConfusionCounts {
    pub tp: usize,
    pub fp: usize,
    pub tn: usize,
    pub fn_: usize,
}

impl ConfusionCounts {
    /// Counts with respect to `positive` as the positive class.
    pub fn new(predictions: &[u32], labels: &[u32], positive: u32) -> Result<Self> {
        if predictions.len() != labels.len() {
            return Err(Error::LengthMismatch { expected: labels.len(), actual: predictions.len() });
        }
        let mut counts = Self::default();
        for (&p, &y) in predictions.iter().zip(labels) {
            match (p == positive, y == positive) {
                (true, true) => counts.tp += 1,
                (true, false) => counts.fp += 1,
                (false, true) => counts.fn_ += 1,
                (false, false) => counts.tn += 1,
            }
        }
        Ok(counts)
    }

    pub fn total(&self) -> usize {
        self.tp + self.fp + self.tn + self.fn_
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ClassMetrics {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

impl ClassMetrics {
    /// Undefined ratios are reported as 0.
    pub fn from_counts(c: &ConfusionCounts) -> Self {
        let ratio = |num: usize, den: usize| if den == 0 { 0.0 } else { num as f64 / den as f64 };
        let precision = ratio(c.tp, c.tp + c.fp);
        let recall = ratio(c.tp, c.tp + c.fn_);
        let f1 = if precision + recall == 0.0 {
            0.0
        } else {
            2.0 * precision * recall / (precision + recall)
        };
        Self { precision, recall, f1 }
    }
}

/// Precision/recall/F1 for class 0 and class 1.
pub fn class_report(predictions: &[u32], labels: &[u32]) -> Result<[ClassMetrics; 2]> {
    if predictions.len() != labels.len() {
        return Err(Error::LengthMismatch { expected: labels.len(), actual: predictions.len() });
    }
    if let Some(bad) = labels.iter().chain(predictions).find(|&&v| v > 1) {
        return Err(Error::Dataset(format!("class report needs binary labels, found {bad}")));
    }
    let per_class = |c| ConfusionCounts::new(predictions, labels, c).map(|n| ClassMetrics::from_counts(&n));
    Ok([per_class(0)?, per_class(1)?])
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AccuracyRecord {
    pub dataset: String,
    pub method: String,
    pub split: String,
    pub accuracy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassRecord {
    pub dataset: String,
    pub method: String,
    pub class: u32,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

fn to_csv<T: Serialize>(records: &[T], header: &[&str]) -> String {
    let mut writer = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
    writer.write_record(header).expect("in-memory write");
    for r in records {
        writer.serialize(r).expect("in-memory write");
    }
    String::from_utf8(writer.into_inner().expect("in-memory flush")).expect("csv is utf-8")
}

/// `dataset,method,split,accuracy` at full precision.
pub fn accuracy_csv(records: &[AccuracyRecord]) -> String {
    to_csv(records, &["dataset", "method", "split", "accuracy"])
}

/// `dataset,method,class,precision,recall,f1` at full precision.
pub fn class_csv(records: &[ClassRecord]) -> String {
    to_csv(records, &["dataset", "method", "class", "precision", "recall", "f1"])
}

pub fn read_accuracy_csv(path: &Path) -> Result<Vec<AccuracyRecord>> {
    let csv_err = |source| Error::Csv { path: path.to_path_buf(), source };
    let mut reader = csv::Reader::from_path(path).map_err(csv_err)?;
    reader.deserialize().map(|r| r.map_err(csv_err)).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct TableRow {
    pub dataset: String,
    pub values: Vec<Option<f64>>,
}

/// Markdown table with datasets as rows and methods as columns. Values are
/// fractions rendered as percentages with one decimal; missing cells print `-`.
pub fn render_results_table(methods: &[String], rows: &[TableRow]) -> Result<String> {
    let mut out = String::from("| Dataset |");
    for m in methods {
        let _ = write!(out, " {m} |");
    }
    out.push_str("\n|---|");
    out.push_str(&"---|".repeat(methods.len()));
    out.push('\n');
    for row in rows {
        if row.values.len() != methods.len() {
            return Err(Error::LengthMismatch { expected: methods.len(), actual: row.values.len() });
        }
        let _ = write!(out, "| {} |", row.dataset);
        for v in &row.values {
            match v {
                Some(v) => {
                    let _ = write!(out, " {:.1}% |", v * 100.0);
                }
                None => out.push_str(" - |"),
            }
        }
        out.push('\n');
    }
    Ok(out)
}

/// Pivots the records of one split into table form, keeping first-seen order
/// of datasets and methods.
pub fn pivot_accuracy(records: &[AccuracyRecord], split: &str) -> (Vec<String>, Vec<TableRow>) {
    let selected: Vec<&AccuracyRecord> = records.iter().filter(|r| r.split == split).collect();
    let mut methods: Vec<String> = Vec::new();
    let mut datasets: Vec<String> = Vec::new();
    for r in &selected {
        if !methods.contains(&r.method) {
            methods.push(r.method.clone());
        }
        if !datasets.contains(&r.dataset) {
            datasets.push(r.dataset.clone());
        }
    }
    let rows = datasets
        .into_iter()
        .map(|dataset| {
            let values = methods
                .iter()
                .map(|m| {
                    selected
                        .iter()
                        .rev()
                        .find(|r| r.dataset == dataset && &r.method == m)
                        .map(|r| r.accuracy)
                })
                .collect();
            TableRow { dataset, values }
        })
        .collect();
    (methods, rows)
}
