//! Tuple counting and the recall/precision ratios.
//!
//! Both ratios divide by the number of gold tuples. Precision therefore counts
//! pertinent tuples against the gold total rather than against the extracted
//! count; the conventional ratio is reported separately as
//! `standard_precision`.

use std::fmt::Write as _;
use std::ops::Add;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::extractor::ExtractionResult;
use crate::page_model::ZoneLabels;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("total number of tuples is zero")]
    ZeroTotal,
}

/// Extracted tuples over gold tuples. May exceed 1 when over-extracting.
pub fn recall(extracted: usize, total: usize) -> Result<f64, EvalError> {
    if total == 0 {
        return Err(EvalError::ZeroTotal);
    }
    Ok(extracted as f64 / total as f64)
}

/// Pertinent extracted tuples over gold tuples.
pub fn precision(pertinent: usize, total: usize) -> Result<f64, EvalError> {
    if total == 0 {
        return Err(EvalError::ZeroTotal);
    }
    Ok(pertinent as f64 / total as f64)
}

/// Pertinent over extracted; 0 when nothing was extracted.
pub fn standard_precision(pertinent: usize, extracted: usize) -> f64 {
    if extracted == 0 {
        0.0
    } else {
        pertinent as f64 / extracted as f64
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TupleCounts {
    pub extracted: usize,
    pub pertinent: usize,
    pub total: usize,
}

impl Add for TupleCounts {
    type Output = TupleCounts;

    fn add(self, rhs: Self) -> Self {
        TupleCounts {
            extracted: self.extracted + rhs.extracted,
            pertinent: self.pertinent + rhs.pertinent,
            total: self.total + rhs.total,
        }
    }
}

/// Count extracted, pertinent and gold tuples for one page.
///
/// A tuple is pertinent when it has at least one attribute and every one of
/// its (name, span) pairs appears in the same gold record. Each gold record
/// vouches for at most one tuple.
pub fn match_tuples(result: &ExtractionResult, gold: &ZoneLabels) -> TupleCounts {
    let mut used = vec![false; gold.records.len()];
    let mut pertinent = 0;
    for tuple in &result.tuples {
        let pairs: Vec<_> = tuple.attribute_spans().collect();
        if pairs.is_empty() {
            continue;
        }
        let owner = gold.attributes.iter().enumerate().position(|(k, attrs)| {
            !used[k]
                && pairs
                    .iter()
                    .all(|(name, span)| attrs.iter().any(|a| a.name == *name && a.span == *span))
        });
        if let Some(k) = owner {
            used[k] = true;
            pertinent += 1;
        }
    }
    TupleCounts { extracted: result.tuples.len(), pertinent, total: gold.records.len() }
}

/// Aggregate scores for one page set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub pages: usize,
    /// Pages where extraction failed; they count as zero extracted tuples.
    pub failed_pages: Vec<String>,
    pub total: usize,
    pub extracted: usize,
    pub pertinent: usize,
    pub recall: f64,
    pub precision: f64,
    pub standard_precision: f64,
    /// Set when more tuples were extracted than exist (recall above 1).
    pub over_extraction: bool,
}

impl EvalReport {
    pub fn from_counts(
        pages: usize,
        failed_pages: Vec<String>,
        counts: TupleCounts,
    ) -> Result<Self, EvalError> {
        Ok(EvalReport {
            pages,
            failed_pages,
            total: counts.total,
            extracted: counts.extracted,
            pertinent: counts.pertinent,
            recall: recall(counts.extracted, counts.total)?,
            precision: precision(counts.pertinent, counts.total)?,
            standard_precision: standard_precision(counts.pertinent, counts.extracted),
            over_extraction: counts.extracted > counts.total,
        })
    }
}

/// Plain-text table with one column per page set.
pub fn render_table(sets: &[(String, EvalReport)]) -> String {
    let label_width = 38;
    let col = sets.iter().map(|(name, _)| name.len()).max().unwrap_or(0).max(8) + 2;
    let mut out = String::new();
    let _ = write!(out, "{:<label_width$}", "Set of Web pages");
    for (name, _) in sets {
        let _ = write!(out, "{name:>col$}");
    }
    out.push('\n');
    type Row = (&'static str, fn(&EvalReport) -> String);
    let rows: [Row; 7] = [
        ("Pages", |r| r.pages.to_string()),
        ("Total number of tuples", |r| r.total.to_string()),
        ("Number of extracted tuples", |r| r.extracted.to_string()),
        ("Number of pertinent tuples extracted", |r| r.pertinent.to_string()),
        ("Recall", |r| format!("{:.3}", r.recall)),
        ("Precision", |r| format!("{:.3}", r.precision)),
        ("Standard precision", |r| format!("{:.3}", r.standard_precision)),
    ];
    for (label, cell) in rows {
        let _ = write!(out, "{label:<label_width$}");
        for (_, report) in sets {
            let _ = write!(out, "{:>col$}", cell(report));
        }
        out.push('\n');
    }
    out
}
