//! Scoring extraction against gold labels.

pub mod baseline;
pub mod corpus;
pub mod metrics;

use std::thread;

use crate::extractor::{extract, ExtractError, ExtractionResult};
use crate::induction::WrapperModel;

pub use baseline::ExactDelimiterWrapper;
pub use corpus::{generate_corpus, AnomalyProfile, AnomalyTally, CorpusError, GoldCorpus, GoldPage};
pub use metrics::{match_tuples, precision, recall, render_table, EvalError, EvalReport, TupleCounts};

/// Anything that turns a page into tuples.
pub trait TupleExtractor: Sync {
    fn extract_page(&self, page_id: &str, html: &str) -> Result<ExtractionResult, ExtractError>;
}

impl TupleExtractor for WrapperModel {
    fn extract_page(&self, page_id: &str, html: &str) -> Result<ExtractionResult, ExtractError> {
        extract(page_id, html, self)
    }
}

impl TupleExtractor for ExactDelimiterWrapper {
    fn extract_page(&self, page_id: &str, html: &str) -> Result<ExtractionResult, ExtractError> {
        self.extract(page_id, html)
    }
}

/// Score one page; a failed extraction counts as zero extracted tuples.
fn score_page(extractor: &impl TupleExtractor, page: &GoldPage) -> (TupleCounts, Option<String>) {
    match extractor.extract_page(&page.labels.page_id, &page.html) {
        Ok(result) => (match_tuples(&result, &page.labels), None),
        Err(_) => (
            TupleCounts { extracted: 0, pertinent: 0, total: page.labels.records.len() },
            Some(page.labels.page_id.clone()),
        ),
    }
}

/// Extract every page of the corpus and aggregate the counts.
///
/// Pages are processed on scoped worker threads; the result does not depend
/// on the number of workers.
pub fn evaluate(corpus: &GoldCorpus, extractor: &impl TupleExtractor) -> Result<EvalReport, EvalError> {
    let workers = thread::available_parallelism().map_or(1, |n| n.get()).min(corpus.pages.len().max(1));
    let chunk = corpus.pages.len().div_ceil(workers).max(1);
    let scored: Vec<(TupleCounts, Option<String>)> = thread::scope(|scope| {
        let handles: Vec<_> = corpus
            .pages
            .chunks(chunk)
            .map(|pages| scope.spawn(move || pages.iter().map(|p| score_page(extractor, p)).collect::<Vec<_>>()))
            .collect();
        handles.into_iter().flat_map(|h| h.join().expect("evaluation worker panicked")).collect()
    });

    let counts = scored.iter().fold(TupleCounts::default(), |acc, (c, _)| acc + *c);
    let failed = scored.into_iter().filter_map(|(_, f)| f).collect();
    EvalReport::from_counts(corpus.pages.len(), failed, counts)
}
