//! Trainable fuzzy web wrapper.
//!
//! `fuzzwrap` learns, from a handful of labelled HTML pages, how to find the
//! begin and end of a page's global zone, of each record in it and of each
//! named attribute in a record. Every such separator is modelled by two
//! detectors, the token classes left and right of it, learned as frequency
//! matrices with fuzzy position/occurrence costs. Extraction scans token
//! boundaries, combines the two detector errors with a small Mamdani rule
//! base and keeps boundaries whose error stays under a threshold.
//!
//! ```
//! use fuzzwrap::evaluator::{generate_corpus, AnomalyProfile};
//! use fuzzwrap::{extract, train, WrapperConfig};
//!
//! let corpus = generate_corpus(&AnomalyProfile::regular(), 4, 7).unwrap();
//! let model = train(&corpus.training_pages(3), &WrapperConfig::default()).unwrap();
//! let page = &corpus.pages[3];
//! let result = extract("page_003", &page.html, &model).unwrap();
//! assert_eq!(result.tuples.len(), page.labels.records.len());
//! ```

pub mod cli;
pub mod evaluator;
pub mod extractor;
pub mod fuzzy;
pub mod induction;
pub mod page_model;
pub mod service;
pub mod store;
pub mod tokenizer;

pub use extractor::{extract, ExtractError, ExtractionResult};
pub use induction::{train, TrainError, TrainingPage, WrapperConfig, WrapperModel};
pub use page_model::{validate_labels, LabelError, Span, ZoneKind, ZoneLabels};
pub use tokenizer::{classify, tokenize, Token, TokenClass};
