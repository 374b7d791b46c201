//! Hierarchical tuple extraction with learned separators.
//!
//! Extraction runs top-down: the global zone is delimited first, records are
//! found inside it, and attributes are found inside each record. At every
//! level a separator is located by scanning token boundaries and keeping
//! those whose combined detector error stays within `tau`.

use std::collections::{BTreeMap, HashMap};
use std::ops::RangeInclusive;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fuzzy::{combine, Combiner, Engine, EPSILON};
use crate::induction::{SeparatorModel, WrapperModel};
use crate::page_model::{DetectorWindow, Edge, MoyL, Side, Span, ZoneKind};
use crate::tokenizer::{tokenize, Token};

#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize)]
#[serde(tag = "error")]
pub enum ExtractError {
    #[error("no global zone separator within the threshold")]
    GlobalZoneNotFound,
}

/// A token boundary accepted as a separator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeparatorHit {
    /// Token-boundary index: the separator lies just before token `position`.
    pub position: usize,
    pub zone: ZoneKind,
    pub edge: Edge,
    /// Crisp combined error.
    pub error: f64,
    pub left_error: f64,
    pub right_error: f64,
    /// Mean of the two detector costs relative to their `c_max`; breaks ties
    /// between hits of equal error.
    pub strength: f64,
}

/// Scan token boundaries in `range` for hits of `sep`, sorted by position.
pub fn scan_separator(
    tokens: &[Token],
    sep: &SeparatorModel,
    range: RangeInclusive<usize>,
    model: &WrapperModel,
) -> Vec<SeparatorHit> {
    scan_with(tokens, sep, range, model, &Engine::new(&model.config.partition))
}

fn scan_with(
    tokens: &[Token],
    sep: &SeparatorModel,
    range: RangeInclusive<usize>,
    model: &WrapperModel,
    engine: &Engine,
) -> Vec<SeparatorHit> {
    let config = &model.config;
    let last = (*range.end()).min(tokens.len());
    // Inference only depends on the memberships; far-off errors all saturate.
    let mut seen: HashMap<([u64; 5], [u64; 5]), f64> = HashMap::new();
    let partition = engine.partition();
    (*range.start()..=last)
        .filter_map(|position| {
            let ((left_error, left_cost), (right_error, right_cost)) =
                detector_errors(tokens, sep, position, model.moyl, model);
            let error = if left_error == 0.0 && right_error == 0.0 {
                0.0
            } else if config.combiner == Combiner::Fuzzy {
                let (ml, mr) = (partition.fuzzify(left_error), partition.fuzzify(right_error));
                *seen.entry((ml.key(), mr.key())).or_insert_with(|| engine.infer_memberships(&ml, &mr))
            } else {
                combine(left_error, right_error, config.combiner, partition)
            };
            (error.abs() <= config.tau).then(|| SeparatorHit {
                position,
                zone: sep.zone.clone(),
                edge: sep.edge,
                error,
                left_error,
                right_error,
                strength: (left_cost + right_cost) / 2.0,
            })
        })
        .collect()
}

fn detector_errors(
    tokens: &[Token],
    sep: &SeparatorModel,
    position: usize,
    moyl: MoyL,
    model: &WrapperModel,
) -> ((f64, f64), (f64, f64)) {
    let config = &model.config;
    // (error, cost relative to c_max)
    let error = |side: Side| {
        let detector = if side == Side::Left { &sep.left } else { &sep.right };
        let window = DetectorWindow::at(tokens, position, side, sep.zone.clone(), sep.edge, moyl);
        let cost = detector.cost(&window, config.width);
        let calibration = &detector.calibration;
        (config.error_mode.error(cost, calibration), cost / calibration.c_max.max(EPSILON))
    };
    (error(Side::Left), error(Side::Right))
}

/// One extracted attribute value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttributeValue {
    pub text: String,
    pub span: Span,
    pub begin_error: f64,
    pub end_error: f64,
}

/// A zone delimited by a begin and an end hit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZoneMatch {
    pub span: Span,
    pub begin_error: f64,
    pub end_error: f64,
}

/// One record with its (possibly partial, possibly multi-valued) attributes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtractedTuple {
    pub span: Span,
    pub begin_error: f64,
    pub end_error: f64,
    pub attributes: BTreeMap<String, Vec<AttributeValue>>,
}

impl ExtractedTuple {
    /// All (name, span) pairs of this tuple.
    pub fn attribute_spans(&self) -> impl Iterator<Item = (&str, Span)> {
        self.attributes.iter().flat_map(|(name, values)| values.iter().map(move |v| (name.as_str(), v.span)))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtractionResult {
    pub page_id: String,
    pub global: ZoneMatch,
    pub tuples: Vec<ExtractedTuple>,
}

impl ExtractionResult {
    pub fn to_json(&self) -> String {
        let mut out = serde_json::to_string_pretty(self).expect("result serialises");
        out.push('\n');
        out
    }
}

/// Character offset of token boundary `index`.
fn offset_of(tokens: &[Token], index: usize) -> usize {
    match tokens.get(index) {
        Some(t) => t.span.start,
        None => tokens.last().map_or(0, |t| t.span.end),
    }
}

fn best_hit(hits: &[SeparatorHit]) -> Option<&SeparatorHit> {
    // min |error|, earliest position on ties (hits are sorted by position)
    hits.iter().reduce(|best, h| if h.error.abs() < best.error.abs() { h } else { best })
}

/// A begin/end pair in token-boundary indices.
#[derive(Debug, Clone, Copy)]
struct Pair {
    begin: usize,
    end: usize,
    begin_error: f64,
    end_error: f64,
    strength: f64,
}

impl Pair {
    fn new(begin: &SeparatorHit, end: &SeparatorHit) -> Self {
        Pair {
            begin: begin.position,
            end: end.position,
            begin_error: begin.error,
            end_error: end.error,
            strength: (begin.strength + end.strength) / 2.0,
        }
    }

    fn score(&self) -> f64 {
        self.begin_error.abs() + self.end_error.abs()
    }

    fn overlaps(&self, other: &Pair) -> bool {
        self.begin < other.end && other.begin < self.end
    }
}

/// Pair each begin with the nearest following end that is not past the next begin.
fn pair_greedy(begins: &[SeparatorHit], ends: &[SeparatorHit]) -> Vec<Pair> {
    let mut pairs = Vec::new();
    for (i, begin) in begins.iter().enumerate() {
        let limit = begins.get(i + 1).map_or(usize::MAX, |next| next.position);
        if let Some(end) = ends.iter().find(|e| e.position > begin.position) {
            if end.position <= limit {
                pairs.push(Pair::new(begin, end));
            }
        }
    }
    pairs
}

/// Drop hits weaker than `ratio` times the strongest hit within `radius`.
fn suppress_weak(hits: Vec<SeparatorHit>, radius: usize, ratio: f64) -> Vec<SeparatorHit> {
    let weak = |h: &SeparatorHit| {
        hits.iter().any(|o| o.position.abs_diff(h.position) <= radius && o.strength * ratio > h.strength)
    };
    hits.iter().filter(|h| !weak(h)).cloned().collect()
}

/// Every begin/end combination with the end after the begin.
fn all_pairs(begins: &[SeparatorHit], ends: &[SeparatorHit]) -> Vec<Pair> {
    begins
        .iter()
        .flat_map(|b| ends.iter().filter(move |e| e.position > b.position).map(move |e| Pair::new(b, e)))
        .collect()
}

/// Resolve attribute candidates inside one record.
///
/// Candidates are taken lowest error first, stronger first on equal error;
/// a candidate overlapping an accepted one is discarded. Candidates much
/// weaker than the strongest one in the record are dropped beforehand.
fn select_attributes(mut candidates: Vec<(String, Pair)>, tau: f64) -> Vec<(String, Pair)> {
    let anchor = candidates.iter().map(|(_, p)| p.strength).fold(0.0, f64::max);
    candidates.retain(|(_, p)| p.strength >= (1.0 - tau) * anchor);
    candidates.sort_by(|(na, a), (nb, b)| {
        a.score()
            .total_cmp(&b.score())
            .then(b.strength.total_cmp(&a.strength))
            .then(a.begin.cmp(&b.begin))
            .then(a.end.cmp(&b.end))
            .then(na.cmp(nb))
    });
    let mut accepted: Vec<(String, Pair)> = Vec::new();
    for (name, pair) in candidates {
        if !accepted.iter().any(|(_, p)| pair.overlaps(p)) {
            accepted.push((name, pair));
        }
    }
    accepted.sort_by_key(|(_, p)| p.begin);
    accepted
}

fn scan(
    tokens: &[Token],
    model: &WrapperModel,
    engine: &Engine,
    zone: &ZoneKind,
    edge: Edge,
    range: RangeInclusive<usize>,
) -> Vec<SeparatorHit> {
    match model.separator(zone, edge) {
        Some(sep) => scan_with(tokens, sep, range, model, engine),
        None => Vec::new(),
    }
}

/// Extract the global zone, its records and their attributes from a page.
pub fn extract(page_id: &str, page: &str, model: &WrapperModel) -> Result<ExtractionResult, ExtractError> {
    let tokens = tokenize(page);
    let engine = Engine::new(&model.config.partition);
    let chars: Vec<char> = page.chars().collect();
    let n = tokens.len();
    let span_of = |begin: usize, end: usize| Span::new(offset_of(&tokens, begin), offset_of(&tokens, end));
    let text_of = |span: Span| chars[span.start..span.end].iter().collect::<String>();

    let begins = scan(&tokens, model, &engine, &ZoneKind::Global, Edge::Begin, 0..=n);
    let global_begin = best_hit(&begins).ok_or(ExtractError::GlobalZoneNotFound)?;
    let ends = scan(&tokens, model, &engine, &ZoneKind::Global, Edge::End, global_begin.position + 1..=n);
    let global_end = best_hit(&ends).ok_or(ExtractError::GlobalZoneNotFound)?;
    let (gb, ge) = (global_begin.position, global_end.position);

    let record_begins = scan(&tokens, model, &engine, &ZoneKind::Record, Edge::Begin, gb..=ge);
    let record_ends = scan(&tokens, model, &engine, &ZoneKind::Record, Edge::End, gb..=ge);
    let attribute_names = model.attribute_names();

    // Hits clearly weaker than a neighbour less than one record away are dropped.
    let thin = |hits| suppress_weak(hits, model.moyl.get() - 1, 1.0 - model.config.tau);
    let records = pair_greedy(&thin(record_begins), &thin(record_ends));
    let tuples = records
        .into_iter()
        .map(|record| {
            let mut candidates: Vec<(String, Pair)> = Vec::new();
            for name in &attribute_names {
                let zone = ZoneKind::Attribute(name.clone());
                let begins = scan(&tokens, model, &engine, &zone, Edge::Begin, record.begin..=record.end);
                let ends = scan(&tokens, model, &engine, &zone, Edge::End, record.begin..=record.end);
                candidates.extend(all_pairs(&begins, &ends).into_iter().map(|p| (name.clone(), p)));
            }
            let accepted = select_attributes(candidates, model.config.tau);

            let mut attributes: BTreeMap<String, Vec<AttributeValue>> = BTreeMap::new();
            for (name, pair) in accepted {
                let span = span_of(pair.begin, pair.end);
                attributes.entry(name).or_default().push(AttributeValue {
                    text: text_of(span),
                    span,
                    begin_error: pair.begin_error,
                    end_error: pair.end_error,
                });
            }
            ExtractedTuple {
                span: span_of(record.begin, record.end),
                begin_error: record.begin_error,
                end_error: record.end_error,
                attributes,
            }
        })
        .collect();

    Ok(ExtractionResult {
        page_id: page_id.to_string(),
        global: ZoneMatch {
            span: span_of(gb, ge),
            begin_error: global_begin.error,
            end_error: global_end.error,
        },
        tuples,
    })
}
