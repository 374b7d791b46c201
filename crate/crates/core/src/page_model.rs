//! Zone architecture of a page, user labels and detector training windows.
//!
//! A page holds one global zone containing records, and each record holds
//! named attribute zones. Every zone is delimited by a begin and an end
//! separator; a separator is described by the token classes on its left and
//! on its right, each read over a window of `MoyL` tokens.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::tokenizer::{Token, TokenClass};

/// Half-open character span `[start, end)`. Serialised as `[start, end]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(from = "[usize; 2]", into = "[usize; 2]")]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

impl Span {
    pub const fn new(start: usize, end: usize) -> Self {
        Span { start, end }
    }

    pub fn len(&self) -> usize {
        self.end.saturating_sub(self.start)
    }

    pub fn is_empty(&self) -> bool {
        self.end <= self.start
    }

    pub fn contains(&self, other: &Span) -> bool {
        self.start <= other.start && other.end <= self.end
    }

    pub fn overlaps(&self, other: &Span) -> bool {
        self.start < other.end && other.start < self.end
    }
}

impl From<[usize; 2]> for Span {
    fn from([start, end]: [usize; 2]) -> Self {
        Span { start, end }
    }
}

impl From<Span> for [usize; 2] {
    fn from(span: Span) -> Self {
        [span.start, span.end]
    }
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {})", self.start, self.end)
    }
}

/// Level of a zone. Attribute zones carry the attribute name.
///
/// Serialised as `"global"`, `"record"` or `"attribute:<name>"`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum ZoneKind {
    Global,
    Record,
    Attribute(String),
}

impl fmt::Display for ZoneKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ZoneKind::Global => f.write_str("global"),
            ZoneKind::Record => f.write_str("record"),
            ZoneKind::Attribute(name) => write!(f, "attribute:{name}"),
        }
    }
}

impl FromStr for ZoneKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "global" => Ok(ZoneKind::Global),
            "record" => Ok(ZoneKind::Record),
            _ => match s.strip_prefix("attribute:") {
                Some(name) if !name.is_empty() => Ok(ZoneKind::Attribute(name.to_string())),
                _ => Err(format!("unknown zone kind `{s}`")),
            },
        }
    }
}

impl TryFrom<String> for ZoneKind {
    type Error = String;

    fn try_from(value: String) -> Result<Self, Self::Error> {
        value.parse()
    }
}

impl From<ZoneKind> for String {
    fn from(kind: ZoneKind) -> Self {
        kind.to_string()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Edge {
    Begin,
    End,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
}

/// One labelled attribute value inside a record.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AttributeLabel {
    pub name: String,
    pub span: Span,
}

/// User annotations for one page. `attributes[k]` belongs to `records[k]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ZoneLabels {
    pub page_id: String,
    pub global: Span,
    pub records: Vec<Span>,
    pub attributes: Vec<Vec<AttributeLabel>>,
}

impl ZoneLabels {
    /// All (zone, edge, character offset) separator points, in a canonical order.
    pub fn separator_points(&self) -> Vec<(ZoneKind, Edge, usize)> {
        let mut points = vec![
            (ZoneKind::Global, Edge::Begin, self.global.start),
            (ZoneKind::Global, Edge::End, self.global.end),
        ];
        for (record, attrs) in self.records.iter().zip(&self.attributes) {
            points.push((ZoneKind::Record, Edge::Begin, record.start));
            points.push((ZoneKind::Record, Edge::End, record.end));
            for attr in attrs {
                let zone = ZoneKind::Attribute(attr.name.clone());
                points.push((zone.clone(), Edge::Begin, attr.span.start));
                points.push((zone, Edge::End, attr.span.end));
            }
        }
        points
    }

    /// Attribute names used anywhere on the page, sorted and deduplicated.
    pub fn attribute_names(&self) -> Vec<String> {
        let mut names: Vec<String> =
            self.attributes.iter().flatten().map(|a| a.name.clone()).collect();
        names.sort();
        names.dedup();
        names
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize)]
#[serde(tag = "error", rename_all = "PascalCase")]
pub enum LabelError {
    #[error("spans overlap at offset {offset}")]
    OverlappingSpans { offset: usize },
    #[error("span {span} lies outside its parent zone {parent}")]
    SpanOutsideParent { span: Span, parent: Span },
    #[error("zone boundary at offset {offset} falls inside a token")]
    BoundaryInsideToken { offset: usize },
    #[error("span {span} is empty, reversed or past the page end ({page_len} characters)")]
    InvalidSpan { span: Span, page_len: usize },
    #[error("{records} records but {attribute_lists} attribute lists")]
    AttributeCountMismatch { records: usize, attribute_lists: usize },
    #[error("attribute name must not be empty")]
    EmptyAttributeName,
    #[error("no labelled records")]
    NoRecords,
}

impl LabelError {
    /// Stable error name used on the wire.
    pub fn name(&self) -> &'static str {
        match self {
            LabelError::OverlappingSpans { .. } => "OverlappingSpans",
            LabelError::SpanOutsideParent { .. } => "SpanOutsideParent",
            LabelError::BoundaryInsideToken { .. } => "BoundaryInsideToken",
            LabelError::InvalidSpan { .. } => "InvalidSpan",
            LabelError::AttributeCountMismatch { .. } => "AttributeCountMismatch",
            LabelError::EmptyAttributeName => "EmptyAttributeName",
            LabelError::NoRecords => "NoRecords",
        }
    }

    /// Offending character offset, when there is one.
    pub fn offset(&self) -> Option<usize> {
        match self {
            LabelError::OverlappingSpans { offset } | LabelError::BoundaryInsideToken { offset } => {
                Some(*offset)
            }
            LabelError::SpanOutsideParent { span, .. } | LabelError::InvalidSpan { span, .. } => {
                Some(span.start)
            }
            _ => None,
        }
    }
}

/// Check labels against the page and its tokens.
///
/// Records (with their attribute lists) and the attributes inside each record
/// are returned sorted by start offset; nothing is moved or snapped.
pub fn validate_labels(
    page: &str,
    tokens: &[Token],
    labels: &ZoneLabels,
) -> Result<ZoneLabels, LabelError> {
    let page_len = page.chars().count();
    if labels.records.len() != labels.attributes.len() {
        return Err(LabelError::AttributeCountMismatch {
            records: labels.records.len(),
            attribute_lists: labels.attributes.len(),
        });
    }
    let check_span = |span: &Span| {
        if span.is_empty() || span.end > page_len {
            Err(LabelError::InvalidSpan { span: *span, page_len })
        } else {
            Ok(())
        }
    };

    check_span(&labels.global)?;
    let mut records: Vec<(Span, Vec<AttributeLabel>)> =
        labels.records.iter().copied().zip(labels.attributes.iter().cloned()).collect();
    for (record, attrs) in &records {
        check_span(record)?;
        if !labels.global.contains(record) {
            return Err(LabelError::SpanOutsideParent { span: *record, parent: labels.global });
        }
        for attr in attrs {
            if attr.name.is_empty() {
                return Err(LabelError::EmptyAttributeName);
            }
            check_span(&attr.span)?;
            if !record.contains(&attr.span) {
                return Err(LabelError::SpanOutsideParent { span: attr.span, parent: *record });
            }
        }
    }

    records.sort_by_key(|r| r.0);
    check_disjoint(records.iter().map(|(span, _)| span))?;
    for (_, attrs) in &mut records {
        attrs.sort_by(|a, b| a.span.cmp(&b.span).then_with(|| a.name.cmp(&b.name)));
        check_disjoint(attrs.iter().map(|a| &a.span))?;
    }

    let boundaries = crate::tokenizer::token_boundaries(tokens);
    let on_boundary = |offset: usize| boundaries.binary_search(&offset).is_ok();
    let mut offsets = vec![labels.global.start, labels.global.end];
    for (record, attrs) in &records {
        offsets.extend([record.start, record.end]);
        offsets.extend(attrs.iter().flat_map(|a| [a.span.start, a.span.end]));
    }
    if let Some(&offset) = offsets.iter().find(|&&o| !on_boundary(o)) {
        return Err(LabelError::BoundaryInsideToken { offset });
    }

    let (records, attributes) = records.into_iter().unzip();
    Ok(ZoneLabels { page_id: labels.page_id.clone(), global: labels.global, records, attributes })
}

fn check_disjoint<'a>(sorted: impl Iterator<Item = &'a Span>) -> Result<(), LabelError> {
    let mut prev: Option<&Span> = None;
    for span in sorted {
        if let Some(p) = prev {
            if p.overlaps(span) {
                return Err(LabelError::OverlappingSpans { offset: span.start });
            }
        }
        prev = Some(span);
    }
    Ok(())
}

/// Detector window length in tokens (the average record length).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "usize", into = "usize")]
pub struct MoyL(usize);

impl MoyL {
    pub fn new(value: usize) -> Option<Self> {
        (value >= 1).then_some(MoyL(value))
    }

    pub fn get(self) -> usize {
        self.0
    }
}

impl TryFrom<usize> for MoyL {
    type Error = String;

    fn try_from(value: usize) -> Result<Self, Self::Error> {
        MoyL::new(value).ok_or_else(|| "window length must be at least 1".to_string())
    }
}

impl From<MoyL> for usize {
    fn from(m: MoyL) -> usize {
        m.0
    }
}

impl fmt::Display for MoyL {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Number of tokens lying inside `span`.
pub fn tokens_in(tokens: &[Token], span: &Span) -> usize {
    tokens.iter().filter(|t| span.contains(&t.span)).count()
}

/// Mean record length in tokens over all pages, rounded half up, at least 1.
pub fn compute_moyl(labels: &[ZoneLabels], tokens: &[Vec<Token>]) -> Result<MoyL, LabelError> {
    let mut total = 0usize;
    let mut count = 0usize;
    for (page_labels, page_tokens) in labels.iter().zip(tokens) {
        for record in &page_labels.records {
            total += tokens_in(page_tokens, record);
            count += 1;
        }
    }
    if count == 0 {
        return Err(LabelError::NoRecords);
    }
    let rounded = (2 * total + count) / (2 * count);
    Ok(MoyL(rounded.max(1)))
}

/// Token classes on one side of a separator point.
///
/// `classes` is stored in reading order: for a left window that is distance
/// `moyL` down to 1, for a right window distance 1 up to `moyL`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DetectorWindow {
    pub side: Side,
    pub zone: ZoneKind,
    pub edge: Edge,
    pub classes: Vec<TokenClass>,
}

impl DetectorWindow {
    /// Read the window around token boundary `boundary` (index of the first
    /// token right of the point), padding past either page edge.
    pub fn at(
        tokens: &[Token],
        boundary: usize,
        side: Side,
        zone: ZoneKind,
        edge: Edge,
        moyl: MoyL,
    ) -> Self {
        let len = moyl.get();
        let class_at = |index: Option<usize>| {
            index.and_then(|i| tokens.get(i)).map_or(TokenClass::Pad, |t| t.class)
        };
        let classes = match side {
            Side::Left => (1..=len).rev().map(|d| class_at(boundary.checked_sub(d))).collect(),
            Side::Right => (1..=len).map(|d| class_at(Some(boundary + d - 1))).collect(),
        };
        DetectorWindow { side, zone, edge, classes }
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    /// Class at `distance` (1-based) from the separator point.
    pub fn class_at(&self, distance: usize) -> TokenClass {
        let n = self.classes.len();
        assert!((1..=n).contains(&distance), "distance {distance} outside 1..={n}");
        match self.side {
            Side::Left => self.classes[n - distance],
            Side::Right => self.classes[distance - 1],
        }
    }
}

/// Index of the token starting at `offset` (or `tokens.len()` at page end).
pub fn boundary_index(tokens: &[Token], offset: usize) -> Option<usize> {
    match tokens.binary_search_by(|t| t.span.start.cmp(&offset)) {
        Ok(i) => Some(i),
        Err(i) if i == tokens.len() && tokens.last().map_or(0, |t| t.span.end) == offset => Some(i),
        Err(_) => None,
    }
}

/// Left and right windows for every labelled separator point of a page.
///
/// Output is sorted by (zone, edge, side, classes), so it does not depend on
/// the order of records or attributes in the label file.
pub fn extract_windows(tokens: &[Token], labels: &ZoneLabels, moyl: MoyL) -> Vec<DetectorWindow> {
    let mut windows = Vec::new();
    for (zone, edge, offset) in labels.separator_points() {
        let boundary = boundary_index(tokens, offset)
            .expect("labels must be validated against the page tokens");
        for side in [Side::Left, Side::Right] {
            windows.push(DetectorWindow::at(tokens, boundary, side, zone.clone(), edge, moyl));
        }
    }
    windows.sort_by(window_order);
    windows
}

fn window_order(a: &DetectorWindow, b: &DetectorWindow) -> Ordering {
    (&a.zone, a.edge, a.side, &a.classes).cmp(&(&b.zone, b.edge, b.side, &b.classes))
}

/// Current label file format version.
pub const LABEL_FILE_VERSION: u32 = 1;

/// On-disk label document for one page set.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabelFile {
    pub version: u32,
    pub pages: Vec<LabelEntry>,
}

/// Labels of one page plus the path of its HTML file, relative to the label file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabelEntry {
    pub page_id: String,
    pub html_path: String,
    pub global: Span,
    pub records: Vec<Span>,
    pub attributes: Vec<Vec<AttributeLabel>>,
}

impl LabelEntry {
    pub fn new(html_path: impl Into<String>, labels: ZoneLabels) -> Self {
        LabelEntry {
            page_id: labels.page_id,
            html_path: html_path.into(),
            global: labels.global,
            records: labels.records,
            attributes: labels.attributes,
        }
    }

    pub fn labels(&self) -> ZoneLabels {
        ZoneLabels {
            page_id: self.page_id.clone(),
            global: self.global,
            records: self.records.clone(),
            attributes: self.attributes.clone(),
        }
    }
}

impl LabelFile {
    pub fn new(pages: Vec<LabelEntry>) -> Self {
        LabelFile { version: LABEL_FILE_VERSION, pages }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tokenizer::tokenize;
    use TokenClass::*;

    const PAGE: &str = "<UL><LI>Congo 242<LI>Chad 235</UL>";

    fn labels() -> ZoneLabels {
        // <UL> 0..4, <LI> 4..8, Congo 8..13, ' ' 13..14, 242 14..17,
        // <LI> 17..21, Chad 21..25, ' ' 25..26, 235 26..29, </UL> 29..34
        ZoneLabels {
            page_id: "p".into(),
            global: Span::new(4, 29),
            records: vec![Span::new(4, 17), Span::new(17, 29)],
            attributes: vec![
                vec![
                    AttributeLabel { name: "country".into(), span: Span::new(8, 13) },
                    AttributeLabel { name: "code".into(), span: Span::new(14, 17) },
                ],
                vec![
                    AttributeLabel { name: "country".into(), span: Span::new(21, 25) },
                    AttributeLabel { name: "code".into(), span: Span::new(26, 29) },
                ],
            ],
        }
    }

    #[test]
    fn well_nested_labels_accepted_unchanged() {
        let tokens = tokenize(PAGE);
        assert_eq!(validate_labels(PAGE, &tokens, &labels()), Ok(labels()));
    }

    #[test]
    fn record_past_global_end() {
        let tokens = tokenize(PAGE);
        let mut bad = labels();
        bad.records[1] = Span::new(17, 34);
        assert!(matches!(
            validate_labels(PAGE, &tokens, &bad),
            Err(LabelError::SpanOutsideParent { .. })
        ));
    }

    #[test]
    fn boundary_inside_token() {
        let page = "Congo 242";
        let tokens = tokenize(page);
        assert_eq!(tokens[0].span, Span::new(0, 5));
        let bad = ZoneLabels {
            page_id: "p".into(),
            global: Span::new(0, 9),
            records: vec![Span::new(0, 9)],
            attributes: vec![vec![AttributeLabel { name: "country".into(), span: Span::new(0, 3) }]],
        };
        assert_eq!(
            validate_labels(page, &tokens, &bad),
            Err(LabelError::BoundaryInsideToken { offset: 3 })
        );
    }

    #[test]
    fn overlapping_records() {
        let tokens = tokenize(PAGE);
        let mut bad = labels();
        bad.records[1] = Span::new(8, 29);
        bad.attributes[1].clear();
        assert_eq!(
            validate_labels(PAGE, &tokens, &bad),
            Err(LabelError::OverlappingSpans { offset: 8 })
        );
    }

    #[test]
    fn overlapping_attributes() {
        let tokens = tokenize(PAGE);
        let mut bad = labels();
        bad.attributes[0][1].span = Span::new(8, 17);
        assert!(matches!(
            validate_labels(PAGE, &tokens, &bad),
            Err(LabelError::OverlappingSpans { .. })
        ));
    }

    #[test]
    fn unordered_records_are_sorted() {
        let tokens = tokenize(PAGE);
        let mut shuffled = labels();
        shuffled.records.reverse();
        shuffled.attributes.reverse();
        shuffled.attributes[0].reverse();
        assert_eq!(validate_labels(PAGE, &tokens, &shuffled), Ok(labels()));
    }

    #[test]
    fn invalid_and_mismatched() {
        let tokens = tokenize(PAGE);
        let mut bad = labels();
        bad.global = Span::new(4, 99);
        assert!(matches!(validate_labels(PAGE, &tokens, &bad), Err(LabelError::InvalidSpan { .. })));
        let mut bad = labels();
        bad.attributes.pop();
        assert!(matches!(
            validate_labels(PAGE, &tokens, &bad),
            Err(LabelError::AttributeCountMismatch { .. })
        ));
        let mut bad = labels();
        bad.attributes[0][0].name.clear();
        assert_eq!(validate_labels(PAGE, &tokens, &bad), Err(LabelError::EmptyAttributeName));
    }

    #[test]
    fn moyl_rounding() {
        let page = "a b c d e f g h";
        let tokens = tokenize(page);
        let mk = |records: Vec<Span>| ZoneLabels {
            page_id: "p".into(),
            global: Span::new(0, 15),
            attributes: vec![vec![]; records.len()],
            records,
        };
        // Each letter is one token and each space another.
        let three = Span::new(0, 3); // a, ' ', b
        let four = Span::new(0, 4); // a, ' ', b, ' '
        let five = Span::new(0, 5);
        let moyl = |spans: Vec<Span>| compute_moyl(&[mk(spans)], std::slice::from_ref(&tokens)).unwrap().get();
        assert_eq!(moyl(vec![four, four, four]), 4);
        assert_eq!(moyl(vec![three, four]), 4);
        assert_eq!(moyl(vec![five]), 5);
        assert_eq!(compute_moyl(&[mk(vec![])], std::slice::from_ref(&tokens)), Err(LabelError::NoRecords));
    }

    #[test]
    fn window_at_page_start_is_padding() {
        let tokens = tokenize(PAGE);
        let moyl = MoyL::new(3).unwrap();
        let w = DetectorWindow::at(&tokens, 0, Side::Left, ZoneKind::Global, Edge::Begin, moyl);
        assert_eq!(w.classes, vec![Pad, Pad, Pad]);
        let w = DetectorWindow::at(&tokens, tokens.len(), Side::Right, ZoneKind::Global, Edge::End, moyl);
        assert_eq!(w.classes, vec![Pad, Pad, Pad]);
    }

    #[test]
    fn window_distances() {
        let tokens = tokenize(PAGE);
        let moyl = MoyL::new(4).unwrap();
        let left = DetectorWindow::at(&tokens, 2, Side::Left, ZoneKind::Record, Edge::Begin, moyl);
        assert_eq!(left.classes, vec![Pad, Pad, ListOpen, ListOpen]);
        assert_eq!(left.class_at(1), ListOpen);
        assert_eq!(left.class_at(4), Pad);
        let right = DetectorWindow::at(&tokens, 2, Side::Right, ZoneKind::Record, Edge::Begin, moyl);
        assert_eq!(right.classes, vec![C1Alph, CtrlOpen, Num, ListOpen]);
        assert_eq!(right.class_at(1), C1Alph);
    }

    #[test]
    fn window_count_per_edge() {
        let tokens = tokenize(PAGE);
        let windows = extract_windows(&tokens, &labels(), MoyL::new(4).unwrap());
        // 2 global edges + 2 records x 2 edges + 4 attributes x 2 edges, both sides
        assert_eq!(windows.len(), 2 * (2 + 4 + 8));
    }

    #[test]
    fn zone_kind_round_trip() {
        for kind in [ZoneKind::Global, ZoneKind::Record, ZoneKind::Attribute("code".into())] {
            assert_eq!(kind.to_string().parse::<ZoneKind>(), Ok(kind));
        }
        assert!("attribute:".parse::<ZoneKind>().is_err());
    }
}
