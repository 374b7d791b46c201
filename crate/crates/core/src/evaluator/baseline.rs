//! Exact-string delimiter wrapper used as a comparison baseline.
//!
//! Learns a literal head/tail string around the global zone and a literal
//! left/right delimiter per attribute (longest common suffix/prefix of the
//! training contexts). Extraction walks the page looking for the attributes
//! in their training order; a tuple is only emitted when every attribute is
//! found.

use std::collections::BTreeMap;

use crate::extractor::{AttributeValue, ExtractError, ExtractedTuple, ExtractionResult, ZoneMatch};
use crate::induction::TrainingPage;
use crate::page_model::Span;

const CONTEXT: usize = 32;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactDelimiterWrapper {
    head: String,
    tail: String,
    /// (name, left delimiter, right delimiter) in training order.
    attributes: Vec<(String, String, String)>,
}

fn common_suffix(a: &[char], b: &[char]) -> usize {
    a.iter().rev().zip(b.iter().rev()).take_while(|(x, y)| x == y).count()
}

fn common_prefix(a: &[char], b: &[char]) -> usize {
    a.iter().zip(b).take_while(|(x, y)| x == y).count()
}

/// Longest common suffix of the `CONTEXT` characters before each offset.
fn learn_left(contexts: &[(&[char], usize)]) -> String {
    let windows: Vec<&[char]> =
        contexts.iter().map(|(chars, at)| &chars[at.saturating_sub(CONTEXT)..*at]).collect();
    let len = windows.iter().map(|w| common_suffix(w, windows[0])).min().unwrap_or(0);
    windows.first().map_or(String::new(), |w| w[w.len() - len..].iter().collect())
}

/// Longest common prefix of the `CONTEXT` characters after each offset.
fn learn_right(contexts: &[(&[char], usize)]) -> String {
    let windows: Vec<&[char]> =
        contexts.iter().map(|(chars, at)| &chars[*at..(*at + CONTEXT).min(chars.len())]).collect();
    let len = windows.iter().map(|w| common_prefix(w, windows[0])).min().unwrap_or(0);
    windows.first().map_or(String::new(), |w| w[..len].iter().collect())
}

fn find(hay: &[char], needle: &[char], from: usize, to: usize) -> Option<usize> {
    if needle.is_empty() {
        return Some(from).filter(|&f| f <= to);
    }
    (from..=to.saturating_sub(needle.len())).find(|&i| i + needle.len() <= to && hay[i..i + needle.len()] == *needle)
}

impl ExactDelimiterWrapper {
    pub fn learn(pages: &[TrainingPage]) -> Self {
        let chars: Vec<Vec<char>> = pages.iter().map(|p| p.html.chars().collect()).collect();
        let head = learn_left(
            &pages.iter().zip(&chars).map(|(p, c)| (c.as_slice(), p.labels.global.start)).collect::<Vec<_>>(),
        );
        let tail = learn_right(
            &pages.iter().zip(&chars).map(|(p, c)| (c.as_slice(), p.labels.global.end)).collect::<Vec<_>>(),
        );

        // Attribute order: the first fully ordered record seen in training.
        let mut order: Vec<String> = Vec::new();
        for attrs in pages.iter().flat_map(|p| &p.labels.attributes) {
            for a in attrs {
                if !order.contains(&a.name) {
                    order.push(a.name.clone());
                }
            }
        }
        let attributes = order
            .into_iter()
            .map(|name| {
                let mut starts = Vec::new();
                let mut ends = Vec::new();
                for (page, c) in pages.iter().zip(&chars) {
                    for a in page.labels.attributes.iter().flatten().filter(|a| a.name == name) {
                        starts.push((c.as_slice(), a.span.start));
                        ends.push((c.as_slice(), a.span.end));
                    }
                }
                (name, learn_left(&starts), learn_right(&ends))
            })
            .collect();
        ExactDelimiterWrapper { head, tail, attributes }
    }

    pub fn extract(&self, page_id: &str, html: &str) -> Result<ExtractionResult, ExtractError> {
        let chars: Vec<char> = html.chars().collect();
        let head: Vec<char> = self.head.chars().collect();
        let tail: Vec<char> = self.tail.chars().collect();
        let head_at = find(&chars, &head, 0, chars.len()).ok_or(ExtractError::GlobalZoneNotFound)?;
        let start = head_at + head.len();
        let end = find(&chars, &tail, start, chars.len()).ok_or(ExtractError::GlobalZoneNotFound)?;

        let delimiters: Vec<(&str, Vec<char>, Vec<char>)> = self
            .attributes
            .iter()
            .map(|(n, l, r)| (n.as_str(), l.chars().collect(), r.chars().collect()))
            .collect();
        let mut tuples = Vec::new();
        // Delimiters may reach back into the head, so the scan starts at its match.
        let mut cursor = head_at;
        'tuples: loop {
            let mut attributes: BTreeMap<String, Vec<AttributeValue>> = BTreeMap::new();
            let mut first = None;
            for (name, left, right) in &delimiters {
                let Some(l) = find(&chars, left, cursor, end) else { break 'tuples };
                let value_start = l + left.len();
                let Some(value_end) = find(&chars, right, value_start, chars.len()) else { break 'tuples };
                if value_end == value_start || value_end > end {
                    break 'tuples;
                }
                first.get_or_insert(value_start);
                let span = Span::new(value_start, value_end);
                attributes.entry(name.to_string()).or_default().push(AttributeValue {
                    text: chars[value_start..value_end].iter().collect(),
                    span,
                    begin_error: 0.0,
                    end_error: 0.0,
                });
                cursor = value_end;
            }
            let Some(first) = first else { break };
            tuples.push(ExtractedTuple {
                span: Span::new(first, cursor),
                begin_error: 0.0,
                end_error: 0.0,
                attributes,
            });
        }
        Ok(ExtractionResult {
            page_id: page_id.to_string(),
            global: ZoneMatch { span: Span::new(start, end), begin_error: 0.0, end_error: 0.0 },
            tuples,
        })
    }
}
