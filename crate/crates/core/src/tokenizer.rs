//! Segmentation of an HTML string into classified tokens.
//!
//! The tokenizer is a left-to-right maximal-munch lexer over characters. It
//! does not build a DOM: tags are recognised lexically and everything else is
//! split into words, numbers, punctuation marks, whitespace runs and a
//! catch-all class. Every character of the input lands in exactly one token,
//! so concatenating the lexemes reproduces the page.
//!
//! Offsets are character indices (not byte indices) into the page text.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::page_model::Span;

/// Number of real token classes (columns of a frequency matrix).
pub const CLASS_COUNT: usize = 12;

/// Tag names treated as list structure.
const LIST_TAGS: &[&str] = &["UL", "OL", "LI", "DL", "DT", "DD", "TR", "TD", "TH"];
/// Tag names that stand for control characters (line breaks).
const CONTROL_TAGS: &[&str] = &["BR", "P"];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TokenizeError {
    #[error("invalid lexeme: empty input")]
    InvalidLexeme,
}

/// Lexical class of a token.
///
/// Discriminants are the stable column ids used in frequency matrices; `Pad`
/// (0) only fills detector windows that run past a page edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[repr(u8)]
pub enum TokenClass {
    #[serde(rename = "Pad")]
    Pad = 0,
    /// Capitalised word: one uppercase letter then lowercase letters.
    #[serde(rename = "C1Alph")]
    C1Alph = 1,
    /// All-uppercase word.
    #[serde(rename = "CAlph")]
    CAlph = 2,
    #[serde(rename = "Num")]
    Num = 3,
    /// Word starting with a lowercase letter.
    #[serde(rename = "0Alph")]
    LowerAlph = 4,
    #[serde(rename = "Punc")]
    Punc = 5,
    #[serde(rename = "/Spc")]
    CtrlClose = 6,
    #[serde(rename = "Spc")]
    CtrlOpen = 7,
    #[serde(rename = "/Lst")]
    ListClose = 8,
    #[serde(rename = "Lst")]
    ListOpen = 9,
    #[serde(rename = "/Html")]
    HtmlClose = 10,
    #[serde(rename = "Html")]
    HtmlOpen = 11,
    #[serde(rename = "Any")]
    Any = 12,
}

impl TokenClass {
    /// The twelve real classes in column order.
    pub const ALL: [TokenClass; CLASS_COUNT] = [
        TokenClass::C1Alph,
        TokenClass::CAlph,
        TokenClass::Num,
        TokenClass::LowerAlph,
        TokenClass::Punc,
        TokenClass::CtrlClose,
        TokenClass::CtrlOpen,
        TokenClass::ListClose,
        TokenClass::ListOpen,
        TokenClass::HtmlClose,
        TokenClass::HtmlOpen,
        TokenClass::Any,
    ];

    pub fn id(self) -> u8 {
        self as u8
    }

    /// Zero-based matrix column, `None` for `Pad`.
    pub fn column(self) -> Option<usize> {
        match self {
            TokenClass::Pad => None,
            other => Some(other as usize - 1),
        }
    }

    pub fn from_column(column: usize) -> Option<TokenClass> {
        Self::ALL.get(column).copied()
    }

    pub fn label(self) -> &'static str {
        match self {
            TokenClass::Pad => "Pad",
            TokenClass::C1Alph => "C1Alph",
            TokenClass::CAlph => "CAlph",
            TokenClass::Num => "Num",
            TokenClass::LowerAlph => "0Alph",
            TokenClass::Punc => "Punc",
            TokenClass::CtrlClose => "/Spc",
            TokenClass::CtrlOpen => "Spc",
            TokenClass::ListClose => "/Lst",
            TokenClass::ListOpen => "Lst",
            TokenClass::HtmlClose => "/Html",
            TokenClass::HtmlOpen => "Html",
            TokenClass::Any => "Any",
        }
    }
}

impl fmt::Display for TokenClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// A classified lexeme with its character span in the source page.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Token {
    pub class: TokenClass,
    pub lexeme: String,
    pub span: Span,
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({})", self.class, self.lexeme.escape_debug())
    }
}

/// Classify one lexical unit.
///
/// Tags are checked first, then the word classes, numbers, punctuation and
/// whitespace; anything else is `Any`.
pub fn classify(lexeme: &str) -> Result<TokenClass, TokenizeError> {
    let chars: Vec<char> = lexeme.chars().collect();
    let first = *chars.first().ok_or(TokenizeError::InvalidLexeme)?;

    if is_tag(&chars) {
        return Ok(classify_tag(&chars));
    }
    if chars.iter().all(|c| c.is_uppercase()) {
        return Ok(TokenClass::CAlph);
    }
    if first.is_uppercase()
        && chars[1..].iter().all(|c| c.is_alphabetic())
        && chars[1..].iter().any(|c| c.is_lowercase())
    {
        return Ok(TokenClass::C1Alph);
    }
    if first.is_lowercase() {
        return Ok(TokenClass::LowerAlph);
    }
    if chars.iter().all(|c| c.is_ascii_digit()) {
        return Ok(TokenClass::Num);
    }
    if chars.len() == 1 && first.is_ascii_punctuation() {
        return Ok(TokenClass::Punc);
    }
    if chars.iter().all(|c| c.is_whitespace()) {
        return Ok(TokenClass::CtrlOpen);
    }
    Ok(TokenClass::Any)
}

/// Segment a page into tokens whose spans tile the input.
pub fn tokenize(page: &str) -> Vec<Token> {
    let chars: Vec<char> = page.chars().collect();
    let mut tokens = Vec::new();
    let mut pos = 0;
    while pos < chars.len() {
        let (end, class) = munch(&chars, pos);
        debug_assert!(end > pos);
        tokens.push(Token {
            class,
            lexeme: chars[pos..end].iter().collect(),
            span: Span::new(pos, end),
        });
        pos = end;
    }
    tokens
}

/// Longest lexical unit starting at `start`: returns its end and class.
fn munch(chars: &[char], start: usize) -> (usize, TokenClass) {
    let c = chars[start];
    let run = |pred: &dyn Fn(char) -> bool| {
        let mut end = start + 1;
        while end < chars.len() && pred(chars[end]) {
            end += 1;
        }
        end
    };

    if c == '<' {
        if let Some(end) = tag_end(chars, start) {
            return (end, classify_tag(&chars[start..end]));
        }
        return (start + 1, TokenClass::Punc);
    }
    if c.is_uppercase() {
        let upper_end = run(&|c: char| c.is_uppercase());
        let next_lower = chars.get(upper_end).is_some_and(|c| c.is_lowercase());
        if upper_end == start + 1 && next_lower {
            let mut end = upper_end;
            while end < chars.len() && chars[end].is_lowercase() {
                end += 1;
            }
            return (end, TokenClass::C1Alph);
        }
        return (upper_end, TokenClass::CAlph);
    }
    if c.is_lowercase() {
        return (run(&|c: char| c.is_lowercase()), TokenClass::LowerAlph);
    }
    if c.is_ascii_digit() {
        return (run(&|c: char| c.is_ascii_digit()), TokenClass::Num);
    }
    if c.is_ascii_punctuation() {
        return (start + 1, TokenClass::Punc);
    }
    if c.is_whitespace() {
        let newline = is_newline(c);
        let end = run(&|c: char| c.is_whitespace() && is_newline(c) == newline);
        return (end, TokenClass::CtrlOpen);
    }
    (run(&is_other), TokenClass::Any)
}

fn is_newline(c: char) -> bool {
    c == '\n' || c == '\r'
}

/// Characters that belong to no other class; consecutive ones form one `Any` token.
pub(crate) fn is_other(c: char) -> bool {
    !(c.is_uppercase()
        || c.is_lowercase()
        || c.is_ascii_digit()
        || c.is_ascii_punctuation()
        || c.is_whitespace())
}

/// End (exclusive) of a tag starting at `start`, if one is there.
fn tag_end(chars: &[char], start: usize) -> Option<usize> {
    let mut i = start + 1;
    let closing = chars.get(i) == Some(&'/');
    if closing {
        i += 1;
    }
    let head = *chars.get(i)?;
    let head_ok = head.is_ascii_alphabetic() || (!closing && (head == '!' || head == '?'));
    if !head_ok {
        return None;
    }
    while let Some(&c) = chars.get(i) {
        match c {
            '>' => return Some(i + 1),
            '<' => return None,
            _ => i += 1,
        }
    }
    None
}

fn is_tag(chars: &[char]) -> bool {
    chars.len() >= 3 && chars[0] == '<' && tag_end(chars, 0) == Some(chars.len())
}

fn classify_tag(chars: &[char]) -> TokenClass {
    let closing = chars.get(1) == Some(&'/');
    let name: String = chars[if closing { 2 } else { 1 }..]
        .iter()
        .take_while(|c| c.is_ascii_alphanumeric())
        .map(|c| c.to_ascii_uppercase())
        .collect();
    let name = name.as_str();
    match (LIST_TAGS.contains(&name), CONTROL_TAGS.contains(&name), closing) {
        (true, _, false) => TokenClass::ListOpen,
        (true, _, true) => TokenClass::ListClose,
        (_, true, false) => TokenClass::CtrlOpen,
        (_, true, true) => TokenClass::CtrlClose,
        (_, _, false) => TokenClass::HtmlOpen,
        (_, _, true) => TokenClass::HtmlClose,
    }
}

/// Character offsets at which a token starts, plus the page length.
pub fn token_boundaries(tokens: &[Token]) -> Vec<usize> {
    let mut out: Vec<usize> = tokens.iter().map(|t| t.span.start).collect();
    out.push(tokens.last().map_or(0, |t| t.span.end));
    out
}
