//! Tokenizer round trip and agreement with a brute-force reference segmenter.

mod common;

use fuzzwrap::tokenizer::{classify, tokenize, TokenClass};
use proptest::prelude::*;

/// Whether `s` is one whole lexical unit, judged from the string alone.
fn is_lexeme(s: &[char]) -> bool {
    let Some(&first) = s.first() else { return false };
    if first == '<' && s.len() >= 3 && s[s.len() - 1] == '>' {
        let body = &s[1..s.len() - 1];
        let (closing, name) = match body.first() {
            Some('/') => (true, &body[1..]),
            _ => (false, body),
        };
        let head_ok = name.first().is_some_and(|&c| c.is_ascii_alphabetic() || (!closing && (c == '!' || c == '?')));
        return head_ok && !body.contains(&'<') && !body.contains(&'>');
    }
    let all = |p: fn(char) -> bool| s.iter().all(|&c| p(c));
    let other = |c: char| {
        !(c.is_uppercase() || c.is_lowercase() || c.is_ascii_digit() || c.is_ascii_punctuation() || c.is_whitespace())
    };
    all(char::is_uppercase)
        || (first.is_uppercase() && s.len() > 1 && s[1..].iter().all(|c| c.is_lowercase()))
        || all(char::is_lowercase)
        || all(|c| c.is_ascii_digit())
        || (s.len() == 1 && first.is_ascii_punctuation())
        || all(|c| c == '\n' || c == '\r')
        || all(|c| c.is_whitespace() && c != '\n' && c != '\r')
        || all(other)
}

/// Longest whole lexeme at each position, found by trying every length.
fn reference_segments(page: &str) -> Vec<String> {
    let chars: Vec<char> = page.chars().collect();
    let mut out = Vec::new();
    let mut pos = 0;
    while pos < chars.len() {
        let len = (1..=chars.len() - pos).rev().find(|&n| is_lexeme(&chars[pos..pos + n])).expect("single char");
        out.push(chars[pos..pos + len].iter().collect());
        pos += len;
    }
    out
}

fn fragment() -> impl Strategy<Value = String> {
    prop_oneof![
        prop::sample::select(vec![
            "<UL>", "</UL>", "<LI>", "</LI>", "<B>", "</B>", "<I>", "</I>", "<BR>", "<br/>", "<P>", "</P>",
            "<TD class=x>", "</TR>", "<!DOCTYPE html>", "<?xml?>", "<", ">", "</", "<<a>", "< b>", "<a",
        ])
        .prop_map(String::from),
        "[A-Z][a-z]{0,6}",
        "[A-Z]{1,4}",
        "[a-z]{1,6}",
        "[0-9]{1,4}",
        "[ \t]{1,3}",
        "[\n\r]{1,2}",
        prop::sample::select(vec![":", ";", ",", ".", "(", ")", "&", "#", "§", "é", "É", "中文", "€", "٣", "ǅ"])
            .prop_map(String::from),
    ]
}

fn html() -> impl Strategy<Value = String> {
    prop::collection::vec(fragment(), 0..40).prop_map(|parts| parts.concat())
}

fn check(page: &str) {
    let tokens = tokenize(page);
    let rebuilt: String = tokens.iter().map(|t| t.lexeme.as_str()).collect();
    assert_eq!(rebuilt, page);
    let mut offset = 0;
    for t in &tokens {
        assert_eq!(t.span.start, offset);
        assert_eq!(t.span.len(), t.lexeme.chars().count());
        assert!(!t.lexeme.is_empty());
        assert_eq!(classify(&t.lexeme).unwrap(), t.class, "{:?}", t.lexeme);
        assert_ne!(t.class, TokenClass::Pad);
        offset = t.span.end;
    }
    assert_eq!(offset, page.chars().count());
    let lexemes: Vec<&str> = tokens.iter().map(|t| t.lexeme.as_str()).collect();
    assert_eq!(lexemes, reference_segments(page));
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 1000, ..ProptestConfig::default() })]

    #[test]
    fn random_fragments_round_trip(page in html()) {
        check(&page);
    }

    #[test]
    fn arbitrary_text_round_trips(page in any::<String>()) {
        let rebuilt: String = tokenize(&page).iter().map(|t| t.lexeme.as_str()).collect();
        prop_assert_eq!(rebuilt, page);
    }
}

#[test]
fn fixtures_round_trip() {
    let pages = common::fixture_html();
    assert_eq!(pages.len(), 4);
    for (_, html) in &pages {
        check(html);
    }
}

#[test]
fn listing_fragment() {
    use TokenClass::*;
    let tokens = tokenize("<UL><LI>Congo 1");
    let got: Vec<(TokenClass, &str)> = tokens.iter().map(|t| (t.class, t.lexeme.as_str())).collect();
    assert_eq!(
        got,
        [(ListOpen, "<UL>"), (ListOpen, "<LI>"), (C1Alph, "Congo"), (CtrlOpen, " "), (Num, "1")]
    );
    assert_eq!(reference_segments("a1"), ["a", "1"]);
}
