//! Label checks: a good label set, then two broken ones.

use fuzzwrap::page_model::AttributeLabel;
use fuzzwrap::{tokenize, validate_labels, Span, ZoneLabels};

fn main() {
    let page = "<UL><LI>Congo 242\n<LI>Kenya 254\n</UL>";
    let tokens = tokenize(page);
    let attr = |name: &str, start, end| AttributeLabel { name: name.into(), span: Span::new(start, end) };
    let good = ZoneLabels {
        page_id: "demo".into(),
        global: Span::new(4, 31),
        records: vec![Span::new(4, 17), Span::new(18, 31)],
        attributes: vec![
            vec![attr("country", 8, 13), attr("code", 14, 17)],
            vec![attr("country", 22, 27), attr("code", 28, 31)],
        ],
    };
    println!("good: {:?}", validate_labels(page, &tokens, &good).map(|l| l.records.len()));

    let mut overlapping = good.clone();
    overlapping.records[0].end = 20;
    let err = validate_labels(page, &tokens, &overlapping).unwrap_err();
    println!("overlapping: {} at {:?} ({err})", err.name(), err.offset());

    let mut split_word = good;
    split_word.attributes[1][0].span.end = 25;
    let err = validate_labels(page, &tokens, &split_word).unwrap_err();
    println!("split word: {} at {:?} ({err})", err.name(), err.offset());
}
