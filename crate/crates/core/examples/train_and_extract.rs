//! Learn a wrapper from three generated pages and extract a fourth.

use fuzzwrap::evaluator::{generate_corpus, AnomalyProfile};
use fuzzwrap::{extract, train, WrapperConfig};

fn main() {
    let corpus = generate_corpus(&AnomalyProfile::regular(), 4, 7).unwrap();
    let model = train(&corpus.training_pages(3), &WrapperConfig::default()).unwrap();
    println!("moyL = {}, {} separators", model.moyl.get(), model.separators.len());

    let page = &corpus.pages[3];
    let result = extract(&page.labels.page_id, &page.html, &model).unwrap();
    println!("global zone {} (error {:+.3})", result.global.span, result.global.begin_error);
    for tuple in &result.tuples {
        let values: Vec<String> = tuple
            .attributes
            .iter()
            .map(|(name, values)| format!("{name}={}", values[0].text))
            .collect();
        println!("  {} {}", tuple.span, values.join(", "));
    }
}
