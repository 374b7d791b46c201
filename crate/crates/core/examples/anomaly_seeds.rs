//! Recall of both wrappers per seed on 20% missing / 20% permuted corpora.

use fuzzwrap::evaluator::{evaluate, generate_corpus, AnomalyProfile, ExactDelimiterWrapper};
use fuzzwrap::{train, WrapperConfig};

fn main() {
    let profile = AnomalyProfile::preset("mixed").unwrap();
    println!("seed  tuples  fuzzy  baseline  failed-pages");
    for seed in 0..12 {
        let corpus = generate_corpus(&profile, 10, seed).unwrap();
        let training = corpus.training_pages(3);
        let model = train(&training, &WrapperConfig::default()).unwrap();
        let f = evaluate(&corpus, &model).unwrap();
        let b = evaluate(&corpus, &ExactDelimiterWrapper::learn(&training)).unwrap();
        println!("{seed:>4}  {:>6}  {:.3}  {:>8.3}  {:?}", f.total, f.recall, b.recall, f.failed_pages);
    }
}
