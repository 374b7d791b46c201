//! Write a labelled synthetic corpus to a directory.
//!
//! ```text
//! cargo run --example generate_corpus -- /tmp/corpus noisy 3
//! ```

use std::path::PathBuf;

use fuzzwrap::evaluator::{generate_corpus, AnomalyProfile};

fn main() {
    let mut args = std::env::args().skip(1);
    let dir = PathBuf::from(args.next().unwrap_or_else(|| "target/example-corpus".into()));
    let preset = args.next().unwrap_or_else(|| "mixed".into());
    let seed: u64 = args.next().map_or(0, |s| s.parse().expect("seed"));

    let profile = AnomalyProfile::preset(&preset).expect("regular, missing, permutation, mixed or noisy");
    let corpus = generate_corpus(&profile, 10, seed).unwrap();
    corpus.save(&dir).unwrap();
    println!("{} pages, {} records -> {}", corpus.pages.len(), corpus.total_records(), dir.display());
    println!("{:?}", corpus.tally);
}
