//! Score the fuzzy wrapper and the exact-delimiter baseline on each preset.

use fuzzwrap::evaluator::{evaluate, generate_corpus, render_table, AnomalyProfile, ExactDelimiterWrapper};
use fuzzwrap::{train, WrapperConfig};

fn main() {
    for preset in ["regular", "missing", "permutation", "mixed", "noisy"] {
        let corpus = generate_corpus(&AnomalyProfile::preset(preset).unwrap(), 20, 11).unwrap();
        let training = corpus.training_pages(3);
        let model = train(&training, &WrapperConfig::default()).unwrap();
        let fuzzy = evaluate(&corpus, &model).unwrap();
        let baseline = evaluate(&corpus, &ExactDelimiterWrapper::learn(&training)).unwrap();
        println!("== {preset} ({:?})", corpus.tally);
        print!("{}", render_table(&[("fuzzy".into(), fuzzy), ("baseline".into(), baseline)]));
        println!();
    }
}
