//! Train on the three listing fixtures and print the matrix of the left
//! detector of the global-zone start, one row per distance.

use std::path::Path;

use fuzzwrap::evaluator::GoldCorpus;
use fuzzwrap::page_model::Edge;
use fuzzwrap::{train, TokenClass, WrapperConfig, ZoneKind};

fn main() {
    let fixtures = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/listing");
    let pages = GoldCorpus::load(&fixtures).expect("fixtures").training_pages(3);
    let model = train(&pages, &WrapperConfig::default()).unwrap();
    let detector = &model.separator(&ZoneKind::Global, Edge::Begin).unwrap().left;

    print!("dist");
    for class in TokenClass::ALL {
        print!("{:>7}", class.label());
    }
    println!();
    for distance in 0..=detector.matrix.moyl() {
        print!("{distance:>4}");
        for class in TokenClass::ALL {
            print!("{:>7}", detector.matrix.count(distance, class));
        }
        println!();
    }
    let c = detector.calibration;
    println!("n = {}, c_min = {:.3}, c_max = {:.3}, c_moy = {:.3}", detector.matrix.n_instances, c.c_min, c.c_max, c.c_moy);
}
