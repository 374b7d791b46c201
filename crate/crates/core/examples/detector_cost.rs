//! Token-by-token cost of one left window against a learned matrix, and how
//! the decay width changes it.

use std::path::Path;

use fuzzwrap::evaluator::GoldCorpus;
use fuzzwrap::induction::{detector_cost, position_truth, occurrence_truth};
use fuzzwrap::page_model::{DetectorWindow, Edge, Side};
use fuzzwrap::{train, TokenClass, WrapperConfig, ZoneKind};

fn main() {
    let fixtures = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/listing");
    let pages = GoldCorpus::load(&fixtures).unwrap().training_pages(3);
    let model = train(&pages, &WrapperConfig::default()).unwrap();
    let m = &model.separator(&ZoneKind::Global, Edge::Begin).unwrap().left.matrix;

    use TokenClass::*;
    let window = DetectorWindow {
        side: Side::Left,
        zone: ZoneKind::Global,
        edge: Edge::Begin,
        classes: vec![C1Alph, C1Alph, ListOpen, HtmlOpen],
    };
    for distance in (1..=window.len()).rev() {
        let class = window.class_at(distance);
        let (p, o) = (position_truth(m, class, distance, 2), occurrence_truth(m, class, distance));
        println!("{class:<6} @{distance}: position {p:.3} x occurrence {o:.3} = {:.3}", p * o);
    }
    for width in 1..=4 {
        println!("width {width}: cost {:.4}", detector_cost(m, &window, width));
    }
}
