#![allow(dead_code)]

use std::fs;
use std::path::PathBuf;

use fuzzwrap::evaluator::GoldCorpus;
use fuzzwrap::page_model::LabelFile;
use fuzzwrap::TrainingPage;

pub fn listing_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures/listing")
}

/// The three labelled listing pages.
pub fn listing_pages() -> Vec<TrainingPage> {
    GoldCorpus::load(&listing_dir()).expect("fixture corpus").training_pages(usize::MAX)
}

/// Extra page whose global begin is preceded by two words, a list tag and a tag.
pub fn probe_page() -> TrainingPage {
    let file: LabelFile =
        serde_json::from_str(&fs::read_to_string(listing_dir().join("probe.json")).unwrap()).unwrap();
    let entry = &file.pages[0];
    TrainingPage { html: fs::read_to_string(listing_dir().join(&entry.html_path)).unwrap(), labels: entry.labels() }
}

/// Every HTML file shipped under `fixtures/`.
pub fn fixture_html() -> Vec<(String, String)> {
    let mut out: Vec<(String, String)> = fs::read_dir(listing_dir())
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "html"))
        .map(|p| (p.display().to_string(), fs::read_to_string(&p).unwrap()))
        .collect();
    out.sort();
    out
}
