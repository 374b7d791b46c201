//! Pages, labels and models in a file-backed store that survives reopening.

use fuzzwrap::evaluator::{generate_corpus, AnomalyProfile};
use fuzzwrap::store::ProjectStore;
use fuzzwrap::{extract, WrapperConfig};

fn main() {
    let root = std::env::temp_dir().join(format!("fuzzwrap-store-{}", std::process::id()));
    let corpus = generate_corpus(&AnomalyProfile::regular(), 4, 1).unwrap();

    let ids: Vec<String> = {
        let store = ProjectStore::open(&root).unwrap();
        corpus
            .pages
            .iter()
            .map(|page| {
                let id = store.put_page(&page.html).unwrap();
                store.put_labels(&id, &page.labels).unwrap();
                id
            })
            .collect()
    };

    let store = ProjectStore::open(&root).unwrap();
    let (model_id, model) = store.train(&ids[..3], &WrapperConfig::default()).unwrap();
    let (again, _) = store.train(&ids[..3], &WrapperConfig::default()).unwrap();
    println!("model {model_id} (retrain gives {again})");

    let result = extract(&ids[3], &store.page(&ids[3]).unwrap(), &model).unwrap();
    store.put_result(&model_id, &result).unwrap();
    let index = store.index();
    println!("{} pages, {} models, {} results in {}", index.pages.len(), index.models.len(), index.results.len(), root.display());
    std::fs::remove_dir_all(&root).unwrap();
}
