//! File-backed project store used by the HTTP service.
//!
//! Layout under the root directory:
//!
//! ```text
//! index.json              id -> file map, rewritten after every change
//! pages/<id>.html         uploaded pages, id = content hash
//! labels/<id>.json        validated ZoneLabels of page <id>
//! models/<id>.json        wrapper models, id = hash of the model file
//! results/<model>_<page>.json
//! corpora/<id>/           gold corpora in the generator's directory format
//! ```
//!
//! All writes go through one lock, so label writes to a page and model
//! writes are serialized. Files are written to a temporary name and renamed.

use std::collections::BTreeMap;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::evaluator::corpus::{CorpusError, GoldCorpus};
use crate::extractor::ExtractionResult;
use crate::induction::{train, TrainError, TrainingPage, WrapperConfig, WrapperModel};
use crate::page_model::{validate_labels, LabelError, ZoneLabels};
use crate::tokenizer::tokenize;

/// Environment variable overriding the store root.
pub const STORE_ENV: &str = "FUZZWRAP_STORE";

const INDEX_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum StoreError {
    #[error("unknown page `{0}`")]
    UnknownPage(String),
    #[error("unknown model `{0}`")]
    UnknownModel(String),
    #[error("unknown corpus `{0}`")]
    UnknownCorpus(String),
    #[error("page `{0}` has no labels")]
    MissingLabels(String),
    #[error(transparent)]
    Label(#[from] LabelError),
    #[error(transparent)]
    Train(#[from] TrainError),
    #[error(transparent)]
    Corpus(#[from] CorpusError),
    #[error("store i/o: {0}")]
    Io(#[from] io::Error),
    #[error("store format: {0}")]
    Format(#[from] serde_json::Error),
}

/// Short content hash used for every id in the store.
pub fn content_id(bytes: &[u8]) -> String {
    hex::encode(&Sha256::digest(bytes)[..8])
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PageEntry {
    pub html: String,
    pub labels: Option<String>,
}

/// The index document, `index.json`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StoreIndex {
    pub version: u32,
    pub pages: BTreeMap<String, PageEntry>,
    pub models: BTreeMap<String, String>,
    pub results: BTreeMap<String, String>,
    pub corpora: BTreeMap<String, String>,
}

impl Default for StoreIndex {
    fn default() -> Self {
        StoreIndex {
            version: INDEX_VERSION,
            pages: BTreeMap::new(),
            models: BTreeMap::new(),
            results: BTreeMap::new(),
            corpora: BTreeMap::new(),
        }
    }
}

#[derive(Debug)]
pub struct ProjectStore {
    root: PathBuf,
    index: Mutex<StoreIndex>,
}

fn write_atomic(path: &Path, contents: &[u8]) -> io::Result<()> {
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, contents)?;
    fs::rename(tmp, path)
}

fn stems(dir: &Path, extension: &str) -> io::Result<Vec<String>> {
    let mut out = Vec::new();
    for entry in fs::read_dir(dir)? {
        let path = entry?.path();
        if path.extension().and_then(|e| e.to_str()) == Some(extension) {
            if let Some(stem) = path.file_stem().and_then(|s| s.to_str()) {
                out.push(stem.to_string());
            }
        }
    }
    Ok(out)
}

impl ProjectStore {
    /// Open (or create) a store and reconcile its index with the files on disk.
    pub fn open(root: impl Into<PathBuf>) -> Result<Self, StoreError> {
        let root = root.into();
        for dir in ["pages", "labels", "models", "results", "corpora"] {
            fs::create_dir_all(root.join(dir))?;
        }
        let index_path = root.join("index.json");
        let mut index: StoreIndex = if index_path.exists() {
            serde_json::from_str(&fs::read_to_string(&index_path)?)?
        } else {
            StoreIndex::default()
        };

        let exists = |rel: &String| root.join(rel).exists();
        index.pages.retain(|_, e| exists(&e.html));
        for entry in index.pages.values_mut() {
            if entry.labels.as_ref().is_some_and(|l| !exists(l)) {
                entry.labels = None;
            }
        }
        index.models.retain(|_, f| exists(f));
        index.results.retain(|_, f| exists(f));
        index.corpora.retain(|_, d| exists(d));
        for id in stems(&root.join("pages"), "html")? {
            index.pages.entry(id.clone()).or_insert_with(|| PageEntry { html: format!("pages/{id}.html"), labels: None });
        }
        for id in stems(&root.join("labels"), "json")? {
            if let Some(entry) = index.pages.get_mut(&id) {
                entry.labels = Some(format!("labels/{id}.json"));
            }
        }
        for id in stems(&root.join("models"), "json")? {
            index.models.entry(id.clone()).or_insert(format!("models/{id}.json"));
        }

        let store = ProjectStore { root, index: Mutex::new(index) };
        store.save_index(&store.index.lock().expect("index lock"))?;
        Ok(store)
    }

    /// Root from `FUZZWRAP_STORE`, falling back to `default`.
    pub fn root_from_env(default: impl Into<PathBuf>) -> PathBuf {
        std::env::var_os(STORE_ENV).map_or_else(|| default.into(), PathBuf::from)
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn index(&self) -> StoreIndex {
        self.index.lock().expect("index lock").clone()
    }

    fn save_index(&self, index: &StoreIndex) -> Result<(), StoreError> {
        let text = serde_json::to_string_pretty(index)? + "\n";
        write_atomic(&self.root.join("index.json"), text.as_bytes())?;
        Ok(())
    }

    fn read(&self, rel: &str) -> io::Result<String> {
        fs::read_to_string(self.root.join(rel))
    }

    /// Store a page; uploading the same HTML twice yields the same id.
    pub fn put_page(&self, html: &str) -> Result<String, StoreError> {
        let id = content_id(html.as_bytes());
        let mut index = self.index.lock().expect("index lock");
        if !index.pages.contains_key(&id) {
            let rel = format!("pages/{id}.html");
            write_atomic(&self.root.join(&rel), html.as_bytes())?;
            index.pages.insert(id.clone(), PageEntry { html: rel, labels: None });
            self.save_index(&index)?;
        }
        Ok(id)
    }

    pub fn page(&self, id: &str) -> Result<String, StoreError> {
        let rel = self.index.lock().expect("index lock").pages.get(id).map(|e| e.html.clone());
        let rel = rel.ok_or_else(|| StoreError::UnknownPage(id.to_string()))?;
        Ok(self.read(&rel)?)
    }

    /// Validate and store labels for a page. The stored labels carry the
    /// page id and are sorted.
    pub fn put_labels(&self, id: &str, labels: &ZoneLabels) -> Result<ZoneLabels, StoreError> {
        let html = self.page(id)?;
        let labels = ZoneLabels { page_id: id.to_string(), ..labels.clone() };
        let valid = validate_labels(&html, &tokenize(&html), &labels)?;
        let mut index = self.index.lock().expect("index lock");
        let rel = format!("labels/{id}.json");
        write_atomic(&self.root.join(&rel), (serde_json::to_string_pretty(&valid)? + "\n").as_bytes())?;
        index.pages.get_mut(id).ok_or_else(|| StoreError::UnknownPage(id.to_string()))?.labels = Some(rel);
        self.save_index(&index)?;
        Ok(valid)
    }

    pub fn labels(&self, id: &str) -> Result<Option<ZoneLabels>, StoreError> {
        let entry = self.index.lock().expect("index lock").pages.get(id).cloned();
        let entry = entry.ok_or_else(|| StoreError::UnknownPage(id.to_string()))?;
        match entry.labels {
            Some(rel) => Ok(Some(serde_json::from_str(&self.read(&rel)?)?)),
            None => Ok(None),
        }
    }

    /// Training pages for the given ids, in the given order.
    pub fn training_pages(&self, ids: &[String]) -> Result<Vec<TrainingPage>, StoreError> {
        ids.iter()
            .map(|id| {
                let html = self.page(id)?;
                let labels = self.labels(id)?.ok_or_else(|| StoreError::MissingLabels(id.clone()))?;
                Ok(TrainingPage { html, labels })
            })
            .collect()
    }

    /// Train on stored pages and store the model.
    pub fn train(&self, ids: &[String], config: &WrapperConfig) -> Result<(String, WrapperModel), StoreError> {
        let model = train(&self.training_pages(ids)?, config)?;
        let id = self.put_model(&model)?;
        Ok((id, model))
    }

    /// Store a model under the hash of its serialized form.
    pub fn put_model(&self, model: &WrapperModel) -> Result<String, StoreError> {
        let text = model.to_json();
        let id = content_id(text.as_bytes());
        let mut index = self.index.lock().expect("index lock");
        if !index.models.contains_key(&id) {
            let rel = format!("models/{id}.json");
            write_atomic(&self.root.join(&rel), text.as_bytes())?;
            index.models.insert(id.clone(), rel);
            self.save_index(&index)?;
        }
        Ok(id)
    }

    pub fn model(&self, id: &str) -> Result<WrapperModel, StoreError> {
        let rel = self.index.lock().expect("index lock").models.get(id).cloned();
        let rel = rel.ok_or_else(|| StoreError::UnknownModel(id.to_string()))?;
        Ok(WrapperModel::from_json(&self.read(&rel)?)?)
    }

    pub fn put_result(&self, model_id: &str, result: &ExtractionResult) -> Result<(), StoreError> {
        let key = format!("{model_id}_{}", result.page_id);
        let rel = format!("results/{key}.json");
        let mut index = self.index.lock().expect("index lock");
        write_atomic(&self.root.join(&rel), result.to_json().as_bytes())?;
        index.results.insert(key, rel);
        self.save_index(&index)?;
        Ok(())
    }

    /// Store a gold corpus; the id hashes its pages and labels.
    pub fn put_corpus(&self, corpus: &GoldCorpus) -> Result<String, StoreError> {
        let mut hasher = Sha256::new();
        for page in &corpus.pages {
            hasher.update(page.html.as_bytes());
            hasher.update(serde_json::to_vec(&page.labels)?);
        }
        let id = hex::encode(&hasher.finalize()[..8]);
        let mut index = self.index.lock().expect("index lock");
        if !index.corpora.contains_key(&id) {
            let rel = format!("corpora/{id}");
            corpus.save(&self.root.join(&rel))?;
            index.corpora.insert(id.clone(), rel);
            self.save_index(&index)?;
        }
        Ok(id)
    }

    pub fn corpus(&self, id: &str) -> Result<GoldCorpus, StoreError> {
        let rel = self.index.lock().expect("index lock").corpora.get(id).cloned();
        let rel = rel.ok_or_else(|| StoreError::UnknownCorpus(id.to_string()))?;
        Ok(GoldCorpus::load(&self.root.join(rel))?)
    }
}
