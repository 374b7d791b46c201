//! Seeded generator of labelled listing pages with injected anomalies.
//!
//! Pages list countries and their dialing codes:
//!
//! ```text
//! <LI><B>Congo</B> : <I>242</I>
//! ```
//!
//! Each anomaly is applied to an exact share of the records (the rate times
//! the record count, rounded), so realised rates match the profile up to
//! rounding.

use std::fs;
use std::io;
use std::path::Path;

use rand::seq::index::sample;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::induction::TrainingPage;
use crate::page_model::{AttributeLabel, LabelEntry, LabelFile, Span, ZoneLabels};

const COUNTRIES: &[(&str, &str)] = &[
    ("Congo", "242"),
    ("Chad", "235"),
    ("Cuba", "53"),
    ("Chile", "56"),
    ("Peru", "51"),
    ("Egypt", "20"),
    ("Ghana", "233"),
    ("Kenya", "254"),
    ("Mali", "223"),
    ("Niger", "227"),
    ("Oman", "968"),
    ("Qatar", "974"),
    ("Spain", "34"),
    ("Sweden", "46"),
    ("Tunisia", "216"),
    ("Togo", "228"),
    ("Uganda", "256"),
    ("Yemen", "967"),
    ("Zambia", "260"),
    ("Bolivia", "591"),
    ("Brazil", "55"),
    ("Canada", "1"),
    ("Denmark", "45"),
    ("France", "33"),
    ("Gabon", "241"),
    ("Haiti", "509"),
    ("India", "91"),
    ("Japan", "81"),
    ("Libya", "218"),
    ("Morocco", "212"),
    ("Nepal", "977"),
    ("Panama", "507"),
];

const TYPO_SUBSTITUTES: &[char] = &[';', '|', '-', '/', '='];

/// Anomaly rates in `[0, 1]` and the records-per-page range.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnomalyProfile {
    pub missing_attribute: f64,
    pub permutation: f64,
    pub multi_value: f64,
    pub typo: f64,
    pub min_records: usize,
    pub max_records: usize,
}

impl Default for AnomalyProfile {
    fn default() -> Self {
        AnomalyProfile::regular()
    }
}

impl AnomalyProfile {
    /// No anomalies at all.
    pub fn regular() -> Self {
        AnomalyProfile {
            missing_attribute: 0.0,
            permutation: 0.0,
            multi_value: 0.0,
            typo: 0.0,
            min_records: 5,
            max_records: 12,
        }
    }

    /// Named presets used by the CLI and the examples.
    pub fn preset(name: &str) -> Option<Self> {
        let base = AnomalyProfile::regular();
        Some(match name {
            "regular" => base,
            "missing" => AnomalyProfile { missing_attribute: 0.2, ..base },
            "permutation" => AnomalyProfile { permutation: 0.2, ..base },
            "mixed" => AnomalyProfile { missing_attribute: 0.2, permutation: 0.2, ..base },
            "noisy" => AnomalyProfile {
                missing_attribute: 0.1,
                permutation: 0.1,
                multi_value: 0.1,
                typo: 0.1,
                ..base
            },
            _ => return None,
        })
    }

    pub fn validate(&self) -> Result<(), CorpusError> {
        for (name, rate) in [
            ("missing_attribute", self.missing_attribute),
            ("permutation", self.permutation),
            ("multi_value", self.multi_value),
            ("typo", self.typo),
        ] {
            if !(0.0..=1.0).contains(&rate) {
                return Err(CorpusError::InvalidRate { name: name.to_string(), rate });
            }
        }
        if self.min_records == 0 || self.min_records > self.max_records {
            return Err(CorpusError::InvalidRecordRange { min: self.min_records, max: self.max_records });
        }
        Ok(())
    }
}

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("rate `{name}` = {rate} is outside [0, 1]")]
    InvalidRate { name: String, rate: f64 },
    #[error("invalid records-per-page range {min}..={max}")]
    InvalidRecordRange { min: usize, max: usize },
    #[error("corpus i/o: {0}")]
    Io(#[from] io::Error),
    #[error("corpus format: {0}")]
    Format(#[from] serde_json::Error),
}

/// How many records received each anomaly.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnomalyTally {
    pub records: usize,
    pub missing_attribute: usize,
    pub permutation: usize,
    pub multi_value: usize,
    pub typo: usize,
}

impl AnomalyTally {
    pub fn rate(&self, count: usize) -> f64 {
        if self.records == 0 {
            0.0
        } else {
            count as f64 / self.records as f64
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GoldPage {
    pub html: String,
    pub labels: ZoneLabels,
}

impl From<GoldPage> for TrainingPage {
    fn from(page: GoldPage) -> Self {
        TrainingPage { html: page.html, labels: page.labels }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GoldCorpus {
    pub profile: AnomalyProfile,
    pub seed: u64,
    pub tally: AnomalyTally,
    pub pages: Vec<GoldPage>,
}

impl GoldCorpus {
    pub fn training_pages(&self, count: usize) -> Vec<TrainingPage> {
        self.pages.iter().take(count).cloned().map(Into::into).collect()
    }

    pub fn total_records(&self) -> usize {
        self.pages.iter().map(|p| p.labels.records.len()).sum()
    }

    /// Write `page_NNN.html` files, `labels.json` and `corpus.json` into `dir`.
    pub fn save(&self, dir: &Path) -> Result<(), CorpusError> {
        fs::create_dir_all(dir)?;
        let mut entries = Vec::with_capacity(self.pages.len());
        for page in &self.pages {
            let file = format!("{}.html", page.labels.page_id);
            fs::write(dir.join(&file), &page.html)?;
            entries.push(LabelEntry::new(file, page.labels.clone()));
        }
        let labels = serde_json::to_string_pretty(&LabelFile::new(entries))?;
        fs::write(dir.join("labels.json"), labels + "\n")?;
        let meta = CorpusMeta { profile: self.profile.clone(), seed: self.seed, tally: self.tally };
        fs::write(dir.join("corpus.json"), serde_json::to_string_pretty(&meta)? + "\n")?;
        Ok(())
    }

    /// Read a corpus directory written by [`GoldCorpus::save`]. `corpus.json`
    /// is optional; without it the profile is reported as regular.
    pub fn load(dir: &Path) -> Result<Self, CorpusError> {
        let labels: LabelFile = serde_json::from_str(&fs::read_to_string(dir.join("labels.json"))?)?;
        let meta_path = dir.join("corpus.json");
        let meta: CorpusMeta = if meta_path.exists() {
            serde_json::from_str(&fs::read_to_string(meta_path)?)?
        } else {
            CorpusMeta::default()
        };
        let pages = labels
            .pages
            .iter()
            .map(|entry| {
                Ok(GoldPage { html: fs::read_to_string(dir.join(&entry.html_path))?, labels: entry.labels() })
            })
            .collect::<Result<Vec<_>, io::Error>>()?;
        Ok(GoldCorpus { profile: meta.profile, seed: meta.seed, tally: meta.tally, pages })
    }
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
struct CorpusMeta {
    profile: AnomalyProfile,
    seed: u64,
    tally: AnomalyTally,
}

#[derive(Debug, Clone, Default)]
struct RecordPlan {
    missing: Option<Attr>,
    permuted: bool,
    multi_value: bool,
    typo: Option<char>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Attr {
    Country,
    Code,
}

/// Generate `n_pages` labelled pages. Identical arguments give identical corpora.
pub fn generate_corpus(profile: &AnomalyProfile, n_pages: usize, seed: u64) -> Result<GoldCorpus, CorpusError> {
    profile.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let counts: Vec<usize> =
        (0..n_pages).map(|_| rng.gen_range(profile.min_records..=profile.max_records)).collect();
    let total: usize = counts.iter().sum();

    let quota = |rate: f64, available: usize| ((rate * total as f64).round() as usize).min(available);
    let mut plans = vec![RecordPlan::default(); total];

    let missing = sample(&mut rng, total, quota(profile.missing_attribute, total)).into_vec();
    for &i in &missing {
        plans[i].missing = Some(if rng.gen_bool(0.5) { Attr::Country } else { Attr::Code });
    }
    // Permutations and typos need both attributes present.
    let complete: Vec<usize> = (0..total).filter(|&i| plans[i].missing.is_none()).collect();
    for i in pick(&mut rng, &complete, quota(profile.permutation, complete.len())) {
        plans[i].permuted = true;
    }
    for i in pick(&mut rng, &complete, quota(profile.typo, complete.len())) {
        plans[i].typo = Some(*TYPO_SUBSTITUTES.choose(&mut rng).expect("non-empty"));
    }
    for i in sample(&mut rng, total, quota(profile.multi_value, total)).into_vec() {
        plans[i].multi_value = true;
    }

    let tally = AnomalyTally {
        records: total,
        missing_attribute: plans.iter().filter(|p| p.missing.is_some()).count(),
        permutation: plans.iter().filter(|p| p.permuted).count(),
        multi_value: plans.iter().filter(|p| p.multi_value).count(),
        typo: plans.iter().filter(|p| p.typo.is_some()).count(),
    };

    let mut pages = Vec::with_capacity(n_pages);
    let mut plan_iter = plans.into_iter();
    for (index, &count) in counts.iter().enumerate() {
        let page_plans: Vec<RecordPlan> = plan_iter.by_ref().take(count).collect();
        pages.push(render_page(&mut rng, index, &page_plans));
    }
    Ok(GoldCorpus { profile: profile.clone(), seed, tally, pages })
}

fn pick(rng: &mut ChaCha8Rng, from: &[usize], amount: usize) -> Vec<usize> {
    sample(rng, from.len(), amount).into_iter().map(|k| from[k]).collect()
}

/// Builds page text while tracking character offsets.
struct PageWriter {
    text: String,
    chars: usize,
}

impl PageWriter {
    fn push(&mut self, s: &str) -> Span {
        let start = self.chars;
        self.text.push_str(s);
        self.chars += s.chars().count();
        Span::new(start, self.chars)
    }
}

fn render_page(rng: &mut ChaCha8Rng, index: usize, plans: &[RecordPlan]) -> GoldPage {
    let page_id = format!("page_{index:03}");
    let mut w = PageWriter { text: String::new(), chars: 0 };
    w.push("<HTML>\n<HEAD><TITLE>Country Codes</TITLE></HEAD>\n<BODY>\n");
    w.push(&format!("<H1>International Dialing Codes</H1>\n<P>Listing {} of the directory\n", index + 1));
    let list_start = w.push("<UL>\n").start;

    let mut records = Vec::with_capacity(plans.len());
    let mut attributes = Vec::with_capacity(plans.len());
    let entries: Vec<&(&str, &str)> = COUNTRIES.choose_multiple(rng, plans.len().min(COUNTRIES.len())).collect();
    for (k, plan) in plans.iter().enumerate() {
        if k > 0 {
            w.push("\n");
        }
        let (country, code) = *entries[k % entries.len()];
        let start = w.push("<LI>").start;
        let mut attrs = Vec::new();
        let mut order = vec![Attr::Country, Attr::Code];
        if plan.permuted {
            order.reverse();
        }
        order.retain(|a| Some(*a) != plan.missing);
        for (pos, attr) in order.iter().enumerate() {
            if pos > 0 {
                let delimiter = match plan.typo {
                    Some(c) => format!(" {c} "),
                    None => " : ".to_string(),
                };
                w.push(&delimiter);
            }
            let last = pos + 1 == order.len();
            match attr {
                Attr::Country => {
                    w.push("<B>");
                    attrs.push(AttributeLabel { name: "country".into(), span: w.push(country) });
                    w.push("</B>");
                    if plan.multi_value && last {
                        w.push(", <B>");
                        let alias = format!("{country}ia");
                        attrs.push(AttributeLabel { name: "country".into(), span: w.push(&alias) });
                        w.push("</B>");
                    }
                }
                Attr::Code => {
                    w.push("<I>");
                    attrs.push(AttributeLabel { name: "code".into(), span: w.push(code) });
                    w.push("</I>");
                    if plan.multi_value && last {
                        w.push(", <I>");
                        let extra = format!("{}", rng.gen_range(100..1000));
                        attrs.push(AttributeLabel { name: "code".into(), span: w.push(&extra) });
                        w.push("</I>");
                    }
                }
            }
        }
        records.push(Span::new(start, w.chars));
        attributes.push(attrs);
    }
    let list_end = w.push("\n</UL>").end;
    w.push("\n<HR>\n<ADDRESS>Updated weekly</ADDRESS>\n</BODY>\n</HTML>\n");

    let global = Span::new(list_start, list_end);
    GoldPage { html: w.text, labels: ZoneLabels { page_id, global, records, attributes } }
}
