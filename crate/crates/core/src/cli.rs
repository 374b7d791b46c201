//! Command-line front end.
//!
//! ```text
//! fuzzwrap label validate --labels FILE
//! fuzzwrap train --labels FILE [--pages DIR] [--first N] [--tau T] [--width W] --out MODEL
//! fuzzwrap extract --model MODEL --page HTML [--page-id ID] [--out RESULT]
//! fuzzwrap eval --model MODEL --corpus DIR [--baseline N] [--out REPORT]
//! fuzzwrap corpus gen --profile NAME --seed S [--pages N] --out DIR
//! fuzzwrap serve [--port N] [--store DIR]
//! ```
//!
//! Exit status is 0 on success, 2 for usage errors and unreadable input
//! paths, 1 for everything else. Failures print one JSON line on stderr.

use std::fs;
use std::io;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;
use tracing::level_filters::LevelFilter;

use crate::evaluator::{evaluate, render_table, AnomalyProfile, ExactDelimiterWrapper, GoldCorpus};
use crate::extractor::extract;
use crate::induction::{train, TrainingPage, WrapperConfig, WrapperModel};
use crate::page_model::{validate_labels, LabelFile};
use crate::store::{ProjectStore, STORE_ENV};
use crate::tokenizer::tokenize;

#[derive(Debug, Parser)]
#[command(name = "fuzzwrap", version, about = "Trainable fuzzy web wrapper")]
pub struct Cli {
    /// Maximum log level: off, error, warn, info, debug or trace.
    #[arg(long, global = true, default_value = "warn")]
    pub log_level: LevelFilter,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Label file utilities.
    #[command(subcommand)]
    Label(LabelCommand),
    /// Learn a wrapper model from labelled pages.
    Train(TrainArgs),
    /// Extract tuples from one page.
    Extract(ExtractArgs),
    /// Score a model on a labelled corpus.
    Eval(EvalArgs),
    /// Synthetic corpora.
    #[command(subcommand)]
    Corpus(CorpusCommand),
    /// Run the HTTP service.
    Serve(ServeArgs),
}

#[derive(Debug, Subcommand)]
pub enum LabelCommand {
    /// Check every page of a label file against its HTML.
    Validate {
        #[arg(long)]
        labels: PathBuf,
        /// Directory the HTML paths are relative to; defaults to the directory holding the label file.
        #[arg(long)]
        pages: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    #[arg(long)]
    pub labels: PathBuf,
    #[arg(long)]
    pub pages: Option<PathBuf>,
    /// Train on the first N pages of the label file only.
    #[arg(long)]
    pub first: Option<usize>,
    #[arg(long)]
    pub tau: Option<f64>,
    #[arg(long)]
    pub width: Option<u32>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct ExtractArgs {
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long)]
    pub page: PathBuf,
    /// Page id written into the result; defaults to the file stem.
    #[arg(long)]
    pub page_id: Option<String>,
    /// Result file; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[arg(long)]
    pub model: PathBuf,
    /// Corpus directory holding `labels.json` and the pages.
    #[arg(long)]
    pub corpus: PathBuf,
    /// Also score the exact-delimiter baseline learned from the first N pages.
    #[arg(long)]
    pub baseline: Option<usize>,
    /// JSON report file.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum CorpusCommand {
    /// Generate a labelled corpus directory.
    Gen {
        /// regular, missing, permutation, mixed or noisy.
        #[arg(long, default_value = "regular")]
        profile: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 10)]
        pages: usize,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Debug, Args)]
pub struct ServeArgs {
    #[arg(long, default_value_t = 8080)]
    pub port: u16,
    #[arg(long, env = STORE_ENV, default_value = "fuzzwrap-store")]
    pub store: PathBuf,
}

/// A failed command: exit status plus the JSON error line.
#[derive(Debug)]
pub struct CliError {
    pub status: u8,
    pub name: String,
    pub message: String,
}

impl CliError {
    fn usage(name: &str, message: impl Into<String>) -> Self {
        CliError { status: 2, name: name.into(), message: message.into() }
    }

    fn domain(name: &str, message: impl ToString) -> Self {
        CliError { status: 1, name: name.into(), message: message.to_string() }
    }

    pub fn to_json(&self) -> String {
        json!({ "error": self.name, "message": self.message }).to_string()
    }
}

/// Read an input file; a missing or unreadable path is a usage error.
fn read_input(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::usage("InputNotFound", format!("{}: {e}", path.display())))
}

fn write_output(path: &Path, text: &str) -> Result<(), CliError> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(|e| CliError::domain("Io", e))?;
    }
    fs::write(path, text).map_err(|e| CliError::domain("Io", format!("{}: {e}", path.display())))
}

fn load_label_file(labels: &Path, pages: Option<&Path>) -> Result<Vec<TrainingPage>, CliError> {
    let file: LabelFile =
        serde_json::from_str(&read_input(labels)?).map_err(|e| CliError::domain("LabelFormat", e))?;
    let base = pages.map(Path::to_path_buf).unwrap_or_else(|| {
        labels.parent().map(Path::to_path_buf).unwrap_or_default()
    });
    file.pages
        .iter()
        .map(|entry| Ok(TrainingPage { html: read_input(&base.join(&entry.html_path))?, labels: entry.labels() }))
        .collect()
}

fn load_model(path: &Path) -> Result<WrapperModel, CliError> {
    WrapperModel::from_json(&read_input(path)?).map_err(|e| CliError::domain("ModelFormat", e))
}

fn label_validate(labels: &Path, pages: Option<&Path>, out: &mut impl io::Write) -> Result<(), CliError> {
    let pages = load_label_file(labels, pages)?;
    let mut first_error = None;
    for page in &pages {
        let line = match validate_labels(&page.html, &tokenize(&page.html), &page.labels) {
            Ok(valid) => json!({ "page_id": page.labels.page_id, "ok": true, "records": valid.records.len() }),
            Err(e) => {
                first_error.get_or_insert_with(|| CliError {
                    status: 1,
                    name: e.name().into(),
                    message: format!("page `{}`: {e}", page.labels.page_id),
                });
                json!({ "page_id": page.labels.page_id, "ok": false, "error": e.name(), "offset": e.offset(), "message": e.to_string() })
            }
        };
        writeln!(out, "{line}").map_err(|e| CliError::domain("Io", e))?;
    }
    first_error.map_or(Ok(()), Err)
}

fn train_cmd(args: &TrainArgs) -> Result<WrapperModel, CliError> {
    let mut pages = load_label_file(&args.labels, args.pages.as_deref())?;
    if let Some(n) = args.first {
        pages.truncate(n);
    }
    let mut config = WrapperConfig::default();
    if let Some(tau) = args.tau {
        config.tau = tau;
    }
    if let Some(width) = args.width {
        config.width = width;
    }
    let model = train(&pages, &config).map_err(|e| CliError::domain("TrainError", e))?;
    write_output(&args.out, &model.to_json())?;
    tracing::info!(pages = pages.len(), moyl = model.moyl.get(), out = %args.out.display(), "model written");
    Ok(model)
}

fn extract_cmd(args: &ExtractArgs, out: &mut impl io::Write) -> Result<(), CliError> {
    let model = load_model(&args.model)?;
    let html = read_input(&args.page)?;
    let page_id = args.page_id.clone().unwrap_or_else(|| {
        args.page.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default()
    });
    let result = extract(&page_id, &html, &model).map_err(|e| CliError::domain("GlobalZoneNotFound", e))?;
    match &args.out {
        Some(path) => write_output(path, &result.to_json()),
        None => writeln!(out, "{}", result.to_json()).map_err(|e| CliError::domain("Io", e)),
    }
}

fn eval_cmd(args: &EvalArgs, out: &mut impl io::Write) -> Result<(), CliError> {
    let model = load_model(&args.model)?;
    if !args.corpus.is_dir() {
        return Err(CliError::usage("InputNotFound", format!("{}: not a directory", args.corpus.display())));
    }
    let corpus = GoldCorpus::load(&args.corpus).map_err(|e| CliError::domain("CorpusError", e))?;
    let mut sets = vec![(
        "fuzzy".to_string(),
        evaluate(&corpus, &model).map_err(|e| CliError::domain("EvalError", e))?,
    )];
    if let Some(n) = args.baseline {
        let baseline = ExactDelimiterWrapper::learn(&corpus.training_pages(n));
        sets.push(("baseline".into(), evaluate(&corpus, &baseline).map_err(|e| CliError::domain("EvalError", e))?));
    }
    write!(out, "{}", render_table(&sets)).map_err(|e| CliError::domain("Io", e))?;
    if let Some(path) = &args.out {
        let report: serde_json::Map<String, serde_json::Value> =
            sets.iter().map(|(name, r)| (name.clone(), json!(r))).collect();
        write_output(path, &(serde_json::to_string_pretty(&report).expect("report serialises") + "\n"))?;
    }
    Ok(())
}

fn corpus_gen(profile: &str, seed: u64, pages: usize, dir: &Path) -> Result<(), CliError> {
    let profile = AnomalyProfile::preset(profile)
        .ok_or_else(|| CliError::usage("UnknownProfile", format!("unknown profile `{profile}`")))?;
    let corpus = crate::evaluator::generate_corpus(&profile, pages, seed).map_err(|e| CliError::domain("CorpusError", e))?;
    corpus.save(dir).map_err(|e| CliError::domain("CorpusError", e))
}

fn serve_cmd(args: &ServeArgs) -> Result<(), CliError> {
    let store = ProjectStore::open(&args.store).map_err(|e| CliError::domain("StoreError", e))?;
    let runtime = tokio::runtime::Runtime::new().map_err(|e| CliError::domain("Io", e))?;
    let addr = SocketAddr::from(([127, 0, 0, 1], args.port));
    runtime.block_on(crate::service::serve(store, addr)).map_err(|e| CliError::domain("Io", e))
}

/// Run one parsed command, writing normal output to `out`.
pub fn execute(cli: &Cli, out: &mut impl io::Write) -> Result<(), CliError> {
    match &cli.command {
        Command::Label(LabelCommand::Validate { labels, pages }) => label_validate(labels, pages.as_deref(), out),
        Command::Train(args) => train_cmd(args).map(drop),
        Command::Extract(args) => extract_cmd(args, out),
        Command::Eval(args) => eval_cmd(args, out),
        Command::Corpus(CorpusCommand::Gen { profile, seed, pages, out: dir }) => corpus_gen(profile, *seed, *pages, dir),
        Command::Serve(args) => serve_cmd(args),
    }
}

/// Parse the process arguments and run.
pub fn run() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let error = CliError::usage("UsageError", e.to_string().trim_end());
            eprintln!("{}", error.to_json());
            return ExitCode::from(2);
        }
    };
    tracing_subscriber::fmt().with_max_level(cli.log_level).with_writer(io::stderr).init();
    match execute(&cli, &mut io::stdout().lock()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.to_json());
            ExitCode::from(e.status)
        }
    }
}
