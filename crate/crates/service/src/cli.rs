//! Command-line interface. Usage errors exit with status 2, failures with 1.

use std::io::{BufRead, Write};
use std::net::SocketAddr;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use chrono::{DateTime, Utc};
use clap::{Args, Parser, Subcommand, ValueEnum};

use greylit_core::docmodel::{AccessClass, DocId, SourceType};
use greylit_core::ingest::load_tables;
use greylit_core::nlp::{ChunkGrammar, Extractor, Gazetteer};
use greylit_core::query::{formulate, run, StepOutcome};
use greylit_core::repo::{load_manifest, NewDocument, RefineRequest, RepoConfig, Repository};
use greylit_core::tablelabel::{resolve_cells, train_labeler, viterbi_label, LabelerModel, TrainingExample};

use crate::views::{search_view, IndicatorView, SearchView};

#[derive(Debug, Parser)]
#[command(name = "greylit", version, about = "Indicator extraction and refinement over a document repository")]
pub struct Cli {
    /// Repository directory.
    #[arg(long, global = true, env = "GREYLIT_REPO", default_value = ".")]
    pub repo: PathBuf,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Create a repository.
    Init {
        /// Configuration file copied into the repository.
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Add a document, or every document of a manifest.
    Ingest(IngestArgs),
    /// Rebuild derived data and the index, or extract records from a sentences file.
    Extract(ExtractArgs),
    /// Rank units for a query without recording it.
    Search(SearchArgs),
    /// Run a query and record it as a refinement step.
    #[command(alias = "query")]
    Refine(RefineArgs),
    /// List indicators in the ledger.
    Indicators {
        #[arg(long)]
        json: bool,
    },
    /// Print the indicator report.
    Report {
        #[arg(long, value_enum, default_value_t = ReportFormat::Json)]
        format: ReportFormat,
        /// Print the per-type totals table instead of the rows (CSV).
        #[arg(long)]
        totals: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Serve the HTTP API.
    Serve {
        #[arg(long, env = "GREYLIT_ADDR", default_value = "127.0.0.1:8080")]
        addr: SocketAddr,
        /// Allowed CORS origin; any origin when omitted.
        #[arg(long)]
        cors_origin: Option<String>,
    },
    /// Write the index snapshot.
    Snapshot {
        /// Destination; the repository's own snapshot when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Train or apply the table line labeler.
    #[command(subcommand)]
    Tablelabel(TablelabelCommand),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum TypeArg {
    Html,
    PdfText,
    Table,
}

impl From<TypeArg> for SourceType {
    fn from(t: TypeArg) -> Self {
        match t {
            TypeArg::Html => SourceType::Html,
            TypeArg::PdfText => SourceType::PdfText,
            TypeArg::Table => SourceType::Table,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum AccessArg {
    Open,
    SourceSpecific,
    Subscription,
}

impl From<AccessArg> for AccessClass {
    fn from(a: AccessArg) -> Self {
        match a {
            AccessArg::Open => AccessClass::Open,
            AccessArg::SourceSpecific => AccessClass::SourceSpecific,
            AccessArg::Subscription => AccessClass::Subscription,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ReportFormat {
    Csv,
    Json,
}

#[derive(Debug, Args)]
pub struct IngestArgs {
    /// Payload file.
    #[arg(required_unless_present = "manifest", conflicts_with = "manifest")]
    pub file: Option<PathBuf>,
    #[arg(long = "type", value_enum, required_unless_present = "manifest")]
    pub source_type: Option<TypeArg>,
    #[arg(long, required_unless_present = "manifest")]
    pub uri: Option<String>,
    #[arg(long, value_enum, default_value_t = AccessArg::Open)]
    pub access: AccessArg,
    #[arg(long)]
    pub id: Option<String>,
    /// Defaults to the file name.
    #[arg(long)]
    pub title: Option<String>,
    /// RFC 3339 timestamp; now when omitted.
    #[arg(long)]
    pub retrieved_at: Option<DateTime<Utc>>,
    /// JSON array of documents with payload paths relative to it.
    #[arg(long)]
    pub manifest: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ExtractArgs {
    /// Sentences file (JSON-lines of sentences, `{"text": ..}` objects or
    /// strings). Without it the repository is re-extracted.
    pub sentences: Option<PathBuf>,
    #[arg(long, requires = "sentences")]
    pub grammar: Option<PathBuf>,
    #[arg(long, requires = "sentences")]
    pub gazetteer: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SearchArgs {
    pub query: String,
    /// Keyword phrase; repeat for several.
    #[arg(long = "keywords", short = 'k')]
    pub keywords: Vec<String>,
    #[arg(long)]
    pub source: Option<String>,
    #[arg(long)]
    pub limit: Option<usize>,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct RefineArgs {
    pub indicator: String,
    #[arg(long = "keywords", short = 'k')]
    pub keywords: Vec<String>,
    #[arg(long)]
    pub source: Option<String>,
    /// Record the result as achieved.
    #[arg(long)]
    pub mark_achieved: bool,
    /// Indicator id; derived from the name when omitted.
    #[arg(long)]
    pub id: Option<String>,
    #[arg(long)]
    pub idempotency_key: Option<String>,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Subcommand)]
pub enum TablelabelCommand {
    /// Train a model from JSON-lines of `{grid, labels}`.
    Train {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 10)]
        epochs: usize,
    },
    /// Label a table file (JSON grid, CSV or HTML) and resolve its cells.
    Apply {
        #[arg(long)]
        model: Option<PathBuf>,
        table: PathBuf,
    },
}

fn open(root: &Path) -> Result<Repository> {
    Repository::open(root).with_context(|| format!("opening repository at {}", root.display()))
}

fn emit(out: &mut impl Write, text: &str) -> Result<()> {
    out.write_all(text.as_bytes())?;
    Ok(())
}

fn json_line(out: &mut impl Write, value: &impl serde::Serialize) -> Result<()> {
    serde_json::to_writer(&mut *out, value)?;
    writeln!(out)?;
    Ok(())
}

fn json_pretty(out: &mut impl Write, value: &impl serde::Serialize) -> Result<()> {
    serde_json::to_writer_pretty(&mut *out, value)?;
    writeln!(out)?;
    Ok(())
}

fn truncate(s: &str, n: usize) -> String {
    if s.chars().count() <= n {
        s.to_owned()
    } else {
        let cut: String = s.chars().take(n - 3).collect();
        format!("{cut}...")
    }
}

fn print_hits(out: &mut impl Write, view: &SearchView) -> Result<()> {
    writeln!(out, "query: {}", view.display)?;
    if view.hits.is_empty() {
        writeln!(out, "no hits")?;
        return Ok(());
    }
    writeln!(out, "{:>4}  {:>8}  {:>5}  {:<22}  {:<30}  {:<12}  text", "rank", "raw", "norm", "unit_id", "indicator", "value unit")?;
    for h in &view.hits {
        writeln!(
            out,
            "{:>4}  {:>8.4}  {:>5.2}  {:<22}  {:<30}  {:<12}  {}",
            h.rank,
            h.score.raw,
            h.score.normalized,
            h.unit_id,
            truncate(&h.indicator, 30),
            truncate(format!("{} {}", h.value, h.unit).trim(), 12),
            truncate(&h.text, 60)
        )?;
    }
    Ok(())
}

fn ingest(root: &Path, a: IngestArgs, out: &mut impl Write) -> Result<()> {
    let mut repo = open(root)?;
    let docs = match &a.manifest {
        Some(m) => load_manifest(m, a.retrieved_at.unwrap_or_else(Utc::now))?,
        None => {
            let file = a.file.as_ref().expect("clap requires file");
            let payload = std::fs::read(file).with_context(|| format!("reading {}", file.display()))?;
            vec![NewDocument {
                id: a.id.clone(),
                uri: a.uri.clone().expect("clap requires uri"),
                source_type: a.source_type.expect("clap requires type").into(),
                title: a.title.clone().unwrap_or_else(|| {
                    file.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default()
                }),
                access_class: a.access.into(),
                retrieved_at: a.retrieved_at.unwrap_or_else(Utc::now),
                payload,
                extension: file.extension().map(|e| e.to_string_lossy().into_owned()),
            }]
        }
    };
    for d in docs {
        let (doc, o) = repo.ingest(d)?;
        writeln!(
            out,
            "{}\t{}\tsentences={} records={} table_facts={} units={}",
            doc.id,
            doc.source_type.as_str(),
            o.sentences.len(),
            o.records.len(),
            o.facts.len(),
            o.units.len()
        )?;
    }
    Ok(())
}

fn extract_file(a: &ExtractArgs, out: &mut impl Write) -> Result<()> {
    let path = a.sentences.as_ref().expect("file mode");
    let grammar = match &a.grammar {
        Some(p) => ChunkGrammar::load(p)?,
        None => ChunkGrammar::builtin(),
    };
    let gazetteer = match &a.gazetteer {
        Some(p) => Gazetteer::load(p)?,
        None => Gazetteer::builtin(),
    };
    let ex = Extractor::new(grammar, gazetteer);
    let file = std::fs::File::open(path).with_context(|| format!("reading {}", path.display()))?;
    for (n, line) in std::io::BufReader::new(file).lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let value: serde_json::Value =
            serde_json::from_str(&line).with_context(|| format!("{}:{}: not JSON", path.display(), n + 1))?;
        let (doc_id, ordinal, text) = match &value {
            serde_json::Value::String(s) => ("stdin".to_owned(), n as u32, s.clone()),
            serde_json::Value::Object(o) => (
                o.get("doc_id").and_then(|v| v.as_str()).unwrap_or("stdin").to_owned(),
                o.get("ordinal").and_then(|v| v.as_u64()).map_or(n as u32, |v| v as u32),
                o.get("text")
                    .and_then(|v| v.as_str())
                    .with_context(|| format!("{}:{}: missing `text`", path.display(), n + 1))?
                    .to_owned(),
            ),
            _ => bail!("{}:{}: expected a string or an object", path.display(), n + 1),
        };
        let sentence = ex.analyze(DocId::new(doc_id), ordinal, &text);
        for r in ex.extract(&sentence) {
            json_line(out, &r)?;
        }
    }
    Ok(())
}

fn tablelabel(cmd: TablelabelCommand, out: &mut impl Write) -> Result<()> {
    match cmd {
        TablelabelCommand::Train { input, out: model_path, epochs } => {
            let file = std::fs::File::open(&input).with_context(|| format!("reading {}", input.display()))?;
            let mut examples = Vec::new();
            for (n, line) in std::io::BufReader::new(file).lines().enumerate() {
                let line = line?;
                if line.trim().is_empty() {
                    continue;
                }
                let ex: TrainingExample =
                    serde_json::from_str(&line).with_context(|| format!("{}:{}", input.display(), n + 1))?;
                examples.push(ex);
            }
            let model = train_labeler(&examples, epochs)?;
            std::fs::write(&model_path, model.to_json())
                .with_context(|| format!("writing {}", model_path.display()))?;
            writeln!(out, "trained on {} tables, wrote {}", examples.len(), model_path.display())?;
        }
        TablelabelCommand::Apply { model, table } => {
            let model = match model {
                Some(p) => LabelerModel::load(&p)?,
                None => LabelerModel::builtin(),
            };
            let bytes = std::fs::read(&table).with_context(|| format!("reading {}", table.display()))?;
            let ext = table.extension().map(|e| e.to_string_lossy().into_owned()).unwrap_or_else(|| "json".into());
            let stem = table.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
            let mut labelled = Vec::new();
            for grid in load_tables(&bytes, &ext, &DocId::new(stem))? {
                let labels = viterbi_label(&grid, &model)?;
                let cells = resolve_cells(&grid, &labels)?;
                labelled.push(serde_json::json!({ "labels": labels, "cells": cells }));
            }
            json_pretty(out, &labelled)?;
        }
    }
    Ok(())
}

/// Runs a parsed command, writing results to `out`.
pub fn execute(cli: Cli, out: &mut impl Write) -> Result<()> {
    let root = cli.repo.as_path();
    match cli.command {
        Command::Init { config } => {
            let cfg = match config {
                Some(p) => {
                    let text = std::fs::read_to_string(&p).with_context(|| format!("reading {}", p.display()))?;
                    serde_json::from_str::<RepoConfig>(&text).with_context(|| format!("parsing {}", p.display()))?
                }
                None => RepoConfig::default(),
            };
            Repository::init(root, cfg)?;
            writeln!(out, "initialized repository at {}", root.display())?;
        }
        Command::Ingest(a) => ingest(root, a, out)?,
        Command::Extract(a) if a.sentences.is_some() => extract_file(&a, out)?,
        Command::Extract(_) => {
            let summary = open(root)?.extract_all()?;
            json_pretty(out, &summary)?;
        }
        Command::Search(a) => {
            let repo = open(root)?;
            let q = formulate(&a.query, &a.keywords, a.source.as_deref())?;
            let result = run(&q, repo.index(), a.limit.unwrap_or(repo.config().search_limit))?;
            let view = search_view(&repo, q, &result);
            if a.json {
                json_pretty(out, &view)?;
            } else {
                print_hits(out, &view)?;
            }
        }
        Command::Refine(a) => {
            let mut repo = open(root)?;
            let o = repo.refine(RefineRequest {
                indicator_id: a.id,
                indicator: a.indicator,
                keywords: a.keywords,
                source: a.source,
                achieved: a.mark_achieved,
                idempotency_key: a.idempotency_key,
            })?;
            let view = search_view(&repo, o.step.query.clone(), &o.result);
            let record = IndicatorView::from(o.record);
            if a.json {
                json_pretty(out, &serde_json::json!({ "step": o.step, "indicator": record, "search": view }))?;
            } else {
                let status = match o.outcome {
                    StepOutcome::Appended => "recorded",
                    StepOutcome::Duplicate => "already recorded",
                };
                writeln!(
                    out,
                    "{status}: {} step {} (redefinitions {}, achieved {})",
                    record.indicator_id,
                    record.steps.len(),
                    record.redefinition_count,
                    if record.achieved { "Y" } else { "N" }
                )?;
                print_hits(out, &view)?;
            }
        }
        Command::Indicators { json } => {
            let records: Vec<IndicatorView> = open(root)?.indicators().into_iter().map(Into::into).collect();
            if json {
                json_pretty(out, &records)?;
            } else {
                for r in &records {
                    writeln!(
                        out,
                        "{}\t{}\tsteps={} redefinitions={} achieved={}",
                        r.indicator_id,
                        r.indicator_name,
                        r.steps.len(),
                        r.redefinition_count,
                        if r.achieved { "Y" } else { "N" }
                    )?;
                }
            }
        }
        Command::Report { format, totals, out: dest } => {
            let report = open(root)?.report();
            let text = match (format, totals) {
                (ReportFormat::Json, _) => report.to_json(),
                (ReportFormat::Csv, false) => report.to_csv(),
                (ReportFormat::Csv, true) => report.totals_csv(),
            };
            match dest {
                Some(p) => std::fs::write(&p, text).with_context(|| format!("writing {}", p.display()))?,
                None => emit(out, &text)?,
            }
        }
        Command::Serve { addr, cors_origin } => {
            let repo = open(root)?;
            tokio::runtime::Runtime::new()?.block_on(crate::api::serve(repo, addr, cors_origin.as_deref()))?;
        }
        Command::Snapshot { out: dest } => {
            let repo = open(root)?;
            let path = dest.unwrap_or_else(|| root.join("index.json"));
            repo.snapshot(&path)?;
            writeln!(out, "wrote {} units to {}", repo.index().len(), path.display())?;
        }
        Command::Tablelabel(cmd) => tablelabel(cmd, out)?,
    }
    Ok(())
}
