//! A repository directory holding documents, derived data, the index
//! snapshot and the refinement ledger.
//!
//! ```text
//! root/
//!   REPOSITORY        version marker
//!   config.json       overrides (index, assessment, layout, resource paths)
//!   documents.jsonl   one SourceDocument per line
//!   payloads/         raw payloads, named after the document id
//!   sentences.jsonl   derived: tagged sentences
//!   records.jsonl     derived: extraction records
//!   facts.jsonl       derived: numeric table cells
//!   index.json        index snapshot
//!   ledger.jsonl      refinement steps, append-only
//! ```

use std::collections::{BTreeSet, HashMap, HashSet};
use std::io;
use std::path::{Path, PathBuf};

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::assess::{build_report, AssessConfig, AssessError, IndicatorReport};
use crate::docmodel::{
    validate_document, AccessClass, DocId, SourceDocument, SourceType, ValidationContext, ValidationError,
};
use crate::index::{Index, IndexConfig, IndexError, IndexedUnit};
use crate::ingest::{IngestError, LayoutRules};
use crate::jsonl::{self, JsonlError};
use crate::nlp::{ChunkGrammar, Extractor, Gazetteer, NlpError};
use crate::pipeline::{process_document, DocumentOutput, PipelineConfig};
use crate::query::{
    formulate, indicator_slug, run, LedgerStep, QueryError, RefinementLedger, RefinementRecord, RunResult,
    StepOutcome, TopHit,
};
use crate::tablelabel::{LabelError, LabelerModel};

pub const MARKER_FILE: &str = "REPOSITORY";
pub const MARKER: &str = "greylit-repository 1";

#[derive(Debug, Error)]
pub enum RepoError {
    #[error("{0} is not a repository (no {MARKER_FILE} marker)")]
    NotARepository(PathBuf),
    #[error("unsupported repository version `{0}`")]
    VersionMismatch(String),
    #[error("{0} already contains a repository")]
    AlreadyExists(PathBuf),
    #[error("invalid document id `{0}`")]
    InvalidId(String),
    #[error("unknown indicator `{0}`")]
    UnknownIndicator(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Validation(#[from] ValidationError),
    #[error(transparent)]
    Ingest(#[from] IngestError),
    #[error(transparent)]
    Index(#[from] IndexError),
    #[error(transparent)]
    Query(#[from] QueryError),
    #[error(transparent)]
    Jsonl(#[from] JsonlError),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
}

fn io_at(path: &Path) -> impl FnOnce(io::Error) -> RepoError + '_ {
    move |source| RepoError::Io { path: path.to_owned(), source }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RepoConfig {
    pub index: IndexConfig,
    pub assess: AssessConfig,
    pub layout: LayoutRules,
    pub search_limit: usize,
    /// Resource overrides, relative to the repository root.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grammar: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gazetteer: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub labeler_model: Option<PathBuf>,
}

impl Default for RepoConfig {
    fn default() -> Self {
        Self {
            index: IndexConfig::default(),
            assess: AssessConfig::default(),
            layout: LayoutRules::default(),
            search_limit: 10,
            grammar: None,
            gazetteer: None,
            labeler_model: None,
        }
    }
}

impl RepoConfig {
    fn pipeline(&self, root: &Path) -> Result<PipelineConfig, RepoError> {
        let cfg_err = |e: String| RepoError::Config(e);
        let grammar = match &self.grammar {
            Some(p) => ChunkGrammar::load(&root.join(p)).map_err(|e: NlpError| cfg_err(e.to_string()))?,
            None => ChunkGrammar::builtin(),
        };
        let gazetteer = match &self.gazetteer {
            Some(p) => Gazetteer::load(&root.join(p)).map_err(|e| cfg_err(e.to_string()))?,
            None => Gazetteer::builtin(),
        };
        let labeler = match &self.labeler_model {
            Some(p) => LabelerModel::load(&root.join(p)).map_err(|e: LabelError| cfg_err(e.to_string()))?,
            None => LabelerModel::builtin(),
        };
        Ok(PipelineConfig { extractor: Extractor::new(grammar, gazetteer), labeler, layout: self.layout })
    }
}

/// A document to add. Missing ids are assigned as `D1`, `D2`, ...
#[derive(Debug, Clone)]
pub struct NewDocument {
    pub id: Option<String>,
    pub uri: String,
    pub source_type: SourceType,
    pub title: String,
    pub access_class: AccessClass,
    pub retrieved_at: DateTime<Utc>,
    pub payload: Vec<u8>,
    /// Payload file extension; guessed from the source type and content when absent.
    pub extension: Option<String>,
}

/// One line of a corpus manifest: document metadata plus a payload path
/// relative to the manifest file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    #[serde(default)]
    pub id: Option<String>,
    pub source_type: SourceType,
    #[serde(default)]
    pub access_class: AccessClass,
    pub uri: String,
    pub title: String,
    pub payload: PathBuf,
    #[serde(default)]
    pub retrieved_at: Option<DateTime<Utc>>,
}

/// Reads a JSON array of [`ManifestEntry`] and loads every payload.
/// Entries without `retrieved_at` get `default_retrieved_at`.
pub fn load_manifest(path: &Path, default_retrieved_at: DateTime<Utc>) -> Result<Vec<NewDocument>, RepoError> {
    let text = std::fs::read_to_string(path).map_err(io_at(path))?;
    let entries: Vec<ManifestEntry> =
        serde_json::from_str(&text).map_err(|e| RepoError::Config(format!("{}: {e}", path.display())))?;
    let base = path.parent().unwrap_or(Path::new("."));
    entries
        .into_iter()
        .map(|e| {
            let p = base.join(&e.payload);
            let payload = std::fs::read(&p).map_err(io_at(&p))?;
            Ok(NewDocument {
                id: e.id,
                uri: e.uri,
                source_type: e.source_type,
                title: e.title,
                access_class: e.access_class,
                retrieved_at: e.retrieved_at.unwrap_or(default_retrieved_at),
                payload,
                extension: e.payload.extension().map(|x| x.to_string_lossy().into_owned()),
            })
        })
        .collect()
}

/// A refinement step to run and record.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct RefineRequest {
    #[serde(default)]
    pub indicator_id: Option<String>,
    pub indicator: String,
    #[serde(default)]
    pub keywords: Vec<String>,
    #[serde(default)]
    pub source: Option<String>,
    #[serde(default)]
    pub achieved: bool,
    #[serde(default)]
    pub idempotency_key: Option<String>,
}

#[derive(Debug, Clone)]
pub struct RefineOutcome {
    pub step: LedgerStep,
    pub outcome: StepOutcome,
    pub result: RunResult,
    pub record: RefinementRecord,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ExtractSummary {
    pub documents: usize,
    pub sentences: usize,
    pub records: usize,
    pub table_facts: usize,
    pub units: usize,
}

fn valid_id(id: &str) -> bool {
    !id.is_empty()
        && id.chars().all(|c| c.is_ascii_alphanumeric() || matches!(c, '_' | '-' | '.' | '/'))
        && !id.split('/').any(|p| p.is_empty() || p == "." || p == "..")
}

fn payload_name(id: &DocId, ext: &str) -> PathBuf {
    PathBuf::from(format!("{}.{ext}", id.as_str().replace('/', "__")))
}

fn guess_extension(st: SourceType, payload: &[u8]) -> &'static str {
    match st {
        SourceType::Html => "html",
        SourceType::PdfText => "jsonl",
        SourceType::Table => {
            let head = String::from_utf8_lossy(&payload[..payload.len().min(256)]);
            match head.trim_start().chars().next() {
                Some('[' | '{') => "json",
                Some('<') => "html",
                _ => "csv",
            }
        }
    }
}

pub struct Repository {
    root: PathBuf,
    config: RepoConfig,
    pipeline: PipelineConfig,
    documents: Vec<SourceDocument>,
    index: Index,
    ledger: RefinementLedger,
}

impl std::fmt::Debug for Repository {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Repository").field("root", &self.root).field("documents", &self.documents.len()).finish()
    }
}

impl Repository {
    pub fn root(&self) -> &Path {
        &self.root
    }

    fn path(&self, name: &str) -> PathBuf {
        self.root.join(name)
    }

    pub fn payload_dir(&self) -> PathBuf {
        self.path("payloads")
    }

    /// Creates a repository in `root` (created if needed) with `config`
    /// written to `config.json`.
    pub fn init(root: &Path, config: RepoConfig) -> Result<Self, RepoError> {
        if root.join(MARKER_FILE).exists() {
            return Err(RepoError::AlreadyExists(root.to_owned()));
        }
        std::fs::create_dir_all(root.join("payloads")).map_err(io_at(root))?;
        let cfg_path = root.join("config.json");
        let mut text = serde_json::to_string_pretty(&config).expect("config serializes");
        text.push('\n');
        std::fs::write(&cfg_path, text).map_err(io_at(&cfg_path))?;
        let marker = root.join(MARKER_FILE);
        std::fs::write(&marker, format!("{MARKER}\n")).map_err(io_at(&marker))?;
        Self::open(root)
    }

    /// Opens an existing repository. The index is taken from its snapshot
    /// (re-indexed if the configuration changed) or rebuilt from payloads.
    pub fn open(root: &Path) -> Result<Self, RepoError> {
        let marker = root.join(MARKER_FILE);
        let found = match std::fs::read_to_string(&marker) {
            Ok(s) => s,
            Err(e) if e.kind() == io::ErrorKind::NotFound => return Err(RepoError::NotARepository(root.to_owned())),
            Err(e) => return Err(io_at(&marker)(e)),
        };
        if found.trim() != MARKER {
            return Err(RepoError::VersionMismatch(found.trim().to_owned()));
        }
        let cfg_path = root.join("config.json");
        let config: RepoConfig = match std::fs::read_to_string(&cfg_path) {
            Ok(text) => serde_json::from_str(&text).map_err(|e| RepoError::Config(e.to_string()))?,
            Err(e) if e.kind() == io::ErrorKind::NotFound => RepoConfig::default(),
            Err(e) => return Err(io_at(&cfg_path)(e)),
        };
        let pipeline = config.pipeline(root)?;
        for name in ["documents.jsonl", "sentences.jsonl", "records.jsonl", "facts.jsonl"] {
            jsonl::repair_tail(&root.join(name))?;
        }
        let documents: Vec<SourceDocument> = jsonl::read(&root.join("documents.jsonl"))?;
        let ledger = RefinementLedger::open(&root.join("ledger.jsonl"))?;
        let mut repo =
            Repository { root: root.to_owned(), config, pipeline, documents, index: Index::default(), ledger };
        let snap = repo.path("index.json");
        repo.index = if snap.exists() {
            let stored = Index::open(&snap)?;
            let ids: BTreeSet<DocId> = repo.documents.iter().map(|d| d.id.clone()).collect();
            if *stored.sources() != ids {
                repo.extract_in_memory()?.1
            } else if *stored.config() == repo.index_config() {
                stored
            } else {
                repo.reindex(stored.units().cloned().collect())?
            }
        } else {
            repo.extract_in_memory()?.1
        };
        Ok(repo)
    }

    fn index_config(&self) -> IndexConfig {
        let mut cfg = self.config.index.clone();
        cfg.unit_synonyms = self.pipeline.extractor.gazetteer.unit_synonym_map();
        cfg
    }

    fn reindex(&self, units: Vec<IndexedUnit>) -> Result<Index, RepoError> {
        let mut index = Index::new(self.index_config());
        for d in &self.documents {
            index.register_source(d.id.clone());
        }
        for u in units {
            index.add_unit(u)?;
        }
        Ok(index)
    }

    pub fn config(&self) -> &RepoConfig {
        &self.config
    }

    pub fn pipeline(&self) -> &PipelineConfig {
        &self.pipeline
    }

    pub fn documents(&self) -> &[SourceDocument] {
        &self.documents
    }

    pub fn document(&self, id: &DocId) -> Option<&SourceDocument> {
        self.documents.iter().find(|d| d.id == *id)
    }

    pub fn index(&self) -> &Index {
        &self.index
    }

    pub fn ledger(&self) -> &RefinementLedger {
        &self.ledger
    }

    fn next_id(&self) -> DocId {
        let taken: HashSet<&str> = self.documents.iter().map(|d| d.id.as_str()).collect();
        (self.documents.len() + 1..)
            .map(|n| format!("D{n}"))
            .find(|id| !taken.contains(id.as_str()))
            .map(DocId::new)
            .expect("unbounded range")
    }

    fn read_payload(&self, doc: &SourceDocument) -> Result<Vec<u8>, RepoError> {
        let path = self.payload_dir().join(&doc.payload_ref);
        std::fs::read(&path).map_err(io_at(&path))
    }

    /// Stores, validates and processes one document; its units are
    /// searchable on return. A payload that fails to parse is not kept.
    pub fn ingest(&mut self, new: NewDocument) -> Result<(SourceDocument, DocumentOutput), RepoError> {
        let id = match new.id.as_deref().map(str::trim) {
            Some(id) if !valid_id(id) => return Err(RepoError::InvalidId(id.to_owned())),
            Some(id) => DocId::new(id),
            None => self.next_id(),
        };
        let ext = new
            .extension
            .as_deref()
            .map(|e| e.trim_start_matches('.').to_ascii_lowercase())
            .unwrap_or_else(|| guess_extension(new.source_type, &new.payload).to_owned());
        let doc = SourceDocument {
            payload_ref: payload_name(&id, &ext),
            id,
            uri: new.uri,
            source_type: new.source_type,
            title: new.title,
            retrieved_at: new.retrieved_at,
            access_class: new.access_class,
        };
        let existing: HashSet<DocId> = self.documents.iter().map(|d| d.id.clone()).collect();
        if existing.contains(&doc.id) {
            return Err(ValidationError::DuplicateId(doc.id).into());
        }
        let payload_path = self.payload_dir().join(&doc.payload_ref);
        std::fs::write(&payload_path, &new.payload).map_err(io_at(&payload_path))?;
        let processed = validate_document(&doc, &ValidationContext { existing_ids: &existing, store_root: &self.payload_dir() })
            .map_err(RepoError::from)
            .and_then(|()| process_document(&doc, &new.payload, &self.pipeline).map_err(RepoError::from));
        let out = match processed {
            Ok(out) => out,
            Err(e) => {
                let _ = std::fs::remove_file(&payload_path);
                return Err(e);
            }
        };
        jsonl::append(&self.path("documents.jsonl"), std::slice::from_ref(&doc))?;
        jsonl::append(&self.path("sentences.jsonl"), &out.sentences)?;
        jsonl::append(&self.path("records.jsonl"), &out.records)?;
        jsonl::append(&self.path("facts.jsonl"), &out.facts)?;
        self.documents.push(doc.clone());
        self.index.register_source(doc.id.clone());
        for u in &out.units {
            self.index.add_unit(u.clone())?;
        }
        self.index.snapshot(&self.path("index.json"))?;
        Ok((doc, out))
    }

    fn extract_in_memory(&self) -> Result<(Vec<DocumentOutput>, Index), RepoError> {
        let mut outputs = Vec::with_capacity(self.documents.len());
        let mut units = Vec::new();
        for doc in &self.documents {
            let out = process_document(doc, &self.read_payload(doc)?, &self.pipeline)?;
            units.extend(out.units.iter().cloned());
            outputs.push(out);
        }
        let index = self.reindex(units)?;
        Ok((outputs, index))
    }

    /// Re-derives sentences, records, table facts and the index from the
    /// stored payloads and rewrites the derived files.
    pub fn extract_all(&mut self) -> Result<ExtractSummary, RepoError> {
        let (outputs, index) = self.extract_in_memory()?;
        let sentences: Vec<_> = outputs.iter().flat_map(|o| &o.sentences).collect();
        let records: Vec<_> = outputs.iter().flat_map(|o| &o.records).collect();
        let facts: Vec<_> = outputs.iter().flat_map(|o| &o.facts).collect();
        jsonl::write_all(&self.path("sentences.jsonl"), &sentences)?;
        jsonl::write_all(&self.path("records.jsonl"), &records)?;
        jsonl::write_all(&self.path("facts.jsonl"), &facts)?;
        index.snapshot(&self.path("index.json"))?;
        self.index = index;
        Ok(ExtractSummary {
            documents: outputs.len(),
            sentences: sentences.len(),
            records: records.len(),
            table_facts: facts.len(),
            units: self.index.len(),
        })
    }

    /// Runs the three-level query for an indicator without recording it.
    pub fn search(&self, indicator: &str, keywords: &[String], source: Option<&str>, limit: Option<usize>) -> Result<RunResult, RepoError> {
        let q = formulate(indicator, keywords, source)?;
        Ok(run(&q, &self.index, limit.unwrap_or(self.config.search_limit))?)
    }

    /// Runs the request's query and appends the step to the ledger.
    pub fn refine(&mut self, req: RefineRequest) -> Result<RefineOutcome, RepoError> {
        let q = formulate(&req.indicator, &req.keywords, req.source.as_deref())?;
        let result = run(&q, &self.index, self.config.search_limit)?;
        let indicator_id = req
            .indicator_id
            .as_deref()
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map_or_else(|| indicator_slug(&req.indicator), str::to_owned);
        let step = LedgerStep {
            indicator_id: indicator_id.clone(),
            indicator_name: req.indicator.trim().to_owned(),
            query: q,
            top_raw_score: result.top_raw_score,
            top_hit: result.hits.first().map(TopHit::from),
            result_achieved: req.achieved,
            idempotency_key: req.idempotency_key,
        };
        let outcome = self.ledger.record_step(step.clone())?;
        let record = self.ledger.record(&indicator_id).expect("step just recorded");
        Ok(RefineOutcome { step, outcome, result, record })
    }

    pub fn indicators(&self) -> Vec<RefinementRecord> {
        self.ledger.records()
    }

    pub fn indicator(&self, id: &str) -> Result<RefinementRecord, RepoError> {
        self.ledger.record(id).ok_or_else(|| RepoError::UnknownIndicator(id.to_owned()))
    }

    /// The indicator report; a ledger without steps gives a report without rows.
    pub fn report(&self) -> IndicatorReport {
        let access: HashMap<DocId, AccessClass> =
            self.documents.iter().map(|d| (d.id.clone(), d.access_class)).collect();
        match build_report(&self.ledger.records(), &access, &self.config.assess) {
            Ok(r) => r,
            Err(AssessError::EmptyLedger) => IndicatorReport::empty(),
            Err(e) => unreachable!("report inputs are validated: {e}"),
        }
    }

    pub fn snapshot(&self, path: &Path) -> Result<(), RepoError> {
        Ok(self.index.snapshot(path)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use chrono::TimeZone;

    fn new_doc(id: Option<&str>, st: SourceType, payload: &str) -> NewDocument {
        NewDocument {
            id: id.map(str::to_owned),
            uri: "https://example.org/x".into(),
            source_type: st,
            title: "Cotton".into(),
            access_class: AccessClass::Open,
            retrieved_at: Utc.with_ymd_and_hms(2017, 3, 1, 0, 0, 0).unwrap(),
            payload: payload.as_bytes().to_vec(),
            extension: None,
        }
    }

    #[test]
    fn init_open_and_markers() {
        let dir = tempfile::tempdir().unwrap();
        let root = dir.path().join("repo");
        Repository::init(&root, RepoConfig::default()).unwrap();
        assert!(matches!(Repository::init(&root, RepoConfig::default()), Err(RepoError::AlreadyExists(_))));
        assert!(Repository::open(&root).is_ok());
        std::fs::write(root.join(MARKER_FILE), "greylit-repository 9\n").unwrap();
        assert!(matches!(Repository::open(&root), Err(RepoError::VersionMismatch(_))));
        assert!(matches!(Repository::open(dir.path()), Err(RepoError::NotARepository(_))));
    }

    #[test]
    fn ingest_search_refine_report() {
        let dir = tempfile::tempdir().unwrap();
        let mut repo = Repository::init(dir.path(), RepoConfig::default()).unwrap();
        let (d1, _) = repo
            .ingest(new_doc(None, SourceType::Html, "<p>Cotton exports reached 2.3 million tonnes in 2016.</p>"))
            .unwrap();
        assert_eq!(d1.id, DocId::new("D1"));
        assert!(matches!(
            repo.ingest(new_doc(Some("D1"), SourceType::Html, "<p>x</p>")),
            Err(RepoError::Validation(ValidationError::DuplicateId(_)))
        ));
        assert!(matches!(repo.ingest(new_doc(Some("../x"), SourceType::Html, "<p>x</p>")), Err(RepoError::InvalidId(_))));
        assert!(repo.ingest(new_doc(Some("P1"), SourceType::PdfText, "")).is_err());
        assert!(!repo.payload_dir().join("P1.jsonl").exists());

        let hits = repo.search("cotton exports", &[], None, None).unwrap();
        assert_eq!(hits.hits[0].unit_id, "D1#s0000.0");

        let req = RefineRequest {
            indicator: "Cotton exports".into(),
            keywords: vec!["million tonnes".into()],
            achieved: true,
            idempotency_key: Some("k".into()),
            ..Default::default()
        };
        let out = repo.refine(req.clone()).unwrap();
        assert_eq!(out.outcome, StepOutcome::Appended);
        assert_eq!(repo.refine(req).unwrap().outcome, StepOutcome::Duplicate);
        assert_eq!(repo.indicators().len(), 1);

        let reopened = Repository::open(dir.path()).unwrap();
        assert_eq!(reopened.documents().len(), 1);
        assert_eq!(reopened.index().len(), repo.index().len());
        let report = reopened.report();
        assert_eq!(report.rows[0].source_type, "HTML");
        assert!(matches!(reopened.indicator("nope"), Err(RepoError::UnknownIndicator(_))));
    }

    #[test]
    fn extract_all_is_reproducible() {
        let dir = tempfile::tempdir().unwrap();
        let mut repo = Repository::init(dir.path(), RepoConfig::default()).unwrap();
        repo.ingest(new_doc(None, SourceType::Table, "Year,Area (ha)\n2016,\"1,518\"\n")).unwrap();
        repo.ingest(new_doc(None, SourceType::Html, "<p>Irrigated area increased 300 ha.</p>")).unwrap();
        let before = std::fs::read(dir.path().join("index.json")).unwrap();
        let summary = repo.extract_all().unwrap();
        assert_eq!(summary.documents, 2);
        assert_eq!(summary.table_facts, 1);
        assert_eq!(std::fs::read(dir.path().join("index.json")).unwrap(), before);
        assert!(Repository::open(dir.path()).unwrap().report().rows.is_empty());
    }

    #[test]
    fn reopen_recovers_from_an_interrupted_ingest() {
        use std::io::Write;
        let dir = tempfile::tempdir().unwrap();
        let mut repo = Repository::init(dir.path(), RepoConfig::default()).unwrap();
        repo.ingest(new_doc(None, SourceType::Html, "<p>Cotton exports reached 2.3 million tonnes.</p>")).unwrap();
        let stale = std::fs::read(dir.path().join("index.json")).unwrap();
        repo.ingest(new_doc(None, SourceType::Html, "<p>Irrigated area increased 300 ha.</p>")).unwrap();
        let units = repo.index().len();
        drop(repo);

        std::fs::write(dir.path().join("index.json"), stale).unwrap();
        let mut f = std::fs::OpenOptions::new().append(true).open(dir.path().join("documents.jsonl")).unwrap();
        f.write_all(b"{\"id\":\"D3\",\"uri").unwrap();
        drop(f);

        let mut repo = Repository::open(dir.path()).unwrap();
        assert_eq!(repo.documents().len(), 2);
        assert_eq!(repo.index().len(), units);
        repo.ingest(new_doc(None, SourceType::Html, "<p>Water use fell 4 ML/ha.</p>")).unwrap();
        let reopened = Repository::open(dir.path()).unwrap();
        let ids: Vec<&str> = reopened.documents().iter().map(|d| d.id.as_str()).collect();
        assert_eq!(ids, ["D1", "D2", "D3"]);
    }
}
