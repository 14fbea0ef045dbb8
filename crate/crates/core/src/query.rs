//! Queries at the three refinement levels (simple, plus keywords, plus
//! source) and the append-only refinement ledger.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::docmodel::{DocId, SourceType};
use crate::index::{analyze, normalize_scores, Index, IndexError, ScoredHit};
use crate::jsonl::{self, JsonlError};

#[derive(Debug, Error)]
pub enum QueryError {
    #[error("indicator name is blank")]
    BlankIndicator,
    #[error(transparent)]
    Index(#[from] IndexError),
    #[error(transparent)]
    Ledger(#[from] JsonlError),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Query {
    pub indicator_terms: Vec<String>,
    #[serde(default)]
    pub keywords: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source_filter: Option<String>,
}

impl Query {
    /// Indicator terms followed by keywords, without repeats.
    pub fn search_terms(&self) -> Vec<String> {
        let mut out: Vec<String> = Vec::new();
        for t in self.indicator_terms.iter().chain(&self.keywords) {
            if !out.contains(t) {
                out.push(t.clone());
            }
        }
        out
    }

    /// Human-readable form used in reports, e.g. `cotton stubble + % @ D4`.
    pub fn display(&self) -> String {
        let mut s = self.indicator_terms.join(" ");
        if !self.keywords.is_empty() {
            s.push_str(" + ");
            s.push_str(&self.keywords.join(" "));
        }
        if let Some(src) = &self.source_filter {
            s.push_str(" @ ");
            s.push_str(src);
        }
        s
    }
}

/// Builds a query from an indicator name, optional keyword phrases and an
/// optional source id. Names and keywords are lowercased and tokenized.
pub fn formulate<S: AsRef<str>>(indicator_name: &str, keywords: &[S], source: Option<&str>) -> Result<Query, QueryError> {
    let indicator_terms = analyze(indicator_name, false);
    if indicator_terms.is_empty() {
        return Err(QueryError::BlankIndicator);
    }
    let keywords = keywords.iter().flat_map(|k| analyze(k.as_ref(), false)).collect();
    let source_filter = source.map(str::trim).filter(|s| !s.is_empty()).map(str::to_owned);
    Ok(Query { indicator_terms, keywords, source_filter })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunResult {
    pub hits: Vec<ScoredHit>,
    pub top_raw_score: f64,
}

/// Searches with the union of indicator terms and keywords and normalizes
/// the hits per source type.
pub fn run(q: &Query, index: &Index, limit: usize) -> Result<RunResult, QueryError> {
    let hits = index.search(&q.search_terms(), q.source_filter.as_deref(), limit)?;
    let hits = normalize_scores(hits);
    let top_raw_score = hits.first().map_or(0.0, |h| h.score.raw);
    Ok(RunResult { hits, top_raw_score })
}

/// Rank-1 hit of a recorded step.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TopHit {
    pub unit_id: String,
    pub doc_id: DocId,
    pub source_type: SourceType,
    pub raw: f64,
    pub normalized: f64,
}

impl From<&ScoredHit> for TopHit {
    fn from(h: &ScoredHit) -> Self {
        Self {
            unit_id: h.unit_id.clone(),
            doc_id: h.doc_id.clone(),
            source_type: h.source_type,
            raw: h.score.raw,
            normalized: h.score.normalized,
        }
    }
}

/// One line of the ledger file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LedgerStep {
    pub indicator_id: String,
    pub indicator_name: String,
    pub query: Query,
    pub top_raw_score: f64,
    #[serde(default)]
    pub top_hit: Option<TopHit>,
    pub result_achieved: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub idempotency_key: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RefinementRecord {
    pub indicator_id: String,
    pub indicator_name: String,
    pub steps: Vec<LedgerStep>,
}

impl RefinementRecord {
    pub fn redefinition_count(&self) -> usize {
        self.steps.len().saturating_sub(1)
    }

    pub fn last_step(&self) -> &LedgerStep {
        self.steps.last().expect("records are never empty")
    }

    pub fn achieved(&self) -> bool {
        self.steps.iter().any(|s| s.result_achieved)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepOutcome {
    Appended,
    /// The idempotency key was already recorded; nothing was written.
    Duplicate,
}

/// Slug used as indicator id when none is given: `Cotton exports` → `cotton-exports`.
pub fn indicator_slug(name: &str) -> String {
    analyze(name, false).join("-")
}

/// Append-only log of refinement steps, optionally backed by a JSON-lines file.
#[derive(Debug, Default)]
pub struct RefinementLedger {
    path: Option<PathBuf>,
    steps: Vec<LedgerStep>,
}

impl RefinementLedger {
    pub fn in_memory() -> Self {
        Self::default()
    }

    /// Opens (or starts) a ledger file, dropping a torn final line left by
    /// an interrupted append.
    pub fn open(path: &Path) -> Result<Self, QueryError> {
        jsonl::repair_tail(path)?;
        let steps = jsonl::read(path)?;
        Ok(Self { path: Some(path.to_owned()), steps })
    }

    pub fn steps(&self) -> &[LedgerStep] {
        &self.steps
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn record_step(&mut self, step: LedgerStep) -> Result<StepOutcome, QueryError> {
        if let Some(key) = &step.idempotency_key {
            if self.steps.iter().any(|s| s.idempotency_key.as_ref() == Some(key)) {
                return Ok(StepOutcome::Duplicate);
            }
        }
        if let Some(path) = &self.path {
            jsonl::append(path, std::slice::from_ref(&step))?;
        }
        self.steps.push(step);
        Ok(StepOutcome::Appended)
    }

    /// Steps grouped per indicator, ordered by indicator id.
    pub fn records(&self) -> Vec<RefinementRecord> {
        let mut by_id: BTreeMap<&str, RefinementRecord> = BTreeMap::new();
        for s in &self.steps {
            by_id
                .entry(&s.indicator_id)
                .or_insert_with(|| RefinementRecord {
                    indicator_id: s.indicator_id.clone(),
                    indicator_name: s.indicator_name.clone(),
                    steps: Vec::new(),
                })
                .steps
                .push(s.clone());
        }
        by_id.into_values().collect()
    }

    pub fn record(&self, indicator_id: &str) -> Option<RefinementRecord> {
        self.records().into_iter().find(|r| r.indicator_id == indicator_id)
    }
}
