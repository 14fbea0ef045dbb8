//! Domain types shared by every stage of the pipeline.
//!
//! All types serialize to one JSON object per line with keys equal to the
//! field names. Spans are byte offsets into UTF-8 text.

use std::collections::HashSet;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use chrono::{DateTime, Utc};
use rust_decimal::Decimal;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Opaque identifier of a [`SourceDocument`].
///
/// Ids may be hierarchical (`D1/area-table`); a source filter `D1` selects
/// every document whose id is `D1` or starts with `D1/`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct DocId(String);

impl DocId {
    pub fn new(id: impl Into<String>) -> Self {
        Self(id.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    /// True if this id is selected by the source filter `filter`.
    pub fn matches_source(&self, filter: &str) -> bool {
        self.0 == filter
            || (self.0.len() > filter.len()
                && self.0.starts_with(filter)
                && self.0.as_bytes()[filter.len()] == b'/')
    }
}

impl fmt::Display for DocId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for DocId {
    fn from(s: &str) -> Self {
        Self(s.to_owned())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum SourceType {
    #[serde(rename = "HTML")]
    Html,
    #[serde(rename = "PDF_TEXT")]
    PdfText,
    #[serde(rename = "TABLE")]
    Table,
}

impl SourceType {
    pub const ALL: [SourceType; 3] = [SourceType::Html, SourceType::PdfText, SourceType::Table];

    pub fn as_str(self) -> &'static str {
        match self {
            SourceType::Html => "HTML",
            SourceType::PdfText => "PDF_TEXT",
            SourceType::Table => "TABLE",
        }
    }

    /// Short label used in reports ("HTML", "PDF", "Table").
    pub fn report_label(self) -> &'static str {
        match self {
            SourceType::Html => "HTML",
            SourceType::PdfText => "PDF",
            SourceType::Table => "Table",
        }
    }

    /// File extensions a payload of this type may carry.
    pub fn payload_extensions(self) -> &'static [&'static str] {
        match self {
            SourceType::Html => &["html", "htm"],
            SourceType::PdfText => &["jsonl", "json"],
            SourceType::Table => &["json", "csv", "html", "htm"],
        }
    }
}

impl fmt::Display for SourceType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SourceType {
    type Err = ValidationError;

    /// Accepts the wire names and the CLI spellings (`html`, `pdf-text`, `table`).
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().replace('_', "-").as_str() {
            "html" => Ok(SourceType::Html),
            "pdf-text" | "pdf" => Ok(SourceType::PdfText),
            "table" => Ok(SourceType::Table),
            _ => Err(ValidationError::UnknownSourceType(s.to_owned())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
pub enum AccessClass {
    #[default]
    #[serde(rename = "OPEN")]
    Open,
    #[serde(rename = "SOURCE_SPECIFIC")]
    SourceSpecific,
    #[serde(rename = "SUBSCRIPTION")]
    Subscription,
}

impl AccessClass {
    pub fn as_str(self) -> &'static str {
        match self {
            AccessClass::Open => "OPEN",
            AccessClass::SourceSpecific => "SOURCE_SPECIFIC",
            AccessClass::Subscription => "SUBSCRIPTION",
        }
    }
}

impl FromStr for AccessClass {
    type Err = ValidationError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().replace('_', "-").as_str() {
            "open" => Ok(AccessClass::Open),
            "source-specific" => Ok(AccessClass::SourceSpecific),
            "subscription" => Ok(AccessClass::Subscription),
            _ => Err(ValidationError::UnknownAccessClass(s.to_owned())),
        }
    }
}

/// One ingested source.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SourceDocument {
    pub id: DocId,
    pub uri: String,
    pub source_type: SourceType,
    pub title: String,
    pub retrieved_at: DateTime<Utc>,
    #[serde(default)]
    pub access_class: AccessClass,
    /// Path of the raw payload, relative to the document store root.
    pub payload_ref: PathBuf,
}

/// Half-open byte range `[start, end)`, serialized as `[start, end]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Span(pub usize, pub usize);

impl Span {
    pub fn new(start: usize, end: usize) -> Self {
        debug_assert!(end >= start);
        Span(start, end)
    }

    pub fn start(self) -> usize {
        self.0
    }

    pub fn end(self) -> usize {
        self.1
    }

    pub fn len(self) -> usize {
        self.1 - self.0
    }

    pub fn is_empty(self) -> bool {
        self.1 == self.0
    }

    pub fn overlaps(self, other: Span) -> bool {
        self.0 < other.1 && other.0 < self.1
    }

    pub fn slice(self, text: &str) -> &str {
        &text[self.0..self.1]
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Token {
    pub text: String,
    pub span: Span,
    /// Penn-style tag; empty until tagged.
    #[serde(default)]
    pub pos: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sentence {
    pub doc_id: DocId,
    pub ordinal: u32,
    pub text: String,
    pub tokens: Vec<Token>,
}

impl Sentence {
    pub fn sentence_ref(&self) -> SentenceRef {
        SentenceRef { doc_id: self.doc_id.clone(), ordinal: self.ordinal }
    }

    /// Checks that token spans are ordered, non-empty, non-overlapping and
    /// that the gaps between them are whitespace only.
    pub fn check_spans(&self) -> bool {
        let mut pos = 0;
        for tok in &self.tokens {
            let Span(start, end) = tok.span;
            if start < pos || end <= start || end > self.text.len() {
                return false;
            }
            if !self.text.is_char_boundary(start) || !self.text.is_char_boundary(end) {
                return false;
            }
            if !self.text[pos..start].chars().all(char::is_whitespace) {
                return false;
            }
            if self.text[start..end] != tok.text {
                return false;
            }
            pos = end;
        }
        self.text[pos..].chars().all(char::is_whitespace)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct SentenceRef {
    pub doc_id: DocId,
    pub ordinal: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum EntityKind {
    Location,
    Organization,
    Date,
    Money,
    Person,
    Percent,
    Time,
}

impl EntityKind {
    pub const ALL: [EntityKind; 7] = [
        EntityKind::Location,
        EntityKind::Organization,
        EntityKind::Date,
        EntityKind::Money,
        EntityKind::Person,
        EntityKind::Percent,
        EntityKind::Time,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            EntityKind::Location => "LOCATION",
            EntityKind::Organization => "ORGANIZATION",
            EntityKind::Date => "DATE",
            EntityKind::Money => "MONEY",
            EntityKind::Person => "PERSON",
            EntityKind::Percent => "PERCENT",
            EntityKind::Time => "TIME",
        }
    }
}

impl fmt::Display for EntityKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Entity {
    pub kind: EntityKind,
    pub text: String,
    pub span: Span,
}

/// A chunked (indicator, value, unit) triple.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtractionRecord {
    pub sentence_ref: SentenceRef,
    pub indicator_phrase: String,
    pub value: Decimal,
    pub unit: String,
    /// Set when `unit` is the raw token because the gazetteer had no match.
    #[serde(default)]
    pub unit_unmatched: bool,
    pub entities: Vec<Entity>,
    /// Byte spans of the indicator, value and unit within the sentence text.
    #[serde(default)]
    pub spans: Option<RecordSpans>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RecordSpans {
    pub indicator: Span,
    pub value: Span,
    pub unit: Span,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RelevanceScore {
    pub raw: f64,
    pub normalized: f64,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ValidationError {
    #[error("missing required field `{0}`")]
    MissingField(&'static str),
    #[error("duplicate document id `{0}`")]
    DuplicateId(DocId),
    #[error("unknown source type `{0}`")]
    UnknownSourceType(String),
    #[error("unknown access class `{0}`")]
    UnknownAccessClass(String),
    #[error("payload `{0}` does not exist in the document store")]
    MissingPayload(PathBuf),
    #[error("payload `{path}` is not a legal {source_type} payload")]
    PayloadTypeMismatch { path: PathBuf, source_type: SourceType },
}

/// What a document is validated against: the ids already present and the
/// document store root that `payload_ref` is resolved in.
pub struct ValidationContext<'a> {
    pub existing_ids: &'a HashSet<DocId>,
    pub store_root: &'a Path,
}

pub fn validate_document(doc: &SourceDocument, ctx: &ValidationContext<'_>) -> Result<(), ValidationError> {
    if doc.id.as_str().trim().is_empty() {
        return Err(ValidationError::MissingField("id"));
    }
    if doc.uri.trim().is_empty() {
        return Err(ValidationError::MissingField("uri"));
    }
    if doc.payload_ref.as_os_str().is_empty() {
        return Err(ValidationError::MissingField("payload_ref"));
    }
    if ctx.existing_ids.contains(&doc.id) {
        return Err(ValidationError::DuplicateId(doc.id.clone()));
    }
    let ext = doc
        .payload_ref
        .extension()
        .and_then(|e| e.to_str())
        .map(str::to_ascii_lowercase)
        .unwrap_or_default();
    if !doc.source_type.payload_extensions().contains(&ext.as_str()) {
        return Err(ValidationError::PayloadTypeMismatch {
            path: doc.payload_ref.clone(),
            source_type: doc.source_type,
        });
    }
    if !ctx.store_root.join(&doc.payload_ref).is_file() {
        return Err(ValidationError::MissingPayload(doc.payload_ref.clone()));
    }
    Ok(())
}
