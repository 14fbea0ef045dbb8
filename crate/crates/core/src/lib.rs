//! Extraction of (indicator, value, unit) facts from HTML pages, tables and
//! PDF-derived text, BM25 retrieval over the extracted facts, and the
//! human-in-the-loop refinement ledger with suitability/adaptability ratings.
//!
//! The pipeline is:
//!
//! 1. [`ingest`] turns raw payloads into [`docmodel::Sentence`]s and
//!    [`ingest::TableGrid`]s.
//! 2. [`tablelabel`] labels table rows and resolves data cells to header paths.
//! 3. [`nlp`] tokenizes, POS-tags, chunks and recognizes entities.
//! 4. [`index`] stores [`index::IndexedUnit`]s and ranks them with BM25.
//! 5. [`query`] builds queries at increasing refinement levels and keeps the ledger.
//! 6. [`assess`] rates suitability and adaptability and produces the report.
//!
//! [`repo::Repository`] ties these together over a directory on disk.

pub mod assess;
pub mod docmodel;
pub mod index;
pub mod ingest;
pub mod jsonl;
pub mod nlp;
pub mod pipeline;
pub mod query;
pub mod repo;
pub mod tablelabel;

pub use docmodel::{
    AccessClass, DocId, Entity, EntityKind, ExtractionRecord, RelevanceScore, SentenceRef,
    Sentence, SourceDocument, SourceType, Span, Token,
};
pub use rust_decimal::Decimal;
