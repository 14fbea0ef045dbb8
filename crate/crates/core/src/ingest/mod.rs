//! Raw payloads to sentences and table grids.

mod html;
mod pdf;
mod segment;
mod table;

use thiserror::Error;

pub use html::{parse_html, parse_html_tables, HtmlContent};
pub use pdf::{body_text, classify_blocks, ingest_pdf_sidecar, BlockRole, Direction, LayoutRules, PdfBlock, PdfSidecar};
pub use segment::{segment_sentences, segment_spans};
pub use table::{load_tables, CellSpan, Emphasis, RectGrid, TableGrid};

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("malformed markup: {0}")]
    MalformedMarkup(String),
    #[error("sidecar has no text blocks")]
    EmptySidecar,
    #[error("sidecar line {line}: {reason}")]
    InvalidBlock { line: usize, reason: String },
    #[error("invalid table payload: {0}")]
    InvalidTable(String),
}
