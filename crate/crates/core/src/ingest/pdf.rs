//! Layout-aware filtering of text blocks extracted from PDFs.
//!
//! A sidecar lists the text blocks of a PDF with their page, position
//! (points, `y` growing downwards from the top edge), font size and writing
//! direction. Running headers/footers and small print are dropped; the body
//! is read in page, line, column order and segmented into sentences.

use std::collections::{HashMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::docmodel::{DocId, Sentence};
use crate::nlp::{analyze_sentence, Gazetteer};

use super::segment::segment_sentences;
use super::IngestError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
pub enum Direction {
    #[default]
    #[serde(rename = "LTR")]
    Ltr,
    #[serde(rename = "TTB")]
    Ttb,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PdfBlock {
    pub text: String,
    pub page: u32,
    pub x: f64,
    pub y: f64,
    pub font_size: f64,
    #[serde(default)]
    pub direction: Direction,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct PdfSidecar {
    pub blocks: Vec<PdfBlock>,
}

impl PdfSidecar {
    /// Parses the JSON-lines form: one block per line.
    pub fn from_jsonl(text: &str) -> Result<Self, IngestError> {
        let mut blocks = Vec::new();
        for (i, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let block: PdfBlock = serde_json::from_str(line)
                .map_err(|e| IngestError::InvalidBlock { line: i + 1, reason: e.to_string() })?;
            block.check().map_err(|reason| IngestError::InvalidBlock { line: i + 1, reason })?;
            blocks.push(block);
        }
        Ok(Self { blocks })
    }

    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        for b in &self.blocks {
            out.push_str(&serde_json::to_string(b).expect("block serializes"));
            out.push('\n');
        }
        out
    }
}

impl PdfBlock {
    fn check(&self) -> Result<(), String> {
        if self.page < 1 {
            return Err("page must be >= 1".into());
        }
        if !(self.font_size > 0.0 && self.font_size.is_finite()) {
            return Err("font_size must be > 0".into());
        }
        if !self.x.is_finite() || !self.y.is_finite() {
            return Err("x and y must be finite".into());
        }
        Ok(())
    }
}

/// Thresholds for header/footer and small-print removal.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LayoutRules {
    /// A block shape recurring on at least this share of pages is running matter.
    pub recurrence_ratio: f64,
    /// Blocks smaller than this multiple of the median body font are dropped.
    pub small_font_ratio: f64,
    /// Recurrence is only assessed for documents with at least this many pages.
    pub min_pages: usize,
}

impl Default for LayoutRules {
    fn default() -> Self {
        Self { recurrence_ratio: 0.8, small_font_ratio: 0.7, min_pages: 2 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BlockRole {
    Body,
    Header,
    Footer,
    SmallPrint,
}

/// Key under which running headers/footers recur: rounded position and
/// font size plus the text with digits masked, so "Page 3" and "Page 4"
/// share a key while body lines that merely start at the same height do not.
fn recurrence_key(b: &PdfBlock) -> (i64, i64, String) {
    let shape: String = b
        .text
        .split_whitespace()
        .collect::<Vec<_>>()
        .join(" ")
        .chars()
        .map(|c| if c.is_ascii_digit() { '#' } else { c })
        .collect();
    (b.y.round() as i64, b.font_size.round() as i64, shape)
}

fn median(values: &mut [f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    values.sort_by(f64::total_cmp);
    let n = values.len();
    Some(if n % 2 == 1 { values[n / 2] } else { (values[n / 2 - 1] + values[n / 2]) / 2.0 })
}

/// Role of every block, parallel to `sidecar.blocks`.
pub fn classify_blocks(sidecar: &PdfSidecar, rules: &LayoutRules) -> Vec<BlockRole> {
    let blocks = &sidecar.blocks;
    let pages: HashSet<u32> = blocks.iter().map(|b| b.page).collect();
    let mut roles = vec![BlockRole::Body; blocks.len()];

    if pages.len() >= rules.min_pages.max(2) {
        let mut pages_per_key: HashMap<(i64, i64, String), HashSet<u32>> = HashMap::new();
        for b in blocks {
            pages_per_key.entry(recurrence_key(b)).or_default().insert(b.page);
        }
        let mut page_mid: HashMap<u32, Vec<f64>> = HashMap::new();
        for b in blocks {
            page_mid.entry(b.page).or_default().push(b.y);
        }
        let page_mid: HashMap<u32, f64> =
            page_mid.into_iter().map(|(p, mut ys)| (p, median(&mut ys).unwrap_or(0.0))).collect();
        let needed = rules.recurrence_ratio * pages.len() as f64;
        for (i, b) in blocks.iter().enumerate() {
            if pages_per_key[&recurrence_key(b)].len() as f64 >= needed {
                roles[i] = if b.y <= page_mid[&b.page] { BlockRole::Header } else { BlockRole::Footer };
            }
        }
    }

    let mut body_fonts: Vec<f64> =
        blocks.iter().zip(&roles).filter(|(_, r)| **r == BlockRole::Body).map(|(b, _)| b.font_size).collect();
    if let Some(med) = median(&mut body_fonts) {
        for (b, role) in blocks.iter().zip(roles.iter_mut()) {
            if *role == BlockRole::Body && b.font_size < rules.small_font_ratio * med {
                *role = BlockRole::SmallPrint;
            }
        }
    }
    roles
}

/// Reading order: page, then left-to-right lines top to bottom; vertical
/// (top-to-bottom) blocks follow the page's horizontal text, by column.
fn reading_order(a: &PdfBlock, b: &PdfBlock) -> std::cmp::Ordering {
    let pos = |blk: &PdfBlock| match blk.direction {
        Direction::Ltr => (blk.y, blk.x),
        Direction::Ttb => (blk.x, blk.y),
    };
    let (pa, pb) = (pos(a), pos(b));
    a.page
        .cmp(&b.page)
        .then(a.direction.cmp(&b.direction))
        .then(pa.0.total_cmp(&pb.0))
        .then(pa.1.total_cmp(&pb.1))
        .then_with(|| a.text.cmp(&b.text))
        .then(a.font_size.total_cmp(&b.font_size))
}

/// Joins body blocks in reading order, mending words hyphenated across
/// blocks.
pub fn body_text(sidecar: &PdfSidecar, rules: &LayoutRules) -> String {
    let roles = classify_blocks(sidecar, rules);
    let mut body: Vec<&PdfBlock> =
        sidecar.blocks.iter().zip(&roles).filter(|(_, r)| **r == BlockRole::Body).map(|(b, _)| b).collect();
    body.sort_by(|a, b| reading_order(a, b));
    let mut text = String::new();
    for b in body {
        let piece = b.text.split_whitespace().collect::<Vec<_>>().join(" ");
        if piece.is_empty() {
            continue;
        }
        let mends = text.ends_with('-')
            && text[..text.len() - 1].ends_with(|c: char| c.is_alphabetic())
            && piece.starts_with(|c: char| c.is_lowercase());
        if mends {
            text.pop();
        } else if !text.is_empty() {
            text.push(' ');
        }
        text.push_str(&piece);
    }
    text
}

/// Drops running headers/footers and small print, then segments the body
/// into sentences.
pub fn ingest_pdf_sidecar(
    sidecar: &PdfSidecar,
    doc_id: &DocId,
    rules: &LayoutRules,
    gaz: &Gazetteer,
) -> Result<Vec<Sentence>, IngestError> {
    if sidecar.blocks.is_empty() {
        return Err(IngestError::EmptySidecar);
    }
    for (i, b) in sidecar.blocks.iter().enumerate() {
        b.check().map_err(|reason| IngestError::InvalidBlock { line: i + 1, reason })?;
    }
    let text = body_text(sidecar, rules);
    Ok(segment_sentences(&text)
        .iter()
        .enumerate()
        .map(|(i, s)| analyze_sentence(doc_id.clone(), i as u32, s, gaz))
        .collect())
}
