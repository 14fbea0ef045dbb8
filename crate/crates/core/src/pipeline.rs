//! From a stored document to sentences, extraction records, resolved table
//! cells and indexable units.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::docmodel::{DocId, Entity, ExtractionRecord, Sentence, SourceDocument, SourceType};
use crate::index::{IndexedUnit, Provenance, UnitFields};
use crate::ingest::{
    ingest_pdf_sidecar, load_tables, parse_html, IngestError, LayoutRules, PdfSidecar, TableGrid,
};
use crate::nlp::{chunk_extract, ner, normalize_value, tokenize, Extractor, Gazetteer};
use crate::tablelabel::{resolve_cells, viterbi_label, LabelerModel, ResolvedCell};
use crate::Decimal;

#[derive(Debug, Clone, Default)]
pub struct PipelineConfig {
    pub extractor: Extractor,
    pub labeler: LabelerModel,
    pub layout: LayoutRules,
}

/// A numeric table cell with its headers read as indicator and unit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableFact {
    pub doc_id: DocId,
    pub table: u32,
    pub cell: ResolvedCell,
    pub indicator: String,
    pub value: Decimal,
    pub unit: String,
    pub unit_unmatched: bool,
}

#[derive(Debug, Clone, Default)]
pub struct DocumentOutput {
    pub sentences: Vec<Sentence>,
    pub records: Vec<ExtractionRecord>,
    pub tables: Vec<TableGrid>,
    pub facts: Vec<TableFact>,
    pub links: Vec<String>,
    pub units: Vec<IndexedUnit>,
}

fn extension(path: &Path) -> String {
    path.extension().and_then(|e| e.to_str()).unwrap_or_default().to_ascii_lowercase()
}

fn entity_terms(entities: &[Entity]) -> Vec<String> {
    entities.iter().map(|e| format!("{}:{}", e.kind.as_str(), e.text)).collect()
}

fn source_terms(doc: &SourceDocument) -> String {
    format!("{} {} {}", doc.id, doc.title, doc.uri)
}

/// First unit named in a header: a parenthesised form such as `(ha)`, or any
/// unit token.
pub fn header_unit<'g>(headers: &[String], gaz: &'g Gazetteer) -> Option<&'g str> {
    for h in headers {
        let mut rest = h.as_str();
        while let Some(open) = rest.find('(') {
            let Some(close) = rest[open..].find(')') else { break };
            if let Some(u) = gaz.canonical_unit(rest[open + 1..open + close].trim()) {
                return Some(u);
            }
            rest = &rest[open + close + 1..];
        }
        let words: Vec<String> = tokenize(h, gaz).into_iter().map(|t| t.text).collect();
        for i in 0..words.len() {
            if let Some(n) = gaz.multiword_unit(&words[i..]) {
                if let Some(u) = gaz.canonical_unit(&words[i..i + n].join(" ")) {
                    return Some(u);
                }
            }
            if let Some(u) = gaz.canonical_unit(&words[i]) {
                return Some(u);
            }
        }
    }
    None
}

/// Header text with parenthesised parts removed.
fn strip_parens(s: &str) -> String {
    let mut out = String::new();
    let mut depth = 0usize;
    for c in s.chars() {
        match c {
            '(' => depth += 1,
            ')' if depth > 0 => depth -= 1,
            _ if depth == 0 => out.push(c),
            _ => {}
        }
    }
    out.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// Reads a cell as a number, allowing a currency prefix or percent suffix.
fn cell_value(text: &str) -> Option<(Decimal, bool)> {
    let t = text.trim();
    let percent = t.ends_with('%');
    let core = t.trim_start_matches(['$', '€', '£']).trim_end_matches('%').trim();
    normalize_value(core).ok().map(|v| (v, percent))
}

/// Labels and resolves every table, keeping numeric cells. Tables that
/// cannot be labeled or have no data rows contribute nothing.
pub fn table_facts(tables: &[TableGrid], cfg: &PipelineConfig) -> Vec<TableFact> {
    let gaz = &cfg.extractor.gazetteer;
    let mut out = Vec::new();
    for (t, grid) in tables.iter().enumerate() {
        let Ok(labels) = viterbi_label(grid, &cfg.labeler) else { continue };
        let Ok(cells) = resolve_cells(grid, &labels) else { continue };
        for cell in cells {
            let Some((value, percent)) = cell_value(&cell.value_text) else { continue };
            let headers: Vec<String> = cell.col_header_path.iter().chain(&cell.row_header_path).cloned().collect();
            let unit = header_unit(&headers, gaz).or(percent.then_some("%"));
            let indicator = cell.col_header_path.iter().map(|h| strip_parens(h)).filter(|h| !h.is_empty()).collect::<Vec<_>>();
            out.push(TableFact {
                doc_id: grid.doc_id.clone(),
                table: t as u32,
                indicator: indicator.join(" "),
                value,
                unit: unit.unwrap_or_default().to_owned(),
                unit_unmatched: unit.is_none(),
                cell,
            });
        }
    }
    out
}

fn sentence_units(doc: &SourceDocument, sentences: &[Sentence], cfg: &PipelineConfig, out: &mut DocumentOutput) {
    let ex = &cfg.extractor;
    for s in sentences {
        let entities = ner(s, &ex.gazetteer);
        let records = chunk_extract(s, &ex.grammar, &ex.gazetteer, &entities);
        let base = format!("{}#s{:04}", doc.id, s.ordinal);
        let unit = |unit_id: String, fields: UnitFields, highlights| IndexedUnit {
            unit_id,
            doc_id: doc.id.clone(),
            source_type: doc.source_type,
            fields,
            provenance: Provenance { ordinal: s.ordinal, highlights, entities: entities.clone(), cell: None },
        };
        if records.is_empty() {
            out.units.push(unit(
                base.clone(),
                UnitFields {
                    text: s.text.clone(),
                    entities: entity_terms(&entities),
                    source: source_terms(doc),
                    ..Default::default()
                },
                None,
            ));
        }
        for (k, r) in records.iter().enumerate() {
            out.units.push(unit(
                format!("{base}.{k}"),
                UnitFields {
                    text: s.text.clone(),
                    indicator: r.indicator_phrase.clone(),
                    value: r.value.to_string(),
                    unit: r.unit.clone(),
                    entities: entity_terms(&entities),
                    source: source_terms(doc),
                },
                r.spans,
            ));
        }
        out.records.extend(records);
    }
}

fn fact_units(doc: &SourceDocument, cfg: &PipelineConfig, out: &mut DocumentOutput) {
    let gaz = &cfg.extractor.gazetteer;
    for f in &out.facts {
        let c = &f.cell;
        let mut parts: Vec<&str> = c.row_header_path.iter().chain(&c.col_header_path).map(String::as_str).collect();
        parts.push(&c.value_text);
        let text = parts.join(" ");
        let sentence = crate::nlp::analyze_sentence(doc.id.clone(), f.table, &text, gaz);
        let entities = ner(&sentence, gaz);
        out.units.push(IndexedUnit {
            unit_id: format!("{}#t{:02}r{:03}c{:02}", doc.id, f.table, c.row, c.col),
            doc_id: doc.id.clone(),
            source_type: doc.source_type,
            fields: UnitFields {
                text,
                indicator: f.indicator.clone(),
                value: f.value.to_string(),
                unit: f.unit.clone(),
                entities: entity_terms(&entities),
                source: source_terms(doc),
            },
            provenance: Provenance { ordinal: f.table, highlights: None, entities, cell: Some((c.row, c.col)) },
        });
    }
}

/// Parses a payload according to the document's source type and maps the
/// results to units.
pub fn process_document(doc: &SourceDocument, payload: &[u8], cfg: &PipelineConfig) -> Result<DocumentOutput, IngestError> {
    let gaz = &cfg.extractor.gazetteer;
    let mut out = DocumentOutput::default();
    match doc.source_type {
        SourceType::Html => {
            let content = parse_html(payload, &doc.id, gaz)?;
            out.sentences = content.sentences;
            out.tables = content.tables;
            out.links = content.links;
        }
        SourceType::PdfText => {
            let text = String::from_utf8_lossy(payload);
            let sidecar = match extension(&doc.payload_ref).as_str() {
                "json" => serde_json::from_str::<PdfSidecar>(&text)
                    .map_err(|e| IngestError::InvalidBlock { line: 1, reason: e.to_string() })?,
                _ => PdfSidecar::from_jsonl(&text)?,
            };
            out.sentences = ingest_pdf_sidecar(&sidecar, &doc.id, &cfg.layout, gaz)?;
        }
        SourceType::Table => {
            out.tables = load_tables(payload, &extension(&doc.payload_ref), &doc.id)?;
        }
    }
    let sentences = std::mem::take(&mut out.sentences);
    sentence_units(doc, &sentences, cfg, &mut out);
    out.sentences = sentences;
    out.facts = table_facts(&out.tables, cfg);
    fact_units(doc, cfg, &mut out);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::docmodel::AccessClass;
    use chrono::TimeZone;

    fn doc(id: &str, st: SourceType, payload: &str) -> SourceDocument {
        SourceDocument {
            id: DocId::new(id),
            uri: format!("https://example.org/{id}"),
            source_type: st,
            title: "Cotton report".into(),
            retrieved_at: chrono::Utc.with_ymd_and_hms(2017, 1, 1, 0, 0, 0).unwrap(),
            access_class: AccessClass::Open,
            payload_ref: payload.into(),
        }
    }

    #[test]
    fn html_sentences_and_tables_become_units() {
        let html = "<p>The average hectares planted per participant increased slightly 1,518 hectares. Growers met.</p>\
                    <table><tr><th>Year</th><th>Area (ha)</th></tr><tr><td>2016</td><td>1,518</td></tr></table>";
        let out = process_document(&doc("D1", SourceType::Html, "D1.html"), html.as_bytes(), &PipelineConfig::default())
            .unwrap();
        let ids: Vec<&str> = out.units.iter().map(|u| u.unit_id.as_str()).collect();
        assert_eq!(ids, ["D1#s0000.0", "D1#s0001", "D1#t00r001c01"]);
        assert_eq!(out.records[0].indicator_phrase, "planted per participant");
        let cell = &out.units[2];
        assert_eq!(cell.fields.indicator, "Area");
        assert_eq!(cell.fields.unit, "hectares");
        assert_eq!(cell.fields.value, "1518");
        assert_eq!(cell.fields.text, "2016 Area (ha) 1,518");
        assert!(cell.fields.entities.contains(&"DATE:2016".to_owned()));
    }

    #[test]
    fn stacked_table_facts() {
        let csv = "Region,Irrigated (ha),Dryland (ha)\nNSW,\"1,200\",300\nQLD,800,150\n";
        let out = process_document(&doc("T1", SourceType::Table, "T1.csv"), csv.as_bytes(), &PipelineConfig::default())
            .unwrap();
        let got: Vec<(String, String, String)> = out
            .facts
            .iter()
            .map(|f| (f.cell.row_header_path.join("/"), f.indicator.clone(), f.value.to_string()))
            .collect();
        assert_eq!(got, [
            ("NSW".into(), "Irrigated".into(), "1200".into()),
            ("NSW".into(), "Dryland".into(), "300".into()),
            ("QLD".into(), "Irrigated".into(), "800".into()),
            ("QLD".into(), "Dryland".into(), "150".into()),
        ]);
        assert!(out.facts.iter().all(|f| f.unit == "hectares"));
    }

    #[test]
    fn header_units() {
        let g = Gazetteer::builtin();
        let h = |s: &str| header_unit(&[s.to_owned()], &g).map(str::to_owned);
        assert_eq!(h("Area (ha)").as_deref(), Some("hectares"));
        assert_eq!(h("Production (metric tonnes)").as_deref(), Some("metric tonnes"));
        assert_eq!(h("Yield bales/ha").as_deref(), Some("bales/ha"));
        assert_eq!(h("Region"), None);
        assert_eq!(strip_parens("Area (ha) planted"), "Area planted");
    }

    #[test]
    fn bad_payloads_surface_ingest_errors() {
        let d = doc("P", SourceType::PdfText, "P.jsonl");
        assert!(matches!(process_document(&d, b"", &PipelineConfig::default()), Err(IngestError::EmptySidecar)));
    }
}
