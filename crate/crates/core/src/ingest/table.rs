use serde::{Deserialize, Serialize};

use crate::docmodel::DocId;

use super::IngestError;

/// `(rowspan, colspan)` of a source cell, serialized as `[rowspan, colspan]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CellSpan(pub u32, pub u32);

impl Default for CellSpan {
    fn default() -> Self {
        CellSpan(1, 1)
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Emphasis {
    #[serde(default)]
    pub is_th: bool,
    #[serde(default)]
    pub is_bold: bool,
}

/// A table as found in the source: rows of cell strings, possibly ragged,
/// with optional span and emphasis information parallel to `rows`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableGrid {
    #[serde(default = "unnamed")]
    pub doc_id: DocId,
    pub rows: Vec<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cell_spans: Option<Vec<Vec<CellSpan>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub emphasis: Option<Vec<Vec<Emphasis>>>,
}

fn unnamed() -> DocId {
    DocId::new("")
}

/// A [`TableGrid`] with spans expanded and rows padded to equal width.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RectGrid {
    pub cells: Vec<Vec<String>>,
    pub width: usize,
    pub is_th: Vec<Vec<bool>>,
    pub is_bold: Vec<Vec<bool>>,
    /// Row has a cell originating in it that spans more than one slot.
    pub has_spanning: Vec<bool>,
    /// Slots occupied by source cells before padding.
    pub occupied: Vec<usize>,
}

impl RectGrid {
    pub fn rows(&self) -> usize {
        self.cells.len()
    }
}

impl TableGrid {
    pub fn new(doc_id: DocId, rows: Vec<Vec<String>>) -> Self {
        Self { doc_id, rows, cell_spans: None, emphasis: None }
    }

    fn span_at(&self, r: usize, c: usize) -> CellSpan {
        let s = self.cell_spans.as_ref().and_then(|s| s.get(r)).and_then(|row| row.get(c)).copied().unwrap_or_default();
        CellSpan(s.0.clamp(1, 1000), s.1.clamp(1, 1000))
    }

    fn emphasis_at(&self, r: usize, c: usize) -> Emphasis {
        self.emphasis.as_ref().and_then(|e| e.get(r)).and_then(|row| row.get(c)).copied().unwrap_or_default()
    }

    /// Expands row/column spans (the spanned text is copied into every
    /// covered slot) and pads ragged rows with empty strings.
    pub fn rectangularize(&self) -> RectGrid {
        let mut slots: Vec<Vec<Option<(String, Emphasis)>>> = Vec::new();
        let mut has_spanning = vec![false; self.rows.len()];
        for (r, row) in self.rows.iter().enumerate() {
            if slots.len() <= r {
                slots.resize_with(r + 1, Vec::new);
            }
            let mut c = 0;
            for (i, text) in row.iter().enumerate() {
                while slots[r].get(c).is_some_and(Option::is_some) {
                    c += 1;
                }
                let CellSpan(rs, cs) = self.span_at(r, i);
                let (rs, cs) = (rs as usize, cs as usize);
                if rs > 1 || cs > 1 {
                    has_spanning[r] = true;
                }
                let emph = self.emphasis_at(r, i);
                // rowspans never extend past the last source row
                for rr in r..(r + rs).min(self.rows.len()) {
                    if slots.len() <= rr {
                        slots.resize_with(rr + 1, Vec::new);
                    }
                    let line = &mut slots[rr];
                    if line.len() < c + cs {
                        line.resize(c + cs, None);
                    }
                    for slot in &mut line[c..c + cs] {
                        *slot = Some((text.trim().to_owned(), emph));
                    }
                }
                c += cs;
            }
        }
        let width = slots.iter().map(Vec::len).max().unwrap_or(0);
        let occupied = slots.iter().map(|row| row.iter().filter(|s| s.is_some()).count()).collect();
        let mut cells = Vec::with_capacity(slots.len());
        let mut is_th = Vec::with_capacity(slots.len());
        let mut is_bold = Vec::with_capacity(slots.len());
        for mut row in slots {
            row.resize(width, None);
            cells.push(row.iter().map(|s| s.as_ref().map_or_else(String::new, |(t, _)| t.clone())).collect());
            is_th.push(row.iter().map(|s| s.as_ref().is_some_and(|(_, e)| e.is_th)).collect());
            is_bold.push(row.iter().map(|s| s.as_ref().is_some_and(|(_, e)| e.is_bold)).collect());
        }
        RectGrid { cells, width, is_th, is_bold, has_spanning, occupied }
    }
}

/// Reads the tables of a TABLE payload: a JSON grid (or array of grids),
/// CSV, or HTML.
pub fn load_tables(bytes: &[u8], extension: &str, doc_id: &DocId) -> Result<Vec<TableGrid>, IngestError> {
    let mut grids = match extension.to_ascii_lowercase().as_str() {
        "json" => {
            let value: serde_json::Value =
                serde_json::from_slice(bytes).map_err(|e| IngestError::InvalidTable(e.to_string()))?;
            let parse = |v: serde_json::Value| {
                serde_json::from_value::<TableGrid>(v).map_err(|e| IngestError::InvalidTable(e.to_string()))
            };
            match value {
                serde_json::Value::Array(items) => items.into_iter().map(parse).collect::<Result<Vec<_>, _>>()?,
                other => vec![parse(other)?],
            }
        }
        "csv" => {
            let mut reader = csv::ReaderBuilder::new().has_headers(false).flexible(true).from_reader(bytes);
            let mut rows = Vec::new();
            for rec in reader.records() {
                let rec = rec.map_err(|e| IngestError::InvalidTable(e.to_string()))?;
                rows.push(rec.iter().map(str::to_owned).collect());
            }
            vec![TableGrid::new(doc_id.clone(), rows)]
        }
        "html" | "htm" => super::html::parse_html_tables(bytes, doc_id)?,
        other => return Err(IngestError::InvalidTable(format!("unsupported table format `{other}`"))),
    };
    for g in &mut grids {
        g.doc_id = doc_id.clone();
    }
    Ok(grids)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(rows: &[&[&str]]) -> TableGrid {
        TableGrid::new(DocId::new("T"), rows.iter().map(|r| r.iter().map(|s| s.to_string()).collect()).collect())
    }

    #[test]
    fn ragged_rows_are_padded() {
        let g = grid(&[&["a", "b", "c"], &["d"]]).rectangularize();
        assert_eq!(g.cells, vec![vec!["a", "b", "c"], vec!["d", "", ""]]);
        assert_eq!(g.occupied, vec![3, 1]);
    }

    #[test]
    fn spans_expand() {
        let mut g = grid(&[&["Region", "Production"], &["Irrigated", "Dryland"], &["NSW", "1,200", "300"]]);
        g.cell_spans = Some(vec![vec![CellSpan(2, 1), CellSpan(1, 2)], vec![CellSpan(1, 1); 2], vec![CellSpan(1, 1); 3]]);
        let r = g.rectangularize();
        assert_eq!(r.cells[0], ["Region", "Production", "Production"]);
        assert_eq!(r.cells[1], ["Region", "Irrigated", "Dryland"]);
        assert_eq!(r.cells[2], ["NSW", "1,200", "300"]);
        assert_eq!(r.has_spanning, [true, false, false]);
    }

    #[test]
    fn csv_and_json_payloads() {
        let id = DocId::new("D1/t");
        let g = load_tables(b"Year,Area\n2016,1518\n", "csv", &id).unwrap();
        assert_eq!(g[0].rows, vec![vec!["Year", "Area"], vec!["2016", "1518"]]);
        let g = load_tables(br#"{"rows":[["Year","Area"],["2016","1518"]],"cell_spans":[[[1,1],[1,1]]]}"#, "json", &id).unwrap();
        assert_eq!(g[0].doc_id, id);
        assert_eq!(g[0].cell_spans.as_ref().unwrap()[0][1], CellSpan(1, 1));
        assert!(load_tables(b"{", "json", &id).is_err());
    }
}
