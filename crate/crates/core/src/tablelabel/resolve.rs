use serde::{Deserialize, Serialize};

use crate::ingest::{RectGrid, TableGrid};

use super::features::{is_numeric_cell, is_placeholder, is_year_label};
use super::{LabelError, LineLabel};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResolvedCell {
    pub row_header_path: Vec<String>,
    pub col_header_path: Vec<String>,
    pub value_text: String,
    /// Position in the rectangularized grid.
    pub row: usize,
    pub col: usize,
}

/// Label-like cells: not numbers, except years, which name rows.
fn label_like(cell: &str) -> bool {
    !is_numeric_cell(cell) || is_year_label(cell)
}

/// Leftmost maximal run of columns whose filled DATA cells are at least 80%
/// label-like. At least one column is always left for values.
pub fn row_header_columns(grid: &RectGrid, labels: &[LineLabel]) -> usize {
    let data_rows: Vec<&Vec<String>> =
        grid.cells.iter().zip(labels).filter(|(_, l)| **l == LineLabel::Data).map(|(r, _)| r).collect();
    let mut n = 0;
    while n + 1 < grid.width {
        let filled: Vec<&str> =
            data_rows.iter().map(|r| r[n].as_str()).filter(|c| !is_placeholder(c)).collect();
        let labelish = filled.iter().filter(|c| label_like(c)).count();
        if filled.is_empty() || labelish * 5 < filled.len() * 4 {
            break;
        }
        n += 1;
    }
    n
}

fn push_distinct(path: &mut Vec<String>, text: &str) {
    let t = text.trim();
    if !t.is_empty() && path.last().map(String::as_str) != Some(t) {
        path.push(t.to_owned());
    }
}

/// Maps each DATA cell outside the row-header columns to its header paths.
///
/// Column paths stack the cells of the most recent block of consecutive
/// COLUMN_HEADER rows; a spanning header repeated by expansion appears once.
/// A ROW_HEADER_LINE row names a section and prefixes the row paths of the
/// DATA rows after it. Cells come out row-major.
pub fn resolve_cells(grid: &TableGrid, labels: &[LineLabel]) -> Result<Vec<ResolvedCell>, LabelError> {
    let rect = grid.rectangularize();
    if labels.len() != rect.rows() {
        return Err(LabelError::LengthMismatch { rows: rect.rows(), labels: labels.len() });
    }
    if !labels.contains(&LineLabel::Data) {
        return Err(LabelError::NoDataRows);
    }
    let n_row_cols = row_header_columns(&rect, labels);
    let mut header_block: Vec<usize> = Vec::new();
    let mut section: Option<String> = None;
    let mut out = Vec::new();
    for (r, label) in labels.iter().enumerate() {
        match label {
            LineLabel::ColumnHeader => {
                if r == 0 || labels[r - 1] != LineLabel::ColumnHeader {
                    header_block.clear();
                }
                header_block.push(r);
            }
            LineLabel::RowHeaderLine => {
                section = rect.cells[r].iter().map(|c| c.trim()).find(|c| !c.is_empty()).map(str::to_owned);
            }
            LineLabel::Note => {}
            LineLabel::Data => {
                let row = &rect.cells[r];
                let mut row_path = Vec::new();
                if let Some(s) = &section {
                    push_distinct(&mut row_path, s);
                }
                for cell in &row[..n_row_cols] {
                    push_distinct(&mut row_path, cell);
                }
                for (c, value) in row.iter().enumerate().skip(n_row_cols) {
                    let mut col_path = Vec::new();
                    for &h in &header_block {
                        push_distinct(&mut col_path, &rect.cells[h][c]);
                    }
                    out.push(ResolvedCell {
                        row_header_path: row_path.clone(),
                        col_header_path: col_path,
                        value_text: value.clone(),
                        row: r,
                        col: c,
                    });
                }
            }
        }
    }
    Ok(out)
}
