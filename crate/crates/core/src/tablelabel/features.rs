use std::collections::HashMap;
use std::fmt;

use crate::ingest::{RectGrid, TableGrid};

use super::LabelError;

/// Boolean row features.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Feature {
    IsFirstRow,
    AllCellsAlpha,
    MajorityNumeric,
    HasThFlag,
    HasSpanningCell,
    FirstCellEmpty,
    RowShorterThanMode,
}

impl Feature {
    pub const COUNT: usize = 7;
    pub const ALL: [Feature; Feature::COUNT] = [
        Feature::IsFirstRow,
        Feature::AllCellsAlpha,
        Feature::MajorityNumeric,
        Feature::HasThFlag,
        Feature::HasSpanningCell,
        Feature::FirstCellEmpty,
        Feature::RowShorterThanMode,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Feature::IsFirstRow => "IS_FIRST_ROW",
            Feature::AllCellsAlpha => "ALL_CELLS_ALPHA",
            Feature::MajorityNumeric => "MAJORITY_NUMERIC",
            Feature::HasThFlag => "HAS_TH_FLAG",
            Feature::HasSpanningCell => "HAS_SPANNING_CELL",
            Feature::FirstCellEmpty => "FIRST_CELL_EMPTY",
            Feature::RowShorterThanMode => "ROW_SHORTER_THAN_MODE",
        }
    }

    pub fn from_name(name: &str) -> Option<Feature> {
        Feature::ALL.into_iter().find(|f| f.name() == name)
    }
}

impl fmt::Display for Feature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Active features of one row.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub struct RowFeatures([bool; Feature::COUNT]);

impl RowFeatures {
    pub fn get(&self, f: Feature) -> bool {
        self.0[f as usize]
    }

    pub fn set(&mut self, f: Feature, on: bool) {
        self.0[f as usize] = on;
    }

    pub fn active(&self) -> impl Iterator<Item = Feature> + '_ {
        Feature::ALL.into_iter().filter(|f| self.get(*f))
    }

    pub fn from_active(features: &[Feature]) -> Self {
        let mut rf = RowFeatures::default();
        for f in features {
            rf.set(*f, true);
        }
        rf
    }
}

/// Placeholder cells that stand for a missing value.
pub(crate) fn is_placeholder(cell: &str) -> bool {
    matches!(cell.trim(), "" | "-" | "–" | "—" | ".." | "..." | "n/a" | "N/A" | "na" | "NA" | "np" | "*")
}

/// Number-like: digits with optional grouping/decimals, currency, sign,
/// percent or parentheses around it.
pub(crate) fn is_numeric_cell(cell: &str) -> bool {
    let core: String = cell
        .trim()
        .trim_start_matches(['$', '€', '£', '~', '≈', '<', '>', '+', '-', '(', '−'])
        .trim_end_matches(['%', ')', '*'])
        .chars()
        .filter(|c| !c.is_whitespace())
        .collect();
    !core.is_empty()
        && core.starts_with(|c: char| c.is_ascii_digit())
        && core.ends_with(|c: char| c.is_ascii_digit())
        && core.chars().all(|c| c.is_ascii_digit() || c == ',' || c == '.')
}

/// Letters, spaces, hyphens and apostrophes only.
pub(crate) fn is_alpha_cell(cell: &str) -> bool {
    let t = cell.trim();
    t.chars().any(char::is_alphabetic)
        && t.chars().all(|c| c.is_alphabetic() || c.is_whitespace() || matches!(c, '-' | '\'' | '’'))
}

/// Years and financial years ("2016", "2015-16", "2015/16").
pub(crate) fn is_year_label(cell: &str) -> bool {
    let t = cell.trim();
    let year = |s: &str| s.len() == 4 && s.bytes().all(|b| b.is_ascii_digit()) && matches!(s.parse::<u32>(), Ok(1900..=2099));
    if year(t) {
        return true;
    }
    t.split_once(['-', '/', '–']).is_some_and(|(a, b)| {
        year(a) && (b.len() == 2 || b.len() == 4) && b.bytes().all(|c| c.is_ascii_digit())
    })
}

fn mode(values: &[usize]) -> usize {
    let mut counts: HashMap<usize, usize> = HashMap::new();
    for v in values {
        *counts.entry(*v).or_default() += 1;
    }
    // ties go to the longer row length
    counts.into_iter().max_by_key(|&(v, n)| (n, v)).map_or(0, |(v, _)| v)
}

pub fn featurize_rect(grid: &RectGrid) -> Result<Vec<RowFeatures>, LabelError> {
    if grid.rows() == 0 || grid.width == 0 {
        return Err(LabelError::EmptyGrid);
    }
    let row_mode = mode(&grid.occupied);
    let mut out = Vec::with_capacity(grid.rows());
    for (r, row) in grid.cells.iter().enumerate() {
        let filled: Vec<&String> = row.iter().filter(|c| !is_placeholder(c)).collect();
        let numeric = filled.iter().filter(|c| is_numeric_cell(c)).count();
        let mut f = RowFeatures::default();
        f.set(Feature::IsFirstRow, r == 0);
        f.set(Feature::AllCellsAlpha, !filled.is_empty() && filled.iter().all(|c| is_alpha_cell(c)));
        f.set(Feature::MajorityNumeric, !filled.is_empty() && numeric * 2 >= filled.len());
        f.set(Feature::HasThFlag, grid.is_th[r].iter().any(|&b| b));
        f.set(Feature::HasSpanningCell, grid.has_spanning[r]);
        f.set(Feature::FirstCellEmpty, row.first().is_none_or(|c| c.trim().is_empty()));
        f.set(Feature::RowShorterThanMode, grid.occupied[r] < row_mode);
        out.push(f);
    }
    Ok(out)
}

/// Per-row features of a grid (rectangularized first).
pub fn featurize(grid: &TableGrid) -> Result<Vec<RowFeatures>, LabelError> {
    featurize_rect(&grid.rectangularize())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::docmodel::DocId;

    fn feats(rows: &[&[&str]]) -> Vec<RowFeatures> {
        let g = TableGrid::new(DocId::new("T"), rows.iter().map(|r| r.iter().map(|s| s.to_string()).collect()).collect());
        featurize(&g).unwrap()
    }

    #[test]
    fn header_and_data_rows() {
        let f = feats(&[&["Year", "Area (ha)"], &["2016", "1518"]]);
        assert!(f[0].get(Feature::IsFirstRow));
        assert!(!f[0].get(Feature::AllCellsAlpha));
        assert!(!f[0].get(Feature::MajorityNumeric));
        assert!(f[1].get(Feature::MajorityNumeric));
        assert!(!f[1].get(Feature::IsFirstRow));
    }

    #[test]
    fn shape_features() {
        let f = feats(&[&["", "Irrigated", "Dryland"], &["NSW", "1,200", "300"], &["QLD", "800", "150"], &["Source: ABARES"]]);
        assert!(f[0].get(Feature::FirstCellEmpty));
        assert!(f[0].get(Feature::AllCellsAlpha));
        assert!(f[3].get(Feature::RowShorterThanMode));
        assert!(!f[1].get(Feature::RowShorterThanMode));
    }

    #[test]
    fn empty_grid() {
        assert!(matches!(featurize(&TableGrid::new(DocId::new("T"), vec![])), Err(LabelError::EmptyGrid)));
        assert!(matches!(featurize(&TableGrid::new(DocId::new("T"), vec![vec![]])), Err(LabelError::EmptyGrid)));
    }

    #[test]
    fn cell_classes() {
        for n in ["1518", "1,518", "2.3", "$1.2", "63%", "(12)", "-4"] {
            assert!(is_numeric_cell(n), "{n}");
        }
        for n in ["Area", "1.2.x", "", "2016a"] {
            assert!(!is_numeric_cell(n), "{n}");
        }
        assert!(is_year_label("2015-16") && is_year_label("2016") && !is_year_label("1518"));
    }
}
