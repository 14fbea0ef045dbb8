//! Row labeling for tables (column header, row-header line, data, note) with
//! a linear-chain model, and resolution of data cells to their header paths.

mod decode;
mod features;
mod model;
mod resolve;
mod train;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ingest::TableGrid;

pub use decode::{sequence_score, viterbi_label, viterbi_rows};
pub use features::{featurize, featurize_rect, Feature, RowFeatures};
pub use model::LabelerModel;
pub use resolve::{resolve_cells, row_header_columns, ResolvedCell};
pub use train::{accuracy, train_labeler};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LabelError {
    #[error("table has no rows")]
    EmptyGrid,
    #[error("no training examples")]
    EmptyTrainingSet,
    #[error("no DATA rows to resolve")]
    NoDataRows,
    #[error("{labels} labels for {rows} rows")]
    LengthMismatch { rows: usize, labels: usize },
    #[error("invalid model: {0}")]
    InvalidModel(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum LineLabel {
    ColumnHeader,
    RowHeaderLine,
    Data,
    Note,
}

impl LineLabel {
    pub const COUNT: usize = 4;
    pub const ALL: [LineLabel; LineLabel::COUNT] =
        [LineLabel::ColumnHeader, LineLabel::RowHeaderLine, LineLabel::Data, LineLabel::Note];

    pub fn as_str(self) -> &'static str {
        match self {
            LineLabel::ColumnHeader => "COLUMN_HEADER",
            LineLabel::RowHeaderLine => "ROW_HEADER_LINE",
            LineLabel::Data => "DATA",
            LineLabel::Note => "NOTE",
        }
    }
}

impl fmt::Display for LineLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for LineLabel {
    type Err = LabelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        LineLabel::ALL
            .into_iter()
            .find(|l| l.as_str().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| LabelError::InvalidModel(format!("unknown label `{s}`")))
    }
}

/// One line of a `tablelabel train` input file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainingExample {
    pub grid: TableGrid,
    pub labels: Vec<LineLabel>,
}
