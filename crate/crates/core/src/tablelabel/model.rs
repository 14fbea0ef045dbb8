use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::features::{Feature, RowFeatures};
use super::{LabelError, LineLabel};

const F: usize = Feature::COUNT;
const L: usize = LineLabel::COUNT;

/// Emission weights per (feature, label) and transition weights per
/// (previous label, label).
#[derive(Debug, Clone, PartialEq)]
pub struct LabelerModel {
    pub(crate) emit: [[f64; L]; F],
    pub(crate) trans: [[f64; L]; L],
}

/// On-disk form: `{"feature_weights": {FEATURE: {LABEL: w}},
/// "transition_weights": {FROM: {TO: w}}}`. Zero weights may be omitted and
/// unknown feature names are ignored.
#[derive(Debug, Default, Serialize, Deserialize)]
struct ModelFile {
    #[serde(default)]
    feature_weights: BTreeMap<String, BTreeMap<String, f64>>,
    #[serde(default)]
    transition_weights: BTreeMap<String, BTreeMap<String, f64>>,
}

impl LabelerModel {
    pub fn zero() -> Self {
        Self { emit: [[0.0; L]; F], trans: [[0.0; L]; L] }
    }

    pub fn feature_weight(&self, f: Feature, l: LineLabel) -> f64 {
        self.emit[f as usize][l as usize]
    }

    pub fn set_feature_weight(&mut self, f: Feature, l: LineLabel, w: f64) {
        self.emit[f as usize][l as usize] = w;
    }

    pub fn transition_weight(&self, from: LineLabel, to: LineLabel) -> f64 {
        self.trans[from as usize][to as usize]
    }

    pub fn set_transition_weight(&mut self, from: LineLabel, to: LineLabel, w: f64) {
        self.trans[from as usize][to as usize] = w;
    }

    /// Emission score of `label` for a row.
    pub fn emission(&self, row: &RowFeatures, label: LineLabel) -> f64 {
        row.active().map(|f| self.feature_weight(f, label)).sum()
    }

    pub fn is_finite(&self) -> bool {
        self.emit.iter().flatten().chain(self.trans.iter().flatten()).all(|w| w.is_finite())
    }

    pub fn from_json(text: &str) -> Result<Self, LabelError> {
        let file: ModelFile = serde_json::from_str(text).map_err(|e| LabelError::InvalidModel(e.to_string()))?;
        let mut m = Self::zero();
        for (fname, row) in &file.feature_weights {
            let Some(f) = Feature::from_name(fname) else { continue };
            for (lname, w) in row {
                m.set_feature_weight(f, lname.parse()?, *w);
            }
        }
        for (from, row) in &file.transition_weights {
            let from: LineLabel = from.parse()?;
            for (to, w) in row {
                m.set_transition_weight(from, to.parse()?, *w);
            }
        }
        if !m.is_finite() {
            return Err(LabelError::InvalidModel("weights must be finite".into()));
        }
        Ok(m)
    }

    pub fn to_json(&self) -> String {
        let mut file = ModelFile::default();
        for f in Feature::ALL {
            for l in LineLabel::ALL {
                let w = self.feature_weight(f, l);
                if w != 0.0 {
                    file.feature_weights.entry(f.name().into()).or_default().insert(l.as_str().into(), w);
                }
            }
        }
        for a in LineLabel::ALL {
            for b in LineLabel::ALL {
                let w = self.transition_weight(a, b);
                if w != 0.0 {
                    file.transition_weights.entry(a.as_str().into()).or_default().insert(b.as_str().into(), w);
                }
            }
        }
        serde_json::to_string_pretty(&file).expect("model serializes")
    }

    pub fn load(path: &std::path::Path) -> Result<Self, LabelError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| LabelError::InvalidModel(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    /// Hand-set weights shipped in `resources/labeler_model.json`.
    pub fn builtin() -> Self {
        Self::from_json(include_str!("../../resources/labeler_model.json")).expect("builtin model parses")
    }
}

impl Default for LabelerModel {
    fn default() -> Self {
        Self::builtin()
    }
}
