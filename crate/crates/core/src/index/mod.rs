//! Inverted index over extracted facts with field-boosted BM25 ranking.

mod analysis;
mod snapshot;

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::docmodel::{DocId, Entity, RecordSpans, RelevanceScore, SourceType};

pub use analysis::{analyze, fold_plural};
pub use snapshot::{SNAPSHOT_FORMAT, SNAPSHOT_VERSION};

#[derive(Debug, Error)]
pub enum IndexError {
    #[error("unit id `{0}` already indexed")]
    DuplicateUnitId(String),
    #[error("no ingested source matches `{0}`")]
    UnknownSourceFilter(String),
    #[error("search limit must be at least 1")]
    ZeroLimit,
    #[error("corrupt snapshot: {0}")]
    CorruptSnapshot(String),
    #[error("snapshots load only into an empty index")]
    NotEmpty,
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Field {
    Text,
    Indicator,
    Value,
    Unit,
    Entities,
    Source,
}

impl Field {
    pub const ALL: [Field; 6] = [Field::Text, Field::Indicator, Field::Value, Field::Unit, Field::Entities, Field::Source];

    pub fn as_str(self) -> &'static str {
        match self {
            Field::Text => "text",
            Field::Indicator => "indicator",
            Field::Value => "value",
            Field::Unit => "unit",
            Field::Entities => "entities",
            Field::Source => "source",
        }
    }
}

/// The six searchable fields of a unit.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct UnitFields {
    pub text: String,
    #[serde(default)]
    pub indicator: String,
    #[serde(default)]
    pub value: String,
    #[serde(default)]
    pub unit: String,
    /// `KIND:text` strings.
    #[serde(default)]
    pub entities: Vec<String>,
    #[serde(default)]
    pub source: String,
}

/// Where a unit came from, for highlighting in the original context.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    /// Sentence ordinal, or table number for table cells.
    pub ordinal: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub highlights: Option<RecordSpans>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub entities: Vec<Entity>,
    /// `(row, col)` of a table cell.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cell: Option<(usize, usize)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndexedUnit {
    pub unit_id: String,
    pub doc_id: DocId,
    pub source_type: SourceType,
    pub fields: UnitFields,
    #[serde(default)]
    pub provenance: Provenance,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FieldBoosts {
    pub text: f64,
    pub indicator: f64,
    pub value: f64,
    pub unit: f64,
    pub entities: f64,
    pub source: f64,
}

impl Default for FieldBoosts {
    fn default() -> Self {
        Self { text: 1.0, indicator: 3.0, value: 0.5, unit: 2.0, entities: 1.0, source: 0.5 }
    }
}

impl FieldBoosts {
    pub fn get(&self, f: Field) -> f64 {
        match f {
            Field::Text => self.text,
            Field::Indicator => self.indicator,
            Field::Value => self.value,
            Field::Unit => self.unit,
            Field::Entities => self.entities,
            Field::Source => self.source,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct IndexConfig {
    pub k1: f64,
    pub b: f64,
    pub boosts: FieldBoosts,
    pub stemming: bool,
    /// Extra surface forms indexed alongside each canonical unit.
    pub unit_synonyms: BTreeMap<String, Vec<String>>,
}

impl Default for IndexConfig {
    fn default() -> Self {
        Self { k1: 1.2, b: 0.75, boosts: FieldBoosts::default(), stemming: false, unit_synonyms: BTreeMap::new() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Posting {
    pub term: String,
    pub field: Field,
    pub unit_id: String,
    pub term_frequency: u32,
}

/// Collection statistics over the units in scope of a search.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct IndexStats {
    pub unit_count: usize,
    /// Units with a non-empty field.
    pub field_docs: [usize; 6],
    pub total_len: [u64; 6],
}

impl IndexStats {
    pub fn avg_len(&self, f: Field) -> f64 {
        let n = self.field_docs[f as usize];
        if n == 0 {
            0.0
        } else {
            self.total_len[f as usize] as f64 / n as f64
        }
    }

    fn add(&mut self, lens: &[u32; 6]) {
        self.unit_count += 1;
        for (i, len) in lens.iter().enumerate() {
            if *len > 0 {
                self.field_docs[i] += 1;
                self.total_len[i] += u64::from(*len);
            }
        }
    }
}

/// Inverse document frequency, `ln(1 + (N - df + 0.5) / (df + 0.5))`.
pub fn idf(n: usize, df: usize) -> f64 {
    (1.0 + (n as f64 - df as f64 + 0.5) / (df as f64 + 0.5)).ln()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoredHit {
    pub unit_id: String,
    pub doc_id: DocId,
    pub source_type: SourceType,
    pub score: RelevanceScore,
}

#[derive(Debug, Clone)]
struct Stored {
    unit: IndexedUnit,
    tf: [HashMap<String, u32>; 6],
    lens: [u32; 6],
}

#[derive(Debug, Clone, Default)]
pub struct Index {
    config: IndexConfig,
    units: Vec<Stored>,
    by_id: HashMap<String, usize>,
    /// term → per field → (unit slot, tf)
    postings: HashMap<String, [Vec<(usize, u32)>; 6]>,
    stats: IndexStats,
    sources: BTreeSet<DocId>,
}

impl Index {
    pub fn new(config: IndexConfig) -> Self {
        Self { config, ..Default::default() }
    }

    pub fn config(&self) -> &IndexConfig {
        &self.config
    }

    pub fn len(&self) -> usize {
        self.units.len()
    }

    pub fn is_empty(&self) -> bool {
        self.units.is_empty() && self.sources.is_empty()
    }

    pub fn stats(&self) -> &IndexStats {
        &self.stats
    }

    pub fn units(&self) -> impl Iterator<Item = &IndexedUnit> {
        self.units.iter().map(|s| &s.unit)
    }

    pub fn get(&self, unit_id: &str) -> Option<&IndexedUnit> {
        self.by_id.get(unit_id).map(|&i| &self.units[i].unit)
    }

    pub fn sources(&self) -> &BTreeSet<DocId> {
        &self.sources
    }

    /// Makes a source known to source filters even if it yields no units.
    pub fn register_source(&mut self, doc_id: DocId) {
        self.sources.insert(doc_id);
    }

    pub fn analyze(&self, text: &str) -> Vec<String> {
        analyze(text, self.config.stemming)
    }

    /// Analyzed, de-duplicated query terms in first-seen order.
    pub fn query_terms<S: AsRef<str>>(&self, parts: &[S]) -> Vec<String> {
        let mut seen = BTreeSet::new();
        parts
            .iter()
            .flat_map(|p| self.analyze(p.as_ref()))
            .filter(|t| seen.insert(t.clone()))
            .collect()
    }

    fn field_terms(&self, u: &IndexedUnit, f: Field) -> Vec<String> {
        let fields = &u.fields;
        match f {
            Field::Text => self.analyze(&fields.text),
            Field::Indicator => self.analyze(&fields.indicator),
            Field::Value => self.analyze(&fields.value),
            Field::Unit => {
                let mut forms = vec![fields.unit.clone()];
                if let Some(syn) = self.config.unit_synonyms.get(&fields.unit) {
                    forms.extend(syn.iter().filter(|s| **s != fields.unit).cloned());
                }
                forms.iter().flat_map(|s| self.analyze(s)).collect()
            }
            Field::Entities => fields
                .entities
                .iter()
                .flat_map(|e| self.analyze(e.split_once(':').map_or(e.as_str(), |(_, text)| text)))
                .collect(),
            Field::Source => self.analyze(&fields.source),
        }
    }

    pub fn add_unit(&mut self, unit: IndexedUnit) -> Result<(), IndexError> {
        if self.by_id.contains_key(&unit.unit_id) {
            return Err(IndexError::DuplicateUnitId(unit.unit_id));
        }
        let slot = self.units.len();
        let mut tf: [HashMap<String, u32>; 6] = Default::default();
        let mut lens = [0u32; 6];
        for f in Field::ALL {
            let terms = self.field_terms(&unit, f);
            lens[f as usize] = terms.len() as u32;
            for t in terms {
                *tf[f as usize].entry(t).or_default() += 1;
            }
        }
        for f in Field::ALL {
            let mut terms: Vec<(&String, &u32)> = tf[f as usize].iter().collect();
            terms.sort();
            for (term, n) in terms {
                self.postings.entry(term.clone()).or_default()[f as usize].push((slot, *n));
            }
        }
        self.stats.add(&lens);
        self.sources.insert(unit.doc_id.clone());
        self.by_id.insert(unit.unit_id.clone(), slot);
        self.units.push(Stored { unit, tf, lens });
        Ok(())
    }

    /// All postings, sorted by term, field and unit id.
    pub fn postings(&self) -> Vec<Posting> {
        let mut out: Vec<Posting> = self
            .postings
            .iter()
            .flat_map(|(term, per_field)| {
                Field::ALL.into_iter().flat_map(move |f| {
                    per_field[f as usize].iter().map(move |&(slot, tf)| Posting {
                        term: term.clone(),
                        field: f,
                        unit_id: self.units[slot].unit.unit_id.clone(),
                        term_frequency: tf,
                    })
                })
            })
            .collect();
        out.sort_by(|a, b| (&a.term, a.field, &a.unit_id).cmp(&(&b.term, b.field, &b.unit_id)));
        out
    }

    /// Number of in-scope units whose `field` contains `term` (analyzed form).
    pub fn doc_freq(&self, term: &str, field: Field, filter: Option<&str>) -> usize {
        self.postings.get(term).map_or(0, |pf| {
            pf[field as usize].iter().filter(|(slot, _)| self.in_scope(*slot, filter)).count()
        })
    }

    fn in_scope(&self, slot: usize, filter: Option<&str>) -> bool {
        filter.is_none_or(|f| self.units[slot].unit.doc_id.matches_source(f))
    }

    /// Statistics over the units a filter selects.
    pub fn scoped_stats(&self, filter: Option<&str>) -> IndexStats {
        match filter {
            None => self.stats.clone(),
            Some(_) => {
                let mut s = IndexStats::default();
                for (slot, st) in self.units.iter().enumerate() {
                    if self.in_scope(slot, filter) {
                        s.add(&st.lens);
                    }
                }
                s
            }
        }
    }

    fn score_slot(&self, terms: &[String], slot: usize, stats: &IndexStats, filter: Option<&str>) -> f64 {
        let st = &self.units[slot];
        let (k1, b) = (self.config.k1, self.config.b);
        let mut score = 0.0;
        for term in terms {
            for f in Field::ALL {
                let Some(&tf) = st.tf[f as usize].get(term) else { continue };
                let boost = self.config.boosts.get(f);
                let df = self.doc_freq(term, f, filter);
                let tf = f64::from(tf);
                let norm = 1.0 - b + b * f64::from(st.lens[f as usize]) / stats.avg_len(f);
                score += boost * idf(stats.unit_count, df) * tf * (k1 + 1.0) / (tf + k1 * norm);
            }
        }
        score
    }

    /// BM25 score of one unit for analyzed `terms`, with statistics taken
    /// over the units `filter` selects. Unknown units and out-of-scope units
    /// score 0.
    pub fn bm25_score(&self, terms: &[String], unit_id: &str, filter: Option<&str>) -> f64 {
        match self.by_id.get(unit_id) {
            Some(&slot) if self.in_scope(slot, filter) => {
                self.score_slot(terms, slot, &self.scoped_stats(filter), filter)
            }
            _ => 0.0,
        }
    }

    /// Ranks in-scope units containing any of `terms`. Scores are raw; the
    /// `normalized` part is left at 0 (see [`normalize_scores`]).
    pub fn search_terms(&self, terms: &[String], filter: Option<&str>, limit: usize) -> Result<Vec<ScoredHit>, IndexError> {
        if limit == 0 {
            return Err(IndexError::ZeroLimit);
        }
        if let Some(f) = filter {
            if !self.sources.iter().any(|d| d.matches_source(f)) {
                return Err(IndexError::UnknownSourceFilter(f.to_owned()));
            }
        }
        let stats = self.scoped_stats(filter);
        let mut candidates = BTreeSet::new();
        for term in terms {
            if let Some(pf) = self.postings.get(term) {
                candidates.extend(pf.iter().flatten().map(|(slot, _)| *slot).filter(|s| self.in_scope(*s, filter)));
            }
        }
        let mut hits: Vec<ScoredHit> = candidates
            .into_iter()
            .map(|slot| (slot, self.score_slot(terms, slot, &stats, filter)))
            .filter(|(_, s)| *s > 0.0)
            .map(|(slot, raw)| {
                let u = &self.units[slot].unit;
                ScoredHit {
                    unit_id: u.unit_id.clone(),
                    doc_id: u.doc_id.clone(),
                    source_type: u.source_type,
                    score: RelevanceScore { raw, normalized: 0.0 },
                }
            })
            .collect();
        hits.sort_by(|a, b| b.score.raw.total_cmp(&a.score.raw).then_with(|| a.unit_id.cmp(&b.unit_id)));
        hits.truncate(limit);
        Ok(hits)
    }

    /// Analyzes free-text query parts, then [`Index::search_terms`].
    pub fn search<S: AsRef<str>>(&self, parts: &[S], filter: Option<&str>, limit: usize) -> Result<Vec<ScoredHit>, IndexError> {
        self.search_terms(&self.query_terms(parts), filter, limit)
    }
}

/// Sets `normalized = raw / max raw` within each source type (0 when the
/// group max is not positive).
pub fn normalize_scores(mut hits: Vec<ScoredHit>) -> Vec<ScoredHit> {
    let mut max: HashMap<SourceType, f64> = HashMap::new();
    for h in &hits {
        let m = max.entry(h.source_type).or_insert(0.0);
        *m = m.max(h.score.raw);
    }
    for h in &mut hits {
        let m = max[&h.source_type];
        h.score.normalized = if m > 0.0 { (h.score.raw / m).clamp(0.0, 1.0) } else { 0.0 };
    }
    hits
}
