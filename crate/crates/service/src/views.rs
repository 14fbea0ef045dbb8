//! JSON shapes shared by the HTTP API and the CLI's `--json` output.

use serde::Serialize;

use greylit_core::docmodel::{DocId, Entity, RecordSpans, RelevanceScore, SourceType};
use greylit_core::query::{LedgerStep, Query, RefinementRecord, RunResult};
use greylit_core::repo::Repository;

/// Where a hit came from, enough to reopen the source at the right place.
#[derive(Debug, Clone, Serialize)]
pub struct HitProvenance {
    pub doc_id: DocId,
    pub uri: String,
    pub title: String,
    /// Sentence ordinal, or table number for table cells.
    pub ordinal: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cell: Option<(usize, usize)>,
}

#[derive(Debug, Clone, Serialize)]
pub struct HitView {
    pub rank: usize,
    pub unit_id: String,
    pub doc_id: DocId,
    pub source_type: SourceType,
    pub score: RelevanceScore,
    pub text: String,
    pub indicator: String,
    pub value: String,
    pub unit: String,
    /// Byte spans of indicator, value and unit within `text`.
    pub highlights: Option<RecordSpans>,
    pub entities: Vec<Entity>,
    pub provenance: HitProvenance,
}

#[derive(Debug, Clone, Serialize)]
pub struct SearchView {
    pub query: Query,
    pub display: String,
    pub terms: Vec<String>,
    pub top_raw_score: f64,
    pub hits: Vec<HitView>,
}

pub fn search_view(repo: &Repository, query: Query, result: &RunResult) -> SearchView {
    let hits = result
        .hits
        .iter()
        .enumerate()
        .filter_map(|(i, h)| {
            let unit = repo.index().get(&h.unit_id)?;
            let doc = repo.document(&h.doc_id);
            Some(HitView {
                rank: i + 1,
                unit_id: h.unit_id.clone(),
                doc_id: h.doc_id.clone(),
                source_type: h.source_type,
                score: h.score,
                text: unit.fields.text.clone(),
                indicator: unit.fields.indicator.clone(),
                value: unit.fields.value.clone(),
                unit: unit.fields.unit.clone(),
                highlights: unit.provenance.highlights,
                entities: unit.provenance.entities.clone(),
                provenance: HitProvenance {
                    doc_id: h.doc_id.clone(),
                    uri: doc.map(|d| d.uri.clone()).unwrap_or_default(),
                    title: doc.map(|d| d.title.clone()).unwrap_or_default(),
                    ordinal: unit.provenance.ordinal,
                    cell: unit.provenance.cell,
                },
            })
        })
        .collect();
    SearchView {
        display: query.display(),
        terms: query.search_terms(),
        query,
        top_raw_score: result.top_raw_score,
        hits,
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct IndicatorView {
    pub indicator_id: String,
    pub indicator_name: String,
    pub redefinition_count: usize,
    pub achieved: bool,
    pub steps: Vec<LedgerStep>,
}

impl From<RefinementRecord> for IndicatorView {
    fn from(r: RefinementRecord) -> Self {
        Self {
            redefinition_count: r.redefinition_count(),
            achieved: r.achieved(),
            indicator_id: r.indicator_id,
            indicator_name: r.indicator_name,
            steps: r.steps,
        }
    }
}
