//! Suitability and adaptability ratings and the indicator report.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::docmodel::{AccessClass, DocId, SourceType};
use crate::query::{LedgerStep, RefinementRecord};

#[derive(Debug, Error, PartialEq)]
pub enum AssessError {
    #[error("score {0} is outside [0, 1]")]
    OutOfRange(f64),
    #[error("the refinement ledger is empty")]
    EmptyLedger,
}

/// Three-step scale shared by suitability, dependence and adaptability.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Level {
    #[serde(rename = "L")]
    Low,
    #[serde(rename = "M")]
    Medium,
    #[serde(rename = "H")]
    High,
}

impl Level {
    pub fn letter(self) -> &'static str {
        match self {
            Level::Low => "L",
            Level::Medium => "M",
            Level::High => "H",
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Level::Low => "LOW",
            Level::Medium => "MEDIUM",
            Level::High => "HIGH",
        }
    }
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.letter())
    }
}

/// `[0, 0.4)` low, `[0.4, 0.7)` medium, `[0.7, 1]` high.
pub fn categorize_suitability(normalized_score: f64) -> Result<Level, AssessError> {
    if !(0.0..=1.0).contains(&normalized_score) {
        return Err(AssessError::OutOfRange(normalized_score));
    }
    Ok(if normalized_score < 0.4 {
        Level::Low
    } else if normalized_score < 0.7 {
        Level::Medium
    } else {
        Level::High
    })
}

pub fn query_dependence(redefinition_count: usize) -> Level {
    match redefinition_count {
        0 => Level::Low,
        1 => Level::Medium,
        _ => Level::High,
    }
}

pub fn data_dependence(access_class: AccessClass, used_source_filter: bool) -> Level {
    match (access_class, used_source_filter) {
        (AccessClass::Subscription, true) => Level::High,
        (_, true) | (AccessClass::SourceSpecific, _) => Level::Medium,
        _ => Level::Low,
    }
}

/// Query dependence M is read with the low-dependence row.
pub fn adaptability(query_dep: Level, data_dep: Level) -> Level {
    use Level::*;
    match (query_dep, data_dep) {
        (Low | Medium, Low) => High,
        (Low | Medium, Medium) => Medium,
        (Low | Medium, High) => Low,
        (High, Low) => Medium,
        (High, Medium | High) => Low,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ResultStatus {
    Achieved,
    Relevant,
    NotAchieved,
}

impl ResultStatus {
    /// Wording of the "Result achieved" column.
    pub fn label(self) -> &'static str {
        match self {
            ResultStatus::Achieved => "Y",
            ResultStatus::Relevant => "Relevant results",
            ResultStatus::NotAchieved => "N",
        }
    }
}

/// `top_normalized` is the rank-1 normalized score, `None` without hits.
pub fn result_status(top_normalized: Option<f64>, achieved: bool, relevant_threshold: f64) -> ResultStatus {
    if achieved {
        ResultStatus::Achieved
    } else if top_normalized.is_some_and(|s| s >= relevant_threshold) {
        ResultStatus::Relevant
    } else {
        ResultStatus::NotAchieved
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AssessConfig {
    pub relevant_threshold: f64,
}

impl Default for AssessConfig {
    fn default() -> Self {
        Self { relevant_threshold: 0.2 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdaptabilityRating {
    pub query_dep: Level,
    pub data_dep: Level,
    pub level: Level,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub s_no: usize,
    pub indicator_id: String,
    pub indicator: String,
    pub query: String,
    /// Document of the rank-1 hit; empty when the indicator was never located.
    pub data_source: String,
    /// `HTML`, `PDF`, `Table` or `Unknown`.
    pub source_type: String,
    pub added_keywords: Vec<String>,
    pub suitability: Level,
    pub adaptability: AdaptabilityRating,
    pub relevance_score: f64,
    pub raw_score: f64,
    pub redefinition_count: usize,
    pub result: ResultStatus,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TotalsRow {
    pub data_type: String,
    pub total_queries: usize,
    pub results_achieved: usize,
    pub relevant_results: usize,
    pub results_not_achieved: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndicatorReport {
    pub rows: Vec<ReportRow>,
    /// HTML, PDF, Table, Unknown, then Total.
    pub totals: Vec<TotalsRow>,
}

pub const DATA_TYPES: [&str; 4] = ["HTML", "PDF", "Table", "Unknown"];

pub const CSV_COLUMNS: [&str; 10] = [
    "S.No",
    "Indicator",
    "Query",
    "Data source",
    "Source Type",
    "Added Keywords",
    "Suitability",
    "Adaptability",
    "Relevance score",
    "Result achieved",
];

pub const TOTALS_COLUMNS: [&str; 5] =
    ["Data Type", "Total Queries", "Results achieved", "Relevant results", "Results not achieved"];

fn totals_for(rows: &[ReportRow]) -> Vec<TotalsRow> {
    let mut totals: Vec<TotalsRow> =
        DATA_TYPES.iter().chain(&["Total"]).map(|t| TotalsRow { data_type: t.to_string(), ..Default::default() }).collect();
    for r in rows {
        let i = DATA_TYPES.iter().position(|t| *t == r.source_type).unwrap_or(3);
        for t in [i, DATA_TYPES.len()] {
            let row = &mut totals[t];
            row.total_queries += 1;
            match r.result {
                ResultStatus::Achieved => row.results_achieved += 1,
                ResultStatus::Relevant => row.relevant_results += 1,
                ResultStatus::NotAchieved => row.results_not_achieved += 1,
            }
        }
    }
    totals
}

/// The step an indicator is judged on: its first achieved step, else its last.
pub fn decisive_step(record: &RefinementRecord) -> &LedgerStep {
    record.steps.iter().find(|s| s.result_achieved).unwrap_or_else(|| record.last_step())
}

/// One row per indicator (ordered by indicator id) and per-type totals.
///
/// Relevance scores are the decisive rank-1 raw scores divided by the
/// largest such score among indicators of the same source type.
/// `access` gives each document's access class; missing documents count as
/// open.
pub fn build_report(
    records: &[RefinementRecord],
    access: &HashMap<DocId, AccessClass>,
    cfg: &AssessConfig,
) -> Result<IndicatorReport, AssessError> {
    if records.is_empty() {
        return Err(AssessError::EmptyLedger);
    }
    let mut records: Vec<&RefinementRecord> = records.iter().collect();
    records.sort_by(|a, b| a.indicator_id.cmp(&b.indicator_id));

    let mut type_max: BTreeMap<SourceType, f64> = BTreeMap::new();
    for r in &records {
        if let Some(hit) = &decisive_step(r).top_hit {
            let m = type_max.entry(hit.source_type).or_insert(0.0);
            *m = m.max(hit.raw);
        }
    }

    let mut rows = Vec::with_capacity(records.len());
    for (i, r) in records.iter().enumerate() {
        let step = decisive_step(r);
        let (data_source, source_type, raw, normalized, class) = match &step.top_hit {
            Some(h) => {
                let max = type_max[&h.source_type];
                let norm = if max > 0.0 { (h.raw / max).clamp(0.0, 1.0) } else { 0.0 };
                let class = access.get(&h.doc_id).copied().unwrap_or_default();
                (h.doc_id.to_string(), h.source_type.report_label().to_owned(), h.raw, Some(norm), class)
            }
            None => (String::new(), "Unknown".to_owned(), 0.0, None, AccessClass::Open),
        };
        let redefinitions = r.redefinition_count();
        let query_dep = query_dependence(redefinitions);
        let data_dep = data_dependence(class, step.query.source_filter.is_some());
        rows.push(ReportRow {
            s_no: i + 1,
            indicator_id: r.indicator_id.clone(),
            indicator: r.indicator_name.clone(),
            query: step.query.indicator_terms.join(" "),
            data_source,
            source_type,
            added_keywords: step.query.keywords.clone(),
            suitability: categorize_suitability(normalized.unwrap_or(0.0))?,
            adaptability: AdaptabilityRating { query_dep, data_dep, level: adaptability(query_dep, data_dep) },
            relevance_score: normalized.unwrap_or(0.0),
            raw_score: raw,
            redefinition_count: redefinitions,
            result: result_status(normalized, r.achieved(), cfg.relevant_threshold),
        });
    }
    let totals = totals_for(&rows);
    Ok(IndicatorReport { rows, totals })
}

impl IndicatorReport {
    pub fn empty() -> Self {
        Self { rows: Vec::new(), totals: totals_for(&[]) }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    /// Rows in the ten result-summary columns.
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(CSV_COLUMNS).expect("in-memory write");
        for r in &self.rows {
            w.write_record([
                r.s_no.to_string(),
                r.indicator.clone(),
                r.query.clone(),
                r.data_source.clone(),
                r.source_type.clone(),
                r.added_keywords.join(" "),
                r.suitability.letter().to_owned(),
                r.adaptability.level.letter().to_owned(),
                format!("{:.2}", r.relevance_score),
                r.result.label().to_owned(),
            ])
            .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 csv")
    }

    /// The per-type totals table.
    pub fn totals_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(TOTALS_COLUMNS).expect("in-memory write");
        for t in &self.totals {
            w.write_record([
                t.data_type.clone(),
                t.total_queries.to_string(),
                t.results_achieved.to_string(),
                t.relevant_results.to_string(),
                t.results_not_achieved.to_string(),
            ])
            .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 csv")
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::query::{formulate, TopHit};
    use proptest::prelude::*;
    use Level::*;

    /// (rank-1 hit as (doc, type, raw), achieved, source filter)
    type StepSpec<'a> = (Option<(&'a str, SourceType, f64)>, bool, Option<&'a str>);

    pub(crate) fn record(id: &str, steps: &[StepSpec<'_>]) -> RefinementRecord {
        RefinementRecord {
            indicator_id: id.into(),
            indicator_name: id.into(),
            steps: steps
                .iter()
                .map(|(hit, achieved, src)| LedgerStep {
                    indicator_id: id.into(),
                    indicator_name: id.into(),
                    query: formulate::<&str>(id, &[], *src).unwrap(),
                    top_raw_score: hit.map_or(0.0, |h| h.2),
                    top_hit: hit.map(|(doc, st, raw)| TopHit {
                        unit_id: format!("{doc}#0"),
                        doc_id: DocId::new(doc),
                        source_type: st,
                        raw,
                        normalized: 1.0,
                    }),
                    result_achieved: *achieved,
                    idempotency_key: None,
                })
                .collect(),
        }
    }

    #[test]
    fn suitability_bins() {
        assert_eq!(categorize_suitability(0.73), Ok(High));
        assert_eq!(categorize_suitability(0.30), Ok(Low));
        assert_eq!(categorize_suitability(0.45), Ok(Medium));
        assert_eq!(categorize_suitability(0.4), Ok(Medium));
        assert_eq!(categorize_suitability(0.7), Ok(High));
        assert_eq!(categorize_suitability(0.0), Ok(Low));
        assert_eq!(categorize_suitability(1.0), Ok(High));
        assert_eq!(categorize_suitability(1.2), Err(AssessError::OutOfRange(1.2)));
        assert!(categorize_suitability(f64::NAN).is_err());
    }

    #[test]
    fn dependence_levels() {
        assert_eq!([0, 1, 2, 7].map(query_dependence), [Low, Medium, High, High]);
        assert_eq!(data_dependence(AccessClass::Open, false), Low);
        assert_eq!(data_dependence(AccessClass::Open, true), Medium);
        assert_eq!(data_dependence(AccessClass::SourceSpecific, false), Medium);
        assert_eq!(data_dependence(AccessClass::Subscription, true), High);
    }

    #[test]
    fn adaptability_matrix() {
        assert_eq!(adaptability(Low, Low), High);
        assert_eq!(adaptability(High, Medium), Low);
        assert_eq!(adaptability(Medium, Medium), Medium);
        assert_eq!(adaptability(Medium, Low), High);
        assert_eq!(adaptability(High, Low), Medium);
        assert_eq!(adaptability(High, High), Low);
    }

    #[test]
    fn statuses() {
        assert_eq!(result_status(Some(0.1), true, 0.2), ResultStatus::Achieved);
        assert_eq!(result_status(None, false, 0.2), ResultStatus::NotAchieved);
        assert_eq!(result_status(Some(0.28), false, 0.2), ResultStatus::Relevant);
        assert_eq!(result_status(Some(0.19), false, 0.2), ResultStatus::NotAchieved);
    }

    #[test]
    fn report_rows_and_totals() {
        let records = vec![
            record("a", &[(Some(("D1", SourceType::Table, 10.0)), true, None)]),
            record("b", &[(Some(("D2", SourceType::PdfText, 9.67)), false, None), (
                Some(("D2", SourceType::PdfText, 17.57)),
                true,
                None,
            )]),
            record("c", &[(None, false, None), (Some(("D4", SourceType::PdfText, 5.0)), false, Some("D4"))]),
            record("d", &[(None, false, None)]),
        ];
        let access = HashMap::from([(DocId::new("D4"), AccessClass::Subscription)]);
        let rep = build_report(&records, &access, &AssessConfig::default()).unwrap();
        let b = &rep.rows[1];
        assert_eq!((b.source_type.as_str(), b.relevance_score, b.redefinition_count), ("PDF", 1.0, 1));
        assert_eq!(b.adaptability.level, High);
        let c = &rep.rows[2];
        assert!((c.relevance_score - 5.0 / 17.57).abs() < 1e-12);
        assert_eq!(c.result, ResultStatus::Relevant);
        assert_eq!(c.adaptability, AdaptabilityRating { query_dep: Medium, data_dep: High, level: Low });
        let d = &rep.rows[3];
        assert_eq!((d.source_type.as_str(), d.result), ("Unknown", ResultStatus::NotAchieved));

        let t: Vec<(String, [usize; 4])> = rep
            .totals
            .iter()
            .map(|t| {
                (t.data_type.clone(), [t.total_queries, t.results_achieved, t.relevant_results, t.results_not_achieved])
            })
            .collect();
        assert_eq!(t, [
            ("HTML".to_owned(), [0, 0, 0, 0]),
            ("PDF".to_owned(), [2, 1, 1, 0]),
            ("Table".to_owned(), [1, 1, 0, 0]),
            ("Unknown".to_owned(), [1, 0, 0, 1]),
            ("Total".to_owned(), [4, 2, 1, 1]),
        ]);

        let csv = rep.to_csv();
        assert!(csv.starts_with("S.No,Indicator,Query,Data source,Source Type,Added Keywords,Suitability,Adaptability,Relevance score,Result achieved\n"));
        assert!(csv.contains("\n3,c,c,D4,PDF,,L,L,0.28,Relevant results\n"), "{csv}");
        assert_eq!(build_report(&[], &access, &AssessConfig::default()), Err(AssessError::EmptyLedger));
    }

    #[test]
    fn three_achieved_indicators() {
        let records: Vec<_> = ["a", "b", "c"]
            .iter()
            .map(|id| record(id, &[(Some(("D1", SourceType::Html, 3.0)), true, None)]))
            .collect();
        let rep = build_report(&records, &HashMap::new(), &AssessConfig::default()).unwrap();
        let total = rep.totals.last().unwrap();
        assert_eq!(
            [total.total_queries, total.results_achieved, total.relevant_results, total.results_not_achieved],
            [3, 3, 0, 0]
        );
    }

    fn levels() -> impl Strategy<Value = Level> {
        prop::sample::select(vec![Low, Medium, High])
    }

    proptest! {
        #[test]
        fn suitability_is_monotone(a in 0.0f64..=1.0, b in 0.0f64..=1.0) {
            let (lo, hi) = (a.min(b), a.max(b));
            prop_assert!(categorize_suitability(lo).unwrap() <= categorize_suitability(hi).unwrap());
        }

        #[test]
        fn adaptability_is_antitone(q1 in levels(), q2 in levels(), d1 in levels(), d2 in levels()) {
            if q1 <= q2 && d1 <= d2 {
                prop_assert!(adaptability(q1, d1) >= adaptability(q2, d2));
            }
        }

        #[test]
        fn totals_add_up(spec in proptest::collection::vec((0usize..4, 0.0f64..20.0, any::<bool>()), 1..25)) {
            let types = [SourceType::Html, SourceType::PdfText, SourceType::Table];
            let records: Vec<RefinementRecord> = spec.iter().enumerate().map(|(i, (t, raw, ach))| {
                let hit = (*t < 3).then(|| ("D1", types[*t], *raw));
                record(&format!("i{i:02}"), &[(hit, *ach, None)])
            }).collect();
            let rep = build_report(&records, &HashMap::new(), &AssessConfig::default()).unwrap();
            for t in &rep.totals {
                prop_assert_eq!(t.results_achieved + t.relevant_results + t.results_not_achieved, t.total_queries);
            }
            let by_type: usize = rep.totals[..4].iter().map(|t| t.total_queries).sum();
            prop_assert_eq!(by_type, records.len());
            prop_assert_eq!(rep.totals[4].total_queries, records.len());
        }
    }
}
