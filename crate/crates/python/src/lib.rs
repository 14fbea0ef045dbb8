//! Python bindings. Results cross the boundary as plain dicts and lists
//! built from the core types' JSON form.

use std::path::PathBuf;

use chrono::{DateTime, Utc};
use pyo3::create_exception;
use pyo3::exceptions::PyException;
use pyo3::prelude::*;
use pyo3::types::{PyBytes, PyString};
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{json, Value};

use greylit_core::docmodel::{AccessClass, DocId, SourceType};
use greylit_core::ingest::load_tables;
use greylit_core::nlp::Extractor;
use greylit_core::repo::{load_manifest, NewDocument, RefineRequest, RepoConfig, Repository};
use greylit_core::tablelabel::{resolve_cells, train_labeler, viterbi_label, LabelerModel, TrainingExample};

create_exception!(greylit, GreylitError, PyException);

fn err(e: impl std::fmt::Display) -> PyErr {
    GreylitError::new_err(e.to_string())
}

fn to_py<'py>(py: Python<'py>, value: &impl Serialize) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(value).map_err(err)?;
    py.import("json")?.call_method1("loads", (text,))
}

fn from_py<T: DeserializeOwned>(obj: &Bound<'_, PyAny>) -> PyResult<T> {
    let text: String = if obj.is_instance_of::<PyString>() {
        obj.extract()?
    } else {
        obj.py().import("json")?.call_method1("dumps", (obj,))?.extract()?
    };
    serde_json::from_str(&text).map_err(err)
}

fn parse_enum<T: DeserializeOwned>(what: &str, name: &str) -> PyResult<T> {
    serde_json::from_value(Value::String(name.to_ascii_uppercase()))
        .map_err(|_| err(format!("unknown {what} `{name}`")))
}

fn payload_bytes(payload: &Bound<'_, PyAny>) -> PyResult<Vec<u8>> {
    if let Ok(b) = payload.cast::<PyBytes>() {
        return Ok(b.as_bytes().to_vec());
    }
    Ok(payload.extract::<String>()?.into_bytes())
}

/// A document repository: sources, index and refinement ledger on disk.
#[pyclass(name = "Repository", module = "greylit")]
pub struct PyRepository {
    inner: Repository,
}

#[pymethods]
impl PyRepository {
    /// Creates a repository at `path`; `config` is a dict or JSON string.
    #[staticmethod]
    #[pyo3(signature = (path, config = None))]
    fn init(path: PathBuf, config: Option<&Bound<'_, PyAny>>) -> PyResult<Self> {
        let cfg: RepoConfig = match config {
            Some(c) => from_py(c)?,
            None => RepoConfig::default(),
        };
        Ok(Self { inner: Repository::init(&path, cfg).map_err(err)? })
    }

    #[staticmethod]
    fn open(path: PathBuf) -> PyResult<Self> {
        Ok(Self { inner: Repository::open(&path).map_err(err)? })
    }

    /// Ingests one payload. `source_type` is `html`, `pdf_text` or `table`.
    #[pyo3(signature = (payload, source_type, uri, *, id = None, title = None, access_class = "open", retrieved_at = None, format = None))]
    #[allow(clippy::too_many_arguments)]
    fn ingest<'py>(
        &mut self,
        py: Python<'py>,
        payload: &Bound<'py, PyAny>,
        source_type: &str,
        uri: String,
        id: Option<String>,
        title: Option<String>,
        access_class: &str,
        retrieved_at: Option<&str>,
        format: Option<String>,
    ) -> PyResult<Bound<'py, PyAny>> {
        let retrieved_at = match retrieved_at {
            Some(s) => DateTime::parse_from_rfc3339(s).map_err(err)?.with_timezone(&Utc),
            None => Utc::now(),
        };
        let new = NewDocument {
            id,
            title: title.unwrap_or_else(|| uri.clone()),
            uri,
            source_type: parse_enum::<SourceType>("source type", source_type)?,
            access_class: parse_enum::<AccessClass>("access class", access_class)?,
            retrieved_at,
            payload: payload_bytes(payload)?,
            extension: format,
        };
        let (doc, out) = self.inner.ingest(new).map_err(err)?;
        to_py(
            py,
            &json!({
                "document": doc,
                "sentences": out.sentences.len(),
                "records": out.records,
                "table_facts": out.facts.len(),
                "units": out.units.len(),
            }),
        )
    }

    /// Ingests every document of a manifest file; returns their ids.
    fn ingest_manifest(&mut self, path: PathBuf) -> PyResult<Vec<String>> {
        let mut ids = Vec::new();
        for d in load_manifest(&path, Utc::now()).map_err(err)? {
            let (doc, _) = self.inner.ingest(d).map_err(err)?;
            ids.push(doc.id.as_str().to_owned());
        }
        Ok(ids)
    }

    fn documents<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &self.inner.documents())
    }

    /// Ranked hits for an indicator name plus keyword phrases.
    #[pyo3(signature = (indicator, keywords = Vec::new(), source = None, limit = None))]
    fn search<'py>(
        &self,
        py: Python<'py>,
        indicator: &str,
        keywords: Vec<String>,
        source: Option<&str>,
        limit: Option<usize>,
    ) -> PyResult<Bound<'py, PyAny>> {
        let result = self.inner.search(indicator, &keywords, source, limit).map_err(err)?;
        let hits: Vec<Value> = result
            .hits
            .iter()
            .map(|h| {
                let unit = self.inner.index().get(&h.unit_id);
                json!({
                    "unit_id": h.unit_id,
                    "doc_id": h.doc_id,
                    "source_type": h.source_type,
                    "score": h.score,
                    "text": unit.map(|u| u.fields.text.as_str()),
                    "indicator": unit.map(|u| u.fields.indicator.as_str()),
                    "value": unit.map(|u| u.fields.value.as_str()),
                    "unit": unit.map(|u| u.fields.unit.as_str()),
                })
            })
            .collect();
        to_py(py, &json!({ "top_raw_score": result.top_raw_score, "hits": hits }))
    }

    /// Runs a query and records it as a refinement step.
    #[pyo3(signature = (indicator, keywords = Vec::new(), source = None, achieved = false, indicator_id = None, idempotency_key = None))]
    #[allow(clippy::too_many_arguments)]
    fn refine<'py>(
        &mut self,
        py: Python<'py>,
        indicator: String,
        keywords: Vec<String>,
        source: Option<String>,
        achieved: bool,
        indicator_id: Option<String>,
        idempotency_key: Option<String>,
    ) -> PyResult<Bound<'py, PyAny>> {
        let o = self
            .inner
            .refine(RefineRequest { indicator_id, indicator, keywords, source, achieved, idempotency_key })
            .map_err(err)?;
        to_py(
            py,
            &json!({
                "duplicate": matches!(o.outcome, greylit_core::query::StepOutcome::Duplicate),
                "step": o.step,
                "redefinition_count": o.record.redefinition_count(),
                "achieved": o.record.achieved(),
                "record": o.record,
            }),
        )
    }

    fn indicators<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &self.inner.indicators())
    }

    /// The indicator report: a dict for `json`, text for `csv`.
    #[pyo3(signature = (format = "json", totals = false))]
    fn report<'py>(&self, py: Python<'py>, format: &str, totals: bool) -> PyResult<Bound<'py, PyAny>> {
        let report = self.inner.report();
        match (format, totals) {
            ("json", _) => to_py(py, &report),
            ("csv", false) => Ok(PyString::new(py, &report.to_csv()).into_any()),
            ("csv", true) => Ok(PyString::new(py, &report.totals_csv()).into_any()),
            (f, _) => Err(err(format!("unknown format `{f}`"))),
        }
    }

    fn __len__(&self) -> usize {
        self.inner.index().len()
    }

    fn __repr__(&self) -> String {
        format!(
            "Repository(root={:?}, documents={}, units={})",
            self.inner.root(),
            self.inner.documents().len(),
            self.inner.index().len()
        )
    }
}

/// (indicator, value, unit) records found in one sentence.
#[pyfunction]
#[pyo3(signature = (text, doc_id = "stdin", ordinal = 0))]
fn extract_sentence<'py>(py: Python<'py>, text: &str, doc_id: &str, ordinal: u32) -> PyResult<Bound<'py, PyAny>> {
    let ex = Extractor::default();
    let sentence = ex.analyze(DocId::new(doc_id), ordinal, text);
    to_py(py, &ex.extract(&sentence))
}

/// Labels every table in a payload and resolves its data cells.
/// `model` is the JSON text of a trained labeler; the built-in one otherwise.
#[pyfunction]
#[pyo3(signature = (payload, format = "json", model = None))]
fn label_table<'py>(
    py: Python<'py>,
    payload: &Bound<'py, PyAny>,
    format: &str,
    model: Option<&str>,
) -> PyResult<Bound<'py, PyAny>> {
    let model = match model {
        Some(m) => LabelerModel::from_json(m).map_err(err)?,
        None => LabelerModel::builtin(),
    };
    let mut out = Vec::new();
    for grid in load_tables(&payload_bytes(payload)?, format, &DocId::new("table")).map_err(err)? {
        let labels = viterbi_label(&grid, &model).map_err(err)?;
        let cells = resolve_cells(&grid, &labels).map_err(err)?;
        out.push(json!({ "labels": labels, "cells": cells }));
    }
    to_py(py, &out)
}

/// Trains a labeler from `[{"grid": {"rows": ...}, "labels": [...]}]`;
/// returns the model as JSON text.
#[pyfunction]
#[pyo3(signature = (examples, epochs = 10))]
fn train_table_labeler(examples: &Bound<'_, PyAny>, epochs: usize) -> PyResult<String> {
    let examples: Vec<TrainingExample> = from_py(examples)?;
    Ok(train_labeler(&examples, epochs).map_err(err)?.to_json())
}

#[pymodule]
pub fn greylit(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("GreylitError", m.py().get_type::<GreylitError>())?;
    m.add_class::<PyRepository>()?;
    m.add_function(wrap_pyfunction!(extract_sentence, m)?)?;
    m.add_function(wrap_pyfunction!(label_table, m)?)?;
    m.add_function(wrap_pyfunction!(train_table_labeler, m)?)?;
    Ok(())
}
