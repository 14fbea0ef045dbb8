use std::ffi::CString;

use greylit::greylit;
use pyo3::prelude::*;

fn run(code: &str) {
    pyo3::append_to_inittab!(greylit);
    Python::initialize();
    Python::attach(|py| {
        let code = CString::new(code).unwrap();
        if let Err(e) = py.run(&code, None, None) {
            e.display(py);
            panic!("python code failed: {e}");
        }
    });
}

#[test]
fn module_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let root = dir.path().join("repo");
    run(&format!(
        r#"
import greylit

recs = greylit.extract_sentence("The average hectares planted per participant increased slightly 1,518 hectares.")
assert [(r["indicator_phrase"], r["value"], r["unit"]) for r in recs] == [("planted per participant", "1518", "hectares")], recs

repo = greylit.Repository.init({root:?})
out = repo.ingest("Region,Irrigated planted area (ha)\nNSW,120000\nQueensland,45000\n", "table",
                  "https://example.org/a.csv", id="T1", access_class="subscription",
                  retrieved_at="2017-03-01T00:00:00Z")
assert out["document"]["id"] == "T1", out
assert len(repo) == out["units"] > 0

try:
    repo.ingest("x", "table", "u", id="T1")
    raise AssertionError("duplicate accepted")
except greylit.GreylitError:
    pass
try:
    repo.ingest("x", "spreadsheet", "u")
    raise AssertionError("bad type accepted")
except greylit.GreylitError as e:
    assert "spreadsheet" in str(e)

hits = repo.search("Irrigated planted area", ["ha"])["hits"]
assert hits[0]["doc_id"] == "T1" and hits[0]["source_type"] == "TABLE", hits

first = repo.refine("Irrigated planted area", idempotency_key="k0")
assert first["redefinition_count"] == 0 and not first["achieved"]
step = repo.refine("Irrigated planted area", ["ha"], achieved=True, idempotency_key="k1")
again = repo.refine("Irrigated planted area", ["ha"], achieved=True, idempotency_key="k1")
assert not step["duplicate"] and again["duplicate"]
assert step["achieved"] and step["redefinition_count"] == 1

assert greylit.Repository.open({root:?}).indicators()[0]["indicator_name"] == "Irrigated planted area"
csv = repo.report("csv")
assert csv.splitlines()[0].startswith("S.No,Indicator,"), csv
assert csv.splitlines()[1].startswith("1,Irrigated planted area,"), csv
assert repo.report()["rows"][0]["result"] is not None

tables = greylit.label_table("Region,Area (ha)\nNSW,1500\nVIC,700\n", "csv")
assert tables[0]["labels"][0] == "COLUMN_HEADER", tables
assert any(c["value_text"] == "1500" for c in tables[0]["cells"])

model = greylit.train_table_labeler([
    {{"grid": {{"rows": [["State", "Area (ha)"], ["NSW", "1,200"], ["Source: survey", ""]]}},
      "labels": ["COLUMN_HEADER", "DATA", "NOTE"]}},
], epochs=3)
assert len(greylit.label_table(b"Region,Area (ha)\nNSW,1500\n", "csv", model)[0]["labels"]) == 2
"#
    ));
}
