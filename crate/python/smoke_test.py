"""Smoke test for the greylit extension module.

Build and install first:
    maturin build --release -m crates/python/Cargo.toml -o dist
    pip install dist/greylit-*.whl
"""

import pathlib
import sys
import tempfile

import greylit

CORPUS = pathlib.Path(__file__).resolve().parent.parent / "fixtures" / "corpus" / "manifest.json"


def main() -> int:
    recs = greylit.extract_sentence(
        "The average hectares planted per participant increased slightly 1,518 hectares."
    )
    triple = [(r["indicator_phrase"], r["value"], r["unit"]) for r in recs]
    assert triple == [("planted per participant", "1518", "hectares")], triple

    with tempfile.TemporaryDirectory() as tmp:
        repo = greylit.Repository.init(pathlib.Path(tmp) / "repo")
        ids = repo.ingest_manifest(str(CORPUS))
        assert len(ids) == 8 and len(repo) >= 30, (ids, len(repo))

        before = repo.search("Cotton exports")["top_raw_score"]
        after = repo.search("Cotton exports", ["million tonnes"])
        assert after["top_raw_score"] > before
        assert "exports" in after["hits"][0]["text"].lower()

        repo.refine("Cotton exports")
        repo.refine("Cotton exports", ["million tonnes"], achieved=True)
        rows = repo.report()["rows"]
        assert [r["indicator"] for r in rows] == ["Cotton exports"], rows
        assert repo.report("csv", totals=True).splitlines()[-1].startswith("Total,1,")

    tables = greylit.label_table("Region,Area (ha)\nNSW,1500\n", "csv")
    assert tables[0]["labels"] == ["COLUMN_HEADER", "DATA"], tables

    try:
        greylit.Repository.open("/nonexistent/greylit")
    except greylit.GreylitError:
        pass
    else:
        raise AssertionError("opening a missing repository succeeded")

    print("python smoke test: ok")
    return 0


if __name__ == "__main__":
    sys.exit(main())
