import json

import pytest

from tamecycles.linalg import PrimeField
from tamecycles.reports import Report, digest, matrix_document, table_document, tables_document, verdict


def test_digest_ignores_key_order():
    assert digest({"a": 1, "b": [1, 2]}) == digest({"b": [1, 2], "a": 1})
    assert digest({"a": 1}) != digest({"a": 2})
    assert len(digest([])) == 64


def test_documents():
    assert verdict(True) == "PASS"
    assert verdict(False) == "FAIL"
    assert table_document({1: 2, 0: 0, -1: 1}) == {"-1": 1, "1": 2}
    assert tables_document({"s1": {0: 1}, "0": {}}) == {"0": {}, "s1": {"0": 1}}
    assert matrix_document(PrimeField(3).matrix([[4, 2]])) == [[1, 2]]


def test_report_counts_and_exit_code():
    report = Report("cohomology", {"ell": 3})
    report.add("global sections", "PASS", table={"0": 1})
    report.add("comparison", "RECORDED")
    assert not report.failed
    assert report.exit_code() == 0
    assert report.counts() == {"PASS": 1, "FAIL": 0, "RECORDED": 1}
    report.add("stalk", "FAIL", at="s0")
    assert report.failed
    assert report.exit_code() == 1


def test_reports_are_deterministic():
    def build() -> Report:
        report = Report("verify", {"suite": "purity", "seed": 0})
        with report.timed("purity"):
            report.add("purity k=2", "PASS", twist=-1)
        return report

    first, second = build(), build()
    assert first.dumps() == second.dumps()
    document = json.loads(first.dumps())
    assert "timing" not in document
    assert document["inputs"] == digest({"suite": "purity", "seed": 0})
    assert document["checks"][0]["details"] == {"twist": -1}
    assert set(json.loads(first.dumps(timing=True))["timing"]) == {"purity"}


def test_timed_records_on_error():
    report = Report("verify", {})
    with pytest.raises(RuntimeError):
        with report.timed("broken"):
            raise RuntimeError
    assert "broken" in report.timings
