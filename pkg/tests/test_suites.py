import pytest

from tamecycles.exceptions import UnknownSuite
from tamecycles.suites import SUITES, run_suite, suite_names


def test_suite_names():
    assert suite_names() == sorted(SUITES)
    assert {
        "recollement-roundtrip",
        "localization",
        "base-change",
        "purity",
        "adjunction-gluing",
        "chern-colimit",
        "categorical-lemma",
        "nearby-stalks",
        "fixed-points",
        "ayoub-forget",
        "monodromy-invariant",
        "kunneth",
        "corr-appendix",
    } <= set(suite_names())
    assert all(SUITES[name].description for name in suite_names())


def test_unknown_suite():
    with pytest.raises(UnknownSuite) as info:
        run_suite("no-such-suite")
    assert "purity" in info.value.content


@pytest.mark.parametrize(
    "name, cases",
    [
        ("purity", 2),
        ("localization", 3),
        ("recollement-roundtrip", 3),
        ("base-change", 2),
        ("chern-colimit", 2),
        ("nearby-stalks", 2),
        ("categorical-lemma", 2),
        ("corr-appendix", 3),
        ("kunneth", 3),
    ],
)
def test_small_runs_pass(name, cases):
    report = run_suite(name, seed=0, cases=cases)
    assert not report.failed, report.dumps()
    assert report.checks


def test_reports_do_not_depend_on_workers():
    serial = run_suite("localization", seed=3, cases=4, workers=1)
    threaded = run_suite("localization", seed=3, cases=4, workers=3)
    assert serial.dumps() == threaded.dumps()


def test_seeds_change_the_inputs():
    first = run_suite("recollement-roundtrip", seed=1, cases=1)
    second = run_suite("recollement-roundtrip", seed=2, cases=1)
    assert first.inputs != second.inputs
