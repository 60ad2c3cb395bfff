import pytest

from shintani.verify import SUITES, run_suite


@pytest.mark.parametrize("name", sorted(SUITES))
def test_suite_passes(name):
    rep = run_suite(name, 0)
    failed = [c["name"] for c in rep["checks"] if not c["pass"]]
    assert rep["pass"], failed
    assert rep["checks"]


def test_reports_are_deterministic():
    assert run_suite("cones", 5) == run_suite("cones", 5)
    assert run_suite("all", 1)["pass"]


def test_unknown_suite():
    with pytest.raises(KeyError):
        run_suite("nope")
