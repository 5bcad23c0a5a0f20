import pytest

from moikit.errors import UnknownSuite
from moikit.verify import INVARIANTS, SUITES, coverage, run_suite

NAMES = ("spectral schatten holder minkowski-schatten minkowski-lp pvm-tensor pvm-minkowski "
         "ipd-algebra moi-welldef moi-algebra moi-estimates trace-product trace-cyclic "
         "pavlov-agree bs-agree semivariation derivative").split()


def test_registry_names():
    assert tuple(SUITES) == tuple(NAMES)


def test_coverage_complete():
    cov = coverage()
    assert len(cov) == len(INVARIANTS) == 37
    missing = [inv for inv, suites in cov.items() if not suites]
    assert missing == []
    declared = {inv for s in SUITES.values() for inv in s.covers}
    assert declared == set(INVARIANTS)


def test_unknown_suite():
    with pytest.raises(UnknownSuite):
        run_suite("nope", 1, 4)


def test_schatten_fixture_small_size():
    rep = run_suite("schatten", 3, 2)
    assert rep.passed and rep.details["fixture-s1"] == 0.0


def test_welldef_example():
    rep = run_suite("moi-welldef", 7, 6)
    assert rep.passed and rep.cases == 200
    assert rep.max_residual <= rep.tolerance


@pytest.mark.parametrize("name", ["holder", "trace-product", "semivariation", "ipd-algebra"])
def test_deterministic(name):
    a, b = run_suite(name, 11, 4), run_suite(name, 11, 4)
    assert a.as_dict() == b.as_dict()
    assert a.passed == (a.max_residual <= a.tolerance)


def test_seed_changes_cases():
    assert run_suite("holder", 1, 4).as_dict() != run_suite("holder", 2, 4).as_dict()


def test_report_keys():
    d = run_suite("holder", 5, 3).as_dict()
    assert {"suiteName", "cases", "maxResidual", "tolerance", "passed", "seed"} <= set(d)
