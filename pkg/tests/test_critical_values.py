import math
import warnings

import numpy as np
import pytest

from tsselect.calibrate import TESTS, null_statistics, simulate_critical_values
from tsselect.critical_values import (
    ALPHAS,
    CriticalValueEntry,
    CriticalValueTable,
    build_default_entries,
    default_table,
    response_surface_value,
)

BRACKETS = (25, 50, 100, 250, 500, math.inf)


@pytest.mark.parametrize("test,det,n,reg", [
    ("adf", "nc", 1, "n"), ("adf", "c", 1, "c"), ("adf", "ct", 1, "ct"), ("eg", "c", 2, "c"),
])
def test_response_surfaces_agree_with_statsmodels(test, det, n, reg):
    # statsmodels ships the 2010 update of the same surfaces
    from statsmodels.tsa.adfvalues import mackinnoncrit

    tab = default_table()
    for t in BRACKETS:
        ref = mackinnoncrit(N=n, regression=reg, nobs=t)
        for alpha, r in zip(ALPHAS, ref):
            assert tab.lookup(test, det, alpha, t) == pytest.approx(r, abs=0.02)


def test_unrestricted_trace_values_match_statsmodels():
    from statsmodels.tsa.coint_tables import c_sjt

    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        ref = c_sjt(2, 0)  # 10%, 5%, 1%
    tab = default_table()
    got = [tab.lookup("johansen_trace", "uc", a) for a in (0.10, 0.05, 0.01)]
    np.testing.assert_allclose(got, ref, atol=1e-4)


def test_shipped_csv_matches_generator():
    shipped = {(e.test, e.det_case, e.t_bracket, e.alpha): e.value for e in default_table().entries}
    built = {(e.test, e.det_case, e.t_bracket, e.alpha): e.value for e in build_default_entries()}
    assert shipped == built
    assert all(e.source for e in default_table().entries)


def test_familiar_values():
    tab = default_table()
    assert tab.lookup("adf", "c", 0.05) == pytest.approx(-2.8621, abs=1e-4)
    assert tab.lookup("adf", "c", 0.05, 50) == pytest.approx(-2.9216, abs=2e-3)
    assert tab.lookup("eg", "c", 0.05) == pytest.approx(-3.3377, abs=1e-4)


def test_lookup_reproduces_surface_at_brackets_and_interpolates():
    tab = default_table()
    for t in (25, 50, 100):
        assert tab.lookup("adf", "ct", 0.10, t) == pytest.approx(
            round(response_surface_value("adf", "ct", 0.10, t), 4), abs=1e-12)
    mid = tab.lookup("adf", "c", 0.05, 70)
    lo, hi = tab.lookup("adf", "c", 0.05, 50), tab.lookup("adf", "c", 0.05, 100)
    assert min(lo, hi) <= mid <= max(lo, hi)
    # extrapolation below the smallest bracket stays on the surface's trend
    assert tab.lookup("adf", "c", 0.05, 20) < tab.lookup("adf", "c", 0.05, 25)


def test_monotone_in_alpha():
    tab = default_table()
    for test, det in TESTS:
        for t in (25, 50, math.inf):
            vals = [tab.lookup(test, det, a, t) for a in ALPHAS]
            if test == "johansen_trace":
                assert vals[0] > vals[1] > vals[2]
            else:
                assert vals[0] < vals[1] < vals[2]


def test_non_monotone_table_rejected():
    entries = [CriticalValueEntry("adf", "c", math.inf, a, v, "x")
               for a, v in zip(ALPHAS, (-3.0, -3.5, -2.5))]
    with pytest.raises(ValueError, match="monotone"):
        CriticalValueTable(entries)


def test_unknown_lookups():
    tab = default_table()
    with pytest.raises(KeyError):
        tab.lookup("adf", "zz", 0.05)
    with pytest.raises(KeyError):
        tab.lookup("adf", "c", 0.025)


def test_csv_roundtrip(tmp_path):
    tab = default_table()
    path = tmp_path / "cv.csv"
    text = tab.to_csv(path)
    assert text.splitlines()[0] == "test,det_case,T_bracket,alpha,value,source"
    back = CriticalValueTable.from_csv(path)
    assert back.entries == tab.entries
    assert CriticalValueTable.from_csv("# comment\n" + text).entries == tab.entries


def test_null_statistics_are_reproducible():
    a = null_statistics("adf", "c", 50, 300, seed=4)
    b = null_statistics("adf", "c", 50, 300, seed=4)
    np.testing.assert_array_equal(a, b)
    assert a.shape == (300,)
    with pytest.raises(ValueError):
        null_statistics("adf", "rc", 50, 10, seed=1)


def test_simulated_values_near_shipped():
    sim = simulate_critical_values(50, 4000, seed=3, tests=(("adf", "c"), ("johansen_trace", "rc")))
    tab = default_table()
    assert sim.lookup("adf", "c", 0.05, 50) == pytest.approx(tab.lookup("adf", "c", 0.05, 50), abs=0.12)
    # the trace test at T = 50 sits a little above its asymptotic value
    assert sim.lookup("johansen_trace", "rc", 0.05, 50) == pytest.approx(
        tab.lookup("johansen_trace", "rc", 0.05), abs=1.0)
    assert all(e.source.startswith("simulated") for e in sim.entries)
