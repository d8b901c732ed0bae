import doctest

import numpy as np
import pytest
from sklearn.base import clone

import tsselect.estimators
from tsselect.criteria import CriterionKind, criterion_of_fit
from tsselect.dgp import DgpParams, simulate
from tsselect.estimators import CriterionSelector, TestingSelector as HTSelector
from tsselect.hyptest import strategy_run
from tsselect.regress import fit_model
from tsselect.taxonomy import ModelId, RelationType

THETA = DgpParams(b1=1, b3=-1, b6=10, m1=1, m3=0.5)


def _X(theta=THETA, seed=1, T=50):
    s = simulate(theta, seed, T=T)
    return np.column_stack([s.y, s.z])[-(T + 3):]


def test_docstring_examples():
    res = doctest.testmod(tsselect.estimators, extraglobs={"np": np})
    assert res.failed == 0 and res.attempted > 0


def test_params_and_clone():
    est = CriterionSelector(criterion="AICc", trend_knowledge="no_trend")
    assert est.get_params() == {"criterion": "AICc", "trend_knowledge": "no_trend"}
    c = clone(est)
    assert c is not est and c.get_params() == est.get_params()
    est.set_params(criterion="CV")
    assert est.criterion == "CV"
    t = HTSelector()
    assert t.get_params() == {"variant": "Jo", "profile": "-5%", "trend_knowledge": "all"}
    assert clone(t.set_params(variant="EG")).variant == "EG"


def test_unfitted_predict_raises():
    from sklearn.exceptions import NotFittedError

    with pytest.raises(NotFittedError):
        CriterionSelector().predict(_X())


@pytest.mark.parametrize("kind", ["AIC", "AICc", "AICu", "SIC", "CV"])
def test_criterion_selector_matches_direct_fits(kind):
    X = _X()
    est = CriterionSelector(kind, "no_trend").fit(X)
    from tsselect._validation import check_pair_array

    data = check_pair_array(X)
    direct = {}
    for m in est.criterion_values_:
        direct[m] = criterion_of_fit(CriterionKind.coerce(kind), fit_model(m, data))
    assert direct == pytest.approx(est.criterion_values_)
    assert est.model_ == min(direct, key=lambda m: (direct[m], m))
    if kind == "CV":
        assert est.weights_ is None
    else:
        best = max(est.weights_, key=lambda row: row[3])
        assert best[0] == est.model_
    # in-sample prediction of dY is observed dY less the chosen model's residuals
    fit = fit_model(est.model_, data)
    dy = np.diff(data.y)[data.presample_len - 1:]
    np.testing.assert_allclose(est.predict(X), dy - fit.residuals, rtol=1e-10, atol=1e-9)


def test_sic_finds_level_relation():
    est = CriterionSelector("SIC", "no_trend").fit(_X())
    assert est.model_ == ModelId(11, 0) and est.relation_ is RelationType.A
    assert 0.0 < est.score(_X()) <= 1.0


def test_ec_model_carries_cointegrating_vector():
    theta = DgpParams(b1=1, b4=0.5, b8=1, b10=-0.5, c1=1, c2=2)
    hits = 0
    for seed in range(5):
        est = CriterionSelector("SIC", "all").fit(_X(theta, seed, 200))
        if est.model_.family in (13, 14):
            hits += 1
            assert est.predictor_.coint is not None
            assert np.all(np.isfinite(est.predict(_X(theta, seed, 200))))
    assert hits >= 3


def test_testing_selector_matches_strategy_run():
    X = _X(DgpParams(b1=1, b3=-0.5, b7=0.5, m1=1, m3=0.5), 2)
    from tsselect._validation import check_pair_array

    for variant, profile in (("EG", "-5%"), ("Jo", "-10/5")):
        est = HTSelector(variant, profile, "no_trend").fit(X)
        ref = strategy_run(check_pair_array(X), variant, profile, "no_trend")
        assert est.model_ == ref.chosen and est.relation_ == ref.relation
        assert [e.test for e in est.trace_] == [e.test for e in ref.trace]
        np.testing.assert_allclose(est.predict(X), ref.predictor(check_pair_array(X)))


def test_input_validation():
    with pytest.raises(ValueError):
        CriterionSelector().fit(np.zeros((30, 3)))
    with pytest.raises(ValueError):
        CriterionSelector().fit(np.zeros((8, 2)))
    X = _X()
    X[5, 0] = np.nan
    with pytest.raises(ValueError):
        CriterionSelector().fit(X)
    with pytest.raises(ValueError):
        CriterionSelector("FPEu").fit(_X())


def test_constant_z_is_reported():
    X = _X()
    X[:, 1] = 2.0
    est = CriterionSelector("SIC", "no_trend").fit(X)
    assert est.skipped_ and set(est.skipped_.values()) & {"z", "dz"}
    assert est.model_ not in est.skipped_
