import pytest
from hypothesis import given, strategies as st

from tsselect.dgp import DgpParams, enumerate_permutations
from tsselect.taxonomy import (
    ROLES,
    ModelId,
    RelationType,
    TrendKnowledge,
    ZProcessKind,
    choosable_set,
    classify_params,
    get_model,
    list_models,
    relation_of,
    z_process_kind,
)

# family -> relation tag, transcribed from the taxonomy table
RELATION_SNAPSHOT = {1: "D", 2: "D", 3: "D", 4: "D", 5: "D", 6: "D", 7: "B", 8: "B", 9: "B", 10: "B",
                     11: "A", 12: "A", 13: "A", 14: "A", 15: "C", 16: "C"}

# number of b-parameters shown for each model row
B_COUNT = {
    "1.00": 0, "1.01": 1, "1.02": 2, "2.00": 1, "2.01": 2, "2.02": 3,
    "3.00": 2, "3.01": 3, "3.02": 4, "4.00": 3, "4.01": 4, "4.02": 5,
    "5.00": 1, "5.01": 2, "5.02": 3, "6.00": 2, "6.01": 3, "6.02": 4,
    "7.00": 1, "8.00": 2, "9.01": 2, "9.02": 4, "10.01": 3, "10.02": 5,
    "11.00": 2, "12.00": 3, "13.01": 3, "13.02": 5, "14.01": 4, "14.02": 6,
    "15.01": 3, "15.02": 5, "16.01": 4, "16.02": 6,
}


def test_list_models_has_34_sorted_specs():
    # the taxonomy table has 34 rows: families 1-6 with 0, 1 and 2 lags (18),
    # 7, 8, 11, 12 without lags (4) and 9, 10, 13-16 with 1 or 2 lags (12)
    models = list_models()
    assert len(models) == 34
    ids = [m.id for m in models]
    assert ids == sorted(ids)
    assert str(ids[0]) == "1.00" and models[0].free_coeffs == ()


def test_free_coefficient_counts_match_table():
    counts = {str(m.id): len(m.free_coeffs) for m in list_models()}
    assert counts == B_COUNT


def test_model_14_02_regressors():
    spec = get_model("14.02")
    assert set(spec.free_coeffs) == {"intercept", "dy1", "dy2", "dz1", "dz2", "ec"}
    assert spec.has_cointegration and spec.c_count == 8


def test_fixed_terms():
    assert get_model("5.00").fixed_terms == (("y_lag", -1.0),)
    assert get_model("11.00").fixed_terms == (("y_lag", -1.0),)
    assert get_model("1.00").fixed_terms == ()


@pytest.mark.parametrize("spec", list_models(), ids=str)
def test_roles_are_known(spec):
    roles = list(spec.free_coeffs) + [r for r, _ in spec.fixed_terms]
    assert len(set(roles)) == len(roles)
    assert set(roles) <= set(ROLES)
    assert spec.max_lag_needed <= 3


def test_relation_mapping_snapshot():
    assert {f: relation_of(f).value for f in range(1, 17)} == RELATION_SNAPSHOT
    for m in list_models():
        assert m.relation is relation_of(m.family)


@pytest.mark.parametrize("bad", [(7, 1), (9, 0), (11, 2), (17, 0), (1, 3), (0, 0)])
def test_invalid_model_ids_rejected(bad):
    with pytest.raises(ValueError):
        ModelId(*bad)


def test_model_id_text_roundtrip():
    for m in list_models():
        assert ModelId.parse(str(m.id)) == m.id
    assert str(ModelId(13, 2)) == "13.02"


def test_classify_examples():
    assert classify_params(DgpParams(b1=1, b3=-1)) == ModelId(5, 0)
    assert classify_params(DgpParams(b7=1)) == ModelId(7, 0)
    assert classify_params(DgpParams(b6=1, b7=1, b3=-1)) is None
    assert classify_params(DgpParams()) == ModelId(1, 0)
    assert classify_params(DgpParams(b1=1, b3=-1, b6=10, m1=1, m3=0.5)) == ModelId(11, 0)


def test_classify_respects_sentinels():
    # b1 = 0.00001 flagged as a stand-in for zero
    theta = DgpParams(b1=1e-5, b4=0.5, b8=1, b10=-0.8, c1=1, c2=1, sentinels={"b1"})
    assert classify_params(theta) == ModelId(13, 1)
    theta = DgpParams(b1=1e-5, b4=0.5, b8=1, b10=-0.8, c1=1, c2=1)
    assert classify_params(theta) == ModelId(14, 1)


def test_choosable_sets():
    odd = choosable_set("no_trend")
    even = choosable_set(TrendKnowledge.KNOWN_PRESENT)
    assert len(odd) == len(even) == 17
    assert {m.family for m in odd} == {1, 3, 5, 7, 9, 11, 13, 15}
    assert {m.family for m in even} == {2, 4, 6, 8, 10, 12, 14, 16}
    assert choosable_set("all") == {m.id for m in list_models()}


def test_z_process_kinds():
    assert z_process_kind(0, 0, 1) is ZProcessKind.RANDOM_WALK
    assert z_process_kind(1, 0, 1) is ZProcessKind.RANDOM_WALK_DRIFT
    assert z_process_kind(1, 0, 0.5) is ZProcessKind.STATIONARY_CONSTANT
    assert z_process_kind(1, 1, 0.5) is ZProcessKind.TREND_STATIONARY
    assert z_process_kind(0, 1, 1) is None


@pytest.mark.parametrize("scenario", ["all", "no_trend", "trend"])
def test_every_permutation_classifies(scenario):
    for theta, model in enumerate_permutations(scenario):
        got = classify_params(theta)
        assert got == model
        assert got.family not in (15, 16)
        assert relation_of(got.family) in RelationType


_b = st.sampled_from([0.0, 0.1, 1.0])


@given(b1=_b, b4=st.sampled_from([0.0, 0.5]), b6=_b, b7=_b, b8=_b)
def test_classification_is_a_function_of_the_nonzero_pattern(b1, b4, b6, b7, b8):
    # scaling every nonzero coefficient keeps the zero pattern, hence the model
    def make(scale):
        kw = dict(b1=b1 * scale, b4=b4, b6=b6 * scale, b7=b7 * scale, b8=b8 * scale)
        if b6:
            kw["b3"] = -1.0
        return DgpParams(**kw)

    assert classify_params(make(1.0)) == classify_params(make(3.0))
