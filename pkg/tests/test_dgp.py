import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from oracles import direct_recursion
from tsselect.dgp import (
    DgpParams,
    InvalidParamsError,
    SeriesPair,
    conditional_mean_dy,
    enumerate_permutations,
    replication_normals,
    simulate,
    simulate_batch,
    to_var,
)
from tsselect.taxonomy import classify_params


def test_to_var_two_random_walks():
    var = to_var(DgpParams())
    np.testing.assert_array_equal(var.M1, np.eye(2))
    np.testing.assert_array_equal(var.M2, np.zeros((2, 2)))
    np.testing.assert_array_equal(var.M3, np.zeros((2, 2)))
    np.testing.assert_array_equal(var.psi, np.zeros((2, 2)))


def test_to_var_stationary_y_and_z():
    var = to_var(DgpParams(b3=-0.5, m1=1.0, m3=0.5))
    np.testing.assert_allclose(var.M1[0], [0.5, 0.0])
    np.testing.assert_allclose(var.M1[1], [0.0, 0.5])
    assert var.psi[1, 0] == 1.0


@pytest.mark.parametrize("theta", [
    DgpParams(b1=1, b3=-1, b6=10, m1=1, m3=0.5),
    DgpParams(b1=1, b4=0.5, b5=0.3, b8=1, b9=0.1, b10=-0.8, c1=1, c2=10, m1=1),
    DgpParams(b1=1, b2=0.5, b3=-0.5, b7=0.1, m1=1, m2=1, m3=0.5),
    DgpParams(b3=-0.1, b4=0.5, b8=-0.5),
])
def test_var_matches_direct_recursion(theta):
    rng = np.random.default_rng(0)
    u, e = rng.standard_normal((2, 150))
    s = simulate(theta, 0, shocks=(u, e))
    y, z = direct_recursion(theta, u, e)
    scale = max(1.0, np.abs(y).max())
    assert np.max(np.abs(s.y - y)) < 1e-10 * scale
    assert np.max(np.abs(s.z - z)) < 1e-10 * max(1.0, np.abs(z).max())


def test_zero_shocks_give_zero_series():
    n = 150
    s = simulate(DgpParams(), 1, shocks=(np.zeros(n), np.zeros(n)))
    assert not s.y.any() and not s.z.any()


def test_simulation_is_deterministic():
    theta = DgpParams(b1=1, b3=-0.5, m1=1, m3=0.5)
    a = simulate(theta, 42, replication=3)
    b = simulate(theta, 42, replication=3)
    assert a.y.tobytes() == b.y.tobytes() and a.z.tobytes() == b.z.tobytes()
    c = simulate(theta, 43, replication=3)
    assert not np.array_equal(a.y, c.y)


def test_batch_matches_single_replications():
    theta = DgpParams(b7=1)
    batch = simulate_batch(theta, 9, range(5, 12), cell=4)
    for i, r in enumerate(range(5, 12)):
        single = simulate(theta, 9, cell=4, replication=r)
        np.testing.assert_array_equal(batch.y[i], single.y)
        np.testing.assert_array_equal(batch.z[i], single.z)


def test_replication_stream_is_schedule_independent():
    full = replication_normals(5, 2, range(0, 10), 30)
    part = replication_normals(5, 2, [7, 3], 30)
    np.testing.assert_array_equal(part[0], full[7])
    np.testing.assert_array_equal(part[1], full[3])


def test_normals_look_standard():
    x = replication_normals(1, 0, range(200), 500).ravel()
    assert abs(x.mean()) < 0.01
    assert abs(x.std() - 1.0) < 0.01
    # replications are uncorrelated
    r = replication_normals(1, 0, range(2), 50_000)
    assert abs(np.corrcoef(r[0, 0], r[1, 0])[0, 1]) < 0.02


def test_white_noise_mean():
    s = simulate(DgpParams(b1=1, b3=-1), 3, T=10_000)
    assert abs(s.y[s.presample_len:].mean() - 1.0) < 0.05


def test_drift_of_z():
    s = simulate(DgpParams(m1=1.0), 3, T=10_000)
    dz = np.diff(s.z)[s.presample_len - 1:]
    assert abs(dz.mean() - 1.0) < 0.05


def test_conditional_mean_recovers_shocks():
    # ΔY_t - E[ΔY_t | past] is exactly u_t
    theta = DgpParams(b1=1, b4=0.5, b8=1, b10=-0.5, c1=1, c2=2)
    s = simulate(theta, 11)
    mean = conditional_mean_dy(theta, s.as_batch())[0]
    dy = np.diff(s.y)[s.presample_len - 1:]
    np.testing.assert_allclose(dy - mean, s.shocks[0][s.presample_len:], atol=1e-9)


@pytest.mark.parametrize("kwargs", [
    dict(b3=0.1), dict(b3=-1.5), dict(b10=0.2, c2=1), dict(m3=0.0), dict(m3=1.2),
    dict(b4=0.7, b5=0.3), dict(b10=-0.5), dict(c1=1.0), dict(b1=float("nan")),
    dict(sentinels={"b6"}),
])
def test_invalid_params_rejected(kwargs):
    with pytest.raises(InvalidParamsError):
        DgpParams(**kwargs)


def test_short_samples_rejected():
    with pytest.raises(ValueError):
        simulate(DgpParams(), 0, T=5)
    with pytest.raises(ValueError):
        simulate(DgpParams(), 0, presample=2)


def test_csv_roundtrip(tmp_path):
    s = simulate(DgpParams(b7=1), 5, T=20, presample=5)
    path = tmp_path / "pair.csv"
    s.to_csv(path)
    back = SeriesPair.from_csv(path)
    assert back.presample_len == 5 and back.sample_len == 20
    np.testing.assert_array_equal(back.y, s.y)
    np.testing.assert_array_equal(back.z, s.z)


def test_csv_without_flag_column(tmp_path):
    path = tmp_path / "yz.csv"
    rows = "\n".join(f"{i},{2 * i}" for i in range(30))
    path.write_text("y,z\n" + rows + "\n")
    s = SeriesPair.from_csv(path)
    assert s.presample_len == 3 and s.sample_len == 27


def test_malformed_csv_reports_line(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("# comment\ny,z\n\n1,2\n3,abc\n")
    with pytest.raises(ValueError, match=r"bad\.csv:5: malformed"):
        SeriesPair.from_csv(path)


def test_enumeration_is_fast_and_unique():
    import time

    start = time.perf_counter()
    perms = enumerate_permutations("all")
    assert time.perf_counter() - start < 1.0
    assert len({p[0] for p in perms}) == len(perms)
    nt = {p[0] for p in enumerate_permutations("no_trend")}
    tr = {p[0] for p in enumerate_permutations("trend")}
    assert not nt & tr
    assert nt | tr <= {p[0] for p in perms}


def test_scenario_parity():
    for theta, model in enumerate_permutations("no_trend"):
        assert model.family % 2 == 1
        assert theta.m2 == 0.0 and (theta.m3 < 1.0 or theta.m1 == 0.0)
    for theta, model in enumerate_permutations("trend"):
        assert model.family % 2 == 0


_perms = enumerate_permutations("all")


@settings(max_examples=60, deadline=None)
@given(idx=st.integers(0, len(_perms) - 1), seed=st.integers(0, 2**32 - 1))
def test_recursion_equivalence_property(idx, seed):
    theta, model = _perms[idx]
    assert classify_params(theta) == model
    rng = np.random.default_rng(seed)
    u, e = rng.standard_normal((2, 60))
    s = simulate(theta, 0, T=50, presample=10, shocks=(u, e))
    y, z = direct_recursion(theta, u, e)
    assert np.max(np.abs(s.y - y)) <= 1e-10 * max(1.0, np.abs(y).max())
    assert np.max(np.abs(s.z - z)) <= 1e-10 * max(1.0, np.abs(z).max())
