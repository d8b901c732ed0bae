"""Simulated critical values for the unit-root and cointegration tests.

Null distributions come from independent Gaussian random walks started at
zero: without drift for the ADF, Engle-Granger and restricted-constant
Johansen statistics, with unit drift in both series for the
unrestricted-constant Johansen statistic.
"""

from __future__ import annotations

import numpy as np

from .critical_values import ALPHAS, CriticalValueEntry, CriticalValueTable
from .dgp import DgpParams, simulate_batch
from .hyptest import TestingEngine, _adf_set, _level_t
from .regress import vecm_batch
from .taxonomy import TrendKnowledge

__all__ = ["TESTS", "null_statistics", "simulate_critical_values"]

TESTS = (("adf", "nc"), ("adf", "c"), ("adf", "ct"), ("eg", "c"),
         ("johansen_trace", "rc"), ("johansen_trace", "uc"))

_PRESAMPLE = 3


def null_statistics(test: str, det_case: str, T: int, reps: int, seed: int, block: int = 2000) -> np.ndarray:
    """Draw ``reps`` statistics under the null of no cointegration / a unit root.

    Parameters
    ----------
    test : {"adf", "eg", "johansen_trace"}
    det_case : str
        ``nc``, ``c`` or ``ct`` for ADF; ``c`` for EG; ``rc`` or ``uc`` for
        the trace test.
    T : int
        Sample size.
    reps : int
    seed : int
        Master seed; each (test, case) uses its own substream.

    Returns
    -------
    ndarray, shape (reps,)
    """
    if (test, det_case) not in TESTS:
        raise ValueError(f"unsupported test {test}/{det_case}")
    if reps < 1 or T < 10:
        raise ValueError("need reps >= 1 and T >= 10")
    drift = det_case == "uc"
    theta = DgpParams(b1=1.0, m1=1.0) if drift else DgpParams()
    cell = TESTS.index((test, det_case))
    out = []
    for start in range(0, reps, block):
        batch = simulate_batch(theta, seed, range(start, min(reps, start + block)), T=T,
                               presample=_PRESAMPLE, cell=cell)
        if test == "adf":
            out.append(_level_t(_adf_set(batch.y, _PRESAMPLE, T, det_case).fits[0]))
        elif test == "eg":
            out.append(TestingEngine(batch, TrendKnowledge.UNKNOWN).eg_stage()["tstat"])
        else:
            out.append(vecm_batch(batch, 0, drift).trace)
    stats = np.concatenate(out)
    return stats[np.isfinite(stats)]


def simulate_critical_values(T: int, reps: int, seed: int, tests=TESTS, progress=None) -> CriticalValueTable:
    """Critical values at sample size ``T`` for every test in ``tests``.

    Left-tail quantiles for ADF and EG, right-tail for the trace test.
    """
    entries = []
    for n, (test, det) in enumerate(tests, start=1):
        stats = null_statistics(test, det, T, reps, seed)
        source = f"simulated: {reps} reps, T={T}, seed {seed}"
        for alpha in ALPHAS:
            q = alpha if test != "johansen_trace" else 1.0 - alpha
            entries.append(CriticalValueEntry(test, det, T, alpha, round(float(np.quantile(stats, q)), 4), source))
        if progress:
            progress(n, len(tests), f"{test}/{det}")
    return CriticalValueTable(entries)
